"""Second-order finite differences on the collocated grid with ghost-cell closures.

Every boundary condition used by the model reduces to "ghost = coeff * first
interior cell" across the face midpoint: coeff +1 mirrors (zero normal
derivative), -1 reflects oddly (zero face value), and the Robin closure at the
top surface uses the coefficient derived from the face-midpoint discretization
of (1/rt2) dT/dz + alpha T = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Grid, Parameters

EVEN = 1.0
ODD = -1.0


def robin_gamma(rt2: float, alpha: float, dz: float) -> float:
    """Ghost coefficient for the top-surface Robin condition.

    Derived from (T_g - T_i)/dz * (1/rt2) + alpha*(T_g + T_i)/2 = 0 with the
    face midway between ghost and interior cell.  alpha = 0 degenerates to the
    Neumann mirror (gamma = 1).
    """
    a = 1.0 / (rt2 * dz)
    return (a - 0.5 * alpha) / (a + 0.5 * alpha)


@dataclass(frozen=True)
class BC:
    """Per-face ghost coefficients, ordered (x_lo, x_hi, y_lo, y_hi, z_lo, z_hi)."""

    x_lo: float = EVEN
    x_hi: float = EVEN
    y_lo: float = EVEN
    y_hi: float = EVEN
    z_lo: float = EVEN
    z_hi: float = EVEN


def bc_v1() -> BC:
    """v1 is wall-normal on the x faces (odd) and tangential elsewhere (even)."""
    return BC(x_lo=ODD, x_hi=ODD)


def bc_v2() -> BC:
    """v2 is wall-normal on the y faces (odd) and tangential elsewhere (even)."""
    return BC(y_lo=ODD, y_hi=ODD)


def bc_temperature(p: Parameters, grid: Grid) -> BC:
    """Temperature: insulated everywhere except the Robin top surface."""
    return BC(z_hi=robin_gamma(p.rt2, p.alpha, grid.dz))


def bc_neumann() -> BC:
    """All-mirror closure (pure Neumann scalar)."""
    return BC()


def pad(interior: np.ndarray) -> np.ndarray:
    """Embed an interior field into an array with one uninitialized ghost layer."""
    g = np.zeros(tuple(n + 2 for n in interior.shape))
    g[(slice(1, -1),) * interior.ndim] = interior
    return g


def fill_ghosts(g: np.ndarray, bc: BC) -> np.ndarray:
    """Fill ghost layers in place from the interior values; idempotent bitwise.

    Faces are swept x, then y, then z; later sweeps extend over the ghost
    strips already written, so edge and corner ghosts are compositions of the
    face rules (never read by the compact stencils below).
    """
    if g.ndim == 3:
        g[0, 1:-1, 1:-1] = bc.x_lo * g[1, 1:-1, 1:-1]
        g[-1, 1:-1, 1:-1] = bc.x_hi * g[-2, 1:-1, 1:-1]
        g[:, 0, 1:-1] = bc.y_lo * g[:, 1, 1:-1]
        g[:, -1, 1:-1] = bc.y_hi * g[:, -2, 1:-1]
        g[:, :, 0] = bc.z_lo * g[:, :, 1]
        g[:, :, -1] = bc.z_hi * g[:, :, -2]
    elif g.ndim == 2:
        g[0, 1:-1] = bc.x_lo * g[1, 1:-1]
        g[-1, 1:-1] = bc.x_hi * g[-2, 1:-1]
        g[:, 0] = bc.y_lo * g[:, 1]
        g[:, -1] = bc.y_hi * g[:, -2]
    else:
        raise ValueError(f"unsupported field rank {g.ndim}")
    return g


def padded(interior: np.ndarray, bc: BC) -> np.ndarray:
    """pad + fill_ghosts in one call."""
    return fill_ghosts(pad(interior), bc)


@dataclass(frozen=True)
class GhostField:
    """A padded field together with its boundary closure."""

    data: np.ndarray
    bc: BC

    @classmethod
    def from_interior(cls, interior: np.ndarray, bc: BC) -> "GhostField":
        return cls(padded(interior, bc), bc)

    def fill(self) -> "GhostField":
        fill_ghosts(self.data, self.bc)
        return self

    @property
    def interior(self) -> np.ndarray:
        return self.data[(slice(1, -1),) * self.data.ndim]


# ---------------------------------------------------------------------------
# Centered stencils.  All take a padded, ghost-filled array and return the
# interior-shaped result.

def d_x(g: np.ndarray, dx: float) -> np.ndarray:
    return (g[2:, 1:-1, 1:-1] - g[:-2, 1:-1, 1:-1]) / (2.0 * dx)


def d_y(g: np.ndarray, dy: float) -> np.ndarray:
    return (g[1:-1, 2:, 1:-1] - g[1:-1, :-2, 1:-1]) / (2.0 * dy)


def d_z(g: np.ndarray, dz: float) -> np.ndarray:
    return (g[1:-1, 1:-1, 2:] - g[1:-1, 1:-1, :-2]) / (2.0 * dz)


def d_xx(g: np.ndarray, dx: float) -> np.ndarray:
    return (g[2:, 1:-1, 1:-1] - 2.0 * g[1:-1, 1:-1, 1:-1] + g[:-2, 1:-1, 1:-1]) / dx**2


def d_yy(g: np.ndarray, dy: float) -> np.ndarray:
    return (g[1:-1, 2:, 1:-1] - 2.0 * g[1:-1, 1:-1, 1:-1] + g[1:-1, :-2, 1:-1]) / dy**2


def d_zz(g: np.ndarray, dz: float) -> np.ndarray:
    return (g[1:-1, 1:-1, 2:] - 2.0 * g[1:-1, 1:-1, 1:-1] + g[1:-1, 1:-1, :-2]) / dz**2


def grad_h(g: np.ndarray, grid: Grid):
    """Horizontal gradient (d/dx, d/dy) of a padded scalar."""
    return d_x(g, grid.dx), d_y(g, grid.dy)


def div_h(g1: np.ndarray, g2: np.ndarray, grid: Grid) -> np.ndarray:
    """Horizontal divergence of a padded vector field."""
    return d_x(g1, grid.dx) + d_y(g2, grid.dy)


def laplace_h(g: np.ndarray, grid: Grid) -> np.ndarray:
    """Horizontal 5-point Laplacian of a padded scalar."""
    return d_xx(g, grid.dx) + d_yy(g, grid.dy)


# 2D variants for surface fields (padded shape (nx+2, ny+2)).

def d_x2(g: np.ndarray, dx: float) -> np.ndarray:
    return (g[2:, 1:-1] - g[:-2, 1:-1]) / (2.0 * dx)


def d_y2(g: np.ndarray, dy: float) -> np.ndarray:
    return (g[1:-1, 2:] - g[1:-1, :-2]) / (2.0 * dy)


# ---------------------------------------------------------------------------
# Vertical quadrature.  Integrands live at cell centers; cumulative integrals
# anchored at the bottom are carried on the nz+1 faces (exact cumulation of
# the midpoint rule per cell), while integrals anchored at the surface are
# returned at the cell centers themselves.

def vertical_cumint(f: np.ndarray, dz: float) -> np.ndarray:
    """Cumulative integral from z=-h, on faces: F_k = dz * sum_{j<k} f_j; F_0 = 0."""
    out = np.zeros(f.shape[:-1] + (f.shape[-1] + 1,))
    np.cumsum(f, axis=-1, out=out[..., 1:])
    out[..., 1:] *= dz
    return out


def vertical_int_from_surface(f: np.ndarray, dz: float) -> np.ndarray:
    """Integral from z=0 down to each cell center (values <= 0 region carry sign).

    S_k = -(dz/2 * f_k + dz * sum_{j>k} f_j); exact for constants, O(dz^2)
    for smooth integrands.
    """
    tail = np.cumsum(f[..., ::-1], axis=-1)[..., ::-1] * dz
    return -(tail - 0.5 * dz * f)


def depth_integral(f: np.ndarray, dz: float) -> np.ndarray:
    """Column integral over the full depth (midpoint rule)."""
    return np.sum(f, axis=-1) * dz
