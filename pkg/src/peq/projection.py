"""Surface-pressure projection enforcing the depth-integrated divergence constraint.

The constraint functional and the correction gradient are built from the same
centered stencils and ghost closures as the rest of the model, so one Poisson
solve removes the divergence of the depth-averaged velocity down to the solve
residual, not just to truncation error.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .diffusion import SolveError
from .model import Grid
from .stencils import BC, ODD, d_x2, d_y2, depth_integral, fill_ghosts, pad

_BC_PS = BC()
_BC_U1 = BC(x_lo=ODD, x_hi=ODD)
_BC_U2 = BC(y_lo=ODD, y_hi=ODD)


def grad_surface(ps: np.ndarray, grid: Grid):
    """Centered gradient of a 2D surface scalar with mirror ghosts."""
    g = fill_ghosts(pad(ps), _BC_PS)
    return d_x2(g, grid.dx), d_y2(g, grid.dy)


def div_surface(u1: np.ndarray, u2: np.ndarray, grid: Grid) -> np.ndarray:
    """Centered divergence of a 2D vector with wall-normal odd ghosts."""
    g1 = fill_ghosts(pad(u1), _BC_U1)
    g2 = fill_ghosts(pad(u2), _BC_U2)
    return d_x2(g1, grid.dx) + d_y2(g2, grid.dy)


class PoissonSolver2D:
    """Dense factorization of the composed operator div_surface(grad_surface(.)).

    The operator is symmetric negative semidefinite with nullspace spanned by
    constants (the wall closures suppress checkerboards), so a rank-one mean
    regularization makes it definite; solutions are returned mean-zero.
    """

    def __init__(self, grid: Grid, residual_tol: float = 1e-10):
        self.grid = grid
        self.residual_tol = residual_tol
        n = grid.nx * grid.ny
        a = np.empty((n, n))
        e = np.zeros((grid.nx, grid.ny))
        flat = e.reshape(-1)
        for j in range(n):
            flat[j] = 1.0
            a[:, j] = -self.apply(e).reshape(-1)
            flat[j] = 0.0
        sigma = np.trace(a) / n
        self._factor = cho_factor(a + sigma * np.full((n, n), 1.0 / n))

    def apply(self, ps: np.ndarray) -> np.ndarray:
        """div_surface(grad_surface(ps)) with the correction-field ghost rules."""
        gx, gy = grad_surface(ps, self.grid)
        return div_surface(gx, gy, self.grid)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve apply(ps) = rhs for mean-zero ps; rhs must be mean-free."""
        b = rhs - rhs.mean()
        ps = cho_solve(self._factor, -b.reshape(-1)).reshape(rhs.shape)
        ps -= ps.mean()
        norm_b = np.linalg.norm(b)
        if norm_b > 0.0:
            residual = np.linalg.norm(self.apply(ps) - b) / norm_b
            if residual > self.residual_tol:
                raise SolveError(
                    f"surface Poisson residual {residual:.3e} exceeds "
                    f"tolerance {self.residual_tol:.1e}"
                )
        return ps


def depth_average(f: np.ndarray, grid: Grid) -> np.ndarray:
    return depth_integral(f, grid.dz) / grid.h


def constraint_divergence(v1: np.ndarray, v2: np.ndarray, grid: Grid) -> np.ndarray:
    """Depth-integrated horizontal divergence (the quantity the projection kills)."""
    return div_surface(depth_integral(v1, grid.dz), depth_integral(v2, grid.dz), grid)


def constraint_residual(v1: np.ndarray, v2: np.ndarray, grid: Grid) -> float:
    """Max constraint divergence, relative to the natural h*|v|/dx scale."""
    scale = max(float(np.max(np.abs(v1))), float(np.max(np.abs(v2))))
    scale = scale * grid.h / min(grid.dx, grid.dy) + 1e-300
    return float(np.max(np.abs(constraint_divergence(v1, v2, grid)))) / scale


def barotropic_projection(
    v1_star: np.ndarray,
    v2_star: np.ndarray,
    dt: float,
    solver: PoissonSolver2D,
    grid: Grid,
):
    """Project the provisional velocity onto the constraint set.

    Solves for the surface pressure whose z-uniform gradient correction removes
    the divergence of the depth-averaged velocity; returns (v1, v2, ps).
    """
    rhs = div_surface(
        depth_average(v1_star, grid), depth_average(v2_star, grid), grid
    ) / dt
    ps = solver.solve(rhs)
    gx, gy = grad_surface(ps, grid)
    v1 = v1_star - dt * gx[:, :, None]
    v2 = v2_star - dt * gy[:, :, None]
    return v1, v2, ps
