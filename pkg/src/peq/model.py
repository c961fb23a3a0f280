"""Physical parameters, heat-source profiles, the discrete domain and state containers."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

import numpy as np


class ParameterError(ValueError):
    """A physical or numerical parameter violates its constraints."""


@dataclass(frozen=True)
class QProfile:
    """Heat source on the domain.

    kind is one of:
      "zero"      Q = 0
      "constant"  Q = value everywhere
      "trig"      Q = amplitude * cos(i pi x/lx) * cos(j pi y/ly) * cos(k pi (z+h)/h)

    The trig modes match the Neumann symmetries of the temperature field, so
    the squared L2 norm is available in closed form (and the midpoint grid
    quadrature reproduces it exactly).
    """

    kind: str = "zero"
    value: float = 0.0
    amplitude: float = 0.0
    mode_x: int = 0
    mode_y: int = 0
    mode_z: int = 0

    def __post_init__(self):
        if self.kind not in ("zero", "constant", "trig"):
            raise ParameterError(f"unknown q_profile kind {self.kind!r}")
        for m in (self.mode_x, self.mode_y, self.mode_z):
            if m < 0:
                raise ParameterError("q_profile mode numbers must be >= 0")

    def evaluate(self, grid: "Grid") -> np.ndarray:
        """Sample the profile at every cell center."""
        if self.kind == "zero":
            return np.zeros(grid.shape)
        if self.kind == "constant":
            return np.full(grid.shape, self.value)
        cx = np.cos(self.mode_x * np.pi * grid.x / grid.lx)
        cy = np.cos(self.mode_y * np.pi * grid.y / grid.ly)
        cz = np.cos(self.mode_z * np.pi * (grid.z + grid.h) / grid.h)
        return self.amplitude * cx[:, None, None] * cy[None, :, None] * cz[None, None, :]

    def l2_norm_sq(self, lx: float, ly: float, h: float) -> float:
        """Exact integral of Q^2 over the domain."""
        vol = lx * ly * h
        if self.kind == "zero":
            return 0.0
        if self.kind == "constant":
            return self.value**2 * vol
        halves = sum(1 for m in (self.mode_x, self.mode_y, self.mode_z) if m > 0)
        return self.amplitude**2 * vol / 2.0**halves


@dataclass(frozen=True)
class Parameters:
    """Physical constants of the system.

    re1/re2: horizontal/vertical Reynolds numbers; rt1/rt2: horizontal/vertical
    heat diffusivities; alpha: Robin coefficient on the top surface; f0:
    Coriolis parameter; h: depth; lx, ly: horizontal extents of the rectangle.
    """

    re1: float = 1.0
    re2: float = 1.0
    rt1: float = 1.0
    rt2: float = 1.0
    alpha: float = 1.0
    f0: float = 0.0
    h: float = 1.0
    lx: float = 1.0
    ly: float = 1.0
    q: QProfile = field(default_factory=QProfile)


_POSITIVE_FIELDS = ("re1", "re2", "rt1", "rt2", "alpha", "h", "lx", "ly")


def validate_parameters(p: Parameters) -> Parameters:
    """Check parameter invariants; returns p unchanged or raises ParameterError."""
    for name in _POSITIVE_FIELDS:
        value = getattr(p, name)
        if not np.isfinite(value) or value <= 0:
            raise ParameterError(f"{name} must be positive, got {value}")
    if not np.isfinite(p.f0):
        raise ParameterError(f"f0 must be finite, got {p.f0}")
    return p


def k2_constant(p: Parameters) -> float:
    """Norm-equivalence constant max(2h/alpha, 2*rt2*h^2) for the temperature bound."""
    return max(2.0 * p.h / p.alpha, 2.0 * p.rt2 * p.h**2)


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on [0,lx] x [0,ly] x [-h,0].

    Cell centers carry all prognostic fields; the nz+1 horizontal cell faces
    (z = -h + k*dz) carry the diagnostic vertical velocity.
    """

    nx: int
    ny: int
    nz: int
    lx: float
    ly: float
    h: float
    dx: float = field(init=False)
    dy: float = field(init=False)
    dz: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False)
    y: np.ndarray = field(init=False, repr=False)
    z: np.ndarray = field(init=False, repr=False)
    z_faces: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if n < 4:
                raise ParameterError(f"{name} must be >= 4, got {n}")
        object.__setattr__(self, "dx", self.lx / self.nx)
        object.__setattr__(self, "dy", self.ly / self.ny)
        object.__setattr__(self, "dz", self.h / self.nz)
        object.__setattr__(self, "x", (np.arange(self.nx) + 0.5) * self.dx)
        object.__setattr__(self, "y", (np.arange(self.ny) + 0.5) * self.dy)
        object.__setattr__(self, "z", -self.h + (np.arange(self.nz) + 0.5) * self.dz)
        object.__setattr__(self, "z_faces", -self.h + np.arange(self.nz + 1) * self.dz)

    @classmethod
    def from_parameters(cls, p: Parameters, nx: int, ny: int, nz: int) -> "Grid":
        return cls(nx=nx, ny=ny, nz=nz, lx=p.lx, ly=p.ly, h=p.h)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy * self.dz

    @property
    def volume(self) -> float:
        return self.lx * self.ly * self.h


@dataclass(frozen=True)
class State:
    """Prognostic fields (v1, v2, T) at cell centers plus diagnostics.

    w_diag lives on the nz+1 horizontal faces; ps_diag is the mean-zero surface
    pressure over the horizontal rectangle.  tendency_history carries the last
    explicit tendency triple so multistep time integration can resume bitwise.
    Treated as immutable after construction.
    """

    v1: np.ndarray
    v2: np.ndarray
    t_field: np.ndarray
    w_diag: np.ndarray
    ps_diag: np.ndarray
    time: float = 0.0
    tendency_history: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = None

    def with_time(self, time: float) -> "State":
        return replace(self, time=time)

    def is_finite(self) -> bool:
        return bool(
            np.isfinite(self.v1).all()
            and np.isfinite(self.v2).all()
            and np.isfinite(self.t_field).all()
        )


def rest_state(grid: Grid, time: float = 0.0) -> State:
    """All-zero state (the trivial fixed point when Q = 0)."""
    shape = grid.shape
    return State(
        v1=np.zeros(shape),
        v2=np.zeros(shape),
        t_field=np.zeros(shape),
        w_diag=np.zeros((grid.nx, grid.ny, grid.nz + 1)),
        ps_diag=np.zeros((grid.nx, grid.ny)),
        time=time,
    )
