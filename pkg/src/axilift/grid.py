"""Cell-centered discretization of the meridian rectangle (0,1) x (-1,1).

The axis r = 0 is a cell face, never a node, so weights r^a and the Hardy
potential are only ever evaluated at r >= hr/2. Radial cell masses are the
exact integrals of r^a over each cell.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, DomainError, ShapeError


@dataclass(frozen=True, eq=False)
class MeridianGrid:
    nr: int
    nz: int
    hr: float = field(init=False)
    hz: float = field(init=False)
    r_centers: np.ndarray = field(init=False, repr=False)
    r_faces: np.ndarray = field(init=False, repr=False)
    z_centers: np.ndarray = field(init=False, repr=False)
    z_faces: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "hr", 1.0 / self.nr)
        set_(self, "hz", 2.0 / self.nz)
        r_faces = np.arange(self.nr + 1, dtype=float) / self.nr
        r_faces[-1] = 1.0
        set_(self, "r_faces", r_faces)
        set_(self, "r_centers", (np.arange(self.nr) + 0.5) / self.nr)
        set_(self, "z_faces", -1.0 + 2.0 * np.arange(self.nz + 1, dtype=float) / self.nz)
        set_(self, "z_centers", -1.0 + (np.arange(self.nz) + 0.5) * 2.0 / self.nz)
        for name in ("r_faces", "r_centers", "z_faces", "z_centers"):
            getattr(self, name).setflags(write=False)

    @property
    def shape(self):
        return (self.nr, self.nz)

    def mesh(self):
        """(R, Z) center coordinates, each of shape (nr, nz)."""
        return np.meshgrid(self.r_centers, self.z_centers, indexing="ij")

    def radial_mass(self, a: float) -> np.ndarray:
        """Exact integral of r^a over each radial cell."""
        return _radial_mass(self.nr, float(a))

    def cell_mass(self, a: float) -> np.ndarray:
        return np.broadcast_to(self.radial_mass(a)[:, None] * self.hz, self.shape)

    def sample(self, func) -> "ScalarField":
        R, Z = self.mesh()
        return ScalarField(self, np.asarray(func(R, Z), dtype=float) * np.ones(self.shape))

    def describe(self):
        return f"nr={self.nr} nz={self.nz} hr={self.hr!r} hz={self.hz!r}"


@lru_cache(maxsize=64)
def _radial_mass(nr, a):
    faces = np.arange(nr + 1, dtype=float) / nr
    faces[-1] = 1.0
    p = faces ** (a + 1.0)
    m = (p[1:] - p[:-1]) / (a + 1.0)
    m.setflags(write=False)
    return m


def build_grid(nr: int, nz: int) -> MeridianGrid:
    if int(nr) != nr or int(nz) != nz or nr < 2 or nz < 2:
        raise ConfigurationError(f"need integer nr, nz >= 2, got ({nr}, {nz})")
    return MeridianGrid(int(nr), int(nz))


@dataclass(eq=False)
class ScalarField:
    grid: MeridianGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ShapeError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("field values must be finite")

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def with_values(self, values):
        return ScalarField(self.grid, values)


@dataclass(eq=False)
class SpaceTimeField:
    """Snapshots on the uniform time mesh t_k = -1 + k*dt, k = 0..nt-1, ending at 0."""

    grid: MeridianGrid
    dt: float
    snapshots: np.ndarray  # (nt, nr, nz)

    def __post_init__(self):
        self.snapshots = np.asarray(self.snapshots, dtype=float)
        if self.snapshots.ndim != 3 or self.snapshots.shape[1:] != self.grid.shape:
            raise ShapeError(f"snapshots shape {self.snapshots.shape} incompatible with {self.grid.shape}")
        nsteps = time_steps(self.dt)
        if self.snapshots.shape[0] != nsteps + 1:
            raise ShapeError(f"expected {nsteps + 1} snapshots for dt={self.dt}, got {self.snapshots.shape[0]}")

    @property
    def times(self):
        n = self.snapshots.shape[0] - 1
        return -1.0 + np.arange(n + 1) / n

    def at(self, k) -> ScalarField:
        return ScalarField(self.grid, self.snapshots[k])


def time_steps(dt: float) -> int:
    if not (0.0 < dt <= 1.0):
        raise ConfigurationError(f"dt must lie in (0, 1], got {dt}")
    n = int(round(1.0 / dt))
    if abs(n * dt - 1.0) > 1e-9:
        raise ConfigurationError(f"dt={dt} does not divide the unit time interval")
    return n


def _check(f: ScalarField, grid=None):
    if not isinstance(f, ScalarField):
        raise ShapeError("expected a ScalarField")
    if grid is not None and f.grid is not grid and f.grid.shape != grid.shape:
        raise ShapeError("field lives on a different grid")
    return f.values


def integrate(f: ScalarField, weight_power: float) -> float:
    """Sum of f * (exact cell mass of r^a) * hz."""
    if weight_power < 0:
        raise DomainError("weight_power must be >= 0")
    v = _check(f)
    g = f.grid
    return float(np.sum(v * g.radial_mass(weight_power)[:, None]) * g.hz)


def cell_gradient_energy(values, grid: MeridianGrid, a: float, boundary: str = "dirichlet") -> np.ndarray:
    """Per-cell share of the discrete weighted Dirichlet energy.

    Every interior face contributes ``weight * quotient**2``, split evenly
    between its two cells. With ``boundary="dirichlet"`` the faces on r = 1
    and z = +-1 use a zero trace; with ``"free"`` the boundary half-cell
    reuses the nearest interior quotient instead. The r = 0 face has weight
    zero in either case. The array sums to the quadratic form of the
    assembled stiffness operator when ``boundary="dirichlet"``.
    """
    u = np.asarray(values, dtype=float)
    if u.shape != grid.shape:
        raise ShapeError(f"values shape {u.shape} != grid shape {grid.shape}")
    if boundary not in ("dirichlet", "free"):
        raise ValueError(f"unknown boundary mode {boundary!r}")
    hr, hz = grid.hr, grid.hz
    wr = grid.radial_mass(a)
    e = np.zeros_like(u)

    # radial faces at r_faces[1..nr-1]
    qr = np.diff(u, axis=0) / hr
    wf = (grid.r_faces[1:-1] ** a) * hz * hr
    er = wf[:, None] * qr * qr
    e[:-1] += 0.5 * er
    e[1:] += 0.5 * er
    if boundary == "dirichlet":
        qb = u[-1] / (0.5 * hr)
        e[-1] += hz * 0.5 * hr * qb * qb
    else:
        e[-1] += 0.5 * er[-1]

    qz = np.diff(u, axis=1) / hz
    ez = (wr * hz)[:, None] * qz * qz
    e[:, :-1] += 0.5 * ez
    e[:, 1:] += 0.5 * ez
    if boundary == "dirichlet":
        half = (wr * 0.5 * hz)
        qlo = u[:, 0] / (0.5 * hz)
        qhi = u[:, -1] / (0.5 * hz)
        e[:, 0] += half * qlo * qlo
        e[:, -1] += half * qhi * qhi
    else:
        e[:, 0] += 0.5 * ez[:, 0]
        e[:, -1] += 0.5 * ez[:, -1]
    return e


def dirichlet_energy(f: ScalarField, weight_power: float, boundary: str = "dirichlet") -> float:
    """Discrete integral of |grad f|^2 r^a dr dz."""
    v = _check(f)
    return float(np.sum(cell_gradient_energy(v, f.grid, weight_power, boundary)))


def lp_norm(f: ScalarField, p: float, weight_power: float, mask=None) -> float:
    v = np.abs(_check(f))
    g = f.grid
    dens = v ** p * g.radial_mass(weight_power)[:, None] * g.hz
    if mask is not None:
        dens = dens[mask]
    return float(np.sum(dens) ** (1.0 / p))


@dataclass(frozen=True)
class Subcylinder:
    rho: float
    radial: np.ndarray
    axial: np.ndarray
    times: np.ndarray | None

    def cell_mask(self, grid: MeridianGrid):
        mask = np.zeros(grid.shape, dtype=bool)
        mask[np.ix_(self.radial, self.axial)] = True
        return mask


def restrict_subcylinder(f, rho: float) -> Subcylinder:
    """Cells whose center lies in r < rho, |z| < rho; snapshots with t >= -rho^2.

    ``f`` may be a SpaceTimeField, ScalarField or MeridianGrid; only a
    SpaceTimeField yields a time index set.
    """
    if not (0.0 < rho <= 1.0):
        raise DomainError(f"rho must lie in (0, 1], got {rho}")
    grid = f if isinstance(f, MeridianGrid) else f.grid
    radial = np.flatnonzero(grid.r_centers < rho)
    axial = np.flatnonzero(np.abs(grid.z_centers) < rho)
    times = None
    if isinstance(f, SpaceTimeField):
        times = np.flatnonzero(f.times >= -rho * rho - 1e-12)
    return Subcylinder(float(rho), radial, axial, times)


def trapezoid_weights(n: int, dt: float) -> np.ndarray:
    w = np.full(n, dt)
    if n == 1:
        return np.zeros(1)
    w[0] = w[-1] = 0.5 * dt
    return w
