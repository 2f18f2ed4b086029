"""Degenerate-weight elliptic operators on the meridian grid.

The operator is ``A u = -(1/r^a) d_r(r^a d_r u) - d_zz u + V u`` in
conservative finite-volume form, zero Dirichlet data on r = 1 and z = +-1,
and nothing at all on the axis: the r = 0 face has weight 0 so no flux
crosses it. Writing ``K`` for the symmetric stiffness matrix and ``M`` for
the diagonal of exact cell masses, ``A = M^-1 K`` is self-adjoint in the
``M`` inner product and solved there by plain conjugate gradients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .corridor import derive_corridor
from .errors import AssemblyError, ConvergenceError, DomainError, ShapeError
from .grid import MeridianGrid, ScalarField, dirichlet_energy


@dataclass(frozen=True, eq=False)
class WeightedOperator:
    grid: MeridianGrid
    a: float
    potential: ScalarField | None
    kr_in: np.ndarray  # (nr-1,) radial interior face couplings
    kz_in: np.ndarray  # (nr,)   axial interior face couplings per radial cell
    diag: np.ndarray   # (nr, nz)
    mass: np.ndarray   # (nr, nz)

    def stiffness(self, u):
        """K u (stiffness form, symmetric in the Euclidean product)."""
        u = np.ascontiguousarray(u, dtype=float)
        return kernels.stencil_apply(u, self.kr_in, self.kz_in, self.diag, np.empty_like(u))

    def apply(self, u):
        """A u = M^-1 K u."""
        return self.stiffness(u) / self.mass

    def inner(self, u, v):
        return float(np.sum(self.mass * u * v))

    def form(self, u, v=None):
        """Bilinear form a(u, v) = <K u, v>."""
        v = u if v is None else v
        return float(np.sum(self.stiffness(u) * v))

    def shifted(self, shift: float) -> "WeightedOperator":
        """The operator A + shift * I."""
        return WeightedOperator(self.grid, self.a, self.potential, self.kr_in, self.kz_in,
                                self.diag + shift * self.mass, self.mass)


def assemble(grid: MeridianGrid, a: float, potential: ScalarField | None = None) -> WeightedOperator:
    if a < 0:
        raise DomainError(f"weight power must be >= 0, got {a}")
    nr, nz = grid.shape
    hr, hz = grid.hr, grid.hz
    wr = grid.radial_mass(a)
    mass = np.ascontiguousarray(np.broadcast_to(wr[:, None] * hz, grid.shape))

    kr_in = grid.r_faces[1:-1] ** a * hz / hr
    kr_out = grid.r_faces[-1] ** a * hz / (0.5 * hr)
    kz_in = wr / hz
    kz_out = wr / (0.5 * hz)

    diag = np.zeros(grid.shape)
    diag[:-1] += kr_in[:, None]
    diag[1:] += kr_in[:, None]
    diag[-1] += kr_out
    diag[:, :-1] += kz_in[:, None]
    diag[:, 1:] += kz_in[:, None]
    diag[:, 0] += kz_out
    diag[:, -1] += kz_out
    if potential is not None:
        pv = np.asarray(potential.values if isinstance(potential, ScalarField) else potential, dtype=float)
        if pv.shape != grid.shape:
            raise ShapeError(f"potential shape {pv.shape} != grid shape {grid.shape}")
        if not np.all(np.isfinite(pv)):
            raise AssemblyError("potential must be finite at every cell center")
        diag += mass * pv
        if not isinstance(potential, ScalarField):
            potential = ScalarField(grid, pv)
    return WeightedOperator(grid, float(a), potential, np.ascontiguousarray(kr_in),
                            np.ascontiguousarray(kz_in), diag, mass)


def hardy_potential(grid: MeridianGrid, alpha: float) -> ScalarField:
    """lambda / r^2 at cell centers, lambda = 1 - alpha^2."""
    lam = derive_corridor(alpha).lambda_hardy
    return grid.sample(lambda R, Z: lam / R**2)


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    final_residual: float
    energy_identity_gap: float


def iteration_cap(n_cells: int, tol: float) -> int:
    return int(math.ceil(20.0 * math.sqrt(n_cells) * max(math.log(1.0 / tol), 1.0)))


def _solve(op: WeightedOperator, rhs: np.ndarray, tol: float, x0=None, maxiter=None):
    if not tol > 0:
        raise DomainError("tol must be positive")
    f = np.ascontiguousarray(rhs, dtype=float)
    if not np.all(np.isfinite(f)):
        raise DomainError("right-hand side must be finite")
    x = np.zeros(op.grid.shape) if x0 is None else np.array(x0, dtype=float, order="C")
    cap = iteration_cap(f.size, tol) if maxiter is None else int(maxiter)
    its, res = kernels.cg(op.kr_in, op.kz_in, op.diag, op.mass, f, x, float(tol), cap)
    if res > tol:
        raise ConvergenceError(f"CG did not reach tol={tol:g} within {cap} iterations", last_residual=res)
    return x, int(its), float(res)


def solve_dirichlet(op: WeightedOperator, f: ScalarField, tol: float, x0=None, maxiter=None):
    """Solve A u = f; returns (u, SolveReport)."""
    fv = f.values if isinstance(f, ScalarField) else np.asarray(f, dtype=float)
    if fv.shape != op.grid.shape:
        raise ShapeError("right-hand side lives on a different grid")
    x, its, res = _solve(op, fv, tol, x0, maxiter)
    gap = abs(op.form(x) - op.inner(fv, x))
    return ScalarField(op.grid, x), SolveReport(its, res, gap)


def rayleigh_quotient(op: WeightedOperator, u) -> float:
    u = np.asarray(u, dtype=float)
    return op.form(u) / op.inner(u, u)


def friedrichs_mu1(grid: MeridianGrid, a: float, tol: float, max_iter: int = 1000,
                   inner_tol: float | None = None):
    """Smallest eigenvalue of A (no potential) by inverse power iteration.

    Returns ``(mu1, mode)`` with the mode normalized to unit weighted L2
    norm and positive mean.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    op = assemble(grid, a)
    inner_tol = max(min(1e-10, 1e-2 * tol), 1e-12) if inner_tol is None else inner_tol
    R, Z = grid.mesh()
    u = (1.0 - R**2) * (1.0 - Z**2)
    u /= math.sqrt(op.inner(u, u))
    mu = rayleigh_quotient(op, u)
    for _ in range(max_iter):
        # warm start: A^-1 u is close to u / mu
        x, _, _ = _solve(op, u, inner_tol, x0=u / mu)
        x /= math.sqrt(op.inner(x, x))
        mu_new = rayleigh_quotient(op, x)
        u = x
        if abs(mu_new - mu) < tol * abs(mu_new):
            mu = mu_new
            break
        mu = mu_new
    else:
        raise ConvergenceError("inverse power iteration did not settle", last_value=mu)
    if np.sum(op.mass * u) < 0:
        u = -u
    return mu, ScalarField(grid, u)


def solve_potential(G: ScalarField, tol: float) -> ScalarField:
    """Phi with -Delta_5 Phi = G, zero on r = 1 and z = +-1."""
    op = assemble(G.grid, 3.0)
    phi, _ = solve_dirichlet(op, G, tol)
    return phi


def energy_of(op: WeightedOperator, u: ScalarField) -> float:
    """a(u, u) assembled from the grid energy functional plus the potential term."""
    e = dirichlet_energy(u, op.a)
    if op.potential is not None:
        e += float(np.sum(op.mass * op.potential.values * u.values**2))
    return e
