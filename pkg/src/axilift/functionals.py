"""Scaling tests of the explicit variational constructions: axis cutoffs and
their capacity, the quartic counterexample family, and weighted Sobolev,
multiplier and annular measure-comparison ratios."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate as spi

from .corridor import CorridorParams, derive_corridor
from .elliptic import solve_potential
from .errors import DomainError, ResolutionError, UndefinedRatioWarning
from .fitting import FitResult, fit_loglog
from .grid import (MeridianGrid, ScalarField, SpaceTimeField, cell_gradient_energy,
                   dirichlet_energy, integrate, lp_norm, trapezoid_weights)

_QUAD = dict(epsabs=0.0, epsrel=1e-12, limit=200)

# z-factors of v(r, z) = g(r) (1 - z^2)
_Z_QUARTIC = 256.0 / 315.0   # int (1-z^2)^4
_Z_SQUARE = 16.0 / 15.0      # int (1-z^2)^2
_Z_DERIV = 8.0 / 3.0         # int (2z)^2


def ramp(s):
    """Quintic smoothstep: 0 for s <= 1, 1 for s >= 2."""
    t = np.clip(np.asarray(s, dtype=float) - 1.0, 0.0, 1.0)
    return t**3 * (10.0 - 15.0 * t + 6.0 * t * t)


def ramp_prime(s):
    t = np.asarray(s, dtype=float) - 1.0
    inside = (t > 0.0) & (t < 1.0)
    return np.where(inside, 30.0 * t * t * (1.0 - t) ** 2, 0.0)


@dataclass(frozen=True)
class CutoffProfile:
    """chi(r) = ramp(r / epsilon): zero on r <= epsilon, one on r >= 2 epsilon."""

    epsilon: float

    def __post_init__(self):
        _check_eps(self.epsilon)

    def __call__(self, r):
        return ramp(np.asarray(r, dtype=float) / self.epsilon)

    def derivative(self, r):
        return ramp_prime(np.asarray(r, dtype=float) / self.epsilon) / self.epsilon


def _check_eps(eps):
    if not (0.0 < eps < 0.25):
        raise DomainError(f"epsilon must lie in (0, 1/4), got {eps}")


def _quad(func, lo, hi):
    return spi.quad(func, lo, hi, **_QUAD)[0]


def cutoff_energies(epsilon: float) -> tuple[float, float]:
    """(int |1 - chi|^2 dmu5, int |chi'|^2 dmu5) over the unit meridian cylinder."""
    _check_eps(epsilon)
    chi = CutoffProfile(epsilon)
    eps = epsilon
    mass = eps**4 / 4.0 + _quad(lambda r: (1.0 - float(chi(r))) ** 2 * r**3, eps, 2 * eps)
    grad = _quad(lambda r: float(chi.derivative(r)) ** 2 * r**3, eps, 2 * eps)
    return 2.0 * mass, 2.0 * grad


def capacity_bound(epsilon: float) -> float:
    """Weighted W^{1,2} energy of psi = 1 - chi, a competitor for the axis capacity."""
    mass, grad = cutoff_energies(epsilon)
    return mass + grad


def ramp_constants() -> tuple[float, float]:
    """(c_mass, c_grad) with cutoff_energies(eps) == (c_mass eps^4, c_grad eps^2)."""
    c_mass = 2.0 * (0.25 + _quad(lambda s: (1.0 - float(ramp(s))) ** 2 * s**3, 1.0, 2.0))
    c_grad = 2.0 * _quad(lambda s: float(ramp_prime(s)) ** 2 * s**3, 1.0, 2.0)
    return c_mass, c_grad


def cutoff_energies_grid(epsilon: float, grid: MeridianGrid) -> tuple[float, float]:
    """Grid evaluation of :func:`cutoff_energies`, for cross-checks at moderate epsilon."""
    chi = CutoffProfile(epsilon)
    psi = grid.sample(lambda R, Z: 1.0 - chi(R))
    mass = integrate(psi.with_values(psi.values**2), 3.0)
    grad = dirichlet_energy(psi, 3.0, boundary="free")
    return mass, grad


@dataclass
class ScalingSeries:
    params: np.ndarray
    values: np.ndarray
    fit: FitResult

    @property
    def slope(self):
        return self.fit.slope

    @property
    def residual(self):
        return self.fit.max_abs_residual

    def rows(self):
        return [(p, v, math.log(p), math.log(v)) for p, v in zip(self.params, self.values)]


def scaling_series(func, params) -> ScalingSeries:
    params = np.asarray(sorted(params, reverse=True), dtype=float)
    if len(params) < 4:
        raise DomainError("a scaling series needs at least 4 points")
    values = np.array([func(p) for p in params], dtype=float)
    return ScalingSeries(params, values, fit_loglog(params, values))


def dyadic(lo_exp: int, hi_exp: int):
    """[2^-lo_exp, ..., 2^-hi_exp]."""
    return [2.0 ** -k for k in range(lo_exp, hi_exp + 1)]


# ------------------------------------------------------------ quartic family


@dataclass(frozen=True)
class QuarticProfile:
    quartic: float
    dirichlet: float
    quotient_sq: float
    quotient_ckn: float


def quartic_profile(alpha: float, rho: float) -> QuarticProfile:
    """Energies of v(r, z) = (1 - ramp(r/rho)) (1 - z^2)."""
    derive_corridor(alpha)
    if not (0.0 < rho < 0.5):
        raise DomainError(f"rho must lie in (0, 1/2), got {rho}")
    power = 4.0 * alpha - 1.0
    g = lambda r: 1.0 - float(ramp(r / rho))
    gp = lambda r: -float(ramp_prime(r / rho)) / rho
    r_quartic = rho ** (power + 1.0) / (power + 1.0) + _quad(lambda r: g(r) ** 4 * r**power, rho, 2 * rho)
    quartic = _Z_QUARTIC * r_quartic
    radial = _Z_SQUARE * _quad(lambda r: gp(r) ** 2 * r**3, rho, 2 * rho)
    axial = _Z_DERIV * (rho**4 / 4.0 + _quad(lambda r: g(r) ** 2 * r**3, rho, 2 * rho))
    dirichlet = radial + axial
    return QuarticProfile(quartic, dirichlet, math.sqrt(quartic) / dirichlet, quartic**0.25 / math.sqrt(dirichlet))


# ------------------------------------------------------------ Sobolev ratio


def _undefined(what):
    warnings.warn(f"{what}: zero denominator, ratio undefined", UndefinedRatioWarning, stacklevel=3)
    return float("nan")


def parabolic_bump(grid: MeridianGrid, dt: float, scale: float = 1.0) -> SpaceTimeField:
    """psi(r/s, z/s, t/s^2) for the bump (1 - r^2)^3 (1 - z^2)^3 (4t(1+t))^2,
    supported in the parabolic cylinder of radius s."""
    from .grid import time_steps

    n = time_steps(dt)
    times = -1.0 + np.arange(n + 1) * dt
    R, Z = grid.mesh()
    x, y = R / scale, Z / scale
    space = np.where((x < 1) & (np.abs(y) < 1), (1 - x**2) ** 3 * (1 - y**2) ** 3, 0.0)
    tau = times / scale**2
    prof = np.where(tau > -1.0, (4.0 * tau * (1.0 + tau)) ** 2, 0.0)
    return SpaceTimeField(grid, dt, prof[:, None, None] * space[None])


def sobolev_ratio(psi: SpaceTimeField, params: CorridorParams, R: float = 1.0) -> float:
    """||psi||_{L^q*(dmu* dt)} / (sup_t ||psi||_{L2(dmu*)} + ||grad psi||_{L2(dmu* dt)})."""
    if not (0.0 < R <= 1.0):
        raise DomainError(f"R must lie in (0, 1], got {R}")
    g = psi.grid
    a, q = params.a_weight, params.q_star
    outside = (g.r_centers[:, None] >= R) | (np.abs(g.z_centers)[None, :] >= R)
    if np.any(psi.snapshots[:, outside] != 0.0) or np.any(psi.snapshots[psi.times < -R * R] != 0.0):
        raise DomainError("psi must be supported inside Q_R")
    m = g.cell_mass(a)
    tw = trapezoid_weights(len(psi.times), psi.dt)
    lq = float(np.einsum("k,kij,ij->", tw, np.abs(psi.snapshots) ** q, m)) ** (1.0 / q)
    sup_l2 = math.sqrt(float(np.max(np.einsum("kij,ij->k", psi.snapshots**2, m))))
    grad2 = sum(w * float(np.sum(cell_gradient_energy(u, g, a))) for w, u in zip(tw, psi.snapshots))
    denom = sup_l2 + math.sqrt(grad2)
    if denom == 0.0:
        return _undefined("sobolev_ratio")
    return lq / denom


# ------------------------------------------------------------ multiplier


def multiplier_ratio(G: ScalarField, tol: float = 1e-10) -> float:
    """||Phi||_{L10(dmu5)} / ||G||_{L2(dmu5)} with -Delta_5 Phi = G."""
    gnorm = lp_norm(G, 2.0, 3.0)
    if gnorm == 0.0:
        return _undefined("multiplier_ratio")
    phi = solve_potential(G, tol)
    return lp_norm(phi, 10.0, 3.0) / gnorm


def random_smooth_field(grid: MeridianGrid, rng: np.random.Generator, modes: int = 4) -> ScalarField:
    """Random combination of sin(k pi (1 - r^2)) sin(m pi (z + 1)/2), k, m <= modes,
    with amplitudes decaying like 1/(k m)."""
    R, Z = grid.mesh()
    v = np.zeros(grid.shape)
    for k in range(1, modes + 1):
        for m in range(1, modes + 1):
            c = rng.standard_normal() / (k * m)
            v += c * np.sin(k * math.pi * (1.0 - R**2)) * np.sin(m * math.pi * (Z + 1.0) / 2.0)
    return ScalarField(grid, v)


# ------------------------------------------------------------ annular comparison


def annulus_mask(grid: MeridianGrid, R: float, theta: float) -> np.ndarray:
    """Cells lying entirely in theta R <= r <= R with center |z| < R."""
    tiny = 1e-12
    inner = grid.r_faces[:-1] >= theta * R - tiny
    outer = grid.r_faces[1:] <= R + tiny
    return (inner & outer)[:, None] & (np.abs(grid.z_centers) < R)[None, :]


def annular_constant(a: float, theta: float, p: float) -> float:
    """Sharp C_theta for ||f||_{Lp(A, r^a)} <= C_theta R^{(a-3)/p} ||f||_{Lp(A, r^3)}."""
    return 1.0 if a >= 3.0 else theta ** ((a - 3.0) / p)


def annular_comparison(f: ScalarField, R: float, theta: float, p: float,
                       params: CorridorParams | None = None, a: float | None = None):
    """Return (lhs, rhs) of the annular dmu*/dmu5 comparison; lhs <= rhs."""
    if not (0.0 < theta < 1.0):
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    if not (0.0 < R <= 1.0):
        raise DomainError(f"R must lie in (0, 1], got {R}")
    if p < 1.0:
        raise DomainError("p must be >= 1")
    if a is None:
        if params is None:
            raise DomainError("need params or an explicit weight power")
        a = params.a_weight
    g = f.grid
    if theta * R < 2.0 * g.hr:
        raise ResolutionError(f"annulus inner radius {theta * R:g} below 2 hr = {2 * g.hr:g}")
    mask = annulus_mask(g, R, theta)
    if not mask.any():
        raise ResolutionError("annulus contains no whole cells")
    lhs = lp_norm(f, p, a, mask)
    rhs = annular_constant(a, theta, p) * R ** ((a - 3.0) / p) * lp_norm(f, p, 3.0, mask)
    return lhs, rhs
