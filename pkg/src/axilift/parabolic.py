"""Linear Hardy-singular heat flow ``w_t - Delta_5 w + (lambda/r^2) w = 0`` on
(-1, 0], and an empirical measurement of its one-step energy contraction."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .corridor import derive_corridor
from .elliptic import _solve, assemble, hardy_potential
from .errors import ConfigurationError, ConvergenceError, DomainError, EvolutionError
from .grid import (MeridianGrid, ScalarField, SpaceTimeField, cell_gradient_energy,
                   restrict_subcylinder, time_steps, trapezoid_weights)

SCHEMES = ("implicit-euler", "crank-nicolson")
STEP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class EvolutionConfig:
    grid: MeridianGrid
    alpha: float
    dt: float
    w0: ScalarField
    scheme: str = "implicit-euler"
    t_start: float = field(default=-1.0, init=False)
    t_end: float = field(default=0.0, init=False)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        time_steps(self.dt)
        derive_corridor(self.alpha)
        if self.w0.grid.shape != self.grid.shape:
            raise ConfigurationError("initial field lives on a different grid")

    @property
    def lambda_hardy(self):
        return derive_corridor(self.alpha).lambda_hardy


def hardy_operator(grid: MeridianGrid, alpha: float):
    return assemble(grid, 3.0, hardy_potential(grid, alpha))


def evolve(cfg: EvolutionConfig, step_tol: float = STEP_TOL) -> SpaceTimeField:
    n = time_steps(cfg.dt)
    op = hardy_operator(cfg.grid, cfg.alpha)
    out = np.empty((n + 1,) + cfg.grid.shape)
    out[0] = cfg.w0.values
    w = np.ascontiguousarray(cfg.w0.values, dtype=float)
    if cfg.scheme == "implicit-euler":
        stepper = op.shifted(1.0 / cfg.dt)
        scale = 1.0 / cfg.dt
    else:
        stepper = op.shifted(2.0 / cfg.dt)
        scale = 2.0 / cfg.dt
    for k in range(n):
        rhs = scale * w
        if cfg.scheme == "crank-nicolson":
            rhs = rhs - op.apply(w)
        try:
            w, _, _ = _solve(stepper, rhs, step_tol, x0=w)
        except ConvergenceError as exc:
            raise EvolutionError(f"inner solve failed at step {k + 1}: {exc}", step=k + 1) from exc
        out[k + 1] = w
    return SpaceTimeField(cfg.grid, cfg.dt, out)


def weighted_l2_norms(w: SpaceTimeField, a: float = 3.0) -> np.ndarray:
    m = w.grid.cell_mass(a)
    return np.sqrt(np.einsum("kij,ij->k", w.snapshots**2, m))


def decay_slope(w: SpaceTimeField, t_from: float = -0.5) -> float:
    """Least-squares slope of log ||w(t)||_{L2(mu5)} for t >= t_from."""
    t = w.times
    norms = weighted_l2_norms(w)
    sel = (t >= t_from - 1e-12) & (norms > 0)
    if sel.sum() < 2:
        raise DomainError("not enough nonzero snapshots to fit a decay slope")
    return float(np.polyfit(t[sel], np.log(norms[sel]), 1)[0])


def lin_energy(w: SpaceTimeField, rho: float, alpha: float) -> float:
    """Space-time integral of |grad w|^2 + lambda w^2/r^2 against r^3 over the
    subcylinder of radius rho, trapezoidal in time.

    Each face's energy is shared half-and-half by its two cells and a cell
    counts iff its center is inside, so the value is monotone in rho and
    equals the full-cylinder energy at rho = 1.
    """
    idx = restrict_subcylinder(w, rho)
    lam = derive_corridor(alpha).lambda_hardy
    g = w.grid
    mask = idx.cell_mask(g)
    pot = lam / g.r_centers[:, None] ** 2 * g.cell_mass(3.0)
    tw = trapezoid_weights(len(idx.times), w.dt)
    total = 0.0
    for weight, k in zip(tw, idx.times):
        u = w.snapshots[k]
        dens = cell_gradient_energy(u, g, 3.0) + pot * u * u
        total += weight * float(np.sum(dens[mask]))
    return total


# ------------------------------------------------------------ sample family


def dirichlet_envelope(R, Z):
    return (1.0 - R**2) * (1.0 - Z**2)


def tensor_bump(grid: MeridianGrid, k: int, m: int) -> ScalarField:
    return grid.sample(lambda R, Z: np.sin(k * math.pi * (1.0 - R**2)) * np.sin(m * math.pi * (Z + 1.0) / 2.0))


def gaussian_bump(grid: MeridianGrid, rc: float, zc: float, width: float) -> ScalarField:
    return grid.sample(lambda R, Z: np.exp(-((R - rc) ** 2 + (Z - zc) ** 2) / (2.0 * width**2))
                       * dirichlet_envelope(R, Z))


def sample_family(grid: MeridianGrid, count: int, seed: int) -> list[ScalarField]:
    """Seeded initial data: even slots are tensor sine bumps with random
    mode numbers and sign, odd slots Gaussian bumps times the Dirichlet
    envelope (1 - r^2)(1 - z^2)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    for i in range(count):
        if i % 2 == 0:
            k, m = (int(v) for v in rng.integers(1, 4, size=2))
            amp = rng.uniform(0.5, 2.0) * (1 if rng.random() < 0.5 else -1)
            f = tensor_bump(grid, k, m)
            out.append(f.with_values(amp * f.values))
        else:
            rc = rng.uniform(0.0, 0.7)
            zc = rng.uniform(-0.6, 0.6)
            width = rng.uniform(0.1, 0.3)
            out.append(gaussian_bump(grid, rc, zc, width))
    return out


# ------------------------------------------------------------ contraction


@dataclass
class ContractionReport:
    theta: float
    ratios: list[float]
    kappa_estimate: float
    sample_ids: list[int]
    e_full: list[float]
    e_theta: list[float]
    skipped: list[int]

    @property
    def has_data(self):
        return bool(self.ratios)

    @property
    def contracts(self):
        return self.has_data and self.kappa_estimate < 1.0


def estimate_contraction(theta: float, samples, cfg: EvolutionConfig, on_sample=None) -> ContractionReport:
    """Evolve each initial field with ``cfg`` and record E_lin(theta)/E_lin(1).

    ``on_sample(i, w)`` is called with every evolved field, so callers can
    run further diagnostics without evolving twice.
    """
    if not (0.0 < theta <= 1.0):
        raise DomainError(f"theta must lie in (0, 1], got {theta}")
    samples = list(samples)
    if not samples:
        raise DomainError("need at least one sample")
    ratios, ids, full, part, skipped = [], [], [], [], []
    for i, w0 in enumerate(samples):
        w = evolve(replace(cfg, w0=w0))
        if on_sample is not None:
            on_sample(i, w)
        e1 = lin_energy(w, 1.0, cfg.alpha)
        if e1 == 0.0:
            warnings.warn(f"sample {i}: E_lin(1) = 0, ratio undefined; skipped", stacklevel=2)
            skipped.append(i)
            continue
        et = e1 if theta == 1.0 else lin_energy(w, theta, cfg.alpha)
        ids.append(i)
        full.append(e1)
        part.append(et)
        ratios.append(et / e1)
    kappa = max(ratios) if ratios else float("nan")
    return ContractionReport(theta, ratios, kappa, ids, full, part, skipped)
