"""The Morrey scale recursion, the De Giorgi level recursion, and the closing
exponent arithmetic for the source branch."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import kernels
from .corridor import CorridorParams
from .errors import ConfigurationError, DomainError

DECAY_FLOOR = 1e-300
DIVERGE_CEIL = 1e300
VERDICTS = ("decayed-below-threshold", "diverged", "exhausted")


@dataclass(frozen=True)
class MorreyConfig:
    kappa: float
    c_src: float
    gain_delta: float
    theta: float
    r0: float = 1.0
    e0: float = 0.0
    max_steps: int = 20000

    def __post_init__(self):
        if not (0.0 < self.kappa < 1.0):
            raise ConfigurationError(f"kappa must lie in (0, 1), got {self.kappa}")
        if not self.c_src > 0.0:
            raise ConfigurationError("c_src must be positive")
        if not self.gain_delta > 0.0:
            raise ConfigurationError("gain_delta must be positive")
        if not (0.0 < self.theta < 1.0):
            raise ConfigurationError("theta must lie in (0, 1)")
        if not (0.0 < self.r0 <= 1.0):
            raise ConfigurationError("r0 must lie in (0, 1]")
        if not self.e0 >= 0.0:
            raise ConfigurationError("e0 must be >= 0")

    @classmethod
    def from_corridor(cls, params: CorridorParams, **kw):
        return cls(gain_delta=params.gain_delta, **kw)

    def guaranteed_e0(self):
        """Largest e0 for which a one-line induction gives E_{n+1} <= (1+kappa)/2 E_n."""
        return (1.0 - self.kappa) / (2.0 * self.c_src * self.r0**self.gain_delta)


@dataclass(frozen=True)
class DeGiorgiConfig:
    beta_dg: float
    lambda1: float | None = None
    lambda2: float | None = None
    c_big: float = 16.0
    K: float = 1.0
    R: float = 1.0
    phi_r: float = 0.0
    y0: float = 0.0
    max_steps: int = 5000

    def __post_init__(self):
        if not (0.0 < self.beta_dg < 1.0):
            raise ConfigurationError("beta_dg must lie in (0, 1)")
        default = 2.0 * (1.0 + self.beta_dg)
        if self.lambda1 is None:
            object.__setattr__(self, "lambda1", default)
        if self.lambda2 is None:
            object.__setattr__(self, "lambda2", default)
        if not (self.lambda1 > 0 and self.lambda2 > 0 and self.c_big > 0 and self.K > 0 and self.R > 0):
            raise ConfigurationError("lambda1, lambda2, c_big, K, R must be positive")
        if not (self.phi_r >= 0 and self.y0 >= 0):
            raise ConfigurationError("phi_r and y0 must be >= 0")

    @classmethod
    def from_corridor(cls, params: CorridorParams, **kw):
        return cls(beta_dg=params.beta_dg, **kw)

    def classical_bound(self):
        """y0 below which the one-term recursion Y' = C b^j Y^(1+beta) decays,
        C = c_big R^-2 K^-2beta, b = 2^lambda1."""
        c = self.c_big * self.R**-2 * self.K ** (-2.0 * self.beta_dg)
        return c ** (-1.0 / self.beta_dg) * 2.0 ** (-self.lambda1 / self.beta_dg**2)


@dataclass
class IterationTrace:
    config: object
    values: np.ndarray
    verdict: str

    @property
    def terminal(self):
        return float(self.values[-1])

    @property
    def decayed(self):
        return self.verdict == VERDICTS[0]

    def rows(self):
        return list(enumerate(self.values.tolist()))


def morrey_run(cfg: MorreyConfig) -> IterationTrace:
    """E_{n+1} = kappa E_n + c_src (theta^n r0)^gain_delta E_n^2."""
    out = np.empty(cfg.max_steps + 1)
    n, code = kernels.morrey_loop(cfg.kappa, cfg.c_src, cfg.gain_delta, cfg.theta, cfg.r0,
                                  cfg.e0, cfg.max_steps, out)
    return IterationTrace(cfg, out[:n].copy(), VERDICTS[code])


def _bisect(diverges, lo, hi, tol):
    while hi / lo - 1.0 > tol:
        mid = math.sqrt(lo * hi)
        if diverges(mid):
            hi = mid
        else:
            lo = mid
    return math.sqrt(lo * hi)


def _bracket(diverges, floor, what):
    hi = 2.0 * floor
    for _ in range(2000):
        if diverges(hi):
            return hi
        hi *= 2.0
    raise ConfigurationError(f"{what}: no divergent initial value found above {floor:g}")


def morrey_threshold(cfg: MorreyConfig, tol: float = 1e-6) -> float:
    """Critical e0 separating decay from divergence, by geometric bisection.
    ``cfg.e0`` is ignored. Never below :meth:`MorreyConfig.guaranteed_e0`."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    floor = cfg.guaranteed_e0()
    diverges = lambda e0: morrey_run(replace(cfg, e0=e0)).verdict == "diverged"
    if diverges(floor):
        raise ConfigurationError("guaranteed-decay initial value diverged; check max_steps")
    hi = _bracket(diverges, floor, "morrey_threshold")
    return _bisect(diverges, floor, hi, tol)


def degiorgi_run(cfg: DeGiorgiConfig) -> IterationTrace:
    """Y_{j+1} = c 2^(l1 j) R^-2 K^-2b Y^(1+b) + c 2^(l2 j) K^(2-2b) phi_r Y^b."""
    out = np.empty(cfg.max_steps + 1)
    n, code = kernels.degiorgi_loop(cfg.beta_dg, cfg.lambda1, cfg.lambda2, cfg.c_big, cfg.K, cfg.R,
                                    cfg.phi_r, cfg.y0, cfg.max_steps, out)
    return IterationTrace(cfg, out[:n].copy(), VERDICTS[code])


def degiorgi_threshold(cfg: DeGiorgiConfig, tol: float = 1e-6) -> float:
    """Critical y0 for the recursion in ``cfg`` (``cfg.y0`` ignored)."""
    diverges = lambda y0: degiorgi_run(replace(cfg, y0=y0)).verdict == "diverged"
    lo = cfg.classical_bound() * 2.0**-60
    if diverges(lo):
        raise ConfigurationError("recursion diverges even for tiny y0; no decay region to bracket")
    hi = _bracket(diverges, lo, "degiorgi_threshold")
    return _bisect(diverges, hi / 2.0, hi, tol)


def degiorgi_phase(base: DeGiorgiConfig, y0s, Ks, phis, Rs):
    """Verdict for every (y0, K, phi_r, R) in the product grid, y0 fastest."""
    rows = []
    for R in Rs:
        for phi in phis:
            for K in Ks:
                for y0 in y0s:
                    tr = degiorgi_run(replace(base, y0=float(y0), K=float(K), phi_r=float(phi), R=float(R)))
                    rows.append({"y0": float(y0), "K": float(K), "phi_r": float(phi), "R": float(R),
                                 "verdict": tr.verdict, "steps": len(tr.values) - 1})
    return rows


def verdict_transitions(verdicts) -> int:
    """Number of changes between consecutive verdicts along a ladder."""
    return sum(1 for a, b in zip(verdicts, verdicts[1:]) if a != b)


def degiorgi_k0(norm_h: float, phi_r: float, R: float, params: CorridorParams, c0: float) -> float:
    """Level K0 = c0 (R^-(N*+2)/2 ||H+||_2 + R^-N*/2 phi_r^(1/2))."""
    if not R > 0:
        raise DomainError("R must be positive")
    if norm_h < 0 or phi_r < 0 or c0 < 0:
        raise DomainError("norm_h, phi_r and c0 must be >= 0")
    n = params.n_star
    return c0 * (R ** (-(n + 2.0) / 2.0) * norm_h + R ** (-n / 2.0) * math.sqrt(phi_r))


def axis_envelope(h_bound: float, params: CorridorParams, r: float) -> tuple[float, float]:
    """Bounds on F and v at radius r given sup H+ <= h_bound."""
    if h_bound < 0 or not (0.0 < r <= 1.0):
        raise DomainError("need h_bound >= 0 and r in (0, 1]")
    return h_bound * r**params.m_plus, math.sqrt(h_bound) * r**params.beta_star


def source_bound(R: float, sup_weighted_v: float, l2_v_over_r: float, params: CorridorParams) -> float:
    """R^(2 alpha + beta* - 1) ||r^-beta* v||_inf ||v/r||_{L2(mu5)}."""
    if not R > 0 or sup_weighted_v < 0 or l2_v_over_r < 0:
        raise DomainError("need R > 0 and nonnegative norms")
    return R**params.source_exponent * sup_weighted_v * l2_v_over_r


def config_dict(cfg) -> dict:
    return asdict(cfg)
