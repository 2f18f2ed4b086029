"""Corridor parameter alpha and every exponent derived from it."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

CSV_COLUMNS = (
    "alpha", "lambda_hardy", "gain_delta", "root_delta", "m_plus", "beta_star",
    "a_weight", "n_star", "q_star", "p_star", "theta_interp", "beta_dg",
    "source_exponent", "annular_exponent", "in_corridor",
)


@dataclass(frozen=True)
class CorridorParams:
    """Exponents attached to one value of alpha.

    ``gain_delta`` (4a - 3) and ``root_delta`` (sqrt(2 - a^2)) are two
    different quantities that are both conventionally called delta; code
    elsewhere refers to them only by these names.
    """

    alpha: float
    lambda_hardy: float
    gain_delta: float
    root_delta: float
    m_plus: float
    beta_star: float
    a_weight: float
    n_star: float
    q_star: float
    p_star: float
    theta_interp: float
    beta_dg: float
    source_exponent: float
    annular_exponent: float
    in_corridor: bool

    def as_row(self):
        return [getattr(self, name) for name in CSV_COLUMNS]


def derive_corridor(alpha: float) -> CorridorParams:
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    root = math.sqrt(2.0 - alpha * alpha)
    a_weight = 1.0 + 2.0 * root
    n_star = a_weight + 2.0
    return CorridorParams(
        alpha=alpha,
        lambda_hardy=1.0 - alpha * alpha,
        gain_delta=4.0 * alpha - 3.0,
        root_delta=root,
        m_plus=3.0 * alpha - 2.0 + root,
        beta_star=(alpha + root) / 2.0,
        a_weight=a_weight,
        n_star=n_star,
        q_star=2.0 * (1.0 + 2.0 / n_star),
        p_star=2.0 * n_star / (n_star - 2.0),
        theta_interp=n_star / (n_star + 2.0),
        beta_dg=2.0 / (n_star + 2.0),
        source_exponent=(5.0 * alpha + root - 2.0) / 2.0,
        annular_exponent=0.5 + 0.6 * (root - 1.0),
        in_corridor=0.75 < alpha < 1.0,
    )


def indicial_residual(p: CorridorParams) -> float:
    """|m+(m+ + 4 - 6a) - 2(1 - a)(5a - 1)|: zero iff m+ removes the r^-2 term."""
    a, m = p.alpha, p.m_plus
    return abs(m * (m + 4.0 - 6.0 * a) - 2.0 * (1.0 - a) * (5.0 * a - 1.0))


class RowError(DomainError):
    def __init__(self, index, cause):
        super().__init__(f"row {index}: {cause}")
        self.index = index


def exponent_table(alphas) -> list[CorridorParams]:
    rows = []
    for k, alpha in enumerate(alphas):
        try:
            rows.append(derive_corridor(alpha))
        except DomainError as exc:
            raise RowError(k, exc) from exc
    return rows


def identity_checks(p: CorridorParams) -> dict[str, float]:
    """Absolute residuals of the algebraic relations among the exponents."""
    a = p.alpha
    return {
        "indicial": indicial_residual(p),
        "beta_star_relation": abs(2.0 * p.beta_star - (p.m_plus + 2.0 - 2.0 * a)),
        "theta_q": abs(p.theta_interp * p.q_star - 2.0),
        "one_minus_theta_q": abs((1.0 - p.theta_interp) * p.q_star - 4.0 / p.n_star),
        "beta_dg_relation": abs(p.beta_dg - (1.0 - 2.0 / p.q_star)),
        "source_exponent": abs(p.source_exponent - (2.0 * a + p.beta_star - 1.0)),
        # conjugated principal part: 2m+ + 5 - 6a = a_weight
        "principal_part": abs(2.0 * p.m_plus + 5.0 - 6.0 * a - p.a_weight),
        "drift_coefficient": abs(p.m_plus + 4.0 - 4.0 * a - (2.0 - a + p.root_delta)),
        # r^(2a-2) / r^(m+) = r^(-2 beta*)
        "forcing_power": abs(2.0 * a - 2.0 - p.m_plus + 2.0 * p.beta_star),
    }

