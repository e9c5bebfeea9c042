"""Secrecy-capacity bounds under a non-negativity + average-intensity constraint.

All values are in nats per channel use.  Functions return the raw closed-form
value, which can be negative at low SNR; :func:`avg_report` bundles them with
the clamped numbers actually meaningful as capacity bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .numerics import SQRT2PI, q_function, scaled_q
from .scenario import LinkGains, is_degraded_secure

# gap between the high-SNR upper and lower asymptotes
ASYMPTOTIC_GAP = math.log(2.0 * math.sqrt(math.e) / math.pi)


@dataclass(frozen=True)
class AvgConstraints:
    """Dimming target ``xi`` and nominal intensity ``P``; ``E[X] = xi * P``."""

    xi: float
    P: float

    def __post_init__(self) -> None:
        if not 0.0 < self.xi <= 1.0:
            raise ValueError(f"dimming target must lie in (0, 1], got {self.xi!r}")
        if not (self.P > 0.0 and math.isfinite(self.P)):
            raise ValueError(f"nominal intensity must be positive and finite, got {self.P!r}")

    @property
    def mean(self) -> float:
        return self.xi * self.P


@dataclass(frozen=True)
class BoundReport:
    """Evaluated bounds for one operating point.

    ``lower_1``/``lower_2``/``upper`` are raw formula values.  When
    ``degraded`` is true (Eve's channel is at least as good as Bob's) every
    number is zero.
    """

    lower_1: float
    lower_2: float
    upper: float
    degraded: bool
    params_used: dict = field(default_factory=dict)
    asymptote_lower: float | None = None
    asymptote_upper: float | None = None

    @property
    def clamped_lower(self) -> float:
        return max(0.0, self.lower_1, self.lower_2)

    @property
    def clamped_upper(self) -> float:
        return max(0.0, self.upper)

    @classmethod
    def zero(cls) -> "BoundReport":
        return cls(0.0, 0.0, 0.0, True, {}, 0.0, 0.0)


def default_beta_delta(g: LinkGains, c: AvgConstraints, sigma_e: float) -> tuple[float, float]:
    """Suboptimal closed-form choice of the free parameters ``(beta, delta)``."""
    snr_e = g.h_e * c.mean / sigma_e
    delta = sigma_e * math.log1p(snr_e)
    t = delta / sigma_e
    s = delta + g.h_e * c.mean + sigma_e / SQRT2PI * math.exp(-0.5 * t * t)
    beta = 0.5 * s * (1.0 + math.sqrt(1.0 + 4.0 * SQRT2PI * sigma_e * scaled_q(t) / s))
    return beta, delta


def lower_bound_avg_1(
    g: LinkGains,
    c: AvgConstraints,
    sigma_b: float,
    sigma_e: float,
    beta_delta: tuple[float, float] | None = None,
) -> float:
    """Lower bound from Bob's capacity lower bound minus Eve's capacity upper bound.

    ``beta_delta`` overrides the default free parameters.
    """
    if beta_delta is None:
        beta, delta = default_beta_delta(g, c, sigma_e)
    else:
        beta, delta = beta_delta
        if not beta > 0.0:
            raise ValueError(f"beta must be positive, got {beta!r}")
        if not delta >= 0.0:
            raise ValueError(f"delta must be non-negative, got {delta!r}")
    t = delta / sigma_e
    half_t2 = 0.5 * t * t
    gauss = math.exp(-half_t2)
    snr_b = g.h_b * c.mean / sigma_b
    e_mean = delta + g.h_e * c.mean

    # ln[beta e^{-t^2/2} + sqrt(2 pi) sigma Q(t)] with e^{-t^2/2} factored out
    log_den = -half_t2 + math.log(beta + SQRT2PI * sigma_e * scaled_q(t))
    # hypot keeps 1 + e snr^2 / (2 pi) finite for snr up to ~1e308
    log_num = (
        math.log(sigma_e)
        + 0.5 * math.log(2.0 * math.pi * math.e)
        + math.log(math.hypot(1.0, math.sqrt(math.e / (2.0 * math.pi)) * snr_b))
    )
    return (
        log_num
        - log_den
        - 0.5 * q_function(t)
        - t / (2.0 * SQRT2PI) * gauss
        - half_t2 * q_function(-e_mean / sigma_e)
        - e_mean / beta
        - sigma_e / (SQRT2PI * beta) * gauss
    )


def lower_bound_avg_2(g: LinkGains, c: AvgConstraints, sigma_b: float, sigma_e: float) -> float:
    """Entropy-power-inequality bound with the exponential (max-entropy) input."""
    m2 = c.mean**2
    return 0.5 * (
        math.log(sigma_e**2 / (2.0 * math.pi * sigma_b**2))
        + math.log(math.e * m2 * g.h_b**2 + 2.0 * math.pi * sigma_b**2)
        - math.log(g.h_e**2 * m2 + sigma_e**2)
    )


def _upper_first_branch(g: LinkGains, c: AvgConstraints, sigma_b: float, sigma_e: float) -> float:
    k2 = (g.h_e * sigma_b / (g.h_b * sigma_e)) ** 2
    num = 4.0 * math.e * (sigma_b / SQRT2PI + 0.5 * g.h_b * c.mean)
    return math.log(num) - 0.5 * math.log(2.0 * math.pi * math.e * sigma_b**2 * (1.0 + k2))


def _upper_second_branch(g: LinkGains, sigma_b: float, sigma_e: float) -> float:
    return math.log(2.0 * math.sqrt(math.e) * g.h_b * sigma_e / (math.pi * g.h_e * sigma_b))


def upper_bound_switch_holds(g: LinkGains, c: AvgConstraints, sigma_b: float, sigma_e: float) -> bool:
    """True when the first (SNR-dependent) branch of the upper bound applies."""
    r = g.h_e / g.h_b
    left = math.sqrt((r * r * sigma_b**2 + sigma_e**2) / (2.0 * math.pi))
    right = r * (sigma_b / SQRT2PI + 0.5 * g.h_b * c.mean)
    return left >= right


def upper_bound_avg(g: LinkGains, c: AvgConstraints, sigma_b: float, sigma_e: float) -> float:
    """Upper bound from the dual expression of the secrecy capacity."""
    if g.h_b <= 0.0:
        raise ValueError("upper bound requires H_B > 0")
    if upper_bound_switch_holds(g, c, sigma_b, sigma_e):
        return _upper_first_branch(g, c, sigma_b, sigma_e)
    return _upper_second_branch(g, sigma_b, sigma_e)


def asymptote_avg(g: LinkGains, sigma_b: float, sigma_e: float) -> tuple[float, float]:
    """High-SNR limits ``(lower, upper)``; they differ by ``ln(2 sqrt(e)/pi)``."""
    if not g.h_e > 0.0:
        raise ValueError("asymptote is undefined for H_E = 0 (the bounds grow without limit)")
    if not g.h_b > 0.0:
        raise ValueError("asymptote requires H_B > 0")
    lower = math.log(g.h_b * sigma_e / (g.h_e * sigma_b))
    return lower, lower + ASYMPTOTIC_GAP


def shannon_limit(g: LinkGains, c: AvgConstraints, sigma_b: float) -> float:
    """Reference curve ``0.5 ln(1 + (H_B xi P / sigma_B)^2)``.

    A labelling convention for plots, not a bound derived for this channel.
    """
    return 0.5 * math.log1p((g.h_b * c.mean / sigma_b) ** 2)


def avg_report(g: LinkGains, c: AvgConstraints, sigma_b: float, sigma_e: float) -> BoundReport:
    if g.h_b <= 0.0 or not is_degraded_secure(g, sigma_b, sigma_e):
        return BoundReport.zero()
    beta, delta = default_beta_delta(g, c, sigma_e)
    asym = asymptote_avg(g, sigma_b, sigma_e) if g.h_e > 0.0 else (None, None)
    return BoundReport(
        lower_1=lower_bound_avg_1(g, c, sigma_b, sigma_e, (beta, delta)),
        lower_2=lower_bound_avg_2(g, c, sigma_b, sigma_e),
        upper=upper_bound_avg(g, c, sigma_b, sigma_e),
        degraded=False,
        params_used={
            "beta": beta,
            "delta": delta,
            "upper_branch": 1 if upper_bound_switch_holds(g, c, sigma_b, sigma_e) else 2,
        },
        asymptote_lower=asym[0],
        asymptote_upper=asym[1],
    )
