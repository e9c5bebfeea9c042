"""Secrecy-capacity bounds under joint average- and peak-intensity constraints.

The average-to-peak ratio ``alpha = xi P / A`` selects which input law the
lower bounds are built on.  When Eve's gain is exactly zero she learns
nothing, so her capacity term is dropped rather than evaluated at the 0/0
limit of the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import erf

from .avg_bounds import BoundReport
from .numerics import (
    SQRT2,
    SQRT2PI,
    log_expm1_ratio,
    q_function,
    solve_c,
    solve_mu_tilde,
    variance_ratio,
)
from .scenario import LinkGains, is_degraded_secure

# |alpha - 0.5| below this uses the uniform-input branch
UNIFORM_TIE_TOL = 1e-6
_TWO_PI_E = 2.0 * math.pi * math.e


@dataclass(frozen=True)
class PeakConstraints:
    xi: float
    P: float
    A: float

    def __post_init__(self) -> None:
        if not 0.0 < self.xi <= 1.0:
            raise ValueError(f"dimming target must lie in (0, 1], got {self.xi!r}")
        if not (self.A > 0.0 and math.isfinite(self.A)):
            raise ValueError(f"peak intensity must be positive and finite, got {self.A!r}")
        if not 0.0 < self.P <= self.A:
            raise ValueError(f"nominal intensity must lie in (0, A], got P={self.P!r}, A={self.A!r}")

    @property
    def mean(self) -> float:
        return self.xi * self.P

    @property
    def alpha(self) -> float:
        return min(1.0, self.mean / self.A)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"average-to-peak ratio must lie in (0, 1], got {alpha!r}")


def _delta(g: LinkGains, pc: PeakConstraints, sigma_e: float) -> float:
    return sigma_e * math.log1p(g.h_e * pc.A / sigma_e)


def default_mu_delta(g: LinkGains, pc: PeakConstraints, sigma_e: float) -> tuple[float, float, float]:
    """Returns ``(mu, delta, mu_tilde)`` for the ``alpha < 0.5`` lower bound."""
    alpha = pc.alpha
    mu_tilde = solve_mu_tilde(alpha)
    delta = _delta(g, pc, sigma_e)
    mu = mu_tilde * -math.expm1(-alpha * delta**2 / (2.0 * sigma_e**2))
    return mu, delta, mu_tilde


def _bob_term_small_alpha(g: LinkGains, pc: PeakConstraints, sigma_b: float, mu_tilde: float) -> float:
    # e^{2 alpha mu~} (1 - e^{-mu~})^2 / mu~^2, in logs
    log_factor = 2.0 * pc.alpha * mu_tilde + 2.0 * math.log(-math.expm1(-mu_tilde) / mu_tilde)
    log_snr = 2.0 * math.log(g.h_b * pc.A / sigma_b) - math.log(_TWO_PI_E)
    return 0.5 * _log1p_exp(log_snr + log_factor)


def _log1p_exp(x: float) -> float:
    """``ln(1 + e^x)`` without overflow."""
    if x > 30.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def _eve_term_small_alpha(
    g: LinkGains, pc: PeakConstraints, sigma_e: float, mu: float, delta: float
) -> float:
    """Upper bound on Eve's capacity for ``alpha < 0.5`` (truncated-exponential family)."""
    alpha, a = pc.alpha, pc.A
    s = sigma_e
    h = g.h_e * a
    t = delta / s
    gauss = math.exp(-0.5 * t * t)
    q_t = q_function(t)
    q_weight = q_function(-(delta + alpha * h) / s) - q_function((delta + (1.0 - alpha) * h) / s)
    # ln[h/(sqrt(2pi) s mu) * (e^{mu d/h} - e^{-mu(1 + d/h)}) / (1 - 2Q(d/s))]
    log_arg = (
        math.log(h / (SQRT2PI * s * mu))
        + mu * delta / h
        + math.log(-math.expm1(-mu * (1.0 + 2.0 * delta / h)))
        - math.log(float(erf(t / SQRT2)))
    )
    return (
        q_t
        + t / SQRT2PI * gauss
        - 0.5
        + mu * s / (h * SQRT2PI) * (gauss - math.exp(-0.5 * ((h + delta) / s) ** 2))
        + q_weight * log_arg
        + mu * alpha * (1.0 - 2.0 * q_function((delta + 0.5 * h) / s))
    )


def _eve_term_large_alpha(g: LinkGains, pc: PeakConstraints, sigma_e: float, delta: float) -> float:
    """Upper bound on Eve's capacity for ``alpha >= 0.5``."""
    s = sigma_e
    h = g.h_e * pc.A
    t = delta / s
    log_arg = math.log(h + 2.0 * delta) - math.log(SQRT2PI * s) - math.log(float(erf(t / SQRT2)))
    return (
        (1.0 - 2.0 * q_function((delta + 0.5 * h) / s)) * log_arg
        + q_function(t)
        + t / SQRT2PI * math.exp(-0.5 * t * t)
        - 0.5
    )


def lower_bound_peak_1(g: LinkGains, pc: PeakConstraints, sigma_b: float, sigma_e: float) -> float:
    """Difference of Bob's capacity lower bound and Eve's capacity upper bound.

    Uses the ``alpha < 0.5`` expression below one half and the uniform-like
    expression from 0.5 on.
    """
    alpha = pc.alpha
    _check_alpha(alpha)
    if alpha < 0.5:
        mu_tilde = solve_mu_tilde(alpha)
        bob = _bob_term_small_alpha(g, pc, sigma_b, mu_tilde)
        if g.h_e == 0.0:
            return bob
        mu, delta, _ = default_mu_delta(g, pc, sigma_e)
        return bob - _eve_term_small_alpha(g, pc, sigma_e, mu, delta)
    bob = 0.5 * math.log1p((g.h_b * pc.A / sigma_b) ** 2 / _TWO_PI_E)
    if g.h_e == 0.0:
        return bob
    return bob - _eve_term_large_alpha(g, pc, sigma_e, _delta(g, pc, sigma_e))


def lower_bound_peak_2(g: LinkGains, pc: PeakConstraints, sigma_b: float, sigma_e: float) -> float:
    """Entropy-power-inequality bound with the max-entropy input on ``[0, A]``.

    Uniform input at ``alpha = 0.5``, truncated exponential otherwise.  At
    ``alpha = 1`` the input is the point mass at ``A`` and the bound is 0.
    """
    alpha = pc.alpha
    _check_alpha(alpha)
    a = pc.A
    if abs(alpha - 0.5) < UNIFORM_TIE_TOL:
        log_ent2 = 2.0 * math.log(a)
        var_x = pc.mean**2 / 3.0
    elif alpha == 1.0:
        return 0.0
    else:
        u = solve_c(alpha, a) * a
        # e^{2 H(X)} = (e^{-c xi P} (e^{cA} - 1)/c)^2
        log_ent2 = 2.0 * (log_expm1_ratio(u) + math.log(a) - u * alpha)
        var_x = a * a * variance_ratio(u)
    return 0.5 * (
        2.0 * math.log(sigma_e)
        + _log_sum_exp(2.0 * math.log(g.h_b) + log_ent2 if g.h_b > 0.0 else -math.inf,
                       math.log(_TWO_PI_E * sigma_b**2))
        - math.log(_TWO_PI_E * sigma_b**2)
        - math.log(g.h_e**2 * var_x + sigma_e**2)
    )


def _log_sum_exp(x: float, y: float) -> float:
    hi, lo = max(x, y), min(x, y)
    if lo == -math.inf:
        return hi
    return hi + math.log1p(math.exp(lo - hi))


def upper_bound_peak(g: LinkGains, pc: PeakConstraints, sigma_b: float, sigma_e: float) -> float:
    """Dual-expression upper bound under both intensity constraints."""
    if g.h_b <= 0.0:
        raise ValueError("upper bound requires H_B > 0")
    r2 = (g.h_e / g.h_b) ** 2
    k2 = r2 * sigma_b**2 / sigma_e**2
    apx = pc.A * pc.mean
    num = (r2 * sigma_b**2 + sigma_e**2) * (g.h_b**2 * apx + sigma_b**2)
    den = sigma_b**2 * (g.h_e**2 * apx + 2.0 * r2 * sigma_b**2 + sigma_e**2) * (1.0 + k2)
    return 0.5 * math.log(num / den)


def asymptote_peak(g: LinkGains, sigma_b: float, sigma_e: float) -> float:
    """High-SNR limit; upper and lower asymptotes coincide here."""
    if not g.h_e > 0.0:
        raise ValueError("asymptote is undefined for H_E = 0 (the bounds grow without limit)")
    if not g.h_b > 0.0:
        raise ValueError("asymptote requires H_B > 0")
    return math.log(g.h_b * sigma_e / (g.h_e * sigma_b))


def shannon_limit_peak(g: LinkGains, pc: PeakConstraints, sigma_b: float) -> float:
    """Plot reference ``0.5 ln(1 + (H_B xi P / sigma_B)^2)``; a convention only."""
    return 0.5 * math.log1p((g.h_b * pc.mean / sigma_b) ** 2)


def peak_report(g: LinkGains, pc: PeakConstraints, sigma_b: float, sigma_e: float) -> BoundReport:
    if g.h_b <= 0.0 or not is_degraded_secure(g, sigma_b, sigma_e):
        return BoundReport.zero()
    alpha = pc.alpha
    params: dict = {"alpha": alpha}
    if alpha < 0.5:
        mu, delta, mu_tilde = default_mu_delta(g, pc, sigma_e)
        params.update(mu=mu, delta=delta, mu_tilde=mu_tilde, lower_1_branch="truncated-exponential")
    else:
        params.update(delta=_delta(g, pc, sigma_e), lower_1_branch="uniform")
    if abs(alpha - 0.5) < UNIFORM_TIE_TOL:
        params["lower_2_branch"] = "uniform"
    elif alpha == 1.0:
        params["lower_2_branch"] = "point-mass"
    else:
        params["lower_2_branch"] = "truncated-exponential"
        params["c"] = solve_c(alpha, pc.A)
    asym = asymptote_peak(g, sigma_b, sigma_e) if g.h_e > 0.0 else None
    return BoundReport(
        lower_1=lower_bound_peak_1(g, pc, sigma_b, sigma_e),
        lower_2=lower_bound_peak_2(g, pc, sigma_b, sigma_e),
        upper=upper_bound_peak(g, pc, sigma_b, sigma_e),
        degraded=False,
        params_used=params,
        asymptote_lower=asym,
        asymptote_upper=asym,
    )
