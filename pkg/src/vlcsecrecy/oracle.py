"""Numerical mutual information for the max-entropy intensity inputs.

Gives an achievable secrecy rate ``I(X; Y_B) - I(X; Y_E)`` for a fixed input
law, computed by adaptive quadrature of the output differential entropy.
It shares no code with the closed-form bounds, so it can be used to check
them from both sides.

Everything is evaluated for the noise-normalized output ``Y / sigma``, whose
density is the input law (scaled by ``H / sigma``) convolved with a standard
normal.  Each of the three input laws gives a closed-form log-density.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import log_ndtr

from .numerics import log_expm1_ratio, mean_ratio, solve_c
from .scenario import LinkGains, is_degraded_secure

_HALF_LOG_2PIE = 0.5 * math.log(2.0 * math.pi * math.e)


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration settings for the output entropy.

    ``tol`` is the absolute error budget for the whole entropy integral (nats),
    split evenly over the sub-intervals.
    """

    tol: float = 1e-8
    window_sigmas: float = 8.0
    tail_mass: float = 1e-16
    max_pieces: int = 64
    limit: int = 200


@dataclass(frozen=True)
class InputDistribution:
    """One of the max-entropy laws for a non-negative intensity.

    ``kind`` is ``"exponential"`` (mean only), ``"uniform"`` on ``[0, peak]``
    or ``"truncexp"`` with density ``c e^{cx} / (e^{c peak} - 1)`` on
    ``[0, peak]``.
    """

    kind: str
    mean: float
    peak: float = math.inf
    c: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("exponential", "uniform", "truncexp"):
            raise ValueError(f"unknown input law {self.kind!r}")
        if not self.mean > 0.0:
            raise ValueError("mean must be positive")
        if self.kind != "exponential" and not (0.0 < self.peak < math.inf):
            raise ValueError("bounded laws need a finite positive peak")

    @classmethod
    def exponential(cls, mean: float) -> "InputDistribution":
        return cls("exponential", mean)

    @classmethod
    def uniform(cls, peak: float) -> "InputDistribution":
        return cls("uniform", 0.5 * peak, peak)

    @classmethod
    def truncated_exponential(cls, c: float, peak: float) -> "InputDistribution":
        if c == 0.0:
            return cls.uniform(peak)
        return cls("truncexp", peak * mean_ratio(c * peak), peak, c)

    @classmethod
    def max_entropy(cls, mean: float, peak: float | None = None) -> "InputDistribution":
        """The entropy-maximizing law for the given mean (and optional peak)."""
        if peak is None or math.isinf(peak):
            return cls.exponential(mean)
        alpha = mean / peak
        if abs(alpha - 0.5) < 1e-6:
            return cls.uniform(peak)
        return cls.truncated_exponential(solve_c(alpha, peak), peak)


def input_entropy(d: InputDistribution) -> float:
    """Differential entropy of the input law in nats."""
    if d.kind == "exponential":
        return 1.0 + math.log(d.mean)
    if d.kind == "uniform":
        return math.log(d.peak)
    u = d.c * d.peak
    return log_expm1_ratio(u) + math.log(d.peak) - u * mean_ratio(u)


def _log_diff_ndtr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``ln(Phi(b) - Phi(a))`` for ``a < b`` elementwise, tail-aware."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    upper = a > 0.0
    # both arguments in the upper tail: Phi(b) - Phi(a) = Q(a) - Q(b)
    hi = np.where(upper, log_ndtr(-a), log_ndtr(b))
    lo = np.where(upper, log_ndtr(-b), log_ndtr(a))
    with np.errstate(divide="ignore"):
        return hi + np.log1p(-np.exp(lo - hi))


def output_log_density(d: InputDistribution, snr: float) -> Callable[[np.ndarray], np.ndarray]:
    """Log-density of ``snr * X / mean_scale + N(0, 1)``.

    ``snr`` is ``H / sigma``; the returned callable takes normalized outputs.
    """
    if d.kind == "exponential":
        m = snr * d.mean

        def logf(y):
            y = np.asarray(y, dtype=float)
            return -math.log(m) + 0.5 / (m * m) - y / m + log_ndtr(y - 1.0 / m)

        return logf

    width = snr * d.peak
    if d.kind == "uniform":

        def logf(y):
            y = np.asarray(y, dtype=float)
            return -math.log(width) + _log_diff_ndtr(y - width, y)

        return logf

    k = d.c / snr
    u = d.c * d.peak
    log_norm = -math.log(width) - log_expm1_ratio(u)

    def logf(y):
        y = np.asarray(y, dtype=float)
        return log_norm + k * y + 0.5 * k * k + _log_diff_ndtr(-y - k, width - y - k)

    return logf


def _support_end(d: InputDistribution, snr: float, tail_mass: float) -> float:
    if d.kind == "exponential":
        return snr * d.mean * -math.log(tail_mass)
    return snr * d.peak


def _breakpoints(lo: float, hi: float, end: float, max_pieces: int) -> np.ndarray:
    pts = {lo, hi}
    for p in (-4.0, 0.0, 4.0, end - 4.0, end, end + 4.0):
        if lo < p < hi:
            pts.add(p)
    pts = sorted(pts)
    # split long stretches so no sub-interval is much wider than the rest
    span = hi - lo
    target = max(span / max_pieces, 2.0)
    out = []
    for a, b in zip(pts[:-1], pts[1:]):
        n = max(1, min(max_pieces, int(math.ceil((b - a) / target))))
        out.extend(np.linspace(a, b, n + 1)[:-1])
    out.append(hi)
    return np.asarray(out)


def output_entropy(d: InputDistribution, snr: float, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """``h(snr X + N(0,1))`` in nats by piecewise adaptive quadrature."""
    logf = output_log_density(d, snr)
    end = _support_end(d, snr, quad.tail_mass)
    lo, hi = -quad.window_sigmas, end + quad.window_sigmas
    edges = _breakpoints(lo, hi, end, quad.max_pieces)
    per_piece = quad.tol / (len(edges) - 1)

    def integrand(y: float) -> float:
        lf = float(logf(y))
        if lf == -math.inf:
            return 0.0
        return -math.exp(lf) * lf

    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, err, info = integrate.quad(
                integrand, a, b, epsabs=per_piece, epsrel=1e-13, limit=quad.limit, full_output=1
            )[:3]
        if err > max(10.0 * per_piece, 1e-12 * abs(val)):
            raise QuadratureError(
                f"entropy integral on [{a:.6g}, {b:.6g}] did not converge "
                f"(estimate {val:.6g}, error {err:.3g})"
            )
        total += val
    return total


def mutual_information(
    d: InputDistribution, gain: float, sigma: float, quad: QuadratureSpec = QuadratureSpec()
) -> float:
    """``I(X; gain*X + N(0, sigma^2))`` in nats."""
    if not gain >= 0.0:
        raise ValueError(f"gain must be non-negative, got {gain!r}")
    if not sigma > 0.0:
        raise ValueError(f"noise std must be positive, got {sigma!r}")
    if gain == 0.0:
        return 0.0
    return output_entropy(d, gain / sigma, quad) - _HALF_LOG_2PIE


def oracle_secrecy_rate(
    d: InputDistribution,
    g: LinkGains,
    sigma_b: float,
    sigma_e: float,
    quad: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Achievable secrecy rate of the input ``d``; 0 when Eve is not degraded."""
    if not is_degraded_secure(g, sigma_b, sigma_e):
        return 0.0
    if g.h_b * sigma_e == g.h_e * sigma_b:
        return 0.0
    return mutual_information(d, g.h_b, sigma_b, quad) - mutual_information(d, g.h_e, sigma_e, quad)
