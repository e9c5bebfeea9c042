"""Special functions and scalar root solvers shared by the bound formulas.

The Q-function family is routed through ``scipy.special`` (``erfc``,
``erfcx``); the two transcendental solvers bracket their root and refine it
with Brent's method, which mixes bisection with secant/inverse-quadratic
steps and never leaves the bracket.
"""

from __future__ import annotations

import math

from scipy.optimize import brentq
from scipy.special import erfc, erfcx

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)

# below these |u| the closed forms lose digits to cancellation; use series
_SERIES_CUTOFF = 1e-3
_VAR_SERIES_CUTOFF = 0.1
_RESIDUAL_TOL = 1e-12


def q_function(x: float) -> float:
    """Gaussian tail probability ``Q(x) = P(N(0, 1) > x)``."""
    return 0.5 * float(erfc(x / SQRT2))


def scaled_q(x: float) -> float:
    """``exp(x**2 / 2) * Q(x)`` without overflow (Mills-ratio scaling).

    Tends to ``1 / (x * sqrt(2*pi))`` for large ``x``.
    """
    return 0.5 * float(erfcx(x / SQRT2))


def mean_ratio(u: float) -> float:
    """Normalized mean ``E[X]/A`` of the law ``f(x) ∝ exp(u x / A)`` on ``[0, A]``.

    Equals ``1/(1 - exp(-u)) - 1/u``; strictly increasing from 0 (``u → -∞``)
    through 1/2 (``u = 0``) to 1 (``u → +∞``).
    """
    if abs(u) < _SERIES_CUTOFF:
        return 0.5 + u / 12.0 - u**3 / 720.0 + u**5 / 30240.0
    if u < 0.0:
        return math.exp(u) / math.expm1(u) - 1.0 / u
    return -1.0 / math.expm1(-u) - 1.0 / u


def _solve_mean_ratio(alpha: float) -> float:
    """Root ``u`` of ``mean_ratio(u) = alpha`` for ``alpha`` in ``(0, 1)``."""
    if alpha == 0.5:
        return 0.0

    def resid(u: float) -> float:
        return mean_ratio(u) - alpha

    # mean_ratio(u) ~ 1 - 1/u for large u and ~ -1/u for very negative u,
    # which bounds the root by 1/min(alpha, 1 - alpha) in magnitude.
    if alpha > 0.5:
        lo, hi = 0.0, 2.0 / (1.0 - alpha) + 2.0
    else:
        lo, hi = -(2.0 / alpha + 2.0), 0.0
    root = brentq(resid, lo, hi, xtol=1e-300, rtol=4.0 * 2.0**-52, maxiter=500)
    # polish: brentq's stopping rule is on u, the contract is on alpha
    for _ in range(3):
        r = resid(root)
        if abs(r) <= _RESIDUAL_TOL:
            break
        h = max(abs(root) * 1e-7, 1e-9)
        slope = (resid(root + h) - resid(root - h)) / (2.0 * h)
        if slope <= 0.0:
            break
        root -= r / slope
    return root


def solve_mu_tilde(alpha: float) -> float:
    """Solve ``alpha = 1/mu - exp(-mu)/(1 - exp(-mu))`` for ``mu > 0``.

    The right-hand side falls strictly from 1/2 (``mu → 0+``) to 0, so a root
    exists exactly for ``0 < alpha < 1/2``.
    """
    if not 0.0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 0.5), got {alpha!r}")
    # the right-hand side is 1 - mean_ratio(mu) = mean_ratio(-mu)
    return -_solve_mean_ratio(alpha)


def solve_c(alpha: float, peak: float) -> float:
    """Exponent ``c`` of the max-entropy law on ``[0, peak]`` with mean ``alpha*peak``.

    Solves ``alpha = 1/(1 - exp(-c*peak)) - 1/(c*peak)``.  ``c < 0`` for
    ``alpha < 0.5`` and ``c > 0`` above.  At ``alpha == 1`` the law
    collapses onto the point ``peak`` and ``+inf`` is returned.

    Raises
    ------
    ValueError
        If ``alpha`` is outside ``(0, 1]``, equals 0.5 (the uniform law has
        ``c = 0`` and is handled by callers), or ``peak <= 0``.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    if alpha == 0.5:
        raise ValueError("alpha = 0.5 is the uniform law; c is degenerate there")
    if not peak > 0.0 or not math.isfinite(peak):
        raise ValueError(f"peak intensity must be positive and finite, got {peak!r}")
    if alpha == 1.0:
        return math.inf
    return _solve_mean_ratio(alpha) / peak


def log_expm1_ratio(u: float) -> float:
    """``ln(expm1(u) / u)``, i.e. ``ln((e^{cA} - 1)/c) - ln A`` with ``u = cA``.

    Stable for ``u`` up to ~1e300 in magnitude and exact-to-series near 0.
    """
    if abs(u) < _SERIES_CUTOFF:
        return u / 2.0 + u**2 / 24.0 - u**4 / 2880.0 + u**6 / 181440.0
    if u > 0.0:
        # expm1(u) = e^u (1 - e^-u)
        return u + math.log1p(-math.exp(-u)) - math.log(u)
    return math.log(-math.expm1(u)) - math.log(-u)


def variance_ratio(u: float) -> float:
    """Normalized variance ``var(X)/A**2`` of the law ``f(x) ∝ exp(u x / A)`` on ``[0, A]``.

    Equals ``1/u**2 - 1/(4 sinh(u/2)**2)``; 1/12 at ``u = 0``.
    """
    if abs(u) < _VAR_SERIES_CUTOFF:
        u2 = u * u
        return 1.0 / 12.0 - u2 / 240.0 + u2**2 / 6048.0 - u2**3 / 172800.0 + u2**4 / 5322240.0
    au = abs(u)
    if au > 1400.0:
        return 1.0 / u**2
    # 1/(4 sinh^2(u/2)) = e^{-|u|} / (1 - e^{-|u|})^2
    em = math.exp(-au)
    return 1.0 / u**2 - em / (-math.expm1(-au)) ** 2
