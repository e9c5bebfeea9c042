"""Room geometry, Lambertian line-of-sight gains and the degradedness test.

The LED on the ceiling points straight down and every photodiode points
straight up, so the irradiance and incidence angles of a link coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PdParams:
    """Photodiode / LED parameters of the Lambertian link.

    Attributes
    ----------
    m : float
        Lambertian emission order of the LED.
    area : float
        Detector area in m^2.
    filter_gain, concentrator_gain : float
        Optical filter and concentrator gains.
    fov : float
        Field of view in radians.
    """

    m: float = 6.0
    area: float = 1e-4
    filter_gain: float = 1.0
    concentrator_gain: float = 3.0
    fov: float = math.radians(75.0)

    def __post_init__(self) -> None:
        if not self.m >= 1.0:
            raise ValueError(f"Lambertian order must be >= 1, got {self.m!r}")
        for name in ("area", "filter_gain", "concentrator_gain"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if not 0.0 < self.fov <= math.pi / 2:
            raise ValueError(f"field of view must be in (0, pi/2], got {self.fov!r}")

    @property
    def scale(self) -> float:
        """Distance- and angle-free prefactor ``(m+1) A_r T_s g / (2 pi)``."""
        return (
            (self.m + 1.0)
            * self.area
            * self.filter_gain
            * self.concentrator_gain
            / (2.0 * math.pi)
        )


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite coordinate in {self!r}")


@dataclass(frozen=True)
class LinkGains:
    h_b: float
    h_e: float

    def __post_init__(self) -> None:
        if not (self.h_b >= 0.0 and self.h_e >= 0.0):
            raise ValueError(f"channel gains must be non-negative, got {self!r}")


@dataclass(frozen=True)
class Scenario:
    """Transmitter, legitimate receiver, eavesdropper and noise levels."""

    alice: Position
    bob: Position
    eve: Position
    pd: PdParams = PdParams()
    sigma_b: float = 1.0
    sigma_e: float = 1.0

    def __post_init__(self) -> None:
        if not (self.sigma_b > 0.0 and self.sigma_e > 0.0):
            raise ValueError("noise standard deviations must be positive")
        for who in ("bob", "eve"):
            if not self.alice.z > getattr(self, who).z:
                raise ValueError(f"transmitter must be above {who}")


def channel_gain(tx: Position, rx: Position, pd: PdParams) -> float:
    """Line-of-sight DC gain of a downward LED to an upward photodiode.

    Zero when the incidence angle exceeds the field of view; an angle
    exactly on the FOV edge still collects light.
    """
    for p in (tx, rx):
        if not all(math.isfinite(v) for v in (p.x, p.y, p.z)):
            raise ValueError(f"non-finite coordinate in {p!r}")
    h = tx.z - rx.z
    if not h > 0.0:
        raise ValueError(f"transmitter must be above receiver (tx.z={tx.z}, rx.z={rx.z})")
    r2 = (tx.x - rx.x) ** 2 + (tx.y - rx.y) ** 2
    d2 = r2 + h * h
    cos_psi = h / math.sqrt(d2)
    if math.atan2(math.sqrt(r2), h) > pd.fov:
        return 0.0
    return pd.scale * cos_psi ** (pd.m + 1.0) / d2


def channel_gain_grid(
    tx: Position, xs: np.ndarray, ys: np.ndarray, z: float, pd: PdParams
) -> np.ndarray:
    """Vectorized :func:`channel_gain` over the receiver plane ``z``.

    Returns an array of shape ``(len(xs), len(ys))`` indexed ``[i, j]`` for
    ``(xs[i], ys[j])``.
    """
    h = tx.z - z
    if not h > 0.0:
        raise ValueError(f"transmitter must be above the receiver plane (z={z})")
    dx = np.asarray(xs, dtype=float)[:, None] - tx.x
    dy = np.asarray(ys, dtype=float)[None, :] - tx.y
    r = np.hypot(dx, dy)
    d2 = r * r + h * h
    cos_psi = h / np.sqrt(d2)
    gain = pd.scale * cos_psi ** (pd.m + 1.0) / d2
    return np.where(np.arctan2(r, h) > pd.fov, 0.0, gain)


def link_gains(s: Scenario) -> LinkGains:
    return LinkGains(
        h_b=channel_gain(s.alice, s.bob, s.pd),
        h_e=channel_gain(s.alice, s.eve, s.pd),
    )


def is_degraded_secure(g: LinkGains, sigma_b: float, sigma_e: float) -> bool:
    """True when Eve's channel is degraded w.r.t. Bob's (``H_B/σ_B ≥ H_E/σ_E``).

    Only then can the secrecy capacity be positive; otherwise it is zero.
    Compared in cross-multiplied form so that joint scaling of the gains
    cannot flip the verdict through rounding.
    """
    if not (sigma_b > 0.0 and sigma_e > 0.0):
        raise ValueError("noise standard deviations must be positive")
    return g.h_b * sigma_e >= g.h_e * sigma_b
