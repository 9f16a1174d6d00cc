"""Cone antenna, free-space received power, and SIR arithmetic.

Powers are linear watts throughout; decibels appear only in :func:`sir` and
:func:`to_db` for output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DomainError

# Angular slack used for every "strictly inside the cone" test. Geometric
# ties (an interferer exactly on the cone edge) are common on evenly spaced
# orbits; without slack they would be decided by rounding noise.
BOUNDARY_TOL_RAD = 1e-9


@dataclass(frozen=True)
class RadioParams:
    tx_power_w: float = 1.0
    wavelength_m: float = 1e-3
    beamwidth: float = math.pi / 6

    def __post_init__(self):
        if not self.tx_power_w > 0:
            raise DomainError(f"transmit power must be positive, got {self.tx_power_w}")
        if not self.wavelength_m > 0:
            raise DomainError(f"wavelength must be positive, got {self.wavelength_m}")
        if not 0 < self.beamwidth <= 2 * math.pi:
            raise DomainError(f"beamwidth must lie in (0, 2*pi], got {self.beamwidth}")

    @property
    def gain(self) -> float:
        return cone_gain(self.beamwidth)


@dataclass(frozen=True)
class LinkBudget:
    signal_w: float
    interference_w: float

    @property
    def sir_linear(self) -> float:
        return self.signal_w / self.interference_w if self.interference_w > 0 else math.inf

    @property
    def sir_db(self) -> float:
        return to_db(self.sir_linear)


def cone_gain(alpha: float) -> float:
    """Main-lobe gain of an ideal cone pattern of full angle ``alpha``."""
    if not 0 < alpha <= 2 * math.pi:
        raise DomainError(f"beamwidth must lie in (0, 2*pi], got {alpha}")
    return 2.0 / (1.0 - math.cos(alpha / 2.0))


def cone_solid_angle(alpha: float) -> float:
    return 2.0 * math.pi * (1.0 - math.cos(alpha / 2.0))


def in_cone(angle, alpha: float):
    """Whether an off-axis angle falls strictly inside a cone of full angle ``alpha``."""
    return np.asarray(angle) < alpha / 2.0 - BOUNDARY_TOL_RAD


def friis_rx_power(p: RadioParams, g_tx: float, g_rx: float, d_m):
    """Received power in watts at distance ``d_m`` meters."""
    d_m = np.asarray(d_m, dtype=float)
    if np.any(~(d_m > 0)):
        raise DomainError("distance must be positive")
    out = p.tx_power_w * g_tx * g_rx * (p.wavelength_m / (4.0 * math.pi * d_m)) ** 2
    return float(out) if out.ndim == 0 else out


def to_db(x):
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(np.asarray(x, dtype=float))
    return float(out) if out.ndim == 0 else out


def sir(signal_w: float, interference_w: float) -> tuple[float, float]:
    """Return ``(linear, dB)``; zero interference gives ``inf``."""
    if not signal_w > 0:
        raise DomainError(f"signal power must be positive, got {signal_w}")
    if interference_w < 0:
        raise DomainError(f"interference power must be non-negative, got {interference_w}")
    ratio = signal_w / interference_w if interference_w > 0 else math.inf
    return ratio, to_db(ratio)
