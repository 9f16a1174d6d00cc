"""Closed-form interference and SIR for satellites sharing one circular orbit.

Satellite 0 is the receiver, satellite 1 its serving transmitter, and every
satellite points its beam at its lower-index neighbor. Interferers are indices
2..N_i+1, all on the serving side of the receiver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import EARTH, DomainError, EarthModel
from .link import BOUNDARY_TOL_RAD, RadioParams


@dataclass(frozen=True)
class SingleOrbitResult:
    n_interferers: int
    mean_interference_w: float
    sir_linear: float
    interferer_distances: list[float] = field(default_factory=list)


def _check(n: int, h: float, alpha: float | None = None):
    if n < 3:
        raise DomainError(f"need at least 3 satellites, got {n}")
    if not h > 0:
        raise DomainError(f"altitude must be positive, got {h}")
    if alpha is not None and not 0 < alpha <= 2 * math.pi:
        raise DomainError(f"beamwidth must lie in (0, 2*pi], got {alpha}")


def theta_i(i: int, n: int) -> float:
    if not 1 <= i <= n:
        raise IndexError(f"index {i} outside [1, {n}]")
    return math.pi / 2 - i * math.pi / n


def blockage_bound(n: int, h: float, earth: EarthModel = EARTH) -> float:
    """Indices strictly below this value have an unobstructed path to the receiver."""
    return n / math.pi * math.acos(earth.radius_km / (earth.radius_km + h))


def beam_bound(n: int, alpha: float) -> float:
    """Indices strictly below this value are inside both beams."""
    return 1.0 + n * (alpha / 2.0 - BOUNDARY_TOL_RAD) / math.pi


def beam_bound_active(n: int, h: float, alpha: float, earth: EarthModel = EARTH) -> bool:
    return beam_bound(n, alpha) < blockage_bound(n, h, earth)


def num_interferers(n: int, h: float, alpha: float, earth: EarthModel = EARTH) -> int:
    _check(n, h, alpha)
    m = min(blockage_bound(n, h, earth), beam_bound(n, alpha))
    # count integers i >= 2 with i < m; an exact-integer bound is excluded
    return min(max(math.ceil(m) - 2, 0), n - 2)


def interferer_distance(i: int, n: int, h: float, earth: EarthModel = EARTH) -> float:
    """Chord length in km between the receiver and satellite ``i``."""
    if not 1 <= i <= n - 1:
        raise IndexError(f"index {i} outside [1, {n - 1}]")
    a = earth.radius_km + h
    return math.sqrt(2.0 * a * a * (1.0 - math.cos(2.0 * math.pi * i / n)))


def mean_interference_single(n: int, h: float, radio: RadioParams, earth: EarthModel = EARTH) -> float:
    n_i = num_interferers(n, h, radio.beamwidth, earth)
    a_m = (earth.radius_km + h) * 1000.0
    c = 1.0 - math.cos(radio.beamwidth / 2.0)
    k = radio.wavelength_m**2 * radio.tx_power_w / (8.0 * math.pi**2 * c * c * a_m * a_m)
    return sum(k / (1.0 - math.cos(2.0 * math.pi * i / n)) for i in range(2, n_i + 2))


def sir_single(n: int, h: float, alpha: float, earth: EarthModel = EARTH) -> float:
    n_i = num_interferers(n, h, alpha, earth)
    if n_i == 0:
        return math.inf
    denom = sum(1.0 / (1.0 - math.cos(2.0 * math.pi * i / n)) for i in range(2, n_i + 2))
    return (1.0 / (1.0 - math.cos(2.0 * math.pi / n))) / denom


def single_orbit(n: int, h: float, radio: RadioParams, earth: EarthModel = EARTH) -> SingleOrbitResult:
    n_i = num_interferers(n, h, radio.beamwidth, earth)
    return SingleOrbitResult(
        n_interferers=n_i,
        mean_interference_w=mean_interference_single(n, h, radio, earth),
        sir_linear=sir_single(n, h, radio.beamwidth, earth),
        interferer_distances=[interferer_distance(i, n, h, earth) for i in range(2, n_i + 2)],
    )
