"""Interference from an orbit with the receiver's altitude and inclination but a shifted RAAN.

Orbit 0 carries the receiver (satellite 0) and its serving transmitter
(satellite 1). Orbit 1 is rotated by ``delta_omega`` about the polar axis and
its satellites are phased by ``delta_beta``. Both orbits share one period, so
the relative geometry repeats every orbital period.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    COINCIDENT_KM,
    EARTH,
    TWO_PI,
    DomainError,
    EarthModel,
    SatelliteState,
    dot,
    in_plane_position,
    mean_motion,
    norm,
    orbital_period,
    plane_to_gec_matrix,
    rise_set_metric,
)
from .link import RadioParams, in_cone
from .single import interferer_distance


def wrap_pm_pi(x: float) -> float:
    """Wrap into (-pi, pi]."""
    y = math.fmod(x + math.pi, TWO_PI)
    if y <= 0:
        y += TWO_PI
    return y - math.pi


@dataclass(frozen=True)
class ShiftedGeometry:
    h: float
    gamma: float
    delta_omega: float
    n: int
    n_s: int
    delta_beta: float = 0.0
    raan0: float = 0.0

    def __post_init__(self):
        if not self.h > 0:
            raise DomainError(f"altitude must be positive, got {self.h}")
        if self.n < 3 or self.n_s < 3:
            raise DomainError("each orbit needs at least 3 satellites")
        object.__setattr__(self, "delta_omega", wrap_pm_pi(float(self.delta_omega)))


@dataclass(frozen=True)
class ShiftedResult:
    interferer_set: frozenset
    mean_interference_w: float
    sir_linear: float


def _positions(geom: ShiftedGeometry, times, earth: EarthModel):
    """GEC positions of orbit 0 (``(T, n, 3)``) and orbit 1 (``(T, n_s, 3)``)."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    a = earth.radius_km + geom.h
    wt = mean_motion(geom.h, earth) * t[:, None]
    phi0 = TWO_PI * np.arange(geom.n) / geom.n + wt
    phi1 = geom.delta_beta + TWO_PI * np.arange(geom.n_s) / geom.n_s + wt
    m0 = plane_to_gec_matrix(geom.raan0, geom.gamma)
    m1 = plane_to_gec_matrix(geom.raan0 + geom.delta_omega, geom.gamma)
    r0 = in_plane_position(phi0, a, earth) @ m0.T
    r1 = in_plane_position(phi1, a, earth) @ m1.T
    return r0, r1


def shifted_states(geom: ShiftedGeometry, t: float = 0.0, earth: EarthModel = EARTH) -> list[SatelliteState]:
    """Every satellite of both orbits, each pointing at its own in-orbit neighbor ``j - 1``."""
    r0, r1 = _positions(geom, t, earth)
    states = []
    for k, r in enumerate((r0[0], r1[0])):
        to_prev = np.roll(r, 1, axis=0) - r
        to_prev /= norm(to_prev)[..., None]
        states.extend(SatelliteState(r[j], to_prev[j], k, j) for j in range(len(r)))
    return states


def _angle(u, v):
    nu = norm(u)
    nv = norm(v)
    with np.errstate(invalid="ignore", divide="ignore"):
        c = dot(u, v) / (nu * nv)
    return np.arccos(np.clip(c, -1.0, 1.0))


def _evaluate(geom: ShiftedGeometry, alpha: float, times, earth: EarthModel):
    """Interferer mask ``(T, n_s)`` and squared Rx distances in km^2."""
    r0, r1 = _positions(geom, times, earth)
    r_rx = r0[:, 0:1, :]
    r_tx = r0[:, 1:2, :]
    rx_to_j = r1 - r_rx
    rx_to_tx = r_tx - r_rx
    j_to_prev = np.roll(r1, 1, axis=1) - r1
    dist = norm(rx_to_j)
    # a satellite sitting on the Rx or on the serving Tx has no separate path
    distinct = (dist > COINCIDENT_KM) & (norm(r1 - r_tx) > COINCIDENT_KM)

    c1 = rise_set_metric(r1, np.broadcast_to(r_rx, r1.shape), earth) <= 0
    psi = _angle(rx_to_j, np.broadcast_to(rx_to_tx, rx_to_j.shape))
    psi_p = _angle(j_to_prev, -rx_to_j)
    mask = distinct & c1 & in_cone(psi, alpha) & in_cone(psi_p, alpha)
    return mask, dist * dist


def _term_scale(radio: RadioParams) -> float:
    c = 1.0 - math.cos(radio.beamwidth / 2.0)
    return radio.wavelength_m**2 * radio.tx_power_w / (4.0 * math.pi**2 * c * c)


def serving_signal_w(geom: ShiftedGeometry, radio: RadioParams, earth: EarthModel = EARTH) -> float:
    d1_m = interferer_distance(1, geom.n, geom.h, earth) * 1000.0
    return _term_scale(radio) / (d1_m * d1_m)


def shifted_trace(geom: ShiftedGeometry, radio: RadioParams, times, earth: EarthModel = EARTH):
    """Interference (W), SIR (linear) and interferer count at each time."""
    mask, d2 = _evaluate(geom, radio.beamwidth, times, earth)
    inv = np.where(mask, 1.0 / np.where(mask, d2 * 1e6, 1.0), 0.0).sum(axis=-1)
    ei = _term_scale(radio) * inv
    sig = serving_signal_w(geom, radio, earth)
    with np.errstate(divide="ignore"):
        s = np.where(ei > 0, sig / np.where(ei > 0, ei, 1.0), np.inf)
    return ei, s, mask.sum(axis=-1)


def shifted_interferer_set(geom: ShiftedGeometry, alpha: float, t: float = 0.0, earth: EarthModel = EARTH) -> frozenset:
    mask, _ = _evaluate(geom, alpha, t, earth)
    return frozenset(int(j) for j in np.nonzero(mask[0])[0])


def mean_interference_shifted(geom: ShiftedGeometry, radio: RadioParams, t: float = 0.0, earth: EarthModel = EARTH) -> float:
    ei, _, _ = shifted_trace(geom, radio, t, earth)
    return float(ei[0])


def sir_shifted(geom: ShiftedGeometry, radio: RadioParams, t: float = 0.0, earth: EarthModel = EARTH) -> float:
    _, s, _ = shifted_trace(geom, radio, t, earth)
    return float(s[0])


def shifted(geom: ShiftedGeometry, radio: RadioParams, t: float = 0.0, earth: EarthModel = EARTH) -> ShiftedResult:
    return ShiftedResult(
        interferer_set=shifted_interferer_set(geom, radio.beamwidth, t, earth),
        mean_interference_w=mean_interference_shifted(geom, radio, t, earth),
        sir_linear=sir_shifted(geom, radio, t, earth),
    )


def time_grid(h: float, periods: float = 1.0, samples_per_period: int = 2000, earth: EarthModel = EARTH):
    """Uniform sample times covering ``periods`` orbital periods, end point excluded."""
    total = int(round(periods * samples_per_period))
    return np.arange(total) * (orbital_period(h, earth) / samples_per_period)


def time_averaged_shifted(
    geom: ShiftedGeometry, radio: RadioParams, samples_per_period: int = 2000, earth: EarthModel = EARTH
) -> tuple[float, float]:
    """Mean interference and ratio-of-means SIR over one orbital period."""
    ei, _, _ = shifted_trace(geom, radio, time_grid(geom.h, 1, samples_per_period, earth), earth)
    mean_i = float(ei.mean())
    sig = serving_signal_w(geom, radio, earth)
    return mean_i, (sig / mean_i if mean_i > 0 else math.inf)
