"""Interference from a second orbit sharing the receiver's plane at another altitude.

The scene is two concentric circles in one plane. The receiver A sits at the
top of the inner circle (altitude ``h``) and beams at its neighbor C. Satellite
``j`` of the outer orbit (altitude ``h_c``) sits at angle ``delta_beta +
2*pi*j/n_c`` from A's radius and beams at its own neighbor ``j - 1``. All
angles are taken from 2D vectors with a clamped arccos; nothing here assumes
``h_c > h``, so a receiver on the higher orbit is handled by the same code.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .geometry import EARTH, TWO_PI, DomainError, EarthModel, dot, mean_motion, norm, segment_blocked_oracle
from .link import RadioParams, in_cone
from .single import interferer_distance

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoplanarGeometry:
    h: float
    h_c: float
    n: int
    n_c: int
    delta_beta: float = 0.0

    def __post_init__(self):
        if self.h == self.h_c:
            raise DomainError("co-planar orbits need different altitudes")
        if not (self.h > 0 and self.h_c > 0):
            raise DomainError("altitudes must be positive")
        if self.n < 3 or self.n_c < 3:
            raise DomainError("each orbit needs at least 3 satellites")


@dataclass(frozen=True)
class CoplanarResult:
    interferer_set: frozenset
    mean_interference_w: float
    sir_linear: float


def _vectors(h, h_c, n, n_c, delta_beta, earth):
    """AB, AC (unit), BD, BA for every (delta_beta, j); leading axis follows ``delta_beta``."""
    a = earth.radius_km + h
    a_c = earth.radius_km + h_c
    db = np.asarray(delta_beta, dtype=float)[..., None]
    j = np.arange(n_c)
    o_hat = db + TWO_PI * j / n_c
    o_prime = db + TWO_PI * ((j - 1) % n_c) / n_c
    A = np.array([0.0, a])
    B = a_c * np.stack([np.sin(o_hat), np.cos(o_hat)], axis=-1)
    D = a_c * np.stack([np.sin(o_prime), np.cos(o_prime)], axis=-1)
    a_hat = math.pi / 2 - math.pi / n
    AC = np.array([math.sin(a_hat), -math.cos(a_hat)])
    return B - A, AC, D - B, A - B


def _angle2(u, v):
    nu = norm(u)
    nv = norm(v)
    if np.any(nu == 0) or np.any(nv == 0):
        raise DomainError("coincident points: angle undefined")
    c = dot(u, v) / (nu * nv)
    return np.arccos(np.clip(c, -1.0, 1.0))


def _angles(h, h_c, n, n_c, delta_beta, earth):
    AB, AC, BD, BA = _vectors(h, h_c, n, n_c, delta_beta, earth)
    psi = _angle2(AB, np.broadcast_to(AC, AB.shape))
    psi_p = _angle2(BD, BA)
    d2 = dot(AB, AB)
    return psi, psi_p, d2


def _mask(h, h_c, n, n_c, alpha, delta_beta, earth):
    psi, psi_p, d2 = _angles(h, h_c, n, n_c, delta_beta, earth)
    c1 = psi > math.pi / n - math.acos(earth.radius_km / (earth.radius_km + h))
    return c1 & in_cone(psi, alpha) & in_cone(psi_p, alpha), d2


def psi_j(j: int, geom: CoplanarGeometry, earth: EarthModel = EARTH) -> float:
    """Off-axis angle of interferer ``j`` as seen from the receiver beam."""
    if not 0 <= j < geom.n_c:
        raise IndexError(f"index {j} outside [0, {geom.n_c})")
    psi, _, _ = _angles(geom.h, geom.h_c, geom.n, geom.n_c, geom.delta_beta, earth)
    return float(psi[j])


def psi_j_prime(j: int, geom: CoplanarGeometry, earth: EarthModel = EARTH) -> float:
    """Off-axis angle of the receiver as seen from interferer ``j``'s beam."""
    if not 0 <= j < geom.n_c:
        raise IndexError(f"index {j} outside [0, {geom.n_c})")
    _, psi_p, _ = _angles(geom.h, geom.h_c, geom.n, geom.n_c, geom.delta_beta, earth)
    return float(psi_p[j])


def c1_disagreements(geom: CoplanarGeometry, earth: EarthModel = EARTH) -> list[int]:
    """Indices where the linearized blockage test disagrees with an exact segment test."""
    psi, _, _ = _angles(geom.h, geom.h_c, geom.n, geom.n_c, geom.delta_beta, earth)
    c1 = psi > math.pi / geom.n - math.acos(earth.radius_km / (earth.radius_km + geom.h))
    AB, _, _, _ = _vectors(geom.h, geom.h_c, geom.n, geom.n_c, geom.delta_beta, earth)
    A3 = np.array([0.0, earth.radius_km + geom.h, 0.0])
    B3 = np.concatenate([AB + A3[:2], np.zeros((geom.n_c, 1))], axis=-1)
    blocked = segment_blocked_oracle(np.broadcast_to(A3, B3.shape), B3, earth)
    return [int(j) for j in np.nonzero(c1 == blocked)[0]]


def interferer_set_coplanar(geom: CoplanarGeometry, alpha: float, earth: EarthModel = EARTH) -> frozenset:
    m, _ = _mask(geom.h, geom.h_c, geom.n, geom.n_c, alpha, geom.delta_beta, earth)
    members = frozenset(int(j) for j in np.nonzero(m)[0])
    bad = set(c1_disagreements(geom, earth)) & _beam_pairs(geom, alpha, earth)
    if bad:
        log.warning("linearized blockage test disagrees with segment test for %s", sorted(bad))
    return members


def _beam_pairs(geom, alpha, earth) -> set:
    psi, psi_p, _ = _angles(geom.h, geom.h_c, geom.n, geom.n_c, geom.delta_beta, earth)
    return {int(j) for j in np.nonzero(in_cone(psi, alpha) & in_cone(psi_p, alpha))[0]}


def _term_scale(radio: RadioParams) -> float:
    c = 1.0 - math.cos(radio.beamwidth / 2.0)
    return radio.wavelength_m**2 * radio.tx_power_w / (4.0 * math.pi**2 * c * c)


def serving_signal_w(n: int, h: float, radio: RadioParams, earth: EarthModel = EARTH) -> float:
    d1_m = interferer_distance(1, n, h, earth) * 1000.0
    return _term_scale(radio) / (d1_m * d1_m)


def coplanar_trace(
    h: float, h_c: float, n: int, n_c: int, radio: RadioParams, delta_betas, earth: EarthModel = EARTH
):
    """Interference (W), SIR (linear) and interferer count for each offset in ``delta_betas``."""
    m, d2 = _mask(h, h_c, n, n_c, radio.beamwidth, delta_betas, earth)
    inv = np.where(m, 1.0 / (d2 * 1e6), 0.0).sum(axis=-1)
    ei = _term_scale(radio) * inv
    sig = serving_signal_w(n, h, radio, earth)
    with np.errstate(divide="ignore"):
        s = np.where(ei > 0, sig / np.where(ei > 0, ei, 1.0), np.inf)
    return ei, s, m.sum(axis=-1)


def mean_interference_coplanar(geom: CoplanarGeometry, radio: RadioParams, earth: EarthModel = EARTH) -> float:
    ei, _, _ = coplanar_trace(geom.h, geom.h_c, geom.n, geom.n_c, radio, geom.delta_beta, earth)
    return float(ei)


def sir_coplanar(geom: CoplanarGeometry, radio: RadioParams, earth: EarthModel = EARTH) -> float:
    _, s, _ = coplanar_trace(geom.h, geom.h_c, geom.n, geom.n_c, radio, geom.delta_beta, earth)
    return float(s)


def coplanar(geom: CoplanarGeometry, radio: RadioParams, earth: EarthModel = EARTH) -> CoplanarResult:
    return CoplanarResult(
        interferer_set=interferer_set_coplanar(geom, radio.beamwidth, earth),
        mean_interference_w=mean_interference_coplanar(geom, radio, earth),
        sir_linear=sir_coplanar(geom, radio, earth),
    )


def offsets_at(times, h: float, h_c: float, delta_beta0: float = 0.0, earth: EarthModel = EARTH):
    """Relative offset of the interfering orbit at each time (not wrapped)."""
    drift = mean_motion(h_c, earth) - mean_motion(h, earth)
    return delta_beta0 + drift * np.asarray(times, dtype=float)


def time_averaged_coplanar(
    h: float,
    h_c: float,
    n: int,
    n_c: int,
    radio: RadioParams,
    samples: int = 10_000,
    delta_beta0: float = 0.0,
    earth: EarthModel = EARTH,
) -> tuple[float, float]:
    """Mean interference and ratio-of-means SIR over a uniform grid of one synodic period."""
    delta_betas = delta_beta0 + TWO_PI * np.arange(samples) / samples
    ei, _, _ = coplanar_trace(h, h_c, n, n_c, radio, delta_betas, earth)
    mean_i = float(ei.mean())
    sig = serving_signal_w(n, h, radio, earth)
    return mean_i, (sig / mean_i if mean_i > 0 else math.inf)
