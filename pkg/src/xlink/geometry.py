"""Circular-orbit mechanics and 3D geometry in the geocentric equatorial frame.

All positions are in kilometers, all angles in radians. Functions that take
vectors accept numpy arrays with a trailing axis of length 3 and broadcast
over leading axes where that is natural (blockage and angle tests are used on
whole constellations at once).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

Vec3 = np.ndarray

# Two satellites closer than this are treated as the same point in space.
COINCIDENT_KM = 1e-6


class DomainError(ValueError):
    """Raised when an input lies outside the domain of a geometric operation."""


@dataclass(frozen=True)
class EarthModel:
    """Spherical Earth: mean radius in km and gravitational parameter in m^3/s^2."""

    radius_km: float = 6371.0
    mu: float = 3.986004418e14

    def __post_init__(self):
        if not (self.radius_km > 0 and math.isfinite(self.radius_km)):
            raise DomainError(f"earth radius must be positive, got {self.radius_km}")
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise DomainError(f"gravitational parameter must be positive, got {self.mu}")


EARTH = EarthModel()


def normalize_angle(x: float) -> float:
    """Wrap an angle into [0, 2*pi)."""
    y = math.fmod(x, TWO_PI)
    if y < 0:
        y += TWO_PI
    # fmod of a value just below 0 can round up to exactly 2*pi
    return 0.0 if y >= TWO_PI else y


@dataclass(frozen=True)
class OrbitSpec:
    """One circular orbit populated by evenly spaced satellites.

    ``raan`` and ``phase_offset`` are normalized to [0, 2*pi) on construction.
    """

    altitude_km: float
    inclination: float = 0.0
    raan: float = 0.0
    num_satellites: int = 40
    phase_offset: float = 0.0

    def __post_init__(self):
        if not (self.altitude_km > 0 and math.isfinite(self.altitude_km)):
            raise DomainError(f"altitude must be positive, got {self.altitude_km}")
        if not 0.0 <= self.inclination <= math.pi:
            raise DomainError(f"inclination must lie in [0, pi], got {self.inclination}")
        if int(self.num_satellites) != self.num_satellites or self.num_satellites < 3:
            raise DomainError(f"need an integer of at least 3 satellites, got {self.num_satellites}")
        object.__setattr__(self, "num_satellites", int(self.num_satellites))
        object.__setattr__(self, "raan", normalize_angle(float(self.raan)))
        object.__setattr__(self, "phase_offset", normalize_angle(float(self.phase_offset)))

    def semi_major_axis(self, earth: EarthModel = EARTH) -> float:
        return earth.radius_km + self.altitude_km


@dataclass(frozen=True)
class SatelliteState:
    position: Vec3
    tx_pointing: Vec3
    orbit_index: int
    sat_index: int


def orbital_period(h: float, earth: EarthModel = EARTH) -> float:
    """Period in seconds of a circular orbit at altitude ``h`` km (Kepler's third law)."""
    if not h > 0:
        raise DomainError(f"altitude must be positive, got {h}")
    a_m = (earth.radius_km + h) * 1000.0
    return TWO_PI * math.sqrt(a_m**3 / earth.mu)


def mean_motion(h: float, earth: EarthModel = EARTH) -> float:
    """Angular rate in rad/s."""
    return TWO_PI / orbital_period(h, earth)


def true_anomaly(j: int, n_sats: int, delta_beta: float) -> float:
    if not 0 <= j < n_sats:
        raise IndexError(f"satellite index {j} outside [0, {n_sats})")
    return normalize_angle(delta_beta + TWO_PI * j / n_sats)


def in_plane_position(phi, a: float, earth: EarthModel = EARTH) -> Vec3:
    """Position inside the orbital plane, first axis toward the ascending node."""
    if not a > earth.radius_km:
        raise DomainError(f"semi-major axis {a} km is not above the Earth surface")
    phi = np.asarray(phi, dtype=float)
    return np.stack([a * np.cos(phi), a * np.sin(phi), np.zeros_like(phi)], axis=-1)


def plane_to_gec_matrix(raan: float, inclination: float) -> np.ndarray:
    cO, sO = math.cos(raan), math.sin(raan)
    cg, sg = math.cos(inclination), math.sin(inclination)
    return np.array(
        [
            [cO, -sO * cg, sO * sg],
            [sO, cO * cg, -cO * sg],
            [0.0, sg, cg],
        ]
    )


def orbit_normal(raan: float, inclination: float) -> Vec3:
    """Unit normal of the orbital plane (third column of the plane-to-GEC matrix)."""
    return plane_to_gec_matrix(raan, inclination)[:, 2]


def gec_position(orbit: OrbitSpec, j: int, t: float = 0.0, earth: EarthModel = EARTH) -> Vec3:
    """GEC position of satellite ``j`` of ``orbit`` at time ``t`` seconds."""
    phi = true_anomaly(j, orbit.num_satellites, orbit.phase_offset)
    phi += mean_motion(orbit.altitude_km, earth) * t
    r0 = in_plane_position(phi, orbit.semi_major_axis(earth), earth)
    return plane_to_gec_matrix(orbit.raan, orbit.inclination) @ r0


def orbit_positions(orbit: OrbitSpec, t=0.0, earth: EarthModel = EARTH) -> np.ndarray:
    """Positions of every satellite of ``orbit``.

    ``t`` may be a scalar or a 1-D array of times; the result has shape
    ``(N, 3)`` or ``(len(t), N, 3)``.
    """
    t = np.asarray(t, dtype=float)
    n = orbit.num_satellites
    base = orbit.phase_offset + TWO_PI * np.arange(n) / n
    phi = base + mean_motion(orbit.altitude_km, earth) * t[..., None]
    r0 = in_plane_position(phi, orbit.semi_major_axis(earth), earth)
    return r0 @ plane_to_gec_matrix(orbit.raan, orbit.inclination).T


def dot(u, v):
    """Row-wise dot product over the trailing axis."""
    return np.einsum("...i,...i->...", u, v)


def norm(u):
    return np.sqrt(dot(u, u))


def _outside_earth(r, earth: EarthModel, name: str):
    norms = norm(np.asarray(r, dtype=float))
    if np.any(~(norms > earth.radius_km)):
        raise DomainError(f"{name} lies on or inside the Earth sphere")


def rise_set_metric(r_j, r_rx, earth: EarthModel = EARTH):
    """Visibility metric for the line through two satellites.

    Non-positive values mean the Earth does not block the line of sight.
    """
    r_j = np.asarray(r_j, dtype=float)
    r_rx = np.asarray(r_rx, dtype=float)
    _outside_earth(r_j, earth, "r_j")
    _outside_earth(r_rx, earth, "r_rx")
    cross = dot(r_j, r_rx)
    nj = dot(r_j, r_j)
    nrx = dot(r_rx, r_rx)
    re2 = earth.radius_km**2
    return cross**2 - nj * nrx + (nj + nrx) * re2 - 2.0 * re2 * cross


def segment_blocked_oracle(r1, r2, earth: EarthModel = EARTH):
    """True where the segment r1-r2 passes strictly inside the Earth sphere.

    Projects the Earth center onto the segment and compares the distance of the
    closest point with the radius. A grazing (tangent) segment is not blocked.
    """
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    _outside_earth(r1, earth, "r1")
    _outside_earth(r2, earth, "r2")
    d = r2 - r1
    dd = dot(d, d)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(dd > 0, -dot(r1, d) / np.where(dd > 0, dd, 1.0), 0.0)
    s = np.clip(s, 0.0, 1.0)
    closest = r1 + s[..., None] * d
    out = dot(closest, closest) < earth.radius_km**2
    return bool(out) if out.ndim == 0 else out


def angle_between(u, v):
    """Angle in [0, pi] between vectors, with the cosine clamped to [-1, 1]."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = norm(u)
    nv = norm(v)
    if np.any(nu == 0) or np.any(nv == 0):
        raise DomainError("angle undefined for a zero vector")
    c = dot(u, v) / (nu * nv)
    out = np.arccos(np.clip(c, -1.0, 1.0))
    return float(out) if out.ndim == 0 else out


def relative_angular_offset(
    t, h_low: float, h_high: float, delta_beta0: float = 0.0, earth: EarthModel = EARTH
):
    """Phase of the higher orbit's satellite pattern relative to the lower one at time ``t``."""
    if h_low == h_high:
        drift = 0.0
    else:
        drift = mean_motion(h_high, earth) - mean_motion(h_low, earth)
    t = np.asarray(t, dtype=float)
    out = np.mod(delta_beta0 + drift * t, TWO_PI)
    return float(out) if out.ndim == 0 else out


def synodic_period(h1: float, h2: float, earth: EarthModel = EARTH) -> float:
    """Time for the relative phase of two co-planar orbits to repeat; infinite for equal altitudes."""
    dw = abs(mean_motion(h1, earth) - mean_motion(h2, earth))
    return math.inf if dw == 0 else TWO_PI / dw
