"""Scenario configuration: strict JSON parsing, validation, and canonical emission.

Angles are radians once parsed. In a config document an angle may be a bare
number (radians) or a string such as ``"30 deg"``, ``"30°"`` or ``"0.5 rad"``.
Every field filled from a default is recorded in ``ScenarioConfig.assumed`` so
it can be echoed into output metadata.
"""
from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .geometry import DomainError, EarthModel, OrbitSpec, orbital_period, synodic_period
from .link import RadioParams

SCENARIOS = ("single", "coplanar", "shifted")
AXES = {
    "single": ("num_satellites",),
    "coplanar": ("time", "separation_km"),
    "shifted": ("time", "beamwidth", "inclination"),
}
DEFAULT_SAMPLES = {"single": 1, "coplanar": 10_000, "shifted": 2000}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TimeGrid:
    """Sampling window. ``duration_s`` wins over ``periods`` when both are given.

    ``periods`` counts orbital periods of orbit 0 for single/shifted scenarios
    and synodic periods for co-planar ones.
    """

    duration_s: float | None = None
    periods: float = 1.0
    samples: int = 1


@dataclass(frozen=True)
class SweepSpec:
    axis: str | None = None
    values: tuple = ()
    beamwidths: tuple = ()
    num_satellites: tuple = ()


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    orbits: tuple
    radio: RadioParams = field(default_factory=RadioParams)
    earth: EarthModel = field(default_factory=EarthModel)
    time: TimeGrid = field(default_factory=TimeGrid)
    sweep: SweepSpec = field(default_factory=SweepSpec)
    seed: int = 0
    output: str | None = None
    assumed: tuple = ()

    def window_s(self) -> float:
        if self.time.duration_s is not None:
            return self.time.duration_s
        return self.time.periods * self.reference_period()

    def reference_period(self) -> float:
        o = self.orbits[0]
        if self.scenario == "coplanar":
            return synodic_period(o.altitude_km, self.orbits[1].altitude_km, self.earth)
        return orbital_period(o.altitude_km, self.earth)

    def times(self):
        return np.arange(self.time.samples) * (self.window_s() / self.time.samples)

    def with_orbits(self, **changes) -> "ScenarioConfig":
        """Copy with the same field changes applied to every orbit."""
        return replace(self, orbits=tuple(replace(o, **changes) for o in self.orbits))


_ANGLE_RE = re.compile(r"^\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(deg|degrees|°|rad|radians)?\s*$")


def parse_angle(value, where: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected an angle, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _ANGLE_RE.match(value)
        if m:
            x = float(m.group(1))
            return math.radians(x) if m.group(2) in ("deg", "degrees", "°") else x
    raise ConfigError(f"{where}: cannot read {value!r} as an angle")


def _number(value, where: str, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if kind is int:
        if int(value) != value:
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _range(value, where: str) -> tuple:
    if isinstance(value, dict):
        _strict(value, {"start", "stop", "step", "unit"}, where)
        missing = [k for k in ("start", "stop", "step") if k not in value]
        if missing:
            raise ConfigError(f"{where}: missing {', '.join(missing)}")
        start, stop, step = (_number(value[k], f"{where}.{k}") for k in ("start", "stop", "step"))
        if step <= 0:
            raise ConfigError(f"{where}.step must be positive")
        unit = value.get("unit")
        if unit not in (None, "deg", "rad"):
            raise ConfigError(f"{where}.unit: expected deg or rad, got {unit!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        # multiply rather than accumulate so grid points are reproducible exactly
        grid = tuple(start + k * step for k in range(max(count, 0)))
        return tuple(f"{x!r} {unit}" for x in grid) if unit else grid
    if isinstance(value, list):
        return tuple(value)
    raise ConfigError(f"{where}: expected a list or a start/stop/step object")


def _strict(doc: dict, allowed: set, where: str):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")


class _Parser:
    def __init__(self):
        self.assumed: list[str] = []

    def get(self, doc: dict, key: str, default, where: str):
        if key in doc:
            return doc[key]
        self.assumed.append(f"{where}.{key}" if where else key)
        return default

    def orbit(self, doc: dict, where: str) -> OrbitSpec:
        _strict(doc, {"altitude_km", "inclination", "raan", "num_satellites", "phase_offset"}, where)
        if "altitude_km" not in doc:
            raise ConfigError(f"{where}.altitude_km is required")
        try:
            return OrbitSpec(
                altitude_km=_number(doc["altitude_km"], f"{where}.altitude_km"),
                inclination=parse_angle(self.get(doc, "inclination", 0.0, where), f"{where}.inclination"),
                raan=parse_angle(self.get(doc, "raan", 0.0, where), f"{where}.raan"),
                num_satellites=_number(self.get(doc, "num_satellites", 40, where), f"{where}.num_satellites", int),
                phase_offset=parse_angle(self.get(doc, "phase_offset", 0.0, where), f"{where}.phase_offset"),
            )
        except DomainError as exc:
            raise ConfigError(f"{where}: {exc}") from None


def parse_config(text: str) -> ScenarioConfig:
    """Parse, default, and validate a JSON scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    _strict(doc, {"scenario", "earth", "orbits", "radio", "time", "sweep", "seed", "output", "assumed"}, "config")
    p = _Parser()

    scenario = doc.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario: expected one of {', '.join(SCENARIOS)}, got {scenario!r}")

    e = p.get(doc, "earth", {}, "")
    _strict(e, {"radius_km", "mu"}, "earth")
    try:
        earth = EarthModel(
            radius_km=_number(p.get(e, "radius_km", 6371.0, "earth"), "earth.radius_km"),
            mu=_number(p.get(e, "mu", 3.986004418e14, "earth"), "earth.mu"),
        )
    except DomainError as exc:
        raise ConfigError(f"earth: {exc}") from None

    raw_orbits = doc.get("orbits")
    if not isinstance(raw_orbits, list) or not raw_orbits:
        raise ConfigError("orbits: expected a non-empty list")
    orbits = tuple(p.orbit(o, f"orbits[{k}]") for k, o in enumerate(raw_orbits))
    _check_orbits(scenario, orbits)

    r = p.get(doc, "radio", {}, "")
    _strict(r, {"tx_power_w", "wavelength_m", "beamwidth"}, "radio")
    try:
        radio = RadioParams(
            tx_power_w=_number(p.get(r, "tx_power_w", 1.0, "radio"), "radio.tx_power_w"),
            wavelength_m=_number(p.get(r, "wavelength_m", 1e-3, "radio"), "radio.wavelength_m"),
            beamwidth=parse_angle(p.get(r, "beamwidth", "30 deg", "radio"), "radio.beamwidth"),
        )
    except DomainError as exc:
        raise ConfigError(f"radio: {exc}") from None

    t = p.get(doc, "time", {}, "")
    _strict(t, {"duration_s", "periods", "samples"}, "time")
    duration = t.get("duration_s")
    if duration is not None:
        duration = _number(duration, "time.duration_s")
        if not duration > 0:
            raise ConfigError("time.duration_s must be positive")
    periods = _number(p.get(t, "periods", 1.0, "time"), "time.periods")
    if not periods > 0:
        raise ConfigError("time.periods must be positive")
    samples = _number(
        p.get(t, "samples", int(round(DEFAULT_SAMPLES[scenario] * (1 if scenario == "coplanar" else periods))), "time"),
        "time.samples",
        int,
    )
    if samples < 1:
        raise ConfigError("time.samples must be at least 1")
    time = TimeGrid(duration_s=duration, periods=periods, samples=samples)

    s = p.get(doc, "sweep", {}, "")
    _strict(s, {"axis", "values", "beamwidths", "num_satellites"}, "sweep")
    axis = s.get("axis")
    if axis is not None and axis not in AXES[scenario]:
        raise ConfigError(f"sweep.axis: {axis!r} not valid for {scenario}; expected one of {', '.join(AXES[scenario])}")
    values = _range(s.get("values", []), "sweep.values")
    if axis in ("beamwidth", "inclination"):
        values = tuple(parse_angle(v, "sweep.values") for v in values)
    elif axis == "num_satellites":
        values = tuple(_number(v, "sweep.values", int) for v in values)
        if any(v < 3 for v in values):
            raise ConfigError("sweep.values: satellite counts must be at least 3")
    else:
        values = tuple(_number(v, "sweep.values") for v in values)
    if axis == "separation_km" and any(not v > 0 for v in values):
        raise ConfigError("sweep.values: separations must be positive")
    beamwidths = tuple(parse_angle(v, "sweep.beamwidths") for v in _range(s.get("beamwidths", []), "sweep.beamwidths"))
    if any(not 0 < b <= 2 * math.pi for b in beamwidths):
        raise ConfigError("sweep.beamwidths: each beamwidth must lie in (0, 2*pi]")
    counts = tuple(_number(v, "sweep.num_satellites", int) for v in _range(s.get("num_satellites", []), "sweep.num_satellites"))
    if any(c < 3 for c in counts):
        raise ConfigError("sweep.num_satellites: counts must be at least 3")
    sweep = SweepSpec(axis=axis, values=values, beamwidths=beamwidths, num_satellites=counts)

    seed = _number(p.get(doc, "seed", 0, ""), "seed", int)
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output: expected a path string")

    declared = doc.get("assumed", [])
    if not isinstance(declared, list) or not all(isinstance(x, str) for x in declared):
        raise ConfigError("assumed: expected a list of strings")
    assumed = tuple(dict.fromkeys(list(declared) + p.assumed))

    return ScenarioConfig(
        scenario=scenario,
        orbits=orbits,
        radio=radio,
        earth=earth,
        time=time,
        sweep=sweep,
        seed=seed,
        output=output,
        assumed=assumed,
    )


def _check_orbits(scenario: str, orbits: tuple):
    if scenario == "single" and len(orbits) != 1:
        raise ConfigError(f"orbits: single scenario takes exactly 1 orbit, got {len(orbits)}")
    if scenario in ("coplanar", "shifted") and len(orbits) != 2:
        raise ConfigError(f"orbits: {scenario} scenario takes exactly 2 orbits, got {len(orbits)}")
    if scenario == "coplanar":
        a, b = orbits
        if a.altitude_km == b.altitude_km:
            raise ConfigError("orbits[1].altitude_km: co-planar orbits need different altitudes (h = h_c)")
        if a.inclination != b.inclination or a.raan != b.raan:
            raise ConfigError("orbits[1]: co-planar orbits must share inclination and raan")
    if scenario == "shifted":
        a, b = orbits
        if a.altitude_km != b.altitude_km:
            raise ConfigError("orbits[1].altitude_km: shifted orbits need equal altitudes")
        if a.inclination != b.inclination:
            raise ConfigError("orbits[1].inclination: shifted orbits need equal inclinations")


def config_to_dict(cfg: ScenarioConfig) -> dict:
    """Fully explicit document (angles in radians) that parses back to ``cfg``."""
    return {
        "scenario": cfg.scenario,
        "earth": {"radius_km": cfg.earth.radius_km, "mu": cfg.earth.mu},
        "orbits": [
            {
                "altitude_km": o.altitude_km,
                "inclination": o.inclination,
                "raan": o.raan,
                "num_satellites": o.num_satellites,
                "phase_offset": o.phase_offset,
            }
            for o in cfg.orbits
        ],
        "radio": {
            "tx_power_w": cfg.radio.tx_power_w,
            "wavelength_m": cfg.radio.wavelength_m,
            "beamwidth": cfg.radio.beamwidth,
        },
        "time": {"duration_s": cfg.time.duration_s, "periods": cfg.time.periods, "samples": cfg.time.samples},
        "sweep": {
            "axis": cfg.sweep.axis,
            "values": list(cfg.sweep.values),
            "beamwidths": list(cfg.sweep.beamwidths),
            "num_satellites": list(cfg.sweep.num_satellites),
        },
        "seed": cfg.seed,
        "output": cfg.output,
        "assumed": list(cfg.assumed),
    }


def emit_config(cfg: ScenarioConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True)


def config_hash(cfg: ScenarioConfig) -> str:
    canon = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text)
