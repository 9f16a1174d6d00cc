import json
import math

import pytest
from hypothesis import given, strategies as st

from xlink.config import ConfigError, config_hash, emit_config, load_config, parse_angle, parse_config

MINIMAL = {"scenario": "single", "orbits": [{"altitude_km": 500}]}


def doc(**over):
    d = json.loads(json.dumps(MINIMAL))
    d.update(over)
    return json.dumps(d)


def test_minimal_config_fills_and_records_defaults():
    cfg = parse_config(doc())
    assert cfg.radio.beamwidth == pytest.approx(math.pi / 6)
    assert cfg.orbits[0].num_satellites == 40
    assert cfg.earth.radius_km == 6371.0
    assert "radio.beamwidth" in cfg.assumed
    assert "orbits[0].num_satellites" in cfg.assumed
    assert "seed" in cfg.assumed


@pytest.mark.parametrize(
    "text, radians",
    [("30 deg", math.pi / 6), ("30°", math.pi / 6), ("0.5 rad", 0.5), (0.25, 0.25), ("1e1 degrees", math.radians(10))],
)
def test_angle_forms(text, radians):
    assert parse_angle(text, "x") == pytest.approx(radians, rel=1e-15)


@pytest.mark.parametrize("bad", ["thirty", "30 grad", True, None, [30]])
def test_bad_angles_rejected(bad):
    with pytest.raises(ConfigError):
        parse_angle(bad, "x")


@pytest.mark.parametrize(
    "text, fragment",
    [
        (doc(bogus=1), "bogus"),
        (doc(orbits=[{"altitude_km": 500, "colour": "red"}]), "colour"),
        (doc(radio={"beamwidth": "wide"}), "radio.beamwidth"),
        (doc(scenario="triple"), "scenario"),
        (doc(orbits=[{"altitude_km": 500}, {"altitude_km": 600}]), "exactly 1"),
        (doc(orbits=[{"altitude_km": -5}]), "orbits[0]"),
        (doc(orbits=[{"altitude_km": 500, "num_satellites": 2}]), "orbits[0]"),
        (doc(sweep={"axis": "time"}), "sweep.axis"),
        (doc(time={"samples": 0}), "time.samples"),
        ("{not json", "invalid JSON"),
    ],
)
def test_validation_names_the_field(text, fragment):
    with pytest.raises(ConfigError, match=fragment.replace("[", r"\[").replace("]", r"\]")):
        parse_config(text)


def test_equal_coplanar_altitudes_rejected():
    text = json.dumps({"scenario": "coplanar", "orbits": [{"altitude_km": 500}, {"altitude_km": 500}]})
    with pytest.raises(ConfigError, match="h = h_c"):
        parse_config(text)


def test_range_with_unit_and_missing_key():
    text = doc(sweep={"axis": "num_satellites", "values": {"start": 10, "stop": 30, "step": 10}})
    assert parse_config(text).sweep.values == (10, 20, 30)
    text = json.dumps(
        {
            "scenario": "shifted",
            "orbits": [{"altitude_km": 500, "inclination": "3 deg"}, {"altitude_km": 500, "inclination": "3 deg", "raan": "180 deg"}],
            "sweep": {"axis": "beamwidth", "values": {"start": 1, "stop": 2, "step": 0.25, "unit": "deg"}},
        }
    )
    vals = parse_config(text).sweep.values
    assert len(vals) == 5
    assert vals[-1] == pytest.approx(math.radians(2))
    with pytest.raises(ConfigError, match="missing step"):
        parse_config(doc(sweep={"values": {"start": 1, "stop": 2}}))


def test_missing_file_is_named(tmp_path):
    missing = tmp_path / "nope.json"
    with pytest.raises(ConfigError, match="nope.json"):
        load_config(missing)


angles = st.floats(0, 2 * math.pi, allow_nan=False)


@given(
    h=st.floats(150, 3000),
    n=st.integers(3, 500),
    inc=st.floats(0, math.pi),
    raan=angles,
    beam=st.floats(1e-4, 2 * math.pi),
    seed=st.integers(0, 2**31),
)
def test_emit_parse_identity(h, n, inc, raan, beam, seed):
    text = json.dumps(
        {
            "scenario": "shifted",
            "orbits": [
                {"altitude_km": h, "inclination": inc, "num_satellites": n},
                {"altitude_km": h, "inclination": inc, "raan": raan, "num_satellites": n},
            ],
            "radio": {"beamwidth": beam},
            "seed": seed,
        }
    )
    cfg = parse_config(text)
    again = parse_config(emit_config(cfg))
    assert again == cfg
    assert config_hash(again) == config_hash(cfg)
