"""Sweep drivers that evaluate each scenario through both the closed forms and the oracle.

Every driver returns a :class:`SweepTable` with, per series, the mean
interference and the SIR from each method plus a ``no_interference`` flag
column. The oracle value compared against a closed form is always the
matching subtotal: same-side interferers for one orbit, orbit 1 otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .config import ScenarioConfig, config_hash
from .coplanar import coplanar_trace, offsets_at, serving_signal_w
from .geometry import EARTH, DomainError, EarthModel, OrbitSpec, mean_motion, orbital_period, synodic_period
from .link import RadioParams, to_db
from .oracle import simulate_beamwidths
from .parallel import pmap
from .shifted import ShiftedGeometry, shifted_trace, serving_signal_w as shifted_signal_w
from .single import mean_interference_single

METHODS = ("analytic", "oracle")

# analytic and oracle cells further apart than this (relative) count as disagreeing
CELL_RTOL = 1e-9

CONVENTIONS = {
    "single": "oracle subtotal = interferers on the serving side of the receiver",
    "coplanar": "oracle subtotal = interferers in orbit 1; time average = mean signal / mean interference",
    "shifted": "oracle subtotal = interferers in orbit 1; time average = mean signal / mean interference",
}


def deg_label(x: float) -> str:
    return f"{math.degrees(x):g}deg"


def to_deg(x: float) -> float:
    """Degrees rounded to 1e-9 so grids written in degrees read back as typed."""
    return round(math.degrees(x), 9)


def series_label(alpha: float | None = None, n: int | None = None) -> str:
    parts = []
    if alpha is not None:
        parts.append(f"alpha={deg_label(alpha)}")
    if n is not None:
        parts.append(f"N={n}")
    return ",".join(parts)


@dataclass
class SweepTable:
    """Rectangular sweep result; SIR cells hold ``inf`` when nothing interferes."""

    axis: str
    values: list
    columns: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def add_series(self, method: str, label: str, interference_w, signal_w):
        ei = np.asarray(interference_w, dtype=float)
        sig = np.broadcast_to(np.asarray(signal_w, dtype=float), ei.shape)
        if len(ei) != len(self.values):
            raise DomainError(f"series {label} has {len(ei)} rows, axis has {len(self.values)}")
        with np.errstate(divide="ignore"):
            s = np.where(ei > 0, sig / np.where(ei > 0, ei, 1.0), np.inf)
        self.columns[f"{method}:E_I_w:{label}"] = ei
        self.columns[f"{method}:sir_db:{label}"] = to_db(s)
        self.columns[f"no_interference:{method}:{label}"] = (ei == 0).astype(int)

    def column(self, method: str, metric: str, label: str) -> np.ndarray:
        return self.columns[f"{method}:{metric}:{label}"]

    def labels(self) -> list[str]:
        out = []
        for name in self.columns:
            method, metric, label = name.split(":", 2)
            if method == "analytic" and metric == "E_I_w":
                out.append(label)
        return out

    def discrepancy(self) -> dict:
        """Worst analytic-vs-oracle gaps over all series."""
        worst_db, worst_rel, flag_mismatch, cells = 0.0, 0.0, 0, 0
        for label in self.labels():
            a_db = self.column("analytic", "sir_db", label)
            o_db = self.column("oracle", "sir_db", label)
            finite = np.isfinite(a_db) & np.isfinite(o_db)
            flag_mismatch += int(np.sum(np.isfinite(a_db) != np.isfinite(o_db)))
            if finite.any():
                worst_db = max(worst_db, float(np.max(np.abs(a_db[finite] - o_db[finite]))))
            a = self.column("analytic", "E_I_w", label)
            o = self.column("oracle", "E_I_w", label)
            scale = np.maximum(np.abs(a), np.abs(o))
            nz = scale > 0
            if nz.any():
                rel = np.abs(a - o)[nz] / scale[nz]
                worst_rel = max(worst_rel, float(rel.max()))
                cells += int(np.sum(rel > CELL_RTOL))
        return {
            "max_abs_db": worst_db,
            "max_rel_E_I": worst_rel,
            "no_interference_mismatches": flag_mismatch,
            "disagreeing_cells": cells,
        }

    def finalize(self, **meta):
        d = self.discrepancy()
        self.metadata.update(
            {
                "tool": f"xlink {__version__}",
                "axis": self.axis,
                "max_abs_db_discrepancy": repr(d["max_abs_db"]),
                "max_rel_E_I_discrepancy": repr(d["max_rel_E_I"]),
                "no_interference_mismatches": str(d["no_interference_mismatches"]),
                "disagreeing_cells": str(d["disagreeing_cells"]),
            }
        )
        self.metadata.update({k: str(v) for k, v in meta.items()})
        return self


def _meta_from(config: ScenarioConfig | None) -> dict:
    if config is None:
        return {}
    return {
        "config_hash": config_hash(config),
        "seed": config.seed,
        "scenario": config.scenario,
        "conventions": CONVENTIONS[config.scenario],
        "assumed": ";".join(config.assumed) or "none",
    }


def _base_config(scenario: str, orbits, radio: RadioParams, earth: EarthModel) -> ScenarioConfig:
    return ScenarioConfig(scenario=scenario, orbits=tuple(orbits), radio=radio, earth=earth)


# --- single orbit ---------------------------------------------------------


def sweep_single_orbit(
    n_values, alphas, h: float, radio: RadioParams = RadioParams(), earth: EarthModel = EARTH, config=None
) -> SweepTable:
    n_values = [int(n) for n in n_values]
    if any(not 3 <= n <= 10_000 for n in n_values):
        raise DomainError("satellite counts must lie in [3, 10^4]")
    table = SweepTable("num_satellites", n_values)

    def oracle_point(n):
        cfg = _base_config("single", [OrbitSpec(h, num_satellites=n)], radio, earth)
        traces = simulate_beamwidths(cfg, alphas, times=[0.0])
        return [
            (float(tr.interference((0,), side=1)[0]), float(tr.interference((0,), side=-1)[0]), float(tr.signal_w[0]))
            for tr in traces
        ]

    oracle_rows = pmap(oracle_point, n_values)
    other_side = 0.0
    for k, alpha in enumerate(alphas):
        r = replace(radio, beamwidth=alpha)
        label = series_label(alpha)
        ei = [mean_interference_single(n, h, r, earth) for n in n_values]
        table.add_series("analytic", label, ei, [serving_signal_w(n, h, r, earth) for n in n_values])
        table.add_series("oracle", label, [row[k][0] for row in oracle_rows], [row[k][2] for row in oracle_rows])
        other_side = max(other_side, max(row[k][1] for row in oracle_rows))
    return table.finalize(altitude_km=h, oracle_opposite_side_max_w=repr(other_side), **_meta_from(config))


# --- co-planar orbits -----------------------------------------------------


def _coplanar_oracle(h, h_c, n, n_c, alphas, radio, earth, times, delta_beta0):
    cfg = _base_config(
        "coplanar",
        [OrbitSpec(h, num_satellites=n), OrbitSpec(h_c, num_satellites=n_c, phase_offset=delta_beta0)],
        radio,
        earth,
    )
    return simulate_beamwidths(cfg, alphas, times)


def sweep_coplanar_time(
    h: float,
    h_c: float,
    n_values,
    alphas,
    radio: RadioParams = RadioParams(),
    samples: int = 10_000,
    periods: float = 1.0,
    duration_s: float | None = None,
    delta_beta0: float = 0.0,
    earth: EarthModel = EARTH,
    config=None,
) -> SweepTable:
    """SIR against time; each series uses ``N = N_c``."""
    if h == h_c:
        raise DomainError("co-planar orbits need different altitudes")
    window = duration_s if duration_s is not None else periods * synodic_period(h, h_c, earth)
    times = np.arange(samples) * (window / samples)
    table = SweepTable("time_s", times.tolist())
    offsets = offsets_at(times, h, h_c, delta_beta0, earth)

    traces = pmap(lambda n: _coplanar_oracle(h, h_c, n, n, alphas, radio, earth, times, delta_beta0), n_values)
    for n, per_alpha in zip(n_values, traces):
        for alpha, tr in zip(alphas, per_alpha):
            r = replace(radio, beamwidth=alpha)
            label = series_label(alpha, n)
            ei, _, _ = coplanar_trace(h, h_c, n, n, r, offsets, earth)
            table.add_series("analytic", label, ei, serving_signal_w(n, h, r, earth))
            table.add_series("oracle", label, tr.interference((1,)), tr.signal_w)
    return table.finalize(
        altitude_km=h, interferer_altitude_km=h_c, synodic_period_s=repr(synodic_period(h, h_c, earth)), **_meta_from(config)
    )


def sweep_coplanar_separation(
    h: float,
    separations,
    n_values,
    alphas,
    radio: RadioParams = RadioParams(),
    samples: int = 10_000,
    delta_beta0: float = 0.0,
    earth: EarthModel = EARTH,
    config=None,
) -> SweepTable:
    """Time-averaged interference from an orbit ``separation`` km above the receiver's."""
    separations = [float(x) for x in separations]
    if any(not x > 0 for x in separations):
        raise DomainError("separations must be positive")
    table = SweepTable("separation_km", separations)
    points = [(sep, n) for n in n_values for sep in separations]

    def point(p):
        sep, n = p
        h_c = h + sep
        times = np.arange(samples) * (synodic_period(h, h_c, earth) / samples)
        offsets = offsets_at(times, h, h_c, delta_beta0, earth)
        analytic = []
        for alpha in alphas:
            r = replace(radio, beamwidth=alpha)
            ei, _, _ = coplanar_trace(h, h_c, n, n, r, offsets, earth)
            analytic.append((float(ei.mean()), serving_signal_w(n, h, r, earth)))
        traces = _coplanar_oracle(h, h_c, n, n, alphas, radio, earth, times, delta_beta0)
        oracle = [(float(tr.interference((1,)).mean()), float(tr.signal_w.mean())) for tr in traces]
        return analytic, oracle

    results = dict(zip(points, pmap(point, points)))
    thresholds = {}
    for n in n_values:
        for k, alpha in enumerate(alphas):
            label = series_label(alpha, n)
            for m, method in enumerate(METHODS):
                rows = [results[(sep, n)][m][k] for sep in separations]
                ei = [r[0] for r in rows]
                table.add_series(method, label, ei, [r[1] for r in rows])
                thresholds[f"{method}:{label}"] = zero_onset(separations, ei)
    meta = {f"threshold_km:{k}": ("none" if v is None else repr(v)) for k, v in thresholds.items()}
    return table.finalize(altitude_km=h, samples_per_synodic_period=samples, **meta, **_meta_from(config))


# --- shifted RAAN ---------------------------------------------------------


def _shifted_oracle(h, gamma, delta_omega, n, n_s, alphas, radio, earth, times, delta_beta, raan0=0.0):
    cfg = _base_config(
        "shifted",
        [
            OrbitSpec(h, inclination=gamma, raan=raan0, num_satellites=n),
            OrbitSpec(h, inclination=gamma, raan=raan0 + delta_omega, num_satellites=n_s, phase_offset=delta_beta),
        ],
        radio,
        earth,
    )
    return simulate_beamwidths(cfg, alphas, times)


def _shifted_analytic(h, gamma, delta_omega, n, n_s, alphas, radio, earth, times, delta_beta, raan0=0.0):
    geom = ShiftedGeometry(h, gamma, delta_omega, n, n_s, delta_beta, raan0)
    out = []
    for alpha in alphas:
        r = replace(radio, beamwidth=alpha)
        ei, _, _ = shifted_trace(geom, r, times, earth)
        out.append((ei, shifted_signal_w(geom, r, earth)))
    return out


def shifted_times(h: float, periods: float, samples_per_period: int, earth: EarthModel = EARTH):
    if periods < 1:
        raise DomainError("need at least one orbital period")
    total = int(round(periods * samples_per_period))
    return np.arange(total) * (orbital_period(h, earth) / samples_per_period)


def sweep_shifted_time(
    h: float,
    gamma: float,
    delta_omega: float,
    n_values,
    alphas,
    radio: RadioParams = RadioParams(),
    periods: float = 2.0,
    samples_per_period: int = 2000,
    delta_beta: float = 0.0,
    earth: EarthModel = EARTH,
    config=None,
) -> SweepTable:
    times = shifted_times(h, periods, samples_per_period, earth)
    table = SweepTable("time_s", times.tolist())

    def point(n):
        return (
            _shifted_analytic(h, gamma, delta_omega, n, n, alphas, radio, earth, times, delta_beta),
            _shifted_oracle(h, gamma, delta_omega, n, n, alphas, radio, earth, times, delta_beta),
        )

    for n, (analytic, traces) in zip(n_values, pmap(point, n_values)):
        for alpha, (ei, sig), tr in zip(alphas, analytic, traces):
            label = series_label(alpha, n)
            table.add_series("analytic", label, ei, sig)
            table.add_series("oracle", label, tr.interference((1,)), tr.signal_w)
    return table.finalize(
        altitude_km=h,
        inclination_deg=repr(to_deg(gamma)),
        raan_shift_deg=repr(to_deg(delta_omega)),
        orbital_period_s=repr(orbital_period(h, earth)),
        **_meta_from(config),
    )


def _shifted_average(h, gamma, delta_omega, n, alphas, radio, earth, times, delta_beta):
    analytic = _shifted_analytic(h, gamma, delta_omega, n, n, alphas, radio, earth, times, delta_beta)
    traces = _shifted_oracle(h, gamma, delta_omega, n, n, alphas, radio, earth, times, delta_beta)
    return (
        [(float(ei.mean()), sig) for ei, sig in analytic],
        [(float(tr.interference((1,)).mean()), float(tr.signal_w.mean())) for tr in traces],
    )


def sweep_shifted_beamwidth(
    h: float,
    gamma: float,
    delta_omega: float,
    alphas,
    n_values,
    radio: RadioParams = RadioParams(),
    samples_per_period: int = 2000,
    delta_beta: float = 0.0,
    earth: EarthModel = EARTH,
    config=None,
) -> SweepTable:
    """Time-averaged SIR over one orbital period against beamwidth."""
    alphas = [float(a) for a in alphas]
    if any(not 0 < a <= math.pi for a in alphas):
        raise DomainError("beamwidths must lie in (0, pi]")
    times = shifted_times(h, 1, samples_per_period, earth)
    table = SweepTable("beamwidth_deg", [to_deg(a) for a in alphas])
    results = pmap(lambda n: _shifted_average(h, gamma, delta_omega, n, alphas, radio, earth, times, delta_beta), n_values)
    onsets = {}
    for n, per_method in zip(n_values, results):
        label = series_label(n=n)
        for method, rows in zip(METHODS, per_method):
            table.add_series(method, label, [r[0] for r in rows], [r[1] for r in rows])
            onsets[f"threshold_deg:{method}:{label}"] = first_positive(table.values, [r[0] for r in rows])
    meta = {k: ("none" if v is None else repr(v)) for k, v in onsets.items()}
    return table.finalize(
        altitude_km=h, inclination_deg=repr(to_deg(gamma)), raan_shift_deg=repr(to_deg(delta_omega)),
        **meta, **_meta_from(config),
    )


def sweep_shifted_inclination(
    h: float,
    gammas,
    delta_omega: float,
    alphas,
    n_values,
    radio: RadioParams = RadioParams(),
    samples_per_period: int = 2000,
    delta_beta: float = 0.0,
    earth: EarthModel = EARTH,
    config=None,
) -> SweepTable:
    """Time-averaged SIR over one orbital period against inclination."""
    gammas = [float(g) for g in gammas]
    if any(not 0 < g <= math.pi / 2 for g in gammas):
        raise DomainError("inclinations must lie in (0, 90 deg]")
    times = shifted_times(h, 1, samples_per_period, earth)
    table = SweepTable("inclination_deg", [to_deg(g) for g in gammas])
    points = [(g, n) for n in n_values for g in gammas]
    results = dict(
        zip(points, pmap(lambda p: _shifted_average(h, p[0], delta_omega, p[1], alphas, radio, earth, times, delta_beta), points))
    )
    onsets = {}
    for n in n_values:
        for k, alpha in enumerate(alphas):
            label = series_label(alpha, n)
            for m, method in enumerate(METHODS):
                rows = [results[(g, n)][m][k] for g in gammas]
                ei = [r[0] for r in rows]
                table.add_series(method, label, ei, [r[1] for r in rows])
                onsets[f"onset_deg:{method}:{label}"] = zero_onset(table.values, ei)
    meta = {k: ("none" if v is None else repr(v)) for k, v in onsets.items()}
    return table.finalize(altitude_km=h, raan_shift_deg=repr(to_deg(delta_omega)), **meta, **_meta_from(config))


# --- trace analysis -------------------------------------------------------


def zero_onset(axis, interference):
    """Smallest axis value from which interference stays exactly zero to the end of the sweep."""
    ei = np.asarray(interference, dtype=float)
    if len(ei) == 0 or ei[-1] != 0:
        return None
    nz = np.nonzero(ei != 0)[0]
    return axis[0] if len(nz) == 0 else axis[nz[-1] + 1]


def first_positive(axis, interference):
    """First axis value with nonzero interference (the beamwidth threshold for an increasing axis)."""
    nz = np.nonzero(np.asarray(interference, dtype=float) != 0)[0]
    return None if len(nz) == 0 else axis[nz[0]]


def count_bursts(interference, circular: bool = False) -> int:
    """Number of maximal runs of consecutive samples with nonzero interference.

    With ``circular=True`` the trace is treated as one full period, so a run
    that wraps from the last sample to the first counts once.
    """
    on = np.asarray(interference) != 0
    if not on.any():
        return 0
    if on.all():
        return 1
    runs = int(on[0]) + int(np.sum(on[1:] & ~on[:-1]))
    if circular and on[0] and on[-1]:
        runs -= 1
    return runs


def fundamental_period(trace, rtol: float = 1e-6, atol: float = 0.0) -> int | None:
    """Smallest lag (in samples) at which the trace repeats itself, or None.

    Infinite entries compare equal to each other.
    """
    x = np.asarray(trace, dtype=float)
    n = len(x)
    for lag in range(1, n // 2 + 1):
        a, b = x[:-lag], x[lag:]
        same_inf = np.isinf(a) & np.isinf(b) & (np.sign(a) == np.sign(b))
        finite = np.isfinite(a) & np.isfinite(b)
        close = np.zeros_like(same_inf)
        close[finite] = np.abs(a[finite] - b[finite]) <= atol + rtol * np.abs(b[finite])
        if np.all(same_inf | close):
            return lag
    return None


# --- dispatch -------------------------------------------------------------


def _series_params(config: ScenarioConfig):
    alphas = list(config.sweep.beamwidths) or [config.radio.beamwidth]
    ns = list(config.sweep.num_satellites) or [config.orbits[0].num_satellites]
    return alphas, ns


def _phase_shift(config: ScenarioConfig):
    """Fold orbit 0's phase offset into time so closed forms can keep the receiver at zero phase."""
    o0, o1 = config.orbits
    return o1.phase_offset - o0.phase_offset, o0.phase_offset / mean_motion(o0.altitude_km, config.earth)


def run_sweep(config: ScenarioConfig) -> SweepTable:
    scen, axis = config.scenario, config.sweep.axis
    alphas, ns = _series_params(config)
    o0 = config.orbits[0]
    values = list(config.sweep.values)
    if scen == "single":
        return sweep_single_orbit(values or [o0.num_satellites], alphas, o0.altitude_km, config.radio, config.earth, config)

    delta_beta, t_shift = _phase_shift(config)
    if scen == "coplanar":
        if axis == "separation_km":
            return sweep_coplanar_separation(
                o0.altitude_km, values, ns, alphas, config.radio, config.time.samples, delta_beta, config.earth, config
            )
        return sweep_coplanar_time(
            o0.altitude_km,
            config.orbits[1].altitude_km,
            ns,
            alphas,
            config.radio,
            config.time.samples,
            config.time.periods,
            config.time.duration_s,
            delta_beta,
            config.earth,
            config,
        )

    if t_shift:
        raise DomainError("shifted sweeps expect orbit 0 at zero phase offset")
    o1 = config.orbits[1]
    delta_omega = o1.raan - o0.raan
    per_period = max(1, int(round(config.time.samples / config.time.periods)))
    if axis == "beamwidth":
        return sweep_shifted_beamwidth(
            o0.altitude_km, o0.inclination, delta_omega, values, ns, config.radio, per_period, delta_beta, config.earth, config
        )
    if axis == "inclination":
        return sweep_shifted_inclination(
            o0.altitude_km, values, delta_omega, alphas, ns, config.radio, per_period, delta_beta, config.earth, config
        )
    return sweep_shifted_time(
        o0.altitude_km,
        o0.inclination,
        delta_omega,
        ns,
        alphas,
        config.radio,
        config.time.periods,
        per_period,
        delta_beta,
        config.earth,
        config,
    )
