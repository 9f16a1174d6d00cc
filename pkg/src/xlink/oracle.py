"""Time-stepped 3D simulator used as an independent check on the closed forms.

Every satellite of every configured orbit is propagated in the GEC frame and
points its transmit beam at its in-orbit neighbor ``j - 1``. The receiver's
beam points at its serving transmitter. Each other satellite is then tested
directly: Earth blockage of the connecting segment, the off-axis angle in the
receiver beam, and the off-axis angle in the candidate's own beam. Only
``geometry`` and ``link`` primitives are used here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .config import ScenarioConfig
from .geometry import (
    COINCIDENT_KM,
    TWO_PI,
    DomainError,
    EarthModel,
    SatelliteState,
    angle_between,
    dot,
    norm,
    orbit_positions,
    segment_blocked_oracle,
)
from .link import RadioParams, cone_gain, friis_rx_power, in_cone
from .parallel import pmap

CHUNK = 2048


@dataclass(frozen=True)
class LinkAssignment:
    """Receiver, its serving transmitter, and the receiver's beam axis (unit vector)."""

    rx: tuple
    tx: tuple
    rx_axis: np.ndarray


@dataclass(frozen=True)
class InterferenceSample:
    time_s: float
    signal_w: float
    interference_w: float
    sir_linear: float
    interferer_ids: tuple
    contributions_w: tuple = ()
    sides: tuple = ()

    def subtotal(self, orbits=None, side=None) -> float:
        """Interference from interferers in ``orbits`` and on ``side`` (+1 toward the serving Tx, -1 away)."""
        total = 0.0
        for (k, _), p, s in zip(self.interferer_ids, self.contributions_w, self.sides):
            if (orbits is None or k in orbits) and (side is None or s == side):
                total += p
        return total


@dataclass(frozen=True)
class SimulationTrace:
    """Per-time, per-candidate results of a sweep.

    ``power_w`` is zero wherever a candidate does not interfere.
    """

    time_s: np.ndarray
    signal_w: np.ndarray
    power_w: np.ndarray
    side: np.ndarray
    orbit_of: np.ndarray
    index_of: np.ndarray

    def _select(self, orbits, side):
        keep = np.ones(self.power_w.shape, dtype=bool)
        if orbits is not None:
            keep &= np.isin(self.orbit_of, list(orbits))[None, :]
        if side is not None:
            keep &= self.side == side
        return keep & (self.power_w > 0)

    def interference(self, orbits=None, side=None) -> np.ndarray:
        return np.where(self._select(orbits, side), self.power_w, 0.0).sum(axis=1)

    def count(self, orbits=None, side=None) -> np.ndarray:
        return self._select(orbits, side).sum(axis=1)

    def sir(self, orbits=None, side=None) -> np.ndarray:
        i = self.interference(orbits, side)
        with np.errstate(divide="ignore"):
            return np.where(i > 0, self.signal_w / np.where(i > 0, i, 1.0), np.inf)

    def samples(self) -> list[InterferenceSample]:
        out = []
        for t in range(len(self.time_s)):
            hit = np.nonzero(self.power_w[t] > 0)[0]
            ids = tuple((int(self.orbit_of[k]), int(self.index_of[k])) for k in hit)
            contrib = tuple(float(x) for x in self.power_w[t, hit])
            total = float(sum(contrib))
            sig = float(self.signal_w[t])
            out.append(
                InterferenceSample(
                    time_s=float(self.time_s[t]),
                    signal_w=sig,
                    interference_w=total,
                    sir_linear=sig / total if total > 0 else math.inf,
                    interferer_ids=ids,
                    contributions_w=contrib,
                    sides=tuple(int(self.side[t, k]) for k in hit),
                )
            )
        return out


def _orbit_arrays(config: ScenarioConfig, times):
    """Positions ``(T, N_k, 3)`` and unit transmit pointings for each orbit."""
    out = []
    for orbit in config.orbits:
        pos = orbit_positions(orbit, times, config.earth)
        to_prev = np.roll(pos, 1, axis=-2) - pos
        to_prev /= norm(to_prev)[..., None]
        out.append((pos, to_prev))
    return out


def propagate(config: ScenarioConfig, t: float) -> list[SatelliteState]:
    states = []
    for k, (pos, point) in enumerate(_orbit_arrays(config, float(t))):
        states.extend(SatelliteState(pos[j], point[j], k, j) for j in range(len(pos)))
    return states


def assign_links(states: list[SatelliteState], rx: tuple = (0, 0)) -> LinkAssignment:
    """Serve ``rx`` from the in-orbit neighbor whose beam points back at it (index ``j + 1``)."""
    by_id = {(s.orbit_index, s.sat_index): s for s in states}
    if rx not in by_id:
        raise DomainError(f"no satellite {rx}")
    n = sum(1 for s in states if s.orbit_index == rx[0])
    tx = (rx[0], (rx[1] + 1) % n)
    axis = by_id[tx].position - by_id[rx].position
    return LinkAssignment(rx=rx, tx=tx, rx_axis=axis / norm(axis))


@dataclass(frozen=True)
class _Scene:
    """Beamwidth-independent geometry for a block of times against all candidates."""

    dist_km: np.ndarray
    usable: np.ndarray
    off_rx: np.ndarray
    off_cand: np.ndarray
    side: np.ndarray
    link_km: np.ndarray


def _scene(rx_pos, rx_axis, tx_pos, cand_pos, cand_point, eligible, earth) -> _Scene:
    v = cand_pos - rx_pos[:, None, :]
    dist = norm(v)
    apart = eligible[None, :] & (dist > COINCIDENT_KM) & (norm(cand_pos - tx_pos[:, None, :]) > COINCIDENT_KM)
    # excluded candidates get a harmless stand-in direction so angles stay defined
    safe_v = np.where(apart[..., None], v, rx_axis[:, None, :])
    blocked = segment_blocked_oracle(np.broadcast_to(rx_pos[:, None, :], cand_pos.shape), cand_pos, earth)
    return _Scene(
        dist_km=dist,
        usable=apart & ~blocked,
        off_rx=angle_between(np.broadcast_to(rx_axis[:, None, :], v.shape), safe_v),
        off_cand=angle_between(cand_point, -safe_v),
        side=np.where(dot(v, rx_axis[:, None, :]) >= 0, 1, -1),
        link_km=np.atleast_1d(norm(tx_pos - rx_pos)),
    )


def _powers(scene: _Scene, radio: RadioParams):
    """Interference power per (time, candidate) and serving signal power per time."""
    g = cone_gain(radio.beamwidth)
    hit = scene.usable & in_cone(scene.off_rx, radio.beamwidth) & in_cone(scene.off_cand, radio.beamwidth)
    d_m = np.where(hit, scene.dist_km, 1.0) * 1000.0
    power = np.where(hit, friis_rx_power(radio, g, g, d_m), 0.0)
    signal = np.atleast_1d(friis_rx_power(radio, g, g, scene.link_km * 1000.0))
    return power, signal


def aggregate_interference(
    states: list[SatelliteState],
    assignment: LinkAssignment,
    radio: RadioParams,
    earth: EarthModel,
    time_s: float = 0.0,
) -> InterferenceSample:
    by_id = {(s.orbit_index, s.sat_index): s for s in states}
    ids = [k for k in by_id if k not in (assignment.rx, assignment.tx)]
    cand_pos = np.array([by_id[k].position for k in ids])[None]
    cand_point = np.array([by_id[k].tx_pointing for k in ids])[None]
    rx_pos = by_id[assignment.rx].position[None]
    tx_pos = by_id[assignment.tx].position[None]
    scene = _scene(rx_pos, assignment.rx_axis[None], tx_pos, cand_pos, cand_point, np.ones(len(ids), bool), earth)
    power, signal = _powers(scene, radio)
    side = scene.side
    hit = np.nonzero(power[0] > 0)[0]
    contrib = tuple(float(power[0, k]) for k in hit)
    total = float(sum(contrib))
    sig = float(signal[0])
    return InterferenceSample(
        time_s=float(time_s),
        signal_w=sig,
        interference_w=total,
        sir_linear=sig / total if total > 0 else math.inf,
        interferer_ids=tuple(ids[k] for k in hit),
        contributions_w=contrib,
        sides=tuple(int(side[0, k]) for k in hit),
    )


def simulate(config: ScenarioConfig, times=None) -> SimulationTrace:
    """Run the receiver (orbit 0, satellite 0) over ``times`` (default: the config's grid)."""
    return simulate_beamwidths(config, [config.radio.beamwidth], times)[0]


def simulate_beamwidths(config: ScenarioConfig, beamwidths, times=None) -> list[SimulationTrace]:
    """One trace per beamwidth; the geometry is propagated and tested once for all of them."""
    times = config.times() if times is None else np.atleast_1d(np.asarray(times, dtype=float))
    radios = [replace(config.radio, beamwidth=float(b)) for b in beamwidths]
    orbit_of = np.concatenate([np.full(o.num_satellites, k) for k, o in enumerate(config.orbits)])
    index_of = np.concatenate([np.arange(o.num_satellites) for o in config.orbits])
    eligible = ~((orbit_of == 0) & np.isin(index_of, [0, 1]))

    parts = [([], [], []) for _ in radios]
    for start in range(0, len(times), CHUNK):
        block = times[start : start + CHUNK]
        arrays = _orbit_arrays(config, block)
        pos = np.concatenate([p for p, _ in arrays], axis=1)
        point = np.concatenate([q for _, q in arrays], axis=1)
        rx_pos = arrays[0][0][:, 0, :]
        tx_pos = arrays[0][0][:, 1, :]
        axis = tx_pos - rx_pos
        axis /= norm(axis)[..., None]
        scene = _scene(rx_pos, axis, tx_pos, pos, point, eligible, config.earth)
        for radio, (powers, sides, signals) in zip(radios, parts):
            p, sig = _powers(scene, radio)
            powers.append(p)
            sides.append(scene.side)
            signals.append(sig)
    return [
        SimulationTrace(
            time_s=times,
            signal_w=np.concatenate(signals),
            power_w=np.concatenate(powers),
            side=np.concatenate(sides),
            orbit_of=orbit_of,
            index_of=index_of,
        )
        for powers, sides, signals in parts
    ]


def time_sweep(config: ScenarioConfig) -> list[InterferenceSample]:
    return simulate(config).samples()


def time_average(samples, orbits=None, side=None) -> tuple[float, float]:
    """Mean interference power and ratio-of-means SIR over ``samples``."""
    samples = list(samples)
    if not samples:
        raise DomainError("cannot average an empty sample list")
    if orbits is None and side is None:
        interference = [s.interference_w for s in samples]
    else:
        interference = [s.subtotal(orbits, side) for s in samples]
    mean_i = float(np.mean(interference))
    mean_s = float(np.mean([s.signal_w for s in samples]))
    return mean_i, (mean_s / mean_i if mean_i > 0 else math.inf)


def interfering_orbits(config: ScenarioConfig) -> tuple:
    """Orbits whose interference the scenario's metric counts."""
    return (0,) if config.scenario == "single" else (1,)


@dataclass(frozen=True)
class MonteCarloStats:
    mean_interference_w: float
    std_interference_w: float
    mean_sir_linear: float
    draws: tuple


def monte_carlo_average(config: ScenarioConfig, num_draws: int, seed: int | None = None) -> MonteCarloStats:
    """Average the scenario metric over random phase offsets of the last orbit.

    Offsets are drawn uniformly over one angular slot of that orbit. Draw ``k``
    uses its own child stream of ``seed``, so results do not depend on the
    order in which draws are evaluated.
    """
    if num_draws < 1:
        raise DomainError("need at least one draw")
    seed = config.seed if seed is None else seed
    slot = TWO_PI / config.orbits[-1].num_satellites
    streams = np.random.SeedSequence(seed).spawn(num_draws)
    offsets = [float(np.random.default_rng(s).uniform(0.0, slot)) for s in streams]
    which = interfering_orbits(config)

    def run(offset):
        orbits = list(config.orbits)
        orbits[-1] = replace(orbits[-1], phase_offset=offset)
        trace = simulate(replace(config, orbits=tuple(orbits)))
        return float(trace.interference(which).mean()), float(trace.signal_w.mean())

    results = pmap(run, offsets)
    means = np.array([r[0] for r in results])
    signal = float(np.mean([r[1] for r in results]))
    mean_i = float(means.mean())
    return MonteCarloStats(
        mean_interference_w=mean_i,
        std_interference_w=float(means.std(ddof=1)) if num_draws > 1 else 0.0,
        mean_sir_linear=signal / mean_i if mean_i > 0 else math.inf,
        draws=tuple(zip(offsets, means.tolist())),
    )
