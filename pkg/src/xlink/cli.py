"""Command-line entry point: ``xlink {analyze,simulate,sweep,verify,figures}``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from importlib.resources import files
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ScenarioConfig, config_hash, load_config, parse_config
from .coplanar import CoplanarGeometry, coplanar
from .experiments import SweepTable, run_sweep
from .geometry import DomainError
from .io import format_csv, write_csv
from .link import to_db
from .oracle import interfering_orbits, monte_carlo_average, simulate
from .shifted import ShiftedGeometry, shifted
from .single import single_orbit

BUILTIN = "builtin:"
FIGURES = ("fig4", "fig5a", "fig5b", "fig6a", "fig6b", "fig6c")
VERIFY_DB_TOL = 1e-6


def builtin_config_text(name: str) -> str:
    if name not in FIGURES:
        raise ConfigError(f"unknown builtin config {name!r}; choose from {', '.join(FIGURES)}")
    return (files("xlink") / "configs" / f"{name}.json").read_text(encoding="utf-8")


def resolve_config(ref: str, seed: int | None = None, samples: int | None = None) -> ScenarioConfig:
    """Load ``ref`` (a path, or ``builtin:<name>``) and apply command-line overrides."""
    if ref.startswith(BUILTIN):
        cfg = parse_config(builtin_config_text(ref[len(BUILTIN) :]))
    else:
        cfg = load_config(ref)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    if samples is not None:
        if samples < 1:
            raise ConfigError("--samples must be at least 1")
        cfg = replace(cfg, time=replace(cfg.time, samples=samples))
    return cfg


def _db(x: float):
    return None if math.isinf(x) else to_db(x)


def analyze(cfg: ScenarioConfig) -> dict:
    """Closed-form evaluation of the configured scene at time zero."""
    o0 = cfg.orbits[0]
    out = {"scenario": cfg.scenario, "config_hash": config_hash(cfg)}
    if cfg.scenario == "single":
        r = single_orbit(o0.num_satellites, o0.altitude_km, cfg.radio, cfg.earth)
        out.update(
            interferers=list(range(2, r.n_interferers + 2)),
            mean_interference_w=r.mean_interference_w,
            sir_db=_db(r.sir_linear),
        )
        return out
    o1 = cfg.orbits[1]
    delta_beta = o1.phase_offset - o0.phase_offset
    if cfg.scenario == "coplanar":
        geom = CoplanarGeometry(o0.altitude_km, o1.altitude_km, o0.num_satellites, o1.num_satellites, delta_beta)
        r = coplanar(geom, cfg.radio, cfg.earth)
    else:
        if o0.phase_offset:
            raise DomainError("shifted analysis expects orbit 0 at zero phase offset")
        geom = ShiftedGeometry(
            o0.altitude_km, o0.inclination, o1.raan - o0.raan, o0.num_satellites, o1.num_satellites, delta_beta
        )
        r = shifted(geom, cfg.radio, 0.0, cfg.earth)
    out.update(interferers=sorted(r.interferer_set), mean_interference_w=r.mean_interference_w, sir_db=_db(r.sir_linear))
    return out


def simulation_table(cfg: ScenarioConfig) -> SweepTable:
    trace = simulate(cfg)
    table = SweepTable("time_s", trace.time_s.tolist())
    table.columns["oracle:signal_w:serving"] = trace.signal_w
    table.columns["oracle:E_I_w:all"] = trace.interference()
    for k in range(len(cfg.orbits)):
        table.columns[f"oracle:E_I_w:orbit={k}"] = trace.interference((k,))
    which = interfering_orbits(cfg)
    side = 1 if cfg.scenario == "single" else None
    ei = trace.interference(which, side)
    with np.errstate(divide="ignore"):
        sir = np.where(ei > 0, trace.signal_w / np.where(ei > 0, ei, 1.0), np.inf)
    table.columns["oracle:sir_db:scenario"] = to_db(sir)
    table.columns["oracle:count:scenario"] = trace.count(which, side)
    table.columns["no_interference:oracle:scenario"] = (ei == 0).astype(int)
    table.metadata.update(
        tool=f"xlink {__version__}",
        config_hash=config_hash(cfg),
        seed=str(cfg.seed),
        scenario=cfg.scenario,
        conventions="scenario columns count orbit 1 (two-orbit scenes) or the serving side (one orbit)",
        assumed=";".join(cfg.assumed) or "none",
    )
    return table


def _emit(table: SweepTable, out: str | None, fallback: str | None):
    target = out or fallback
    if target is None or target == "-":
        sys.stdout.write(format_csv(table))
    else:
        path = write_csv(table, target)
        print(f"wrote {path}", file=sys.stderr)


def cmd_analyze(args) -> int:
    cfg = resolve_config(args.config, args.seed, args.samples)
    text = json.dumps(analyze(cfg), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_simulate(args) -> int:
    cfg = resolve_config(args.config, args.seed, args.samples)
    if args.draws:
        stats = monte_carlo_average(cfg, args.draws, cfg.seed)
        report = {
            "draws": args.draws,
            "seed": cfg.seed,
            "mean_interference_w": stats.mean_interference_w,
            "std_interference_w": stats.std_interference_w,
            "mean_sir_db": _db(stats.mean_sir_linear),
        }
        print(json.dumps(report, indent=2))
        return 0
    _emit(simulation_table(cfg), args.out, None)
    return 0


def cmd_sweep(args) -> int:
    cfg = resolve_config(args.config, args.seed, args.samples)
    _emit(run_sweep(cfg), args.out, cfg.output)
    return 0


def verify_report(table: SweepTable) -> tuple[bool, str]:
    m = table.metadata
    ok = float(m["max_abs_db_discrepancy"]) < VERIFY_DB_TOL and int(m["no_interference_mismatches"]) == 0
    lines = [
        f"scenario: {m.get('scenario', '?')}  axis: {table.axis}  rows: {len(table.values)}",
        f"max |analytic - oracle| SIR: {m['max_abs_db_discrepancy']} dB (tolerance {VERIFY_DB_TOL})",
        f"max relative E[I] gap: {m['max_rel_E_I_discrepancy']}",
        f"cells with differing no-interference flag: {m['no_interference_mismatches']}",
        f"cells differing by more than 1e-9 relative: {m['disagreeing_cells']}",
        "PASS" if ok else "FAIL",
    ]
    return ok, "\n".join(lines)


def cmd_verify(args) -> int:
    cfg = resolve_config(args.config, args.seed, args.samples)
    ok, report = verify_report(run_sweep(cfg))
    if args.out:
        Path(args.out).write_text(report + "\n", encoding="utf-8")
    print(report)
    return 0 if ok else 1


def cmd_figures(args) -> int:
    out_dir = Path(args.out or "figures")
    for name in FIGURES:
        cfg = resolve_config(BUILTIN + name, args.seed, args.samples)
        path = write_csv(run_sweep(cfg), out_dir / f"{name}.csv")
        print(f"wrote {path}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xlink", description="Inter-satellite link interference analysis.")
    parser.add_argument("--version", action="version", version=f"xlink {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_config=True):
        if need_config:
            p.add_argument("--config", required=True, help="JSON config path, or builtin:<name> for a shipped figure config")
        p.add_argument("--out", help="output path (directory for figures; '-' for stdout)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--samples", type=int, help="override time.samples")
        return p

    common(sub.add_parser("analyze", help="closed-form evaluation at t=0")).set_defaults(func=cmd_analyze)
    p = common(sub.add_parser("simulate", help="oracle time sweep (CSV)"))
    p.add_argument("--draws", type=int, default=0, help="Monte-Carlo draws over the last orbit's phase offset")
    p.set_defaults(func=cmd_simulate)
    common(sub.add_parser("sweep", help="analytic and oracle sweep (CSV)")).set_defaults(func=cmd_sweep)
    common(sub.add_parser("verify", help="analytic-vs-oracle comparison report")).set_defaults(func=cmd_verify)
    common(sub.add_parser("figures", help="regenerate every figure CSV"), need_config=False).set_defaults(func=cmd_figures)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError, OSError) as exc:
        print(f"xlink: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
