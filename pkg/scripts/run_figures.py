#!/usr/bin/env python3
"""Regenerate every figure CSV and print the analytic-vs-oracle summary for each."""
import argparse
import sys
import time
from pathlib import Path

from xlink.cli import BUILTIN, FIGURES, resolve_config, verify_report
from xlink.experiments import run_sweep
from xlink.io import write_csv


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="figures", help="output directory")
    ap.add_argument("--only", nargs="*", choices=FIGURES, help="subset of figures")
    args = ap.parse_args(argv)
    out = Path(args.out)
    for name in args.only or FIGURES:
        t0 = time.perf_counter()
        table = run_sweep(resolve_config(BUILTIN + name))
        path = write_csv(table, out / f"{name}.csv")
        ok, report = verify_report(table)
        print(f"== {name} -> {path} ({time.perf_counter() - t0:.1f}s)")
        print(report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
