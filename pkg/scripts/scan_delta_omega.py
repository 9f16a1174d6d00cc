#!/usr/bin/env python3
"""Scan the RAAN gap between two shifted planes and report the beamwidth threshold,
the inclination at which interference vanishes, and any local SIR dips.

The RAAN gap is not fixed by the shipped figure configs' source material, so this
shows how the structural quantities move with it.
"""
import argparse
import math
import sys

import numpy as np

from xlink.experiments import first_positive, series_label, sweep_shifted_beamwidth, sweep_shifted_inclination, zero_onset

DEG = math.pi / 180


def local_dips(axis, sir_db):
    return [axis[k] for k in range(1, len(axis) - 1) if sir_db[k] < sir_db[k - 1] and sir_db[k] < sir_db[k + 1]]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gaps", type=float, nargs="*", default=[20, 40, 60, 90, 120, 150, 180], help="RAAN gaps in degrees")
    ap.add_argument("--samples", type=int, default=1000, help="time samples per orbital period")
    ap.add_argument("--n", type=int, default=60)
    args = ap.parse_args(argv)

    beams = np.arange(1, 20.25, 0.25) * DEG
    gammas = np.arange(0.5, 30.25, 0.5) * DEG
    print("gap_deg  threshold_deg  onset20_deg  onset30_deg  dips30_deg")
    for gap in args.gaps:
        bw = sweep_shifted_beamwidth(500, 3 * DEG, gap * DEG, beams, [args.n], samples_per_period=args.samples)
        thr = first_positive(bw.values, bw.column("oracle", "E_I_w", f"N={args.n}"))
        inc = sweep_shifted_inclination(500, gammas, gap * DEG, [20 * DEG, 30 * DEG], [args.n], samples_per_period=args.samples)
        on20 = zero_onset(inc.values, inc.column("oracle", "E_I_w", series_label(20 * DEG, args.n)))
        lab30 = series_label(30 * DEG, args.n)
        on30 = zero_onset(inc.values, inc.column("oracle", "E_I_w", lab30))
        dips = local_dips(inc.values, inc.column("oracle", "sir_db", lab30))
        print(f"{gap:7g}  {thr!s:>13}  {on20!s:>11}  {on30!s:>11}  {dips}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
