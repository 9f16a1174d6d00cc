#!/usr/bin/env python3
"""Render figure CSVs written by run_figures.py as PNGs (needs matplotlib)."""
import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from xlink.io import read_csv  # noqa: E402


def plot(csv_path: Path, out_dir: Path) -> Path:
    table = read_csv(csv_path)
    fig, ax = plt.subplots(figsize=(7, 4))
    x = table.values
    for label in table.labels():
        for method, style in (("analytic", "-"), ("oracle", "--")):
            y = table.column(method, "sir_db", label)
            ax.plot(x, y, style, lw=1, label=f"{label} ({method})")
    ax.set_xlabel(table.axis)
    ax.set_ylabel("SIR [dB]")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=6)
    ax.set_title(csv_path.stem)
    out = out_dir / f"{csv_path.stem}.png"
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv_dir", nargs="?", default="figures")
    args = ap.parse_args(argv)
    src = Path(args.csv_dir)
    for path in sorted(src.glob("*.csv")):
        print(f"wrote {plot(path, src)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
