"""Render the CSV written by fig1_data.py (needs matplotlib).

    python3 scripts/plot_fig1.py --in-dir fig1 --out fig1.png
"""
from __future__ import annotations

import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def load(path: Path) -> dict[str, list[float]]:
    with path.open() as fh:
        reader = csv.DictReader(fh)
        cols: dict[str, list[float]] = {k: [] for k in reader.fieldnames}
        for row in reader:
            for k, v in row.items():
                cols[k].append(float(v))
    return cols


def main(argv=None) -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--in-dir", type=Path, default=Path("fig1"))
    ap.add_argument("--out", type=Path, default=Path("fig1.png"))
    args = ap.parse_args(argv)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, name, t in zip(axes, ("left", "right"), (5.21, 15.21)):
        cols = load(args.in_dir / f"fig1_{name}.csv")
        x = cols.pop("x")
        ax.plot(x, cols.pop("goldstein"), "k", lw=2, label="closed form")
        for key, ys in cols.items():
            ax.plot(x, ys, lw=0.8, label=key.replace("series_", ""))
        ax.set_title(f"t = {t}")
        ax.set_xlabel("x")
        ax.legend()
    axes[0].set_ylabel("density")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
