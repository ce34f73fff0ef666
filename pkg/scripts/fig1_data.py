"""Write the data behind both panels of the figure as CSV.

Left panel: t = 5.21, full Fourier series with 15 and 125 harmonics against
the closed form. Right panel: t = 15.21, front-subtracted series with 15
harmonics against the closed form.

    python3 scripts/fig1_data.py --out-dir fig1
"""
from __future__ import annotations

import argparse
import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from randflight.closed_form import goldstein_pdf
from randflight.domain import ModelParams
from randflight.fourier import fourier_series_continuous, fourier_series_full


@dataclass(frozen=True)
class PanelConfig:
    name: str
    t: float
    harmonics: tuple[int, ...]
    full: bool
    points: int = 1001


PANELS = (
    PanelConfig("left", 5.21, (15, 125), full=True),
    PanelConfig("right", 15.21, (15,), full=False),
)


def panel_rows(cfg: PanelConfig, params: ModelParams):
    L = params.front(cfg.t)
    x = np.linspace(-L, L, cfg.points)
    series = fourier_series_full if cfg.full else fourier_series_continuous
    cols = {"x": x, "goldstein": goldstein_pdf(x, cfg.t, params)}
    for H in cfg.harmonics:
        cols[f"series_H{H}"] = series(x, cfg.t, params, H)
    return cols


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("fig1"))
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    ap.add_argument("--speed", type=float, default=1.0)
    args = ap.parse_args(argv)
    params = ModelParams(args.lam, args.speed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for cfg in PANELS:
        cols = panel_rows(cfg, params)
        path = args.out_dir / f"fig1_{cfg.name}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols.keys())
            for row in zip(*cols.values()):
                w.writerow(format(float(v), ".17g") for v in row)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
