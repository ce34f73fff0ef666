"""Tabulate the smallest moment count M(h) that reaches a relative error
eps_r in the moment-sum identity, over a grid of times.

    python3 scripts/moment_scan.py --eps 1e-6 --h-max 15
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from randflight.domain import ModelParams
from randflight.errors import MomentsNotAchievable
from randflight.fourier import required_moments


@dataclass(frozen=True)
class ScanConfig:
    eps: float = 1e-6
    h_max: int = 15
    times: tuple[float, ...] = (0.5, 1.0, 2.0, 5.21, 15.21)
    cap: int = 500
    precision: str = "extended"


def scan(cfg: ScanConfig, params: ModelParams) -> list[tuple[int, int | None]]:
    out = []
    for h in range(cfg.h_max + 1):
        try:
            out.append((h, required_moments(h, cfg.eps, cfg.times, params, cfg.cap, cfg.precision)))
        except MomentsNotAchievable:
            out.append((h, None))
    return out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description="minimal moment count per harmonic")
    ap.add_argument("--eps", type=float, default=ScanConfig.eps)
    ap.add_argument("--h-max", type=int, default=ScanConfig.h_max)
    ap.add_argument("--cap", type=int, default=ScanConfig.cap)
    ap.add_argument("--precision", choices=["extended", "double"], default="extended")
    args = ap.parse_args(argv)
    cfg = ScanConfig(eps=args.eps, h_max=args.h_max, cap=args.cap, precision=args.precision)
    print(f"# eps_r={cfg.eps} times={','.join(map(str, cfg.times))} precision={cfg.precision}")
    print("h,required_M")
    for h, M in scan(cfg, ModelParams()):
        print(f"{h},{'>' + str(cfg.cap) if M is None else M}")


if __name__ == "__main__":
    main()
