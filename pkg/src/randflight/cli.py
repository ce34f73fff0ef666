"""Command-line interface: ``randflight {eval,compare,identity,mc}``.

Every command writes CSV to stdout (or ``--output``). Lines starting with
``#`` carry the parameter echo, the atoms and summaries; data rows use 17
significant digits. Exit codes: 0 ok, 2 usage error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import io
import sys
from contextlib import contextmanager
from typing import IO, Iterator, Sequence

import numpy as np

from . import closed_form, collision, fourier, montecarlo
from .domain import Adaptive, FixedTerms, Grid, InitialCondition, MixedDensity, ModelParams
from .errors import DomainError, RandFlightError

METHODS = ("goldstein", "collision", "fourier-full", "fourier-cont", "moments")
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def build_density(
    method: str,
    ic: InitialCondition,
    params: ModelParams,
    t: float,
    harmonics: int | None = None,
    moments: int = 69,
    terms: int | None = None,
    adaptive: bool = False,
) -> MixedDensity:
    if method == "goldstein":
        return closed_form.closed_form_density(t, params, ic)
    if method == "collision":
        trunc = FixedTerms(terms) if terms else Adaptive()
        return collision.collision_density(t, params, ic, trunc)
    if method in ("fourier-full", "fourier-cont", "moments"):
        if ic is not InitialCondition.ISOTROPIC:
            raise UsageError(f"method {method} is only available for the isotropic start")
        kind = {"fourier-full": "full", "fourier-cont": "continuous", "moments": "moments"}[method]
        if adaptive and kind != "continuous":
            raise UsageError("--adaptive applies to fourier-cont only")
        return fourier.fourier_density(t, params, harmonics, kind=kind, M=moments, adaptive=adaptive)
    raise UsageError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def _atoms_line(density: MixedDensity) -> str:
    if not density.atoms:
        return "# atoms: none"
    pairs = ";".join(f"{fmt(a.position)},{fmt(a.weight)}" for a in density.atoms)
    return f"# atoms: {pairs}"


def _params_echo(args, **extra) -> str:
    items = {"lambda": args.lam, "speed": args.speed, "time": getattr(args, "time", None)}
    items.update(extra)
    return " ".join(f"{k}={v}" for k, v in items.items() if v is not None)


def _grid(args, params: ModelParams) -> Grid:
    L = params.front(args.time)
    x_min = -L if args.x_min is None else args.x_min
    x_max = L if args.x_max is None else args.x_max
    return Grid.uniform(args.time, params, x_min, x_max, args.points)


def cmd_eval(args, out: IO[str]) -> None:
    params = ModelParams(args.lam, args.speed)
    ic = InitialCondition(args.ic)
    dens = build_density(args.method, ic, params, args.time, args.harmonics, args.moments, args.terms,
                         args.adaptive)
    grid = _grid(args, params)
    values = dens.pdf(grid.points)
    out.write(f"# randflight eval method={args.method} ic={ic.value} {_params_echo(args)}"
              f" label={dens.label}\n")
    out.write(_atoms_line(dens) + "\n")
    out.write("# columns: x,density\n")
    for x, y in zip(grid.points, values):
        out.write(f"{fmt(x)},{fmt(y)}\n")


def cmd_compare(args, out: IO[str]) -> None:
    params = ModelParams(args.lam, args.speed)
    ic = InitialCondition(args.ic)
    da = build_density(args.method_a, ic, params, args.time, args.harmonics, args.moments, args.terms,
                         args.adaptive)
    db = build_density(args.method_b, ic, params, args.time, args.harmonics, args.moments, args.terms,
                         args.adaptive)
    grid = _grid(args, params)
    a = da.pdf(grid.points)
    b = db.pdf(grid.points)
    diff = np.abs(a - b)
    rel = np.where(b != 0, diff / np.where(b != 0, np.abs(b), 1.0), np.where(diff == 0, 0.0, np.inf))
    out.write(f"# randflight compare a={args.method_a} b={args.method_b} ic={ic.value} "
              f"{_params_echo(args)}\n")
    out.write("# columns: x,value_a,value_b,abs_diff,rel_diff\n")
    for row in zip(grid.points, a, b, diff, rel):
        out.write(",".join(fmt(v) for v in row) + "\n")
    out.write(f"# summary max_abs_diff={fmt(diff.max())} max_rel_diff={fmt(rel.max())}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def cmd_identity(args, out: IO[str]) -> None:
    params = ModelParams(args.lam, args.speed)
    hs = range(args.h_min, args.h_max + 1)
    out.write(f"# randflight identity lambda={args.lam} moments={args.moments} "
              f"h={args.h_min}..{args.h_max} times={','.join(map(str, args.times))}\n")
    out.write("# columns: h,t,M,residual\n")
    for h in hs:
        for t in args.times:
            res = fourier.identity_residual(h, t, params, args.moments, precision=args.precision)
            out.write(f"{h},{fmt(t)},{args.moments},{fmt(res)}\n")
    if args.scan:
        out.write(f"# scan eps_r={args.eps} cap={args.cap}\n")
        out.write("# columns: h,required_M\n")
        for h in hs:
            need = fourier.required_moments(h, args.eps, args.times, params, args.cap, args.precision)
            out.write(f"{h},{need}\n")


def cmd_mc(args, out: IO[str]) -> None:
    params = ModelParams(args.lam, args.speed)
    ic = InitialCondition(args.ic)
    model = montecarlo.Model(args.model)
    res = montecarlo.run_ensemble(
        args.trials, args.time, params, ic, model, args.bins, args.seed, workers=args.workers
    )
    ref = build_density(args.compare_to, ic, params, args.time, args.harmonics, args.moments)
    ks = montecarlo.ks_distance(res, ref)
    plus, minus = res.atom_counts
    L = params.front(args.time)
    out.write(f"# randflight mc model={model.value} ic={ic.value} {_params_echo(args)} "
              f"trials={args.trials} bins={args.bins} seed={args.seed}\n")
    out.write(f"# atoms: {fmt(-L)},{minus};{fmt(L)},{plus}\n")
    out.write("# columns: bin_left,bin_right,count,density\n")
    widths = np.diff(res.bin_edges)
    for lo, hi, c, w in zip(res.bin_edges[:-1], res.bin_edges[1:], res.counts, widths):
        out.write(f"{fmt(lo)},{fmt(hi)},{int(c)},{fmt(c / (res.n_trials * w))}\n")
    out.write(f"# summary ks_distance={fmt(ks)} compare_to={args.compare_to} "
              f"dkw_bound_1e-3={fmt(montecarlo.dkw_bound(args.trials))}\n")
    if args.duality:
        other = montecarlo.Model.SCATTERING if model is montecarlo.Model.REVERSAL else montecarlo.Model.REVERSAL
        res2 = montecarlo.run_ensemble(
            args.trials, args.time, params, ic, other, args.bins, args.seed + 1, workers=args.workers
        )
        d2 = montecarlo.ks_two_sample(res, res2)
        crit = montecarlo.ks_two_sample_critical(args.trials, args.trials)
        out.write(f"# summary two_sample_ks={fmt(d2)} against={other.value} critical_1e-3={fmt(crit)}\n")


def _positive_int(text: str) -> int:
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {val}")
    return val


def _nonneg_int(text: str) -> int:
    val = int(text)
    if val < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {val}")
    return val


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randflight", description="Position density of the 1-d random flight."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", type=float, default=1.0, help="scattering rate")
    common.add_argument("--speed", type=float, default=1.0)
    common.add_argument("--output", "-o", default=None, help="write CSV here instead of stdout")

    series = argparse.ArgumentParser(add_help=False)
    series.add_argument("--harmonics", type=_positive_int, default=None,
                        help="Fourier harmonics H (default 10; starting H with --adaptive)")
    series.add_argument("--adaptive", action="store_true",
                        help="fourier-cont: beyond 0.75vt double H pointwise until successive sums differ by < 1e-6")
    series.add_argument("--moments", type=_positive_int, default=69, help="moment count M")
    series.add_argument("--terms", type=_positive_int, default=None,
                        help="fixed number of collision-series terms (default: adaptive)")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--time", type=float, required=True)
    grid.add_argument("--ic", choices=[ic.value for ic in InitialCondition], default="isotropic")
    grid.add_argument("--x-min", type=float, default=None)
    grid.add_argument("--x-max", type=float, default=None)
    grid.add_argument("--points", type=_positive_int, default=101)

    p = sub.add_parser("eval", parents=[common, series, grid], help="density on a grid")
    p.add_argument("--method", choices=METHODS, default="goldstein")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", parents=[common, series, grid], help="two methods side by side")
    p.add_argument("--method-a", choices=METHODS, required=True)
    p.add_argument("--method-b", choices=METHODS, default="goldstein")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("identity", parents=[common], help="moment-sum identity residuals")
    p.add_argument("--h-min", type=_nonneg_int, default=0)
    p.add_argument("--h-max", type=_nonneg_int, default=15)
    p.add_argument("--times", type=_float_list, default=[0.5, 1.0, 2.0, 5.21, 15.21])
    p.add_argument("--moments", type=_positive_int, default=69)
    p.add_argument("--precision", choices=["extended", "double"], default="extended")
    p.add_argument("--scan", action="store_true", help="also tabulate the minimal M per h")
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--cap", type=_positive_int, default=500)
    p.set_defaults(func=cmd_identity)

    p = sub.add_parser("mc", parents=[common, series], help="Monte Carlo histogram + KS")
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--ic", choices=[ic.value for ic in InitialCondition], default="isotropic")
    p.add_argument("--trials", type=_positive_int, default=10**6)
    p.add_argument("--model", choices=[m.value for m in montecarlo.Model], default="reversal")
    p.add_argument("--bins", type=_positive_int, default=200)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--compare-to", choices=METHODS, default="goldstein")
    p.add_argument("--workers", type=_positive_int, default=None,
                   help=f"threads (default ${montecarlo.WORKERS_ENV} or 1)")
    p.add_argument("--duality", action="store_true",
                   help="also run the other microscopic model and report the two-sample KS")
    p.set_defaults(func=cmd_mc)
    return parser


@contextmanager
def _sink(path: str | None) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="\n") as fh:
            yield fh


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    buf = io.StringIO()
    try:
        args.func(args, buf)
    except (UsageError, DomainError) as exc:
        print(f"randflight: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RandFlightError as exc:
        print(f"randflight: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    # written only after success so a failure never leaves a partial CSV
    with _sink(args.output) as out:
        out.write(buf.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
