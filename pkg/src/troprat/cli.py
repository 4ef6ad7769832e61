"""Command-line interface: ``troprat <subcommand> ...``.

Exit codes: 0 success, 2 bad input (unreadable or malformed files, bad
flags), 1 internal failure.
"""

import argparse
import json
import sys

import numpy as np

from . import data
from .poly import ExponentSet
from .ratfit import FitConfig, alternating_fit, certificate, loss
from .relu import rational_to_relu


class InputError(Exception):
    pass


def _degrees(text):
    try:
        ds = [int(t) for t in text.split(",")]
    except ValueError:
        raise InputError(f"bad degree list {text!r}") from None
    if any(d < 0 for d in ds):
        raise InputError("degrees must be nonnegative")
    return ds


def _grid_for(degrees, n):
    if len(degrees) == 1 and n > 1:
        degrees = degrees * n
    if len(degrees) != n:
        raise InputError(f"{len(degrees)} degrees given for {n}-dimensional data")
    return ExponentSet.grid(degrees)


def _degree_range(text):
    lo, sep, hi = text.partition("..")
    try:
        lo, hi = int(lo), int(hi) if sep else int(lo)
    except ValueError:
        raise InputError(f"bad degree range {text!r}, expected A..B") from None
    if lo < 0 or hi < lo:
        raise InputError(f"bad degree range {text!r}")
    return list(range(lo, hi + 1))


def _scales(text):
    parts = text.split(":")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError):
        raise InputError(f"bad scale grid {text!r}, expected LO:HI:COUNT") from None
    if len(parts) != 3 or count < 1 or not (0 < lo and np.isfinite(hi)):
        raise InputError(f"bad scale grid {text!r}")
    return np.linspace(lo, hi, count)


def _config(args, scale=1.0):
    if args.max_iters < 1:
        raise InputError("--max-iters must be at least 1")
    if not args.tol >= 0:
        raise InputError("--tol must be nonnegative")
    if not (np.isfinite(scale) and scale > 0):
        raise InputError("--scale must be positive")
    return FitConfig(k_max=args.max_iters, eta_tol=args.tol, scale_c=scale)


def _load(path, require_targets=True):
    try:
        return data.read_csv(path, require_targets=require_targets)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None


def _load_model(path):
    try:
        return data.load_model(path)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None


def _rel(err, y):
    scale = float(np.max(np.abs(y)))
    return err / scale if scale > 0 else float("nan")


def cmd_fit(args):
    degrees = _degrees(args.degree)
    cfg = _config(args, args.scale)
    ds = _load(args.data)
    W = _grid_for(degrees, ds.n)
    model, trace = alternating_fit(ds.points, ds.targets, W, cfg)
    prov = {
        "config": {"k_max": cfg.k_max, "eta_tol": cfg.eta_tol, "scale_c": cfg.scale_c},
        "trace": {"iterations": trace.iterations, "e0": trace.e0,
                  "e_final": trace.e_final, "termination": trace.termination},
    }
    if args.model:
        data.save_model(model, args.model, prov)
    if args.trace:
        data.write_trace(trace, args.trace)
    print(f"e_final={data.fmt(trace.e_final)} relative={data.fmt(_rel(trace.e_final, ds.targets))} "
          f"iterations={trace.iterations} termination={trace.termination}")
    return 0


def cmd_sweep_degree(args):
    degrees = _degree_range(args.degrees)
    cfg = _config(args)
    ds = _load(args.data)
    rows = []
    for d in degrees:
        _, trace = alternating_fit(ds.points, ds.targets, ExponentSet.grid([d] * ds.n), cfg)
        rows.append((d, trace.e_final, trace.iterations))
        print(f"degree={d} e_final={data.fmt(trace.e_final)} iterations={trace.iterations}")
    data.write_table(args.out, ["degree", "e_final", "iters"], rows)
    return 0


def cmd_sweep_scale(args):
    scales = _scales(args.scales)
    degrees = _degrees(args.degree)
    _config(args)
    ds = _load(args.data)
    W = _grid_for(degrees, ds.n)
    rows = []
    for c in scales:
        _, trace = alternating_fit(ds.points, ds.targets, W, _config(args, float(c)))
        rows.append((float(c), trace.e_final))
        print(f"c={data.fmt(c)} e_final={data.fmt(trace.e_final)}")
    data.write_table(args.out, ["c", "e_final"], rows)
    best = min(rows, key=lambda r: r[1])
    print(f"argmin c={data.fmt(best[0])} e_final={data.fmt(best[1])}")
    return 0


def cmd_gen(args):
    kind = args.kind
    truth = None
    if kind == "sine":
        ds = data.gen_sine(args.n_points or 200, (args.x_min, args.x_max), args.noise, args.seed)
    elif kind == "peaks":
        ds = data.gen_peaks(args.grid_side)
    elif kind == "g6":
        ds = data.gen_g6(args.n_points or 10000, args.seed)
    elif kind == "h10":
        ds = data.gen_h10(args.n_points or 10000, args.seed)
    else:
        ds, truth = data.gen_tropical_rational(args.dim, args.degree, args.n_points or 1000,
                                               seed=args.seed)
    data.write_csv(ds, args.out)
    if truth is not None:
        truth_path = args.truth or (args.out.rsplit(".", 1)[0] + ".truth.json")
        data.save_model(truth, truth_path, {"generator": {
            "kind": kind, "dim": args.dim, "degree": args.degree, "seed": args.seed}})
        print(f"wrote {args.out} and {truth_path}")
    else:
        print(f"wrote {args.out} ({len(ds)} rows)")
    return 0


def cmd_predict(args):
    model, _ = _load_model(args.model)
    ds = _load(args.data, require_targets=False)
    if ds.n != model.exponents.n:
        raise InputError(f"model expects {model.exponents.n} inputs, data has {ds.n}")
    yhat = model(ds.points)
    if args.out:
        data.write_table(args.out, ["yhat"], [(v,) for v in yhat])
    if ds.targets is not None:
        err = float(np.max(np.abs(yhat - ds.targets)))
        print(f"linf_error={data.fmt(err)} relative={data.fmt(_rel(err, ds.targets))}")
    return 0


def cmd_diagnose(args):
    model, _ = _load_model(args.model)
    ds = _load(args.data)
    if ds.n != model.exponents.n:
        raise InputError(f"model expects {model.exponents.n} inputs, data has {ds.n}")
    cert = certificate(model, ds.points, ds.targets, args.tol)
    print(json.dumps({
        "loss": loss(model, ds.points, ds.targets),
        "tol": cert.tol,
        "on_hypersurface": cert.on_hypersurface,
        "attaining_points": cert.attaining_points,
        "certificate_holds": cert.holds,
    }))
    return 0


def cmd_to_relu(args):
    model, _ = _load_model(args.model)
    net = rational_to_relu(model)
    net.to_json(args.out)
    widths = "->".join(str(w) for w in [net.input_dim] + net.hidden_widths + [1])
    print(f"wrote {args.out} (layers {widths})")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="troprat", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def fit_flags(p):
        p.add_argument("--max-iters", type=int, default=1000)
        p.add_argument("--tol", type=float, default=1e-12)

    p = sub.add_parser("fit", help="alternating fit of a tropical rational function")
    p.add_argument("--data", required=True)
    p.add_argument("--degree", required=True, help="d1,...,dn (or one value for all)")
    fit_flags(p)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--model")
    p.add_argument("--trace")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sweep-degree", help="one fit per degree A..B")
    p.add_argument("--data", required=True)
    p.add_argument("--degrees", required=True)
    p.add_argument("--out", required=True)
    fit_flags(p)
    p.set_defaults(func=cmd_sweep_degree)

    p = sub.add_parser("sweep-scale", help="one fit per input scale")
    p.add_argument("--data", required=True)
    p.add_argument("--scales", required=True, help="LO:HI:COUNT")
    p.add_argument("--degree", required=True)
    p.add_argument("--out", required=True)
    fit_flags(p)
    p.set_defaults(func=cmd_sweep_scale)

    p = sub.add_parser("gen", help="write a synthetic dataset")
    p.add_argument("--kind", required=True, choices=["sine", "peaks", "g6", "h10", "tropical"])
    p.add_argument("--out", required=True)
    p.add_argument("--n-points", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--x-min", type=float, default=-1.0)
    p.add_argument("--x-max", type=float, default=12.0)
    p.add_argument("--grid-side", type=int, default=49)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--truth", help="ground-truth model path (kind=tropical)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("predict", help="evaluate a model on data")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("diagnose", help="loss and nondifferentiability certificate")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("to-relu", help="export a model as a ReLU network")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_to_relu)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, data.ParseError, ValueError) as exc:
        print(f"troprat: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"troprat: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"troprat: internal error: {exc!r}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
