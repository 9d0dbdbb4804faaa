"""Command-line workbench: evaluate, smooth, verify, train, sweep, benchmark.

Diagnostics go to stderr and data to stdout (or --out), so every subcommand
pipes cleanly.  Errors exit nonzero with a single ``error: ...`` line.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import bench as bench_mod
from .activations import ActivationSpec, berlu_dalpha, eval_dx, eval_forward
from .analysis import correlation_probe, estimate_lipschitz, fit_decay, grad_check
from .bernstein import PiecewiseLinear, mollify
from .data import gen_spirals, gen_two_moons, load_idx
from .trainer import TrainConfig, init_net, train

EPS_GRID = (1e-4, 1e-3, 1e-2, 1e-1, 0.2, 0.5, 1.0, 5.0, 10.0)

_ACT_NAMES = (
    "berlu", "leaky-relu", "relu", "prelu", "gelu", "elu", "celu",
    "silu", "mish", "identity",
)


def _make_spec(args) -> ActivationSpec:
    kind = args.act.replace("-", "_")
    if kind == "berlu":
        return ActivationSpec.berlu(args.alpha, args.eps)
    if kind in ("leaky_relu", "prelu"):
        return ActivationSpec(kind, alpha=args.alpha)
    if kind in ("elu", "celu"):
        return ActivationSpec(kind, scale=args.scale)
    return ActivationSpec(kind)


def _add_act_flags(p, default_eps=0.01):
    p.add_argument("--act", required=True, choices=_ACT_NAMES,
                   help="activation name")
    p.add_argument("--alpha", type=float, default=0.01,
                   help="negative-region slope for berlu/leaky-relu/prelu")
    p.add_argument("--eps", type=float, default=default_eps,
                   help="berlu transition half-width")
    p.add_argument("--scale", type=float, default=1.0,
                   help="scale parameter for elu/celu")


def _out_stream(args):
    return open(args.out, "w") if args.out else sys.stdout


def _emit(args, text: str):
    out = _out_stream(args)
    out.write(text)
    if out is not sys.stdout:
        out.close()


def _parse_range(text: str) -> np.ndarray:
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise ValueError(f"bad range {text!r}; expected lo:hi:step")
    if step <= 0 or hi < lo:
        raise ValueError(f"bad range {text!r}; need lo <= hi and step > 0")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


# -- subcommands -------------------------------------------------------------


def cmd_eval(args) -> int:
    spec = _make_spec(args)
    if args.range:
        xs = _parse_range(args.range)
    elif args.x is not None:
        xs = np.array([float(v) for v in args.x.split(",")])
    else:
        raise ValueError("eval needs --x or --range")
    f = eval_forward(spec, xs)
    df = eval_dx(spec, xs)
    da = None
    if spec.kind in ("berlu", "prelu"):
        if spec.kind == "berlu":
            da = [berlu_dalpha(float(v), spec.berlu_params) for v in xs]
        else:
            da = [min(float(v), 0.0) for v in xs]
    lines = []
    if args.csv:
        header = "x,f,df" + (",dalpha" if da is not None else "")
        lines.append(header)
        for i, v in enumerate(xs):
            row = f"{float(v)!r},{float(f[i])!r},{float(df[i])!r}"
            if da is not None:
                row += f",{float(da[i])!r}"
            lines.append(row)
    else:
        header = f"{'x':>14} {'f(x)':>14} {'df/dx':>14}"
        if da is not None:
            header += f" {'df/dalpha':>14}"
        lines.append(header)
        for i, v in enumerate(xs):
            row = f"{v:>14.6g} {f[i]:>14.6g} {df[i]:>14.6g}"
            if da is not None:
                row += f" {da[i]:>14.6g}"
            lines.append(row)
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_mollify(args) -> int:
    if args.pwl.strip().startswith("{"):
        doc = json.loads(args.pwl)
    else:
        with open(args.pwl) as fh:
            doc = json.load(fh)
    pwl = PiecewiseLinear(
        tuple(doc["breakpoints"]), tuple(doc["slopes"]),
        float(doc.get("value_at_zero", 0.0)),
    )
    sm = mollify(pwl, args.eps, args.degree)
    lines = []
    for tr in sm.transitions:
        beta = ",".join(repr(b) for b in tr.control_points)
        lines.append(f"transition,{tr.center!r},{tr.epsilon!r},{tr.degree},{beta}")
    if args.samples > 0:
        if pwl.breakpoints:
            lo = pwl.breakpoints[0] - 4 * args.eps
            hi = pwl.breakpoints[-1] + 4 * args.eps
        else:
            lo, hi = -1.0, 1.0
        xs = np.linspace(lo, hi, args.samples)
        ys = sm(xs)
        lines.append("x,f")
        lines.extend(f"{float(x)!r},{float(y)!r}" for x, y in zip(xs, ys))
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_lipschitz(args) -> int:
    spec = _make_spec(args)
    lo, hi = (float(v) for v in args.range.split(":"))
    rep = estimate_lipschitz(spec, (lo, hi), args.coarse_points, args.refine_iters)
    if args.json:
        _emit(args, json.dumps(rep.to_dict(), indent=2) + "\n")
    else:
        exact = f" exact={rep.exact!r}" if rep.exact is not None else ""
        _emit(args, f"{spec.label()} L~={rep.estimate!r} at x={rep.argmax_x!r}"
                    f"{exact} expansive={rep.expansive}\n")
    return 0


def cmd_gradcheck(args) -> int:
    spec = _make_spec(args)
    lo, hi = (float(v) for v in args.range.split(":"))
    xs = np.linspace(lo, hi, args.points)
    # drop branch points of piecewise-defined activations, where central
    # differences lose their quadratic accuracy
    if spec.kind in ("relu", "leaky_relu", "prelu", "elu", "celu"):
        xs = xs[np.abs(xs) > 10 * args.step]
    if spec.kind == "berlu":
        near = (np.abs(xs - spec.epsilon) < 10 * args.step) | (
            np.abs(xs + spec.epsilon) < 10 * args.step
        )
        xs = xs[~near]
    rep = grad_check(spec, xs, args.step)
    if args.json:
        _emit(args, json.dumps(rep.to_dict(), indent=2) + "\n")
    else:
        _emit(args, f"{spec.label()} max_rel_error={rep.max_rel_error!r} "
                    f"worst_x={rep.worst_x!r} step={rep.step!r}\n")
    return 0


def cmd_corr_probe(args) -> int:
    spec = _make_spec(args)
    trace = correlation_probe(
        spec, args.depth, args.width, args.trials,
        c0=args.c0, target_q=args.q, seed=args.seed,
    )
    fit = None
    if args.fit:
        lo, hi = (int(v) for v in args.fit.split(":"))
        fit = fit_decay(trace, (lo, hi))
        print(
            f"fit over layers [{lo},{hi}]: exponent={fit.exponent:.4f} "
            f"coefficient={fit.coefficient:.4f} r2={fit.r_squared:.4f}",
            file=sys.stderr,
        )
    if args.json:
        doc = trace.to_dict()
        if fit is not None:
            doc["fit"] = fit.to_dict()
        _emit(args, json.dumps(doc, indent=2) + "\n")
    else:
        lines = ["layer,one_minus_c"]
        lines.extend(
            f"{i + 1},{float(v)!r}" for i, v in enumerate(trace.one_minus_c)
        )
        _emit(args, "\n".join(lines) + "\n")
    return 0


def _make_dataset(args):
    if args.dataset == "two-moons":
        return gen_two_moons(args.n, args.noise, seed=args.data_seed)
    if args.dataset == "spirals":
        return gen_spirals(args.n, args.turns, args.noise, seed=args.data_seed)
    if args.dataset == "idx":
        if not (args.images and args.labels):
            raise ValueError("idx dataset needs --images and --labels")
        return load_idx(args.images, args.labels, val_fraction=0.2,
                        seed=args.data_seed)
    raise ValueError(f"unknown dataset {args.dataset}")


def _add_dataset_flags(p):
    p.add_argument("--dataset", choices=("two-moons", "spirals", "idx"),
                   default="spirals")
    p.add_argument("--n", type=int, default=1200, help="synthetic sample count")
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--turns", type=float, default=1.75, help="spiral turns")
    p.add_argument("--data-seed", type=int, default=0)
    p.add_argument("--images", help="IDX image file")
    p.add_argument("--labels", help="IDX label file")
    p.add_argument("--dims", default="2,32,32,2",
                   help="comma-separated layer sizes")


def _load_config(args) -> TrainConfig:
    cfg = TrainConfig.from_json(args.config) if args.config else TrainConfig()
    if args.seed is not None:
        cfg = TrainConfig(**{**cfg.to_dict(), "seed": args.seed})
    return cfg


def _run_train(spec, dims, dataset, cfg):
    net = init_net(dims, spec, seed=cfg.seed)
    return train(net, dataset, cfg)


def cmd_train(args) -> int:
    spec = _make_spec(args)
    cfg = _load_config(args)
    dims = [int(d) for d in args.dims.split(",")]
    dataset = _make_dataset(args)
    _, report = _run_train(spec, dims, dataset, cfg)
    last = report.per_epoch[-1]
    print(
        f"done: train_acc={last['train_acc']:.4f} val_acc={last['val_acc']:.4f} "
        f"wall={report.wall_time_s:.1f}s",
        file=sys.stderr,
    )
    if args.metrics_csv:
        report.write_csv(args.metrics_csv)
    _emit(args, report.to_json() + "\n")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    dims = [int(d) for d in args.dims.split(",")]
    eps_values = [float(v) for v in args.eps_list.split(",")] if args.eps_list \
        else list(EPS_GRID)
    seeds = [cfg.seed + i for i in range(args.seeds)]
    lines = ["epsilon,mean_acc,std_acc"]
    for eps in eps_values:
        accs = []
        for s in seeds:
            dataset = _make_dataset(
                argparse.Namespace(**{**vars(args), "data_seed": s})
            )
            run_cfg = TrainConfig(**{**cfg.to_dict(), "seed": s})
            spec = ActivationSpec.berlu(args.alpha, eps)
            _, report = _run_train(spec, dims, dataset, run_cfg)
            accs.append(report.per_epoch[-1]["val_acc"])
            print(f"eps={eps:g} seed={s}: val_acc={accs[-1]:.4f}",
                  file=sys.stderr)
        accs = np.asarray(accs)
        lines.append(f"{eps!r},{float(accs.mean())!r},{float(accs.std())!r}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_bench(args) -> int:
    if args.acts:
        specs = []
        for name in args.acts.split(","):
            ns = argparse.Namespace(act=name, alpha=args.alpha, eps=args.eps,
                                    scale=args.scale)
            specs.append(_make_spec(ns))
    else:
        specs = [
            ActivationSpec.berlu(args.alpha, args.eps),
            ActivationSpec.gelu(),
            ActivationSpec.relu(),
            ActivationSpec.leaky_relu(args.alpha),
            ActivationSpec.elu(),
            ActivationSpec.celu(),
            ActivationSpec.silu(),
            ActivationSpec.mish(),
            ActivationSpec.identity(),
        ]
    results = bench_mod.bench_suite(
        specs, args.len, args.reps, seed=args.seed or 0, dtype=args.dtype
    )
    _emit(args, bench_mod.results_to_csv(results))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="berlu",
        description="Bernstein-smoothed activation workbench",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        help="emit JSON where supported")
    common.add_argument("--csv", action="store_true",
                        help="emit CSV where supported")
    common.add_argument("--seed", type=int, default=None,
                        help="override run seed")
    common.add_argument("--out",
                        help="write data output to this path instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    def add_parser(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    pe = add_parser("eval", help="tabulate f, f', and df/dalpha")
    _add_act_flags(pe)
    pe.add_argument("--x", help="comma-separated evaluation points")
    pe.add_argument("--range", help="lo:hi:step evaluation grid")
    pe.set_defaults(func=cmd_eval)

    pm = add_parser("mollify", help="smooth a piecewise-linear JSON spec")
    pm.add_argument("--pwl", required=True,
                    help="JSON file or inline JSON with breakpoints/slopes/value_at_zero")
    pm.add_argument("--eps", type=float, default=0.01)
    pm.add_argument("--degree", type=int, default=2)
    pm.add_argument("--samples", type=int, default=0,
                    help="also emit this many dense samples for plotting")
    pm.set_defaults(func=cmd_mollify)

    pl = add_parser("lipschitz", help="estimate sup |f'|")
    _add_act_flags(pl)
    pl.add_argument("--range", default="-10:10")
    pl.add_argument("--coarse-points", type=int, default=100_001)
    pl.add_argument("--refine-iters", type=int, default=80)
    pl.set_defaults(func=cmd_lipschitz)

    pg = add_parser("gradcheck", help="analytic vs finite-difference derivative")
    _add_act_flags(pg)
    pg.add_argument("--range", default="-5:5")
    pg.add_argument("--points", type=int, default=10_001)
    pg.add_argument("--step", type=float, default=1e-5)
    pg.set_defaults(func=cmd_gradcheck)

    pc = add_parser("corr-probe", help="depth correlation decay experiment")
    _add_act_flags(pc)
    pc.add_argument("--depth", type=int, default=64)
    pc.add_argument("--width", type=int, default=1024)
    pc.add_argument("--trials", type=int, default=32)
    pc.add_argument("--c0", type=float, default=0.5)
    pc.add_argument("--q", type=float, default=1.0)
    pc.add_argument("--fit", help="lo:hi layer range to fit a power law")
    pc.set_defaults(func=cmd_corr_probe)

    pt = add_parser("train", help="train a dense net, emit RunReport JSON")
    _add_act_flags(pt)
    _add_dataset_flags(pt)
    pt.add_argument("--config", help="TrainConfig JSON file")
    pt.add_argument("--metrics-csv", help="also write per-epoch CSV here")
    pt.set_defaults(func=cmd_train)

    ps = add_parser("sweep", help="accuracy vs transition width epsilon")
    _add_dataset_flags(ps)
    ps.add_argument("--alpha", type=float, default=0.01)
    ps.add_argument("--eps-list", help="comma-separated epsilon grid")
    ps.add_argument("--seeds", type=int, default=3, help="trials per epsilon")
    ps.add_argument("--config", help="TrainConfig JSON file")
    ps.set_defaults(func=cmd_sweep)

    pb = add_parser("bench", help="elementwise kernel timings")
    pb.add_argument("--len", type=int, default=10_000_000)
    pb.add_argument("--reps", type=int, default=20)
    pb.add_argument("--acts", help="comma-separated activation names")
    pb.add_argument("--alpha", type=float, default=0.01)
    pb.add_argument("--eps", type=float, default=0.01)
    pb.add_argument("--scale", type=float, default=1.0)
    pb.add_argument("--dtype", choices=("float64", "float32"), default="float64")
    pb.set_defaults(func=cmd_bench)

    return p


# flags whose value may legitimately start with '-' (e.g. --range -1:1:0.5)
_DASH_VALUE_FLAGS = ("--range", "--x", "--eps-list", "--fit")


def _merge_dash_values(argv):
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _DASH_VALUE_FLAGS and i + 1 < len(argv) \
                and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_merge_dash_values(list(argv)))
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except Exception as e:  # one-line machine-parseable diagnostics
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
