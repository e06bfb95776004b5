"""Command-line front end.

Exit codes: 0 success, 1 analytic failure (e.g. a failed system check),
2 usage or configuration error.
"""

import argparse
import csv
import math
import sys
import warnings

import numpy as np

from . import experiments, kalman, simgen
from .analysis import ExtremaMode, Tracker, diagnose, forecast_extrema
from .matkernel import DEFAULT_RANK_TOL
from .model import GVariant, StateSpaceModel, TvlapConfig, ModelWarning, make_tvlap
from .verify import check_system

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x):
    return format(float(x), ".17g")


def parse_q(text):
    parts = [p for p in str(text).split(",") if p.strip()]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"--q must be a number or comma-separated numbers, got {text!r}")
    if not values:
        raise UsageError("--q is empty")
    return values[0] if len(values) == 1 else values


def read_config_file(path):
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    values = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value")
                key, value = (s.strip() for s in line.split("=", 1))
                values[key.lstrip("-").replace("-", "_")] = value
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    return values


def read_series_csv(path):
    """Return ``(header, columns)`` from a headed numeric CSV."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise UsageError(f"{path}: missing header row")
        header = [h.strip() for h in header]
        rows = []
        for lineno, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise UsageError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise UsageError(f"{path}:{lineno}: non-numeric field")
            if not all(math.isfinite(v) for v in vals):
                raise UsageError(f"{path}:{lineno}: non-finite value")
            rows.append(vals)
    if not rows:
        raise UsageError(f"{path}: no data rows")
    data = np.array(rows)
    return header, {h: data[:, i] for i, h in enumerate(header)}


def _time_and_value(path):
    header, cols = read_series_csv(path)
    if "time" not in cols:
        raise UsageError(f"{path}: needs a 'time' column")
    t = cols["time"]
    if len(t) > 1 and np.any(np.diff(t) <= 0):
        bad = int(np.argmax(np.diff(t) <= 0)) + 3
        raise UsageError(f"{path}:{bad}: time is not strictly increasing")
    for name in ("value", "x"):
        if name in cols:
            return t, cols[name], cols.get("truth")
    others = [h for h in header if h != "time"]
    if not others:
        raise UsageError(f"{path}: no value column")
    return t, cols[others[0]], cols.get("truth")


def write_csv(path, header, rows):
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}")
    with fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def config_from_args(args):
    try:
        return TvlapConfig(
            K=args.k, T=args.t, g_variant=GVariant(args.g), q=parse_q(args.q),
            r=args.r, epsilon=args.epsilon, infinity=args.infinity,
        )
    except ValueError as exc:
        raise UsageError(str(exc))


def _model(args, config):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ModelWarning)
        model = make_tvlap(config)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return model


def _want_extrema(args, config):
    if args.extrema and config.K < 2:
        raise UsageError(f"extrema detection needs --k >= 2, got {config.K}")
    return config.K >= 2 if args.extrema is None else args.extrema


def cmd_simulate(args):
    if args.scenario in ("sine", "sine_exp"):
        gen = simgen.gen_sine if args.scenario == "sine" else simgen.gen_sine_exp
        sc = gen(args.seed)
        rows = [[fmt(a), fmt(b), fmt(c), fmt(d)] for a, b, c, d in zip(sc.t, sc.x, sc.truth, sc.truth_d1)]
        write_csv(args.out, ["time", "x", "truth", "truth_d1"], rows)
    elif args.scenario == "fault":
        if args.jumps < 0:
            raise UsageError("--jumps must be non-negative")
        chans = simgen.gen_fault_channels(args.seed, args.jumps, args.mag)
        rows = [[fmt(t)] + [fmt(c.x[i]) for c in chans] for i, t in enumerate(chans[0].t)]
        write_csv(args.out, ["time"] + [c.name for c in chans], rows)
    else:
        raise UsageError(f"unknown scenario {args.scenario!r}")
    return EXIT_OK


def cmd_filter(args):
    config = config_from_args(args)
    t, y, truth = _time_and_value(args.input)
    extrema = _want_extrema(args, config)
    model = _model(args, config)
    tracker = Tracker(model, epsilon=config.epsilon, mode=args.mode, extrema=extrema,
                      infinity=config.infinity)
    rows, fhat, events = [], [], 0
    for ti, yi in zip(t, y):
        out = tracker.update(yi)
        kind = out.event.kind.value if out.event else ""
        events += bool(out.event)
        fhat.append(out.fhat)
        rows.append([str(out.n), fmt(ti), fmt(out.fhat)] + [fmt(d) for d in out.derivatives]
                    + [fmt(out.p00), kind])
    header = ["n", "time", "fhat"] + [f"d{i}" for i in range(1, config.K + 1)] + ["p00", "event"]
    write_csv(args.out, header, rows)
    print(f"samples: {len(rows)}")
    print(f"events: {events}")
    if truth is not None:
        print(f"trend_mse: {fmt(np.mean((np.array(fhat) - truth) ** 2))}")
    return EXIT_OK


def cmd_forecast(args):
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    config = config_from_args(args)
    t, y, _ = _time_and_value(args.input)
    extrema = _want_extrema(args, config)
    model = _model(args, config)
    tracker = Tracker(model, epsilon=config.epsilon, mode=args.mode, extrema=False,
                      infinity=config.infinity)
    for yi in y:
        tracker.update(yi)
    state = tracker.state
    points = kalman.forecast(model, state, args.steps)
    events = {}
    if extrema:
        events = {e.n: e.kind.value
                  for e in forecast_extrema(model, state, args.steps, config.epsilon, args.mode)}
    dt = float(t[1] - t[0]) if len(t) > 1 else 1.0
    rows = [[str(p.k), fmt(t[-1] + p.k * dt), fmt(p.xhat[0, 0]), fmt(p.p[0, 0]),
             events.get(state.n + p.k, "")] for p in points]
    write_csv(args.out, ["k", "time", "mean", "p00", "event"], rows)
    print(f"steps: {len(rows)}")
    print(f"predicted_events: {len(events)}")
    return EXIT_OK


def cmd_compare(args):
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    models = tuple(m.strip() for m in args.models.split(",") if m.strip())
    unknown = set(models) - set(experiments.MODEL_NAMES)
    if not models or unknown:
        raise UsageError(f"--models must be a subset of {','.join(experiments.MODEL_NAMES)}")
    config = experiments.COMPARE_CONFIG
    overrides = {k: getattr(args, k) for k in ("k", "t", "g", "q", "r") if getattr(args, k) is not None}
    if overrides:
        try:
            config = TvlapConfig(
                K=overrides.get("k", config.K), T=overrides.get("t", config.T),
                g_variant=GVariant(overrides.get("g", config.g_variant)),
                q=parse_q(overrides["q"]) if "q" in overrides else config.q,
                r=overrides.get("r", config.r),
            )
        except ValueError as exc:
            raise UsageError(str(exc))
    summary = experiments.compare(args.trials, models, args.seed, config, args.steps or experiments.HORIZON)
    rows = [[m, str(t.seed), fmt(t.est_mse[m]), fmt(t.pred_mse[m])] for t in summary.trials for m in models]
    print(f"{'model':<8}{'best_est':>14}{'best_pred':>14}{'mean_est':>14}{'mean_pred':>14}")
    for m in models:
        be, bp = summary.best(m)
        me, mp = summary.mean(m)
        rows += [[m, "best", fmt(be), fmt(bp)], [m, "mean", fmt(me), fmt(mp)]]
        print(f"{m:<8}{be:>14.4f}{bp:>14.4f}{me:>14.4f}{mp:>14.4f}")
    if args.out:
        write_csv(args.out, ["model", "trial", "est_mse", "pred_mse"], rows)
    return EXIT_OK


def cmd_diagnose(args):
    if not args.ratio > 1:
        raise UsageError("--ratio must exceed 1")
    header, cols = read_series_csv(args.input)
    names = [h for h in header if h != "time"]
    if len(names) < 2:
        raise UsageError("diagnosis needs at least two value columns")
    config = config_from_args(args)
    if config.K < 1:
        raise UsageError("diagnosis needs --k >= 1")
    result = diagnose({n: cols[n] for n in names}, _model(args, config), args.ratio, config.infinity)
    rows = []
    for n in names:
        d = result[n]
        rows.append([n, fmt(d.variance), "1" if d.faulty else "0"])
        print(f"{n}: variance={d.variance:.6g}{'  FAULTY' if d.faulty else ''}")
    if args.out:
        write_csv(args.out, ["channel", "variance", "faulty"], rows)
    return EXIT_OK


def cmd_check(args):
    config = config_from_args(args)
    model = make_tvlap(config, check=False)
    if args.zero_g:
        model = StateSpaceModel(model.phi, model.h, np.zeros_like(model.g), model.q, model.r)
    rep = check_system(model, args.tol, equilibrate=not args.no_equilibrate)
    print(f"dim: {rep.dim}")
    print(f"observable: {str(rep.observable).lower()} (rank {rep.obs_rank})")
    print(f"controllable: {str(rep.controllable).lower()} (rank {rep.ctrl_rank})")
    print(f"phi_power_max_err: {rep.phi_power_max_err:.3e}")
    return EXIT_OK if rep.observable and rep.controllable else EXIT_FAIL


def _model_flags(p, defaults=True):
    d = (lambda v: v) if defaults else (lambda v: None)
    p.add_argument("--k", type=int, default=d(4), help="polynomial order K")
    p.add_argument("--t", type=float, default=d(0.1), help="model time gap T")
    p.add_argument("--g", choices=[v.value for v in GVariant], default=d("g1"))
    p.add_argument("--q", default=d("0.0001"), help="scalar or comma-separated diagonal")
    p.add_argument("--r", type=float, default=d(1.0))
    if defaults:
        p.add_argument("--epsilon", type=float, default=1e-6)
        p.add_argument("--infinity", type=float, default=1e5)


def build_parser():
    parser = argparse.ArgumentParser(prog="tvlap", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value file supplying flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a synthetic scenario as CSV")
    p.add_argument("--scenario", required=True, help="sine | sine_exp | fault")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--jumps", type=int, default=5)
    p.add_argument("--mag", type=float, default=5.0)
    p.set_defaults(func=cmd_simulate)

    for name, func, helptext in (("filter", cmd_filter, "track trend, derivatives and extrema"),
                                 ("forecast", cmd_forecast, "filter then forecast ahead")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--out", required=True)
        _model_flags(p)
        p.add_argument("--mode", choices=[m.value for m in ExtremaMode], default="zerocross")
        p.add_argument("--extrema", action=argparse.BooleanOptionalAction, default=None)
        if name == "forecast":
            p.add_argument("--steps", type=int, default=200)
        p.set_defaults(func=func)

    p = sub.add_parser("compare", help="TVLAP vs Holt vs Level on sine + exp")
    p.add_argument("--models", default="tvlap,holt,level")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=None, help="prediction horizon")
    p.add_argument("--out")
    _model_flags(p, defaults=False)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("diagnose", help="flag channels with large derivative variance")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.add_argument("--ratio", type=float, default=3.0)
    _model_flags(p)
    p.set_defaults(func=cmd_diagnose, k=4, t=0.001, g="g1", q="250000", r=0.03)

    p = sub.add_parser("check", help="observability/controllability report")
    _model_flags(p)
    p.add_argument("--tol", type=float, default=DEFAULT_RANK_TOL)
    p.add_argument("--no-equilibrate", action="store_true", help="rank-test the raw matrices")
    p.add_argument("--zero-g", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_check)
    return parser


def _apply_config_file(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config_file(known.config)
    # subparser defaults are consulted after the top-level ones
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            dests = {a.dest: a for a in sp._actions}
            sp.set_defaults(**{k: (dests[k].type(v) if dests[k].type else v)
                               for k, v in values.items() if k in dests})


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
