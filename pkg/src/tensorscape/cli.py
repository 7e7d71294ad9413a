"""Command-line entry point.

Subcommands: ``experiment`` (sparse-noise recovery sweep), ``landscape``
(grid verification of the tensor objectives), ``stationarity`` (Clarke
report for one point), ``converge`` (compact-convergence table), ``gallery``
(evaluate / export / verify the example functions).

Every run prints its resolved configuration first.  Results go to ``--out``
(CSV or JSON chosen by extension) with floats at 17 significant digits;
``--plot`` renders a PNG figure next to the delimited output.  Exit codes:
0 success, 1 verification failure, 2 usage error.  All numeric work lives in
the library modules; this module only parses, dispatches, and formats.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import experiments, gallery, landscape, plotting, stationarity
from .objectives import TensorProblem, eval_f1, eval_finf, eval_fp, eval_hp
from .solvers import SolverConfig, default_max_iters


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}")


def _ints(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _plain(value):
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _print_config(name: str, items: dict) -> None:
    print(f"[{name}] resolved config:")
    for key, value in items.items():
        print(f"  {key} = {_plain(value)}")


def _plot_path(args) -> Path | None:
    if args.plot is None:
        return None
    if args.plot != "auto":
        return Path(args.plot)
    if not getattr(args, "out", None):
        raise SystemExit2("--plot without a path requires --out to derive one from")
    return Path(args.out).with_suffix(".png")


class SystemExit2(SystemExit):
    def __init__(self, message: str):
        print(f"error: {message}", file=sys.stderr)
        super().__init__(2)


def _write_rows_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [format(v, ".17g") if isinstance(v, float) else v for v in row]
            )


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------- experiment


def _load_config_file(path) -> dict:
    """Flat key=value file; blank lines and '#' comments ignored."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit2(f"bad config line (expected key=value): {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _cmd_experiment(args) -> int:
    if args.config:
        file_cfg = _load_config_file(args.config)
        known = {
            "n": int, "trials": int, "seed": int, "max_iters": int,
            "noise_std": float, "lr": float, "momentum": float,
            "batch_fraction": float, "init_std": float, "early_stop": float,
            "success_threshold": float,
            "noisy": lambda s: [int(v) for v in s.split(",")],
            "modes": lambda s: s.split(","),
        }
        for key, value in file_cfg.items():
            if key not in known:
                raise SystemExit2(f"unknown config key {key!r}")
            # CLI flags take precedence over file values.
            if getattr(args, key, None) in (None, parser_defaults().get(key)):
                setattr(args, key, known[key](value))

    n = args.n
    trials = args.trials
    noisy = args.noisy if args.noisy is not None else [0, 5, 10, 40, 100, 400]
    if args.paper_scale:
        trials = 100
        if args.noisy is None:
            noisy = sorted({int(round(v)) for v in np.linspace(0, n * n, 11)})
    noisy = sorted(int(k) for k in noisy)
    max_iters = args.max_iters or default_max_iters(n)

    solver = SolverConfig(
        learning_rate=args.lr,
        momentum=args.momentum,
        max_iters=max_iters,
        batch_fraction=args.batch_fraction,
        seed=0,
        init_std=args.init_std,
        early_stop_rel_err=args.early_stop,
    )
    config = experiments.ExperimentConfig(
        n=n,
        noisy_counts=tuple(noisy),
        noise_std=args.noise_std,
        trials=trials,
        solver=solver,
        modes=tuple(args.modes),
        seed=args.seed,
        success_threshold=args.success_threshold,
    )
    _print_config(
        "experiment",
        {
            "n": n, "modes": ",".join(config.modes), "noisy_counts": noisy,
            "trials": trials, "noise_std": args.noise_std, "seed": args.seed,
            "learning_rate": solver.learning_rate, "momentum": solver.momentum,
            "max_iters": solver.max_iters, "batch_fraction": solver.batch_fraction,
            "init_std": solver.init_std, "early_stop_rel_err": solver.early_stop_rel_err,
            "success_threshold": config.success_threshold,
            "threads": args.threads, "out": args.out,
        },
    )

    result = experiments.run_sweep(config, threads=args.threads)
    for row in result.rows():
        mode, _, k, _, succ, rate, mean_err = row
        print(f"  {mode}  noisy={k:<6d} rate={rate:.3f} ({succ}/{trials})  mean_rel_err={mean_err:.4f}")
    if args.out:
        out = Path(args.out)
        if out.suffix.lower() == ".json":
            experiments.export_json(result, out)
        else:
            experiments.export_csv(result, out)
        print(f"wrote {out}")
    ppath = _plot_path(args)
    if ppath is not None:
        plotting.plot_sweep(result, ppath)
        print(f"wrote {ppath}")
    return 0


# ----------------------------------------------------------------- landscape


def _objective_handle(args):
    prob = TensorProblem(np.array(args.y), args.d)
    name = args.objective
    if name == "f1":
        return prob, lambda pts: eval_f1(prob, pts)
    if name == "finf":
        return prob, lambda pts: eval_finf(prob, pts)
    if args.p is None:
        raise SystemExit2(f"--objective {name} requires --p")
    if name == "fp":
        return prob, lambda pts: eval_fp(prob, pts, args.p)
    return prob, lambda pts: eval_hp(prob, pts, args.p)


def _cmd_landscape(args) -> int:
    prob, handle = _objective_handle(args)
    lo, hi = args.box
    box = landscape.GridBox([lo] * prob.n, [hi] * prob.n, args.res)
    _print_config(
        "landscape",
        {
            "objective": args.objective, "y": list(prob.y), "d": prob.d,
            "p": args.p, "box": args.box, "res": args.res, "tol": args.tol,
            "weak": args.weak, "region": args.region, "threads": args.threads,
            "out": args.out,
        },
    )
    if args.region:
        if args.objective != "f1":
            raise SystemExit2("--region applies to the f1 objective only")
        report = landscape.verify_on_closed_form_region(
            prob, box, args.tol, threads=args.threads
        )
        values = None
    else:
        values = landscape.grid_values(handle, box, threads=args.threads)
        verify = landscape.verify_weakly_global if args.weak else landscape.verify_global
        report = verify(handle, box, args.tol, values=values)

    print(f"verdict: {report.verdict}")
    print(f"global grid value: {report.global_value:.17g}")
    print(f"grid-local minima: {len(report.grid_local_minima)}")
    for point, value in report.grid_local_minima[:10]:
        print(f"  at {tuple(round(float(c), 12) for c in point)} value {value:.6g}")
    if args.out:
        _write_json(Path(args.out), report.to_dict())
        print(f"wrote {args.out}")
    ppath = _plot_path(args)
    if ppath is not None:
        if values is None:
            values = landscape.grid_values(handle, box, threads=args.threads)
        plotting.plot_grid_report(values, box, report, ppath)
        print(f"wrote {ppath}")
    acceptable = (landscape.GLOBAL, landscape.WEAKLY_GLOBAL_ONLY) if args.weak else (landscape.GLOBAL,)
    return 0 if report.verdict in acceptable else 1


# -------------------------------------------------------------- stationarity


def _cmd_stationarity(args) -> int:
    prob = TensorProblem(np.array(args.y), args.d)
    x = np.array(args.x)
    _print_config(
        "stationarity",
        {"y": list(prob.y), "d": prob.d, "x": list(x), "tol": args.tol, "out": args.out},
    )
    report = stationarity.is_clarke_stationary(prob, x, args.tol)
    payload = report.to_dict()
    if np.all(prob.y != 0.0) and np.any(x != 0.0):
        stair = stationarity.build_staircase(prob, x)
        ratios = [float(v) for v in x / prob.y]
        payload["staircase"] = {
            "base": stair.base,
            "jumps": [list(j) for j in stair.jumps],
            "ratios": ratios,
            "ratios_are_roots": [stair.is_root(t, args.tol) for t in ratios],
        }
        if report.stationary:
            payload["root_jump_separation"] = stationarity.verify_root_jump_separation(
                prob, x, args.tol
            )
    print(f"stationary: {str(report.stationary).lower()}")
    print(f"zero_pattern_ok: {str(report.zero_pattern_ok).lower()}")
    print(f"ratio_bound_ok: {str(report.ratio_bound_ok).lower()}")
    print(f"max_ratio_product: {report.max_ratio_product:.17g}")
    for i, (lo, hi) in enumerate(report.per_coordinate_interval):
        print(f"  coordinate {i}: [{lo:.17g}, {hi:.17g}]")
    if args.out:
        _write_json(Path(args.out), payload)
        print(f"wrote {args.out}")
    return 0


# ------------------------------------------------------------------ converge


def _cmd_converge(args) -> int:
    prob = TensorProblem(np.array(args.y), args.d)
    lo, hi = args.box
    box = landscape.GridBox([lo] * prob.n, [hi] * prob.n, args.res)
    _print_config(
        "converge",
        {
            "y": list(prob.y), "d": prob.d, "target": args.target,
            "p_schedule": args.p_schedule, "box": args.box, "res": args.res,
            "threshold": args.threshold, "threads": args.threads, "out": args.out,
        },
    )
    if args.target == "f1":
        target = lambda pts: eval_f1(prob, pts)
        family = lambda p: (lambda pts: eval_fp(prob, pts, p))
        label = "f1"
    else:
        target = lambda pts: eval_finf(prob, pts)
        family = lambda p: (lambda pts: eval_hp(prob, pts, p))
        label = "finf"
    table = landscape.check_compact_convergence(
        family, target, box, args.p_schedule, threads=args.threads
    )
    for p, dist in table:
        print(f"  p={p:<8g} sup-distance={dist:.17g}")
    ok = all(b < a for (_, a), (_, b) in zip(table, table[1:]))
    print(f"strictly decreasing: {str(ok).lower()}")
    if args.threshold is not None:
        below = table[-1][1] <= args.threshold
        print(f"final below threshold {args.threshold}: {str(below).lower()}")
        ok = ok and below
    if args.out:
        _write_rows_csv(Path(args.out), ("p", "sup_distance"), table)
        print(f"wrote {args.out}")
    ppath = _plot_path(args)
    if ppath is not None:
        plotting.plot_convergence(table, ppath, target_label=label)
        print(f"wrote {ppath}")
    return 0 if ok else 1


# ------------------------------------------------------------------- gallery


def _cmd_gallery(args) -> int:
    entry = gallery.get_entry(args.name)
    if args.action == "eval":
        if args.at is None:
            raise SystemExit2("gallery eval requires --at")
        if len(args.at) != entry.arity:
            raise SystemExit2(f"{entry.name} takes {entry.arity} coordinate(s)")
        _print_config("gallery eval", {"name": entry.name, "at": args.at})
        value = entry.fn(*args.at)
        print(f"{entry.name}({', '.join(map(str, args.at))}) = {value:.17g}")
        return 0

    if args.action == "export":
        if not args.out:
            raise SystemExit2("gallery export requires --out")
        res = args.res or entry.resolution
        _print_config(
            "gallery export", {"name": entry.name, "res": res, "out": args.out}
        )
        rows = gallery.surface_rows(entry.name, res)
        header = ("x1", "value") if entry.arity == 1 else ("x1", "x2", "value")
        _write_rows_csv(Path(args.out), header, [tuple(map(float, r)) for r in rows])
        print(f"wrote {args.out}")
        ppath = _plot_path(args)
        if ppath is not None:
            plotting.plot_surface(rows, ppath, name=entry.name)
            print(f"wrote {ppath}")
        return 0

    # verify
    res = args.res or entry.resolution
    _print_config(
        "gallery verify",
        {"name": entry.name, "res": res, "tol": args.tol, "claim": entry.claimed_property},
    )
    report, ok = gallery.verify_entry(entry.name, res, args.tol)
    print(f"verdict: {report.verdict} (expected {entry.expected_verdict()})")
    print(f"claim holds: {str(ok).lower()}")
    if args.out:
        _write_json(Path(args.out), report.to_dict())
        print(f"wrote {args.out}")
    return 0 if ok else 1


# ---------------------------------------------------------------------- main


_DEFAULTS = dict(
    n=20, trials=20, seed=0, max_iters=None, noise_std=10.0, lr=0.001,
    momentum=0.9, batch_fraction=0.1, init_std=1.0, early_stop=0.05,
    success_threshold=0.1,
)


def parser_defaults() -> dict:
    return dict(_DEFAULTS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tensorscape",
        description="Nonsmooth rank-one tensor decomposition: objectives, "
        "landscape verification, and robust-recovery experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output file (.csv or .json by extension)")
        p.add_argument(
            "--plot",
            nargs="?",
            const="auto",
            help="render a PNG figure (default: alongside --out)",
        )
        p.add_argument("--threads", type=int, default=1, help="parallelism cap")

    p = sub.add_parser("experiment", help="sparse-noise recovery sweep")
    p.add_argument("--n", type=int, default=_DEFAULTS["n"])
    p.add_argument("--modes", type=lambda s: s.lower().split(","), default=["l1", "l2"])
    p.add_argument("--noisy", type=_ints, default=None, help="noisy-entry counts")
    p.add_argument("--trials", type=int, default=_DEFAULTS["trials"])
    p.add_argument("--noise-std", dest="noise_std", type=float, default=_DEFAULTS["noise_std"])
    p.add_argument("--seed", type=int, default=_DEFAULTS["seed"])
    p.add_argument("--lr", type=float, default=_DEFAULTS["lr"])
    p.add_argument("--momentum", type=float, default=_DEFAULTS["momentum"])
    p.add_argument("--max-iters", dest="max_iters", type=int, default=None)
    p.add_argument("--batch-fraction", dest="batch_fraction", type=float, default=_DEFAULTS["batch_fraction"])
    p.add_argument("--init-std", dest="init_std", type=float, default=_DEFAULTS["init_std"])
    p.add_argument("--early-stop", dest="early_stop", type=float, default=_DEFAULTS["early_stop"], help="relative-error early stop (<= 0 disables)")
    p.add_argument("--success-threshold", dest="success_threshold", type=float, default=_DEFAULTS["success_threshold"])
    p.add_argument("--paper-scale", action="store_true", help="100 trials and a full 0..n^2 sweep")
    p.add_argument("--config", help="flat key=value config file (flags override)")
    common(p)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("landscape", help="grid verification of tensor objectives")
    p.add_argument("--objective", choices=["f1", "fp", "finf", "hp"], default="f1")
    p.add_argument("--y", type=_floats, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--box", type=_floats, default=[-2.0, 2.0], help="lo,hi for every axis")
    p.add_argument("--res", type=int, default=201)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--weak", action="store_true", help="plateau-based weak verification")
    p.add_argument("--region", action="store_true", help="restrict to the closed-form region")
    common(p)
    p.set_defaults(func=_cmd_landscape)

    p = sub.add_parser("stationarity", help="Clarke stationarity report")
    p.add_argument("--y", type=_floats, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--x", type=_floats, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=_cmd_stationarity)

    p = sub.add_parser("converge", help="compact-convergence table")
    p.add_argument("--y", type=_floats, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--target", choices=["f1", "finf"], default="f1")
    p.add_argument("--p-schedule", dest="p_schedule", type=_floats, default=[2.0, 1.5, 1.25, 1.1, 1.01])
    p.add_argument("--box", type=_floats, default=[-2.0, 2.0])
    p.add_argument("--res", type=int, default=201)
    p.add_argument("--threshold", type=float, default=None)
    common(p)
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("gallery", help="example functions")
    p.add_argument("action", choices=["eval", "export", "verify"])
    p.add_argument("name", choices=sorted(gallery.GALLERY))
    p.add_argument("--at", type=_floats, default=None, help="evaluation point")
    p.add_argument("--res", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    common(p)
    p.set_defaults(func=_cmd_gallery)

    return parser


# Flags whose values are comma-separated numbers and may start with a minus
# sign; argparse would otherwise read "-2,2" as an option string.
_NUMERIC_LIST_FLAGS = {"--box", "--y", "--x", "--at", "--p-schedule", "--noisy"}


def _merge_negative_values(argv: list) -> list:
    out = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (
            tok in _NUMERIC_LIST_FLAGS
            and nxt is not None
            and nxt.startswith("-")
            and len(nxt) > 1
            and (nxt[1].isdigit() or nxt[1] == ".")
        ):
            out.append(f"{tok}={nxt}")
            skip = True
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = _merge_negative_values(list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors already
        return int(exc.code or 0)
    if len(getattr(args, "box", [0, 0])) != 2:
        print("error: --box expects exactly lo,hi", file=sys.stderr)
        return 2
    if getattr(args, "box", None) is not None and args.box[0] >= args.box[1]:
        print("error: --box lower bound must be below upper bound", file=sys.stderr)
        return 2
    if getattr(args, "early_stop", None) is not None and args.early_stop <= 0:
        args.early_stop = None
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
