"""Command-line driver: riemann, godunov, llf, interact, limits, entropy-check.

All data files are deterministic (no timestamps); floats are written
with 17 significant digits so results diff exactly across runs.  Exit
codes: 0 ok, 1 I/O failure, 2 invalid input, 3 scheme failure, 4 event
budget exhausted, 5 entropy-check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import entropy as entropy_mod
from . import interactions, limits, numerics, riemann
from .core import Params, State
from .errors import (
    EventBudgetError,
    SchemeFailureError,
    ThinFilmError,
)

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_SCHEME = 3
EXIT_BUDGET = 4
EXIT_ENTROPY = 5


def _fmt(v) -> str:
    if v is None:
        return ""
    return f"{float(v):.17g}"


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: str, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_state(text: str) -> State:
    parts = text.split(",")
    if len(parts) != 2:
        raise ThinFilmError(f"state must be 'h,b', got {text!r}")
    try:
        return State(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ThinFilmError(str(exc)) from exc


def worker_count() -> int:
    """Worker cap from THINFILM_THREADS (default 1)."""
    raw = os.environ.get("THINFILM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_param_args(sp) -> None:
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--h-tol", type=float, default=1e-10)


def cmd_riemann(args) -> int:
    p = Params(args.alpha, args.kappa, h_tol=args.h_tol)
    data = riemann.RiemannData(_parse_state(args.left), _parse_state(args.right), p)
    fan = riemann.solve(data)
    xs = np.linspace(args.x_min, args.x_max, args.samples)
    h, b, deltas = riemann.profile(fan, args.t, xs)
    rows = [(x, hv, bv, 0.0) for x, hv, bv in zip(xs, h, b)]
    for x_d, beta in deltas:
        v = riemann.sample(fan, x_d / args.t)
        rows.append((x_d, v.regular.h, v.regular.b, beta))
    rows.sort(key=lambda r: r[0])
    _write_csv(args.out, ["x", "h", "b", "singular_weight"], rows)
    fan_out = args.fan_out or os.path.splitext(args.out)[0] + ".json"
    _write_json(fan_out, riemann.fan_to_json(fan))
    return EXIT_OK


def _profile_rows(f: numerics.FVField, p: Params):
    xs = f.grid.centers()
    rows = []
    for x, hv, bv in zip(xs, f.h, f.b):
        if hv > p.h_tol:
            w1v = p.alpha * hv * bv + p.kappa * hv * hv / 3.0
            w2v = bv / hv
            rows.append((x, hv, bv, w1v, w2v))
        else:
            rows.append((x, hv, bv, None, None))
    return rows


def _run_scheme(args, scheme: str) -> int:
    with open(args.config) as fh:
        cfg_doc = json.load(fh)
    p = Params(
        cfg_doc["alpha"], cfg_doc["kappa"], h_tol=cfg_doc.get("h_tol", 1e-10)
    )
    grid_doc = cfg_doc["grid"]
    grid = numerics.Grid(grid_doc["xmin"], grid_doc["xmax"], grid_doc["ncells"])
    init = cfg_doc["initial"]
    exact_fan = None
    if "middle" in init:
        pd = interactions.PerturbedData(
            init["epsilon"],
            State(*init["left"]),
            State(*init["middle"]),
            State(*init["right"]),
            p,
        )
        field = numerics.field_from_perturbed(pd, grid)
    else:
        data = riemann.RiemannData(State(*init["left"]), State(*init["right"]), p)
        field = numerics.field_from_riemann(data, grid)
        exact_fan = riemann.solve(data)
    cfg = numerics.SchemeConfig(
        scheme=scheme,
        cfl=cfg_doc.get("cfl", 0.45),
        t_end=cfg_doc["t_end"],
    )
    dw = cfg_doc.get("delta_window")
    db = cfg_doc.get("delta_background")
    final, diag = numerics.run(
        field,
        cfg,
        p,
        delta_window=tuple(dw) if dw else None,
        delta_background=(State(*db[0]), State(*db[1])) if db else None,
    )
    _write_csv(args.out, ["x", "h", "b", "w1", "w2"], _profile_rows(final, p))
    doc = {
        "scheme": scheme,
        "alpha": p.alpha,
        "kappa": p.kappa,
        "cfl": cfg.cfl,
        "grid": diag["grid"],
        "t_end": cfg.t_end,
        "n_steps": diag["n_steps"],
        "mass_h": diag["mass_h"],
        "mass_b": diag["mass_b"],
        "max_conservation_residual": diag["max_conservation_residual"],
        "delta_mass": diag["delta_mass"],
    }
    if exact_fan is not None:
        xs = grid.centers()
        h, b, _ = riemann.profile(exact_fan, final.t, xs)
        doc["l1_error_vs_exact"] = float(
            np.sum(np.abs(final.h - h) + np.abs(final.b - b)) * grid.dx
        )
    _write_json(args.diag_out or os.path.splitext(args.out)[0] + "_diag.json", doc)
    return EXIT_OK


def cmd_godunov(args) -> int:
    return _run_scheme(args, "godunov")


def cmd_llf(args) -> int:
    return _run_scheme(args, "llf")


def cmd_interact(args) -> int:
    p = Params(args.alpha, args.kappa, h_tol=args.h_tol)
    pd = interactions.PerturbedData(
        args.epsilon,
        _parse_state(args.left),
        _parse_state(args.middle),
        _parse_state(args.right),
        p,
    )
    tl = interactions.run_timeline(
        pd, t_max=args.t_max, n_fan=args.n_fan, budget=args.budget
    )
    _write_json(args.out, interactions.timeline_to_json(tl))
    if args.profile_times:
        times = [float(s) for s in args.profile_times.split(",")]
        base, ext = os.path.splitext(args.out)
        for t in times:
            xs = np.linspace(args.x_min, args.x_max, args.samples)
            h, b = tl.profile(t, xs)
            rows = list(zip(xs, h, b))
            _write_csv(f"{base}_t{_fmt(t)}.csv", ["x", "h", "b"], rows)
    return EXIT_OK


def cmd_limits(args) -> int:
    if args.study == "kappa":
        p = Params(args.fixed, args.values_list[0], h_tol=args.h_tol)
    else:
        p = Params(args.values_list[0], args.fixed, h_tol=args.h_tol)
    data = riemann.RiemannData(_parse_state(args.left), _parse_state(args.right), p)
    study = limits.LimitStudy(
        args.study, tuple(args.values_list), args.fixed, data, t_eval=args.t_eval
    )
    rows = limits.convergence_table(study, n_samples=args.samples, workers=worker_count())
    out_rows = []
    for r in rows:
        pair = r["weak_pairings"] or (None, None, None)
        out_rows.append(
            (r["value"], r["case"], r["l1"], r["dsigma"], r["dbeta_rate"], *pair)
        )
    header = ["value", "case", "l1", "dsigma", "dbeta_rate", "weak1", "weak2", "weak3"]
    with open(args.out, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in out_rows:
            cells = [_fmt(row[0]), str(row[1])] + [_fmt(v) for v in row[2:]]
            fh.write(",".join(cells) + "\n")
    return EXIT_OK


def cmd_entropy_check(args) -> int:
    p = Params(args.alpha, args.kappa, h_tol=args.h_tol)
    report = entropy_mod.entropy_report(p, n_grid=args.n_grid)
    _write_json(args.out, report)
    failed = any(
        e["sufficient_family"] and e["verdict"] == "fails" for e in report["pairs"]
    )
    return EXIT_ENTROPY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="thinfilm")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("riemann", help="exact Riemann solution sampler")
    _add_param_args(sp)
    sp.add_argument("--left", required=True, help="left state 'h,b'")
    sp.add_argument("--right", required=True, help="right state 'h,b'")
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--x-min", type=float, default=-5.0)
    sp.add_argument("--x-max", type=float, default=10.0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--fan-out", default=None)
    sp.set_defaults(func=cmd_riemann)

    for name, fn in (("godunov", cmd_godunov), ("llf", cmd_llf)):
        sp = sub.add_parser(name, help=f"{name} finite-volume run from a JSON config")
        sp.add_argument("--config", required=True)
        sp.add_argument("--out", required=True)
        sp.add_argument("--diag-out", default=None)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("interact", help="perturbed Riemann front tracking")
    _add_param_args(sp)
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--left", required=True)
    sp.add_argument("--middle", required=True)
    sp.add_argument("--right", required=True)
    sp.add_argument("--t-max", type=float, default=math.inf)
    sp.add_argument("--n-fan", type=int, default=64)
    sp.add_argument("--budget", type=int, default=10000)
    sp.add_argument("--profile-times", default=None)
    sp.add_argument("--samples", type=int, default=2000)
    sp.add_argument("--x-min", type=float, default=-5.0)
    sp.add_argument("--x-max", type=float, default=10.0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_interact)

    sp = sub.add_parser("limits", help="vanishing-parameter convergence table")
    sp.add_argument("--study", choices=("kappa", "alpha"), required=True)
    sp.add_argument("--values", required=True, help="comma list, decreasing")
    sp.add_argument("--fixed", type=float, required=True)
    sp.add_argument("--h-tol", type=float, default=1e-10)
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp.add_argument("--t-eval", type=float, default=1.0)
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_limits)

    sp = sub.add_parser("entropy-check", help="entropy pair compatibility/convexity")
    _add_param_args(sp)
    sp.add_argument("--n-grid", type=int, default=50)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_entropy_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "values", None) is not None:
        try:
            args.values_list = [float(v) for v in args.values.split(",")]
        except ValueError:
            print("invalid --values list", file=sys.stderr)
            return EXIT_INVALID
    try:
        return args.func(args)
    except EventBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SchemeFailureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEME
    except (ThinFilmError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
