"""Batch front end: run experiment configs and the verification suites.

Exit codes: 0 success, 1 per-window identity violation or property failure,
2 configuration error, 3 budget refusal without a fallback.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import (
    config as config_mod,
    dynamic_entropy,
    families,
    measures,
    principles,
    static_entropy,
    verify,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3

NINE = "{:.9f}"


class TaskFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fmt(x: float, scale: float) -> str:
    return NINE.format(x * scale)


def _estimate_files(est, outdir, stem, scale, extra=None):
    payload = est.to_json_dict()
    if extra:
        payload.update(extra)
    (outdir / f"{stem}.json").write_text(json.dumps(payload, indent=2))
    with open(outdir / f"{stem}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["N", "a_N", "a_N_over_N"])
        for N, a, per in est.csv_rows(scale):
            w.writerow([N, NINE.format(a), NINE.format(per)])


def _report_files(report, outdir, stem, scale):
    (outdir / f"{stem}.json").write_text(json.dumps(report.to_json_dict(), indent=2))
    with open(outdir / f"{stem}.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["check_name", "lhs", "rhs", "gap", "verdict", "n_max", "tolerance"]
        )
        name, lhs, rhs, gap, verdict, n_max, tol = report.summary_row(scale)
        w.writerow(
            [name, NINE.format(lhs), NINE.format(rhs), NINE.format(gap), verdict, n_max, tol]
        )


def _run_task(cfg, i, task, outdir, scale, seed, n_max_override, tol_override):
    kind = task["kind"]
    stem = f"task_{i:02d}_{kind}"
    n_max = n_max_override or task.get("n_max")
    tol = tol_override if tol_override is not None else task.get("tolerance")

    def fam(key):
        return cfg.family(task[key], i)

    def meas(key="measure"):
        return cfg.measure(task[key], i)

    if kind == "static":
        U, beta = fam("cover"), fam("conditioner")
        U, beta = families.align_windows(U, beta)
        v = static_entropy.conditional_cover_entropy(meas(), U, beta)
        row = ("conditional_cover_entropy", _fmt(v.nats, scale), v.method)
        (outdir / f"{stem}.json").write_text(
            json.dumps({"quantity": row[0], "value": v.nats, "method": v.method})
        )
        with open(outdir / f"{stem}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["quantity", "value", "method"])
            w.writerow(row)
        return ("static", row[0], v.nats * scale, None, "ok", n_max or 1, None)

    if kind == "count":
        U, beta = families.align_windows(fam("cover"), fam("conditioner"))
        n = static_entropy.covering_number(U, beta)
        (outdir / f"{stem}.json").write_text(
            json.dumps({"quantity": "covering_number", "value": n})
        )
        with open(outdir / f"{stem}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["quantity", "value"])
            w.writerow(["covering_number", n])
        return ("count", "covering_number", float(n), None, "ok", 1, None)

    if kind in ("h_minus", "h_top", "h_plus"):
        U, beta = fam("cover"), fam("conditioner")
        if kind == "h_minus":
            est = dynamic_entropy.joined_cover_rate(
                meas(), U, beta, n_max or dynamic_entropy.N_MAX_COVER_DEFAULT
            )
        elif kind == "h_top":
            est = dynamic_entropy.covering_rate(
                U, beta, n_max or dynamic_entropy.N_MAX_COUNTING_DEFAULT
            )
        else:
            result = dynamic_entropy.refining_partition_rate(
                meas(),
                U,
                beta,
                n_max or dynamic_entropy.N_MAX_COVER_DEFAULT,
                task.get("window"),
                task.get("budget", families.USTAR_BUDGET_DEFAULT),
            )
            est = result.estimate
        _estimate_files(est, outdir, stem, scale)
        return (kind, est.quantity, est.running_inf * scale,
                est.stabilization_gap * scale, est.exactness, est.n_max, None)

    if kind == "power_check":
        rep = dynamic_entropy.power_identity_check(
            meas(), fam("cover"), fam("conditioner"), int(task["M"]), n_max or 3,
            tolerance=tol if tol is not None else 1e-9,
        )
        (outdir / f"{stem}.json").write_text(json.dumps(rep.to_json_dict(), indent=2))
        with open(outdir / f"{stem}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["N", "base_side", "power_side", "gap"])
            for N, lhs, rhs in rep.pairs:
                w.writerow([N, NINE.format(lhs * scale), NINE.format(rhs * scale),
                            NINE.format(abs(lhs - rhs) * scale)])
        if rep.verdict == "violated":
            raise TaskFailure(EXIT_VIOLATION, f"power identity violated (task {i})")
        return ("power_check", "power_identity", rep.max_gap, None, rep.verdict,
                n_max or 3, rep.tolerance)

    if kind == "factor_check":
        rep = principles.factor_invariance_check(
            cfg.factor_map(task["factor"], i), meas(), fam("cover"),
            fam("conditioner"), n_max or 6,
            tolerance=tol if tol is not None else principles.IDENTITY_TOL,
        )
    elif kind == "variational":
        rep = principles.variational_search(
            cfg.system, fam("cover"), fam("conditioner"), n_max or 6,
            starts=task.get("starts", 8), max_iter=task.get("max_iter", 120),
            seed=seed,
            tolerance=tol if tol is not None else principles.BRACKET_TOL,
        )
    elif kind == "minmax":
        grid = [cfg.measure(name, i) for name in task.get("measures", [])]
        rep = principles.minmax_check(
            cfg.system, fam("cover"), fam("conditioner"), grid, n_max or 6,
            task.get("window"), seed=seed,
            tolerance=tol if tol is not None else principles.IDENTITY_TOL,
        )
    elif kind == "bracket":
        rep = principles.cover_rate_bracket(
            meas(), fam("cover"), fam("conditioner"), n_max or 6,
            tuple(task.get("windows", (1, 2))),
            tolerance=tol if tol is not None else principles.BRACKET_TOL,
        )
    elif kind == "ergodic_check":
        comps = measures.ergodic_decompose(meas())
        rep = principles.ergodic_additivity_check(
            comps, fam("family"), fam("conditioner"), n_max or 8
        )
    elif kind == "factor_cond":
        rep = principles.factor_conditioned_profile(
            meas(), cfg.factor_map(task["factor"], i), fam("cover"),
            tuple(task.get("windows", (1, 2, 3))), n_max or 6,
        )
    else:  # pragma: no cover - kinds validated by the loader
        raise config_mod.ConfigError("BAD_CONFIG", f"unhandled kind {kind}", i)

    _report_files(rep, outdir, stem, scale)
    if rep.verdict == principles.VIOLATED:
        raise TaskFailure(EXIT_VIOLATION, f"{rep.name} violated (task {i})")
    return (kind, rep.name, rep.lhs * scale, rep.gap * scale, rep.verdict,
            rep.n_max, rep.tolerance)


def run(config_path, output_dir, seed=None, n_max=None, tolerance=None,
        bits=False) -> int:
    """Execute the tasks of a config in declaration order; one CSV and one
    JSON per task plus a combined summary.  Deterministic given config and
    seed."""
    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        cfg = config_mod.load_config(config_path)
    except config_mod.ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    scale = 1.0 / math.log(2.0) if bits else 1.0
    use_seed = cfg.seed if seed is None else seed

    rows = []
    status = EXIT_OK
    for i, task in enumerate(cfg.tasks):
        try:
            row = _run_task(cfg, i, task, outdir, scale, use_seed, n_max, tolerance)
            rows.append((i,) + row)
        except config_mod.ConfigError as e:
            print(f"task {i} config error: {e}", file=sys.stderr)
            return EXIT_CONFIG
        except families.UStarBudgetExceeded as e:
            print(f"task {i} budget refusal: {e}", file=sys.stderr)
            return EXIT_BUDGET
        except TaskFailure as e:
            print(f"task {i} failed: {e}", file=sys.stderr)
            rows.append((i, task["kind"], "FAILED", math.nan, math.nan,
                         "violated", 0, None))
            status = max(status, e.code)
        except (static_entropy.RouteDisagreement,
                dynamic_entropy.SubadditivityError) as e:
            print(f"task {i} identity violation: {e}", file=sys.stderr)
            rows.append((i, task["kind"], "FAILED", math.nan, math.nan,
                         "violated", 0, None))
            status = max(status, EXIT_VIOLATION)

    with open(outdir / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["task", "kind", "check_name", "value", "gap", "verdict",
                    "n_max", "tolerance"])
        for row in rows:
            w.writerow(row)
    return status


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="coverentropy",
        description="conditional cover entropy computations on symbolic systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config")
    p_run.add_argument("--config", required=True, help="path to the JSON config")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--n-max", type=int, default=None,
                       help="override every task's n_max")
    p_run.add_argument("--tolerance", type=float, default=None,
                       help="override every task's tolerance")
    p_run.add_argument("--bits", action="store_true",
                       help="report entropies in bits instead of nats")

    p_ver = sub.add_parser("verify", help="run the property and acceptance suites")
    p_ver.add_argument("--level", choices=["fast", "full"], default="fast")
    p_ver.add_argument("--seed", type=int, default=42)

    args = parser.parse_args(argv)
    if args.command == "run":
        return run(args.config, args.out, args.seed, args.n_max,
                   args.tolerance, args.bits)
    return verify.verify_suite(args.level, args.seed)


if __name__ == "__main__":
    sys.exit(main())
