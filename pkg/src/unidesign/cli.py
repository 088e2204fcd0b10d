"""Command-line front end: construct, evaluate, sample, bench.

File formats: designs are headerless CSV (rows = runs, columns = factors,
values with 17 significant digits so they round-trip float64 exactly);
traces are ``epoch,cd2,seconds`` CSV (``iteration,cd2`` for TA-only runs);
every file-writing command also writes a JSON manifest capturing the full
configuration for bit-exact replay.

Exit codes: 0 success, 2 usage error, 3 input-data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .benchfns import get_test_function, scale_design
from .discrepancy import cd2, cd2_gradient
from .lattice import TaConfig, embed, random_utype, ta_optimize
from .optimize import RefinerConfig, cdfss, cgd, czg, refine_pipeline
from .sampling import lhd, lhs, mlhs
from .surrogate import evaluate_mse

__all__ = ["main", "DesignFileError", "read_design_csv", "write_matrix_csv", "RunManifest"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_NUMERICAL = 4

_ALGOS = ("ta", "ta+cgd", "ta+czg", "ta+cdfss", "cgd", "czg", "cdfss")
_REFINERS = {"cgd": cgd, "czg": czg, "cdfss": cdfss}


class DesignFileError(Exception):
    """Malformed design file (non-numeric cell, ragged rows, out-of-range entry)."""


@dataclasses.dataclass
class RunManifest:
    """Replayable record of a CLI invocation."""

    command: str
    argv: list
    config: dict
    version: str = __version__
    wall_time_seconds: float = 0.0
    result: dict = dataclasses.field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    def write(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json() + "\n")


def read_design_csv(path: str, unit_range: bool = True) -> np.ndarray:
    """Read a headerless numeric CSV design with row/column diagnostics."""
    rows = []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise DesignFileError(f"cannot read {path}: {exc}") from exc
    with fh:
        for r, record in enumerate(csv.reader(fh)):
            if not record or (len(record) == 1 and not record[0].strip()):
                continue
            parsed = []
            for c, cell in enumerate(record):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise DesignFileError(
                        f"{path}: row {r + 1}, column {c + 1}: not a number: {cell!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise DesignFileError(f"{path}: no data rows")
    width = len(rows[0])
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DesignFileError(
                f"{path}: row {r + 1} has {len(row)} cells, expected {width}"
            )
    x = np.array(rows, dtype=float)
    if unit_range and (x.min() < 0.0 or x.max() > 1.0):
        i, j = np.unravel_index(np.argmax(np.abs(x - 0.5)), x.shape)
        raise DesignFileError(
            f"{path}: row {i + 1}, column {j + 1}: entry {x[i, j]} outside [0, 1]"
        )
    return x


def write_matrix_csv(path: str, matrix: np.ndarray, integer: bool = False) -> None:
    fmt = "%d" if integer else "%.17g"
    np.savetxt(path, np.atleast_2d(matrix), fmt=fmt, delimiter=",")


def _write_trace_csv(path: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow([row[0]] + [f"{v:.17g}" if isinstance(v, float) else v for v in row[1:]])


def _write_projections_csv(path: str, design: np.ndarray) -> None:
    """All 2-D projections as (col_a, col_b, x, y) rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        s = design.shape[1]
        for a in range(s):
            for b in range(a + 1, s):
                for i in range(design.shape[0]):
                    writer.writerow([a, b, f"{design[i, a]:.17g}", f"{design[i, b]:.17g}"])


def _manifest_path(out: str) -> str:
    base, _ = os.path.splitext(out)
    return base + ".manifest.json"


def _add_construct_parser(sub) -> None:
    p = sub.add_parser("construct", help="construct a uniform design")
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--algo", choices=_ALGOS, default="ta+cgd")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", help="initial design CSV (required for standalone refiners)")
    p.add_argument("--out", default="design.csv")
    p.add_argument("--trace", help="trace CSV path")
    p.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")
    p.add_argument("--projections", help="write all 2-D projections to this CSV")
    # threshold-accepting knobs
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--stages", type=int, default=20)
    p.add_argument("--probes", type=int, default=100)
    p.add_argument("--iters-per-stage", type=int, default=2000)
    # refiner knobs
    p.add_argument("--delta", type=float, default=0.01, help="CGD/GD step size")
    p.add_argument("--epsilon", type=float, default=1e-9)
    p.add_argument("--max-epochs", type=int, default=1000)
    p.add_argument("--t-max", type=int, default=1)
    p.add_argument("--delta-j", help="CDFSS column steps: one value or comma list")
    p.add_argument("--guarded", action="store_true", help="CZG rejects worsening updates")


def _refiner_config(args, s: int) -> RefinerConfig:
    column_steps = None
    if args.delta_j:
        parts = [float(v) for v in args.delta_j.split(",")]
        column_steps = parts * s if len(parts) == 1 else parts
        if len(column_steps) != s:
            raise DesignFileError(f"--delta-j needs 1 or {s} values, got {len(parts)}")
    return RefinerConfig(
        step_size=args.delta,
        epsilon=args.epsilon,
        max_epochs=args.max_epochs,
        t_max=args.t_max,
        column_steps=column_steps,
        guarded=args.guarded,
    )


def _cmd_construct(args, argv) -> int:
    t0 = time.perf_counter()
    standalone = args.algo in _REFINERS
    if standalone:
        if not args.init:
            print(f"error: --algo {args.algo} requires --init", file=sys.stderr)
            return EXIT_USAGE
        init = read_design_csv(args.init)
        refiner_config = _refiner_config(args, init.shape[1])
        result = _REFINERS[args.algo](init, refiner_config)
        design, final_cd2 = result.design, result.cd2
        trace_rows = list(result.trace.records)
        termination = result.termination
    else:
        for name in ("n", "q", "s"):
            if getattr(args, name) is None:
                print(f"error: --algo {args.algo} requires --{name}", file=sys.stderr)
                return EXIT_USAGE
        ta_config = TaConfig(
            n=args.n, q=args.q, s=args.s, alpha=args.alpha, stages=args.stages,
            probes=args.probes, iterations_per_stage=args.iters_per_stage, seed=args.seed,
        )
        if args.algo == "ta":
            ta_result = ta_optimize(ta_config)
            design, final_cd2 = embed(ta_result.design), ta_result.cd2
            trace_rows = ta_result.trace
            termination = "schedule_exhausted"
        else:
            refiner = args.algo.split("+", 1)[1]
            refiner_config = _refiner_config(args, args.s)
            result = refine_pipeline(ta_config, refiner, refiner_config)
            design, final_cd2 = result.design, result.cd2
            trace_rows = list(result.trace.records)
            termination = result.termination

    write_matrix_csv(args.out, design)
    if args.trace:
        _write_trace_csv(args.trace, trace_rows)
    if args.projections:
        _write_projections_csv(args.projections, design)

    config = {
        "algo": args.algo, "n": args.n, "q": args.q, "s": args.s, "seed": args.seed,
        "init": args.init, "alpha": args.alpha, "stages": args.stages,
        "probes": args.probes, "iters_per_stage": args.iters_per_stage,
        "delta": args.delta, "epsilon": args.epsilon, "max_epochs": args.max_epochs,
        "t_max": args.t_max, "delta_j": args.delta_j, "guarded": args.guarded,
        "out": args.out, "trace": args.trace, "projections": args.projections,
    }
    manifest = RunManifest(
        command="construct", argv=argv, config=config,
        wall_time_seconds=time.perf_counter() - t0,
        result={"cd2": final_cd2, "termination": termination,
                "shape": list(design.shape)},
    )
    manifest.write(args.manifest or _manifest_path(args.out))
    print(f"{final_cd2:.10g}")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    design = read_design_csv(args.design)
    print(f"{cd2(design):.10g}")
    if args.gradient:
        for row in cd2_gradient(design):
            print(",".join(f"{v:.10g}" for v in row))
    return EXIT_OK


def _cmd_sample(args, argv) -> int:
    t0 = time.perf_counter()
    if args.kind == "utype":
        if args.q is None:
            print("error: --kind utype requires --q", file=sys.stderr)
            return EXIT_USAGE
        if args.n % args.q != 0:
            print(f"error: q={args.q} does not divide n={args.n}", file=sys.stderr)
            return EXIT_USAGE
        matrix = random_utype(args.n, args.q, args.s, args.seed).levels
        integer = True
    elif args.kind == "lhd":
        matrix = lhd(args.n, args.s, args.seed).perms
        integer = True
    elif args.kind == "lhs":
        matrix = lhs(args.n, args.s, args.seed)
        integer = False
    else:
        matrix = mlhs(args.n, args.s, args.seed)
        integer = False
    write_matrix_csv(args.out, matrix, integer=integer)
    manifest = RunManifest(
        command="sample", argv=argv,
        config={"kind": args.kind, "n": args.n, "s": args.s, "q": args.q,
                "seed": args.seed, "out": args.out},
        wall_time_seconds=time.perf_counter() - t0,
        result={"shape": list(matrix.shape)},
    )
    manifest.write(args.manifest or _manifest_path(args.out))
    return EXIT_OK


def _bench_jobs(requested: int) -> int:
    cap = os.environ.get("UNIDESIGN_THREADS")
    if cap:
        try:
            requested = min(requested, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, requested)


def _cmd_bench(args, argv) -> int:
    t0 = time.perf_counter()
    if bool(args.design) == bool(args.sampler):
        print("error: exactly one of --design or --sampler is required", file=sys.stderr)
        return EXIT_USAGE

    bases = [b.strip() for b in args.basis.split(",") if b.strip()]
    designs: list[np.ndarray] = []
    if args.design:
        designs.append(read_design_csv(args.design))
        source = {"design": args.design}
    else:
        if args.n is None or args.s is None:
            print("error: --sampler requires --n and --s", file=sys.stderr)
            return EXIT_USAGE
        draw = lhs if args.sampler == "lhs" else mlhs
        for k in range(args.reps):
            designs.append(draw(args.n, args.s, args.seed + k))
        source = {"sampler": args.sampler, "reps": args.reps, "n": args.n, "s": args.s}

    s = designs[0].shape[1]
    fn = get_test_function(args.fn, dim=s)
    if fn.dim != s:
        print(f"error: {args.fn} expects {fn.dim} factors, design has {s}", file=sys.stderr)
        return EXIT_INPUT

    rng = np.random.default_rng(args.seed)
    test_unit = rng.random((args.test_points, s))
    y_test = np.asarray(fn(scale_design(test_unit, fn.bounds)), dtype=float)

    def cell(basis: str, design: np.ndarray) -> dict:
        try:
            mse, rmse = evaluate_mse(
                design, fn, basis=basis, seed=args.seed, test_points=test_unit
            )
            return {"mse": mse, "rmse": rmse}
        except (ValueError, np.linalg.LinAlgError) as exc:
            return {"error": str(exc)}

    jobs = _bench_jobs(args.jobs)
    report_bases: dict[str, dict] = {}
    any_ok = False
    for basis in bases:
        if len(designs) == 1:
            results = [cell(basis, designs[0])]
        elif jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(lambda d: cell(basis, d), designs))
        else:
            results = [cell(basis, d) for d in designs]
        ok = [r for r in results if "mse" in r]
        entry: dict = {"cells": results}
        if ok:
            any_ok = True
            entry["mse"] = float(np.mean([r["mse"] for r in ok]))
            entry["rmse"] = float(np.mean([r["rmse"] for r in ok]))
        report_bases[basis] = entry

    manifest = RunManifest(
        command="bench", argv=argv,
        config={"fn": args.fn, "bases": bases, "test_points": args.test_points,
                "seed": args.seed, "jobs": args.jobs, **source},
        wall_time_seconds=time.perf_counter() - t0,
        result={b: {k: v for k, v in e.items() if k != "cells"} for b, e in report_bases.items()},
    )
    report = {
        "function": args.fn,
        "source": source,
        "bases": report_bases,
        "test_std": float(np.std(y_test)),
        "manifest": dataclasses.asdict(manifest),
    }
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK if any_ok else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unidesign",
        description="Uniform experimental designs over the continuous unit cube",
    )
    parser.add_argument("--version", action="version", version=f"unidesign {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_construct_parser(sub)

    p = sub.add_parser("evaluate", help="print the CD2 of a design CSV")
    p.add_argument("--design", required=True)
    p.add_argument("--gradient", action="store_true", help="also print the gradient matrix")

    p = sub.add_parser("sample", help="generate lhd/lhs/mlhs/utype samples")
    p.add_argument("--kind", choices=("lhd", "lhs", "mlhs", "utype"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="sample.csv")
    p.add_argument("--manifest")

    p = sub.add_parser("bench", help="Kriging prediction-MSE benchmark")
    p.add_argument("--fn", choices=("wood", "camelback", "const"), required=True)
    p.add_argument("--design", help="design CSV to benchmark")
    p.add_argument("--sampler", choices=("lhs", "mlhs"), help="benchmark averaged samples")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--n", type=int, help="sampler runs")
    p.add_argument("--s", type=int, help="sampler factors")
    p.add_argument("--basis", default="poly0", help="comma list of poly0,poly1,poly2")
    p.add_argument("--test-points", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="parallel reps (capped by UNIDESIGN_THREADS)")
    p.add_argument("--out", default="report.json")
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "construct":
            return _cmd_construct(args, argv)
        if args.command == "evaluate":
            return _cmd_evaluate(args)
        if args.command == "sample":
            return _cmd_sample(args, argv)
        return _cmd_bench(args, argv)
    except DesignFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
