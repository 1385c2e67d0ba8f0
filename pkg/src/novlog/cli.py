"""Batch front end: run one JSON job, emit one JSON report.

Exit codes: 0 on success (including a check-main run whose verdict is
false; a mismatch is a result, not an error), 1 on domain errors, 2 on
parse or validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import dynamics, jobs, k1, torsion, wittlog
from .errors import NovlogError, ParseError, ValidationError
from .series import TruncatedSeries
from .jobs import (
    parse_job,
    write_algebra,
    write_class_series,
    write_matrix,
    write_series,
    write_zeta,
)

SCHEMA = "novlog/1"


def execute(job: jobs.JobSpec) -> dict:
    """Run a parsed job; returns the report payload (without timing)."""
    group, order, ops = job.group, job.truncation, job.operands
    command = job.command
    if command == "log":
        result = {"series": write_series(wittlog.series_log(ops["series"]))}
    elif command == "exp":
        result = {"series": write_series(wittlog.series_exp(ops["series"]))}
    elif command == "bchd":
        result = {"series": write_series(wittlog.bch_defect(ops["x"], ops["y"]))}
    elif command == "project":
        result = {"classes": write_class_series(wittlog.project_to_classes(ops["series"]))}
    elif command == "factorize":
        pairs = wittlog.commutator_factorize(ops["series"])
        resid = ops["series"] * wittlog.commutator_product(pairs, group, order)
        diff = resid - TruncatedSeries.one(group, order)
        result = {
            "pairs": [[write_series(x), write_series(y)] for x, y in pairs],
            "residual_valuation": min(diff.coeffs) if diff.coeffs else None,
        }
    elif command == "trace-log":
        result = {"classes": write_class_series(k1.matrix_log_trace(ops["matrix"]))}
    elif command == "gauss":
        diagonal, constant = k1.gauss_reduce(ops["matrix"])
        result = {
            "diagonal": [write_series(d) for d in diagonal],
            "constant": [[write_algebra(a) for a in row] for row in constant],
        }
    elif command == "frakl":
        result = {"classes": write_class_series(k1.laurent_class_log(ops["matrix"]))}
    elif command == "torsion":
        tc = torsion.torsion(ops["complex"])
        result = {
            "representative": write_matrix(tc.representative),
            "invariant": write_class_series(tc.invariant),
        }
    elif command == "eta-direct":
        result = {"classes": write_class_series(dynamics.eta_direct(ops["models"], order))}
    elif command == "eta-traces":
        taus = ops["models"].tau_matrices()
        result = {"classes": write_class_series(dynamics.eta_from_traces(taus, order))}
    elif command == "zeta-det":
        result = {"zeta": write_zeta(dynamics.zeta_det(ops["homology"], order))}
    elif command == "zeta-counts":
        result = {"zeta": write_zeta(dynamics.zeta_from_counts(ops["counts"], order))}
    elif command == "abelian-zeta":
        result = {"zeta": write_zeta(dynamics.abelian_zeta(ops["eta"]))}
    elif command == "check-main":
        rep = dynamics.main_theorem_check(ops["models"], ops["complex"])
        result = {
            "torsion": write_class_series(rep.torsion_log),
            "tau_log": write_class_series(rep.tau_log),
            "minus_eta": write_class_series(rep.minus_eta),
            "verdict": rep.verdict,
        }
    else:  # pragma: no cover
        raise AssertionError("unhandled command %r" % command)
    return {"schema": SCHEMA, "command": command, "truncation": order, "result": result}


def _emit(payload, output_path):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if output_path:
        with open(output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="novlog",
        description="Run one exact-arithmetic job described by a JSON file.",
    )
    ap.add_argument("--input", required=True, help="path to the JSON job file")
    ap.add_argument("--output", help="write the report here instead of stdout")
    ap.add_argument(
        "--truncation",
        type=int,
        help="override the job's truncation order",
    )
    ap.add_argument(
        "--seed",
        type=int,
        help="seed for randomized job generators (reserved; shipped commands are deterministic)",
    )
    args = ap.parse_args(argv)

    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _emit({"schema": SCHEMA, "error": {"type": "ParseError", "message": str(exc)}}, args.output)
        return 2

    started = time.perf_counter()
    try:
        job = parse_job(text, truncation_override=args.truncation)
        report = execute(job)
    except (ParseError, ValidationError) as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ValidationError):
            err["path"] = exc.path
        _emit({"schema": SCHEMA, "error": err}, args.output)
        return 2
    except NovlogError as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        _emit({"schema": SCHEMA, "error": err}, args.output)
        return 1
    report["timing_ms"] = round((time.perf_counter() - started) * 1000.0, 3)
    _emit(report, args.output)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
