"""Command-line surface.

Subcommands:

* ``diagnose FILE``     solvability verdict with a certified solution
* ``homogeneous FILE``  nullspaces of a x = x b / b y = y a and the
  three-way equivalence report
* ``roots FILE``        block square roots, quadratic-equation solutions and
  unipotent certificates
* ``batch DIR``         one verdict row per problem file in a directory

Exit codes for ``diagnose``: 0 solvable, 1 unsolvable, 2 ill-conditioned,
3 file/schema errors, 4 internal errors.  ``batch`` exits 3 when any row
errored, 0 otherwise.  Human-readable summaries go to stdout, diagnostics to
stderr; full JSON reports are written to ``--output``.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import io as sio
from .errors import SchemaError, SylvcertError
from .numerics import frob
from .roots import homogeneous_equivalence, homogeneous_nullspaces, solve_unipotent_quadratic
from .singular import (Verdict, VerdictStatus, diagnose, prepare,
                       solve_uv_report)

EXIT_SOLVABLE = 0
EXIT_UNSOLVABLE = 1
EXIT_ILL_CONDITIONED = 2
EXIT_BAD_INPUT = 3
EXIT_INTERNAL = 4

_STATUS_EXIT = {
    VerdictStatus.SOLVABLE: EXIT_SOLVABLE,
    VerdictStatus.UNSOLVABLE: EXIT_UNSOLVABLE,
    VerdictStatus.ILL_CONDITIONED: EXIT_ILL_CONDITIONED,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sylvcert",
        description="Solvability verdicts and certified particular solutions "
                    "for the matrix equation a x - x b = c.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--alpha", type=float, default=None,
                       help="sector half-angle in (0, pi/2); default pi/4 or the file option")
        p.add_argument("--tol", type=float, default=None,
                       help="relative decision tolerance; default 1e-8 or the file option")
        p.add_argument("--oracle", action="store_true",
                       help="attach the brute-force Kronecker cross-check")
        p.add_argument("--quadrature", action="store_true",
                       help="validate the companion solution via the integral representation")
        p.add_argument("--bridge", action="store_true",
                       help="cross-check the verdict against the unipotent root search")
        p.add_argument("--seed", type=int, default=None,
                       help="seed recorded in the report environment")
        p.add_argument("--output", "-o", type=Path, default=None,
                       help="write the full JSON report to this path")

    p_diag = sub.add_parser("diagnose", help="decide solvability and certify a solution")
    p_diag.add_argument("file", type=Path)
    add_common(p_diag)

    p_hom = sub.add_parser("homogeneous", help="nullspace report for the homogeneous equations")
    p_hom.add_argument("file", type=Path)
    add_common(p_hom)

    p_roots = sub.add_parser("roots", help="block square roots and unipotent certificates")
    p_roots.add_argument("file", type=Path)
    add_common(p_roots)

    p_batch = sub.add_parser("batch", help="verdicts for every problem file in a directory")
    p_batch.add_argument("directory", type=Path)
    add_common(p_batch)
    return parser


def _effective(args, spec) -> tuple:
    alpha = args.alpha if args.alpha is not None else spec.alpha
    tol = args.tol if args.tol is not None else spec.tol
    return alpha, tol


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _diagnose_checks(verdict: Verdict, tol: float, args, spec) -> dict:
    checks = {}
    solvable = verdict.status is VerdictStatus.SOLVABLE
    checks["system_consistency"] = sio.check_entry(
        "pass" if solvable else "fail",
        verdict.system_residual, verdict.system_threshold)
    if solvable:
        checks["solution_certificate"] = sio.check_entry(
            "pass" if verdict.certificate_residual <= verdict.certificate_threshold else "fail",
            verdict.certificate_residual, verdict.certificate_threshold)
        gap = verdict.witness.residuals.get("solution_formula_gap")
        gap_threshold = tol * (2.0 * (verdict.solution_norm or 0.0) + 1e-300)
        checks["solution_formulas_agree"] = sio.check_entry(
            "pass" if gap is not None and gap <= gap_threshold else "fail",
            gap, gap_threshold)
        cascade_residual = max(verdict.witness.residuals[key]
                               for key in ("av_ub", "au_vb", "u_plus_v", "cubic"))
        cascade_threshold = 10.0 * max(verdict.system_threshold, 1e-12)
        checks["identity_cascade"] = sio.check_entry(
            "pass" if cascade_residual <= cascade_threshold else "fail",
            cascade_residual, cascade_threshold)
    else:
        checks["solution_certificate"] = sio.check_entry("skipped")
        checks["solution_formulas_agree"] = sio.check_entry("skipped")
        checks["identity_cascade"] = sio.check_entry("skipped")

    if args.oracle and verdict.oracle_agreement is not None:
        checks["oracle_cross_check"] = sio.check_entry(
            "pass" if verdict.oracle_agreement else "fail",
            verdict.oracle_residual, verdict.oracle_threshold)
    else:
        checks["oracle_cross_check"] = sio.check_entry("skipped")

    if args.quadrature and verdict.quadrature_gap is not None:
        checks["integral_representation"] = sio.check_entry(
            "pass" if verdict.quadrature_gap <= 1e-8 else "fail",
            verdict.quadrature_gap, 1e-8)
    else:
        checks["integral_representation"] = sio.check_entry("skipped")

    if args.bridge and verdict.status is not VerdictStatus.ILL_CONDITIONED:
        p = verdict.problem
        quad = solve_unipotent_quadratic(p, tol=tol)
        found = len(quad.q_values) > 0
        agrees = found == solvable
        entry = sio.check_entry("pass" if agrees else "fail")
        if found:
            offsets = [float(frob(q @ p.b - p.a @ q - quad_offset(quad)))
                       for q in quad.q_values]
            entry["residual"] = min(offsets)
            entry["threshold"] = tol * (frob(quad_offset(quad))
                                        + (frob(p.a) + frob(p.b)) * frob(quad.q_values[0]) + 1e-300)
        if not found and not solvable:
            entry["note"] = ("no unipotent solution in the enumerated root family; "
                             "this bounds the search, the system verdict is authoritative")
        checks["unipotent_bridge"] = entry
    else:
        checks["unipotent_bridge"] = sio.check_entry("skipped")
    return checks


def quad_offset(quad) -> np.ndarray:
    # target and base differ exactly by the offset in the upper-right block
    return -(quad.target.a12 - quad.base.a12)


def cmd_diagnose(args) -> int:
    spec = sio.load_problem(args.file)
    alpha, tol = _effective(args, spec)
    verdict = diagnose(spec.a, spec.b, spec.c, alpha=alpha, tol=tol,
                       with_oracle=args.oracle,
                       with_quadrature=args.quadrature or spec.method == "quadrature")
    checks = _diagnose_checks(verdict, tol, args, spec)
    doc = sio.verdict_to_dict(verdict, checks, tol, seed=args.seed, timestamp=_now())
    if args.output:
        args.output.write_text(sio.serialize_report(doc), encoding="utf-8")
    lam = verdict.problem.lambda_shift
    print(f"{args.file}: {verdict.status.value} "
          f"(residual {verdict.certificate_residual:.3e}, "
          f"threshold {verdict.certificate_threshold:.3e}, shift {lam:g})")
    if verdict.oracle_agreement is not None:
        print(f"  oracle agreement: {verdict.oracle_agreement}")
    if verdict.quadrature_gap is not None:
        print(f"  integral-representation gap: {verdict.quadrature_gap:.3e}")
    return _STATUS_EXIT[verdict.status]


def cmd_homogeneous(args) -> int:
    spec = sio.load_problem(args.file)
    alpha, tol = _effective(args, spec)
    problem = prepare(spec.a, spec.b, np.zeros_like(spec.c), alpha=alpha)
    x_basis, y_basis = homogeneous_nullspaces(problem)
    if problem.gate.spectra_intersect:
        triple = homogeneous_equivalence(problem, tol)
        equivalences = {
            "nonzero_intertwiner": triple[0],
            "nonprimary_root": triple[1],
            "nontrivial_commutant": triple[2],
        }
        equivalence_status = "pass" if len(set(triple)) == 1 else "fail"
    else:
        equivalences = None
        equivalence_status = "skipped"
    doc = {
        "schema_version": sio.SCHEMA_VERSION,
        "nullity": len(x_basis),
        "adjoint_nullity": len(y_basis),
        "basis_samples": [sio.matrix_to_pairs(v) for v in x_basis[:3]],
        "adjoint_basis_samples": [sio.matrix_to_pairs(v) for v in y_basis[:3]],
        "equivalences": equivalences,
        "checks": {"three_way_equivalence": sio.check_entry(equivalence_status)},
        "environment": {
            "alpha": problem.alpha,
            "shift_lambda": problem.lambda_shift,
            "tol": tol,
            "seed": args.seed,
        },
        "generated_at": _now(),
    }
    if args.output:
        args.output.write_text(sio.serialize_report(doc), encoding="utf-8")
    print(f"{args.file}: nullity {len(x_basis)}, adjoint nullity {len(y_basis)}"
          + (f", equivalences {equivalences}" if equivalences is not None else " (regular pair)"))
    return 0


def cmd_roots(args) -> int:
    spec = sio.load_problem(args.file)
    alpha, tol = _effective(args, spec)
    problem = prepare(spec.a, spec.b, spec.c, alpha=alpha)
    quad = solve_unipotent_quadratic(problem, tol=tol)
    rep = solve_uv_report(problem, tol)
    a, b, c = problem.a, problem.b, problem.c
    offset = quad_offset(quad)

    unipotent = []
    a_inv = np.linalg.inv(a)
    b_inv = np.linalg.inv(b)
    pair_sum = a_inv @ c @ b_inv
    for q in quad.q_values:
        identity_residual = float(frob(q @ b - a @ q - offset))
        u = 0.5 * (pair_sum - q)
        x = a_inv @ u @ b @ b + u @ b
        unipotent.append({
            "q": sio.matrix_to_pairs(q),
            "identity_residual": identity_residual,
            "derived_solution_residual": float(frob(a @ x - x @ b - c)),
        })
    witness_agreement = None
    if rep.witness is not None and quad.q_values:
        scale = frob(offset) + (frob(a) + frob(b)) * frob(rep.witness.q) + 1e-300
        witness_agreement = bool(
            rep.witness.residuals["unipotent_identity"] <= tol * scale)
    note = None
    if not quad.q_values:
        note = ("no unipotent solution in the enumerated root family; "
                "the two-equation system verdict is authoritative")
    doc = {
        "schema_version": sio.SCHEMA_VERSION,
        "base_roots": [
            {"branch": i,
             "square_residual": float((br @ br - quad.base).norm()),
             "blocks": {
                 "a11": sio.matrix_to_pairs(br.a11), "a12": sio.matrix_to_pairs(br.a12),
                 "a21": sio.matrix_to_pairs(br.a21), "a22": sio.matrix_to_pairs(br.a22)}}
            for i, br in enumerate(quad.base_roots)],
        "y_solution_count": len(quad.y_solutions),
        "unipotent": unipotent,
        "system_witness_consistent": witness_agreement,
        "notes": quad.notes + ([note] if note else []),
        "environment": {
            "alpha": problem.alpha,
            "shift_lambda": problem.lambda_shift,
            "tol": tol,
            "seed": args.seed,
        },
        "generated_at": _now(),
    }
    if args.output:
        args.output.write_text(sio.serialize_report(doc), encoding="utf-8")
    print(f"{args.file}: {len(quad.base_roots)} base roots, "
          f"{len(quad.y_solutions)} quadratic solutions, "
          f"{len(quad.q_values)} unipotent")
    return 0


def cmd_batch(args) -> int:
    directory = args.directory
    if not directory.is_dir():
        raise SchemaError(f"{directory}: not a directory")
    rows = []
    agreements = []
    any_error = False
    for path in sorted(directory.glob("*.json")):
        row = {"file": path.name, "status": None, "certificate_residual": None,
               "oracle_agreement": None, "error": None}
        try:
            spec = sio.load_problem(path)
            alpha, tol = _effective(args, spec)
            verdict = diagnose(spec.a, spec.b, spec.c, alpha=alpha, tol=tol,
                               with_oracle=args.oracle)
            row["status"] = verdict.status.value
            row["certificate_residual"] = float(verdict.certificate_residual)
            row["oracle_agreement"] = verdict.oracle_agreement
            if verdict.oracle_agreement is not None:
                agreements.append(verdict.oracle_agreement)
        except SylvcertError as exc:
            row["error"] = str(exc)
            any_error = True
        rows.append(row)

    rate = (sum(agreements) / len(agreements)) if agreements else None
    doc = {
        "schema_version": sio.SCHEMA_VERSION,
        "rows": rows,
        "oracle_agreement_rate": rate,
        "generated_at": _now(),
    }
    if args.output:
        args.output.write_text(sio.serialize_report(doc), encoding="utf-8")
    for row in rows:
        if row["error"] is not None:
            print(f"{row['file']:<32} ERROR  {row['error']}")
        else:
            agreement = "" if row["oracle_agreement"] is None \
                else f"  oracle={'ok' if row['oracle_agreement'] else 'MISMATCH'}"
            print(f"{row['file']:<32} {row['status']:<16} "
                  f"residual={row['certificate_residual']:.3e}{agreement}")
    if rate is not None:
        print(f"oracle agreement rate: {rate:.1%} over {len(agreements)} decided rows")
    return EXIT_BAD_INPUT if any_error else 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "diagnose": cmd_diagnose,
        "homogeneous": cmd_homogeneous,
        "roots": cmd_roots,
        "batch": cmd_batch,
    }
    try:
        return handlers[args.command](args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except SylvcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
