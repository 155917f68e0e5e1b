"""Command-line front end over JSON files.

Commands: gen, represent, verify, decompose, estimate, demo-remark6,
lemma2, dims.  All files carry exact fraction strings and 1-based indices;
floats appear only in convergence reports.  Every command is deterministic
given its arguments and seed.

Exit codes: 0 success, 1 I/O failure, 2 invalid arguments, 3 class
violation, 4 check failure.
"""

from __future__ import annotations

import argparse
import json
import math
import multiprocessing
import os
import sys
from pathlib import Path

from equicurv import constructions
from equicurv.connections import (
    PolyConnection,
    curvature_at,
    curvature_field,
    lemma2_report,
    omega,
    ricci_field,
    weyl_projective_field,
)
from equicurv.errors import ClassViolationError
from equicurv.operators import (
    CurvatureOperator,
    OperatorClass,
    decompose_equiaffine,
    random_operator,
    ricci,
    space_dimension,
)
from equicurv.poly import Poly
from equicurv.report import VerificationReport

EXIT_OK = 0
EXIT_IO = 1
EXIT_ARGS = 2
EXIT_CLASS = 3
EXIT_CHECK = 4

OUTDIR_ENV = "EQUICURV_OUTDIR"


def _out_path(path):
    p = Path(path)
    base = os.environ.get(OUTDIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _write_json(path, data):
    p = _out_path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return p


def _read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _print_report(report):
    for line in report.summary_lines():
        print(line)


def _print_checks_as_booleans(report):
    for c in report.checks:
        line = f"{c.name}: {str(c.passed).lower()}"
        if c.witness:
            details = ", ".join(f"{k} = {v}" for k, v in c.witness.items()) \
                if isinstance(c.witness, dict) else str(c.witness)
            line += f" ({details})"
        print(line)


# -- commands -----------------------------------------------------------------

def cmd_gen(args):
    try:
        op = random_operator(args.dim, args.klass, args.seed)
    except (ClassViolationError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ARGS
    try:
        _write_json(args.out, op.to_json_dict())
    except OSError as err:
        print(f"error: cannot write {args.out}: {err}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def cmd_represent(args):
    try:
        op = CurvatureOperator.from_json_dict(_read_json(args.infile))
    except OSError as err:
        print(f"error: cannot read {args.infile}: {err}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, ValueError) as err:
        print(f"error: bad operator file: {err}", file=sys.stderr)
        return EXIT_ARGS
    try:
        conn, series = constructions.construct_connection(
            args.method, op, n_layers=args.order)
    except ClassViolationError as err:
        print(f"error: {err}", file=sys.stderr)
        if err.witness:
            print(f"witness: {json.dumps(err.witness)}", file=sys.stderr)
        return EXIT_CLASS
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ARGS
    try:
        _write_json(args.out, conn.to_json_dict())
        if series is not None:
            sidecar = args.series_out or str(Path(args.out).with_suffix("")) + ".series.json"
            _write_json(sidecar, series.to_json_dict())
    except OSError as err:
        print(f"error: cannot write output: {err}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _parse_checks(spec_text):
    checks = []
    for token in spec_text.split(","):
        token = token.strip()
        if not token:
            continue
        if ":" in token:
            name, arg = token.split(":", 1)
            checks.append((name, arg))
        else:
            checks.append((token, None))
    return checks


def _run_checks(conn, checks, max_degree):
    report = VerificationReport(metadata={"dim": conn.dim})
    if max_degree is not None and conn.max_degree() > max_degree:
        raise ValueError(
            f"connection degree {conn.max_degree()} exceeds --max-degree "
            f"{max_degree}; raise the guard to run this exact check")
    for name, arg in checks:
        if name == "torsion-free":
            report.add("torsion-free", True)  # enforced at parse time
        elif name == "symmetries":
            rep = curvature_field(conn).symmetry_report()
            for c in rep.checks:
                report.add(f"symmetries.{c.name}", c.passed, c.witness)
        elif name == "matches":
            op = CurvatureOperator.from_json_dict(_read_json(arg))
            got = curvature_at(conn, [0] * conn.dim)
            witness = None
            if got != op:
                diff = got - op
                i, j, k, l, v = next(diff.nonzero_entries())
                witness = {"indices": [i + 1, j + 1, k + 1, l + 1], "value": str(v)}
            report.add("matches", got == op, witness)
        elif name == "lemma2":
            rep = lemma2_report(conn)
            for c in rep.checks:
                report.add(f"lemma2.{c.name}", c.passed, c.witness)
        elif name == "ricci-order":
            want = int(arg)
            rho = ricci_field(conn)
            order = min(p.vanishing_order() for row in rho for p in row)
            report.add(f"ricci-order:{want}", order >= want,
                       {"order": "inf" if order == math.inf else int(order)})
        elif name == "omega-zero":
            om = omega(conn)
            witness = None
            if not om.is_zero():
                i = next(i for i, p in enumerate(om.comps) if not p.is_zero)
                exps, coef = om.comps[i].terms()[0]
                witness = {"component": i + 1,
                           "monomial": Poly.monomial(conn.dim, exps).pretty(),
                           "value": str(coef)}
            report.add("omega-zero", om.is_zero(), witness)
        elif name == "weyl-zero":
            field = weyl_projective_field(conn)
            m = conn.dim
            witness = None
            for i in range(m):
                for j in range(m):
                    for k in range(m):
                        for l in range(m):
                            if not field.comp[i][j][k][l].is_zero:
                                witness = {"indices": [i + 1, j + 1, k + 1, l + 1]}
                                break
                        if witness:
                            break
                    if witness:
                        break
                if witness:
                    break
            report.add("weyl-zero", witness is None, witness)
        else:
            raise ValueError(f"unknown check {name!r}")
    return report


def _verify_one(payload):
    path, checks, max_degree = payload
    conn = PolyConnection.from_json_dict(_read_json(path))
    report = _run_checks(conn, checks, max_degree)
    return str(path), report.to_json_dict(), report.passed


def cmd_verify(args):
    try:
        checks = _parse_checks(args.checks)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ARGS
    in_path = Path(args.infile)
    try:
        if in_path.is_dir():
            files = sorted(in_path.glob("*.json"))
            payloads = [(str(f), checks, args.max_degree) for f in files]
            if args.jobs > 1:
                with multiprocessing.Pool(args.jobs) as pool:
                    results = pool.map(_verify_one, payloads)
            else:
                results = [_verify_one(p) for p in payloads]
            results.sort(key=lambda r: r[0])
            aggregate = {"reports": [
                {"path": path, **report} for path, report, _ in results]}
            all_passed = all(passed for _, _, passed in results)
            if args.out:
                _write_json(args.out, aggregate)
            for path, report, passed in results:
                print(f"{path}: {'pass' if passed else 'FAIL'}")
            return EXIT_OK if all_passed else EXIT_CHECK
        conn = PolyConnection.from_json_dict(_read_json(args.infile))
    except OSError as err:
        print(f"error: cannot read {args.infile}: {err}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, ValueError) as err:
        print(f"error: bad connection file: {err}", file=sys.stderr)
        return EXIT_ARGS
    try:
        report = _run_checks(conn, checks, args.max_degree)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO
    except (ClassViolationError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ARGS
    if args.out:
        _write_json(args.out, report.to_json_dict())
    _print_report(report)
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_decompose(args):
    try:
        op = CurvatureOperator.from_json_dict(_read_json(args.infile))
    except OSError as err:
        print(f"error: cannot read {args.infile}: {err}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, ValueError) as err:
        print(f"error: bad operator file: {err}", file=sys.stderr)
        return EXIT_ARGS
    try:
        part_s, part_p = decompose_equiaffine(op)
    except ClassViolationError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CLASS
    report = VerificationReport(metadata={"dim": op.dim})
    report.add("reconstitution_exact", part_s + part_p == op)
    report.add("trace_free_part_ricci_zero", ricci(part_p).is_zero())
    try:
        _write_json(f"{args.out_prefix}_s.json", part_s.to_json_dict())
        _write_json(f"{args.out_prefix}_p.json", part_p.to_json_dict())
        _write_json(f"{args.out_prefix}_report.json", report.to_json_dict())
    except OSError as err:
        print(f"error: cannot write outputs: {err}", file=sys.stderr)
        return EXIT_IO
    _print_report(report)
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_estimate(args):
    try:
        series = constructions.RicciFlatSeries.from_json_dict(_read_json(args.infile))
    except OSError as err:
        print(f"error: cannot read {args.infile}: {err}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, ValueError) as err:
        print(f"error: bad series file: {err}", file=sys.stderr)
        return EXIT_ARGS
    if series.layer_count < 2:
        print("error: need a series with at least 2 layers", file=sys.stderr)
        return EXIT_ARGS
    report = constructions.convergence_report(
        series, samples=args.samples, seed=args.seed)
    if args.out:
        try:
            _write_json(args.out, report)
        except OSError as err:
            print(f"error: cannot write {args.out}: {err}", file=sys.stderr)
            return EXIT_IO
    total = sum(layer["violations"] for layer in report["per_layer"])
    for layer in report["per_layer"]:
        print(f"layer nu={layer['nu']}: max_ratio={layer['max_ratio']:.6g} "
              f"violations={layer['violations']}")
    return EXIT_OK if total == 0 else EXIT_CHECK


def cmd_demo_remark6(args):
    report = constructions.remark6_demo(max_layers=args.order)
    if args.out:
        _write_json(args.out, report.to_json_dict())
    _print_checks_as_booleans(report)
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_lemma2(args):
    try:
        conn = PolyConnection.from_json_dict(_read_json(args.infile))
    except OSError as err:
        print(f"error: cannot read {args.infile}: {err}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, ValueError) as err:
        print(f"error: bad connection file: {err}", file=sys.stderr)
        return EXIT_ARGS
    report = lemma2_report(conn)
    if args.out:
        _write_json(args.out, report.to_json_dict())
    _print_report(report)
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_dims(args):
    try:
        if args.klass:
            data = {"dim": args.dim, "class": args.klass,
                    "dimension": space_dimension(args.dim, args.klass)}
        else:
            data = {"dim": args.dim, "classes": {
                klass.value: space_dimension(args.dim, klass)
                for klass in OperatorClass}}
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ARGS
    print(json.dumps(data, indent=2))
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="equicurv",
        description="Exact curvature-operator representability toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    classes = [k.value for k in OperatorClass]

    p = sub.add_parser("gen", help="generate a seeded random operator")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--class", dest="klass", choices=classes, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("represent", help="construct a connection for an operator")
    p.add_argument("--method", choices=["thm1", "thm3", "thm4", "thm5",
                                        "generic", "equiaffine", "proj-flat",
                                        "ricci-flat"], required=True)
    p.add_argument("--order", type=int, default=2,
                   help="layer count for the ricci-flat series (thm5)")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--series-out", dest="series_out")
    p.set_defaults(func=cmd_represent)

    p = sub.add_parser("verify", help="run checks against a connection file or directory")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--checks", default="symmetries",
                   help="comma list: symmetries, matches:OP.json, lemma2, "
                        "ricci-order:K, omega-zero, weyl-zero, torsion-free")
    p.add_argument("--out")
    p.add_argument("--max-degree", type=int, default=None,
                   help="refuse connections whose entries exceed this degree")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers for directory verification")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose",
                       help="split an equiaffine operator into its two summands")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out-prefix", dest="out_prefix", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("estimate", help="sample the geometric layer bound of a series")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("demo-remark6",
                       help="golden walkthrough of the corrected construction")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_demo_remark6)

    p = sub.add_parser("lemma2", help="evaluate the four equiaffinity conditions")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lemma2)

    p = sub.add_parser("dims", help="dimensions of the operator classes")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--class", dest="klass", choices=classes)
    p.set_defaults(func=cmd_dims)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
