"""``jm``: command-line front end.

Exit codes: 0 success, 2 parse error or non-rate input, 3 internal assertion,
4 Table 1 mismatch, 5 model is not an S_n-module.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .algebra import NotAModuleError, irrep_multiplicities, table1
from .catalog import SpecError, build_family, parse_model_spec, sample_pis
from .report import analyze, hierarchy, table1_json, table1_text
from .suites import SUITES, run_suite
from .uniformization import expm_reference, expm_uniformization, float_matrix_json, is_rate_matrix

EXIT_OK, EXIT_PARSE, EXIT_INTERNAL, EXIT_MISMATCH, EXIT_NOT_MODULE = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _spec_with_options(args):
    text = args.modelspec
    if getattr(args, "pi", None):
        text = _with_pi(text, args.pi.strip())
    return parse_model_spec(text, basis_file=getattr(args, "basis", None))


def _with_pi(text: str, pi: str) -> str:
    """Insert (or override) the ``pi=`` argument of a spec string."""
    head, at, n = text.rpartition("@")
    if not at:
        return text
    if head.endswith("]") and "[" in head:
        fam, _, inner = head[:-1].partition("[")
        args = [a for a in inner.split(";") if a.strip() and not a.strip().lower().startswith("pi=")]
    else:
        fam, args = head, []
    return f"{fam}[{';'.join(args + ['pi=' + pi])}]@{n}"


def cmd_check(args) -> int:
    spec = _spec_with_options(args)
    report = analyze(spec, group=args.group, samples=args.samples, seed=args.seed)
    if args.md:
        sys.stdout.write(report.to_markdown())
    elif args.json:
        sys.stdout.write(report.dumps() + "\n")
    else:
        print(f"{report.name} ({report.spec}), dimension {report.dimension}")
        for key, val in report.verdicts.items():
            print(f"  {key}: {val}")
        if report.multiplicities:
            print("  multiplicities: " + ", ".join(f"{k}={v}" for k, v in report.multiplicities.items()))
    return EXIT_OK


def cmd_table1(args) -> int:
    pis = sample_pis(4, args.samples, args.seed)
    rows = table1(pis)
    if args.json:
        print(json.dumps(table1_json(rows, pis, args.seed), indent=2))
    else:
        sys.stdout.write(table1_text(rows))
    return EXIT_OK if all(r.matches for r in rows) else EXIT_MISMATCH


def cmd_hierarchy(args) -> int:
    if not 2 <= args.n <= 7:
        raise UsageError("--n must be between 2 and 7")
    graph = hierarchy(args.n)
    if args.dot:
        sys.stdout.write(graph.to_dot())
    elif args.json:
        print(json.dumps(graph.to_json(), indent=2))
    else:
        print("nodes: " + ", ".join(f"{a} ({d})" for a, d in graph.nodes))
        for a, b in graph.edges:
            print(f"  {a} < {b}")
    return EXIT_OK


def cmd_decompose(args) -> int:
    spec = parse_model_spec(args.modelspec, basis_file=args.basis)
    pi = sample_pis(spec.n, 1, args.seed)[0] if spec.random_pi else None
    S = build_family(spec, pi)
    try:
        m = irrep_multiplicities(S)
    except NotAModuleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.verdict is not None and exc.verdict.product is not None:
            print(json.dumps({"moved_basis_element": exc.verdict.product.to_json()}), file=sys.stderr)
        return EXIT_NOT_MODULE
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(f"{spec.text()}: dimension {S.dim}")
    for label, a in m.to_json().items():
        print(f"  {label}: {a}")
    print(f"  dimension audit: {m.dimension()} == {S.dim}")
    return EXIT_OK


def cmd_expm(args) -> int:
    with open(args.input) as fh:
        data = json.load(fh)
    try:
        Q = np.array([[float(Fraction(x)) if isinstance(x, str) else float(x) for x in row] for row in data])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"cannot read matrix: {exc}") from exc
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or not is_rate_matrix(Q, 1e-9):
        raise UsageError("input is not a rate matrix")
    if args.method == "ref":
        out = {"method": "ref", "t": args.t, "M": float_matrix_json(expm_reference(Q, args.t))}
    else:
        M, dec = expm_uniformization(Q, args.t, args.tol)
        out = {"method": "unif", "t": args.t, "tol": args.tol, "M": float_matrix_json(M), **dec.to_json()}
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_suite(args) -> int:
    checks = run_suite(args.name)
    failed = 0
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}" + (f"  [{c.detail}]" if c.detail else ""))
        if not c.passed:
            failed += 1
            if c.witness:
                print("      witness: " + json.dumps(c.witness))
    print(f"{len(checks) - failed}/{len(checks)} passed")
    return EXIT_OK if not failed else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jm", description="Jordan/Lie closure and uniformization checks for Markov models.")
    p.add_argument("--version", action="version", version=f"jm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="closure, module and stability verdicts for one model")
    c.add_argument("modelspec")
    c.add_argument("--pi", help="comma-separated rationals, or 'random'")
    c.add_argument("--group", help="group for the module check, e.g. '(12),(34)'")
    c.add_argument("--samples", type=int, default=5)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--basis", help="JSON list of matrices for Custom@n")
    fmt = c.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--md", action="store_true")
    c.set_defaults(func=cmd_check)

    t = sub.add_parser("table1", help="G-equivariant reversible models on four states")
    t.add_argument("--samples", type=int, default=5)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--json", action="store_true")
    t.set_defaults(func=cmd_table1)

    h = sub.add_parser("hierarchy", help="S_n-symmetric Jordan models and their inclusions")
    h.add_argument("--n", type=int, required=True)
    fmt = h.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true")
    fmt.add_argument("--json", action="store_true")
    h.set_defaults(func=cmd_hierarchy)

    d = sub.add_parser("decompose", help="irreducible S_n multiplicities")
    d.add_argument("modelspec")
    d.add_argument("--basis")
    d.add_argument("--seed", type=int, default=0, help="seed for pi=random")
    d.set_defaults(func=cmd_decompose)

    e = sub.add_parser("expm", help="matrix exponential of a rate matrix")
    e.add_argument("--input", required=True, help="JSON matrix (numbers or 'p/q' strings)")
    e.add_argument("--t", type=float, required=True)
    e.add_argument("--tol", type=float, default=1e-12)
    e.add_argument("--method", choices=("unif", "ref"), default="unif")
    e.set_defaults(func=cmd_expm)

    s = sub.add_parser("suite", help="named identity suites")
    s.add_argument("name", choices=sorted(SUITES))
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (SpecError, UsageError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (AssertionError, ArithmeticError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
