"""Command-line front end. Every command prints one JSON report on stdout.

Exit codes: 0 all checks pass (or a decision query was answered), 1 a
mathematical check failed, 2 invalid input, 3 undecided within the budget.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from . import bd, cocycles, lie, quaternions
from .fields import SpecMismatch, TowerSpec
from .hilbert import NonzeroRequired, hilbert_symbol
from .matrices import InvalidTwist, MatK, Singular

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_UNDECIDED = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _rational_list(text: str) -> list[Fraction]:
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("empty list")
    return [_rational(p) for p in parts]


_DURATION = re.compile(r"^\s*([0-9]*\.?[0-9]+)\s*(ms|s|m)?\s*$")


def _duration(text: str) -> float:
    m = _DURATION.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"not a duration: {text!r}")
    value, unit = float(m.group(1)), m.group(2) or "s"
    return value * {"ms": 0.001, "s": 1.0, "m": 60.0}[unit]


def _place(text: str):
    if text.lower() in ("inf", "infinity", "oo", "r"):
        return quaternions.INF
    try:
        p = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a place: {text!r}") from None
    from sympy import isprime

    if not isprime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _load_triple(spec: str, n: Optional[int]) -> bd.AdmissibleTriple:
    if spec == "trivial":
        if n is None:
            raise UsageError("--n is required with --triple trivial")
        return bd.AdmissibleTriple.trivial(n)
    try:
        data = json.loads(Path(spec).read_text())
    except FileNotFoundError:
        try:
            data = json.loads(spec)
        except json.JSONDecodeError:
            raise UsageError(f"triple file not found: {spec}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"triple file is not JSON: {exc}") from None
    t = bd.AdmissibleTriple.from_json(data)
    if n is not None and n != t.n:
        raise UsageError("--n disagrees with the triple")
    problems = bd.triple_problems(t)
    if problems:
        raise UsageError("invalid triple: " + "; ".join(problems))
    return t


def _load_matrix(path: str) -> MatK:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read matrix {path}: {exc}") from None
    return MatK.from_json(data.get("X", data) if isinstance(data, dict) else {"rows": data})


def _params(text: Optional[str]) -> list[Fraction]:
    return [] if not text else _rational_list(text)


# ---------------------------------------------------------------------------
# commands; each returns (report, exit code)


def cmd_verify_rmatrix(a) -> tuple[dict, int]:
    t = _load_triple(a.triple, a.n)
    r = bd.build_rbd(t, _params(a.params))
    full = r.r
    cyb_zero = lie.cyb(full).is_zero()
    sym = full + lie.swap(full) == lie.casimir(t.n)
    report = {
        "command": "verify-rmatrix",
        "triple": t.to_json(),
        "valid_triple": True,
        "cyb_zero": cyb_zero,
        "r_plus_r21_equals_omega": sym,
        "r": full.to_json(),
    }
    return report, EXIT_OK if cyb_zero and sym else EXIT_FAIL


def cmd_verify_bialgebra(a) -> tuple[dict, int]:
    t = _load_triple(a.triple, a.n)
    r = bd.build_rbd(t, _params(a.params)).r
    rep = lie.check_cobracket_axioms(r, t.n)
    return {"command": "verify-bialgebra", "triple": t.to_json(), **rep.to_json()}, (
        EXIT_OK if rep.passed else EXIT_FAIL
    )


def cmd_manin_check(a) -> tuple[dict, int]:
    _need(a, "n", "d")
    rep = lie.verify_manin_and_r(a.n, a.d)
    return {"command": "manin-check", **rep.to_json()}, EXIT_OK if rep.passed else EXIT_FAIL


def cmd_construct_cocycle(a) -> tuple[dict, int]:
    _need(a, "d", "diag")
    c = cocycles.construct_cocycle(a.diag, a.d, max_height=a.budget_height, time_budget=a.budget_time)
    ok = (c.X.star() @ c.X) == c.D
    report = {
        "command": "construct-cocycle",
        "d": str(a.d),
        "diag": [str(x) for x in a.diag],
        "blocks": [[i + 1 for i in b] for b in cocycles.minimal_closed_partition(a.diag, a.d)],
        "cocycle": c.to_json(),
        "verified": ok,
    }
    return report, EXIT_OK if ok else EXIT_FAIL


def cmd_cohomologous(a) -> tuple[dict, int]:
    _need(a, "d", "A", "B")
    if len(a.A) != len(a.B):
        raise UsageError("--A and --B must have the same length")
    verdict = cocycles.cohomologous_diag(a.A, a.B, a.d)
    ratios = [x / y for x, y in zip(a.A, a.B)]
    return {
        "command": "cohomologous",
        "d": str(a.d),
        "A": [str(x) for x in a.A],
        "B": [str(x) for x in a.B],
        "ratios_in_norm_group": [cocycles.norm_member(q, TowerSpec.quadratic(a.d)) for q in ratios],
        "verdict": verdict,
    }, EXIT_OK


def cmd_classify(a) -> tuple[dict, int]:
    _need(a, "d", "diag")
    spec = TowerSpec.quadratic(a.d)
    vec = cocycles.norm_class_vector(a.diag, spec)
    closed = cocycles.is_norm_closed(a.diag, spec)
    quats = cocycles.quaternion_tuple(a.diag, a.d)
    report = {
        "command": "classify",
        "d": str(a.d),
        "diag": [str(x) for x in a.diag],
        "norm_closed": closed,
        "class_vector": [str(k) for k in vec.invariant],
        "classes": [str(k) for k in vec.classes],
        "quaternions": [q.to_json() for q in quats],
    }
    if a.times:
        if len(a.times) != len(a.diag):
            raise UsageError("--times must match --diag in length")
        prod = [x * y for x, y in zip(a.diag, a.times)]
        report["product_class_vector"] = [str(k) for k in cocycles.norm_class_vector(prod, spec).invariant]
    return report, EXIT_OK


def cmd_lambda(a) -> tuple[dict, int]:
    _need(a, "d", "lambda_square")
    q = a.lambda_square
    if q == 0:
        raise UsageError("lambda must be nonzero")
    kind = cocycles.lambda_classify(_lambda_elem(q), a.d)
    return {"command": "lambda", "d": str(a.d), "lambda_square": str(q), "kind": kind}, EXIT_OK


def _lambda_elem(q: Fraction):
    from .fields import is_square_rational, rational_sqrt

    if is_square_rational(q):
        return rational_sqrt(q)
    return TowerSpec.quadratic(q).sqrt(q)


def cmd_antidiag(a) -> tuple[dict, int]:
    if a.matrix:
        X = _load_matrix(a.matrix)
    else:
        _need(a, "n")
        X = cocycles.antidiag_example(a.n, cocycles.antidiag_tower(a.d if a.d is not None else 5))
    t = _load_triple(a.triple, X.n) if a.triple != "trivial" else bd.AdmissibleTriple.trivial(X.n)
    A = cocycles.is_antidiag_cocycle(X, bd.build_rbd(t))
    report: dict = {"command": "antidiag", "accepted": True, "cocycle": A.to_json()}
    if t.is_trivial():
        report["normalized"] = cocycles.normalize_antidiag(A).to_json()
    return report, EXIT_OK


def cmd_twisted(a) -> tuple[dict, int]:
    _need(a, "d", "dprime")
    if a.matrix:
        Q = _load_matrix(a.matrix)
    else:
        _need(a, "n")
        Q = MatK.identity(a.n, TowerSpec.quadratic(a.d))
    G = cocycles.twisted_gram(Q, a.d, a.dprime)
    report = {"command": "twisted", "d": str(a.d), "dprime": str(a.dprime), "gram": G.to_json()}
    try:
        T = cocycles.is_twisted_cocycle(Q, Q.n, a.d, a.dprime)
    except cocycles.NotCocycle as exc:
        report.update(accepted=False, reason=str(exc))
        return report, EXIT_FAIL
    report.update(accepted=True, D=T.D.to_json())
    return report, EXIT_OK


def cmd_quat_symbol(a) -> tuple[dict, int]:
    places = [a.p] if a.p is not None else quaternions.QuatAlg(a.a, a.b).places()
    symbols = {str(v): hilbert_symbol(a.a, a.b, v) for v in places}
    alg = quaternions.QuatAlg(a.a, a.b)
    return {"command": "quat symbol", "a": str(a.a), "b": str(a.b), "symbols": symbols, "algebra": alg.to_json()}, EXIT_OK


def cmd_quat_iso(a) -> tuple[dict, int]:
    A = quaternions.QuatAlg(a.a, a.b)
    B = quaternions.QuatAlg(a.a2, a.b2)
    places = A.places(B)
    return {
        "command": "quat iso",
        "A": A.to_json(),
        "B": B.to_json(),
        "symbols_A": {str(v): s for v, s in A.symbols(places).items()},
        "symbols_B": {str(v): s for v, s in B.symbols(places).items()},
        "isomorphic": quaternions.quat_iso(A, B),
    }, EXIT_OK


def cmd_quat_solve_norm(a) -> tuple[dict, int]:
    budget = a.budget if a.budget is not None else a.budget_time
    sol = quaternions.solve_norm_equation(a.c, a.e, a.d, max_height=a.budget_height, time_budget=budget)
    report = {"command": "quat solve-norm", "c": str(a.c), "e": str(a.e), "d": str(a.d), **sol.to_json()}
    if sol.solved:
        report["verified"] = sol.u.norm() + a.c * sol.v.norm() == a.e
        return report, EXIT_OK if report["verified"] else EXIT_FAIL
    if sol.status == "obstructed":
        return report, EXIT_FAIL
    return report, EXIT_UNDECIDED


def _need(a, *names):
    missing = [n for n in names if getattr(a, n, None) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


# ---------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=_rational)
    p.add_argument("--dprime", type=_rational)
    p.add_argument("--diag", type=_rational_list)
    p.add_argument("--triple", default="trivial", help='"trivial" or a JSON file')
    p.add_argument("--params", help="skew parameters for r_0, comma separated")
    p.add_argument("--budget-height", type=int, default=32)
    p.add_argument("--budget-time", type=_duration)
    p.add_argument("--json", dest="json_out", help="also write the report to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="liebialg", description="Exact checks for Lie bialgebra structures on sl(n).")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.set_defaults(func=fn)
        return p

    add("verify-rmatrix", cmd_verify_rmatrix, "CYB and r + r21 = Omega for a Belavin-Drinfeld r-matrix")
    add("verify-bialgebra", cmd_verify_bialgebra, "cocycle, skew and co-Jacobi checks for delta = [r, .]")
    add("manin-check", cmd_manin_check, "Manin triple for su(n, Q, d) and the recovered r-matrix")
    add("construct-cocycle", cmd_construct_cocycle, "build X with X*X = diag")
    p = add("cohomologous", cmd_cohomologous, "compare two diagonal cocycles")
    p.add_argument("--A", type=_rational_list)
    p.add_argument("--B", type=_rational_list)
    p = add("classify", cmd_classify, "norm classes and quaternion algebras of a diagonal")
    p.add_argument("--times", type=_rational_list, help="second diagonal; report the class vector of the product")
    p = add("lambda", cmd_lambda, "basic / quadratic / twisted type of lambda")
    p.add_argument("--lambda-square", type=_rational)
    p = add("antidiag", cmd_antidiag, "anti-diagonal cocycle check and normalization")
    p.add_argument("--matrix")
    p = add("twisted", cmd_twisted, "twisted cocycle predicate")
    p.add_argument("--matrix")

    q = sub.add_parser("quat", help="quaternion algebras over Q")
    qsub = q.add_subparsers(dest="quat_command", required=True)
    s = qsub.add_parser("symbol")
    s.add_argument("-a", type=_rational, required=True)
    s.add_argument("-b", type=_rational, required=True)
    s.add_argument("-p", type=_place)
    s.add_argument("--json", dest="json_out")
    s.set_defaults(func=cmd_quat_symbol)
    s = qsub.add_parser("iso")
    s.add_argument("-a", type=_rational, required=True)
    s.add_argument("-b", type=_rational, required=True)
    s.add_argument("--a2", type=_rational, required=True)
    s.add_argument("--b2", type=_rational, required=True)
    s.add_argument("--json", dest="json_out")
    s.set_defaults(func=cmd_quat_iso)
    s = qsub.add_parser("solve-norm")
    s.add_argument("-c", type=_rational, required=True)
    s.add_argument("-e", type=_rational, required=True)
    s.add_argument("-d", type=_rational, required=True)
    s.add_argument("--budget", type=_duration)
    s.add_argument("--budget-time", type=_duration)
    s.add_argument("--budget-height", type=int, default=64)
    s.add_argument("--json", dest="json_out")
    s.set_defaults(func=cmd_quat_solve_norm)
    return parser


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)


def run(argv: Optional[list[str]] = None) -> tuple[dict, int]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            raise
        return {"status": "invalid", "error": "ArgumentError", "reason": "invalid arguments"}, EXIT_INVALID
    try:
        report, code = args.func(args)
    except (cocycles.Undecided, cocycles.NoPermutationFound) as exc:
        report, code = {"status": "undecided", "reason": str(exc)}, EXIT_UNDECIDED
    except (cocycles.NotCocycle, cocycles.NotClosed, cocycles.NotPositive, cocycles.InternalZero) as exc:
        report, code = {"status": "failed", "error": type(exc).__name__, "reason": str(exc)}, EXIT_FAIL
    except bd.CYBFailure as exc:
        report, code = {"status": "failed", "error": "CYBFailure", "reason": str(exc)}, EXIT_FAIL
    except (
        UsageError,
        bd.InvalidTriple,
        cocycles.TripleIncompatible,
        cocycles.Unclassifiable,
        InvalidTwist,
        SpecMismatch,
        NonzeroRequired,
        Singular,
        ZeroDivisionError,
        ValueError,
        KeyError,
    ) as exc:
        report, code = {"status": "invalid", "error": type(exc).__name__, "reason": str(exc)}, EXIT_INVALID
    out = getattr(args, "json_out", None)
    if out:
        Path(out).write_text(dumps(report) + "\n")
    return report, code


def main(argv: Optional[list[str]] = None) -> int:
    report, code = run(argv)
    print(dumps(report))
    label = {0: "ok", 1: "check failed", 2: "invalid input", 3: "undecided"}[code]
    print(f"liebialg: {label}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
