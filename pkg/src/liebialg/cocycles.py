"""Belavin-Drinfeld cocycles over K = F(sqrt d): diagonal, anti-diagonal and twisted families.

Norm-membership answers are three-valued. A definite "no" is only given when
the Hilbert-symbol procedure applies, i.e. the fixed field is Q and the
input is rational; everything else that cannot be settled raises Undecided.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Optional, Sequence, Union

from .bd import AdmissibleTriple, BDMatrix, build_rbd, centralizes, check_r0_reality, s_compatibility
from .fields import TowerElem, TowerSpec, is_square_rational, squarefree_part
from .hilbert import is_norm_from_quadratic
from .lie import ad_tensor, is_real_coboundary, rdj, su_basis
from .matrices import MatK, Singular, build_J, build_S
from .quaternions import QuatAlg, solve_norm_equation, solve_single_norm

__all__ = [
    "NotCocycle",
    "NotClosed",
    "NotPositive",
    "NestingUndecided",
    "NoPermutationFound",
    "InternalZero",
    "Undecided",
    "TripleIncompatible",
    "Unclassifiable",
    "DiagCocycle",
    "NormClassVector",
    "AntiDiagCocycle",
    "TwistedCocycle",
    "is_diag_cocycle",
    "coboundary_reality_check",
    "norm_member",
    "cohomologous_diag",
    "is_norm_closed",
    "minimal_closed_partition",
    "nesting_witness",
    "construct_cocycle",
    "norm_class",
    "norm_class_vector",
    "quaternion_tuple",
    "antidiag_tower",
    "antidiag_example",
    "is_antidiag_cocycle",
    "normalize_antidiag",
    "is_twisted_cocycle",
    "twisted_gram",
    "lambda_classify",
]


class NotCocycle(ValueError):
    def __init__(self, message: str, entry: Optional[tuple[int, int]] = None):
        super().__init__(message)
        self.entry = entry


class NotClosed(ValueError):
    pass


class NotPositive(ValueError):
    """d < 0 forces X*X to be positive definite, so negative diagonal entries are impossible."""


class Undecided(RuntimeError):
    pass


class NestingUndecided(Undecided):
    pass


class NoPermutationFound(RuntimeError):
    """No ordering worked within the search; this is not a proof that none exists."""


class InternalZero(ArithmeticError):
    pass


class TripleIncompatible(ValueError):
    pass


class Unclassifiable(ValueError):
    pass


Rational = Union[int, Fraction]


def _frac(x) -> Fraction:
    if isinstance(x, TowerElem):
        return x.to_rational()
    return Fraction(x)


# ---------------------------------------------------------------------------
# norm membership


def norm_member(c, spec: TowerSpec) -> bool:
    """Is c in N(K*) for K = F(sqrt d) given by ``spec``? Raises Undecided when no procedure applies."""
    if isinstance(c, TowerElem):
        if not c.is_rational():
            raise Undecided("norm membership for non-rational elements is not decided")
        c = c.to_rational()
    c = Fraction(c)
    if c == 0:
        raise ValueError("zero is not in K*")
    d = spec.d
    if is_norm_from_quadratic(c, d):
        # a norm from Q(sqrt d) is a norm from any K containing it over F
        return True
    if len(spec.generators) == 1:
        return False
    raise Undecided(f"is {c} a norm from K over a fixed field larger than Q")


def _quadratic_spec(d) -> TowerSpec:
    return d if isinstance(d, TowerSpec) else TowerSpec.quadratic(d)


# ---------------------------------------------------------------------------
# diagonal cocycles


@dataclass
class DiagCocycle:
    X: MatK
    D: MatK

    @property
    def spec(self) -> TowerSpec:
        return self.X.spec

    @property
    def n(self) -> int:
        return self.X.n

    @property
    def d(self) -> int:
        return self.spec.d

    def diagonal(self) -> list[Fraction]:
        return [x.to_rational() for x in self.D.diagonal()]

    def to_json(self) -> dict:
        return {"X": self.X.to_json(), "D": self.D.to_json(), "d": str(self.d)}


def _require_conj(X: MatK, d) -> MatK:
    if X.spec.conj_index is None:
        if d is None:
            raise ValueError("matrix has no conjugation; pass d")
        X = X.lift(_quadratic_spec(d))
    elif d is not None and squarefree_part(Fraction(d)) != X.spec.d:
        raise ValueError(f"matrix lives over sqrt({X.spec.d}), not sqrt({d})")
    return X


def is_diag_cocycle(X: MatK, d=None) -> DiagCocycle:
    """Accept X when X*X is diagonal with entries in F; raise NotCocycle otherwise."""
    X = _require_conj(X, d)
    if not X.det():
        raise Singular("cocycle test needs an invertible matrix")
    P = X.star() @ X
    for i in range(X.n):
        for j in range(X.n):
            x = P[i, j]
            if i != j and x:
                raise NotCocycle(f"X*X has off-diagonal entry {x} at ({i + 1},{j + 1})", (i + 1, j + 1))
            if i == j and not x.is_fixed():
                raise NotCocycle(f"diagonal entry {x} is not in F", (i + 1, i + 1))
    return DiagCocycle(X, P)


def coboundary_reality_check(X: MatK, d=None) -> bool:
    """[s, a (x) 1 + 1 (x) a] is *-fixed for every a in B_+, where s = Ad_X(sqrt d r_DJ)."""
    X = _require_conj(X, d)
    spec = X.spec
    plus, _ = su_basis(X.n, spec)
    s = ad_tensor(X, rdj(X.n).lift(spec).scale(spec.sqrt_d()))
    return is_real_coboundary(s, plus)


def _as_diag_values(D) -> list[Fraction]:
    if isinstance(D, DiagCocycle):
        return D.diagonal()
    if isinstance(D, MatK):
        if not D.is_diagonal():
            raise ValueError("expected a diagonal matrix")
        return [_frac(x) for x in D.diagonal()]
    return [_frac(x) for x in D]


def cohomologous_diag(A, B, d=None) -> bool:
    """(D_A)_ii / (D_B)_ii in N(K*) for every i."""
    if isinstance(A, DiagCocycle):
        spec = A.spec
    elif isinstance(B, DiagCocycle):
        spec = B.spec
    else:
        spec = _quadratic_spec(d)
    a, b = _as_diag_values(A), _as_diag_values(B)
    if len(a) != len(b):
        raise ValueError("cocycles of different sizes")
    if isinstance(A, DiagCocycle) and isinstance(B, DiagCocycle) and A.spec.d != B.spec.d:
        raise ValueError("cocycles over different fields")
    return all(norm_member(x / y, spec) for x, y in zip(a, b))


def _product(values: Sequence[Fraction]) -> Fraction:
    out = Fraction(1)
    for v in values:
        out *= v
    return out


def is_norm_closed(ds: Sequence, d) -> bool:
    return norm_member(_product([_frac(x) for x in ds]), _quadratic_spec(d))


def minimal_closed_partition(ds: Sequence, d) -> list[list[int]]:
    """Split indices into closed subsets, each minimal, taking subsets in size-then-lex order."""
    spec = _quadratic_spec(d)
    vals = [_frac(x) for x in ds]
    remaining = list(range(len(vals)))
    if remaining and not norm_member(_product(vals), spec):
        raise NotClosed(f"{[str(v) for v in vals]} is not norm closed")
    blocks: list[list[int]] = []
    while remaining:
        found = None
        for size in range(1, len(remaining) + 1):
            for sub in combinations(remaining, size):
                if norm_member(_product([vals[i] for i in sub]), spec):
                    found = list(sub)
                    break
            if found:
                break
        assert found is not None  # the remainder is closed
        blocks.append(found)
        remaining = [i for i in remaining if i not in found]
    return blocks


@dataclass
class NestingWitness:
    sigma: list[int]
    witnesses: list[tuple[TowerElem, TowerElem]]

    def to_json(self) -> dict:
        return {
            "sigma": [i + 1 for i in self.sigma],
            "witnesses": [{"x": x.to_json(), "y": y.to_json()} for x, y in self.witnesses],
        }


def _stages(order: Sequence[Fraction], spec: TowerSpec, max_height: int, deadline: Optional[float]):
    """Solve N(x) + c_i N(y) = d_i with c_1 = 1 and c_i the product of the earlier entries."""
    wits = []
    prod = Fraction(1)
    for k, e in enumerate(order):
        c = Fraction(1) if k == 0 else prod
        budget = None if deadline is None else max(0.0, deadline - time.monotonic())
        sol = solve_norm_equation(c, e, spec, max_height=max_height, time_budget=budget)
        if not sol.solved:
            return sol.status, wits
        wits.append((sol.u, sol.v))
        prod *= e
    return "solved", wits


def nesting_witness(ds: Sequence, d, max_height: int = 32, time_budget: Optional[float] = None) -> NestingWitness:
    """Find an ordering sigma for which every stage equation is solvable, with witnesses."""
    spec = _quadratic_spec(d)
    vals = [_frac(x) for x in ds]
    deadline = None if time_budget is None else time.monotonic() + time_budget
    undecided = False
    n = len(vals)
    if n <= 8:
        seen = set()
        for sigma in permutations(range(n)):
            key = tuple(vals[i] for i in sigma)
            if key in seen:
                continue
            seen.add(key)
            status, wits = _stages(key, spec, max_height, deadline)
            if status == "solved":
                return NestingWitness(list(sigma), wits)
            undecided |= status == "undecided"
            if deadline is not None and time.monotonic() > deadline:
                raise NestingUndecided("time budget exhausted")
    else:
        sigma: list[int] = []
        left = list(range(n))
        while left:
            for i in left:
                status, _ = _stages([vals[j] for j in sigma + [i]], spec, max_height, deadline)
                if status == "solved":
                    sigma.append(i)
                    left.remove(i)
                    break
                undecided |= status == "undecided"
            else:
                break
        if not left:
            _, wits = _stages([vals[j] for j in sigma], spec, max_height, deadline)
            return NestingWitness(sigma, wits)
    if undecided:
        raise NestingUndecided("some stage equations were left undecided by the solver budget")
    raise NoPermutationFound("no ordering made every stage equation solvable")


# ---------------------------------------------------------------------------
# construction of X with X*X = D


def _pair(x: Sequence[TowerElem], y: Sequence[TowerElem]) -> TowerElem:
    acc = x[0].spec.zero()
    for a, b in zip(x, y):
        acc = acc + a * b.conj()
    return acc


def _solve(c: Fraction, e: Fraction, spec: TowerSpec, max_height: int, deadline):
    budget = None if deadline is None else max(0.0, deadline - time.monotonic())
    sol = solve_norm_equation(c, e, spec, max_height=max_height, time_budget=budget)
    if sol.status == "undecided":
        raise NestingUndecided(f"N(u) + {c} N(v) = {e} left undecided")
    if sol.status == "obstructed":
        raise NotClosed(f"N(u) + {c} N(v) = {e} has no solution (obstruction at {sol.obstruction})")
    return sol.u, sol.v


def _norm_root(q: Fraction, spec: TowerSpec) -> TowerElem:
    mu = solve_single_norm(q, spec)
    if mu is None:
        raise NotClosed(f"{q} is not a norm")
    return mu


def _block_rows(vals: Sequence[Fraction], spec: TowerSpec, max_height: int, deadline) -> list[list[TowerElem]]:
    """Rows x_1..x_m in K^m with (x_i, x_j) = delta_ij d_i, for a minimal closed block."""
    m = len(vals)
    zero = spec.zero()
    if m == 1:
        return [[_norm_root(vals[0], spec)]]
    a1, a2 = _solve(Fraction(1), vals[0], spec, max_height, deadline)
    rows = [[a1, a2] + [zero] * (m - 2)]
    for i in range(1, m):
        prev = rows[-1]
        lead = prev[i]  # coordinate i+1 of x_i (0-based i)
        if not lead:
            raise InternalZero(f"x_{i}^({i + 1}) vanished; the block is not minimal")
        s = sum((p.norm() for p in prev[:i]), zero).to_rational()
        w = list(prev[:i]) + [-(spec.rational(s) / lead.conj())]
        ww = _pair(w, w).to_rational()
        e = vals[i]
        if i == m - 1:
            mu = _norm_root(e / ww, spec)
            rows.append([mu * x for x in w])
        else:
            a, mu = _solve(ww, e, spec, max_height, deadline)
            rows.append([mu * x for x in w] + [a] + [zero] * (m - i - 2))
    return rows


def _check_rows(rows, vals) -> bool:
    m = len(rows)
    return all(_pair(rows[i], rows[j]) == (vals[i] if i == j else 0) for i in range(m) for j in range(m))


def construct_cocycle(
    D, d, max_height: int = 32, time_budget: Optional[float] = None
) -> DiagCocycle:
    """Build X over Q(sqrt d) with X*X = D by the row-by-row orthogonal construction on minimal closed blocks."""
    spec = _quadratic_spec(d)
    vals = _as_diag_values(D)
    n = len(vals)
    if n == 0:
        raise ValueError("empty diagonal")
    if any(v == 0 for v in vals):
        raise ValueError("diagonal entries must be nonzero")
    if spec.d < 0 and any(v < 0 for v in vals):
        raise NotPositive("over an imaginary quadratic field X*X is positive definite")
    deadline = None if time_budget is None else time.monotonic() + time_budget
    blocks = minimal_closed_partition(vals, spec)
    zero = spec.zero()
    full = [[zero] * n for _ in range(n)]
    for block in blocks:
        bvals = [vals[i] for i in block]
        rows = None
        last_error: Exception | None = None
        for order in _orders(len(block)):
            try:
                cand = _block_rows([bvals[k] for k in order], spec, max_height, deadline)
            except (NotClosed, InternalZero) as exc:
                last_error = exc
                continue
            # the row built for value k belongs to position k
            rows = [None] * len(block)
            for pos, k in enumerate(order):
                rows[k] = cand[pos]
            break
        if rows is None:
            raise last_error if last_error else NotClosed("block construction failed")
        assert _check_rows(rows, bvals)
        # X* has rows x_i, so X[p][q] = conj(x_q^(p))
        for q, xq in enumerate(rows):
            for p, val in enumerate(xq):
                full[block[p]][block[q]] = val.conj()
    X = MatK(full, spec)
    Dm = MatK.diag([spec.rational(v) for v in vals], spec)
    if X.star() @ X != Dm:
        raise AssertionError("constructed X fails X*X = D")
    return DiagCocycle(X, Dm)


def _orders(m: int):
    yield tuple(range(m))
    if m <= 6:
        first = True
        for p in permutations(range(m)):
            if first:
                first = False
                continue
            yield p


# ---------------------------------------------------------------------------
# classification


def norm_class(c, d) -> int:
    """Smallest |k| square-free integer (positive first) with c/k in N(K*)."""
    spec = _quadratic_spec(d)
    c = _frac(c)
    if c == 0:
        raise ValueError("zero has no norm class")
    if len(spec.generators) != 1:
        raise Undecided("norm classes are only computed over Q")
    bound = abs(squarefree_part(c))
    for m in range(1, bound + 1):
        if squarefree_part(m) != m:
            continue
        for k in (m, -m):
            if is_norm_from_quadratic(c / k, spec.d):
                return k
    raise AssertionError("unreachable: c / squarefree(c) is a square")


@dataclass(frozen=True)
class NormClassVector:
    classes: tuple[int, ...]
    d: int

    @property
    def invariant(self) -> tuple[int, ...]:
        """The first n-1 classes; the last one is fixed by det(D) in N(K*)."""
        return self.classes[:-1]

    def is_trivial(self) -> bool:
        return all(k == 1 for k in self.classes)

    def to_json(self) -> dict:
        return {"d": str(self.d), "classes": [str(k) for k in self.classes]}


def norm_class_vector(A, d=None) -> NormClassVector:
    spec = A.spec if isinstance(A, DiagCocycle) else _quadratic_spec(d)
    vals = _as_diag_values(A)
    return NormClassVector(tuple(norm_class(v, spec) for v in vals), spec.d)


def quaternion_tuple(A, d=None) -> list[QuatAlg]:
    if d is None:
        if not isinstance(A, DiagCocycle):
            raise ValueError("d is required for a bare diagonal")
        d = A.d
    return [QuatAlg(Fraction(d), v) for v in _as_diag_values(A)]


# ---------------------------------------------------------------------------
# anti-diagonal cocycles


def antidiag_tower(d=5) -> TowerSpec:
    """F = Q(i, sqrt 2), K = F(sqrt d)."""
    return TowerSpec((-1, 2, squarefree_part(Fraction(d))), 2)


def antidiag_example(n: int, spec: Optional[TowerSpec] = None) -> MatK:
    """X with X*X = S over a tower where -1 and 2 are squares in the fixed field."""
    spec = antidiag_tower() if spec is None else spec
    i_unit = spec.sqrt(-1)
    root2 = spec.sqrt(2)
    if not (i_unit.is_fixed() and root2.is_fixed()):
        raise ValueError("-1 and 2 must be squares in the fixed field")
    zero, one = spec.zero(), spec.one()
    Y = [[zero] * n for _ in range(n)]
    for r in range(1, n + 1):
        if 2 * r <= n + 1:
            Y[r - 1][r - 1] = one
            Y[r - 1][n - r] = one
        else:
            Y[r - 1][r - 1] = -i_unit
            Y[r - 1][n - r] = i_unit
    Ym = MatK(Y, spec)
    if n % 2:
        mid = (n + 1) // 2
        Ym = MatK.diag([root2 if k == mid else one for k in range(1, n + 1)], spec) @ Ym
    return Ym.scale(root2.inverse())


@dataclass
class AntiDiagCocycle:
    X: MatK
    D: MatK
    triple: AdmissibleTriple

    def to_json(self) -> dict:
        return {"X": self.X.to_json(), "D": self.D.to_json(), "triple": self.triple.to_json()}


def is_antidiag_cocycle(X: MatK, rbd: Optional[BDMatrix] = None, d=None) -> AntiDiagCocycle:
    """Accept X when X*X = S D with D in the centralizer of r_BD and conj(d_i) = d_{n+1-i}."""
    X = _require_conj(X, d)
    n = X.n
    if rbd is None:
        rbd = build_rbd(AdmissibleTriple.trivial(n))
    if rbd.triple.n != n:
        raise ValueError("triple size differs from the matrix")
    if not s_compatibility(rbd.triple) or not check_r0_reality(rbd.r0.lift(X.spec), "basic"):
        raise TripleIncompatible("the triple is not compatible with s")
    if not X.det():
        raise Singular("cocycle test needs an invertible matrix")
    S = build_S(n, X.spec)
    Dm = S @ (X.star() @ X)
    for i in range(n):
        for j in range(n):
            if i != j and Dm[i, j]:
                raise NotCocycle(f"X*X is not S times a diagonal (entry {i + 1},{j + 1})", (i + 1, j + 1))
    diag = Dm.diagonal()
    for i in range(n):
        if diag[i].conj() != diag[n - 1 - i]:
            raise NotCocycle(f"conj(d_{i + 1}) != d_{n - i}", (i + 1, i + 1))
    if not rbd.triple.is_trivial() and not centralizes(Dm, rbd.r.lift(X.spec)):
        raise NotCocycle("D does not centralize r_BD")
    return AntiDiagCocycle(X, Dm, rbd.triple)


@dataclass
class NormalizedAntidiag:
    X: MatK
    middle: Optional[TowerElem]
    middle_class: Optional[int]

    def to_json(self) -> dict:
        out: dict = {"X": self.X.to_json()}
        if self.middle is not None:
            out["a"] = self.middle.to_json()
            out["class"] = None if self.middle_class is None else str(self.middle_class)
        return out


def normalize_antidiag(A: AntiDiagCocycle) -> NormalizedAntidiag:
    """Right-multiply by diag(d_i^{-1} for i <= n/2, 1 otherwise); leaves S or S D(a) with a in the middle."""
    if not A.triple.is_trivial():
        raise TripleIncompatible("normalization is defined for the trivial triple")
    X = A.X
    n = X.n
    spec = X.spec
    diag = A.D.diagonal()
    scale = [diag[i].inverse() if i + 1 <= n // 2 else spec.one() for i in range(n)]
    Xn = X @ MatK.diag(scale, spec)
    P = Xn.star() @ Xn
    S = build_S(n, spec)
    middle = None
    cls = None
    if n % 2:
        middle = P[(n - 1) // 2, (n - 1) // 2]
        target = S @ MatK.diag([middle if k == (n - 1) // 2 else spec.one() for k in range(n)], spec)
        if len(spec.generators) == 1 and middle.is_rational():
            cls = norm_class(middle.to_rational(), spec)
    else:
        target = S
    if P != target:
        raise AssertionError("normalization did not reach the canonical form")
    return NormalizedAntidiag(Xn, middle, cls)


# ---------------------------------------------------------------------------
# twisted cocycles


@dataclass
class TwistedCocycle:
    Q: MatK
    D: MatK
    dprime: Fraction

    def to_json(self) -> dict:
        return {"Q": self.Q.to_json(), "D": self.D.to_json(), "dprime": str(self.dprime)}


def twisted_gram(Q: MatK, d, dprime) -> MatK:
    """J^T Q* Q J computed in K(sqrt d')."""
    Q = _require_conj(Q, d)
    base = Q.spec
    J = build_J(Q.n, dprime, base)
    ext = J.spec
    Qe = Q.lift(ext)
    return J.transpose() @ (Qe.star() @ Qe) @ J


def is_twisted_cocycle(Q: MatK, n: Optional[int] = None, d=None, dprime=None) -> TwistedCocycle:
    if dprime is None:
        raise ValueError("d' is required")
    if n is not None and n != Q.n:
        raise ValueError("n does not match the matrix")
    if not Q.det():
        raise Singular("cocycle test needs an invertible matrix")
    G = twisted_gram(Q, d, dprime)
    m = Q.n
    S = build_S(m, G.spec)
    Dm = S @ G
    for i in range(m):
        for j in range(m):
            if i != j and Dm[i, j]:
                raise NotCocycle(f"J^T Q* Q J is not S times a diagonal (entry {i + 1},{j + 1})", (i + 1, j + 1))
    if any(not x for x in Dm.diagonal()):
        raise NotCocycle("diagonal part is singular")
    return TwistedCocycle(Q, Dm, Fraction(dprime))


# ---------------------------------------------------------------------------
# lambda trichotomy


def lambda_classify(lam, d) -> str:
    """basic if lam in F*, quadratic if lam / sqrt d in F*, twisted if lam^2 = d' with sqrt d' not in K."""
    d = Fraction(d)
    if is_square_rational(d):
        raise ValueError("d must not be a square")
    if isinstance(lam, TowerElem):
        if lam.is_zero():
            raise Unclassifiable("lambda must be nonzero")
        sq = lam * lam
        if not sq.is_rational():
            raise Unclassifiable(f"lambda^2 = {sq} is not in F")
        q = sq.to_rational()
    else:
        q = Fraction(lam) ** 2
        if q == 0:
            raise Unclassifiable("lambda must be nonzero")
    if is_square_rational(q):
        return "basic"
    if is_square_rational(q / d):
        return "quadratic"
    if not is_square_rational(q) and not is_square_rational(q * d):
        return "twisted"
    raise Unclassifiable(f"lambda^2 = {q}")  # pragma: no cover
