"""Exact tensor calculus on gl(n) in the matrix-unit basis.

A tensor of order k is a sparse map from k-tuples of matrix units E_ij
(1-based (i, j) pairs) to tower coefficients. Order 1 tensors are elements
of gl(n) itself. The invariant form is the trace form tr(XY); Casimir
elements and the Drinfeld-Jimbo r-matrix are normalized for it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

from .fields import RATIONALS, SpecMismatch, TowerElem, TowerSpec
from .matrices import MatK, Singular

Unit = tuple[int, int]


def _unify(a: TowerSpec, b: TowerSpec) -> TowerSpec:
    if a == b or not b.generators:
        return a
    if not a.generators:
        return b
    raise SpecMismatch(f"{a} vs {b}")


class Tensor:
    """Sparse element of gl(n)^{(x) order}, canonical: zero coefficients are never stored."""

    __slots__ = ("n", "order", "spec", "terms")

    def __init__(self, n: int, order: int, terms: Mapping[tuple, object] = (), spec: TowerSpec | None = None):
        terms = dict(terms)
        if spec is None:
            specs = {c.spec for c in terms.values() if isinstance(c, TowerElem) and c.spec.generators}
            if len(specs) > 1:
                raise SpecMismatch(f"coefficients from different towers: {specs}")
            spec = specs.pop() if specs else RATIONALS
        clean = {}
        for key, c in terms.items():
            key = tuple(tuple(u) for u in key)
            if len(key) != order or any(not (1 <= i <= n and 1 <= j <= n) for i, j in key):
                raise ValueError(f"bad key {key} for order {order}, n={n}")
            c = spec(c)
            if c:
                clean[key] = c
        self.n, self.order, self.spec, self.terms = n, order, spec, clean

    # constructors

    @classmethod
    def zero(cls, n: int, order: int, spec: TowerSpec = RATIONALS) -> "Tensor":
        return _make(n, order, {}, spec)

    @classmethod
    def unit(cls, n: int, *units: Unit, coeff=1, spec: TowerSpec = RATIONALS) -> "Tensor":
        return _make(n, len(units), {tuple(units): coeff}, spec)

    @classmethod
    def from_matrix(cls, M: MatK) -> "Tensor":
        terms = {((i + 1, j + 1),): x for i, r in enumerate(M.rows) for j, x in enumerate(r) if x}
        return _make(M.n, 1, terms, M.spec)

    def to_matrix(self) -> MatK:
        assert self.order == 1
        rows = [[self.spec.zero() for _ in range(self.n)] for _ in range(self.n)]
        for ((i, j),), c in self.terms.items():
            rows[i - 1][j - 1] = c
        return MatK(rows, self.spec)

    # structure

    def lift(self, spec: TowerSpec) -> "Tensor":
        if spec == self.spec:
            return self
        return _make(self.n, self.order, {k: spec.embed(c) for k, c in self.terms.items()}, spec)

    def _align(self, other: "Tensor") -> tuple["Tensor", "Tensor"]:
        if self.n != other.n or self.order != other.order:
            raise ValueError("tensor shapes differ")
        spec = _unify(self.spec, other.spec)
        return self.lift(spec), other.lift(spec)

    def __add__(self, other: "Tensor") -> "Tensor":
        a, b = self._align(other)
        out = dict(a.terms)
        for k, c in b.terms.items():
            out[k] = out[k] + c if k in out else c
        return _make(a.n, a.order, out, a.spec)

    def __neg__(self) -> "Tensor":
        return _make(self.n, self.order, {k: -c for k, c in self.terms.items()}, self.spec)

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + (-other)

    def scale(self, c) -> "Tensor":
        spec = self.spec
        if isinstance(c, TowerElem):
            spec = _unify(spec, c.spec)
            c = spec.embed(c)
        t = self.lift(spec)
        return _make(t.n, t.order, {k: v * c for k, v in t.terms.items()}, spec)

    def __mul__(self, c) -> "Tensor":
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.n == other.n and self.order == other.order and (self - other).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def items(self):
        return sorted(self.terms.items())

    def conj(self) -> "Tensor":
        return _make(self.n, self.order, {k: c.conj() for k, c in self.terms.items()}, self.spec)

    def star(self) -> "Tensor":
        """Leg-wise conjugate transpose: (X (x) Y)* = X* (x) Y*."""
        return _make(
            self.n, self.order, {tuple((j, i) for i, j in k): c.conj() for k, c in self.terms.items()}, self.spec
        )

    def permute(self, perm: Sequence[int]) -> "Tensor":
        """Leg l of the result is leg perm[l] of self."""
        return _make(self.n, self.order, {tuple(k[p] for p in perm): c for k, c in self.terms.items()}, self.spec)

    def __repr__(self) -> str:
        if not self.terms:
            return f"Tensor(n={self.n}, order={self.order}, 0)"
        parts = []
        for k, c in self.items():
            legs = " (x) ".join(f"E{i}{j}" for i, j in k)
            parts.append(f"({c}) {legs}")
        return " + ".join(parts)

    # serialization

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"legs": [list(u) for u in k], "coeff": c.to_json()} for k, c in self.items()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Tensor":
        n = int(data["n"])
        terms: dict = {}
        order = None
        spec = None
        for entry in data.get("terms", ()):
            key = tuple((int(u[0]), int(u[1])) for u in entry["legs"])
            order = len(key) if order is None else order
            if len(key) != order:
                raise ValueError("mixed tensor orders")
            c = TowerElem.from_json(entry["coeff"]) if isinstance(entry["coeff"], dict) else Fraction(entry["coeff"])
            if isinstance(c, TowerElem) and c.spec.generators:
                spec = c.spec if spec is None else _unify(spec, c.spec)
            terms[key] = terms.get(key, 0) + c
        order = int(data.get("order", order or 2))
        return _make(n, order, terms, spec)


class GlVec(Tensor):
    """Element of gl(n) as an order-1 tensor."""


class Tensor2(Tensor):
    pass


class Tensor3(Tensor):
    pass


_CLASSES = {1: GlVec, 2: Tensor2, 3: Tensor3}


def _make(n: int, order: int, terms, spec: TowerSpec | None) -> Tensor:
    cls = _CLASSES.get(order, Tensor)
    obj = cls.__new__(cls)
    Tensor.__init__(obj, n, order, terms, spec)
    return obj


def E(n: int, i: int, j: int, coeff=1, spec: TowerSpec = RATIONALS) -> GlVec:
    return _make(n, 1, {((i, j),): coeff}, spec)


def tensor(*vecs: Tensor) -> Tensor:
    """Outer product of tensors (orders add)."""
    out = vecs[0]
    for v in vecs[1:]:
        spec = _unify(out.spec, v.spec)
        terms: dict = {}
        for k1, c1 in out.terms.items():
            for k2, c2 in v.terms.items():
                terms[k1 + k2] = spec.embed(c1) * spec.embed(c2)
        out = _make(out.n, out.order + v.order, terms, spec)
    return out


# ---------------------------------------------------------------------------
# brackets


def unit_bracket(a: Unit, b: Unit) -> list[tuple[Unit, int]]:
    """[E_ij, E_kl] = delta_jk E_il - delta_li E_kj."""
    (i, j), (k, l) = a, b
    out = []
    if j == k:
        out.append(((i, l), 1))
    if l == i:
        out.append(((k, j), -1))
    return out


def bracket(a: Tensor, b: Tensor) -> GlVec:
    spec = _unify(a.spec, b.spec)
    terms: dict = {}
    for (ua,), ca in a.terms.items():
        for (ub,), cb in b.terms.items():
            for u, sign in unit_bracket(ua, ub):
                v = spec.embed(ca) * spec.embed(cb) * sign
                terms[(u,)] = terms[(u,)] + v if (u,) in terms else v
    return _make(a.n, 1, terms, spec)


def act_on_leg(a: GlVec, t: Tensor, leg: int) -> Tensor:
    """ad_a applied to one leg of t."""
    spec = _unify(a.spec, t.spec)
    terms: dict = {}
    for (ua,), ca in a.terms.items():
        ca = spec.embed(ca)
        for key, c in t.terms.items():
            for u, sign in unit_bracket(ua, key[leg]):
                k = key[:leg] + (u,) + key[leg + 1 :]
                v = ca * spec.embed(c) * sign
                terms[k] = terms[k] + v if k in terms else v
    return _make(t.n, t.order, terms, spec)


def ad_diag(a: GlVec, t: Tensor) -> Tensor:
    """(ad_a (x) 1 + 1 (x) ad_a + ...) t, the adjoint action on every leg."""
    out = Tensor.zero(t.n, t.order, _unify(a.spec, t.spec))
    for leg in range(t.order):
        out = out + act_on_leg(a, t, leg)
    return out


# ---------------------------------------------------------------------------
# named tensors


def cartan_h(n: int, i: int) -> GlVec:
    """h_i = E_11 + ... + E_ii - i E_{i+1,i+1}."""
    terms = {((j, j),): 1 for j in range(1, i + 1)}
    terms[((i + 1, i + 1),)] = -i
    return _make(n, 1, terms, RATIONALS)


def sl_basis(n: int) -> list[GlVec]:
    """Matrix units E_ij (i != j) followed by E_kk - E_{k+1,k+1}."""
    out = [E(n, i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    out += [_make(n, 1, {((k, k),): 1, ((k + 1, k + 1),): -1}, RATIONALS) for k in range(1, n)]
    return out


def casimir(n: int) -> Tensor2:
    """Casimir of sl(n) for the trace form."""
    if n < 2:
        raise ValueError("n >= 2 required")
    terms: dict = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                terms[((i, j), (j, i))] = Fraction(1)
            terms[((i, i), (j, j))] = Fraction(int(i == j)) - Fraction(1, n)
    return _make(n, 2, terms, RATIONALS)


def is_diagonal_key(key: tuple) -> bool:
    return all(i == j for i, j in key)


def cartan_part(t: Tensor) -> Tensor:
    return _make(t.n, t.order, {k: c for k, c in t.terms.items() if is_diagonal_key(k)}, t.spec)


def swap(t: Tensor) -> Tensor:
    if t.order != 2:
        raise ValueError("swap needs an order-2 tensor")
    return t.permute((1, 0))


def rdj(n: int) -> Tensor2:
    """Drinfeld-Jimbo r-matrix: half the Cartan Casimir plus sum_{i<j} E_ij (x) E_ji."""
    r = cartan_part(casimir(n)).scale(Fraction(1, 2))
    upper = _make(n, 2, {((i, j), (j, i)): 1 for i in range(1, n + 1) for j in range(i + 1, n + 1)}, RATIONALS)
    return r + upper


# ---------------------------------------------------------------------------
# Yang-Baxter operator and coboundaries


def cyb(r: Tensor) -> Tensor3:
    """[r12, r13] + [r12, r23] + [r13, r23]."""
    spec = r.spec
    n = r.n
    items = list(r.terms.items())
    terms: dict = {}

    def add(k, v):
        if k in terms:
            terms[k] = terms[k] + v
        else:
            terms[k] = v

    for (a_s, b_s), c_s in items:
        for (a_t, b_t), c_t in items:
            cc = c_s * c_t
            for u, sg in unit_bracket(a_s, a_t):
                add((u, b_s, b_t), cc * sg)
            for u, sg in unit_bracket(b_s, a_t):
                add((a_s, u, b_t), cc * sg)
            for u, sg in unit_bracket(b_s, b_t):
                add((a_s, a_t, u), cc * sg)
    return _make(n, 3, terms, spec)


def coboundary(r: Tensor, a: Tensor) -> Tensor2:
    """delta(a) = [r, a (x) 1 + 1 (x) a]."""
    return -ad_diag(a, r)


def _sl_trace(a: Tensor) -> TowerElem:
    acc = a.spec.zero()
    for ((i, j),), c in a.terms.items():
        if i == j:
            acc = acc + c
    return acc


def is_real_coboundary(s: Tensor, elements: Iterable[Tensor]) -> bool:
    """True iff [s, a (x) 1 + 1 (x) a] is fixed by * for every given a."""
    for a in elements:
        b = coboundary(s, a)
        if b.star() != b:
            return False
    return True


@dataclass
class CobracketReport:
    cocycle: bool
    skew: bool
    co_jacobi: bool
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.cocycle and self.skew and self.co_jacobi

    def to_json(self) -> dict:
        return {
            "cocycle": self.cocycle,
            "skew": self.skew,
            "co_jacobi": self.co_jacobi,
            "passed": self.passed,
            "failures": self.failures,
        }


def _label(a: Tensor) -> str:
    return " + ".join(f"{c}*E{i}{j}" for ((i, j),), c in a.items())


def check_cobracket_axioms(r: Tensor, n: Optional[int] = None) -> CobracketReport:
    """Check the cocycle identity, skew-symmetry and co-Jacobi for delta = [r, . ] over the sl(n) basis."""
    n = r.n if n is None else n
    basis = sl_basis(n)
    delta = [coboundary(r, a) for a in basis]
    failures: list[str] = []

    cocycle = True
    for (a, da), (b, db) in product(list(zip(basis, delta)), repeat=2):
        lhs = coboundary(r, bracket(a, b))
        rhs = ad_diag(a, db) - ad_diag(b, da)
        if lhs != rhs:
            cocycle = False
            failures.append(f"cocycle fails on ({_label(a)}, {_label(b)})")
            break

    skew = True
    for a, da in zip(basis, delta):
        if da + swap(da) != 0:
            skew = False
            failures.append(f"delta({_label(a)}) is not skew")
            break

    unit_cache: dict[Unit, Tensor] = {}

    def delta_unit(u: Unit) -> Tensor:
        if u not in unit_cache:
            unit_cache[u] = coboundary(r, E(n, *u))
        return unit_cache[u]

    co_jacobi = True
    for a, da in zip(basis, delta):
        acc = Tensor.zero(n, 3, r.spec)
        for (x, y), c in da.terms.items():
            dx = delta_unit(x)
            acc = acc + tensor(dx, _make(n, 1, {(y,): c}, da.spec))
        cyc = acc + acc.permute((2, 0, 1)) + acc.permute((1, 2, 0))
        if not cyc.is_zero():
            co_jacobi = False
            failures.append(f"co-Jacobi fails on {_label(a)}")
            break
    return CobracketReport(cocycle, skew, co_jacobi, failures)


# ---------------------------------------------------------------------------
# adjoint action of GL(n)


def ad_tensor(X: MatK, t: Tensor) -> Tensor:
    """Conjugate every leg: E_ij -> X E_ij X^{-1}."""
    if X.n != t.n:
        raise ValueError("dimension mismatch")
    spec = _unify(X.spec, t.spec)
    if X.spec != spec:
        X = X.lift(spec)
    if not X.det():
        raise Singular("ad_tensor needs an invertible matrix")
    Xi = X.inverse()
    n = X.n
    image: dict[Unit, list[tuple[Unit, TowerElem]]] = {}

    def leg_image(u: Unit):
        if u not in image:
            i, j = u
            col = [X.rows[p][i - 1] for p in range(n)]
            row = Xi.rows[j - 1]
            image[u] = [((p + 1, q + 1), col[p] * row[q]) for p in range(n) if col[p] for q in range(n) if row[q]]
        return image[u]

    terms: dict = {}
    for key, c in t.terms.items():
        c = spec.embed(c)
        for combo in product(*(leg_image(u) for u in key)):
            v = c
            for _, w in combo:
                v = v * w
            k = tuple(u for u, _ in combo)
            terms[k] = terms[k] + v if k in terms else v
    return _make(n, t.order, terms, spec)


# ---------------------------------------------------------------------------
# su(n, F, d) Manin triple


def _sqrt_d_spec(d) -> tuple[TowerSpec, TowerElem]:
    if isinstance(d, TowerSpec):
        spec = d
        return spec, spec.sqrt_d()
    spec = TowerSpec.quadratic(d)
    return spec, spec.sqrt(Fraction(d))


def su_basis(n: int, d) -> tuple[list[GlVec], list[GlVec]]:
    """The F-bases B_+ of su(n, F, d) and its dual B_- of upper-triangular matrices."""
    spec, root = _sqrt_d_spec(d)
    positive = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    plus: list[GlVec] = []
    minus: list[GlVec] = []
    two_n = Fraction(1, 2 * n)
    for i in range(1, n):
        h = cartan_h(n, i).lift(spec)
        plus.append(h.scale(root))
        minus.append(h.scale(two_n / (i + i * i)))
    for i, j in positive:
        plus.append(E(n, i, j, spec=spec) - E(n, j, i, spec=spec))
        minus.append(E(n, i, j, coeff=-root * two_n, spec=spec))
    for i, j in positive:
        plus.append((E(n, i, j, spec=spec) + E(n, j, i, spec=spec)).scale(root))
        minus.append(E(n, i, j, coeff=two_n, spec=spec))
    return plus, minus


def _split_sqrt_d(u: Tensor, root: TowerElem) -> tuple[Tensor, Tensor]:
    """u = A + sqrt(d) B with A, B fixed by conjugation."""
    c = u.conj()
    A = (u + c).scale(Fraction(1, 2))
    B = (u - c).scale((2 * root).inverse())
    return A, B


def _trace_product(x: Tensor, y: Tensor) -> TowerElem:
    spec = _unify(x.spec, y.spec)
    acc = spec.zero()
    for ((i, j),), c in x.terms.items():
        other = y.terms.get(((j, i),))
        if other is not None:
            acc = acc + spec.embed(c) * spec.embed(other)
    return acc


def manin_pairing(u: Tensor, v: Tensor, n: Optional[int] = None, d=None):
    """<A + sqrt(d) B, C + sqrt(d) D> = 2n tr(AD + BC)."""
    n = u.n if n is None else n
    spec = _unify(u.spec, v.spec)
    root = spec.sqrt_d() if d is None else spec.sqrt(Fraction(d))
    A, B = _split_sqrt_d(u.lift(spec), root)
    C, D = _split_sqrt_d(v.lift(spec), root)
    val = (_trace_product(A, D) + _trace_product(B, C)) * (2 * n)
    return val.to_rational() if val.is_rational() else val


def in_g_plus(a: Tensor) -> bool:
    return a.star() == -a and not _sl_trace(a)


def in_g_minus(a: Tensor) -> bool:
    return (
        all(i <= j for ((i, j),) in a.terms)
        and all(c.is_fixed() for ((i, j),), c in a.terms.items() if i == j)
        and not _sl_trace(a)
    )


@dataclass
class ManinReport:
    n: int
    d: Fraction
    isotropic_plus: bool
    isotropic_minus: bool
    dual: bool
    nondegenerate: bool
    subalgebras: bool
    reconstructed: Tensor2
    matches_sqrt_d_rdj: bool
    matches_scaled_opposite: bool
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            self.isotropic_plus
            and self.isotropic_minus
            and self.dual
            and self.nondegenerate
            and self.subalgebras
            and self.matches_sqrt_d_rdj
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "d": str(self.d),
            "isotropic_plus": self.isotropic_plus,
            "isotropic_minus": self.isotropic_minus,
            "dual": self.dual,
            "nondegenerate": self.nondegenerate,
            "subalgebras": self.subalgebras,
            "r_equals_sqrt_d_rdj": self.matches_sqrt_d_rdj,
            "r_equals_sqrt_d_over_n_rdj21": self.matches_scaled_opposite,
            "reconstructed_r": self.reconstructed.to_json(),
            "passed": self.passed,
            "failures": self.failures,
        }


def _gram(us: Sequence[Tensor], vs: Sequence[Tensor], n: int, d) -> list[list]:
    return [[manin_pairing(u, v, n, d) for v in vs] for u in us]


def verify_manin_bases(n: int, d, plus: Sequence[Tensor], minus: Sequence[Tensor]) -> ManinReport:
    spec, root = _sqrt_d_spec(d)
    failures: list[str] = []
    dd = spec.d if isinstance(d, TowerSpec) else d
    gp = _gram(plus, plus, n, dd)
    gm = _gram(minus, minus, n, dd)
    gpm = _gram(plus, minus, n, dd)
    iso_p = all(x == 0 for row in gp for x in row)
    iso_m = all(x == 0 for row in gm for x in row)
    dual = len(plus) == len(minus) and all(
        gpm[i][j] == (1 if i == j else 0) for i in range(len(plus)) for j in range(len(minus))
    )
    joint = list(plus) + list(minus)
    full = _gram(joint, joint, n, dd)
    nondeg = len(joint) == 2 * (n * n - 1) and bool(MatK(full).det())
    sub = all(in_g_plus(a) for a in plus) and all(in_g_minus(a) for a in minus)
    sub = sub and all(in_g_plus(bracket(a, b)) for a in plus for b in plus)
    sub = sub and all(in_g_minus(bracket(a, b)) for a in minus for b in minus)
    for name, ok in [("isotropy of B_+", iso_p), ("isotropy of B_-", iso_m), ("duality", dual),
                     ("non-degeneracy", nondeg), ("subalgebra closure", sub)]:
        if not ok:
            failures.append(f"{name} fails")

    r = Tensor.zero(n, 2, spec)
    for e, e_dual in zip(plus, minus):
        r = r + tensor(e.lift(spec), e_dual.lift(spec))
    target = rdj(n).lift(spec).scale(root)
    matches = r == target
    opposite = r == swap(rdj(n)).lift(spec).scale(root * Fraction(1, n))
    if not matches:
        failures.append("sum of e (x) e' differs from sqrt(d) * rdj(n)")
    return ManinReport(n, Fraction(dd), iso_p, iso_m, dual, nondeg, sub, r, matches, opposite, failures)


def verify_manin_and_r(n: int, d) -> ManinReport:
    if n < 2:
        raise ValueError("n >= 2 required")
    plus, minus = su_basis(n, d)
    return verify_manin_bases(n, d, plus, minus)
