"""Quaternion algebras (a, b) over Q, their norm forms, local splitting data, and norm equations over Q(sqrt d)."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Optional, Union

from sympy import symbols
from sympy.solvers.diophantine.diophantine import diop_ternary_quadratic_normal

from .fields import TowerElem, TowerSpec, is_square_rational, squarefree_part
from .hilbert import (
    INF,
    NonzeroRequired,
    Place,
    hilbert_symbol,
    is_norm_from_quadratic,
    relevant_places,
    symbol_vector,
)

__all__ = [
    "QuatAlg",
    "QuatElem",
    "quat_mul",
    "quat_norm",
    "hilbert_symbol",
    "is_split",
    "quat_iso",
    "NormSolution",
    "solve_single_norm",
    "solve_norm_equation",
    "INF",
]

Coeff = Union[int, Fraction, TowerElem]


@dataclass(frozen=True)
class QuatAlg:
    """The algebra with basis 1, i, j, ij and i^2 = a, j^2 = b, ji = -ij."""

    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.a == 0 or self.b == 0:
            raise NonzeroRequired("quaternion algebra parameters must be nonzero")

    def elem(self, x: Coeff = 0, y: Coeff = 0, z: Coeff = 0, w: Coeff = 0) -> "QuatElem":
        return QuatElem(self, x, y, z, w)

    @property
    def one(self) -> "QuatElem":
        return self.elem(1)

    @property
    def i(self) -> "QuatElem":
        return self.elem(0, 1)

    @property
    def j(self) -> "QuatElem":
        return self.elem(0, 0, 1)

    @property
    def ij(self) -> "QuatElem":
        return self.elem(0, 0, 0, 1)

    def places(self, *others: "QuatAlg") -> list[Place]:
        vals = [self.a, self.b]
        for o in others:
            vals += [o.a, o.b]
        return relevant_places(*vals)

    def symbols(self, places: Optional[list[Place]] = None) -> dict[Place, int]:
        return symbol_vector(self.a, self.b, places)

    def ramified(self) -> list[Place]:
        """Places where the algebra does not split (its Brauer data)."""
        return [v for v, s in self.symbols().items() if s == -1]

    def to_json(self) -> dict:
        return {"a": str(self.a), "b": str(self.b), "split": is_split(self), "ramified": [str(v) for v in self.ramified()]}


@dataclass(frozen=True)
class QuatElem:
    alg: QuatAlg
    x: Coeff = 0
    y: Coeff = 0
    z: Coeff = 0
    w: Coeff = 0

    def __add__(self, other: "QuatElem") -> "QuatElem":
        self._same(other)
        return QuatElem(self.alg, self.x + other.x, self.y + other.y, self.z + other.z, self.w + other.w)

    def __neg__(self) -> "QuatElem":
        return QuatElem(self.alg, -self.x, -self.y, -self.z, -self.w)

    def __sub__(self, other: "QuatElem") -> "QuatElem":
        return self + (-other)

    def __mul__(self, other: "QuatElem") -> "QuatElem":
        if not isinstance(other, QuatElem):
            return QuatElem(self.alg, self.x * other, self.y * other, self.z * other, self.w * other)
        return quat_mul(self, other)

    def _same(self, other: "QuatElem"):
        if self.alg != other.alg:
            raise ValueError(f"elements of different algebras {self.alg} and {other.alg}")

    def conj(self) -> "QuatElem":
        return QuatElem(self.alg, self.x, -self.y, -self.z, -self.w)

    def norm(self):
        return quat_norm(self)

    def coords(self) -> tuple:
        return (self.x, self.y, self.z, self.w)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuatElem):
            return NotImplemented
        return self.alg == other.alg and all(p == q for p, q in zip(self.coords(), other.coords()))

    __hash__ = None


def quat_mul(p: QuatElem, q: QuatElem) -> QuatElem:
    p._same(q)
    a, b = p.alg.a, p.alg.b
    x1, y1, z1, w1 = p.coords()
    x2, y2, z2, w2 = q.coords()
    return QuatElem(
        p.alg,
        x1 * x2 + a * y1 * y2 + b * z1 * z2 - a * b * w1 * w2,
        x1 * y2 + y1 * x2 - b * z1 * w2 + b * w1 * z2,
        x1 * z2 + z1 * x2 + a * y1 * w2 - a * w1 * y2,
        x1 * w2 + w1 * x2 + y1 * z2 - z1 * y2,
    )


def quat_norm(q: QuatElem):
    """(x^2 - a y^2) - b (z^2 - a w^2)."""
    a, b = q.alg.a, q.alg.b
    return (q.x * q.x - a * q.y * q.y) - b * (q.z * q.z - a * q.w * q.w)


def is_split(A: QuatAlg) -> bool:
    """Split iff every local Hilbert symbol is trivial."""
    return all(s == 1 for s in A.symbols().values())


def quat_iso(A: QuatAlg, B: QuatAlg) -> bool:
    """Isomorphic over Q iff the local symbol vectors agree everywhere."""
    places = A.places(B)
    return A.symbols(places) == B.symbols(places)


# ---------------------------------------------------------------------------
# norm equations over K = Q(sqrt d)


@dataclass
class NormSolution:
    """Outcome of N(u) + c N(v) = e: a witness, a local obstruction, or undecided."""

    status: str  # "solved" | "obstructed" | "undecided"
    u: Optional[TowerElem] = None
    v: Optional[TowerElem] = None
    obstruction: Optional[Place] = None
    explored_height: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def solved(self) -> bool:
        return self.status == "solved"

    def to_json(self) -> dict:
        out: dict = {"status": self.status}
        if self.u is not None:
            out["u"] = self.u.to_json()
            out["v"] = self.v.to_json()
        if self.obstruction is not None:
            out["obstruction"] = str(self.obstruction)
        if self.status == "undecided":
            out["explored_height"] = self.explored_height
        return out


_X, _Y, _Z = symbols("x y z", integer=True)


def _norm_spec(d) -> TowerSpec:
    if isinstance(d, TowerSpec):
        return d
    return TowerSpec.quadratic(d)


def solve_single_norm(e, d, search_bound: int = 12) -> Optional[TowerElem]:
    """Return u in Q(sqrt d) with N(u) = e, or None when e is not a norm."""
    spec = _norm_spec(d)
    s = spec.d
    e = Fraction(e)
    if e == 0:
        return spec.zero()
    root = spec.gen(spec.conj_index)
    if not is_norm_from_quadratic(e, s):
        return None
    if is_square_rational(e):
        return spec.rational(Fraction(isqrt(e.numerator), isqrt(e.denominator)))
    # small integral witnesses first: they keep outputs readable
    if e.denominator == 1:
        m = e.numerator
        for y in range(1, search_bound + 1):
            t = m + s * y * y
            if t >= 0 and isqrt(t) ** 2 == t:
                return isqrt(t) + y * root
    # x^2 - s y^2 = e with e = p/q: solve X^2 - s Y^2 - (p q) Z^2 = 0, then u = (X + Y sqrt s) / (q Z)
    p, q = e.numerator, e.denominator
    k = p * q
    k0 = squarefree_part(k)
    t = isqrt(k // k0)
    sol = diop_ternary_quadratic_normal(_X**2 - s * _Y**2 - k0 * _Z**2)
    if sol[0] is None:
        return None
    X, Y, Z = (int(v) for v in sol)
    if Z == 0:
        return None
    u = (X + Y * root) * Fraction(t, q * Z)
    assert u.norm() == e
    return u


def _rationals_by_height(height: int):
    """Nonzero rationals p/q with max(|p|, q) == height, in a fixed order."""
    for q in range(1, height + 1):
        for p in ((height,) if q < height else range(1, height + 1)):
            if gcd(p, q) == 1:
                yield Fraction(p, q)
                yield Fraction(-p, q)


def solve_norm_equation(c, e, d, max_height: int = 64, time_budget: Optional[float] = None) -> NormSolution:
    """Find u, v in Q(sqrt d) with N(u) + c N(v) = e.

    Solvability is decided first: e is represented by <1, -d> + c<1, -d> over Q
    iff it is represented at every place; a 5-dimensional form is isotropic at
    every prime, so only the real place can obstruct. The witness is then
    searched for by splitting e = t + (e - t) with both summands norms.
    """
    spec = _norm_spec(d)
    s = spec.d
    c, e = Fraction(c), Fraction(e)
    if c == 0 or e == 0:
        raise NonzeroRequired("c and e must be nonzero")
    if s < 0 and c > 0 and e < 0:
        return NormSolution("obstructed", obstruction=INF)
    deadline = None if time_budget is None else time.monotonic() + time_budget

    u = solve_single_norm(e, spec)
    if u is not None:
        return NormSolution("solved", u, spec.zero())
    v = solve_single_norm(e / c, spec)
    if v is not None:
        return NormSolution("solved", spec.zero(), v)

    for h in range(1, max_height + 1):
        if deadline is not None and time.monotonic() > deadline:
            return NormSolution("undecided", explored_height=h - 1, notes=["time budget exhausted"])
        for t in _rationals_by_height(h):
            if t == e:
                continue
            rest = (e - t) / c
            if is_norm_from_quadratic(t, s) and is_norm_from_quadratic(rest, s):
                u = solve_single_norm(t, spec)
                v = solve_single_norm(rest, spec)
                if u is not None and v is not None:
                    assert u.norm() + c * v.norm() == e
                    return NormSolution("solved", u, v)
    return NormSolution("undecided", explored_height=max_height, notes=["height budget exhausted"])
