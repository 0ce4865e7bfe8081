"""Exact arithmetic in towers of quadratic extensions Q(sqrt a1, ..., sqrt ak).

An element is stored on the subset basis: bit i of a mask selects sqrt(a_i), so
mask 0b101 is sqrt(a_0) * sqrt(a_2). One generator may be designated as the
conjugated one; ``conj`` flips its sign and fixes every other generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterable, Iterator, Mapping, Optional, Union

from sympy import factorint

from .hilbert import is_norm_from_quadratic

__all__ = [
    "DivisionByZero",
    "SpecMismatch",
    "TowerSpec",
    "TowerElem",
    "RATIONALS",
    "squarefree_part",
    "is_square_rational",
    "is_norm_from_quadratic",
    "as_fraction",
]


class SpecMismatch(ValueError):
    """Operands live in different towers, or a tower would have dependent generators."""


class DivisionByZero(ZeroDivisionError):
    pass


Scalar = Union[int, Fraction]


def as_fraction(q) -> Fraction:
    if isinstance(q, TowerElem):
        return q.to_rational()
    if isinstance(q, str):
        return Fraction(q)
    return Fraction(q)


@lru_cache(maxsize=4096)
def _squarefree_int(m: int) -> int:
    if m == 0:
        raise ValueError("zero has no square-free part")
    sign = -1 if m < 0 else 1
    out = 1
    for p, e in factorint(abs(m)).items():
        if e % 2:
            out *= p
    return sign * out


def squarefree_part(q: Scalar) -> int:
    """The square-free integer s with q = s * (rational square)."""
    q = Fraction(q)
    return _squarefree_int(q.numerator * q.denominator)


def _is_square_int(m: int) -> bool:
    return m >= 0 and isqrt(m) ** 2 == m


def is_square_rational(q: Scalar) -> bool:
    q = Fraction(q)
    return _is_square_int(q.numerator) and _is_square_int(q.denominator)


def rational_sqrt(q: Scalar) -> Fraction:
    q = Fraction(q)
    if not is_square_rational(q):
        raise ValueError(f"{q} is not a rational square")
    return Fraction(isqrt(q.numerator), isqrt(q.denominator))


@dataclass(frozen=True)
class TowerSpec:
    """Generators (square-free integers) and the index of the conjugated one."""

    generators: tuple[int, ...] = ()
    conj_index: Optional[int] = None

    def __post_init__(self):
        for a in self.generators:
            if Fraction(a) == 0:
                raise SpecMismatch("zero generator")
        # sqrt(p/q) = sqrt(pq)/q generates the same field
        gens = tuple(squarefree_part(a) for a in self.generators)
        object.__setattr__(self, "generators", gens)
        for k, a in enumerate(gens):
            if a == 1:
                raise SpecMismatch(f"generator {self.generators[k]} is a rational square")
            for mask in range(1 << k):
                if squarefree_part(a * self._mask_product(mask)) == 1:
                    raise SpecMismatch(f"sqrt({a}) already lies in Q(sqrt{list(gens[:k])})")
        if self.conj_index is not None and not 0 <= self.conj_index < len(gens):
            raise SpecMismatch(f"conj_index {self.conj_index} out of range")

    @classmethod
    def quadratic(cls, d: Scalar) -> "TowerSpec":
        """K = Q(sqrt d) with conjugation sqrt d -> -sqrt d."""
        if Fraction(d) == 0 or is_square_rational(d):
            raise SpecMismatch(f"d = {d} must be a nonzero non-square")
        return cls((squarefree_part(d),), 0)

    @property
    def degree(self) -> int:
        return 1 << len(self.generators)

    @property
    def conj_bit(self) -> int:
        return 0 if self.conj_index is None else 1 << self.conj_index

    @property
    def d(self) -> int:
        """The square-free d with K = F(sqrt d) for the conjugated generator."""
        if self.conj_index is None:
            raise SpecMismatch("tower has no conjugated generator")
        return self.generators[self.conj_index]

    def _mask_product(self, mask: int) -> int:
        out = 1
        for i, a in enumerate(self.generators):
            if mask >> i & 1:
                out *= a
        return out

    def extend(self, a: Scalar) -> "TowerSpec":
        """Adjoin sqrt(a); raises SpecMismatch when sqrt(a) is already in the tower."""
        s = squarefree_part(a)
        if s == 1:
            raise SpecMismatch(f"{a} is a rational square")
        return TowerSpec(self.generators + (s,), self.conj_index)

    def contains(self, other: "TowerSpec") -> bool:
        return self.generators[: len(other.generators)] == other.generators and (
            other.conj_index is None or other.conj_index == self.conj_index
        )

    # element constructors

    def zero(self) -> "TowerElem":
        return TowerElem(self, {})

    def one(self) -> "TowerElem":
        return TowerElem(self, {0: Fraction(1)})

    def rational(self, q: Scalar) -> "TowerElem":
        return TowerElem(self, {0: Fraction(q)})

    def gen(self, i: int) -> "TowerElem":
        return TowerElem(self, {1 << i: Fraction(1)})

    def sqrt(self, q: Scalar) -> "TowerElem":
        """A square root of the rational q inside the tower, if one exists."""
        q = Fraction(q)
        if q == 0:
            return self.zero()
        for mask in range(self.degree):
            ratio = q / self._mask_product(mask)
            if is_square_rational(ratio):
                return TowerElem(self, {mask: rational_sqrt(ratio)})
        raise SpecMismatch(f"sqrt({q}) is not in Q(sqrt{list(self.generators)})")

    def sqrt_d(self) -> "TowerElem":
        return self.gen(self.conj_index)

    def embed(self, z: "TowerElem") -> "TowerElem":
        """Lift an element of a sub-tower (same leading generators) into this tower."""
        if z.spec == self:
            return z
        if z.spec.generators and not self.contains(z.spec):
            raise SpecMismatch(f"cannot embed {z.spec} into {self}")
        return TowerElem(self, z.coeffs)

    def __call__(self, value) -> "TowerElem":
        if isinstance(value, TowerElem):
            return self.embed(value)
        return self.rational(value)


RATIONALS = TowerSpec()


@lru_cache(maxsize=65536)
def _mul_factor(spec: TowerSpec, m1: int, m2: int) -> int:
    return spec._mask_product(m1 & m2)


class TowerElem:
    """Immutable element of a quadratic tower; ``coeffs`` maps subset masks to nonzero rationals."""

    __slots__ = ("spec", "coeffs", "_hash")

    def __init__(self, spec: TowerSpec, coeffs: Mapping[int, Scalar]):
        object.__setattr__(self, "spec", spec)
        clean = {}
        for mask, c in coeffs.items():
            if mask < 0 or mask >= spec.degree:
                raise SpecMismatch(f"subset mask {mask} outside tower {spec}")
            c = Fraction(c)
            if c:
                clean[mask] = c
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("TowerElem is immutable")

    # coercion

    def _coerce(self, other) -> "TowerElem":
        if isinstance(other, TowerElem):
            if other.spec == self.spec:
                return other
            if not other.spec.generators:
                return TowerElem(self.spec, other.coeffs)
            raise SpecMismatch(f"{other.spec} vs {self.spec}")
        if isinstance(other, (int, Fraction)):
            return TowerElem(self.spec, {0: other})
        return NotImplemented

    def _lift_pair(self, other):
        if isinstance(other, TowerElem) and not self.spec.generators and other.spec.generators:
            return TowerElem(other.spec, self.coeffs), other
        o = self._coerce(other)
        return self, o

    # ring structure

    def __add__(self, other):
        if not isinstance(other, (TowerElem, int, Fraction)):
            return NotImplemented
        x, y = self._lift_pair(other)
        out = dict(x.coeffs)
        for m, c in y.coeffs.items():
            out[m] = out.get(m, 0) + c
        return TowerElem(x.spec, out)

    __radd__ = __add__

    def __neg__(self):
        return TowerElem(self.spec, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, (TowerElem, int, Fraction)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TowerElem(self.spec, {m: c * other for m, c in self.coeffs.items()})
        if not isinstance(other, TowerElem):
            return NotImplemented
        x, y = self._lift_pair(other)
        spec = x.spec
        out: dict[int, Fraction] = {}
        for m1, c1 in x.coeffs.items():
            for m2, c2 in y.coeffs.items():
                m = m1 ^ m2
                out[m] = out.get(m, 0) + c1 * c2 * _mul_factor(spec, m1, m2)
        return TowerElem(spec, out)

    __rmul__ = __mul__

    def flip(self, i: int) -> "TowerElem":
        """Apply sqrt(a_i) -> -sqrt(a_i)."""
        bit = 1 << i
        return TowerElem(self.spec, {m: (-c if m & bit else c) for m, c in self.coeffs.items()})

    def inverse(self) -> "TowerElem":
        if not self.coeffs:
            raise DivisionByZero("inverse of zero in a quadratic tower")
        # multiply by the sign-flip over each generator, top down, until rational
        num = self.spec.one()
        w = self
        for i in reversed(range(len(self.spec.generators))):
            c = w.flip(i)
            num = num * c
            w = w * c
        q = w.coeffs.get(0, Fraction(0))
        assert set(w.coeffs) <= {0} and q != 0
        return num * (1 / q)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero")
            return self * (1 / Fraction(other))
        if not isinstance(other, TowerElem):
            return NotImplemented
        x, y = self._lift_pair(other)
        return x * y.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.spec.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # involution and norm

    def conj(self) -> "TowerElem":
        if self.spec.conj_index is None:
            return self
        return self.flip(self.spec.conj_index)

    def norm(self) -> "TowerElem":
        """N(z) = conj(z) * z, an element of the fixed subfield."""
        return self.conj() * self

    # predicates and views

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_rational(self) -> bool:
        return set(self.coeffs) <= {0}

    def is_fixed(self) -> bool:
        """True when the element lies in the fixed field of the conjugation."""
        bit = self.spec.conj_bit
        return not any(m & bit for m in self.coeffs)

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs.get(0, Fraction(0))

    def coeff(self, mask: int) -> Fraction:
        return self.coeffs.get(mask, Fraction(0))

    def items(self) -> Iterator[tuple[int, Fraction]]:
        return iter(sorted(self.coeffs.items()))

    def __eq__(self, other) -> bool:
        if isinstance(other, TowerElem):
            if other.spec != self.spec and self.spec.generators and other.spec.generators:
                return False
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeff(0) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            h = hash(frozenset(self.coeffs.items()))
            object.__setattr__(self, "_hash", h)
        return self._hash

    def __repr__(self) -> str:
        return f"TowerElem({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for m, c in sorted(self.coeffs.items()):
            radicand = self.spec._mask_product(m)
            if m == 0:
                parts.append(str(c))
            else:
                parts.append(f"{c}*sqrt({radicand})" if c != 1 else f"sqrt({radicand})")
        return " + ".join(parts)

    # serialization

    def to_json(self) -> dict:
        return {
            "generators": list(self.spec.generators),
            "conj_index": self.spec.conj_index,
            "coeffs": [
                {
                    "subset": [i for i in range(len(self.spec.generators)) if m >> i & 1],
                    "num": str(c.numerator),
                    "den": str(c.denominator),
                }
                for m, c in sorted(self.coeffs.items())
            ],
        }

    @classmethod
    def from_json(cls, data: dict, spec: TowerSpec | None = None) -> "TowerElem":
        if spec is None:
            spec = TowerSpec(tuple(int(a) for a in data.get("generators", ())), data.get("conj_index"))
        coeffs: dict[int, Fraction] = {}
        for entry in data.get("coeffs", ()):
            mask = sum(1 << int(i) for i in entry["subset"])
            coeffs[mask] = coeffs.get(mask, 0) + Fraction(int(entry["num"]), int(entry.get("den", "1")))
        return cls(spec, coeffs)


def sum_elems(spec: TowerSpec, values: Iterable) -> TowerElem:
    out = spec.zero()
    for v in values:
        out = out + v
    return out
