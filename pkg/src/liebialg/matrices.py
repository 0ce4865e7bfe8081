"""Square matrices over a quadratic tower, with the *-involution X* = conj(X)^T."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .fields import RATIONALS, SpecMismatch, TowerElem, TowerSpec


class Singular(ArithmeticError):
    pass


class DimMismatch(ValueError):
    pass


class InvalidTwist(ValueError):
    """sqrt(d') already lies in K, so the twisting matrix J is not defined."""


class MatK:
    """Immutable n x n matrix whose entries share one TowerSpec."""

    __slots__ = ("spec", "rows", "n")

    def __init__(self, rows: Sequence[Sequence], spec: TowerSpec | None = None):
        rows = [list(r) for r in rows]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise DimMismatch("matrix must be square")
        if spec is None:
            specs = {x.spec for r in rows for x in r if isinstance(x, TowerElem) and x.spec.generators}
            if len(specs) > 1:
                raise SpecMismatch(f"entries from different towers: {specs}")
            spec = specs.pop() if specs else RATIONALS
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", tuple(tuple(spec(x) for x in r) for r in rows))

    def __setattr__(self, name, value):
        raise AttributeError("MatK is immutable")

    # constructors

    @classmethod
    def identity(cls, n: int, spec: TowerSpec = RATIONALS) -> "MatK":
        return cls.diag([1] * n, spec)

    @classmethod
    def zeros(cls, n: int, spec: TowerSpec = RATIONALS) -> "MatK":
        return cls([[0] * n for _ in range(n)], spec)

    @classmethod
    def diag(cls, entries: Sequence, spec: TowerSpec | None = None) -> "MatK":
        n = len(entries)
        if spec is None:
            specs = {x.spec for x in entries if isinstance(x, TowerElem) and x.spec.generators}
            spec = specs.pop() if specs else RATIONALS
        zero = spec.zero()
        return cls([[entries[i] if i == j else zero for j in range(n)] for i in range(n)], spec)

    def lift(self, spec: TowerSpec) -> "MatK":
        return MatK([[spec.embed(x) for x in r] for r in self.rows], spec)

    # access

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entries(self) -> Iterable[TowerElem]:
        for r in self.rows:
            yield from r

    def diagonal(self) -> list[TowerElem]:
        return [self.rows[i][i] for i in range(self.n)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatK):
            return NotImplemented
        return self.n == other.n and all(a == b for a, b in zip(self.entries(), other.entries()))

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"MatK([{body}])"

    # arithmetic

    def _check(self, other: "MatK") -> tuple["MatK", "MatK"]:
        if self.n != other.n:
            raise DimMismatch(f"{self.n} vs {other.n}")
        if self.spec == other.spec:
            return self, other
        if not other.spec.generators:
            return self, other.lift(self.spec)
        if not self.spec.generators:
            return self.lift(other.spec), other
        raise SpecMismatch(f"{self.spec} vs {other.spec}")

    def __add__(self, other: "MatK") -> "MatK":
        a, b = self._check(other)
        return MatK([[x + y for x, y in zip(r, s)] for r, s in zip(a.rows, b.rows)], a.spec)

    def __sub__(self, other: "MatK") -> "MatK":
        return self + (-other)

    def __neg__(self) -> "MatK":
        return MatK([[-x for x in r] for r in self.rows], self.spec)

    def scale(self, c) -> "MatK":
        spec = self.spec
        if isinstance(c, TowerElem) and c.spec != spec:
            if not spec.generators:
                return self.lift(c.spec).scale(c)
            c = spec.embed(c)
        return MatK([[c * x for x in r] for r in self.rows], spec)

    def __matmul__(self, other: "MatK") -> "MatK":
        a, b = self._check(other)
        cols = list(zip(*b.rows))
        zero = a.spec.zero()
        out = []
        for r in a.rows:
            row = []
            for c in cols:
                acc = zero
                for x, y in zip(r, c):
                    if x.coeffs and y.coeffs:
                        acc = acc + x * y
                row.append(acc)
            out.append(row)
        return MatK(out, a.spec)

    def __mul__(self, other):
        if isinstance(other, MatK):
            return self @ other
        return self.scale(other)

    __rmul__ = scale

    def transpose(self) -> "MatK":
        return MatK([list(c) for c in zip(*self.rows)], self.spec)

    @property
    def T(self) -> "MatK":
        return self.transpose()

    def conj(self) -> "MatK":
        return MatK([[x.conj() for x in r] for r in self.rows], self.spec)

    def star(self) -> "MatK":
        """X* = conj(X)^T."""
        return MatK([[self.rows[j][i].conj() for j in range(self.n)] for i in range(self.n)], self.spec)

    def trace(self) -> TowerElem:
        acc = self.spec.zero()
        for x in self.diagonal():
            acc = acc + x
        return acc

    def det(self) -> TowerElem:
        """Bareiss fraction-free elimination with row pivoting."""
        n = self.n
        if n == 0:
            return self.spec.one()
        m = [list(r) for r in self.rows]
        sign = 1
        prev = self.spec.one()
        for k in range(n - 1):
            if not m[k][k]:
                for i in range(k + 1, n):
                    if m[i][k]:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return self.spec.zero()
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
            prev = m[k][k]
        return m[n - 1][n - 1] * sign

    def minor(self, i: int, j: int) -> "MatK":
        return MatK(
            [[x for c, x in enumerate(r) if c != j] for r_i, r in enumerate(self.rows) if r_i != i], self.spec
        )

    def inverse(self) -> "MatK":
        if self.n <= 4:
            return self._inverse_adjugate()
        return self._inverse_gauss()

    def _inverse_adjugate(self) -> "MatK":
        det = self.det()
        if not det:
            raise Singular("matrix is singular")
        n = self.n
        if n == 1:
            return MatK([[det.inverse()]], self.spec)
        inv_det = det.inverse()
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                cof = self.minor(i, j).det()
                if (i + j) % 2:
                    cof = -cof
                out[j][i] = cof * inv_det
        return MatK(out, self.spec)

    def _inverse_gauss(self) -> "MatK":
        n = self.n
        one, zero = self.spec.one(), self.spec.zero()
        m = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(self.rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if m[r][col]), None)
            if piv is None:
                raise Singular("matrix is singular")
            m[col], m[piv] = m[piv], m[col]
            inv = m[col][col].inverse()
            m[col] = [x * inv for x in m[col]]
            for r in range(n):
                if r != col and m[r][col]:
                    f = m[r][col]
                    m[r] = [x - f * y for x, y in zip(m[r], m[col])]
        return MatK([row[n:] for row in m], self.spec)

    # predicates

    def is_identity(self) -> bool:
        return all((x == 1) if i == j else x.is_zero() for i, r in enumerate(self.rows) for j, x in enumerate(r))

    def is_diagonal(self) -> bool:
        return all(x.is_zero() for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def is_unitary(self) -> bool:
        return (self.star() @ self).is_identity()

    # serialization

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "spec": {"generators": list(self.spec.generators), "conj_index": self.spec.conj_index},
            "rows": [[x.to_json() for x in r] for r in self.rows],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MatK":
        sd = data.get("spec", {})
        spec = TowerSpec(tuple(int(a) for a in sd.get("generators", ())), sd.get("conj_index"))
        rows = [[_entry_from_json(x, spec) for x in r] for r in data["rows"]]
        if len(rows) != int(data.get("n", len(rows))):
            raise DimMismatch("row count does not match n")
        return cls(rows, spec)


def _entry_from_json(x, spec: TowerSpec) -> TowerElem:
    if isinstance(x, dict):
        return TowerElem.from_json(x, spec)
    return spec.rational(Fraction(str(x)))


def is_unitary(X: MatK) -> bool:
    return X.is_unitary()


def build_S(n: int, spec: TowerSpec = RATIONALS) -> MatK:
    """Anti-diagonal permutation matrix, S_ij = 1 iff i + j = n + 1."""
    if n < 1:
        raise ValueError("n must be positive")
    return MatK([[1 if i + j == n - 1 else 0 for j in range(n)] for i in range(n)], spec)


def build_J(n: int, dprime, base: TowerSpec = RATIONALS) -> MatK:
    """Twisting matrix over base(sqrt d').

    Row i (1-based) has ones at i and n+1-i for i <= (n+1)/2, and
    -sqrt d' at i, sqrt d' at n+1-i otherwise.
    """
    if n < 1:
        raise ValueError("n must be positive")
    try:
        spec = base.extend(dprime)
    except SpecMismatch as exc:
        raise InvalidTwist(f"sqrt({dprime}) lies in the base field: {exc}") from None
    root = spec.sqrt(dprime)
    rows = [[spec.zero() for _ in range(n)] for _ in range(n)]
    for i in range(1, n + 1):
        if 2 * i <= n + 1:
            rows[i - 1][i - 1] = spec.one()
            rows[i - 1][n - i] = spec.one()
        else:
            rows[i - 1][i - 1] = -root
            rows[i - 1][n - i] = root
    return MatK(rows, spec)
