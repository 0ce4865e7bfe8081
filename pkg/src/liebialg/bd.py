"""Belavin-Drinfeld data for sl(n): admissible triples, r_0 and r_1, and their compatibility checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import sympy

from .fields import TowerElem
from .lie import E, Tensor, Tensor2, ad_tensor, bracket, cartan_part, casimir, cyb, swap
from .matrices import MatK, Singular, build_S


class InvalidTriple(ValueError):
    pass


class Infeasible(ArithmeticError):
    pass


class CYBFailure(AssertionError):
    pass


@dataclass(frozen=True)
class AdmissibleTriple:
    """(Gamma1, Gamma2, tau) on the simple roots 1..n-1 of sl(n); root i is E_{i,i+1}."""

    n: int
    gamma1: tuple[int, ...] = ()
    gamma2: tuple[int, ...] = ()
    tau: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gamma1", tuple(sorted(int(i) for i in self.gamma1)))
        object.__setattr__(self, "gamma2", tuple(sorted(int(i) for i in self.gamma2)))
        pairs = self.tau.items() if isinstance(self.tau, Mapping) else self.tau
        object.__setattr__(self, "tau", tuple(sorted((int(a), int(b)) for a, b in pairs)))

    @classmethod
    def trivial(cls, n: int) -> "AdmissibleTriple":
        return cls(n)

    @classmethod
    def make(cls, n: int, tau: Mapping[int, int]) -> "AdmissibleTriple":
        return cls(n, tuple(tau), tuple(tau.values()), tuple(tau.items()))

    @property
    def tau_map(self) -> dict[int, int]:
        return dict(self.tau)

    def is_trivial(self) -> bool:
        return not self.gamma1

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "gamma1": list(self.gamma1),
            "gamma2": list(self.gamma2),
            "tau": {str(a): b for a, b in self.tau},
        }

    @classmethod
    def from_json(cls, data: dict) -> "AdmissibleTriple":
        try:
            n = int(data["n"])
            tau = {int(k): int(v) for k, v in dict(data.get("tau", {})).items()}
            return cls(n, tuple(data.get("gamma1", ())), tuple(data.get("gamma2", ())), tuple(tau.items()))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidTriple(f"malformed triple: {exc}") from None


def triple_problems(t: AdmissibleTriple) -> list[str]:
    problems = []
    simple = set(range(1, t.n))
    tau = t.tau_map
    if t.n < 2:
        problems.append("n must be at least 2")
    if not set(t.gamma1) <= simple or not set(t.gamma2) <= simple:
        problems.append("roots outside 1..n-1")
    if len(set(t.gamma1)) != len(t.gamma1) or len(set(t.gamma2)) != len(t.gamma2):
        problems.append("repeated roots")
    if set(tau) != set(t.gamma1) or len(tau) != len(t.tau):
        problems.append("tau must be defined exactly on gamma1")
    if sorted(tau.values()) != sorted(t.gamma2):
        problems.append("tau is not a bijection onto gamma2")
    if problems:
        return problems
    for i in t.gamma1:
        for j in t.gamma1:
            if i < j and (abs(i - j) == 1) != (abs(tau[i] - tau[j]) == 1):
                problems.append(f"tau does not preserve adjacency of {i}, {j}")
    for i in t.gamma1:
        k, x = 0, i
        while x in tau and k <= len(tau):
            x, k = tau[x], k + 1
        if x in tau:
            problems.append(f"tau is not nilpotent at {i}")
    return problems


def validate_triple(t: AdmissibleTriple) -> bool:
    return not triple_problems(t)


def _require_valid(t: AdmissibleTriple):
    problems = triple_problems(t)
    if problems:
        raise InvalidTriple("; ".join(problems))


def positive_roots(n: int) -> list[tuple[int, int]]:
    """Positive roots as pairs (i, j), i < j, i.e. alpha_i + ... + alpha_{j-1}, root vector E_ij."""
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def _theta(n: int, tau: Mapping[int, int]):
    """The Lie map on the subalgebra generated by E_{i,i+1}, E_{i+1,i} for i in Gamma1."""
    cache: dict = {}

    def image(u):
        if u in cache:
            return cache[u]
        a, b = u
        if abs(a - b) == 1:
            s = min(a, b)
            t = tau[s]
            out = E(n, t, t + 1) if a < b else E(n, t + 1, t)
        elif a < b:
            out = bracket(image((a, a + 1)), image((a + 1, b)))
        else:
            out = bracket(image((a, a - 1)), image((a - 1, b)))
        cache[u] = out
        return out

    return image


def _in_span(root: tuple[int, int], domain: Iterable[int]) -> bool:
    i, j = root
    dom = set(domain)
    return all(k in dom for k in range(i, j))


def build_r1(t: AdmissibleTriple) -> Tensor2:
    """sum_{alpha > 0} e_alpha (x) e_-alpha + sum_{alpha, k >= 1} e_alpha ^ e_{-tau^k alpha}."""
    _require_valid(t)
    n = t.n
    tau = t.tau_map
    theta = _theta(n, tau)
    r = Tensor.zero(n, 2)
    for i, j in positive_roots(n):
        r = r + Tensor.unit(n, (i, j), (j, i))
    for root in positive_roots(n):
        cur = root
        lower = E(n, root[1], root[0])
        while _in_span(cur, tau):
            lower = _apply(theta, lower)
            cur = _root_of(lower, positive=False)
            for (u,), c in lower.terms.items():
                wedge = Tensor.unit(n, root, u, coeff=c) - Tensor.unit(n, u, root, coeff=c)
                r = r + wedge
    return r


def _apply(theta, v: Tensor) -> Tensor:
    out = Tensor.zero(v.n, 1)
    for (u,), c in v.terms.items():
        out = out + theta(u).scale(c)
    return out


def _root_of(v: Tensor, positive: bool) -> tuple[int, int]:
    ((u,),) = v.terms.keys()
    a, b = u
    return (min(a, b), max(a, b))


# ---------------------------------------------------------------------------
# Cartan part


def _cartan_basis(n: int) -> list[list[Fraction]]:
    """H_a = E_aa - E_{a+1,a+1} as diagonal coordinate vectors."""
    out = []
    for a in range(1, n):
        v = [Fraction(0)] * n
        v[a - 1], v[a] = Fraction(1), Fraction(-1)
        out.append(v)
    return out


def _alpha(i: int, h: Sequence[Fraction]) -> Fraction:
    return h[i - 1] - h[i]


@dataclass
class R0Solution:
    """Affine family r_0 = particular + sum_k mu_k * homogeneous[k]."""

    n: int
    particular: Tensor2
    homogeneous: list[Tensor2] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.homogeneous)

    def member(self, params: Sequence = ()) -> Tensor2:
        if len(params) != self.dimension:
            raise ValueError(f"expected {self.dimension} skew parameters, got {len(params)}")
        r = self.particular
        for mu, h in zip(params, self.homogeneous):
            r = r + h.scale(mu if isinstance(mu, TowerElem) else Fraction(mu))
        return r


def _tensor_from_coords(n: int, x: Sequence[Fraction]) -> Tensor2:
    H = _cartan_basis(n)
    m = n - 1
    terms: dict = {}
    for a in range(m):
        for b in range(m):
            c = x[a * m + b]
            if not c:
                continue
            for k in range(n):
                for l in range(n):
                    v = c * H[a][k] * H[b][l]
                    if v:
                        key = ((k + 1, k + 1), (l + 1, l + 1))
                        terms[key] = terms.get(key, 0) + v
    return Tensor(n, 2, terms)


def _r0_system(t: AdmissibleTriple) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Rows over unknowns x_ab (r_0 = sum x_ab H_a (x) H_b), right-hand sides."""
    n = t.n
    m = n - 1
    H = _cartan_basis(n)
    tau = t.tau_map
    omega0 = cartan_part(casimir(n))
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    # r0 + swap(r0) = Omega_0, compared on E_kk (x) E_ll
    for k in range(n):
        for l in range(n):
            row = [Fraction(0)] * (m * m)
            for a in range(m):
                for b in range(m):
                    row[a * m + b] = H[a][k] * H[b][l] + H[a][l] * H[b][k]
            rows.append(row)
            c = omega0.terms.get(((k + 1, k + 1), (l + 1, l + 1)))
            rhs.append(c.to_rational() if c is not None else Fraction(0))
    # (tau(alpha) (x) 1 + 1 (x) alpha) r0 = 0, compared on E_kk
    for i in t.gamma1:
        j = tau[i]
        for k in range(n):
            row = [Fraction(0)] * (m * m)
            for a in range(m):
                for b in range(m):
                    row[a * m + b] = _alpha(j, H[a]) * H[b][k] + _alpha(i, H[b]) * H[a][k]
            rows.append(row)
            rhs.append(Fraction(0))
    return rows, rhs


def solve_r0(t: AdmissibleTriple, n: Optional[int] = None) -> R0Solution:
    _require_valid(t)
    if n is not None and n != t.n:
        raise InvalidTriple("n does not match the triple")
    n = t.n
    rows, rhs = _r0_system(t)
    A = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    bvec = sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in rhs])
    if A.rank() != A.row_join(bvec).rank():
        raise Infeasible("the r_0 system has no solution")
    # least-norm solution x = A^T y: its skew part is orthogonal to the free directions,
    # so the trivial triple gives exactly half the Cartan Casimir
    G = A * A.T
    y, free = G.gauss_jordan_solve(bvec)
    y = y.subs({p: 0 for p in free})
    xs = A.T * y
    x = [Fraction(int(v.p), int(v.q)) for v in xs]
    particular = _tensor_from_coords(n, x)
    homogeneous = []
    for vec in A.nullspace():
        coords = [Fraction(int(v.p), int(v.q)) for v in vec]
        homogeneous.append(_tensor_from_coords(n, coords))
    return R0Solution(n, particular, homogeneous)


def r0_residuals(t: AdmissibleTriple, r0: Tensor) -> bool:
    """Substitute r0 into both defining displays; True when both vanish identically."""
    n = t.n
    if r0 + swap(r0) != cartan_part(casimir(n)):
        return False
    tau = t.tau_map
    for i in t.gamma1:
        j = tau[i]
        acc: dict[int, object] = {}
        for ((k, _), (l, _)), c in r0.terms.items():
            hk = [Fraction(int(q == k)) for q in range(1, n + 1)]
            hl = [Fraction(int(q == l)) for q in range(1, n + 1)]
            a1 = _alpha(j, hk)
            a2 = _alpha(i, hl)
            if a1:
                acc[l] = acc.get(l, 0) + c * a1
            if a2:
                acc[k] = acc.get(k, 0) + c * a2
        if any(v for v in acc.values()):
            return False
    return True


@dataclass
class BDMatrix:
    triple: AdmissibleTriple
    r0: Tensor2
    r1: Tensor2

    @property
    def r(self) -> Tensor2:
        return self.r0 + self.r1

    @property
    def rs(self) -> Tensor2:
        return self.r0 - cartan_part(casimir(self.triple.n)).scale(Fraction(1, 2))

    def to_json(self) -> dict:
        return {"triple": self.triple.to_json(), "r0": self.r0.to_json(), "r1": self.r1.to_json(), "r": self.r.to_json()}


def build_rbd(t: AdmissibleTriple, skew_params: Sequence = ()) -> BDMatrix:
    sol = solve_r0(t)
    params = list(skew_params) if skew_params else [0] * sol.dimension
    r0 = sol.member(params)
    r1 = build_r1(t)
    if r0.spec != r1.spec:
        r1 = r1.lift(r0.spec)
    if not cyb(r0 + r1).is_zero():
        raise CYBFailure(f"CYB(r_BD) != 0 for {t.to_json()}")
    return BDMatrix(t, r0, r1)


def centralizes(M: MatK, r: Tensor) -> bool:
    """True iff (Ad_M (x) Ad_M)(r) = r."""
    if not M.det():
        raise Singular("centralizer test needs an invertible matrix")
    return ad_tensor(M, r) == r


def s_compatibility(t: AdmissibleTriple) -> bool:
    """s(Gamma_i) = Gamma_i and s tau = tau s, with s(i) = n - i."""
    n = t.n
    tau = t.tau_map
    s = lambda i: n - i  # noqa: E731
    if {s(i) for i in t.gamma1} != set(t.gamma1) or {s(i) for i in t.gamma2} != set(t.gamma2):
        return False
    return all(s(tau[i]) == tau[s(i)] for i in t.gamma1)


def check_r0_reality(r0: Tensor, mode: str) -> bool:
    """quadratic: conj(r_s) = -r_s; basic or twisted: conj(r0) = (Ad_S (x) Ad_S)(r0)."""
    n = r0.n
    if mode == "quadratic":
        rs = r0 - cartan_part(casimir(n)).lift(r0.spec).scale(Fraction(1, 2))
        return rs.conj() == -rs
    if mode in ("basic", "twisted"):
        return r0.conj() == ad_tensor(build_S(n, r0.spec), r0)
    raise ValueError(f"unknown mode {mode!r}")
