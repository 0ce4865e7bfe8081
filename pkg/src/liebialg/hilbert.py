"""Local Hilbert symbols over Q and the norm-membership test they decide.

Places are primes (``int``) or the string ``"inf"`` for the real place.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Union

from sympy import factorint

Place = Union[int, str]
INF = "inf"

RationalLike = Union[int, Fraction]


@lru_cache(maxsize=4096)
def _prime_factors(m: int) -> tuple[int, ...]:
    m = abs(m)
    if m <= 1:
        return ()
    return tuple(sorted(factorint(m)))


def prime_support(*values: RationalLike) -> list[int]:
    """Primes dividing a numerator or denominator of any of ``values``."""
    primes: set[int] = set()
    for v in values:
        q = Fraction(v)
        primes.update(_prime_factors(q.numerator))
        primes.update(_prime_factors(q.denominator))
    return sorted(primes)


def relevant_places(*values: RationalLike) -> list[Place]:
    """Places where a symbol built from ``values`` may be nontrivial: 2, primes of the values, infinity."""
    primes = set(prime_support(*values))
    primes.add(2)
    return [*sorted(primes), INF]


def valuation(q: RationalLike, p: int) -> int:
    q = Fraction(q)
    if q == 0:
        raise ValueError("valuation of zero")
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def _unit_residue(q: Fraction, p: int, modulus: int) -> int:
    # q must be a p-adic unit
    return q.numerator * pow(q.denominator, -1, modulus) % modulus


def _legendre(u: int, p: int) -> int:
    r = pow(u % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def hilbert_symbol(a: RationalLike, b: RationalLike, place: Place) -> int:
    """Return (a, b)_v in {+1, -1}: +1 iff z^2 = a x^2 + b y^2 has a nontrivial solution in Q_v."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if place == INF:
        return -1 if (a < 0 and b < 0) else 1
    p = int(place)
    alpha, beta = valuation(a, p), valuation(b, p)
    u = a / Fraction(p) ** alpha
    w = b / Fraction(p) ** beta
    if p == 2:
        u8, w8 = _unit_residue(u, 2, 8), _unit_residue(w, 2, 8)
        eps_u, eps_w = ((u8 - 1) // 2) % 2, ((w8 - 1) // 2) % 2
        om_u, om_w = ((u8 * u8 - 1) // 8) % 2, ((w8 * w8 - 1) // 8) % 2
        e = eps_u * eps_w + alpha * om_w + beta * om_u
        return -1 if e % 2 else 1
    up, wp = _unit_residue(u, p, p), _unit_residue(w, p, p)
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * _legendre(up, p) ** (beta % 2) * _legendre(wp, p) ** (alpha % 2)


def symbol_vector(a: RationalLike, b: RationalLike, places: list[Place] | None = None) -> dict[Place, int]:
    if places is None:
        places = relevant_places(a, b)
    return {v: hilbert_symbol(a, b, v) for v in places}


def is_norm_from_quadratic(c: RationalLike, d: RationalLike) -> bool:
    """Decide c in N(Q(sqrt d)^*) by the Hasse norm theorem: (c, d)_v = 1 at every place."""
    c, d = Fraction(c), Fraction(d)
    if c == 0:
        raise NonzeroRequired("norm membership is only defined for nonzero c")
    if d == 0:
        raise NonzeroRequired("d must be nonzero")
    return all(hilbert_symbol(c, d, v) == 1 for v in relevant_places(c, d))


class NonzeroRequired(ValueError):
    pass
