from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from liebialg.fields import (
    RATIONALS,
    DivisionByZero,
    SpecMismatch,
    TowerElem,
    TowerSpec,
    is_square_rational,
    squarefree_part,
)
from oracles import numeric, poly_conj, reduce, same, to_poly

K5 = TowerSpec.quadratic(5)
KI = TowerSpec.quadratic(-1)
TOWER = TowerSpec((-1, 2, 5), 2)
TOWERS = [K5, KI, TowerSpec((2, 3), 0), TOWER]

small = st.fractions(min_value=-6, max_value=6, max_denominator=4)


@st.composite
def elems(draw, spec):
    return TowerElem(spec, {m: draw(small) for m in range(spec.degree)})


@st.composite
def spec_and_pair(draw):
    spec = draw(st.sampled_from(TOWERS))
    return spec, draw(elems(spec)), draw(elems(spec))


# --- specification and normalization


def test_generators_are_normalized_to_squarefree():
    assert TowerSpec((8,)).generators == (2,)
    assert TowerSpec((Fraction(1, 2),)).generators == (2,)
    assert TowerSpec((-12,)).generators == (-3,)


@pytest.mark.parametrize("gens", [(0,), (4,), (2, 8), (2, 3, 6), (-1, -4)])
def test_bad_generators_rejected(gens):
    with pytest.raises(SpecMismatch):
        TowerSpec(gens)


def test_quadratic_rejects_squares():
    with pytest.raises(SpecMismatch):
        TowerSpec.quadratic(9)


def test_extend_rejects_dependent_generator():
    with pytest.raises(SpecMismatch):
        TowerSpec((2, 3)).extend(6)
    assert TowerSpec((2,), 0).extend(3).generators == (2, 3)


def test_squarefree_and_square_helpers():
    assert squarefree_part(Fraction(18, 5)) == 10
    assert squarefree_part(-1) == -1
    assert is_square_rational(Fraction(9, 4))
    assert not is_square_rational(-4)


# --- basic arithmetic, values checked by hand


def test_product_of_generators():
    spec = TowerSpec((2, 3))
    assert spec.gen(0) * spec.gen(1) == TowerElem(spec, {3: 1})
    assert str(spec.gen(0) * spec.gen(1)) == "sqrt(6)"
    assert spec.gen(0) * spec.gen(0) == 2


def test_gaussian_quotient():
    i = KI.sqrt_d()
    assert (1 + i) / (1 - i) == i


def test_conj_and_norm():
    i = KI.sqrt_d()
    z = 3 + 4 * i
    assert z.conj() == 3 - 4 * i
    assert z.norm() == 25
    r = K5.sqrt_d()
    assert (2 + r).norm() == -1


def test_sqrt_lookup():
    assert TOWER.sqrt(-2) == TOWER.gen(0) * TOWER.gen(1)
    assert TOWER.sqrt(Fraction(5, 4)) == TOWER.gen(2) * Fraction(1, 2)
    with pytest.raises(SpecMismatch):
        TOWER.sqrt(3)


def test_zero_inverse_raises():
    with pytest.raises(DivisionByZero):
        K5.zero().inverse()
    with pytest.raises(DivisionByZero):
        K5.one() / 0


def test_mixing_towers_raises():
    with pytest.raises(SpecMismatch):
        K5.sqrt_d() + KI.sqrt_d()


def test_rationals_coerce_into_any_tower():
    q = RATIONALS.rational(Fraction(1, 3))
    z = K5.sqrt_d() + q
    assert z.spec == K5
    assert (q * K5.sqrt_d()).spec == K5


def test_embed_subtower():
    big = TowerSpec((-1, 2), 0)
    z = KI.sqrt_d() + 1
    assert big.embed(z) * big.gen(1) == TowerElem(big, {2: 1, 3: 1})


# --- properties against the polynomial oracle


@given(spec_and_pair())
def test_multiplication_matches_oracle(data):
    spec, a, b = data
    assert same(to_poly(a) * to_poly(b), to_poly(a * b), spec)


@given(spec_and_pair())
def test_addition_matches_oracle(data):
    spec, a, b = data
    assert reduce(to_poly(a) + to_poly(b) - to_poly(a + b), spec) == 0


@given(spec_and_pair())
def test_inverse(data):
    spec, a, _ = data
    if a.is_zero():
        return
    assert a * a.inverse() == 1
    assert abs(numeric(a) * numeric(a.inverse()) - 1) < 1e-9


@given(spec_and_pair())
def test_conj_is_ring_automorphism(data):
    spec, a, b = data
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()
    assert a.conj().conj() == a
    assert same(poly_conj(to_poly(a), spec), to_poly(a.conj()), spec)


@given(spec_and_pair())
def test_norm_is_multiplicative_and_fixed(data):
    spec, a, b = data
    assert (a * b).norm() == a.norm() * b.norm()
    assert a.norm().is_fixed()


@given(spec_and_pair())
def test_json_roundtrip(data):
    spec, a, _ = data
    assert TowerElem.from_json(a.to_json()) == a
    assert TowerElem.from_json(a.to_json()).spec == spec


@given(spec_and_pair(), st.integers(min_value=-3, max_value=4))
def test_power(data, k):
    spec, a, _ = data
    if a.is_zero() and k < 0:
        return
    expected = spec.one()
    base = a if k >= 0 else a.inverse()
    for _ in range(abs(k)):
        expected = expected * base
    assert a**k == expected


def test_hash_consistent_with_equality():
    a = K5.sqrt_d() + 1
    b = 1 + K5.sqrt_d()
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1
