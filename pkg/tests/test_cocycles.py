import random
from fractions import Fraction
from itertools import product

import pytest
import sympy

from liebialg.bd import AdmissibleTriple, build_rbd
from liebialg.cocycles import (
    DiagCocycle,
    InternalZero,
    NoPermutationFound,
    NotClosed,
    NotCocycle,
    NotPositive,
    TripleIncompatible,
    Unclassifiable,
    Undecided,
    antidiag_example,
    antidiag_tower,
    coboundary_reality_check,
    cohomologous_diag,
    construct_cocycle,
    is_antidiag_cocycle,
    is_diag_cocycle,
    is_norm_closed,
    is_twisted_cocycle,
    lambda_classify,
    minimal_closed_partition,
    nesting_witness,
    norm_class,
    norm_class_vector,
    norm_member,
    normalize_antidiag,
    quaternion_tuple,
    twisted_gram,
)
from liebialg.fields import TowerElem, TowerSpec
from liebialg.hilbert import is_norm_from_quadratic
from liebialg.matrices import InvalidTwist, MatK, Singular, build_J, build_S, is_unitary
from liebialg.quaternions import is_split, quat_iso
from oracles import gram_oracle, mat_poly, reduce, star_poly

KI = TowerSpec.quadratic(-1)
K5 = TowerSpec.quadratic(5)
I_ = KI.sqrt_d()
R5 = K5.sqrt_d()


def oracle_gram_is(X, expected_diag):
    """X* X computed with sympy equals diag(expected_diag)."""
    G = gram_oracle(X)
    n = X.n
    return all(
        reduce(G[i, j] - (sympy.nsimplify(expected_diag[i]) if i == j else 0), X.spec) == 0
        for i in range(n)
        for j in range(n)
    )


def cayley(A, spec):
    Id = MatK.identity(A.n, spec)
    return (Id - A) @ (Id + A).inverse()


# --- the diagonal predicate


def test_identity_is_cocycle():
    c = is_diag_cocycle(MatK.identity(3, KI))
    assert c.D == MatK.identity(3, KI)


def test_gaussian_example():
    c = is_diag_cocycle(MatK([[1, -1], [1, 1]], KI))
    assert c.diagonal() == [2, 2]


def test_non_cocycle_reports_entry():
    with pytest.raises(NotCocycle) as err:
        is_diag_cocycle(MatK([[1, 1], [0, 1]], KI))
    assert err.value.entry in ((1, 2), (2, 1))


def test_needs_d_for_rational_matrix():
    assert is_diag_cocycle(MatK.identity(2), d=5).spec == K5
    with pytest.raises(ValueError):
        is_diag_cocycle(MatK.identity(2))
    with pytest.raises(ValueError):
        is_diag_cocycle(MatK.identity(2, K5), d=-1)
    with pytest.raises(Singular):
        is_diag_cocycle(MatK.zeros(2, K5))


# --- cohomology of diagonal cocycles


def test_cohomologous_examples():
    assert cohomologous_diag([2, 5], [1, 10], d=-1)
    assert not cohomologous_diag([2, 2], [1, 4], d=5)
    A = construct_cocycle([2, 2], 5)
    assert cohomologous_diag(A, A)


def test_cohomologous_rejects_mismatch():
    with pytest.raises(ValueError):
        cohomologous_diag([1, 2], [1], d=5)
    with pytest.raises(ValueError):
        cohomologous_diag(construct_cocycle([1, 1], 5), construct_cocycle([1, 1], -1))


POOLS = {
    -1: [[1, 1], [2, 1], [1, 2], [5, 5], [3, 3], [3, 6], [2, 2], [13, 26]],
    5: [[1, 1], [2, 2], [-1, -1], [2, 8], [3, 3], [1, -1], [2, -2], [7, 7]],
}


@pytest.fixture(scope="module")
def pools():
    return {d: [construct_cocycle(ds, d) for ds in dss] for d, dss in POOLS.items()}


@pytest.mark.parametrize("d", [-1, 5])
def test_pool_is_made_of_cocycles(pools, d):
    for c, ds in zip(pools[d], POOLS[d]):
        assert oracle_gram_is(c.X, ds)
        assert is_diag_cocycle(c.X).diagonal() == ds


@pytest.mark.parametrize("d", [-1, 5])
def test_cohomology_is_an_equivalence(pools, d):
    pool = pools[d]
    rel = {(a, b): cohomologous_diag(pool[a], pool[b]) for a in range(len(pool)) for b in range(len(pool))}
    for a in range(len(pool)):
        assert rel[a, a]
        for b in range(len(pool)):
            assert rel[a, b] == rel[b, a]
            for c in range(len(pool)):
                if rel[a, b] and rel[b, c]:
                    assert rel[a, c]
    # the relation is not trivial on either pool
    assert not all(rel.values())


@pytest.mark.parametrize("d", [-1, 5])
def test_class_vectors_match_cohomology(pools, d):
    pool = pools[d]
    for a in pool:
        for b in pool:
            assert cohomologous_diag(a, b) == (norm_class_vector(a).classes == norm_class_vector(b).classes)


@pytest.mark.parametrize("d", [-1, 5])
def test_determinant_obstruction(pools, d):
    for c in pools[d]:
        det = 1
        for v in c.diagonal():
            det *= v
        assert is_norm_from_quadratic(det, d)
        assert c.X.det().norm() == det


@pytest.mark.parametrize("d", [-1, 5])
def test_gauge_action(pools, d):
    spec = TowerSpec.quadratic(d)
    r = spec.sqrt_d()
    rng = random.Random(d)
    for c in pools[d]:
        # skew-Hermitian A gives a unitary Cayley transform when I + A is invertible
        b = rng.randint(-2, 2) + r
        A = MatK([[rng.randint(1, 3) * r, b], [-b.conj(), 0]], spec)
        assert A.star() == -A
        if not (MatK.identity(2, spec) + A).det():
            continue
        T = cayley(A, spec)
        assert is_unitary(T)
        Dg = MatK.diag([1 + r, TowerElem(spec, {0: rng.randint(1, 4), 1: 1})], spec)
        Y = T @ c.X @ Dg
        assert cohomologous_diag(c, is_diag_cocycle(Y))


def test_negative_entries_impossible_over_gaussian_field():
    with pytest.raises(NotPositive):
        construct_cocycle([-1, -1], -1)
    with pytest.raises(NotPositive):
        construct_cocycle([2, -5], -1)
    units = [TowerElem(KI, {0: a, 1: b}) for a in (-1, 0, 1) for b in (-1, 0, 1)]
    for entries in product(units, repeat=4):
        X = MatK([list(entries[:2]), list(entries[2:])], KI)
        if not X.det():
            continue
        try:
            c = is_diag_cocycle(X)
        except NotCocycle:
            continue
        assert all(v > 0 for v in c.diagonal())


# --- closed sets and nesting


def test_norm_closed_examples():
    assert is_norm_closed([2, 5, 13, 10], -1)
    assert is_norm_closed([2, 2], 5)
    assert not is_norm_closed([2], 5)


def test_minimal_partition():
    assert minimal_closed_partition([2, 5, 13, 10], -1) == [[0], [1], [2], [3]]
    assert minimal_closed_partition([2, 3, 6], 5) == [[0, 1, 2]]
    with pytest.raises(NotClosed):
        minimal_closed_partition([2], 5)


def test_nesting_example_d5():
    w = nesting_witness([2, 2], 5)
    assert w.to_json()["sigma"] == [1, 2]
    (x1, y1), (x2, y2) = w.witnesses
    assert (x1, y1) == (1, 1) and (x2, y2) == (0, 1)
    assert x1.norm() + y1.norm() == 2
    assert x2.norm() + 2 * y2.norm() == 2


def test_nesting_example_gaussian():
    w = nesting_witness([2, 2], -1)
    (x1, y1), (x2, y2) = w.witnesses
    assert x1.norm() + y1.norm() == 2
    assert x2.norm() + 2 * y2.norm() == 2


def test_nesting_three_over_q_sqrt5():
    w = nesting_witness([3], 5)
    (x, y), = w.witnesses
    assert x.norm() + y.norm() == 3


def test_nesting_failure_is_reported():
    # every stage of {-1} over Q(i) needs N(x) + N(y) = -1
    with pytest.raises((NoPermutationFound, Undecided)):
        nesting_witness([-1], -1)


# --- the construction


def test_construct_base_case():
    c = construct_cocycle([5], -1)
    assert c.X[0, 0].norm() == 5
    assert c.X[0, 0] in (2 + I_, 2 - I_)


def test_construct_two_by_two_d5():
    c = construct_cocycle([2, 2], 5)
    assert c.X.star() @ c.X == MatK.diag([2, 2], K5)
    assert oracle_gram_is(c.X, [2, 2])


@pytest.mark.parametrize(
    "ds,d",
    [([2, 5, 13, 10], -1), ([3, 7, 21], -1), ([2, 3, 6], 5), ([2, 3, 7, 42], 5), ([-1, -1], 5), ([1, 1, 1], 5)],
)
def test_construct_matches_oracle(ds, d):
    c = construct_cocycle(ds, d)
    assert oracle_gram_is(c.X, ds)


def test_construct_rejects_open_sets():
    with pytest.raises(NotClosed):
        construct_cocycle([2], 5)
    with pytest.raises(NotClosed):
        construct_cocycle([3, 1], -1)
    with pytest.raises(ValueError):
        construct_cocycle([0, 1], 5)


def test_internal_zero_is_an_arithmetic_error():
    assert issubclass(InternalZero, ArithmeticError)


def test_coboundary_descent_for_cocycles(pools):
    assert coboundary_reality_check(pools[5][1].X)
    assert coboundary_reality_check(MatK.identity(2, K5))


# --- classification


def test_norm_class_examples():
    assert norm_class(1, 5) == 1
    assert norm_class(2, 5) != 1
    assert norm_class(4, 5) == 1
    assert norm_class(-1, 5) == 1
    assert norm_class(3, -1) == 3


def test_class_vector_examples():
    v = norm_class_vector(construct_cocycle([1, 1, 1], 5))
    assert v.is_trivial()
    w = norm_class_vector(construct_cocycle([2, 2], 5))
    assert w.invariant == (2,)
    assert not w.is_trivial()
    assert w.to_json() == {"d": "5", "classes": ["2", "2"]}


def test_quaternion_tuples():
    qs = quaternion_tuple([1, 1, 1], -1)
    assert len(qs) == 3 and all(is_split(q) for q in qs)
    qs = quaternion_tuple(construct_cocycle([2, 2], 5))
    assert [(q.a, q.b) for q in qs] == [(5, 2), (5, 2)]
    assert not any(is_split(q) for q in qs)


@pytest.mark.parametrize("d", [-1, 5])
def test_quaternion_tuples_of_cohomologous_cocycles(pools, d):
    for a in pools[d]:
        for b in pools[d]:
            if cohomologous_diag(a, b):
                assert all(quat_iso(p, q) for p, q in zip(quaternion_tuple(a), quaternion_tuple(b)))


# --- anti-diagonal cocycles


def test_antidiag_two_by_two():
    T = antidiag_tower(5)
    i, r2 = T.sqrt(-1), T.sqrt(2)
    X = MatK([[1, 1], [i, -i]], T).scale(r2.inverse())
    assert X.star() @ X == build_S(2, T)
    assert is_antidiag_cocycle(X).D == MatK.identity(2, T)
    assert X == antidiag_example(2, T)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_antidiag_examples(n):
    X = antidiag_example(n)
    G = gram_oracle(X)
    S = build_S(n)
    for a in range(n):
        for b in range(n):
            assert reduce(G[a, b] - S[a, b].to_rational(), X.spec) == 0
    assert is_antidiag_cocycle(X).D.is_identity()


def test_antidiag_rejects_identity():
    with pytest.raises(NotCocycle):
        is_antidiag_cocycle(MatK.identity(2, K5))


def test_antidiag_odd_middle_class():
    K3 = TowerSpec.quadratic(3)
    s = K3.sqrt_d()
    A = is_antidiag_cocycle(MatK([[1 + s, 0, 1 - s], [1, 1, 1], [1, -1, 1]], K3))
    assert A.D == MatK.diag([6 + 2 * s, 2, 6 - 2 * s], K3)
    N = normalize_antidiag(A)
    assert N.middle == 2
    assert N.middle_class != 1
    assert N.middle_class == norm_class(2, 3)
    P = N.X.star() @ N.X
    assert P == build_S(3, K3) @ MatK.diag([1, 2, 1], K3)


def test_antidiag_even_normalizes_to_S():
    A = is_antidiag_cocycle(MatK([[2 + R5, 2 - R5], [1, 1]], K5))
    assert A.D == MatK.diag([10 + 4 * R5, 10 - 4 * R5], K5)
    N = normalize_antidiag(A)
    assert N.middle is None
    assert N.X.star() @ N.X == build_S(2, K5)
    again = normalize_antidiag(is_antidiag_cocycle(N.X))
    assert again.X == N.X


def test_antidiag_incompatible_triple():
    rbd = build_rbd(AdmissibleTriple.make(3, {1: 2}))
    with pytest.raises(TripleIncompatible):
        is_antidiag_cocycle(MatK.identity(3, K5), rbd)


# --- twisted cocycles


def test_twisted_identity_rejected():
    G = twisted_gram(MatK.identity(2, KI), -1, 2)
    assert G == MatK([[3, -1], [-1, 3]], G.spec)
    with pytest.raises(NotCocycle):
        is_twisted_cocycle(MatK.identity(2, KI), 2, -1, 2)


def test_twisted_bad_twist():
    with pytest.raises(InvalidTwist):
        is_twisted_cocycle(MatK.identity(2, K5), 2, 5, 5)


def twisted_oracle(Q, dprime):
    J = build_J(Q.n, dprime, Q.spec)
    ext = J.spec
    Jp, Qp = mat_poly(J), mat_poly(Q.lift(ext))
    G = Jp.T * star_poly(Qp, ext) * Qp * Jp
    Sp = mat_poly(build_S(Q.n))
    M = (Sp * G).applyfunc(lambda e: reduce(e, ext))
    return all(M[a, b] == 0 for a in range(Q.n) for b in range(Q.n) if a != b)


def small_gaussian_matrices():
    units = [TowerElem(KI, {0: a, 1: b}) for a in (-1, 0, 1) for b in (-1, 0, 1)]
    rng = random.Random(23)
    for _ in range(400):
        yield MatK([[rng.choice(units) for _ in range(2)] for _ in range(2)], KI)


@pytest.mark.parametrize("dprime", [2, -2])
def test_twisted_search_agrees_with_oracle(dprime):
    accepted = 0
    for Q in small_gaussian_matrices():
        if not Q.det():
            continue
        try:
            is_twisted_cocycle(Q, 2, -1, dprime)
            ok = True
        except NotCocycle:
            ok = False
        assert ok == twisted_oracle(Q, dprime)
        accepted += ok
    if dprime == -2:
        assert accepted > 0


def test_twisted_found_instance():
    Q = MatK([[-1 - I_, -1], [-1 - I_, I_]], KI)
    t = is_twisted_cocycle(Q, 2, -1, -2)
    r = t.D.spec.sqrt(2)
    assert t.D == MatK.diag([8 - 4 * r, 8 + 4 * r], t.D.spec)
    assert twisted_oracle(Q, -2)


def test_twisted_stable_under_unitaries():
    Q = MatK([[-1 - I_, -1], [-1 - I_, I_]], KI)
    T = MatK([[0, I_], [1, 0]], KI)
    assert is_unitary(T)
    assert is_twisted_cocycle(T @ Q, 2, -1, -2).D == is_twisted_cocycle(Q, 2, -1, -2).D
    with pytest.raises(NotCocycle):
        is_twisted_cocycle(T, 2, -1, -2)


# --- lambda trichotomy


def test_lambda_classify():
    assert lambda_classify(3, 5) == "basic"
    assert lambda_classify(2 * R5, 5) == "quadratic"
    L = TowerSpec((5, 2), 0)
    assert lambda_classify(L.gen(1), 5) == "twisted"
    with pytest.raises(Unclassifiable):
        lambda_classify(1 + R5, 5)
    with pytest.raises(Unclassifiable):
        lambda_classify(0, 5)


def test_norm_member_is_three_valued():
    assert norm_member(Fraction(-1), K5)
    assert not norm_member(Fraction(2), K5)
    with pytest.raises(Undecided):
        norm_member(Fraction(3), TowerSpec((2, 5), 1))


def test_json_records():
    c = construct_cocycle([2, 2], 5)
    data = c.to_json()
    assert set(data) == {"X", "D", "d"} and data["d"] == "5"
    assert isinstance(c, DiagCocycle)
