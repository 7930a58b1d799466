import itertools
from fractions import Fraction as F

import pytest

from mvsheaf import algebra as alg
from mvsheaf.errors import MvError, PreconditionError, ResourceLimitError


def chain_oracle(k):
    """Plain-Fraction reference for the k-chain, independent of the tables."""
    vals = [F(i, k) for i in range(k + 1)]
    return vals, (lambda x, y: min(F(1), x + y)), (lambda x: 1 - x)


@pytest.mark.parametrize("k", range(1, 9))
def test_chain_matches_min_formula(k):
    A = alg.make_chain(k)
    vals, op, ng = chain_oracle(k)
    for i, j in itertools.product(range(k + 1), repeat=2):
        assert A.label(A.oplus(i, j)) == op(vals[i], vals[j])
        assert A.label(A.odot(i, j)) == max(F(0), vals[i] + vals[j] - 1)
        assert A.label(A.dist(i, j)) == abs(vals[i] - vals[j])
        assert A.leq(i, j) == (vals[i] <= vals[j])
    for i in range(k + 1):
        assert A.label(A.neg(i)) == ng(vals[i])


def test_small_chain_values():
    B = alg.make_chain(1)
    assert B.size == 2 and B.oplus(1, 1) == 1
    L4 = alg.make_chain(4)
    q = lambda x: L4.element(F(x))
    assert L4.oplus(q("1/4"), q("2/4")) == q("3/4")
    assert L4.oplus(q("3/4"), q("2/4")) == L4.one
    assert alg.make_chain(2).neg(1) == 1
    assert L4.dist(q("1/4"), q("3/4")) == q("1/2")
    assert L4.scalar(3, q("1/4")) == q("3/4")
    assert L4.scalar(5, q("1/4")) == L4.one
    assert alg.leq(L4, q("1/4"), q("3/4"))


def test_products():
    L1, L2, L3 = (alg.make_chain(k) for k in (1, 2, 3))
    P = alg.product(L1, L1)
    assert P.size == 4
    assert P.meet(P.element(1, 0), P.element(0, 1)) == P.element(0, 0)
    Q = alg.product(L2, L2)
    h = F(1, 2)
    assert Q.oplus(Q.element(h, 1), Q.element(h, 0)) == Q.element(1, 1)
    assert not alg.leq(Q, Q.element(h, 0), Q.element(0, h))
    assert alg.product(L2, L3).size == 12


def test_complement_law_everywhere():
    for A in alg.standard_suite():
        for x in A.elements():
            assert A.oplus(x, A.neg(x)) == A.one
            assert A.leq(A.zero, x)


def test_validate_suite_and_corruption():
    assert alg.validate_axioms(alg.make_chain(5)).ok
    rep = alg.validate_axioms(alg.product(alg.make_chain(2), alg.make_chain(3)))
    assert rep.ok
    assert any("n(x" in c.name or "scalar" in c.name for c in rep.checks)
    L2 = alg.make_chain(2)
    bad = L2.oplus_table.copy()
    bad[1, 1] = 0
    broken = alg.FiniteMvAlgebra(bad, L2.neg_table)
    rep = alg.validate_axioms(broken)
    assert not rep.ok
    assert all(c.counterexample is not None for c in rep.failures())


def test_archimedean_witnesses():
    L4 = alg.make_chain(4)
    assert alg.is_archimedean_element(L4, 1) == (True, 4)
    assert alg.is_archimedean_element(L4, 0) == (True, 1)
    P = alg.product(alg.make_chain(2), alg.make_chain(3))
    assert alg.is_archimedean_element(P, P.element(F(1, 2), F(1, 3))) == (True, 3)


def test_apply_dispatch():
    A = alg.make_chain(4)
    assert alg.apply(A, "oplus", [1, 2]) == 3
    assert alg.apply(A, "scalar(3)", [1]) == 3
    assert alg.apply(A, ("scalar", 2), [2]) == 4
    with pytest.raises(PreconditionError):
        alg.apply(A, "neg", [1, 2])
    with pytest.raises(PreconditionError):
        alg.apply(A, "frob", [1, 2])


def test_limits_and_errors():
    with pytest.raises(ResourceLimitError):
        alg.make_chain(300)
    with pytest.raises(PreconditionError):
        alg.make_chain(0)
    with pytest.raises(MvError):
        alg.FiniteMvAlgebra([[0, 5], [1, 1]], [1, 0])


def test_json_round_trip_and_isomorphism():
    A = alg.product(alg.make_chain(1), alg.make_chain(2))
    doc = alg.algebra_to_json(A)
    B = alg.algebra_from_json(doc)
    assert alg.find_isomorphism(A, B) is not None
    C = alg.product(alg.make_chain(2), alg.make_chain(1))
    assert alg.find_isomorphism(A, C) is not None
    assert alg.find_isomorphism(A, alg.make_chain(5)) is None
    with pytest.raises(MvError):
        alg.algebra_from_json({"kind": "banana"})


def test_is_chain_flags():
    assert alg.make_chain(3).is_chain()
    assert not alg.product(alg.make_chain(1), alg.make_chain(1)).is_chain()
    assert alg.make_trivial().is_trivial
