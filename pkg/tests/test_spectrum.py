import itertools
import math
from fractions import Fraction as F

import pytest

from mvsheaf import algebra as alg, ideals as I, spectrum as S
from mvsheaf.errors import PreconditionError, ResourceLimitError, TrivialAlgebraError

h = F(1, 2)
L2, L4 = alg.make_chain(2), alg.make_chain(4)
Q = alg.product(L2, L2)
SUITE = alg.standard_suite()


def test_chain_spectrum_is_a_point():
    sp = S.build_spectrum(L4)
    assert sp.n_points == 1
    assert sp.W(0) == {0}
    assert all(sp.W(a) == set() for a in range(1, L4.size))


def test_two_point_spectra_are_discrete():
    sp = S.build_spectrum(Q)
    assert sp.n_points == 2 and sp.is_discrete()
    k = next(i for i, P in enumerate(sp.points) if Q.element(0, h) in P)
    assert set(sp.points[k].members) == {Q.element(0, b) for b in (0, h, 1)}
    sp23 = S.build_spectrum(alg.product(L2, alg.make_chain(3)))
    assert sp23.n_points == 2 and sp23.is_discrete()
    with pytest.raises(TrivialAlgebraError):
        S.build_spectrum(alg.make_trivial())


@pytest.mark.parametrize("A", SUITE, ids=lambda A: A.name)
def test_base_open_laws(A):
    sp = S.build_spectrum(A)
    for a, b in alg.pairs(A.elements()):
        assert sp.W(a) & sp.W(b) == sp.W(A.oplus(a, b))
        assert sp.W(a) | sp.W(b) == sp.W(A.meet(a, b))


def test_eta():
    sp = S.build_spectrum(Q)
    assert set(S.eta(sp, 0).values) == {0}
    x = Q.element(h, 1)
    vals = S.eta(sp, x).values
    labels = sorted(alg.chain_labels(st.quotient)[v] for st, v in zip(sp.stalks, vals))
    assert labels == [h, 1]
    for a, b in alg.pairs(Q.elements()):
        e = S.eta(sp, Q.oplus(a, b)).values
        for k, st in enumerate(sp.stalks):
            assert e[k] == st.quotient.oplus(S.eta(sp, a).values[k], S.eta(sp, b).values[k])


@pytest.mark.parametrize("A", SUITE, ids=lambda A: A.name)
def test_section_count_equals_stalk_product(A):
    # finite spectra here are discrete, so a section is any tuple of germs
    sp = S.build_spectrum(A)
    secs = S.enumerate_global_sections(sp)
    assert len(secs) == math.prod(sp.stalk_sizes()) == A.size
    vals = {s.values for s in secs}
    assert all(S.eta(sp, a).values in vals for a in A.elements())


def test_representation_examples():
    for A, n in ((Q, 9), (alg.make_chain(6), 7), (alg.product_of(*[alg.make_chain(1)] * 3), 8)):
        r = S.verify_representation(A)
        assert r.bijective and r.sections == n == r.size


def test_gluing_fallback_above_cap():
    A = alg.product_of(L2, L2, L2)
    with pytest.raises(ResourceLimitError):
        S.enumerate_global_sections(A, cap=5)
    r = S.verify_representation(A, cap=5)
    assert r.method == "gluing" and r.bijective


def test_glue_example():
    b = S.glue(Q, Q.element(0, 1), Q.element(1, 0), Q.element(h, h), Q.element(1, 0))
    assert b == Q.element(h, 0)
    for a, b in alg.pairs(Q.elements()):
        assert I.congruent(Q, S.glue(Q, a, a, b, b), b, a)


def test_glue_incompatible_raises():
    with pytest.raises(PreconditionError):
        S.glue(L4, 0, 0, 1, 2)


def congruent_brute(A, x, y, a):
    """x = y mod (a) iff d(x, y) <= k*a for some k, by direct iteration."""
    m = a
    d = A.dist(x, y)
    for _ in range(A.size + 1):
        if A.leq(d, m):
            return True
        m = A.oplus(m, a)
    return False


def test_alternative_formula_agrees_on_products():
    for a1, a2, b1, b2 in itertools.product(range(Q.size), repeat=4):
        if not congruent_brute(Q, b1, b2, Q.join(a1, a2)):
            continue
        b = S.glue(Q, a1, a2, b1, b2)
        c = S.glue_alt(Q, a1, a2, b1, b2)
        assert congruent_brute(Q, b, c, Q.meet(a1, a2))


def test_glue_many():
    A = alg.product_of(L2, L2, L2)
    killers = [A.element(0, 1, 1), A.element(1, 0, 1), A.element(1, 1, 0)]
    for target in A.elements():
        pairs = [(a, target) for a in killers]
        for perm in itertools.permutations(pairs):
            assert S.glue_many(A, perm) == target
    assert S.glue_many(L4, [(0, 3)]) == 3
    with pytest.raises(PreconditionError):
        S.glue_many(L4, [(1, 2)])


@pytest.mark.parametrize("A", [a for a in SUITE if a.size <= 12], ids=lambda A: A.name)
def test_fiber_products(A):
    for a1, a2 in alg.pairs(A.elements()):
        assert S.fiber_product_bijective(A, a1, a2)


def test_maximal_spectrum():
    A = alg.product(L2, alg.make_chain(3))
    ms = S.maximal_spectrum(A)
    assert {P.members for P in ms.spectrum.points} == {P.members for P in I.enumerate_primes(A)}
    k = next(i for i, P in enumerate(ms.spectrum.points) if A.element(0, 1) in P)
    assert [ms.chi[k][A.element(x, F(1, 3))] for x in (0, h, 1)] == [0, h, 1]
    assert all(ms.clopen_report().values())
