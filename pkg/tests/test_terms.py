import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from gen import random_term
from mvsheaf import algebra as alg, terms as T
from mvsheaf.errors import PreconditionError, TermSyntaxError

x1, x2, x3 = T.var(0), T.var(1), T.var(2)


def test_parse_examples():
    assert T.parse("x1 (+) ~x1") == T.Oplus(T.Var(0), T.Neg(T.Var(0)))
    assert T.parse("x1 (*) x2") == T.Neg(T.Oplus(T.Neg(T.Var(0)), T.Neg(T.Var(1))))
    assert T.parse("d(x1,x2)") == T.oplus(T.ominus(x1, x2), T.ominus(x2, x1))
    assert T.parse("0") == T.ZERO


@pytest.mark.parametrize("bad", ["", "x0", "x1 (+)", "(x1", "x1 x2", "y1", "d(x1)"])
def test_parse_errors_carry_position(bad):
    with pytest.raises(TermSyntaxError) as info:
        T.parse(bad)
    assert info.value.position >= 0


def test_parse_lines_skips_comments():
    body = "# two terms\nx1 (+) x2\n\n~x1  # negation\n"
    assert T.parse_lines(body) == [T.oplus(x1, x2), T.neg(x1)]


def test_free_vars():
    assert T.free_vars(T.zero()) == frozenset()
    assert T.free_vars(T.oplus(x1, T.neg(x3))) == {0, 2}
    assert T.free_vars(T.dist(x1, x1)) == {0}
    assert T.arity(T.oplus(x1, T.neg(x3))) == 3


def test_eval_examples():
    for A in alg.standard_suite():
        for a in A.elements():
            assert T.eval_term(T.oplus(x1, T.neg(x1)), A, [a]) == A.one
    L2 = alg.make_chain(2)
    assert T.eval_term(T.odot(x1, x2), L2, [1, 1]) == 0
    assert T.eval_term(T.zero(), L2, {}) == 0
    assert T.eval_unit(T.oplus(x1, x1), [F(1, 3)]) == F(2, 3)
    assert T.eval_unit(T.oplus(x1, x1), [F(3, 4)]) == 1
    t = T.meet(T.ominus(x1, x2), T.ominus(x2, x1))
    rng = random.Random(0)
    for _ in range(50):
        p = (F(rng.randint(0, 9), 9), F(rng.randint(0, 7), 7))
        assert T.eval_unit(t, p) == 0


def test_unbound_and_out_of_range():
    with pytest.raises(PreconditionError):
        T.eval_unit(x2, [F(1, 2)])
    with pytest.raises(PreconditionError):
        T.eval_unit(x1, [F(3, 2)])


def test_hom_from_tuple():
    L2 = alg.make_chain(2)
    h = T.hom_from_tuple(L2, [1])
    assert h(x1) == 1
    assert h(T.oplus(x1, x1)) == 2


def test_hom_preserves_oplus_on_random_pairs():
    rng = random.Random(7)
    A = alg.product(alg.make_chain(2), alg.make_chain(3))
    for _ in range(100):
        f, g = random_term(rng, 2, 3), random_term(rng, 2, 3)
        h = T.hom_from_tuple(A, [rng.randrange(A.size), rng.randrange(A.size)])
        assert h(T.oplus(f, g)) == A.oplus(h(f), h(g))
        assert h(T.neg(f)) == A.neg(h(f))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 5))
def test_text_round_trip(seed, n, depth):
    t = random_term(random.Random(seed), n, depth)
    assert T.parse(T.to_text(t)) == t


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 6))
def test_chain_evaluation_agrees_with_unit_interval(seed, k):
    # the k-chain is a subalgebra of [0,1], so both evaluators must agree
    rng = random.Random(seed)
    L = alg.make_chain(k)
    t = random_term(rng, 2, 4)
    env = [rng.randint(0, k), rng.randint(0, k)]
    assert L.label(T.eval_term(t, L, env)) == T.eval_unit(t, [F(e, k) for e in env])


def test_simplifying_builders_keep_values():
    rng = random.Random(3)
    for _ in range(60):
        a, b = random_term(rng, 2, 3), random_term(rng, 2, 3)
        p = (F(rng.randint(0, 6), 6), F(rng.randint(0, 5), 5))
        for plain, simp in ((T.oplus, T.s_oplus), (T.odot, T.s_odot),
                            (T.join, T.s_join), (T.meet, T.s_meet)):
            assert T.eval_unit(plain(a, b), p) == T.eval_unit(simp(a, b), p)
        assert T.eval_unit(T.scalar(3, a), p) == T.eval_unit(T.s_scalar(3, a), p)


def test_as_term():
    assert T.as_term("x1") == x1
    assert T.as_term(x1) is x1
