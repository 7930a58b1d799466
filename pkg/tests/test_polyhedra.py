import random
from fractions import Fraction as F

import pytest

from mvsheaf import polyhedra as P


def test_forms():
    assert P.integer_form([F(-1, 2), 1]) == (-1, 2)
    assert P.normalize((4, -6, 2)) == (2, -3, 1)
    assert P.form_value((-1, 2), [F(3, 4)]) == F(1, 2)
    assert P.to_point(P.from_point([F(1, 3), F(1, 2)])) == (F(1, 3), F(1, 2))


def test_exact_linear_algebra():
    assert P.rank([(1, 2), (2, 4)]) == 1
    assert P.det([[2, 1], [1, 1]]) == 1
    assert P.solve([[2, 1], [1, 1]], [3, 2]) == (F(1), F(1))
    assert P.affine_dimension([(0, 0), (1, 1), (2, 2)]) == 1


@pytest.mark.parametrize("n,vol", [(2, F(1, 2)), (3, F(1, 6))])
def test_corner_simplex_volume(n, vol):
    box = P.box_cell(n)
    assert P.volume(box) == 1
    pos, neg = P.split(box, (1,) + (-1,) * n)  # 1 - sum(x) >= 0
    assert P.volume(pos) == vol
    assert P.volume(neg) == 1 - vol


def test_interval_halves():
    left, right = P.split(P.box_cell(1), (1, -2))
    assert P.volume(left) == P.volume(right) == F(1, 2)


def test_split_misses():
    box = P.box_cell(2)
    pos, neg = P.split(box, (2, -1, 0))  # 2 - x1 > 0 on the box
    assert pos is box and neg is None


def test_split_vertices_match_brute_force():
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(1, 3)
        cells = [P.box_cell(n)]
        for _ in range(3):
            form = (rng.randint(-3, 3),) + tuple(rng.randint(-3, 3) for _ in range(n))
            nxt = []
            for c in cells:
                nxt += [p for p in P.split(c, form) if p is not None]
            cells = nxt
        assert sum(P.volume(c) for c in cells) == 1
        for c in cells:
            brute = P.enumerate_vertices(n, c.constraints)
            assert sorted(brute) == sorted(c.points())


def test_intersection():
    a = P.split(P.box_cell(2), (0, 1, -1))[0]  # x1 >= x2
    b = P.split(P.box_cell(2), (-1, 2, 0))[0]  # x1 >= 1/2
    c = P.intersect(a, b)
    assert P.volume(c) == F(3, 8)
    d = P.split(P.box_cell(2), (1, -2, 0))[0]  # x1 <= 1/2
    assert P.intersect(b, d) is None


def test_rational_polyhedron():
    Q = P.RationalPolyhedron.from_constraints(1, [([F(1, 2), -1], ">=")])
    assert sorted(Q.vertices()) == [(F(0),), (F(1, 2),)]
    assert Q.dimension() == 1 and Q.contains([F(1, 4)]) and not Q.contains([F(3, 4)])
    pt = P.RationalPolyhedron.from_constraints(1, [([0, 1], "=")])
    assert list(pt.vertices()) == [(F(0),)] and pt.dimension() == 0
    empty = P.RationalPolyhedron.from_constraints(1, [([-2, 1], ">=")])
    assert empty.is_empty()
    le = P.RationalPolyhedron.from_constraints(2, [([-1, 1, 1], "<=")])
    assert le.contains([F(1, 4), F(1, 4)]) and not le.contains([1, 1])


def test_format_constraint():
    assert P.format_constraint((1, -2)) == {"coefficients": ["1/1", "-2/1"], "relation": ">="}
