"""Piecewise-linear normal forms of terms (McNaughton functions).

A ``PwlFunction`` is a list of full-dimensional cells covering [0,1]^n
with one integer affine piece per cell.  Terms compile to such functions
structurally; zero sets, ideal membership in free algebras and the gluing
of term functions are all decided on these exact complexes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, lcm
from typing import NamedTuple, Sequence

from . import terms as T
from .errors import PreconditionError, ResourceLimitError
from .polyhedra import (Cell, RationalPolyhedron, box_cell, form_value,
                        format_constraint, hval, intersect, normalize,
                        polyhedron_from_cell_face, split, to_point, volume)

DEFAULT_MAX_DIM = 4


class LinearForm(NamedTuple):
    constant: int
    coefficients: tuple

    def as_tuple(self):
        return (int(self.constant),) + tuple(int(c) for c in self.coefficients)


def _form(h, n):
    if isinstance(h, LinearForm):
        f = h.as_tuple()
    else:
        f = tuple(int(c) for c in h)
    if len(f) != n + 1:
        raise PreconditionError(f"linear form needs {n + 1} entries", f)
    return f


def constant_form(c, n):
    return (c,) + (0,) * n


def _add(f, g):
    return tuple(a + b for a, b in zip(f, g))


def _scale(k, f):
    return tuple(k * a for a in f)


def _complement(f):
    return (1 - f[0],) + tuple(-a for a in f[1:])


@dataclass(frozen=True)
class PwlFunction:
    n: int
    cells: tuple
    pieces: tuple

    def __iter__(self):
        return iter(zip(self.cells, self.pieces))

    def __len__(self):
        return len(self.cells)

    def vertices(self):
        seen = set()
        for c in self.cells:
            seen.update(c.vertices)
        return sorted(seen)

    def denominator(self):
        d = 1
        for c in self.cells:
            for v in c.vertices:
                d = lcm(d, v[0])
        return d

    def is_constant(self, value):
        target = constant_form(value, self.n)
        return all(p == target for p in self.pieces)


def _check_dim(n, max_dim):
    if n < 1:
        raise PreconditionError("dimension must be at least 1", n)
    if n > max_dim:
        raise ResourceLimitError(f"dimension {n} exceeds the cap {max_dim}")


def constant(value, n) -> PwlFunction:
    return PwlFunction(n, (box_cell(n),), (constant_form(value, n),))


def identity(i, n) -> PwlFunction:
    f = [0] * (n + 1)
    f[i + 1] = 1
    return PwlFunction(n, (box_cell(n),), (tuple(f),))


# -- structural operations -------------------------------------------------------

def overlay(*fs: PwlFunction):
    """Common refinement: list of (cell, (piece of f1, piece of f2, ...))."""
    acc = [(c, (p,)) for c, p in fs[0]]
    for g in fs[1:]:
        nxt = []
        for ca, pa in acc:
            for cb, pb in g:
                c = intersect(ca, cb)
                if c is not None:
                    nxt.append((c, pa + (pb,)))
        acc = nxt
    return acc


def _clip_above(cell, piece, out_cells, out_pieces):
    """Append min(1, piece) on ``cell``, splitting along piece = 1."""
    lo, hi = split(cell, _complement(piece))
    if lo is not None:
        out_cells.append(lo)
        out_pieces.append(piece)
    if hi is not None:
        out_cells.append(hi)
        out_pieces.append(constant_form(1, len(piece) - 1))


def pwl_neg(f: PwlFunction) -> PwlFunction:
    return PwlFunction(f.n, f.cells, tuple(_complement(p) for p in f.pieces))


def pwl_oplus(f: PwlFunction, g: PwlFunction) -> PwlFunction:
    cells, pieces = [], []
    for c, (pf, pg) in overlay(f, g):
        _clip_above(c, _add(pf, pg), cells, pieces)
    return PwlFunction(f.n, tuple(cells), tuple(pieces))


def pwl_scalar(k: int, f: PwlFunction) -> PwlFunction:
    if k == 0:
        return constant(0, f.n)
    cells, pieces = [], []
    for c, p in f:
        _clip_above(c, _scale(k, p), cells, pieces)
    return PwlFunction(f.n, tuple(cells), tuple(pieces))


def truncate(h, n: int, max_dim: int = DEFAULT_MAX_DIM) -> PwlFunction:
    """(h join 0) meet 1 for an integer affine form h."""
    _check_dim(n, max_dim)
    h = _form(h, n)
    cells, pieces = [], []
    pos, neg = split(box_cell(n), h)
    if neg is not None:
        cells.append(neg)
        pieces.append(constant_form(0, n))
    if pos is not None:
        _clip_above(pos, h, cells, pieces)
    return PwlFunction(n, tuple(cells), tuple(pieces))


@lru_cache(maxsize=8192)
def _compile(t: T.Term, n: int) -> PwlFunction:
    if isinstance(t, T.Var):
        return identity(t.index, n)
    if isinstance(t, T.Zero):
        return constant(0, n)
    if isinstance(t, T.Neg):
        return pwl_neg(_compile(t.child, n))
    if isinstance(t, T.Oplus):
        return pwl_oplus(_compile(t.left, n), _compile(t.right, n))
    if isinstance(t, T.Scalar):
        return pwl_scalar(t.n, _compile(t.child, n))
    raise TypeError(f"not a term: {t!r}")


def compile_term(t, n: int, max_dim: int = DEFAULT_MAX_DIM) -> PwlFunction:
    t = T.as_term(t)
    _check_dim(n, max_dim)
    fv = T.free_vars(t)
    if fv and max(fv) >= n:
        raise PreconditionError(f"term uses x{max(fv) + 1} but n = {n}", sorted(fv))
    return _compile(t, n)


def pwl_eval(f: PwlFunction, point) -> Fraction:
    p = tuple(Fraction(x) for x in point)
    if len(p) != f.n or any(not 0 <= x <= 1 for x in p):
        raise PreconditionError("point outside the unit cube", p)
    for c, piece in f:
        if c.contains(p):
            return form_value(piece, p)
    raise PreconditionError("no cell contains the point", p)


def refine(f: PwlFunction, H: Sequence = ()) -> PwlFunction:
    """Same function on a finer complex on which every member of H is affine.

    A linear form h refines by splitting along h = 0; a term refines by the
    cells of its compiled complex.
    """
    cells, pieces = list(f.cells), list(f.pieces)
    for h in H:
        if isinstance(h, (T.Term, str)):
            g = compile_term(h, f.n)
            ov = overlay(PwlFunction(f.n, tuple(cells), tuple(pieces)), g)
            cells = [c for c, _ in ov]
            pieces = [ps[0] for _, ps in ov]
        else:
            form = _form(h, f.n)
            nc, np_ = [], []
            for c, p in zip(cells, pieces):
                for part in split(c, form):
                    if part is not None:
                        nc.append(part)
                        np_.append(p)
            cells, pieces = nc, np_
    return PwlFunction(f.n, tuple(cells), tuple(pieces))


def pwl_difference(f: PwlFunction, g: PwlFunction):
    """A vertex where f and g differ, or None if they are the same function."""
    if f.n != g.n:
        raise PreconditionError("dimensions differ", (f.n, g.n))
    for c, (pf, pg) in overlay(f, g):
        if pf != pg:
            for v in c.vertices:
                if hval(pf, v) != hval(pg, v):
                    return to_point(v)
    return None


def pwl_equal(f: PwlFunction, g: PwlFunction) -> bool:
    return pwl_difference(f, g) is None


def zero_set(f: PwlFunction):
    """Per cell, the face where the piece vanishes; the union is f^-1(0)."""
    out = []
    for c, p in f:
        face = polyhedron_from_cell_face(c, p)
        if face is not None:
            out.append(face)
    # drop faces lying inside another face; the union is unchanged
    keep = []
    for i, P in enumerate(out):
        vs = P.vertices()
        if not any(j != i and all(Q.contains(v) for v in vs)
                   and not (j > i and all(P.contains(w) for w in Q.vertices()))
                   for j, Q in enumerate(out)):
            keep.append(P)
    return keep


# -- invariants ----------------------------------------------------------------

@dataclass(frozen=True)
class ComplexReport:
    covers: bool
    disjoint: bool
    continuous: bool
    in_unit_interval: bool
    total_volume: Fraction
    witness: object = None

    @property
    def ok(self):
        return self.covers and self.disjoint and self.continuous and self.in_unit_interval


def check_complex(f: PwlFunction) -> ComplexReport:
    total = sum((volume(c) for c in f.cells), Fraction(0))
    disjoint, witness = True, None
    for (i, a), (j, b) in itertools.combinations(enumerate(f.cells), 2):
        if intersect(a, b) is not None:
            disjoint, witness = False, (i, j)
            break
    values = {}
    continuous = True
    in_unit = True
    for c, p in f:
        for v in c.vertices:
            val = Fraction(hval(p, v), v[0])
            if not 0 <= val <= 1:
                in_unit, witness = False, to_point(v)
            if values.setdefault(v, val) != val:
                continuous, witness = False, to_point(v)
    # vertices of one cell lying on a face of another
    if continuous:
        for v, val in values.items():
            pt = to_point(v)
            for c, p in f:
                if c.contains(pt) and form_value(p, pt) != val:
                    continuous, witness = False, pt
                    break
    return ComplexReport(total == 1, disjoint, continuous, in_unit, total, witness)


# -- restricted comparisons --------------------------------------------------------

def _zero_vertices(cell: Cell, piece):
    return [v for v in cell.vertices if hval(piece, v) == 0]


def restricted_difference(f, g, h, n: int):
    """A point of Z(f) where g and h differ, or None (g = h on Z(f))."""
    F, G, H = (compile_term(x, n) for x in (f, g, h))
    for c, (pf, pg, ph) in overlay(F, G, H):
        for v in _zero_vertices(c, pf):
            if hval(pg, v) != hval(ph, v):
                return to_point(v)
    return None


def ideal_member(f, g, n: int) -> bool:
    """g in (f) in the free algebra, decided by Z(f) contained in Z(g)."""
    return restricted_difference(f, g, T.ZERO, n) is None


def zero_set_contains(f, g, n: int) -> bool:
    """Z(g) contained in Z(f)."""
    return ideal_member(g, f, n)


# -- gluing --------------------------------------------------------------------------

def _nstar(F1, F2, G1, G2) -> int:
    best = 1
    for c, (pf1, pf2, pg1, pg2) in overlay(F1, F2, G1, G2):
        for fa, fb, ga, gb in ((pf1, pf2, pg1, pg2), (pf2, pf1, pg2, pg1)):
            for v in _zero_vertices(c, fa):
                den = hval(fb, v)
                if den > 0:
                    # need gb - k*fb <= ga at v
                    best = max(best, ceil(Fraction(hval(gb, v) - hval(ga, v), den)))
    return best


def glue_formula(f1, f2, g1, g2, k: int) -> T.Term:
    """(g1 (*) ~k f1) \\/ (g2 (*) ~k f2)."""
    a = T.s_odot(g1, T.neg(T.s_scalar(k, f1)))
    b = T.s_odot(g2, T.neg(T.s_scalar(k, f2)))
    return T.s_join(a, b)


def glue_fp(f1, f2, g1, g2, n: int, check: bool = True):
    """Term h with h = g1 on Z(f1) and h = g2 on Z(f2); returns (h, n*)."""
    f1, f2, g1, g2 = (T.as_term(x) for x in (f1, f2, g1, g2))
    if check:
        w = restricted_difference(T.s_join(f1, f2), g1, g2, n)
        if w is not None:
            raise PreconditionError("g1 and g2 differ on Z(f1) & Z(f2)", w)
    # a zero set inside the other needs no gluing
    if zero_set_contains(f1, f2, n):
        return g1, 1
    if zero_set_contains(f2, f1, n):
        return g2, 1
    F1, F2, G1, G2 = (compile_term(x, n) for x in (f1, f2, g1, g2))
    k = _nstar(F1, F2, G1, G2)
    return glue_formula(f1, f2, g1, g2, k), k


def glue_cover(pairs, n: int) -> T.Term:
    """A single term equal to g_i on Z(f_i) for every i."""
    pairs = [(T.as_term(f), T.as_term(g)) for f, g in pairs]
    if not pairs:
        raise PreconditionError("empty family")
    cover = compile_term(T.meet_all([f for f, _ in pairs]), n)
    if not cover.is_constant(0):
        w = next(to_point(v) for c, p in cover for v in c.vertices if hval(p, v) != 0)
        raise PreconditionError("zero sets do not cover the cube", w)
    for (fi, gi), (fj, gj) in itertools.combinations(pairs, 2):
        w = restricted_difference(T.s_join(fi, fj), gi, gj, n)
        if w is not None:
            raise PreconditionError("incompatible pair", w)
    f, g = pairs[0]
    for fi, gi in pairs[1:]:
        g, _ = glue_fp(f, fi, g, gi, n, check=False)
        f = T.s_meet(f, fi)
    return g


# -- terms for polyhedra -----------------------------------------------------------

def truncation_term(h) -> T.Term:
    """A term whose function is (h join 0) meet 1, for an integer affine form h.

    Built from (g + x)# = (g# (+) x) (*) (g + 1)# and
    (g - x)# = ((g - 1)# (+) ~x) (*) g#, pruning to 0 or 1 when h stays
    below 0 or above 1 on the whole cube.
    """
    memo = {}

    def rec(f):
        lo = f[0] + sum(min(0, c) for c in f[1:])
        hi = f[0] + sum(max(0, c) for c in f[1:])
        if hi <= 0:
            return T.ZERO
        if lo >= 1:
            return T.one()
        if f in memo:
            return memo[f]
        i = next(k for k, c in enumerate(f[1:]) if c != 0)
        g = list(f)
        if f[i + 1] > 0:
            g[i + 1] -= 1
            g = tuple(g)
            t = T.s_odot(T.s_oplus(rec(g), T.var(i)), rec((g[0] + 1,) + g[1:]))
        else:
            g[i + 1] += 1
            g = tuple(g)
            t = T.s_odot(T.s_oplus(rec((g[0] - 1,) + g[1:]), T.neg(T.var(i))), rec(g))
        memo[f] = t
        return t

    return rec(tuple(int(c) for c in h))


def polyhedron_to_term(P: RationalPolyhedron) -> T.Term:
    """A term whose zero set is P: the join of (-c)# over constraints c >= 0."""
    if P.is_empty():
        return T.one()
    forms = [tuple(-x for x in c) for c in P.ineqs]
    for c in P.eqs:
        forms += [c, tuple(-x for x in c)]
    return T.join_all([truncation_term(h) for h in forms])


def cell_to_term(cell: Cell) -> T.Term:
    return polyhedron_to_term(RationalPolyhedron(cell.n, cell.constraints))


def mcnaughton_data(f: PwlFunction):
    """(zero-set term, piece term) for every cell: the input format of glue_cover."""
    return [(cell_to_term(c), truncation_term(p)) for c, p in f]


# -- archimedean elements of free algebras -------------------------------------------

def is_archimedean_term(f, n: int) -> bool:
    F = compile_term(f, n)
    D = F.denominator()
    t = T.as_term(f)
    return pwl_equal(compile_term(T.scalar(D, t), n), compile_term(T.scalar(D + 1, t), n))


# -- desk version of the completeness theorem ------------------------------------------

def grid_equal(s, t, n: int, D: int):
    """Compare two terms on every point of the grid {0, 1/D, ..., 1}^n."""
    s, t = T.as_term(s), T.as_term(t)
    for idx in itertools.product(range(D + 1), repeat=n):
        p = [Fraction(i, D) for i in idx]
        if T.eval_unit(s, p) != T.eval_unit(t, p):
            return False, tuple(p)
    return True, None


def common_denominator(f: PwlFunction, g: PwlFunction) -> int:
    d = 1
    for c, _ in overlay(f, g):
        for v in c.vertices:
            d = lcm(d, v[0])
    return d


# -- JSON --------------------------------------------------------------------------

def pwl_to_json(f: PwlFunction, with_vertices: bool = False):
    from .algebra import format_fraction
    cells = []
    for c, p in f:
        doc = {"constraints": [format_constraint(k) for k in c.constraints],
               "piece": list(p)}
        if with_vertices:
            doc["vertices"] = [[format_fraction(x) for x in pt] for pt in c.points()]
        cells.append(doc)
    return {"n": f.n, "cells": cells}
