"""Exact rational polytopes inside the unit cube.

Affine forms are integer tuples ``(c0, c1, ..., cn)`` standing for
``c0 + c1*x1 + ... + cn*xn``; a constraint ``c`` means ``c >= 0``.
Vertices of cells are stored homogeneously as ``(d, X1, ..., Xn)`` with
``d > 0``, i.e. the point ``X/d``, so every sign test is an integer test.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd, lcm
from typing import Sequence

from .errors import PreconditionError


def normalize(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    if g > 1:
        return tuple(x // g for x in v)
    return tuple(v)


def negate(form):
    return tuple(-c for c in form)


def hval(form, v):
    """form evaluated at homogeneous vertex v, times v[0]."""
    s = form[0] * v[0]
    for c, x in zip(form[1:], v[1:]):
        s += c * x
    return s


def form_value(form, point) -> Fraction:
    s = Fraction(form[0])
    for c, x in zip(form[1:], point):
        s += c * x
    return s


def integer_form(coeffs) -> tuple:
    """Scale a rational affine form to a primitive integer one (same sign)."""
    qs = [Fraction(c) for c in coeffs]
    den = lcm(*(q.denominator for q in qs)) if qs else 1
    return normalize(tuple(int(q * den) for q in qs))


def to_point(v):
    d = v[0]
    return tuple(Fraction(x, d) for x in v[1:])


def from_point(point):
    qs = [Fraction(x) for x in point]
    d = lcm(*(q.denominator for q in qs)) if qs else 1
    return normalize((d,) + tuple(int(q * d) for q in qs))


def box_constraints(n):
    out = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        out.append((0,) + tuple(e))
        out.append((1,) + tuple(-c for c in e))
    return tuple(out)


# -- exact linear algebra -------------------------------------------------------

def rank(rows) -> int:
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c]:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


@lru_cache(maxsize=200_000)
def _linear_rank(constraints: frozenset) -> int:
    return rank([c[1:] for c in constraints])


def solve(matrix, rhs):
    """Unique solution of a square system, or None if singular."""
    n = len(matrix)
    m = [list(map(Fraction, row)) + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        for i in range(n):
            if i != c and m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return tuple(m[i][n] / m[i][i] for i in range(n))


def det(matrix) -> Fraction:
    m = [list(map(Fraction, r)) for r in matrix]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return d


def affine_dimension(points) -> int:
    points = list(points)
    if not points:
        return -1
    p0 = points[0]
    return rank([[a - b for a, b in zip(p, p0)] for p in points[1:]])


# -- full-dimensional cells -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Cell:
    """A full-dimensional convex polytope in [0,1]^n."""

    n: int
    constraints: tuple
    vertices: tuple
    active: tuple  # active[k]: frozenset of constraints tight at vertices[k]
    _bbox: tuple = field(default=None, repr=False)
    _fbox: tuple = field(default=None, repr=False)

    def points(self):
        return [to_point(v) for v in self.vertices]

    @property
    def bbox(self):
        if self._bbox is None:
            lo = [min(Fraction(v[i + 1], v[0]) for v in self.vertices) for i in range(self.n)]
            hi = [max(Fraction(v[i + 1], v[0]) for v in self.vertices) for i in range(self.n)]
            object.__setattr__(self, "_bbox", (tuple(lo), tuple(hi)))
        return self._bbox

    @property
    def fbox(self):
        """Float copy of the bounding box, only used to rule pairs out early."""
        if self._fbox is None:
            lo, hi = self.bbox
            object.__setattr__(self, "_fbox", (tuple(map(float, lo)), tuple(map(float, hi))))
        return self._fbox

    def contains(self, point) -> bool:
        return all(form_value(c, point) >= 0 for c in self.constraints)

    def key(self):
        return tuple(sorted(self.vertices))

    def denominators(self):
        return {v[0] for v in self.vertices}


def _make_cell(n, verts, actives):
    order = sorted(range(len(verts)), key=lambda k: verts[k])
    verts = tuple(verts[k] for k in order)
    actives = tuple(frozenset(actives[k]) for k in order)
    used = frozenset().union(*actives)
    return Cell(n, tuple(sorted(used)), verts, actives)


def box_cell(n) -> Cell:
    cons = box_constraints(n)
    verts, actives = [], []
    for bits in itertools.product((0, 1), repeat=n):
        verts.append((1,) + bits)
        actives.append({cons[2 * i + b] for i, b in enumerate(bits)})
    return _make_cell(n, verts, actives)


def _sides(cell: Cell, form):
    return [hval(form, v) for v in cell.vertices]


def split(cell: Cell, form):
    """Split along form = 0; returns (part with form >= 0, part with form <= 0).

    A part is ``None`` when it has empty interior.
    """
    form = normalize(form)
    s = _sides(cell, form)
    if all(x >= 0 for x in s):
        return cell, None
    if all(x <= 0 for x in s):
        return None, cell
    n = cell.n
    pos = [k for k, x in enumerate(s) if x > 0]
    neg = [k for k, x in enumerate(s) if x < 0]
    zero = [k for k, x in enumerate(s) if x == 0]
    nform = negate(form)
    cross = []
    for i in pos:
        for j in neg:
            common = cell.active[i] & cell.active[j]
            if _linear_rank(common) != n - 1:
                continue
            u, v = cell.vertices[i], cell.vertices[j]
            w = tuple(s[i] * b - s[j] * a for a, b in zip(u, v))
            cross.append((normalize(w), common))
    parts = []
    for keep, f in ((pos, form), (neg, nform)):
        verts = [cell.vertices[k] for k in keep + zero]
        acts = [set(cell.active[k]) for k in keep]
        acts += [set(cell.active[k]) | {f} for k in zero]
        for w, common in cross:
            verts.append(w)
            acts.append(set(common) | {f})
        parts.append(_make_cell(n, verts, acts))
    return parts[0], parts[1]


def cut(cell: Cell, form):
    """The part of ``cell`` where form >= 0, or None if lower-dimensional."""
    return split(cell, form)[0]


_FLOAT_MARGIN = 1e-9


def bbox_overlap(a: Cell, b: Cell) -> bool:
    """Open bounding boxes meet.  Floats settle the clear cases, Fractions the rest."""
    (alo, ahi), (blo, bhi) = a.fbox, b.fbox
    unsure = []
    for i, (x, y, z, w) in enumerate(zip(alo, blo, ahi, bhi)):
        gap = min(z, w) - max(x, y)
        if gap < -_FLOAT_MARGIN:
            return False
        if gap <= _FLOAT_MARGIN:
            unsure.append(i)
    if not unsure:
        return True
    (alo, ahi), (blo, bhi) = a.bbox, b.bbox
    return all(max(alo[i], blo[i]) < min(ahi[i], bhi[i]) for i in unsure)


def intersect(a: Cell, b: Cell):
    """Full-dimensional intersection of two cells, or None."""
    if not bbox_overlap(a, b):
        return None
    cur = a
    for c in b.constraints:
        cur = cut(cur, c)
        if cur is None:
            return None
    return cur


def _faces_of(vertex_ids, cell, dim):
    """Sub-faces of codimension one of the face spanned by ``vertex_ids``."""
    faces = set()
    pts = {k: to_point(cell.vertices[k]) for k in vertex_ids}
    for c in set().union(*(cell.active[k] for k in vertex_ids)):
        sub = frozenset(k for k in vertex_ids if c in cell.active[k])
        if len(sub) < dim or sub == vertex_ids:
            continue
        if affine_dimension([pts[k] for k in sub]) == dim - 1:
            faces.add(sub)
    return faces


def triangulate(cell: Cell):
    """Pulling triangulation; list of simplices as vertex index tuples."""
    def rec(ids, dim):
        if dim == 0:
            return [tuple(ids)]
        apex = min(ids)
        out = []
        for face in sorted(_faces_of(ids, cell, dim), key=sorted):
            if apex in face:
                continue
            out.extend(s + (apex,) for s in rec(face, dim - 1))
        return out
    return rec(frozenset(range(len(cell.vertices))), cell.n)


def volume(cell: Cell) -> Fraction:
    pts = cell.points()
    total = Fraction(0)
    for simplex in triangulate(cell):
        p0 = pts[simplex[0]]
        rows = [[a - b for a, b in zip(pts[k], p0)] for k in simplex[1:]]
        total += abs(det(rows))
    return total / factorial(cell.n)


# -- general polyhedra given by constraints ------------------------------------

@dataclass(frozen=True)
class RationalPolyhedron:
    """{x in [0,1]^n : c(x) >= 0 for c in ineqs, c(x) = 0 for c in eqs}."""

    n: int
    ineqs: tuple
    eqs: tuple = ()
    _vertices: tuple | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_constraints(cls, n, constraints):
        """``constraints``: iterable of (coefficients, relation) with relation
        ``">="`` or ``"="``; coefficients are rational ``(c0, c1, ..., cn)``."""
        ineqs, eqs = list(box_constraints(n)), []
        for coeffs, rel in constraints:
            if len(coeffs) != n + 1:
                raise PreconditionError("constraint has the wrong length", coeffs)
            f = integer_form(coeffs)
            if rel in (">=", "ge"):
                ineqs.append(f)
            elif rel in ("<=", "le"):
                ineqs.append(negate(f))
            elif rel in ("=", "==", "eq"):
                eqs.append(f)
            else:
                raise PreconditionError(f"unknown relation {rel!r}", rel)
        return cls(n, tuple(sorted(set(ineqs))), tuple(sorted(set(eqs))))

    def contains(self, point) -> bool:
        return (all(form_value(c, point) >= 0 for c in self.ineqs)
                and all(form_value(c, point) == 0 for c in self.eqs))

    def vertices(self):
        if self._vertices is None:
            object.__setattr__(self, "_vertices", enumerate_vertices(self.n, self.ineqs, self.eqs))
        return self._vertices

    def is_empty(self):
        return not self.vertices()

    def dimension(self):
        return affine_dimension(self.vertices())

    def all_constraints(self):
        return [(c, ">=") for c in self.ineqs] + [(c, "=") for c in self.eqs]


def enumerate_vertices(n, ineqs, eqs=()):
    """Brute force: solve every n-subset of tight constraints, keep feasible points."""
    rows = list(dict.fromkeys(list(eqs) + list(ineqs)))
    found = set()
    for subset in itertools.combinations(rows, n):
        sol = solve([c[1:] for c in subset], [-c[0] for c in subset])
        if sol is None:
            continue
        if all(form_value(c, sol) >= 0 for c in ineqs) and all(form_value(c, sol) == 0 for c in eqs):
            found.add(sol)
    return tuple(sorted(found))


def cell_as_polyhedron(cell: Cell) -> RationalPolyhedron:
    return RationalPolyhedron(cell.n, cell.constraints, (), tuple(sorted(cell.points())))


def polyhedron_from_cell_face(cell: Cell, form) -> RationalPolyhedron | None:
    """The face of ``cell`` where ``form`` vanishes, assuming form >= 0 on the cell."""
    pts = tuple(sorted(to_point(v) for v in cell.vertices if hval(form, v) == 0))
    if not pts:
        return None
    eqs = () if not any(form) else (normalize(form),)
    return RationalPolyhedron(cell.n, cell.constraints, eqs, pts)


def denominators_lcm(points: Sequence) -> int:
    d = 1
    for p in points:
        for x in p:
            d = lcm(d, Fraction(x).denominator)
    return d


def format_constraint(form, rel=">="):
    """JSON form of ``c0 + c1*x1 + ... rel 0`` with "num/den" coefficients."""
    return {"coefficients": [f"{c}/1" for c in form], "relation": rel}
