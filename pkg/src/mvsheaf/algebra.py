"""Finite MV-algebras given by exact operation tables.

Elements are plain ``int`` indices into the carrier ``range(size)``.  Chains
and products of chains additionally carry a rational label per element
(a :class:`fractions.Fraction` for a chain, a tuple of them for a product).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import MvError, PreconditionError, ResourceLimitError

DEFAULT_MAX_SIZE = 256

BINARY_OPS = ("oplus", "odot", "ominus", "join", "meet", "dist")


def _frozen(arr):
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.setflags(write=False)
    return arr


class FiniteMvAlgebra:
    """A finite algebra of type (oplus, neg, zero) with all derived tables.

    The constructor does not check the MV axioms; use :func:`validate_axioms`
    for that.  It only checks shapes and index ranges, so that corrupted
    tables can still be built and inspected.
    """

    def __init__(self, oplus, neg, zero=0, labels=None, name=None,
                 max_size=DEFAULT_MAX_SIZE):
        oplus = np.asarray(oplus, dtype=np.int64)
        neg = np.asarray(neg, dtype=np.int64)
        size = len(neg)
        if size < 1:
            raise MvError("an algebra needs at least one element")
        if size > max_size:
            raise ResourceLimitError(
                f"carrier size {size} exceeds the cap {max_size}")
        if oplus.shape != (size, size):
            raise MvError(f"oplus table must be {size}x{size}, got {oplus.shape}")
        if oplus.min() < 0 or oplus.max() >= size or neg.min() < 0 or neg.max() >= size:
            raise MvError("table entry outside the carrier")
        if not 0 <= zero < size:
            raise MvError("zero outside the carrier")
        if labels is not None and len(labels) != size:
            raise MvError("one label per element is required")

        self.size = size
        self.zero = int(zero)
        self.labels = tuple(labels) if labels is not None else None
        self.name = name
        self._oplus = _frozen(oplus)
        self._neg = _frozen(neg)
        self.one = int(neg[zero])

        N, T = self._neg, self._oplus
        self._odot = _frozen(N[T[N[:, None], N[None, :]]])
        self._ominus = _frozen(self._odot[:, N])
        self._leq = self._ominus == self.zero
        self._leq.setflags(write=False)
        # x v y = (x - y) + y ;  x ^ y = not(not x v not y)
        self._join = _frozen(T[self._ominus, np.arange(size)[None, :]])
        self._meet = _frozen(N[self._join[N[:, None], N[None, :]]])
        self._dist = _frozen(T[self._ominus, self._ominus.T])
        self._multiples = None
        self._label_index = None

    # -- tables -----------------------------------------------------------
    @property
    def oplus_table(self):
        return self._oplus

    @property
    def neg_table(self):
        return self._neg

    def table(self, op):
        return {
            "oplus": self._oplus, "odot": self._odot, "ominus": self._ominus,
            "join": self._join, "meet": self._meet, "dist": self._dist,
        }[op]

    @property
    def leq_matrix(self):
        return self._leq

    @property
    def multiples(self):
        """Row ``n`` holds ``n*x`` for every x, for n = 0..size+1."""
        if self._multiples is None:
            rows = [np.full(self.size, self.zero, dtype=np.int64)]
            ids = np.arange(self.size)
            for _ in range(self.size + 1):
                rows.append(self._oplus[rows[-1], ids])
            self._multiples = _frozen(np.stack(rows))
        return self._multiples

    # -- element-level operations ----------------------------------------
    def elements(self):
        return range(self.size)

    def _check(self, *xs):
        for x in xs:
            if not (isinstance(x, (int, np.integer)) and 0 <= x < self.size):
                raise PreconditionError(f"{x!r} is not an element of this algebra", x)

    def oplus(self, x, y):
        return int(self._oplus[x, y])

    def neg(self, x):
        return int(self._neg[x])

    def odot(self, x, y):
        return int(self._odot[x, y])

    def ominus(self, x, y):
        return int(self._ominus[x, y])

    def join(self, x, y):
        return int(self._join[x, y])

    def meet(self, x, y):
        return int(self._meet[x, y])

    def dist(self, x, y):
        return int(self._dist[x, y])

    def scalar(self, n, x):
        if n < 0:
            raise PreconditionError("scalar multiple needs n >= 0", n)
        return int(self.multiples[min(n, self.size + 1), x])

    def leq(self, x, y):
        return bool(self._leq[x, y])

    def join_all(self, xs: Iterable[int]):
        acc = self.zero
        for x in xs:
            acc = self.join(acc, x)
        return acc

    def meet_all(self, xs: Iterable[int]):
        acc = self.one
        for x in xs:
            acc = self.meet(acc, x)
        return acc

    def oplus_all(self, xs: Iterable[int]):
        acc = self.zero
        for x in xs:
            acc = self.oplus(acc, x)
        return acc

    @property
    def is_trivial(self):
        return self.one == self.zero

    def is_chain(self):
        return bool(np.all(self._leq | self._leq.T)) and not self.is_trivial

    # -- labels -----------------------------------------------------------
    def label(self, x):
        if self.labels is None:
            return None
        return self.labels[x]

    def element(self, *coords):
        """Index of the element labelled ``coords`` (one coordinate per factor)."""
        if self.labels is None:
            raise MvError("algebra carries no labels")
        if self._label_index is None:
            self._label_index = {_as_tuple(lab): i for i, lab in enumerate(self.labels)}
        key = tuple(Fraction(c) for c in coords)
        try:
            return self._label_index[key]
        except KeyError:
            raise PreconditionError(f"no element labelled {coords}", coords) from None

    # -- identity ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, FiniteMvAlgebra):
            return NotImplemented
        return (self.size == other.size and self.zero == other.zero
                and np.array_equal(self._oplus, other._oplus)
                and np.array_equal(self._neg, other._neg))

    def __hash__(self):
        return hash((self.size, self.zero, self._oplus.tobytes(), self._neg.tobytes()))

    def __repr__(self):
        return f"FiniteMvAlgebra({self.name or 'table'}, size={self.size})"


def _as_tuple(label):
    return label if isinstance(label, tuple) else (label,)


class ProductAlgebra(FiniteMvAlgebra):
    """Binary product ``left x right``; element ``(i, j)`` has index ``i*|right| + j``."""

    def __init__(self, left: FiniteMvAlgebra, right: FiniteMvAlgebra,
                 max_size=DEFAULT_MAX_SIZE):
        m, k = left.size, right.size
        if m * k > max_size:
            raise ResourceLimitError(f"product size {m * k} exceeds the cap {max_size}")
        li = np.repeat(np.arange(m), k)
        ri = np.tile(np.arange(k), m)
        oplus = left.oplus_table[li[:, None], li[None, :]] * k \
            + right.oplus_table[ri[:, None], ri[None, :]]
        neg = left.neg_table[li] * k + right.neg_table[ri]
        labels = None
        if left.labels is not None and right.labels is not None:
            labels = [_as_tuple(left.labels[i]) + _as_tuple(right.labels[j])
                      for i in range(m) for j in range(k)]
        name = f"{left.name or 'A'} x {right.name or 'B'}"
        super().__init__(oplus, neg, left.zero * k + right.zero, labels, name, max_size)
        self.left = left
        self.right = right

    def pair(self, i, j):
        return i * self.right.size + j

    def unpair(self, x):
        return divmod(x, self.right.size)

    @property
    def factors(self):
        """Flattened list of non-product factors, in order."""
        out = []
        for part in (self.left, self.right):
            out.extend(part.factors if isinstance(part, ProductAlgebra) else [part])
        return out

    def coordinates(self, x):
        """Coordinates of ``x`` in the flattened factors."""
        i, j = self.unpair(x)
        left = self.left.coordinates(i) if isinstance(self.left, ProductAlgebra) else (i,)
        right = self.right.coordinates(j) if isinstance(self.right, ProductAlgebra) else (j,)
        return left + right

    def projection(self, k):
        """Index map onto the k-th flattened factor (a surjective morphism)."""
        return tuple(self.coordinates(x)[k] for x in range(self.size))


def make_chain(k: int, max_size=DEFAULT_MAX_SIZE) -> FiniteMvAlgebra:
    """The Lukasiewicz chain {0, 1/k, ..., 1}; element i is i/k."""
    if not isinstance(k, int) or k < 1:
        raise PreconditionError("make_chain needs k >= 1 (use make_trivial for size 1)", k)
    idx = np.arange(k + 1)
    oplus = np.minimum(k, idx[:, None] + idx[None, :])
    neg = k - idx
    labels = [Fraction(i, k) for i in range(k + 1)]
    return FiniteMvAlgebra(oplus, neg, 0, labels, f"L{k}", max_size)


def make_trivial() -> FiniteMvAlgebra:
    return FiniteMvAlgebra([[0]], [0], 0, [Fraction(0)], "trivial")


def product(a: FiniteMvAlgebra, b: FiniteMvAlgebra, max_size=DEFAULT_MAX_SIZE) -> ProductAlgebra:
    return ProductAlgebra(a, b, max_size)


def product_of(*algebras: FiniteMvAlgebra, max_size=DEFAULT_MAX_SIZE) -> FiniteMvAlgebra:
    if not algebras:
        raise PreconditionError("product_of needs at least one factor")
    acc = algebras[0]
    for nxt in algebras[1:]:
        acc = product(acc, nxt, max_size)
    return acc


def apply(algebra: FiniteMvAlgebra, op, args: Sequence[int]) -> int:
    """Apply a primitive or derived operation by name.

    ``op`` is one of ``oplus, neg, odot, ominus, join, meet, dist`` or the
    pair ``("scalar", n)`` (also accepted as the string ``"scalar(n)"``).
    """
    args = list(args)
    algebra._check(*args)
    if isinstance(op, str) and op.startswith("scalar(") and op.endswith(")"):
        op = ("scalar", int(op[7:-1]))
    if isinstance(op, tuple) and op[0] == "scalar":
        if len(args) != 1:
            raise PreconditionError("scalar takes one argument", args)
        return algebra.scalar(op[1], args[0])
    if op == "neg":
        if len(args) != 1:
            raise PreconditionError("neg takes one argument", args)
        return algebra.neg(args[0])
    if op in BINARY_OPS:
        if len(args) != 2:
            raise PreconditionError(f"{op} takes two arguments", args)
        return int(algebra.table(op)[args[0], args[1]])
    raise PreconditionError(f"unknown operation {op!r}", op)


def leq(algebra: FiniteMvAlgebra, x: int, y: int) -> bool:
    algebra._check(x, y)
    return algebra.leq(x, y)


def is_archimedean_element(algebra: FiniteMvAlgebra, a: int):
    """Return ``(True, n)`` for the least n >= 1 with n*a == (n+1)*a.

    The sequence of multiples is increasing, so it stabilizes within
    ``size`` steps and the search below is complete.
    """
    algebra._check(a)
    mult = algebra.multiples
    for n in range(1, algebra.size + 1):
        if mult[n, a] == mult[n + 1, a]:
            return True, n
    return False, None


# -- axiom validation --------------------------------------------------------

@dataclass(frozen=True)
class IdentityCheck:
    name: str
    passed: bool
    counterexample: tuple | None = None


@dataclass(frozen=True)
class AxiomReport:
    checks: tuple = field(default_factory=tuple)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _witness(mask):
    """First index tuple where ``mask`` is False, or None."""
    bad = np.argwhere(~mask)
    if len(bad) == 0:
        return None
    return tuple(int(v) for v in bad[0])


def validate_axioms(algebra: FiniteMvAlgebra) -> AxiomReport:
    """Exhaustively check the MV axioms and the standard derived identities.

    Cost is O(size^3) in time and memory.
    """
    A = algebra
    n = A.size
    T, N = A.oplus_table, A.neg_table
    odot, ominus = A.table("odot"), A.table("ominus")
    join, meet, dist = A.table("join"), A.table("meet"), A.table("dist")
    L = A.leq_matrix
    ids = np.arange(n)
    X, Y = ids[:, None], ids[None, :]
    zero, one = A.zero, A.one

    checks = []

    def add(name, mask):
        w = _witness(np.asarray(mask))
        checks.append(IdentityCheck(name, w is None, w))

    lhs = T[T[:, :, None], ids[None, None, :]]          # (x+y)+z
    rhs = T[ids[:, None, None], T[None, :, :]]          # x+(y+z)
    add("oplus associative", lhs == rhs)
    add("oplus commutative", T == T.T)
    add("zero is a unit", (T[:, zero] == ids) & (T[zero, :] == ids))
    add("double negation", N[N] == ids)
    add("one absorbs", T[:, one] == one)
    mv6 = T[N[T[N[X], Y]], Y]
    add("lukasiewicz axiom", mv6 == mv6.T)

    add("order reflexive", np.diag(L))
    add("order antisymmetric", ~(L & L.T) | (X == Y))
    trans = (L[:, :, None] & L[None, :, :]) <= L[:, None, :]
    add("order transitive", trans)
    exists = np.zeros((n, n), dtype=bool)
    exists[X, T] = True                                  # exists[x, x+z]
    add("order by existence agrees with order by difference", exists == L)

    ub = L[:, None, :] & L[None, :, :]                   # z above x and y
    add("join is an upper bound", L[X, join] & L[Y, join])
    add("join is least", ~ub | L[join[:, :, None], ids[None, None, :]])
    lb = L.T[:, None, :] & L.T[None, :, :]               # z below x and y
    add("meet is a lower bound", L[meet, X] & L[meet, Y])
    add("meet is greatest", (~lb) | L[ids[None, None, :], meet[:, :, None]])

    add("meet below oplus", L[meet, T])
    add("odot below meet", L[odot, meet])
    add("distance vanishes exactly on the diagonal", (dist == zero) == (X == Y))
    add("x oplus not x is one", T[ids, N] == one)
    add("differences are disjoint", meet[ominus, ominus.T] == zero)
    mult = A.multiples
    lhs = mult[1:n + 1][:, meet]                         # n(x^y)
    rhs = meet[mult[1:n + 1][:, :, None], mult[1:n + 1][:, None, :]]
    add("scalar multiples distribute over meet", lhs == rhs)
    return AxiomReport(tuple(checks))


# -- isomorphism search (test support and stalk comparison) -------------------

def find_isomorphism(a: FiniteMvAlgebra, b: FiniteMvAlgebra):
    """Backtracking search for an isomorphism; returns an index map or None."""
    if a.size != b.size:
        return None
    n = a.size
    mapping = [-1] * n
    used = [False] * n

    def consistent(x):
        fx = mapping[x]
        if mapping[a.neg(x)] >= 0 and mapping[a.neg(x)] != b.neg(fx):
            return False
        for y in range(n):
            fy = mapping[y]
            if fy < 0:
                continue
            s = a.oplus(x, y)
            if mapping[s] >= 0 and mapping[s] != b.oplus(fx, fy):
                return False
        return True

    order = sorted(range(n), key=lambda x: (x != a.zero, x))

    def search(k):
        if k == n:
            return True
        x = order[k]
        candidates = [b.zero] if x == a.zero else range(n)
        for fx in candidates:
            if used[fx]:
                continue
            mapping[x], used[fx] = fx, True
            if consistent(x) and search(k + 1):
                return True
            mapping[x], used[fx] = -1, False
        return False

    return tuple(mapping) if search(0) else None


def chain_labels(chain: FiniteMvAlgebra):
    """The unique embedding of a finite chain into [0,1]: i-th element -> i/k."""
    if not chain.is_chain():
        raise PreconditionError("not a chain")
    order = sorted(range(chain.size), key=lambda x: int(chain.leq_matrix[:, x].sum()))
    k = chain.size - 1
    out = [None] * chain.size
    for rank, x in enumerate(order):
        out[x] = Fraction(rank, k)
    return tuple(out)


# -- JSON ---------------------------------------------------------------------

def format_fraction(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def algebra_from_json(doc, max_size=DEFAULT_MAX_SIZE) -> FiniteMvAlgebra:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise MvError("algebra JSON must be an object with a 'kind' field")
    kind = doc["kind"]
    if kind == "chain":
        return make_chain(int(doc["k"]), max_size)
    if kind == "trivial":
        return make_trivial()
    if kind == "product":
        factors = [algebra_from_json(f, max_size) for f in doc["factors"]]
        return product_of(*factors, max_size=max_size)
    if kind == "table":
        size = int(doc["size"])
        if len(doc["neg"]) != size:
            raise MvError("neg table length differs from size")
        return FiniteMvAlgebra(doc["oplus"], doc["neg"], int(doc.get("zero", 0)),
                               None, doc.get("name"), max_size)
    raise MvError(f"unknown algebra kind {kind!r}")


def algebra_to_json(algebra: FiniteMvAlgebra) -> dict:
    doc = {
        "kind": "table",
        "size": algebra.size,
        "zero": algebra.zero,
        "oplus": algebra.oplus_table.tolist(),
        "neg": algebra.neg_table.tolist(),
    }
    if algebra.labels is not None:
        doc["labels"] = [
            [format_fraction(c) for c in _as_tuple(lab)] if isinstance(lab, tuple)
            else format_fraction(lab) for lab in algebra.labels
        ]
    return doc


def standard_suite():
    """The small algebras used throughout the test and acceptance suites."""
    L = make_chain
    suite = [L(k) for k in range(1, 7)]
    suite += [product(L(2), L(2)), product(L(2), L(3)),
              product_of(L(1), L(1), L(1)), product_of(L(2), L(2), L(2))]
    return suite


def pairs(xs):
    return itertools.product(xs, repeat=2)
