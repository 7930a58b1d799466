"""Lukasiewicz terms: syntax trees, a small ASCII parser, and evaluation.

Only four node kinds are primitive (``Var``, ``Zero``, ``Oplus``, ``Neg``)
plus ``Scalar`` for n-fold sums, which is kept as a node because gluing
produces multiples with large n.  Derived operators are desugared by the
constructor functions below::

    one()        = ~0
    odot(x, y)   = ~(~x (+) ~y)
    ominus(x, y) = x (*) ~y        = ~(~x (+) y)
    join(x, y)   = (x (-) y) (+) y
    meet(x, y)   = ~(~x \\/ ~y)
    dist(x, y)   = (x (-) y) (+) (y (-) x)

Surface grammar (lowest to highest precedence)::

    expr   := meet ('\\/' meet)*
    meet   := sum ('/\\' sum)*
    sum    := prod (('(+)' | '(-)') prod)*
    prod   := scaled ('(*)' scaled)*
    scaled := INT '*' scaled | unary
    unary  := '~' unary | atom
    atom   := '0' | '1' | 'x' INT | 'd' '(' expr ',' expr ')' | '(' expr ')'

Variables are ``x1, x2, ...`` on the surface and 0-based internally.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import FiniteMvAlgebra
from .errors import MvError, PreconditionError, TermSyntaxError


class Term:
    """Base class of all term nodes.  Nodes are immutable and hash-consed
    only by value: equality is structural, hashing is cached."""

    __slots__ = ()

    def __add__(self, other):
        return oplus(self, other)

    def __invert__(self):
        return neg(self)

    def __str__(self):
        return to_text(self)


def _cache_hash(obj, *parts):
    object.__setattr__(obj, "_hash", hash((type(obj).__name__,) + parts))


@dataclass(frozen=True, eq=False, repr=False)
class Var(Term):
    index: int
    _hash: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.index < 0:
            raise PreconditionError("variable index must be >= 0", self.index)
        _cache_hash(self, self.index)

    def __eq__(self, other):
        return isinstance(other, Var) and other.index == self.index

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.index})"


@dataclass(frozen=True, eq=False, repr=False)
class Zero(Term):
    _hash: int = field(init=False, compare=False)

    def __post_init__(self):
        _cache_hash(self)

    def __eq__(self, other):
        return isinstance(other, Zero)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return "Zero()"


@dataclass(frozen=True, eq=False, repr=False)
class Oplus(Term):
    left: Term
    right: Term
    _hash: int = field(init=False, compare=False)

    def __post_init__(self):
        _cache_hash(self, self.left._hash, self.right._hash)

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Oplus) and other._hash == self._hash
            and other.left == self.left and other.right == self.right)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Oplus({self.left!r}, {self.right!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Neg(Term):
    child: Term
    _hash: int = field(init=False, compare=False)

    def __post_init__(self):
        _cache_hash(self, self.child._hash)

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Neg) and other._hash == self._hash
            and other.child == self.child)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Neg({self.child!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Scalar(Term):
    """``n`` copies of ``child`` summed with (+); ``Scalar(0, t)`` is 0."""

    n: int
    child: Term
    _hash: int = field(init=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise PreconditionError("scalar multiple needs n >= 0", self.n)
        _cache_hash(self, self.n, self.child._hash)

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Scalar) and other._hash == self._hash
            and other.n == self.n and other.child == self.child)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Scalar({self.n}, {self.child!r})"


ZERO = Zero()


# -- constructors (desugaring) ----------------------------------------------

def var(i: int) -> Term:
    return Var(i)


def zero() -> Term:
    return ZERO


def neg(t: Term) -> Term:
    if isinstance(t, Neg):
        return t.child
    return Neg(t)


def one() -> Term:
    return Neg(ZERO)


def oplus(a: Term, b: Term) -> Term:
    return Oplus(a, b)


def odot(a: Term, b: Term) -> Term:
    return neg(oplus(neg(a), neg(b)))


def ominus(a: Term, b: Term) -> Term:
    return odot(a, neg(b))


def join(a: Term, b: Term) -> Term:
    return oplus(ominus(a, b), b)


def meet(a: Term, b: Term) -> Term:
    return neg(join(neg(a), neg(b)))


def dist(a: Term, b: Term) -> Term:
    return oplus(ominus(a, b), ominus(b, a))


def scalar(n: int, t: Term) -> Term:
    if n == 1:
        return t
    return Scalar(n, t)


# Simplifying variants, used by code that builds large terms mechanically.
# They only apply MV identities (0 is a unit, 1 absorbs), so meaning is kept.

def _is_one(t):
    return isinstance(t, Neg) and isinstance(t.child, Zero)


def s_oplus(a: Term, b: Term) -> Term:
    if isinstance(a, Zero):
        return b
    if isinstance(b, Zero):
        return a
    if _is_one(a) or _is_one(b):
        return one()
    return Oplus(a, b)


def s_odot(a: Term, b: Term) -> Term:
    return neg(s_oplus(neg(a), neg(b)))


def s_join(a: Term, b: Term) -> Term:
    if a == b:
        return a
    if isinstance(a, Zero):
        return b
    if isinstance(b, Zero):
        return a
    if _is_one(a) or _is_one(b):
        return one()
    return s_oplus(s_odot(a, neg(b)), b)


def s_meet(a: Term, b: Term) -> Term:
    return neg(s_join(neg(a), neg(b)))


def s_scalar(n: int, t: Term) -> Term:
    if n == 0 or isinstance(t, Zero):
        return ZERO
    if _is_one(t):
        return one()
    return scalar(n, t)


def join_all(terms: Sequence[Term]) -> Term:
    acc = ZERO
    for t in terms:
        acc = s_join(acc, t)
    return acc


def meet_all(terms: Sequence[Term]) -> Term:
    acc = one()
    for t in terms:
        acc = s_meet(acc, t)
    return acc


def free_vars(t: Term) -> frozenset:
    out = set()
    seen = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Var):
            out.add(node.index)
        elif isinstance(node, Oplus):
            stack.extend((node.left, node.right))
        elif isinstance(node, (Neg, Scalar)):
            stack.append(node.child)
    return frozenset(out)


def arity(t: Term) -> int:
    fv = free_vars(t)
    return max(fv) + 1 if fv else 0


def size(t: Term) -> int:
    """Number of nodes of the tree (shared subterms counted once per use)."""
    memo = {}

    def go(node):
        key = id(node)
        if key not in memo:
            if isinstance(node, Oplus):
                memo[key] = 1 + go(node.left) + go(node.right)
            elif isinstance(node, (Neg, Scalar)):
                memo[key] = 1 + go(node.child)
            else:
                memo[key] = 1
        return memo[key]

    return go(t)


# -- printing ------------------------------------------------------------

def to_text(t: Term) -> str:
    if isinstance(t, Var):
        return f"x{t.index + 1}"
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Oplus):
        return f"({to_text(t.left)} (+) {to_text(t.right)})"
    if isinstance(t, Neg):
        return "~" + _tight(t.child)
    if isinstance(t, Scalar):
        return f"{t.n}*{_tight(t.child)}"
    raise TypeError(f"not a term: {t!r}")


def _tight(t):
    text = to_text(t)
    if isinstance(t, Scalar):
        return f"({text})"
    return text


# -- parsing -------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op>\(\+\)|\(\*\)|\(-\)|\\/|/\\)
  | (?P<lp>\()
  | (?P<rp>\))
  | (?P<comma>,)
  | (?P<tilde>~)
  | (?P<star>\*)
  | (?P<var>x(?P<vnum>[0-9]+))
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
""", re.VERBOSE)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "vnum":
            kind = "var"
        if kind != "ws":
            if kind == "ident" and m.group() != "d":
                raise TermSyntaxError(f"unknown identifier {m.group()!r}", pos)
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise TermSyntaxError(f"expected {want!r}, found {got!r}", tok[2])
        self.i += 1
        return tok

    def at(self, kind, value=None):
        tok = self.tokens[self.i]
        return tok[0] == kind and (value is None or tok[1] == value)

    def expr(self):
        t = self.meet()
        while self.at("op", "\\/"):
            self.take()
            t = join(t, self.meet())
        return t

    def meet(self):
        t = self.sum()
        while self.at("op", "/\\"):
            self.take()
            t = meet(t, self.sum())
        return t

    def sum(self):
        t = self.prod()
        while self.at("op", "(+)") or self.at("op", "(-)"):
            op = self.take()[1]
            rhs = self.prod()
            t = oplus(t, rhs) if op == "(+)" else ominus(t, rhs)
        return t

    def prod(self):
        t = self.scaled()
        while self.at("op", "(*)"):
            self.take()
            t = odot(t, self.scaled())
        return t

    def scaled(self):
        if self.at("int") and self.tokens[self.i + 1][0] == "star":
            n = int(self.take()[1])
            self.take("star")
            return scalar(n, self.scaled())
        return self.unary()

    def unary(self):
        if self.at("tilde"):
            self.take()
            return neg(self.unary())
        return self.atom()

    def atom(self):
        kind, value, pos = self.peek()
        if kind == "int":
            self.take()
            if value == "0":
                return ZERO
            if value == "1":
                return one()
            raise TermSyntaxError(f"constant {value} is not 0 or 1 (write {value}*t for a multiple)", pos)
        if kind == "var":
            self.take()
            k = int(value[1:])
            if k < 1:
                raise TermSyntaxError("variables are numbered from x1", pos)
            return Var(k - 1)
        if kind == "ident":
            self.take()
            self.take("lp")
            a = self.expr()
            self.take("comma")
            b = self.expr()
            self.take("rp")
            return dist(a, b)
        if kind == "lp":
            self.take()
            t = self.expr()
            self.take("rp")
            return t
        raise TermSyntaxError(f"unexpected {value or 'end of input'!r}", pos)


def parse(text: str) -> Term:
    p = _Parser(text)
    t = p.expr()
    if not p.at("end"):
        kind, value, pos = p.peek()
        raise TermSyntaxError(f"unexpected {value!r}", pos)
    return t


def parse_lines(text: str):
    """Terms from a file body: one per line, ``#`` starts a comment."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse(line))
    return out


# -- evaluation ------------------------------------------------------------

def _env_lookup(env, i):
    try:
        return env[i]
    except (KeyError, IndexError):
        raise PreconditionError(f"variable x{i + 1} is unbound", i) from None


def eval_term(t: Term, algebra: FiniteMvAlgebra, env) -> int:
    """Evaluate ``t`` in a finite algebra; ``env`` maps variable index to element."""
    memo = {}

    def go(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            v = _env_lookup(env, node.index)
            algebra._check(v)
        elif isinstance(node, Zero):
            v = algebra.zero
        elif isinstance(node, Oplus):
            v = algebra.oplus(go(node.left), go(node.right))
        elif isinstance(node, Neg):
            v = algebra.neg(go(node.child))
        elif isinstance(node, Scalar):
            v = algebra.scalar(node.n, go(node.child))
        else:
            raise TypeError(f"not a term: {node!r}")
        memo[key] = v
        return v

    return go(t)


def eval_unit(t: Term, point: Sequence) -> Fraction:
    """Exact evaluation over the unit interval with min(1, x+y) and 1-x."""
    pt = [Fraction(c) for c in point]
    for c in pt:
        if not 0 <= c <= 1:
            raise PreconditionError(f"coordinate {c} outside [0,1]", c)
    memo = {}
    ONE = Fraction(1)

    def go(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            v = _env_lookup(pt, node.index)
        elif isinstance(node, Zero):
            v = Fraction(0)
        elif isinstance(node, Oplus):
            v = min(ONE, go(node.left) + go(node.right))
        elif isinstance(node, Neg):
            v = ONE - go(node.child)
        elif isinstance(node, Scalar):
            v = min(ONE, node.n * go(node.child))
        else:
            raise TypeError(f"not a term: {node!r}")
        memo[key] = v
        return v

    return go(t)


class TermHom:
    """The morphism F_n -> A determined by the images of the variables."""

    def __init__(self, algebra: FiniteMvAlgebra, images: Sequence[int]):
        algebra._check(*images)
        self.algebra = algebra
        self.images = tuple(int(x) for x in images)

    def __call__(self, t: Term) -> int:
        return eval_term(t, self.algebra, self.images)

    def __repr__(self):
        return f"TermHom({self.algebra!r}, {self.images})"


def hom_from_tuple(algebra: FiniteMvAlgebra, images: Sequence[int]) -> TermHom:
    return TermHom(algebra, images)


def as_term(obj) -> Term:
    """Accept a Term or its surface text."""
    if isinstance(obj, Term):
        return obj
    if isinstance(obj, str):
        return parse(obj)
    raise MvError(f"cannot read a term from {obj!r}")
