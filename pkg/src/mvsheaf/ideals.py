"""Ideals, prime and maximal ideals, and quotients of finite MV-algebras."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .algebra import FiniteMvAlgebra
from .errors import InternalInconsistencyError, PreconditionError


@dataclass(frozen=True)
class Ideal:
    algebra: FiniteMvAlgebra
    members: frozenset

    def __contains__(self, x):
        return x in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self):
        return len(self.members)

    @property
    def is_proper(self):
        return self.algebra.one not in self.members

    def sorted_members(self):
        return tuple(sorted(self.members))

    def mask(self):
        m = np.zeros(self.algebra.size, dtype=bool)
        m[list(self.members)] = True
        return m

    def __le__(self, other):
        return self.members <= other.members

    def __repr__(self):
        return f"Ideal({list(self.sorted_members())})"


def is_ideal(algebra: FiniteMvAlgebra, members: Iterable[int]) -> bool:
    s = set(members)
    if algebra.zero not in s:
        return False
    L = algebra.leq_matrix
    for x in s:
        if not set(np.flatnonzero(L[:, x]).tolist()) <= s:
            return False
        for y in s:
            if algebra.oplus(x, y) not in s:
                return False
    return True


def make_ideal(algebra: FiniteMvAlgebra, members: Iterable[int]) -> Ideal:
    members = frozenset(int(x) for x in members)
    algebra._check(*members)
    if not is_ideal(algebra, members):
        raise PreconditionError("subset is not an ideal", sorted(members))
    return Ideal(algebra, members)


def generated_ideal(algebra: FiniteMvAlgebra, gens: Iterable[int]) -> Ideal:
    """Least ideal containing ``gens``, by iterating downward and (+) closure."""
    gens = [int(g) for g in gens]
    algebra._check(*gens)
    L = algebra.leq_matrix
    current = {algebra.zero, *gens}
    while True:
        grown = set(current)
        for x in current:
            grown.update(np.flatnonzero(L[:, x]).tolist())
            for y in current:
                grown.add(algebra.oplus(x, y))
        if grown == current:
            return Ideal(algebra, frozenset(current))
        current = grown


@lru_cache(maxsize=64)
def _principal_masks(algebra: FiniteMvAlgebra):
    # (a) = { x | x <= n*a for some n }; n = size is already stable
    top = algebra.multiples[algebra.size]
    return algebra.leq_matrix[:, top].T.copy()


def principal_ideal(algebra: FiniteMvAlgebra, a: int) -> Ideal:
    """The ideal (a), computed as the down-set of the stable multiple of a."""
    algebra._check(a)
    row = _principal_masks(algebra)[a]
    return Ideal(algebra, frozenset(np.flatnonzero(row).tolist()))


def principal_generator(algebra: FiniteMvAlgebra, ideal: Ideal) -> int:
    """A generator g of ``ideal``: the (+)-sum of all members."""
    g = algebra.oplus_all(sorted(ideal.members))
    if principal_ideal(algebra, g).members != ideal.members:
        raise PreconditionError("not an ideal", ideal.sorted_members())
    return g


def in_ideal(algebra: FiniteMvAlgebra, x: int, a: int) -> bool:
    """Membership x in (a)."""
    return bool(_principal_masks(algebra)[a, x])


def congruent(algebra: FiniteMvAlgebra, x: int, y: int, a: int) -> bool:
    """[x] == [y] in A/(a), i.e. d(x, y) in (a)."""
    return in_ideal(algebra, algebra.dist(x, y), a)


# -- prime and maximal ideals ---------------------------------------------

def _prime_witness(algebra, mask):
    """Pair violating P2, or None; P2: x - y in P or y - x in P."""
    om = algebra.table("ominus")
    ok = mask[om] | mask[om.T]
    bad = np.argwhere(~ok)
    return None if len(bad) == 0 else tuple(int(v) for v in bad[0])


def _prime_witness_meet(algebra, mask, zero_only):
    """Pair violating P'2 (meet form), or None."""
    mt = algebra.table("meet")
    premise = (mt == algebra.zero) if zero_only else mask[mt]
    ok = ~premise | mask[:, None] | mask[None, :]
    bad = np.argwhere(~ok)
    return None if len(bad) == 0 else tuple(int(v) for v in bad[0])


def prime_witness(algebra: FiniteMvAlgebra, ideal: Ideal):
    """``None`` if prime, else a reason: ``("improper",)`` or ``("pair", x, y)``."""
    mask = ideal.mask()
    proper = not mask[algebra.one]
    w = _prime_witness(algebra, mask)
    w2 = _prime_witness_meet(algebra, mask, zero_only=True)
    w3 = _prime_witness_meet(algebra, mask, zero_only=False)
    verdicts = {proper and w is None, proper and w2 is None, proper and w3 is None}
    if len(verdicts) != 1:
        raise InternalInconsistencyError(
            f"prime characterizations disagree on {ideal!r}: {w}, {w2}, {w3}")
    if not proper:
        return ("improper",)
    if w2 is not None:
        return ("pair",) + w2
    return None


def is_prime(algebra: FiniteMvAlgebra, ideal: Ideal) -> bool:
    return prime_witness(algebra, ideal) is None


def _is_simple(q: FiniteMvAlgebra) -> bool:
    if q.is_trivial:
        return False
    # every nonzero element must generate the whole algebra
    top = q.multiples[q.size]
    return all(top[x] == q.one for x in range(q.size) if x != q.zero)


def is_maximal(algebra: FiniteMvAlgebra, ideal: Ideal) -> bool:
    """Maximality via 'a not in M iff not(n*a) in M for some n >= 1',
    cross-checked against simplicity of the quotient."""
    mask = ideal.mask()
    if mask[algebra.one]:
        verdict = False
    else:
        mult = algebra.multiples[1:algebra.size + 2]
        neg_mult_in = mask[algebra.neg_table[mult]].any(axis=0)
        verdict = bool(np.all(neg_mult_in == ~mask))
    simple = _is_simple(quotient(algebra, ideal).quotient)
    if verdict != simple:
        raise InternalInconsistencyError(
            f"maximality characterizations disagree on {ideal!r}")
    return verdict


@lru_cache(maxsize=64)
def _all_ideals(algebra: FiniteMvAlgebra):
    masks = _principal_masks(algebra)
    seen = {}
    for a in range(algebra.size):
        key = frozenset(np.flatnonzero(masks[a]).tolist())
        seen.setdefault(key, a)
    ideals = [Ideal(algebra, m) for m in seen]
    ideals.sort(key=lambda i: i.sorted_members())
    return tuple(ideals)


def enumerate_ideals(algebra: FiniteMvAlgebra):
    """All ideals; complete because every ideal of a finite algebra is principal."""
    return list(_all_ideals(algebra))


@lru_cache(maxsize=64)
def _primes(algebra):
    return tuple(i for i in _all_ideals(algebra) if is_prime(algebra, i))


def enumerate_primes(algebra: FiniteMvAlgebra):
    return list(_primes(algebra))


def enumerate_maximals(algebra: FiniteMvAlgebra):
    return [i for i in _all_ideals(algebra) if i.is_proper and is_maximal(algebra, i)]


# -- quotients -----------------------------------------------------------

@dataclass(frozen=True)
class QuotientAlgebra:
    """``A/I`` with the projection and the least-index section."""

    quotient: FiniteMvAlgebra
    projection: tuple
    section: tuple
    ideal: Ideal

    def cls(self, x):
        return self.projection[x]


@lru_cache(maxsize=256)
def _quotient(algebra: FiniteMvAlgebra, members: frozenset) -> QuotientAlgebra:
    mask = np.zeros(algebra.size, dtype=bool)
    mask[list(members)] = True
    related = mask[algebra.table("dist")]
    projection = [-1] * algebra.size
    section = []
    for x in range(algebra.size):
        if projection[x] < 0:
            c = len(section)
            section.append(x)
            for y in np.flatnonzero(related[x]):
                projection[int(y)] = c
    k = len(section)
    proj = np.array(projection)
    sec = np.array(section)
    oplus = proj[algebra.oplus_table[sec[:, None], sec[None, :]]]
    neg = proj[algebra.neg_table[sec]]
    q = FiniteMvAlgebra(oplus, neg, proj[algebra.zero],
                        name=f"{algebra.name or 'A'}/I", max_size=max(k, 1))
    return QuotientAlgebra(q, tuple(projection), tuple(section), Ideal(algebra, members))


def quotient(algebra: FiniteMvAlgebra, ideal: Ideal) -> QuotientAlgebra:
    """Quotient by the congruence x ~ y iff d(x, y) in I."""
    return _quotient(algebra, ideal.members)


def preimage(ideal: Ideal, hom_map, domain: FiniteMvAlgebra) -> Ideal:
    """Preimage of ``ideal`` under an index map ``domain -> ideal.algebra``."""
    return Ideal(domain, frozenset(x for x in range(domain.size) if hom_map[x] in ideal.members))
