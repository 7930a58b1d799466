"""Prime spectrum of a finite MV-algebra, global sections and gluing."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .algebra import FiniteMvAlgebra, chain_labels, is_archimedean_element
from .errors import (InternalInconsistencyError, PreconditionError,
                     ResourceLimitError, TrivialAlgebraError)
from .ideals import (Ideal, congruent, enumerate_maximals, enumerate_primes,
                     principal_generator, quotient)

DEFAULT_SECTION_CAP = 10 ** 6


@dataclass(frozen=True)
class PrimeSpectrum:
    """Points are prime ideals; ``base_opens[a]`` is W_a as a set of point indices."""

    algebra: FiniteMvAlgebra
    points: tuple
    base_opens: tuple
    stalks: tuple

    @property
    def n_points(self):
        return len(self.points)

    def W(self, a):
        return self.base_opens[a]

    def germ(self, k, x):
        """Class of x in the stalk at point k."""
        return self.stalks[k].projection[x]

    def stalk_sizes(self):
        return [s.quotient.size for s in self.stalks]

    def opens(self):
        """All open sets: unions of base opens."""
        base = set(self.base_opens)
        result = {frozenset()}
        for w in base:
            result |= {u | w for u in result}
        return sorted(result, key=lambda u: (len(u), sorted(u)))

    def is_open(self, subset):
        subset = frozenset(subset)
        covered = frozenset().union(*(w for w in self.base_opens if w <= subset))
        return covered == subset

    def is_discrete(self):
        return all(self.is_open({k}) for k in range(self.n_points))


def _check_spectrum(spec: PrimeSpectrum):
    A = spec.algebra
    everything = frozenset(range(spec.n_points))
    W = spec.base_opens
    if W[A.zero] != everything:
        raise InternalInconsistencyError("W_0 is not the whole space")
    if W[A.one]:
        raise InternalInconsistencyError("W_1 is not empty")
    for a in range(A.size):
        for b in range(A.size):
            if W[a] & W[b] != W[A.oplus(a, b)]:
                raise InternalInconsistencyError(f"W_a & W_b != W_(a+b) at {(a, b)}")
            if W[a] | W[b] != W[A.meet(a, b)]:
                raise InternalInconsistencyError(f"W_a | W_b != W_(a meet b) at {(a, b)}")
    for k, stalk in enumerate(spec.stalks):
        if not stalk.quotient.is_chain():
            raise InternalInconsistencyError(f"stalk at point {k} is not a chain")
        for a in range(A.size):
            # P in W_a iff [a]_P = 0
            if (k in W[a]) != (stalk.projection[a] == stalk.quotient.zero):
                raise InternalInconsistencyError("zero-set reading of W_a fails")


def build_spectrum(algebra: FiniteMvAlgebra, points=None) -> PrimeSpectrum:
    if algebra.is_trivial:
        raise TrivialAlgebraError("the trivial algebra has no prime ideals")
    pts = tuple(enumerate_primes(algebra) if points is None else points)
    opens = tuple(frozenset(k for k, P in enumerate(pts) if a in P.members)
                  for a in range(algebra.size))
    stalks = tuple(quotient(algebra, P) for P in pts)
    spec = PrimeSpectrum(algebra, pts, opens, stalks)
    if points is None:
        _check_spectrum(spec)
    return spec


# -- sections ----------------------------------------------------------------

@dataclass(frozen=True)
class GlobalSection:
    """``values[k]`` is a class index in the stalk at point k."""

    values: tuple
    witness: tuple = field(default=(), compare=False)


def _eta_values(spec: PrimeSpectrum, a: int):
    return tuple(s.projection[a] for s in spec.stalks)


def eta(algebra_or_spec, a: int) -> GlobalSection:
    spec = _as_spectrum(algebra_or_spec)
    spec.algebra._check(a)
    return GlobalSection(_eta_values(spec, a), ((spec.algebra.zero, a),))


def _as_spectrum(obj) -> PrimeSpectrum:
    return obj if isinstance(obj, PrimeSpectrum) else build_spectrum(obj)


def _restrictions(spec: PrimeSpectrum):
    """For each a: map from restriction of eta(b) to W_a onto one such b."""
    A = spec.algebra
    etas = [_eta_values(spec, b) for b in range(A.size)]
    out = []
    for a in range(A.size):
        pts = sorted(spec.base_opens[a])
        table = {}
        for b in range(A.size):
            table.setdefault(tuple(etas[b][k] for k in pts), b)
        out.append((pts, table))
    return out


def _local_witness(spec, restr, values):
    """Witness pairs (a, b) proving locality of ``values``, or None."""
    pairs = []
    for k, P in enumerate(spec.points):
        found = None
        for a in sorted(P.members):
            pts, table = restr[a]
            b = table.get(tuple(values[q] for q in pts))
            if b is not None:
                found = (a, b)
                break
        if found is None:
            return None
        pairs.append(found)
    return tuple(dict.fromkeys(pairs))


def enumerate_global_sections(algebra_or_spec, cap: int = DEFAULT_SECTION_CAP):
    spec = _as_spectrum(algebra_or_spec)
    sizes = spec.stalk_sizes()
    total = prod(sizes)
    if total > cap:
        raise ResourceLimitError(f"stalk product has {total} elements (cap {cap})")
    restr = _restrictions(spec)
    A = spec.algebra
    sections = []
    for values in itertools.product(*(range(s) for s in sizes)):
        w = _local_witness(spec, restr, values)
        if w is None:
            continue
        if A.meet_all(a for a, _ in w) != A.zero:
            raise InternalInconsistencyError(f"witness cover of {values} does not meet to 0")
        sections.append(GlobalSection(values, w))
    return sections


@dataclass(frozen=True)
class RepresentationReport:
    size: int
    sections: int
    injective: bool
    surjective: bool
    method: str
    witness: tuple | None = None

    @property
    def bijective(self):
        return self.injective and self.surjective


def verify_representation(algebra: FiniteMvAlgebra, cap: int = DEFAULT_SECTION_CAP) -> RepresentationReport:
    spec = build_spectrum(algebra)
    images = {}
    clash = None
    for a in range(algebra.size):
        v = _eta_values(spec, a)
        if v in images and clash is None:
            clash = (images[v], a)
        images.setdefault(v, a)
    injective = clash is None
    total = prod(spec.stalk_sizes())
    if total <= cap:
        sections = enumerate_global_sections(spec, cap)
        missing = next((s.values for s in sections if s.values not in images), None)
        return RepresentationReport(algebra.size, len(sections), injective,
                                    missing is None, "exhaustive",
                                    missing if missing is not None else clash)
    return _verify_by_gluing(spec, images, injective, clash, total)


def _verify_by_gluing(spec, images, injective, clash, total, samples=64):
    # Too many candidate functions to list.  When every singleton is open,
    # each function on points is a section, so Gamma is the full stalk
    # product; we then glue a deterministic sample of sections.
    A = spec.algebra
    if not spec.is_discrete():
        raise ResourceLimitError("section space too large and not discrete")
    singles = [min(a for a in range(A.size) if spec.base_opens[a] == {k})
               for k in range(spec.n_points)]
    sizes = spec.stalk_sizes()
    missing = None
    for i in range(samples):
        values = tuple((i * (k + 7) + k) % s for k, s in enumerate(sizes))
        pairs = [(singles[k], spec.stalks[k].section[values[k]]) for k in range(len(sizes))]
        b = glue_many(A, pairs)
        if _eta_values(spec, b) != values:
            missing = values
            break
    surjective = missing is None and len(images) == total
    return RepresentationReport(A.size, total, injective, surjective, "gluing",
                                missing if missing is not None else clash)


# -- gluing ------------------------------------------------------------------

def _archimedean_n(algebra, *xs):
    return max(is_archimedean_element(algebra, x)[1] for x in xs)


def _check_compatible(algebra, a1, a2, b1, b2):
    if not congruent(algebra, b1, b2, algebra.join(a1, a2)):
        raise PreconditionError("b1 and b2 differ modulo (a1 join a2)", (a1, a2, b1, b2))


def glue(algebra: FiniteMvAlgebra, a1: int, a2: int, b1: int, b2: int, n: int | None = None) -> int:
    """b = (b1 meet b2) join (n a1 meet b2) join (n a2 meet b1)."""
    A = algebra
    A._check(a1, a2, b1, b2)
    _check_compatible(A, a1, a2, b1, b2)
    if n is None:
        n = _archimedean_n(A, a1, a2)
    na1, na2 = A.scalar(n, a1), A.scalar(n, a2)
    b = A.join_all([A.meet(b1, b2), A.meet(na1, b2), A.meet(na2, b1)])
    if not (congruent(A, b, b1, a1) and congruent(A, b, b2, a2)):
        raise InternalInconsistencyError(f"glued value fails its contract on {(a1, a2, b1, b2)}")
    return b


def glue_alt(algebra: FiniteMvAlgebra, a1: int, a2: int, b1: int, b2: int, n: int | None = None) -> int:
    """c = (b1 odot not(n a1)) join (b2 odot not(n a2))."""
    A = algebra
    A._check(a1, a2, b1, b2)
    _check_compatible(A, a1, a2, b1, b2)
    if n is None:
        n = _archimedean_n(A, a1, a2)
    c1 = A.odot(b1, A.neg(A.scalar(n, a1)))
    c2 = A.odot(b2, A.neg(A.scalar(n, a2)))
    return A.join(c1, c2)


def glue_many(algebra: FiniteMvAlgebra, pairs) -> int:
    """The unique b with [b] = [b_i] modulo (a_i) for a cover with meet 0."""
    A = algebra
    pairs = [(int(a), int(b)) for a, b in pairs]
    if not pairs:
        raise PreconditionError("empty cover")
    if A.meet_all(a for a, _ in pairs) != A.zero:
        raise PreconditionError("the a_i do not meet to 0", [a for a, _ in pairs])
    for (ai, bi), (aj, bj) in itertools.combinations(pairs, 2):
        if not congruent(A, bi, bj, A.join(ai, aj)):
            raise PreconditionError("incompatible pair", ((ai, bi), (aj, bj)))
    a, b = pairs[0]
    for ai, bi in pairs[1:]:
        b = glue(A, a, ai, b, bi)
        a = A.meet(a, ai)
    return b


def fiber_product_bijective(algebra: FiniteMvAlgebra, a1: int, a2: int) -> bool:
    """A/(a1 meet a2) -> A/(a1) x_{A/(a1 join a2)} A/(a2) is a bijection."""
    from .ideals import principal_ideal
    A = algebra
    q_meet = quotient(A, principal_ideal(A, A.meet(a1, a2)))
    q1 = quotient(A, principal_ideal(A, a1))
    q2 = quotient(A, principal_ideal(A, a2))
    qj = quotient(A, principal_ideal(A, A.join(a1, a2)))
    # the induced map on classes, via representatives
    image = {}
    for c in range(q_meet.quotient.size):
        x = q_meet.section[c]
        image[c] = (q1.projection[x], q2.projection[x])
    if len(set(image.values())) != len(image):
        return False
    fiber = set()
    for u in range(q1.quotient.size):
        for v in range(q2.quotient.size):
            if qj.projection[q1.section[u]] == qj.projection[q2.section[v]]:
                fiber.add((u, v))
    return fiber == set(image.values())


# -- maximal spectrum --------------------------------------------------------

@dataclass(frozen=True)
class MaximalSpectrum:
    spectrum: PrimeSpectrum
    chi: tuple  # chi[k][a] is the value in [0,1] of a at the k-th maximal ideal

    def clopen_report(self):
        spec = self.spectrum
        everything = frozenset(range(spec.n_points))
        return {a: spec.is_open(everything - spec.base_opens[a])
                for a in range(spec.algebra.size)}


def maximal_spectrum(algebra: FiniteMvAlgebra) -> MaximalSpectrum:
    if algebra.is_trivial:
        raise TrivialAlgebraError("the trivial algebra has no maximal ideals")
    spec = build_spectrum(algebra, points=enumerate_maximals(algebra))
    chi = []
    for stalk in spec.stalks:
        labels = chain_labels(stalk.quotient)
        chi.append(tuple(labels[stalk.projection[a]] for a in range(algebra.size)))
    return MaximalSpectrum(spec, tuple(chi))


def generator_of_point(spec: PrimeSpectrum, k: int) -> int:
    return principal_generator(spec.algebra, spec.points[k])

