"""The ten acceptance criteria, run exactly (exact arithmetic, zero tolerance).

Each test logs one PASS/FAIL line; the lines are printed together in the
pytest terminal summary.
"""
import itertools
import random
import time
from fractions import Fraction as F

from gen import random_point, random_term
from mvsheaf import algebra as alg, ideals as I, locale as L, mcnaughton as M, spectrum as S
from mvsheaf import terms as T

SUITE = alg.standard_suite()


def congruent_brute(A, x, y, a):
    """x = y mod (a) iff d(x, y) <= k*a for some k."""
    m, d = a, A.dist(x, y)
    for _ in range(A.size + 1):
        if A.leq(d, m):
            return True
        m = A.oplus(m, a)
    return False


def test_criterion_01_axiom_suite(record):
    t0 = time.perf_counter()
    algebras = [alg.make_chain(k) for k in range(1, 9)]
    for j, k in itertools.combinations_with_replacement(range(1, 9), 2):
        if (j + 1) * (k + 1) <= 64:
            algebras.append(alg.product(alg.make_chain(j), alg.make_chain(k)))
    bad = []
    for A in algebras:
        rep = alg.validate_axioms(A)
        names = {c.name for c in rep.checks}
        required = {"order by existence agrees with order by difference",
                    "x oplus not x is one", "differences are disjoint",
                    "scalar multiples distribute over meet"}
        if not rep.ok or not required <= names:
            bad.append(A.name)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 10
    record(1, ok, f"{len(algebras)} algebras validated in {dt:.2f}s, failures {bad}")
    assert ok


def test_criterion_02_representation(record):
    t0 = time.perf_counter()
    rows = []
    for A in SUITE:
        r = S.verify_representation(A)
        rows.append((A.name, r.bijective and r.sections == A.size and r.method == "exhaustive"))
    dt = time.perf_counter() - t0
    ok = all(v for _, v in rows) and dt < 60
    record(2, ok, f"eta bijective with |sections| = |A| on {sum(v for _, v in rows)}/"
                  f"{len(rows)} algebras in {dt:.2f}s")
    assert ok


def test_criterion_03_pushout_pullback(record):
    cases = fails = alt_fails = 0
    for A in (A for A in SUITE if A.size <= 12):
        for a1, a2, b1, b2 in itertools.product(range(A.size), repeat=4):
            if not congruent_brute(A, b1, b2, A.join(a1, a2)):
                continue
            cases += 1
            b = S.glue(A, a1, a2, b1, b2)
            if not (congruent_brute(A, b, b1, a1) and congruent_brute(A, b, b2, a2)):
                fails += 1
            c = S.glue_alt(A, a1, a2, b1, b2)
            if not congruent_brute(A, b, c, A.meet(a1, a2)):
                alt_fails += 1
    ok = cases > 0 and fails == 0 and alt_fails == 0
    record(3, ok, f"{cases} compatible quadruples, {fails} contract failures, "
                  f"{alt_fails} formula disagreements")
    assert ok


def test_criterion_04_prime_ideal_theorem(record):
    pairs = bad = 0
    for A in SUITE:
        primes = I.enumerate_primes(A)
        for x, y in alg.pairs(range(A.size)):
            pairs += 1
            lhs = all(y in P for P in primes if x in P)
            rhs = I.generated_ideal(A, [y]).members <= I.generated_ideal(A, [x]).members
            bad += lhs != rhs
    ok = bad == 0
    record(4, ok, f"{pairs} pairs checked, {bad} mismatches")
    assert ok


def test_criterion_05_compile_eval(record):
    t0 = time.perf_counter()
    rng = random.Random(2024)
    bad = 0
    for _ in range(50):
        n = rng.randint(1, 3)
        t = random_term(rng, n, rng.randint(1, 6))
        f = M.compile_term(t, n)
        for _ in range(200):
            p = random_point(rng, n)
            bad += M.pwl_eval(f, p) != T.eval_unit(t, p)
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 120
    record(5, ok, f"50 terms x 200 points, {bad} mismatches, {dt:.2f}s")
    assert ok


def _rewrite(t, rng):
    """A syntactically different term with the same function."""
    if isinstance(t, T.Oplus):
        a, b = _rewrite(t.left, rng), _rewrite(t.right, rng)
        out = T.Oplus(b, a) if rng.random() < 0.5 else T.Oplus(a, b)
    elif isinstance(t, T.Neg):
        out = T.Neg(_rewrite(t.child, rng))
    elif isinstance(t, T.Scalar):
        c = _rewrite(t.child, rng)
        out = c
        for _ in range(t.n - 1):
            out = T.Oplus(out, c)
    else:
        out = t
    if rng.random() < 0.2:
        out = T.Neg(T.Neg(out))
    return out


def test_criterion_06_chang_desk_check(record):
    rng = random.Random(606)
    agree = 0
    outcomes = set()
    for k in range(30):
        n = rng.randint(1, 2)
        s = random_term(rng, n, 4)
        t = _rewrite(s, rng) if k % 2 == 0 else random_term(rng, n, 4)
        f, g = M.compile_term(s, n), M.compile_term(t, n)
        D = M.common_denominator(f, g)
        same = M.pwl_equal(f, g)
        grid_same, _ = M.grid_equal(s, t, n, D)
        agree += same == grid_same
        outcomes.add(same)
    ok = agree == 30 and outcomes == {True, False}
    record(6, ok, f"{agree}/30 pairs agree with the grid, outcomes seen {sorted(outcomes)}")
    assert ok


NEGATIVES = [
    ("x1", "~0"), ("x1", "~x1"), ("x1 (*) x2", "x1"), ("x1", "x2"),
    ("x1 (-) ~x1", "x1"), ("x1 /\\ x2", "x1"), ("0", "x1"), ("d(x1,x2)", "x1"),
    ("~x1 (-) x1", "~x1"), ("x1 (+) x2", "~x1"),
]


def test_criterion_07_ideal_membership(record):
    rng = random.Random(707)
    pos = 0
    for _ in range(30):
        n = rng.randint(1, 2)
        f = random_term(rng, n, 3)
        k = rng.randint(1, 4)
        g = T.meet(random_term(rng, n, 3), T.scalar(k, f))
        pos += M.ideal_member(f, g, n)
    neg = sum(not M.ideal_member(T.parse(f), T.parse(g), 2) for f, g in NEGATIVES)
    ok = pos == 30 and neg == len(NEGATIVES)
    record(7, ok, f"{pos}/30 constructed members accepted, {neg}/{len(NEGATIVES)} negatives rejected")
    assert ok


def _vanishing_points(f, n, D=12):
    pts = [p for Z in M.zero_set(M.compile_term(f, n)) for p in Z.vertices()]
    for idx in itertools.product(range(D + 1), repeat=n):
        p = tuple(F(i, D) for i in idx)
        if T.eval_unit(f, p) == 0:
            pts.append(p)
    return pts


def test_criterion_08_fp_gluing(record):
    rng = random.Random(808)
    good = 0
    for _ in range(50):
        n = rng.randint(1, 2)
        f1, f2, g1, r = (random_term(rng, n, 3) for _ in range(4))
        both = T.join(f1, f2)
        # equal to g1 wherever f1 and f2 both vanish
        g2 = T.join(T.meet(g1, T.neg(T.scalar(rng.randint(1, 3), both))), T.odot(r, T.scalar(2, both)))
        assert M.restricted_difference(both, g1, g2, n) is None
        h, k = M.glue_fp(f1, f2, g1, g2, n)
        ok1 = M.restricted_difference(f1, h, g1, n) is None and \
            M.restricted_difference(f2, h, g2, n) is None
        ok2 = all(T.eval_unit(h, p) == T.eval_unit(g1, p) for p in _vanishing_points(f1, n)) and \
            all(T.eval_unit(h, p) == T.eval_unit(g2, p) for p in _vanishing_points(f2, n))
        good += ok1 and ok2 and k >= 1
    trips = 0
    for _ in range(20):
        n = rng.randint(1, 2)
        t = random_term(rng, n, 4)
        f = M.compile_term(t, n)
        g = M.glue_cover(M.mcnaughton_data(f), n)
        trips += M.pwl_equal(M.compile_term(g, n), f)
    ok = good == 50 and trips == 20
    record(8, ok, f"glue_fp contract {good}/50, glue_cover round trips {trips}/20")
    assert ok


def test_criterion_09_appendix_suite(record):
    t0 = time.perf_counter()
    sites = L.standard_sites()
    failures = []
    for s in sites:
        H = s.lattice
        if H.size > 12:
            failures.append((s.name, "lattice too large"))
            continue
        frame = L.ideal_frame(s)
        checks = {
            "axioms": L.check_topology_axioms(s).ok,
            "frame": L.check_frame(frame).ok,
            "closure": L.closure_laws(s, list(range(1 << H.size))),
        }
        rep = L.check_point_space(s, frame)
        checks.update(points=rep.points_bijection, enough=rep.enough_points,
                      sober=rep.sober, compact=rep.compact)
        failures += [(s.name, k) for k, v in checks.items() if not v]
    kinds = {"trivial": 0, "finite suprema": 0}
    for s in sites:
        if s.name in kinds:
            kinds[s.name] += 1
    for A in SUITE:
        if L.va_points_vs_primes(A) != (True, True, True):
            failures.append((A.name, "points vs primes"))
    dt = time.perf_counter() - t0
    ok = not failures and len(sites) >= 10 and all(kinds.values()) and dt < 60
    record(9, ok, f"{len(sites)} sites ({kinds['trivial']} trivial, {kinds['finite suprema']} "
                  f"finite suprema, {len(SUITE)} V_A) in {dt:.2f}s, failures {failures}")
    assert ok


def test_criterion_10_archimedean(record):
    elems = sum(A.size for A in SUITE)
    arch = sum(alg.is_archimedean_element(A, a)[0] for A in SUITE for a in A.elements())
    x = M.is_archimedean_term(T.var(0), 1)
    one = M.is_archimedean_term(T.one(), 1)
    ok = arch == elems and x is False and one is True
    record(10, ok, f"{arch}/{elems} elements archimedean; x1 -> {x}, 1 -> {one}")
    assert ok
