"""Command-line front end: one verb, one JSON report.

Exit status is 0 on success, 1 on domain errors (violated preconditions,
resource caps) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import algebra as alg
from . import ideals, locale, mcnaughton as mc, spectrum
from . import terms as T
from .errors import MvError, PreconditionError, TermSyntaxError
from .polyhedra import RationalPolyhedron, format_constraint


class UsageError(Exception):
    pass


def _read_arg(text):
    """``@path`` reads a file, anything else is taken literally."""
    if text is not None and text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {text[1:]}: {exc}") from None
    return text


def _json_arg(text, what):
    raw = _read_arg(text)
    if raw is None:
        raise UsageError(f"missing {what}")
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc}") from None


def _term_arg(text):
    raw = _read_arg(text)
    if text.startswith("@"):
        lines = T.parse_lines(raw)
        if len(lines) != 1:
            raise UsageError(f"{text[1:]} must hold exactly one term")
        return lines[0]
    return T.parse(raw)


def _frac(q):
    return alg.format_fraction(q)


def _label(A, x):
    lab = A.label(x)
    if lab is None:
        return None
    if isinstance(lab, tuple):
        return [_frac(c) for c in lab]
    return _frac(lab)


def _algebra(args):
    return alg.algebra_from_json(_json_arg(args.alg, "--alg"))


def _element(A, text):
    """An element given by index, or by its label ("1/2" or "1/2,0")."""
    if text is None:
        raise UsageError("missing element")
    text = text.strip()
    if "," not in text and "/" not in text:
        x = int(text)
        A._check(x)
        return x
    coords = [Fraction(c.strip()) for c in text.split(",")]
    return A.element(*coords)


def _bitset(mask_set, n):
    return "".join("1" if k in mask_set else "0" for k in range(n))


# -- alg ---------------------------------------------------------------------

def cmd_alg_validate(args):
    A = _algebra(args)
    rep = alg.validate_axioms(A)
    return {"ok": rep.ok, "size": A.size,
            "checks": [{"name": c.name, "passed": c.passed,
                        "counterexample": list(c.counterexample) if c.counterexample else None}
                       for c in rep.checks]}


def cmd_alg_primes(args):
    A = _algebra(args)
    return {"primes": [list(P.sorted_members()) for P in ideals.enumerate_primes(A)],
            "maximals": [list(M.sorted_members()) for M in ideals.enumerate_maximals(A)]}


def cmd_alg_quotient(args):
    A = _algebra(args)
    gens = [_element(A, g) for g in (args.gens or "").split(";") if g.strip()]
    I = ideals.generated_ideal(A, gens)
    q = ideals.quotient(A, I)
    return {"ideal": list(I.sorted_members()), "size": q.quotient.size,
            "projection": list(q.projection), "section": list(q.section),
            "valid": alg.validate_axioms(q.quotient).ok,
            "quotient": alg.algebra_to_json(q.quotient)}


# -- spec --------------------------------------------------------------------

def cmd_spec_build(args):
    A = _algebra(args)
    S = spectrum.build_spectrum(A)
    n = S.n_points
    return {"points": [list(P.sorted_members()) for P in S.points],
            "base_opens": [_bitset(w, n) for w in S.base_opens],
            "stalk_sizes": S.stalk_sizes(),
            "discrete": S.is_discrete()}


def cmd_spec_sections(args):
    A = _algebra(args)
    secs = spectrum.enumerate_global_sections(A, cap=args.cap)
    return {"count": len(secs),
            "sections": [{"values": list(s.values), "witness": [list(p) for p in s.witness]}
                         for s in secs]}


def cmd_spec_verify(args):
    A = _algebra(args)
    r = spectrum.verify_representation(A, cap=args.cap)
    return {"eta": "isomorphism" if r.bijective else "not an isomorphism",
            "sections": r.sections, "size": r.size, "injective": r.injective,
            "surjective": r.surjective, "method": r.method,
            "witness": list(r.witness) if r.witness is not None else None}


def cmd_spec_glue(args):
    A = _algebra(args)
    a1, a2, b1, b2 = (_element(A, x) for x in (args.a1, args.a2, args.b1, args.b2))
    b = spectrum.glue(A, a1, a2, b1, b2)
    c = spectrum.glue_alt(A, a1, a2, b1, b2)
    n = max(alg.is_archimedean_element(A, a1)[1], alg.is_archimedean_element(A, a2)[1])
    return {"b": b, "label": _label(A, b), "alt": c, "alt_label": _label(A, c), "n": n}


# -- term ----------------------------------------------------------------------

def _dim(args, *ts):
    if args.n is not None:
        return args.n
    return max([1] + [T.arity(t) for t in ts])


def cmd_term_parse(args):
    t = _term_arg(args.term)
    return {"term": T.to_text(t), "arity": T.arity(t),
            "free_vars": sorted(i + 1 for i in T.free_vars(t)), "size": T.size(t)}


def cmd_term_eval(args):
    t = _term_arg(args.term)
    if args.alg is not None:
        A = _algebra(args)
        env = [_element(A, x) for x in (args.env or "").split(";") if x.strip()]
        v = T.eval_term(t, A, env)
        return {"value": v, "label": _label(A, v)}
    pt = [Fraction(x) for x in (args.point or "").split(",") if x.strip()]
    return {"value": _frac(T.eval_unit(t, pt))}


def cmd_term_compile(args):
    t = _term_arg(args.term)
    f = mc.compile_term(t, _dim(args, t), args.max_dim)
    return mc.pwl_to_json(f, with_vertices=args.vertices)


def cmd_term_eq(args):
    s, t = _term_arg(args.left), _term_arg(args.right)
    n = _dim(args, s, t)
    w = mc.pwl_difference(mc.compile_term(s, n, args.max_dim), mc.compile_term(t, n, args.max_dim))
    return {"equal": w is None, "witness": [_frac(x) for x in w] if w is not None else None}


def _polyhedron_json(P):
    return {"constraints": [format_constraint(c) for c in P.ineqs]
            + [format_constraint(c, "=") for c in P.eqs],
            "vertices": [[_frac(x) for x in v] for v in P.vertices()]}


def cmd_term_zeros(args):
    t = _term_arg(args.term)
    f = mc.compile_term(t, _dim(args, t), args.max_dim)
    return {"zero_set": [_polyhedron_json(P) for P in mc.zero_set(f)]}


def cmd_term_member(args):
    f, g = _term_arg(args.f), _term_arg(args.g)
    return {"member": mc.ideal_member(f, g, _dim(args, f, g))}


def cmd_term_archimedean(args):
    f = _term_arg(args.term)
    return {"archimedean": mc.is_archimedean_term(f, _dim(args, f))}


def cmd_term_glue(args):
    ts = [_term_arg(x) for x in (args.f1, args.f2, args.g1, args.g2)]
    h, k = mc.glue_fp(*ts, _dim(args, *ts))
    return {"term": T.to_text(h), "n": k}


# -- mc ------------------------------------------------------------------------

def cmd_mc_truncate(args):
    form = [int(x) for x in args.form.split(",")]
    n = args.n if args.n is not None else len(form) - 1
    return mc.pwl_to_json(mc.truncate(form, n, args.max_dim), with_vertices=args.vertices)


def cmd_mc_glue_cover(args):
    doc = _json_arg(args.pairs, "--pairs")
    if not isinstance(doc, list) or not all(isinstance(p, list) and len(p) == 2 for p in doc):
        raise UsageError("--pairs must be a JSON list of [f, g] term pairs")
    pairs = [(T.parse(f), T.parse(g)) for f, g in doc]
    n = _dim(args, *(t for p in pairs for t in p))
    g = mc.glue_cover(pairs, n)
    return {"term": T.to_text(g)}


def cmd_mc_poly2term(args):
    doc = _json_arg(args.constraints, "--constraints")
    try:
        cons = [([Fraction(c) for c in item["coefficients"]], item.get("relation", ">="))
                for item in doc]
    except (TypeError, KeyError, ValueError) as exc:
        raise UsageError(f"bad constraint list: {exc}") from None
    if args.n is None:
        if not cons:
            raise UsageError("--n is required with an empty constraint list")
        n = len(cons[0][0]) - 1
    else:
        n = args.n
    P = RationalPolyhedron.from_constraints(n, cons)
    t = mc.polyhedron_to_term(P)
    return {"term": T.to_text(t), "empty": P.is_empty()}


# -- locale ----------------------------------------------------------------------

def _site(args):
    if args.alg is not None:
        A = _algebra(args)
        return locale.va_lattice(A).site
    doc = _json_arg(args.site, "--site or --alg")
    return site_from_json(doc)


def site_from_json(doc):
    kind = doc.get("kind", "order")
    if kind == "chain":
        H = locale.chain_lattice(int(doc["k"]))
    elif kind == "powerset":
        H = locale.powerset_lattice(int(doc["k"]))
    elif kind == "divisors":
        H = locale.divisor_lattice(int(doc["N"]))
    elif kind == "order":
        if "order" in doc:
            order = doc["order"]
        else:
            m = int(doc["size"])
            order = [[a == b for b in range(m)] for a in range(m)]
            for a, b in doc.get("hasse", []):
                order[a][b] = True
            for k in range(m):  # transitive closure
                for i in range(m):
                    for j in range(m):
                        order[i][j] = order[i][j] or (order[i][k] and order[k][j])
        H = locale.inf_lattice(order)
    else:
        raise MvError(f"unknown site kind {kind!r}")
    topo = doc.get("topology", "finite-suprema")
    if "covers" in doc:
        covers = {int(a): fams for a, fams in doc["covers"].items()}
        return locale.make_site(H, covers, "given")
    if topo == "trivial":
        return locale.trivial_topology(H)
    if topo == "finite-suprema":
        return locale.finite_suprema_topology(H)
    raise MvError(f"unknown topology {topo!r}")


def cmd_locale_check(args):
    s = _site(args)
    r = locale.check_topology_axioms(s)
    return {"ok": r.ok, "axiom_i": r.axiom_i, "axiom_ii": r.axiom_ii, "axiom_iii": r.axiom_iii,
            "subcanonical": r.subcanonical,
            "witnesses": {k: v for k, v in sorted(r.witnesses.items())}}


def cmd_locale_frame(args):
    s = _site(args)
    f = locale.ideal_frame(s)
    r = locale.check_frame(f)
    return {"size": len(f), "elements": [locale.bits(u) for u in f.elements],
            "frame_laws": r.ok}


def cmd_locale_points(args):
    s = _site(args)
    return {"points": [{"members": P.elements(), "proper": P.proper} for P in locale.points(s)]}


def cmd_locale_space(args):
    s = _site(args)
    f = locale.ideal_frame(s)
    sp = locale.point_space(s, f)
    r = locale.check_point_space(s, f, sp)
    n = len(sp.points)
    return {"points": [P.elements() for P in sp.points],
            "base_opens": [_bitset(set(locale.bits(w)), n) for w in sp.base],
            "opens": len(sp.opens), "enough_points": r.enough_points,
            "points_bijection": r.points_bijection, "sober": r.sober,
            "compact": r.compact, "spectral": r.ok}


def cmd_locale_va(args):
    A = _algebra(args)
    va = locale.va_lattice(A)
    bij, w_ok, eq_ok = locale.va_points_vs_primes(A, va)
    H = va.lattice
    return {"classes": [[x for x in range(A.size) if va.quotient_map[x] == k]
                        for k in range(H.size)],
            "order": H.order.astype(int).tolist(),
            "quotient_map": list(va.quotient_map),
            "points_match_primes": bij, "base_opens_match": w_ok,
            "oplus_equation": eq_ok}


# -- parser ------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="mvsheaf", description=__doc__.splitlines()[0])
    p.add_argument("--out", help="write the JSON report to this file")
    groups = p.add_subparsers(dest="group", required=True)

    def verb(group, name, func, *extra):
        sp = group.add_parser(name)
        sp.set_defaults(func=func)
        sp.add_argument("--out", default=argparse.SUPPRESS, help="write the JSON report here")
        for e in extra:
            e(sp)
        return sp

    def with_alg(sp, required=True):
        sp.add_argument("--alg", required=required, help="algebra JSON or @file")

    def with_n(sp):
        sp.add_argument("--n", type=int, help="number of variables")
        sp.add_argument("--max-dim", type=int, default=mc.DEFAULT_MAX_DIM)

    def with_cap(sp):
        sp.add_argument("--cap", type=int, default=spectrum.DEFAULT_SECTION_CAP)

    g = groups.add_parser("alg").add_subparsers(dest="verb", required=True)
    verb(g, "validate", cmd_alg_validate, with_alg)
    verb(g, "primes", cmd_alg_primes, with_alg)
    verb(g, "quotient", cmd_alg_quotient, with_alg,
         lambda sp: sp.add_argument("--gens", help="generators separated by ';'"))

    g = groups.add_parser("spec").add_subparsers(dest="verb", required=True)
    verb(g, "build", cmd_spec_build, with_alg)
    verb(g, "sections", cmd_spec_sections, with_alg, with_cap)
    verb(g, "verify", cmd_spec_verify, with_alg, with_cap)

    def glue_args(sp):
        for name in ("--a1", "--a2", "--b1", "--b2"):
            sp.add_argument(name, required=True)
    verb(g, "glue", cmd_spec_glue, with_alg, glue_args)

    g = groups.add_parser("term").add_subparsers(dest="verb", required=True)
    one = lambda sp: sp.add_argument("term")
    verb(g, "parse", cmd_term_parse, one)

    def eval_args(sp):
        with_alg(sp, required=False)
        sp.add_argument("--point", help="comma separated rationals")
        sp.add_argument("--env", help="elements separated by ';'")
    verb(g, "eval", cmd_term_eval, one, eval_args)
    verb(g, "compile", cmd_term_compile, one, with_n,
         lambda sp: sp.add_argument("--vertices", action="store_true"))
    verb(g, "eq", cmd_term_eq, lambda sp: (sp.add_argument("left"), sp.add_argument("right")), with_n)
    verb(g, "zeros", cmd_term_zeros, one, with_n)
    verb(g, "member", cmd_term_member, lambda sp: (sp.add_argument("f"), sp.add_argument("g")), with_n)
    verb(g, "archimedean", cmd_term_archimedean, one, with_n)
    verb(g, "glue", cmd_term_glue,
         lambda sp: [sp.add_argument(x) for x in ("f1", "f2", "g1", "g2")], with_n)

    g = groups.add_parser("mc").add_subparsers(dest="verb", required=True)
    verb(g, "truncate", cmd_mc_truncate,
         lambda sp: sp.add_argument("--form", required=True, help="c0,c1,...,cn"), with_n,
         lambda sp: sp.add_argument("--vertices", action="store_true"))
    verb(g, "glue-cover", cmd_mc_glue_cover,
         lambda sp: sp.add_argument("--pairs", required=True, help="JSON [[f, g], ...] or @file"),
         with_n)
    verb(g, "poly2term", cmd_mc_poly2term,
         lambda sp: sp.add_argument("--constraints", required=True,
                                    help='JSON [{"coefficients": [...], "relation": ">="}]'),
         with_n)

    g = groups.add_parser("locale").add_subparsers(dest="verb", required=True)

    def site_args(sp):
        sp.add_argument("--site", help="site JSON or @file")
        with_alg(sp, required=False)
    verb(g, "check", cmd_locale_check, site_args)
    verb(g, "frame", cmd_locale_frame, site_args)
    verb(g, "points", cmd_locale_points, site_args)
    verb(g, "space", cmd_locale_space, site_args)
    verb(g, "va", cmd_locale_va, with_alg)
    return p


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return _frac(obj)
    if isinstance(obj, (tuple, set, frozenset)):
        return [_jsonable(x) for x in (sorted(obj) if not isinstance(obj, tuple) else obj)]
    if isinstance(obj, list):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return obj


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = args.func(args)
    except (UsageError, TermSyntaxError) as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except (MvError, ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, (ValueError, KeyError, TypeError)) and not isinstance(exc, MvError):
            print(f"error: bad input: {exc}", file=stderr)
        else:
            print(f"error: {exc}", file=stderr)
        if isinstance(exc, PreconditionError) and exc.witness is not None:
            print(f"witness: {_jsonable(exc.witness)}", file=stderr)
        return 1
    text = json.dumps(_jsonable(report), sort_keys=True)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=stdout)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
