"""Command line frontend: build, verify, derive, enumerate, report.

Every subcommand produces a structured report (see reports.py) rendered as
text or canonical JSON; the exit code is 0 exactly when no check failed,
1 when one did, and 2 on malformed input or configuration.
"""

import argparse
import os
import sys

from .galgebra import (
    KncoopError,
    coefficient_algebra,
    normalize,
    render_poly,
    split_terms,
    enumerate_homs,
)
from .series import (
    SeriesContext,
    VariableSpec,
    compose,
    compositional_inverse,
    parse_series,
    render_series,
    series_to_json,
)
from . import fgl as fgl_mod
from .fgl import (
    ExpansionError,
    honda,
    hn_adic_expand,
    log_additivity_check,
    p_series,
    verify_fgl_axioms,
)
from .autgroups import StrictAutHn, hn_identity, hn_is_automorphism
from .hopf import (
    a_star,
    b_star,
    c_star,
    derive_coproduct,
    kk,
    sigma_algebra,
    sigma_bar,
    verify_hopf_axioms,
    convolve,
)
from .fiberprod import (
    corepresentability_check,
    kappa_star,
    predicted_counts,
    pushout_c_star,
    verify_kappa,
)
from .testalgebras import resolve_target
from .reports import Report, render_text, report_bytes
from . import acceptance


# ------------------------------------------------------------- small helpers

def _check_prime(p):
    if p < 3 or p % 2 == 0:
        raise KncoopError("p must be an odd prime, got %d" % p)
    k = 3
    while k * k <= p:
        if p % k == 0:
            raise KncoopError("p must be an odd prime, got %d" % p)
        k += 2


def _validate_pn(args):
    _check_prime(args.p)
    if args.n < 1:
        raise KncoopError("n must be at least 1, got %d" % args.n)
    window = getattr(args, "window", None)
    if window is not None and window < 1:
        raise KncoopError("window must be at least 1, got %d" % window)


def _target_algebra(args, default=None):
    spec = getattr(args, "R", None)
    if spec is None:
        if default is None:
            raise KncoopError("this action needs a target algebra (--R)")
        return default()
    R = resolve_target(spec)
    if (R.p, R.n) != (args.p, args.n):
        raise KncoopError(
            "target algebra is at p=%d, n=%d, not p=%d, n=%d"
            % (R.p, R.n, args.p, args.n))
    return R


def _mono(A, scalar, vexp, exps):
    raw = [(scalar, vexp, [(i, e) for i, e in enumerate(exps) if e])]
    return normalize(A, raw)


def _tensor_ascii(A, telem):
    """Deterministic `a (x) b` rendering of an element of A tensor A."""
    rows = sorted((el, er, vexp, s)
                  for s, vexp, el, er in split_terms(telem, A.ngens))
    if not rows:
        return "0"
    parts = []
    for el, er, vexp, s in rows:
        left = render_poly(_mono(A, s, vexp, el))
        right = render_poly(_mono(A, 1, 0, er))
        parts.append("%s (x) %s" % (left, right))
    return " + ".join(parts)


def _rule_ascii(A, gidx, power, reps):
    name = A.generators[gidx].name
    rhs = A.zero()
    for s, dv, rexp in reps:
        rhs = rhs + _mono(A, s, dv, [rexp if i == gidx else 0
                                     for i in range(A.ngens)])
    return "%s^%d -> %s" % (name, power, render_poly(rhs))


def _hom_key(hom):
    return tuple(sorted((name, render_poly(img))
                        for name, img in hom.images.items()))


def _first(failures, needle):
    for f in failures:
        if needle in f:
            return f
    return None


# ----------------------------------------------------------------- builders

def _build_hopf(which, p, n, window):
    if which == "sigma":
        return sigma_bar(p, n, window)
    if which == "A":
        return a_star(p, n)
    if which == "B":
        return b_star(p, n)
    if which == "C":
        return c_star(p, n, window)
    if which == "KK":
        return kk(p, n, window)
    raise KncoopError("unknown builder %r" % (which,))


# the closed-form group order key for each builder's point functor
_POINT_KIND = {"sigma": "hn", "A": "ga", "B": "ga2", "C": "fiber",
               "KK": "fiber"}

_FUNCTOR_KIND = {"hn": "hn", "ga": "ga", "GA": "ga2", "C": "fiber"}


# -------------------------------------------------------------- subcommands

def _cmd_honda(args):
    _validate_pn(args)
    order = args.N if args.N is not None else args.p ** (args.n + 1) + 1
    if order < 2:
        raise KncoopError("N must be at least 2, got %d" % order)
    config = {"p": args.p, "n": args.n, "N": order, "seed": args.seed,
              "model": "rational-log-lift"}
    report = Report("honda", config)
    holder = {}

    def build():
        holder["fgl"] = honda(args.p, args.n, order)
        return True
    report.timed("law constructed with p-integral lift coefficients", build)
    fgl = holder["fgl"]
    law = fgl.law()

    def axioms():
        fails = verify_fgl_axioms(fgl)
        return not fails, (fails[0] if fails else None)
    report.timed("unit, commutativity and associativity hold exactly", axioms)

    pn = args.p ** args.n
    if order > pn:
        ps = p_series(fgl)
        want = fgl.one_var_ctx().from_terms(2, {(pn,): fgl.KA.v()})
        report.check("p-series collapses to the single Frobenius monomial",
                     ps == want,
                     witness=None if ps == want else render_series(ps))
    else:
        report.extend([{"name":
                        "p-series collapses to the single Frobenius monomial",
                        "status": "skipped",
                        "witness": "order %d does not reach x^%d"
                        % (order, pn)}])
    report.check("rational logarithm is additive on the lift",
                 log_additivity_check(fgl))

    def round_trip():
        again = honda(args.p, args.n, order)
        return again.law_q == fgl.law_q and again.law() == law
    report.timed("cache round-trip rebuilds the same law", round_trip)

    payload = {"law": series_to_json(law)}
    body = ["law = %s" % render_series(law)]
    if order > pn:
        body.append("p_series = %s" % render_series(p_series(fgl)))
    return report, payload, body


def _series_ctx(args):
    _validate_pn(args)
    order = args.N if args.N is not None else args.p ** (args.n + 1) + 1
    R = _target_algebra(args, default=lambda: coefficient_algebra(
        args.p, args.n, "Kn"))
    return SeriesContext(R, [VariableSpec("x", 2)], order), order


def _cmd_series(args):
    ctx, order = _series_ctx(args)
    config = {"p": args.p, "n": args.n, "N": order, "seed": args.seed,
              "action": args.action}
    report = Report("series", config)
    want = {"echo": 1, "invert": 1, "compose": 2}[args.action]
    if len(args.literals) != want:
        raise KncoopError("%s takes %d series literal(s), got %d"
                          % (args.action, want, len(args.literals)))
    parsed = [parse_series(ctx, lit) for lit in args.literals]
    if args.action == "echo":
        result = parsed[0]
    elif args.action == "invert":
        f = parsed[0]
        result = compositional_inverse(f)
        x = ctx.variable("x")
        report.check("inverse composes to the identity on both sides",
                     compose(f, {"x": result}) == x
                     and compose(result, {"x": f}) == x)
    else:
        f, g = parsed
        result = compose(f, {"x": g})
    report.check("result re-parses to the same series",
                 parse_series(ctx, render_series(result)) == result)
    payload = {"series": series_to_json(result)}
    body = ["series = %s" % render_series(result)]
    return report, payload, body


def _aut_setup(args):
    _validate_pn(args)
    order = args.p ** args.window + 1
    fgl = honda(args.p, args.n, order)
    R = _target_algebra(args, default=lambda: sigma_algebra(
        args.p, args.n, args.window))
    ctx = fgl.one_var_ctx(algebra=R, order=order)
    return fgl, R, ctx


def _parse_aut(fgl, R, ctx, window, text):
    s = parse_series(ctx, text)
    coeffs = hn_adic_expand(fgl, s)
    lead = coeffs.pop(0, None)
    if lead != R.one():
        raise KncoopError("series is not strict: leading coefficient %s"
                          % (lead,))
    return StrictAutHn(fgl, R, coeffs, window)


def _aut_payload(aut):
    coeffs = {str(i): render_poly(c) for i, c in sorted(aut.coeffs.items())}
    return {"window": aut.window,
            "series": render_series(aut.series()),
            "coefficients": coeffs}


def _cmd_aut(args):
    fgl, R, ctx = _aut_setup(args)
    config = {"p": args.p, "n": args.n, "window": args.window,
              "seed": args.seed, "action": args.action}
    report = Report("aut", config)
    want = {"validate": 1, "compose": 2, "invert": 1}[args.action]
    if len(args.literals) != want:
        raise KncoopError("%s takes %d series literal(s), got %d"
                          % (args.action, want, len(args.literals)))

    if args.action == "validate":
        text = args.literals[0]
        try:
            s = parse_series(ctx, text)
            coeffs = hn_adic_expand(fgl, s)
        except ExpansionError as err:
            report.check("series expands along p-power exponents", False,
                         witness=str(err))
            return report, {}, []
        report.check("series expands along p-power exponents", True)
        lead = coeffs.pop(0, None)
        report.check("leading coefficient is 1", lead == R.one(),
                     witness=None if lead == R.one() else render_poly(lead))
        try:
            aut = StrictAutHn(fgl, R, coeffs, args.window)
        except KncoopError as err:
            report.check("coefficients fit the declared window", False,
                         witness=str(err))
            return report, {}, []
        report.check("coefficients fit the declared window", True)
        report.check("coefficients satisfy the rewriting constraint",
                     aut.satisfies_relations())
        report.timed("two-variable law compatibility holds",
                     lambda: hn_is_automorphism(aut))
        payload = _aut_payload(aut)
        return report, payload, ["series = %s" % payload["series"]]

    auts = [_parse_aut(fgl, R, ctx, args.window, t) for t in args.literals]
    if args.action == "compose":
        result = auts[0].multiply(auts[1])
        report.check("product satisfies the rewriting constraint",
                     result.satisfies_relations())
    else:
        result = auts[0].inverse()
        ident = hn_identity(fgl, R, args.window)
        report.check("inverse composes to the identity in the group",
                     auts[0].multiply(result) == ident
                     and result.multiply(auts[0]) == ident)
    payload = _aut_payload(result)
    return report, payload, ["series = %s" % payload["series"]]


def _cmd_hopf(args):
    _validate_pn(args)
    hopf = _build_hopf(args.which, args.p, args.n, args.window)
    A = hopf.algebra
    deg_bound = args.deg_bound
    if deg_bound is None:
        deg_bound = 3 * max((abs(g.degree) for g in A.generators), default=0)
    params = {"p": args.p, "n": args.n, "window": args.window,
              "deg_bound": deg_bound}
    config = {"builder": args.which, "params": params,
              "action": args.action, "seed": args.seed}
    report = Report("hopf", config)
    payload = {}
    body = []

    if args.action == "print":
        gens = []
        for g in A.generators:
            cop = _tensor_ascii(A, hopf.images[g.name])
            gens.append({"name": g.name, "degree": g.degree,
                         "coproduct": cop})
            body.append("generator %s  degree %d" % (g.name, g.degree))
            body.append("  coproduct = %s" % cop)
        rules = [_rule_ascii(A, gidx, power, reps)
                 for gidx, (power, reps) in sorted(A.rules.items())]
        for r in rules:
            body.append("rule %s" % r)
        payload["presentation"] = {"generators": gens, "rules": rules}

    elif args.action == "verify":
        holder = {}

        def run_battery():
            holder["fails"] = verify_hopf_axioms(
                hopf, seed=args.seed, deg_bound=deg_bound)
            return True
        report.timed("axiom battery sampled", run_battery)
        fails = holder["fails"]
        for label, needle in (
                ("coassociativity holds on generators and sampled products",
                 "coassociativity"),
                ("both counit laws hold", "counit"),
                ("both antipode identities hold", "antipode")):
            hit = _first(fails, needle)
            report.check(label, hit is None, witness=hit)

    elif args.action == "derive":
        holder = {}

        def run_derive():
            holder["derived"] = derive_coproduct(hopf)
            return True
        report.timed("coproducts rederived from the group product",
                     run_derive)
        derived = holder["derived"]
        for g in A.generators:
            same = derived[g.name] == hopf.images[g.name]
            report.check("coproduct of %s rederives exactly" % g.name, same,
                         witness=None if same
                         else _tensor_ascii(A, derived[g.name]))

    elif args.action == "antipode":
        hom = hopf.antipode()
        broken = hom.broken_relations()
        report.check("antipode respects the defining relations",
                     not broken,
                     witness=", ".join(broken) if broken else None)
        images = {g.name: render_poly(hom.images[g.name])
                  for g in A.generators}
        for g in A.generators:
            body.append("antipode(%s) = %s" % (g.name, images[g.name]))
        payload["antipode"] = images

    else:  # points
        R = _target_algebra(args)
        holder = {}

        def run_enum():
            holder["homs"] = enumerate_homs(A, R)
            return True
        report.timed("points enumerated", run_enum)
        homs = holder["homs"]
        kind = _POINT_KIND[args.which]
        predicted = predicted_counts(R, args.p, args.n, args.window)[kind]
        report.check("point count matches the closed-form group order",
                     len(homs) == predicted,
                     witness="count=%d predicted=%d"
                     % (len(homs), predicted))
        keys = {_hom_key(h) for h in homs}
        closed = all(_hom_key(convolve(hopf, phi, psi)) in keys
                     for phi in homs for psi in homs)
        report.check("convolution products stay inside the enumerated set",
                     closed)
        payload["points"] = [dict(k) for k in sorted(keys)]
        body.append("%d points" % len(homs))

    return report, payload, body


def _cmd_fiber(args):
    _validate_pn(args)
    config = {"p": args.p, "n": args.n, "action": args.action,
              "window": args.window, "seed": args.seed}
    if args.action == "corep":
        config["functor"] = args.functor
    elif args.action == "kappa":
        config["band"] = "%d:%d" % args.band
    report = Report("fiber", config)
    payload = {}
    body = []

    if args.action == "pushout":
        direct = c_star(args.p, args.n, args.window)
        glued = pushout_c_star(args.p, args.n, args.window)
        report.check("glued algebra matches the direct presentation",
                     glued.algebra == direct.algebra)
        report.check("glued coproduct matches the direct build",
                     glued.images == direct.images)

    elif args.action == "corep":
        kind = _FUNCTOR_KIND[args.functor]
        R = _target_algebra(args)
        holder = {}

        def run_check():
            holder["rep"] = corepresentability_check(
                kind, R, args.p, args.n, window=args.window)
            return True
        report.timed("enumerations ran", run_check)
        rep = holder["rep"]
        counts_ok = (rep["hom_count"] == rep["functor_count"]
                     == rep["predicted"])
        report.check("maps out of the builder match the group count",
                     counts_ok,
                     witness="hom=%d functor=%d predicted=%d"
                     % (rep["hom_count"], rep["functor_count"],
                        rep["predicted"]))
        report.check("the dictionary is a bijection onto the group",
                     rep["bijective"])
        report.check("convolution matches group multiplication on every pair",
                     rep["group_match"])
        if "confirmed" in rep:
            report.check("every point passes the two-variable law check",
                         rep["confirmed"])
        payload["counts"] = {"hom": rep["hom_count"],
                             "functor": rep["functor_count"],
                             "predicted": rep["predicted"]}

    else:  # kappa
        lo, hi = args.band
        ch, kh, hom = kappa_star(args.p, args.n, args.window)
        broken = hom.broken_relations()
        report.check("conjugation respects the defining relations",
                     not broken,
                     witness=", ".join(broken) if broken else None)
        holder = {}

        def run_verify():
            holder["fails"] = verify_kappa(ch, kh, hom, deg_lo=lo, deg_hi=hi,
                                           seed=args.seed)
            return True
        report.timed("degreewise comparison ran", run_verify)
        fails = holder["fails"]
        for label, needles in (
                ("conjugation is a coalgebra map", ("coalgebra",)),
                ("the antipode is a two-sided inverse within the window",
                 ("inverse fails",)),
                ("graded dimensions agree on the band",
                 ("dimension", "degree", "invertible"))):
            hit = None
            for needle in needles:
                hit = hit or _first(fails, needle)
            report.check(label, hit is None, witness=hit)

    return report, payload, body


def _cmd_suite(args):
    if args.p is not None:
        _check_prime(args.p)
    if args.n is not None and args.n < 1:
        raise KncoopError("n must be at least 1, got %d" % args.n)
    config = {"p": args.p, "n": args.n, "cases": args.cases,
              "seed": args.seed}
    report = Report("suite", config)
    for label, checks in acceptance.run_suite(p=args.p, n=args.n,
                                              cases=args.cases,
                                              seed=args.seed):
        renamed = []
        for c in checks:
            c = dict(c)
            c["name"] = "%s: %s" % (label, c["name"])
            renamed.append(c)
        report.extend(renamed)
    return report, {}, []


_DISPATCH = {
    "honda": _cmd_honda,
    "series": _cmd_series,
    "aut": _cmd_aut,
    "hopf": _cmd_hopf,
    "fiber": _cmd_fiber,
    "suite": _cmd_suite,
}


# ------------------------------------------------------------------ parsing

def _add_common(sub, p_required=True):
    sub.add_argument("--p", type=int, required=p_required, default=None,
                     help="odd prime")
    sub.add_argument("--n", type=int, required=p_required, default=None,
                     help="height, at least 1")
    sub.add_argument("--seed", type=int, default=0,
                     help="seed for randomized sampling (recorded in reports)")
    sub.add_argument("--format", choices=("text", "json"), default="text",
                     help="report format")
    sub.add_argument("--cache-dir", default=None,
                     help="override the law cache directory")


def _band(text):
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("band must look like -100:0")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kncoop",
        description="exact checks for the height-n law, its automorphism "
                    "groups, and the presentations that corepresent them")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("honda", help="build and verify the height-n law")
    _add_common(s)
    s.add_argument("--N", type=int, default=None,
                   help="truncation order (default p^(n+1)+1)")

    s = subs.add_parser("series", help="parse, invert, compose series")
    _add_common(s)
    s.add_argument("--N", type=int, default=None,
                   help="truncation order (default p^(n+1)+1)")
    s.add_argument("--R", default=None,
                   help="coefficient algebra: shipped name or .pres file")
    s.add_argument("action", choices=("echo", "invert", "compose"))
    s.add_argument("literals", nargs="*",
                   help="series literals like 'x + v*x^3'")

    s = subs.add_parser("aut", help="strict law automorphisms over a target")
    _add_common(s)
    s.add_argument("--window", type=int, default=2,
                   help="coefficient window (default 2)")
    s.add_argument("--R", default=None,
                   help="target algebra (default: the universal one-variable "
                        "presentation at this window)")
    s.add_argument("action", choices=("validate", "compose", "invert"))
    s.add_argument("literals", nargs="*",
                   help="series literals like 'x + t1*x^3'")

    s = subs.add_parser("hopf", help="the corepresenting presentations")
    _add_common(s)
    s.add_argument("--which", required=True,
                   choices=("sigma", "A", "B", "C", "KK"))
    s.add_argument("--window", type=int, default=2,
                   help="generator window for the windowed builders")
    s.add_argument("--deg-bound", type=int, default=None, dest="deg_bound",
                   help="cap on |degree| for sampled axiom points "
                        "(default: 3 times the deepest generator)")
    s.add_argument("--R", default=None,
                   help="finite target algebra for the points action")
    s.add_argument("action",
                   choices=("print", "verify", "derive", "antipode",
                            "points"))

    s = subs.add_parser("fiber", help="the glued presentation and its points")
    _add_common(s)
    s.add_argument("--window", type=int, default=2,
                   help="generator window (default 2)")
    s.add_argument("--functor", choices=tuple(_FUNCTOR_KIND),
                   default="C",
                   help="which point functor corep compares against")
    s.add_argument("--R", default=None,
                   help="finite target algebra for corep")
    s.add_argument("--band", type=_band, default=(-100, 0),
                   help="degree band lo:hi for kappa (default -100:0)")
    s.add_argument("action", choices=("pushout", "corep", "kappa"))

    s = subs.add_parser("suite", help="run the acceptance battery")
    _add_common(s, p_required=False)
    s.add_argument("--cases", type=int, default=200,
                   help="seeded cases per property battery")

    return parser


def run(argv=None, out=None):
    out = out if out is not None else sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    for i in range(len(argv) - 1):
        # keep `--band -100:0` out of argparse's option heuristics
        if argv[i] == "--band":
            argv[i:i + 2] = ["--band=%s" % argv[i + 1]]
            break
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cache_dir:
        os.environ[fgl_mod.CACHE_ENV] = args.cache_dir
    try:
        report, payload, body = _DISPATCH[args.command](args)
    except KncoopError as err:
        print("error: %s" % err, file=sys.stderr)
        return 2
    if args.format == "json":
        data = report.as_dict()
        data.update(payload)
        out.write(report_bytes(data).decode("utf-8"))
    else:
        for line in body:
            out.write(line + "\n")
        out.write(render_text(report) + "\n")
    return 0 if report.ok else 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
