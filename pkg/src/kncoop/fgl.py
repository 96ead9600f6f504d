"""One-dimensional p-typical formal group laws of finite height.

The law at height n over F_p[v^{\\pm 1}] has logarithm
l(x) = sum_i v^{(p^{ni}-1)/(p^n-1)} x^{p^{ni}} / p^i with deg v = -2(p^n - 1),
so the p-series collapses to v x^{p^n}.  Everything is computed exactly: the
law is assembled over Q, checked for p-integrality, and reduced mod p.
"""

import json
import os

from gmpy2 import mpq

from .galgebra import (
    ContextError,
    KncoopError,
    PIntegralityError,
    coefficient_algebra,
)
from .series import (
    SeriesContext,
    TruncatedSeries,
    VariableSpec,
    compose,
    compositional_inverse,
    series_from_json,
    series_to_json,
)


class ExpansionError(KncoopError):
    """A series is not a formal sum of Frobenius-power terms."""


CACHE_ENV = "KNCOOP_CACHE_DIR"


def cache_dir():
    override = os.environ.get(CACHE_ENV)
    if override:
        return override
    return os.path.join(os.path.expanduser("~"), ".cache", "kncoop")


class FormalGroupLaw:
    """A height-n law at the prime p, stored to a fixed truncation order."""

    def __init__(self, p, n, order, log, exp, law_q, law_k):
        self.p = p
        self.n = n
        self.order = order
        self.QA = log.ctx.algebra
        self.KA = law_k.ctx.algebra
        self.log = log
        self.exp = exp
        self.law_q = law_q
        self.law_k = law_k
        self._law_cache = {}
        self._inverse_cache = {}

    def __repr__(self):
        return "<height-%d law at p=%d mod order %d>" % (self.n, self.p, self.order)

    def law(self, algebra=None, order=None):
        """The two-variable law over any F_p scalar algebra at the same (p, n)."""
        algebra = algebra or self.KA
        order = order or self.order
        if order > self.order:
            raise ContextError(
                "law only known to order %d, asked for %d" % (self.order, order))
        key = (algebra, order)
        got = self._law_cache.get(key)
        if got is not None:
            return got
        if algebra.coeff != "Kn" or algebra.p != self.p or algebra.n != self.n:
            raise ContextError("law requires F_p scalars at the same (p, n)")
        ctx = SeriesContext(
            algebra, [VariableSpec("x", 2), VariableSpec("y", 2)], order)
        terms = {}
        for exps, c in self.law_k.terms.items():
            if not ctx.admits(exps):
                continue
            nc = _transplant(c, algebra)
            if not nc.is_zero():
                terms[exps] = nc
        out = TruncatedSeries(ctx, 2, terms)
        self._law_cache[key] = out
        return out

    def one_var_ctx(self, algebra=None, order=None, name="x"):
        algebra = algebra or self.KA
        return SeriesContext(algebra, [VariableSpec(name, 2)], order or self.order)


def _transplant(elem, algebra):
    """Move a generator-free F_p element into another F_p scalar algebra."""
    out = algebra.zero()
    for (vexp, exps), s in elem.terms.items():
        if any(exps):
            raise ContextError("cannot transplant generator terms")
        out = out + algebra.scalar(s, vexp=vexp)
    return out


def _embed_one_var(s, ctx2, slot):
    terms = {}
    for (e,), c in s.terms.items():
        exps = [0, 0]
        exps[slot] = e
        terms[tuple(exps)] = c
    return ctx2.from_terms(s.degree, terms)


def honda_log(p, n, order):
    QA = coefficient_algebra(p, n, "Q")
    ctx = SeriesContext(QA, [VariableSpec("x", 2)], order)
    terms = {}
    i = 0
    while p ** (n * i) < order:
        e = p ** (n * i)
        vexp = (e - 1) // (p ** n - 1)
        terms[(e,)] = QA.scalar(mpq(1, p ** i), vexp=vexp)
        i += 1
    return ctx.from_terms(2, terms)


def _reduce_mod_p(series_q, algebra_k, ctx_k):
    terms = {}
    for exps, c in series_q.terms.items():
        out = algebra_k.zero()
        for (vexp, _), s in c.terms.items():
            out = out + algebra_k.scalar(s, vexp=vexp)
        if not out.is_zero():
            terms[exps] = out
    return ctx_k.from_terms(series_q.degree, terms)


def _lone_scalar(elem):
    if len(elem.terms) != 1:
        raise ContextError("expected a single v-power coefficient")
    (vexp, exps), s = next(iter(elem.terms.items()))
    if any(exps):
        raise ContextError("expected a generator-free coefficient")
    return vexp, s


def _assemble_law_q(p, n, order, log, exp):
    """exp(l(x) + l(y)) assembled at scalar level.

    Homogeneity pins the v-power of each monomial, so the whole computation
    runs on bare rationals: binomials of one-variable log powers, convolved
    sparsely.  Much faster than the generic two-variable composition.
    """
    pn1 = p ** n - 1
    lsup = {}
    for (e,), c in log.terms.items():
        lsup[e] = _lone_scalar(c)[1]
    kmax = max(e for (e,) in exp.terms)
    powers = [{0: mpq(1)}, dict(lsup)]
    for _m in range(2, kmax + 1):
        cur = {}
        for e1, s1 in powers[-1].items():
            for e2, s2 in lsup.items():
                e = e1 + e2
                if e >= order:
                    continue
                t = cur.get(e)
                cur[e] = s1 * s2 if t is None else t + s1 * s2
        powers.append({e: s for e, s in cur.items() if s != 0})
    acc = {}
    for (k,), celem in sorted(exp.terms.items()):
        ck = _lone_scalar(celem)[1]
        binom = 1
        for j in range(k + 1):
            if j:
                binom = binom * (k - j + 1) // j
            la = powers[k - j]
            lb = powers[j]
            if not la or not lb:
                continue
            cb = ck * binom
            for a, sa in la.items():
                base = cb * sa
                for b, sb in lb.items():
                    if a + b >= order:
                        continue
                    key = (a, b)
                    t = acc.get(key)
                    acc[key] = base * sb if t is None else t + base * sb
    QA = log.ctx.algebra
    ctx2 = SeriesContext(QA, [VariableSpec("x", 2), VariableSpec("y", 2)], order)
    terms = {}
    for (a, b), s in acc.items():
        if s == 0:
            continue
        terms[(a, b)] = QA.scalar(s, vexp=(a + b - 1) // pn1)
    return ctx2.from_terms(2, terms)


def honda(p, n, order, use_cache=True):
    """Build (or load and re-verify) the height-n law at p to the given order."""
    if use_cache:
        got = _load_cached(p, n, order)
        if got is not None:
            return got
    log = honda_log(p, n, order)
    exp = compositional_inverse(log)
    law_q = _assemble_law_q(p, n, order, log, exp)
    KA = coefficient_algebra(p, n, "Kn")
    ctx2k = SeriesContext(KA, [VariableSpec("x", 2), VariableSpec("y", 2)], order)
    try:
        law_k = _reduce_mod_p(law_q, KA, ctx2k)
    except PIntegralityError as err:
        raise PIntegralityError(
            "law coefficients failed p-integrality: %s" % (err,)) from err
    fgl = FormalGroupLaw(p, n, order, log, exp, law_q, law_k)
    if use_cache:
        _store_cached(fgl)
    return fgl


def _cache_path(p, n, order):
    return os.path.join(cache_dir(), "law_p%d_n%d_N%d.json" % (p, n, order))


def _store_cached(fgl):
    path = _cache_path(fgl.p, fgl.n, fgl.order)
    data = {
        "p": fgl.p,
        "n": fgl.n,
        "order": fgl.order,
        "log": series_to_json(fgl.log),
        "exp": series_to_json(fgl.exp),
        "law_q": series_to_json(fgl.law_q),
    }
    try:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w") as fh:
            json.dump(data, fh, sort_keys=True)
    except OSError:
        pass


def _load_cached(p, n, order):
    path = _cache_path(p, n, order)
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, ValueError):
        return None
    if (data.get("p"), data.get("n"), data.get("order")) != (p, n, order):
        return None
    QA = coefficient_algebra(p, n, "Q")
    ctx1 = SeriesContext(QA, [VariableSpec("x", 2)], order)
    ctx2 = SeriesContext(QA, [VariableSpec("x", 2), VariableSpec("y", 2)], order)
    try:
        log = series_from_json(ctx1, data["log"])
        exp = series_from_json(ctx1, data["exp"])
        law_q = series_from_json(ctx2, data["law_q"])
    except (KeyError, KncoopError):
        return None
    if log != honda_log(p, n, order):
        return None
    if compose(log, {"x": exp}) != ctx1.variable("x"):
        return None
    KA = coefficient_algebra(p, n, "Kn")
    ctx2k = SeriesContext(KA, [VariableSpec("x", 2), VariableSpec("y", 2)], order)
    try:
        law_k = _reduce_mod_p(law_q, KA, ctx2k)
    except PIntegralityError:
        return None
    fgl = FormalGroupLaw(p, n, order, log, exp, law_q, law_k)
    x = ctx2k.variable("x")
    y = ctx2k.variable("y")
    zero = TruncatedSeries(ctx2k, 2, {})
    if compose(law_k, {"x": x, "y": zero}) != x:
        return None
    if compose(law_k, {"x": zero, "y": y}) != y:
        return None
    if order > p ** n:
        ps = p_series(fgl)
        expect = fgl.one_var_ctx().from_terms(2, {(p ** n,): KA.v()})
        if ps != expect:
            return None
    return fgl


def verify_fgl_axioms(fgl, order=None):
    """Identity, commutativity and associativity of the reduced law.

    Returns a list of failure descriptions; empty means the axioms hold to
    the requested order.
    """
    order = order or fgl.order
    F = fgl.law(order=order)
    ctx2 = F.ctx
    KA = fgl.KA
    x2 = ctx2.variable("x")
    y2 = ctx2.variable("y")
    zero2 = TruncatedSeries(ctx2, 2, {})
    failures = []
    if compose(F, {"x": x2, "y": zero2}) != x2:
        failures.append("right identity fails")
    if compose(F, {"x": zero2, "y": y2}) != y2:
        failures.append("left identity fails")
    if compose(F, {"x": y2, "y": x2}) != F:
        failures.append("commutativity fails")
    ctx3 = SeriesContext(
        KA,
        [VariableSpec("x", 2), VariableSpec("y", 2), VariableSpec("z", 2)],
        order)
    x3, y3, z3 = (ctx3.variable(v) for v in ("x", "y", "z"))
    fxy = compose(F, {"x": x3, "y": y3})
    fyz = compose(F, {"x": y3, "y": z3})
    left = compose(F, {"x": fxy, "y": z3})
    right = compose(F, {"x": x3, "y": fyz})
    if left != right:
        failures.append("associativity fails")
    return failures


def log_additivity_check(fgl):
    """l(F(x, y)) = l(x) + l(y) over the rationals."""
    ctx2q = fgl.law_q.ctx
    both = (_embed_one_var(fgl.log, ctx2q, 0)
            + _embed_one_var(fgl.log, ctx2q, 1))
    return compose(fgl.log, {"x": fgl.law_q}) == both


def formal_sum(fgl, series_list, ctx=None):
    """Right-folded sum under the law: s1 +_F (s2 +_F (...))."""
    if not series_list:
        if ctx is None:
            raise ContextError("formal_sum of nothing needs a context")
        return TruncatedSeries(ctx, 2, {})
    acc = series_list[-1]
    tctx = acc.ctx
    F = fgl.law(tctx.algebra, tctx.order)
    for s in reversed(series_list[:-1]):
        if s.ctx != tctx:
            raise ContextError("formal_sum arguments in different contexts")
        acc = compose(F, {"x": s, "y": acc})
    return acc


def p_series(fgl, m=None, algebra=None, order=None):
    """The m-series [m](x); m defaults to p."""
    m = m or fgl.p
    ctx = fgl.one_var_ctx(algebra=algebra, order=order)
    x = ctx.variable("x")
    return formal_sum(fgl, [x] * m, ctx=ctx)


def formal_inverse(fgl, algebra=None, order=None):
    """The series i(x) with F(x, i(x)) = 0.

    Adding x p times gives the monomial v x^{p^n}, so the inverse unrolls
    into the formal sum of [p-1] taken along iterated p-series monomials;
    only finitely many land under the truncation order.  Cached per
    (algebra, order) since expansion peels ask for it repeatedly.
    """
    ctx = fgl.one_var_ctx(algebra=algebra, order=order)
    key = (ctx.algebra, ctx.order)
    got = fgl._inverse_cache.get(key)
    if got is not None:
        return got
    x = ctx.variable("x")
    pm1 = formal_sum(fgl, [x] * (fgl.p - 1), ctx=ctx)
    pn = fgl.p ** fgl.n
    pieces = []
    q = 1
    vexp = 0
    while q < ctx.order:
        mono = ctx.from_terms(
            2, {(q,): ctx.algebra.scalar(1, vexp=vexp)})
        pieces.append(compose(pm1, {"x": mono}))
        vexp = vexp * pn + 1
        q *= pn
    got = formal_sum(fgl, pieces, ctx=ctx)
    fgl._inverse_cache[key] = got
    return got


def hn_adic_expand(fgl, f):
    """Write f as a formal sum of terms c_i x^{p^i} under the law.

    Peels the lowest-order term repeatedly; every residual must begin at a
    power-of-p exponent, otherwise f is not in the required shape.
    """
    ctx = f.ctx
    if len(ctx.variables) != 1:
        raise ContextError("expansion needs a one-variable series")
    p = fgl.p
    inv = formal_inverse(fgl, algebra=ctx.algebra, order=ctx.order)
    residual = f
    coeffs = {}
    while not residual.is_zero():
        m = residual.support_orders()[0]
        c = residual.coefficient((m,))
        i = 0
        q = 1
        while q < m:
            q *= p
            i += 1
        if q != m:
            raise ExpansionError(
                "residual begins at x^%d, not a power of p=%d" % (m, p))
        coeffs[i] = c
        term = ctx.from_terms(f.degree, {(m,): c})
        neg = compose(inv, {"x": term})
        residual = formal_sum(fgl, [neg, residual])
    return coeffs


def realize_hn_adic(fgl, coeffs, ctx):
    """Inverse of hn_adic_expand: the formal sum of c_i x^{p^i}."""
    p = fgl.p
    parts = []
    for i in sorted(coeffs):
        c = coeffs[i]
        if c.is_zero():
            continue
        parts.append(ctx.from_terms(None, {(p ** i,): c}))
    return formal_sum(fgl, parts, ctx=ctx)
