"""Graded Hopf algebra presentations and the coproducts of the aut groups.

Five builders:

* sigma_bar(p, n, window): coefficient algebra of the strict aut group of
  the height-n law, cut to a coefficient window.  The generator coproducts
  are computed, not transcribed: multiply the two universal points over the
  tensor square and read off the product coefficients.  For k <= n this
  agrees with the additive pattern sum t_{k-i}^{p^i} (x) t_i; for k > n the
  law contributes genuine correction terms.
* a_star(p, n): the one-variable additive chunk group.
* b_star(p, n): the two-coordinate chunk group on (eps, x).
* c_star(p, n, window): sigma relations on t's together with the exterior
  odd part; the t coproducts are derived as in sigma_bar, the tau part is
  the pushout of the b_star pattern along xi_i -> t_i.
* kk(p, n, window): the co-opposite of c_star: every coproduct flipped.

Products of points use the reversed convention f*g = g o f throughout, so
convolution of homs against these coproducts matches group multiplication
with the first hom in the left tensor slot.
"""

from .galgebra import (
    AlgebraHom,
    AlgebraPresentation,
    ContextError,
    coefficient_algebra,
    embed_left,
    embed_right,
    flip_tensor,
    identity_hom,
    split_terms,
    tensor,
    tensor_hom,
    tensor_pair,
)
from .series import SeriesContext, VariableSpec, compose
from .fgl import honda, realize_hn_adic
from .autgroups import StrictAutHn


class HopfPresentation:
    """An algebra with generator coproducts; counit kills every generator."""

    def __init__(self, algebra, images, kind="custom", params=None, check=True):
        self.algebra = algebra
        self.T = tensor(algebra, algebra)
        self.kind = kind
        self.params = dict(params or {})
        self.images = {name: images[name] for name in
                       (g.name for g in algebra.generators)}
        self.coproduct = AlgebraHom(algebra, self.T, self.images, check=check)
        self.base = coefficient_algebra(algebra.p, algebra.n, algebra.coeff)
        self.counit = AlgebraHom(
            algebra, self.base,
            {g.name: self.base.zero() for g in algebra.generators}, check=check)
        self._antipode = None

    def __repr__(self):
        return "<hopf %s on %d generators>" % (
            self.kind, self.algebra.ngens)

    def delta(self, x):
        if isinstance(x, str):
            x = self.algebra.gen(x)
        return self.coproduct(x)

    def eps(self, x):
        if isinstance(x, str):
            x = self.algebra.gen(x)
        return self.counit(x)

    def antipode(self):
        """The conjugation map, solved degree by degree from the coproduct."""
        if self._antipode is not None:
            return self._antipode
        A = self.algebra
        images = {}
        order = sorted(range(A.ngens), key=lambda i: -A.generators[i].degree)
        for gi in order:
            g = A.generators[gi]
            ge = A.gen(g.name)
            delta = self.coproduct(ge)
            boundary = (tensor_pair(self.T, ge, A.one())
                        + tensor_pair(self.T, A.one(), ge))
            mixed = delta - boundary
            acc = -ge
            for s, vexp, e_left, e_right in split_terms(mixed, A.ngens):
                cu = A.scalar(s, vexp=vexp)
                for gj, e in enumerate(e_left):
                    if e:
                        name = A.generators[gj].name
                        if name not in images:
                            raise ContextError(
                                "antipode recursion hit %r before it was solved"
                                % (name,))
                        cu = cu * images[name] ** e
                cu = cu * _mono(A, e_right)
                acc = acc - cu
            images[g.name] = acc
        self._antipode = AlgebraHom(A, A, images)
        return self._antipode


def _mono(alg, exps, scalar=1, vexp=0):
    out = alg.scalar(scalar, vexp=vexp)
    for gi, e in enumerate(exps):
        if e:
            out = out * alg.gen(alg.generators[gi].name) ** e
    return out


def counit_collapse(hopf, telem, side):
    """Apply the counit to one tensor factor of an element of H (x) H."""
    A = hopf.algebra
    out = A.zero()
    for s, vexp, e_left, e_right in split_terms(telem, A.ngens):
        if side == "left":
            if any(e_left):
                continue
            out = out + _mono(A, e_right, scalar=s, vexp=vexp)
        else:
            if any(e_right):
                continue
            out = out + _mono(A, e_left, scalar=s, vexp=vexp)
    return out


def _antipode_convolution(hopf, x, side):
    """m(c (x) id) Delta(x) for side 'left', m(id (x) c) for 'right'."""
    A = hopf.algebra
    c = hopf.antipode()
    out = A.zero()
    for s, vexp, e_left, e_right in split_terms(hopf.delta(x), A.ngens):
        if side == "left":
            piece = c(_mono(A, e_left)) * _mono(A, e_right)
        else:
            piece = _mono(A, e_left) * c(_mono(A, e_right))
        out = out + A.scalar(s, vexp=vexp) * piece
    return out


def verify_hopf_axioms(hopf, samples=6, seed=0, deg_bound=None):
    """Coassociativity, counit laws and antipode identities.

    Checked on every generator plus seeded random monomials; returns a list
    of failure descriptions, empty when all hold.  The coproduct respecting
    the defining relations is already enforced when the presentation is
    built.  deg_bound, when given, drops sample points whose degree falls
    below -deg_bound (every degree in sight is nonpositive).
    """
    import random as _random
    A = hopf.algebra
    T = hopf.T
    failures = []
    d = hopf.coproduct
    idA = identity_hom(A)
    T3 = tensor(T, A)
    dl = tensor_hom(d, idA, T, T3)
    dr = tensor_hom(idA, d, T, tensor(A, T))
    rng = _random.Random(seed)
    points = [A.gen(g.name) for g in A.generators]
    # sampled products reach three times the deepest generator degree
    for nfac in (2, 3):
        for _ in range(samples):
            if not A.ngens:
                break
            x = A.one()
            for _ in range(nfac):
                x = x * A.gen(A.generators[rng.randrange(A.ngens)].name)
            if not x.is_zero():
                points.append(x)
    if deg_bound is not None:
        points = [x for x in points if abs(x.degree() or 0) <= deg_bound]
    for x in points:
        label = repr(x)
        dx = d(x)
        if dl(dx) != dr(dx):
            failures.append("coassociativity fails at %s" % label)
        if counit_collapse(hopf, dx, "left") != x:
            failures.append("left counit law fails at %s" % label)
        if counit_collapse(hopf, dx, "right") != x:
            failures.append("right counit law fails at %s" % label)
        eps_x = hopf.eps(x)
        unit_eps = _from_base(A, eps_x)
        if _antipode_convolution(hopf, x, "left") != unit_eps:
            failures.append("left antipode identity fails at %s" % label)
        if _antipode_convolution(hopf, x, "right") != unit_eps:
            failures.append("right antipode identity fails at %s" % label)
    return failures


def _from_base(algebra, base_elem):
    out = algebra.zero()
    for (vexp, _), s in base_elem.terms.items():
        out = out + algebra.scalar(s, vexp=vexp)
    return out


# ------------------------------------------------------------------ builders

def sigma_algebra(p, n, window):
    gens = [("t%d" % i, -2 * (p ** i - 1)) for i in range(1, window + 1)]
    rels = [("t%d^%d" % (i, p ** n), "v^%d*t%d" % (p ** i - 1, i))
            for i in range(1, window + 1)]
    return AlgebraPresentation.build(p, n, "Kn", gens, rels)


def _universal_product_coeffs(p, n, window, algebra, t_names):
    """Coefficients of (left point)*(right point) over the tensor square."""
    T = tensor(algebra, algebra)
    fgl = honda(p, n, p ** window + 1)
    left = {}
    right = {}
    for i, name in enumerate(t_names, start=1):
        ge = algebra.gen(name)
        left[i] = embed_left(T, ge)
        right[i] = embed_right(T, ge, algebra.ngens)
    f = StrictAutHn(fgl, T, left, window)
    g = StrictAutHn(fgl, T, right, window)
    prod = f.multiply(g)
    return T, prod.coeffs


def derive_sigma_images(p, n, window, algebra=None):
    """Generator coproducts of the sigma presentation, from composition."""
    algebra = algebra or sigma_algebra(p, n, window)
    t_names = ["t%d" % i for i in range(1, window + 1)]
    T, coeffs = _universal_product_coeffs(p, n, window, algebra, t_names)
    images = {}
    for k, name in enumerate(t_names, start=1):
        img = coeffs.get(k, T.zero())
        for s, vexp, e_left, e_right in split_terms(img, algebra.ngens):
            used = [j + 1 for j, e in enumerate(e_left[:window]) if e]
            used += [j + 1 for j, e in enumerate(e_right[:window]) if e]
            if any(j > k for j in used):
                raise ContextError(
                    "coproduct of %s is not window-closed" % (name,))
        images[name] = img
    return images


def sigma_closed_form(algebra, p, k):
    """The additive pattern sum_i t_{k-i}^{p^i} (x) t_i inside the tensor square."""
    return _chunk_pattern(algebra, tensor(algebra, algebra), p, k, "t")


def sigma_bar(p, n, window):
    algebra = sigma_algebra(p, n, window)
    images = derive_sigma_images(p, n, window, algebra)
    return HopfPresentation(algebra, images, kind="sigma_bar",
                            params={"window": window})


def a_star_algebra(p, n):
    gens = [("xi%d" % i, -2 * (p ** i - 1)) for i in range(1, n)]
    return AlgebraPresentation.build(p, n, "Kn", gens)


def _chunk_pattern(algebra, T, p, k, lo_name, hi_name=None):
    """sum_i lo_{k-i}^{p^i} (x) hi_i with index 0 meaning 1."""
    hi_name = hi_name or lo_name
    one = algebra.one()
    acc = T.zero()
    for i in range(k + 1):
        if k - i == 0:
            a = one
        else:
            a = algebra.gen("%s%d" % (lo_name, k - i)) ** (p ** i)
        b = one if i == 0 else algebra.gen("%s%d" % (hi_name, i))
        acc = acc + tensor_pair(T, a, b)
    return acc


def a_star(p, n):
    algebra = a_star_algebra(p, n)
    T = tensor(algebra, algebra)
    images = {}
    for k in range(1, n):
        images["xi%d" % k] = _chunk_pattern(algebra, T, p, k, "xi")
    return HopfPresentation(algebra, images, kind="a_star", params={})


def b_star_algebra(p, n):
    gens = [("xi%d" % i, -2 * (p ** i - 1)) for i in range(1, n)]
    gens += [("tau%d" % i, -(2 * p ** i - 1)) for i in range(n)]
    return AlgebraPresentation.build(p, n, "Kn", gens)


def _tau_pattern(algebra, T, p, k, lo_name):
    """tau_k (x) 1 + sum_{i<=k} lo_{k-i}^{p^i} (x) tau_i."""
    tau_k = algebra.gen("tau%d" % k)
    acc = tensor_pair(T, tau_k, algebra.one())
    one = algebra.one()
    for i in range(k + 1):
        if k - i == 0:
            a = one
        else:
            a = algebra.gen("%s%d" % (lo_name, k - i)) ** (p ** i)
        b = algebra.gen("tau%d" % i)
        acc = acc + tensor_pair(T, a, b)
    return acc


def b_star(p, n):
    algebra = b_star_algebra(p, n)
    T = tensor(algebra, algebra)
    images = {}
    for k in range(1, n):
        images["xi%d" % k] = _chunk_pattern(algebra, T, p, k, "xi")
    for k in range(n):
        images["tau%d" % k] = _tau_pattern(algebra, T, p, k, "xi")
    return HopfPresentation(algebra, images, kind="b_star", params={})


def c_star_algebra(p, n, window):
    gens = [("t%d" % i, -2 * (p ** i - 1)) for i in range(1, window + 1)]
    gens += [("tau%d" % i, -(2 * p ** i - 1)) for i in range(n)]
    rels = [("t%d^%d" % (i, p ** n), "v^%d*t%d" % (p ** i - 1, i))
            for i in range(1, window + 1)]
    return AlgebraPresentation.build(p, n, "Kn", gens, rels)


def c_star(p, n, window):
    if window < n - 1:
        raise ContextError("window %d too small: tau part needs %d t's"
                           % (window, n - 1))
    algebra = c_star_algebra(p, n, window)
    images = derive_sigma_images(p, n, window, algebra)
    T = tensor(algebra, algebra)
    for k in range(n):
        images["tau%d" % k] = _tau_pattern(algebra, T, p, k, "t")
    return HopfPresentation(algebra, images, kind="c_star",
                            params={"window": window})


def co_opposite(hopf, kind=None):
    """Same algebra, flipped coproducts."""
    A = hopf.algebra
    images = {name: flip_tensor(img, A.ngens)
              for name, img in hopf.images.items()}
    return HopfPresentation(A, images, kind=kind or ("co-" + hopf.kind),
                            params=dict(hopf.params))


def kk(p, n, window):
    return co_opposite(c_star(p, n, window), kind="kk")


# --------------------------------------------------- independent derivations

def derive_chunk_images(p, n, algebra=None):
    """xi coproducts read off from composing universal chunk series."""
    algebra = algebra or a_star_algebra(p, n)
    T = tensor(algebra, algebra)
    ctx = SeriesContext(T, [VariableSpec("x", 2)], p ** n)
    terms_l = {(1,): T.one()}
    terms_r = {(1,): T.one()}
    for i in range(1, n):
        ge = algebra.gen("xi%d" % i)
        terms_l[(p ** i,)] = embed_left(T, ge)
        terms_r[(p ** i,)] = embed_right(T, ge, algebra.ngens)
    fs = ctx.from_terms(2, terms_l)
    gs = ctx.from_terms(2, terms_r)
    prod = compose(gs, {"x": fs})
    images = {}
    for k in range(1, n):
        images["xi%d" % k] = prod.coefficient((p ** k,))
    return images


def derive_pair_images(p, n, algebra=None):
    """tau and xi coproducts from composing universal two-coordinate maps."""
    algebra = algebra or b_star_algebra(p, n)
    T = tensor(algebra, algebra)
    ctx = SeriesContext(
        T, [VariableSpec("eps", 1), VariableSpec("x", 2)], p ** n)
    ln = algebra.ngens

    def univ(embed):
        t1 = {(1, 0): T.one()}
        t2 = {(0, 1): T.one()}
        for i in range(n):
            t1[(0, p ** i)] = embed(algebra.gen("tau%d" % i))
        for i in range(1, n):
            t2[(0, p ** i)] = embed(algebra.gen("xi%d" % i))
        return ctx.from_terms(1, t1), ctx.from_terms(2, t2)

    f1, f2 = univ(lambda e: embed_left(T, e))
    g1, g2 = univ(lambda e: embed_right(T, e, ln))
    p1 = compose(g1, {"eps": f1, "x": f2})
    p2 = compose(g2, {"eps": f1, "x": f2})
    images = {}
    for k in range(n):
        images["tau%d" % k] = p1.coefficient((0, p ** k))
    for k in range(1, n):
        images["xi%d" % k] = p2.coefficient((0, p ** k))
    return images


def _pushout_hom(b_alg, c_alg):
    """tensor(B, B) -> tensor(C, C) sending xi_i -> t_i, tau_i -> tau_i."""
    TB = tensor(b_alg, b_alg)
    TC = tensor(c_alg, c_alg)

    def mapped(name):
        if name.startswith("xi"):
            return "t" + name[2:]
        return name

    images = {}
    for g in b_alg.generators:
        images[g.name] = embed_left(TC, c_alg.gen(mapped(g.name)))
        images[g.name + "'"] = embed_right(
            TC, c_alg.gen(mapped(g.name)), c_alg.ngens)
    return AlgebraHom(TB, TC, images)


def derive_coproduct(hopf):
    """Recompute every generator coproduct from group composition.

    sigma_bar and the t part of c_star rerun the universal-point product;
    a_star and b_star come from direct series composition; the tau part of
    c_star is pushed out of the derived b_star answer along xi -> t; kk is
    the flip of the c_star derivation.
    """
    A = hopf.algebra
    p, n = A.p, A.n
    if hopf.kind == "sigma_bar":
        return derive_sigma_images(p, n, hopf.params["window"], A)
    if hopf.kind == "a_star":
        return derive_chunk_images(p, n, A)
    if hopf.kind == "b_star":
        return derive_pair_images(p, n, A)
    if hopf.kind in ("c_star", "kk"):
        window = hopf.params["window"]
        t_images = derive_sigma_images(p, n, window, A)
        balg = b_star_algebra(p, n)
        btaus = derive_pair_images(p, n, balg)
        push = _pushout_hom(balg, A)
        images = dict(t_images)
        for k in range(n):
            name = "tau%d" % k
            images[name] = push(btaus[name])
        if hopf.kind == "kk":
            images = {name: flip_tensor(img, A.ngens)
                      for name, img in images.items()}
        return images
    raise ContextError("no derivation route for kind %r" % (hopf.kind,))


# -------------------------------------------------- relations from scratch

def derive_sigma_relations(p, n, window, order):
    """Constraints forced on free coefficient families by the p-series.

    Over the relation-free polynomial algebra on t_1..t_window, realize the
    universal series and impose f(v x^{p^n}) = v f(x)^{p^n}; each nonzero
    coefficient of the difference is an equation the honest coefficient
    algebra must kill.  Returns (free_algebra, equations).
    """
    gens = [("t%d" % i, -2 * (p ** i - 1)) for i in range(1, window + 1)]
    free = AlgebraPresentation.build(p, n, "Kn", gens)
    fgl = honda(p, n, order)
    ctx = SeriesContext(free, [VariableSpec("x", 2)], order)
    coeffs = {0: free.one()}
    for i in range(1, window + 1):
        coeffs[i] = free.gen("t%d" % i)
    f = realize_hn_adic(fgl, coeffs, ctx)
    vxq = ctx.from_terms(2, {(p ** n,): free.v()})
    lhs = compose(f, {"x": vxq})
    rhs = (f ** (p ** n)).scale(free.v())
    diff = lhs - rhs
    equations = [diff.terms[e] for e in sorted(diff.terms)]
    return free, equations


def relations_vanish_in(ruled, free, equations):
    """Map each equation along t_i -> t_i and test that it reduces to zero."""
    images = {g.name: ruled.gen(g.name) for g in free.generators}
    h = AlgebraHom(free, ruled, images)
    return all(h(eq).is_zero() for eq in equations)


def shift_to_degree(elem, degree):
    """Multiply by the v power landing elem in the target degree, if any."""
    d = elem.degree()
    if d is None:
        return None
    gap = degree - d
    vd = elem.alg.v_degree
    if gap % vd:
        return None
    return elem.scale(elem.alg.scalar_of(1), vexp=gap // vd)


def span_recovery_candidates(free, equations, target_degree, max_exp=3):
    """Equations times small generator monomials, landed on one degree.

    Each product is shifted by the unique v power reaching target_degree
    when one exists; the returned family feeds fp_span_contains.
    """
    import itertools as _it
    monos = []
    ranges = [range(max_exp + 1)] * free.ngens
    for exps in _it.product(*ranges):
        m = free.one()
        for gi, e in enumerate(exps):
            if e:
                m = m * free.gen(free.generators[gi].name) ** e
        if not m.is_zero():
            monos.append(m)
    out = []
    for eq in equations:
        for m in monos:
            c = shift_to_degree(eq * m, target_degree)
            if c is not None and not c.is_zero():
                out.append(c)
    return out


def fp_rank(elems):
    """Rank of a family of F_p-algebra elements over their monomial support."""
    elems = [e for e in elems if not e.is_zero()]
    if not elems:
        return 0
    p = elems[0].alg.p
    keys = sorted(set().union(*[set(e.terms) for e in elems]))
    index = {k: i for i, k in enumerate(keys)}
    pivot_of = {}
    for e in elems:
        row = [0] * len(keys)
        for k, s in e.terms.items():
            row[index[k]] = int(s) % p
        for col, prow in pivot_of.items():
            if row[col]:
                f = row[col]
                row = [(a - f * b) % p for a, b in zip(row, prow)]
        lead = next((i for i, a in enumerate(row) if a), None)
        if lead is None:
            continue
        inv = pow(row[lead], -1, p)
        pivot_of[lead] = [(a * inv) % p for a in row]
    return len(pivot_of)


def fp_span_contains(candidates, target):
    """Is target in the F_p span of candidates?  Plain Gaussian elimination."""
    alg = target.alg
    p = alg.p
    keys = sorted(set().union(
        *[set(c.terms) for c in candidates], set(target.terms)))
    index = {k: i for i, k in enumerate(keys)}
    rows = []
    for c in candidates:
        row = [0] * len(keys)
        for k, s in c.terms.items():
            row[index[k]] = int(s) % p
        rows.append(row)
    goal = [0] * len(keys)
    for k, s in target.terms.items():
        goal[index[k]] = int(s) % p
    pivot_of = {}
    for row in rows:
        row = row[:]
        for col, prow in pivot_of.items():
            if row[col]:
                f = row[col]
                row = [(a - f * b) % p for a, b in zip(row, prow)]
        lead = next((i for i, a in enumerate(row) if a), None)
        if lead is None:
            continue
        inv = pow(row[lead], -1, p)
        row = [(a * inv) % p for a in row]
        pivot_of[lead] = row
    for col, prow in pivot_of.items():
        if goal[col]:
            f = goal[col]
            goal = [(a - f * b) % p for a, b in zip(goal, prow)]
    return not any(goal)


# ------------------------------------------------------------- convolution

def convolve(hopf, phi, psi):
    """Convolution of two algebra maps out of the presentation."""
    A = hopf.algebra
    R = phi.target
    if psi.target != R:
        raise ContextError("convolution needs a common target")
    images = {}
    for g in A.generators:
        acc = R.zero()
        for s, vexp, e_left, e_right in split_terms(
                hopf.delta(g.name), A.ngens):
            piece = phi(_mono(A, e_left)) * psi(_mono(A, e_right))
            acc = acc + R.scalar(s, vexp=vexp) * piece
        images[g.name] = acc
    return AlgebraHom(A, R, images)


def convolution_unit(hopf, R):
    return AlgebraHom(hopf.algebra, R,
                      {g.name: R.zero() for g in hopf.algebra.generators})
