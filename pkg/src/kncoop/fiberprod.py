"""The fiber product of the two automorphism groups and what corepresents it.

A point of the fiber product over R is a pair (f, g): f a strict
automorphism of the height-n law, g a quasi-strict pair of additive maps,
agreeing after both are pushed into the middle chunk group.  The group is
corepresented by the glued presentation c_star: relation generators from
the law side, exterior generators from the additive side, identified over
the chunk presentation by xi_i -> t_i.

corepresentability_check compares three independent enumerations over a
finite target algebra: algebra maps out of the corepresenting object, group
elements found by degree bookkeeping plus the one-variable p-series screen,
and a closed-form count from component sizes.  It also checks that
convolution of maps matches group multiplication through the dictionary.

kappa_star packages the antipode as the isomorphism onto the co-opposite
presentation, which carries the reversed-order coproduct.
"""

import itertools

from .galgebra import (
    AlgebraHom,
    ContextError,
    EnumerationError,
    degree_basis,
    degree_component,
    embed_left,
    embed_right,
    enumerate_homs,
    tensor,
    tensor_hom,
)
from .autgroups import (
    QuasiStrictAutGA,
    StrictAutGa,
    StrictAutHn,
    alpha,
    beta,
    ga2_identity,
    hn_identity,
    hn_is_automorphism,
    hn_v_commutation,
    random_element_of_degree,
    random_hn_aut,
)
from .fgl import honda
from .hopf import (
    HopfPresentation,
    a_star,
    b_star,
    c_star,
    c_star_algebra,
    co_opposite,
    convolve,
    fp_rank,
    sigma_bar,
)


class FiberElement:
    """A matched pair: law automorphism and quasi-strict additive pair."""

    def __init__(self, hn_part, ga2_part, check=True):
        if hn_part.algebra != ga2_part.algebra:
            raise ContextError("fiber parts live over different algebras")
        if check and alpha(hn_part) != beta(ga2_part):
            raise ContextError("images in the chunk group do not match")
        self.hn = hn_part
        self.ga2 = ga2_part
        self.algebra = hn_part.algebra

    def __eq__(self, other):
        if not isinstance(other, FiberElement):
            return NotImplemented
        return (self.hn, self.ga2) == (other.hn, other.ga2)

    def __hash__(self):
        return hash((FiberElement, self.hn, self.ga2))

    def __repr__(self):
        return "FiberElement(%r, %r)" % (self.hn, self.ga2)

    def multiply(self, other):
        return FiberElement(self.hn.multiply(other.hn),
                            self.ga2.multiply(other.ga2))

    def inverse(self):
        return FiberElement(self.hn.inverse(), self.ga2.inverse())


def fiber_identity(fgl, algebra, window):
    return FiberElement(hn_identity(fgl, algebra, window),
                        ga2_identity(fgl.p, fgl.n, algebra))


def random_fiber_element(fgl, algebra, window, rng):
    """The even part of the additive pair is pinned by the law side."""
    p, n = fgl.p, fgl.n
    f = random_hn_aut(fgl, algebra, window, rng)
    even = {i: c for i, c in f.coeffs.items() if i < n}
    odd = {}
    for i in range(n):
        c = random_element_of_degree(algebra, 1 - 2 * p ** i, rng)
        if not c.is_zero():
            odd[i] = c
    g = QuasiStrictAutGA(p, n, algebra, odd, even)
    return FiberElement(f, g)


# ------------------------------------------------------- glued presentation

def _square_hom(src, dst, name_map):
    """tensor(src, src) -> tensor(dst, dst) from a generator renaming."""
    TS = tensor(src, src)
    TD = tensor(dst, dst)
    images = {}
    for g in src.generators:
        tgt = dst.gen(name_map.get(g.name, g.name))
        images[g.name] = embed_left(TD, tgt)
        images[g.name + "'"] = embed_right(TD, tgt, dst.ngens)
    return AlgebraHom(TS, TD, images)


def pushout_c_star(p, n, window):
    """Assemble the corepresenting object by gluing the two factor tables.

    Takes the t coproducts from sigma_bar and the tau coproducts from
    b_star pushed along xi_i -> t_i, checking on the way that the two
    tables agree on the overlap.  Independent of the direct c_star builder.
    """
    sb = sigma_bar(p, n, window)
    bs = b_star(p, n)
    C = c_star_algebra(p, n, window)
    glue_sigma = _square_hom(sb.algebra, C, {})
    glue_b = _square_hom(
        bs.algebra, C, {"xi%d" % i: "t%d" % i for i in range(1, n)})
    images = {}
    for name, img in sb.images.items():
        images[name] = glue_sigma(img)
    for k in range(1, n):
        if glue_b(bs.images["xi%d" % k]) != images["t%d" % k]:
            raise ContextError("factor tables disagree over the chunk part")
    for k in range(n):
        name = "tau%d" % k
        images[name] = glue_b(bs.images[name])
    return HopfPresentation(C, images, kind="c_star",
                            params={"window": window})


# -------------------------------------------------------- corepresentation

def corepresentability_order(p, n, window):
    """Truncation at which the p-series screen sees every window constraint."""
    return p ** (n + window) + 1


def _coefficient_families(algebra, degrees):
    comps = [degree_component(algebra, d) for d in degrees]
    for combo in itertools.product(*comps):
        yield {i: c for i, c in enumerate(combo, start=1) if not c.is_zero()}


def enumerate_functor_hn(fgl, algebra, window, order=None):
    """Degree-valid families passing the p-series screen at high order."""
    p, n = fgl.p, fgl.n
    order = order or fgl.order
    out = []
    degrees = [2 - 2 * p ** i for i in range(1, window + 1)]
    for coeffs in _coefficient_families(algebra, degrees):
        aut = StrictAutHn(fgl, algebra, coeffs, window)
        if hn_v_commutation(aut, order):
            out.append(aut)
    return out


def enumerate_functor_ga(p, n, algebra):
    degrees = [2 - 2 * p ** i for i in range(1, n)]
    return [StrictAutGa(p, n, algebra, coeffs)
            for coeffs in _coefficient_families(algebra, degrees)]


def _odd_families(p, n, algebra):
    degrees = [1 - 2 * p ** i for i in range(n)]
    for fam in _coefficient_families(algebra, degrees):
        yield {i - 1: c for i, c in fam.items()}


def enumerate_functor_ga2(p, n, algebra):
    out = []
    for even in enumerate_functor_ga(p, n, algebra):
        for odd in _odd_families(p, n, algebra):
            out.append(QuasiStrictAutGA(p, n, algebra, odd, even.coeffs))
    return out


def enumerate_functor_fiber(fgl, algebra, window, order=None):
    p, n = fgl.p, fgl.n
    out = []
    for f in enumerate_functor_hn(fgl, algebra, window, order):
        even = {i: c for i, c in f.coeffs.items() if i < n}
        for odd in _odd_families(p, n, algebra):
            g = QuasiStrictAutGA(p, n, algebra, odd, even)
            out.append(FiberElement(f, g))
    return out


def hom_to_hn(hom, fgl, window):
    coeffs = {}
    for i in range(1, window + 1):
        c = hom.images["t%d" % i]
        if not c.is_zero():
            coeffs[i] = c
    return StrictAutHn(fgl, hom.target, coeffs, window)


def hom_to_ga(hom, p, n):
    coeffs = {}
    for i in range(1, n):
        c = hom.images["xi%d" % i]
        if not c.is_zero():
            coeffs[i] = c
    return StrictAutGa(p, n, hom.target, coeffs)


def hom_to_ga2(hom, p, n):
    odd = {}
    for i in range(n):
        c = hom.images["tau%d" % i]
        if not c.is_zero():
            odd[i] = c
    even = {}
    for i in range(1, n):
        c = hom.images["xi%d" % i]
        if not c.is_zero():
            even[i] = c
    return QuasiStrictAutGA(p, n, hom.target, odd, even)


def hom_to_fiber(hom, fgl, window):
    p, n = fgl.p, fgl.n
    f = hom_to_hn(hom, fgl, window)
    odd = {}
    for i in range(n):
        c = hom.images["tau%d" % i]
        if not c.is_zero():
            odd[i] = c
    even = {i: c for i, c in f.coeffs.items() if i < n}
    g = QuasiStrictAutGA(p, n, hom.target, odd, even)
    return FiberElement(f, g)


def predicted_counts(algebra, p, n, window):
    """Group orders over a finite algebra straight from component sizes.

    The law side keeps the degree-valid coefficients fixed by the stored
    rewriting rule; the additive sides are free on their components, and
    the fiber count is the law count times the odd components because the
    even half of the pair is pinned.
    """
    hn = 1
    for i in range(1, window + 1):
        comp = degree_component(algebra, 2 - 2 * p ** i)
        hn *= sum(1 for c in comp
                  if c ** (p ** n) == c.scale(1, vexp=p ** i - 1))
    ga = 1
    for i in range(1, n):
        ga *= len(degree_component(algebra, 2 - 2 * p ** i))
    odd = 1
    for i in range(n):
        odd *= len(degree_component(algebra, 1 - 2 * p ** i))
    return {"hn": hn, "ga": ga, "ga2": ga * odd, "fiber": hn * odd}


def corepresentability_check(kind, algebra, p, n, window=None, screen_fgl=None):
    """Compare maps out of the presentation with honest group elements.

    Returns a report dict: the two enumeration counts, the closed-form
    count, whether the dictionary is a bijection, whether convolution
    matches group multiplication on every pair, and for the law-side kinds
    whether each survivor also passes the two-variable check at the
    default order.
    """
    if kind in ("hn", "fiber"):
        if window is None:
            raise ContextError("law-side kinds need a window")
        if screen_fgl is None:
            screen_fgl = honda(p, n, corepresentability_order(p, n, window))
    if kind == "hn":
        hopf = sigma_bar(p, n, window)
        functor = enumerate_functor_hn(screen_fgl, algebra, window)
        def to_point(h):
            return hom_to_hn(h, screen_fgl, window)
    elif kind == "ga":
        hopf = a_star(p, n)
        functor = enumerate_functor_ga(p, n, algebra)
        def to_point(h):
            return hom_to_ga(h, p, n)
    elif kind == "ga2":
        hopf = b_star(p, n)
        functor = enumerate_functor_ga2(p, n, algebra)
        def to_point(h):
            return hom_to_ga2(h, p, n)
    elif kind == "fiber":
        hopf = c_star(p, n, window)
        functor = enumerate_functor_fiber(screen_fgl, algebra, window)
        def to_point(h):
            return hom_to_fiber(h, screen_fgl, window)
    else:
        raise ContextError("unknown kind %r" % (kind,))

    homs = enumerate_homs(hopf.algebra, algebra)
    mapped = [to_point(h) for h in homs]
    predicted = predicted_counts(algebra, p, n, window or 1)[kind]
    report = {
        "kind": kind,
        "hom_count": len(homs),
        "functor_count": len(functor),
        "predicted": predicted,
        "bijective": (len(mapped) == len(set(mapped))
                      and set(mapped) == set(functor)),
    }
    ok = True
    for phi, fphi in zip(homs, mapped):
        for psi, fpsi in zip(homs, mapped):
            if to_point(convolve(hopf, phi, psi)) != fphi.multiply(fpsi):
                ok = False
    report["group_match"] = ok
    if kind in ("hn", "fiber"):
        law_parts = [a.hn if kind == "fiber" else a for a in functor]
        report["confirmed"] = all(hn_is_automorphism(a) for a in law_parts)
    return report


# ------------------------------------------------------------ conjugation

def kappa_star(p, n, window):
    """The antipode as an isomorphism onto the co-opposite presentation."""
    ch = c_star(p, n, window)
    kh = co_opposite(ch, kind="kk")
    return ch, kh, ch.antipode()


def degree_dimension_table(R):
    """Monomial counts per degree residue class mod the v degree.

    Over F_p[v^{+-1}] every capped monomial pattern lands in exactly one
    degree of each residue class, so the component dimension in degree d
    is the count stored under d mod |deg v|.  Built by folding generators
    one at a time, which avoids walking the full pattern product.
    """
    step = abs(R.v_degree)
    if R.coeff != "Kn":
        raise EnumerationError("dimension table needs an invertible v")
    acc = {0: 1}
    for i, g in enumerate(R.generators):
        if g.parity:
            cap = 2
        elif i in R.rules:
            cap = R.rules[i][0]
        else:
            raise EnumerationError(
                "dimension table needs a cap for generator %r" % (g.name,))
        nxt = {}
        for e in range(cap):
            shift = (g.degree * e) % step
            for res, c in acc.items():
                key = (res + shift) % step
                nxt[key] = nxt.get(key, 0) + c
        acc = nxt
    return acc


def verify_kappa(ch, kh, hom, deg_lo=-100, deg_hi=0, samples=6, seed=0,
                 rank_cap=64):
    """Coalgebra compatibility, two-sided inverse, graded isomorphism.

    The algebra-map side is enforced when hom is built; here we check that
    the flipped coproduct of an image matches the image of the coproduct,
    that the co-opposite's own antipode inverts hom on both sides, and that
    source and target have equal dimensions in every degree of the band.
    Components no bigger than rank_cap also get an explicit basis
    enumeration (cross-checking the dimension table) and a full-rank test
    of hom on that component.
    """
    import random as _random
    failures = []
    A = ch.algebra
    hh = tensor_hom(hom, hom, ch.T, kh.T)
    rng = _random.Random(seed)
    points = [A.gen(g.name) for g in A.generators]
    for _ in range(samples):
        g1 = A.generators[rng.randrange(A.ngens)].name
        g2 = A.generators[rng.randrange(A.ngens)].name
        x = A.gen(g1) * A.gen(g2)
        if not x.is_zero():
            points.append(x)
    for x in points:
        if kh.coproduct(hom(x)) != hh(ch.coproduct(x)):
            failures.append("coalgebra compatibility fails at %r" % (x,))
    inv = kh.antipode()
    for g in A.generators:
        x = A.gen(g.name)
        if inv(hom(x)) != x:
            failures.append("left inverse fails at %s" % g.name)
        if hom(inv(x)) != x:
            failures.append("right inverse fails at %s" % g.name)
    src_table = degree_dimension_table(A)
    dst_table = degree_dimension_table(kh.algebra)
    step = abs(A.v_degree)
    for d in range(deg_lo, deg_hi + 1):
        ns = src_table.get(d % step, 0)
        nd = dst_table.get(d % step, 0)
        if ns != nd:
            failures.append("graded dimensions differ in degree %d" % d)
            continue
        if ns == 0 or ns > rank_cap:
            continue
        basis = degree_basis(A, d)
        if len(basis) != ns:
            failures.append(
                "dimension table disagrees with enumeration in degree %d" % d)
            continue
        elems = [_mono_elem(A, key) for key in basis]
        if fp_rank([hom(e) for e in elems]) != ns:
            failures.append("not invertible on the degree-%d component" % d)
    return failures


def _mono_elem(alg, key):
    vexp, exps = key
    out = alg.scalar(1, vexp=vexp)
    for gi, e in enumerate(exps):
        if e:
            out = out * alg.gen(alg.generators[gi].name) ** e
    return out
