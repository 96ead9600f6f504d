"""Strict automorphism groups of the height-n law and its additive chunks.

Three groups over a scalar algebra R:

* StrictAutHn: f(x) = sum^F_i c_i x^{p^i} with c_0 = 1, composition taken
  under the full law.  Products use the reversed convention f*g = g o f, so
  the coefficient formula lines up with the coproducts in the hopf module.
* StrictAutGa: the one-variable additive chunk mod x^{p^n}: f = x + sum a_i
  x^{p^i}, 1 <= i < n.
* QuasiStrictAutGA: the two-coordinate additive chunk on (eps, x): a pair
  f1 = eps + sum_{0<=i<n} a_i x^{p^i} (a_i odd), f2 = x + sum_{0<i<n} b_i
  x^{p^i}, acting by substitution into both slots.

Coefficient windows make each group finite over a finite-dimensional R; the
window-w quotient of StrictAutHn is a group because products only feed lower
indices into index w.
"""

from .galgebra import ContextError, DegreeError, degree_basis
from .series import SeriesContext, VariableSpec, compose, compositional_inverse
from .fgl import hn_adic_expand, realize_hn_adic


def _check_coeff(algebra, i, c, want_degree):
    if c.alg != algebra:
        raise ContextError("coefficient %d lives in the wrong algebra" % i)
    if c.is_zero():
        return False
    if c.degree() != want_degree:
        raise DegreeError(
            "coefficient %d has degree %r, expected %d"
            % (i, c.degree(), want_degree))
    return True


class StrictAutHn:
    """A strict automorphism of the height-n law, tracked to a coefficient window."""

    def __init__(self, fgl, algebra, coeffs, window, check=True):
        self.fgl = fgl
        self.algebra = algebra
        self.window = window
        clean = {}
        for i, c in coeffs.items():
            if i < 1 or i > window:
                raise ContextError("coefficient index %d outside window %d" % (i, window))
            if check:
                if not _check_coeff(algebra, i, c, 2 - 2 * fgl.p ** i):
                    continue
            elif c.is_zero():
                continue
            clean[i] = c
        self.coeffs = clean

    def __eq__(self, other):
        if not isinstance(other, StrictAutHn):
            return NotImplemented
        return (self.algebra, self.window, self.coeffs) == (
            other.algebra, other.window, other.coeffs)

    def __hash__(self):
        p = self.fgl.p
        return hash((p, self.window, tuple(sorted(
            (i, hash(c)) for i, c in self.coeffs.items()))))

    def __repr__(self):
        inner = ", ".join("%d: %s" % (i, c) for i, c in sorted(self.coeffs.items()))
        return "<Hn-aut window %d {%s}>" % (self.window, inner)

    def satisfies_relations(self):
        """c_i^{p^n} = v^{p^i - 1} c_i for every tracked coefficient.

        Degree alone forces this when R carries only v-power scalars on a
        t-monomial basis with the same relations; over a general R it is a
        genuine constraint, equivalent to f commuting with the p-series.
        """
        p, n = self.fgl.p, self.fgl.n
        A = self.algebra
        for i, c in self.coeffs.items():
            if c ** (p ** n) != c * A.v(p ** i - 1):
                return False
        return True

    def series(self, order=None):
        """Realize as a one-variable series over R to the given order."""
        order = order or min(self.fgl.order, self.fgl.p ** self.window + 1)
        ctx = self.fgl.one_var_ctx(algebra=self.algebra, order=order)
        coeffs = dict(self.coeffs)
        coeffs[0] = self.algebra.one()
        return realize_hn_adic(self.fgl, coeffs, ctx)

    def multiply(self, other):
        """Group product f*g = g o f, expanded and cut back to the window."""
        f, g = self, other
        if (f.algebra, f.window) != (g.algebra, g.window):
            raise ContextError("product needs matching algebra and window")
        order = f.fgl.p ** f.window + 1
        if order > f.fgl.order:
            raise ContextError(
                "law order %d too small for window %d" % (f.fgl.order, f.window))
        fs = f.series(order)
        gs = g.series(order)
        prod = compose(gs, {"x": fs})
        coeffs = hn_adic_expand(f.fgl, prod)
        coeffs.pop(0, None)
        coeffs = {i: c for i, c in coeffs.items() if i <= f.window}
        return StrictAutHn(f.fgl, f.algebra, coeffs, f.window, check=False)

    def inverse(self):
        order = self.fgl.p ** self.window + 1
        inv = compositional_inverse(self.series(order))
        coeffs = hn_adic_expand(self.fgl, inv)
        coeffs.pop(0, None)
        coeffs = {i: c for i, c in coeffs.items() if i <= self.window}
        return StrictAutHn(self.fgl, self.algebra, coeffs, self.window, check=False)


def hn_identity(fgl, algebra, window):
    return StrictAutHn(fgl, algebra, {}, window)


def hn_aut_from_images(fgl, algebra, images, window):
    """Build an automorphism from coefficient images indexed from 1."""
    return StrictAutHn(fgl, algebra, dict(images), window)


def embed_one_var(s, ctx2, slot):
    terms = {}
    for (e,), c in s.terms.items():
        exps = [0] * len(ctx2.variables)
        exps[slot] = e
        terms[tuple(exps)] = c
    return ctx2.from_terms(s.degree, terms)


def hn_is_automorphism(aut, order=None):
    """f(F(x, y)) = F(f(x), f(y)) to the given truncation order."""
    fgl = aut.fgl
    order = order or min(fgl.order, fgl.p ** (fgl.n + 1) + 1)
    F = fgl.law(aut.algebra, order)
    ctx2 = F.ctx
    fs = aut.series(order)
    lhs = compose(fs, {"x": F})
    fx = embed_one_var(fs, ctx2, 0)
    fy = embed_one_var(fs, ctx2, 1)
    rhs = compose(F, {"x": fx, "y": fy})
    return lhs == rhs


def hn_v_commutation(aut, order):
    """f(v x^{p^n}) = v f(x)^{p^n}: compatibility with the p-series.

    Sees window-w coefficient constraints already at order p^{n+w} + 1,
    where the two-variable check would need the same order but costs far
    more; this is the high-order screen used on big windows.
    """
    fgl = aut.fgl
    p, n = fgl.p, fgl.n
    ctx = fgl.one_var_ctx(algebra=aut.algebra, order=order)
    fs = aut.series(order)
    A = aut.algebra
    vxq = ctx.from_terms(2, {(p ** n,): A.v()})
    lhs = compose(fs, {"x": vxq})
    rhs = (fs ** (p ** n)).scale(A.v())
    return lhs == rhs


class StrictAutGa:
    """x + sum a_i x^{p^i} mod x^{p^n} under the additive law."""

    def __init__(self, p, n, algebra, coeffs, check=True):
        self.p = p
        self.n = n
        self.algebra = algebra
        clean = {}
        for i, c in coeffs.items():
            if i < 1 or i >= n:
                raise ContextError("chunk coefficient index %d outside 1..%d" % (i, n - 1))
            if check:
                if not _check_coeff(algebra, i, c, 2 - 2 * p ** i):
                    continue
            elif c.is_zero():
                continue
            clean[i] = c
        self.coeffs = clean

    def __eq__(self, other):
        if not isinstance(other, StrictAutGa):
            return NotImplemented
        return (self.p, self.n, self.algebra, self.coeffs) == (
            other.p, other.n, other.algebra, other.coeffs)

    def __hash__(self):
        return hash((self.p, self.n, tuple(sorted(
            (i, hash(c)) for i, c in self.coeffs.items()))))

    def __repr__(self):
        inner = ", ".join("%d: %s" % (i, c) for i, c in sorted(self.coeffs.items()))
        return "<ga-aut {%s}>" % (inner,)

    def _coeff(self, i):
        if i == 0:
            return self.algebra.one()
        return self.coeffs.get(i, self.algebra.zero())

    def multiply(self, other):
        """f*g = g o f: c_i = sum_{j+k=i} a_j^{p^k} b_k."""
        if self.algebra != other.algebra or (self.p, self.n) != (other.p, other.n):
            raise ContextError("product needs matching algebra and chunk")
        out = {}
        for i in range(1, self.n):
            acc = self.algebra.zero()
            for k in range(i + 1):
                b = other._coeff(k)
                if b.is_zero():
                    continue
                a = self._coeff(i - k)
                if a.is_zero():
                    continue
                acc = acc + (a ** (self.p ** k)) * b
            if not acc.is_zero():
                out[i] = acc
        return StrictAutGa(self.p, self.n, self.algebra, out, check=False)

    def inverse(self):
        inv = {}
        done = StrictAutGa(self.p, self.n, self.algebra, {}, check=False)
        for i in range(1, self.n):
            # choose b_i so the product coefficient at i vanishes
            partial = StrictAutGa(self.p, self.n, self.algebra, inv, check=False)
            resid = self.multiply(partial)._coeff(i)
            if not resid.is_zero():
                inv[i] = -resid
        return StrictAutGa(self.p, self.n, self.algebra, inv, check=False)

    def series(self, ctx=None):
        if ctx is None:
            ctx = SeriesContext(
                self.algebra, [VariableSpec("x", 2)], self.p ** self.n)
        terms = {(1,): self.algebra.one()}
        for i, c in self.coeffs.items():
            if ctx.admits((self.p ** i,)):
                terms[(self.p ** i,)] = c
        return ctx.from_terms(2, terms)


def ga_identity(p, n, algebra):
    return StrictAutGa(p, n, algebra, {})


class QuasiStrictAutGA:
    """Pair (f1, f2) acting on (eps, x): f1 = eps + sum a_i x^{p^i} with a_i
    odd, f2 = x + sum b_i x^{p^i}; a_0 may be nonzero, b_0 = 1 always."""

    def __init__(self, p, n, algebra, odd_coeffs, even_coeffs, check=True):
        self.p = p
        self.n = n
        self.algebra = algebra
        odd = {}
        for i, c in odd_coeffs.items():
            if i < 0 or i >= n:
                raise ContextError("odd coefficient index %d outside 0..%d" % (i, n - 1))
            if check:
                if not _check_coeff(algebra, i, c, 1 - 2 * p ** i):
                    continue
            elif c.is_zero():
                continue
            odd[i] = c
        self.odd = odd
        self.even_part = StrictAutGa(p, n, algebra, even_coeffs, check=check)

    @property
    def even(self):
        return self.even_part.coeffs

    def __eq__(self, other):
        if not isinstance(other, QuasiStrictAutGA):
            return NotImplemented
        return (self.p, self.n, self.algebra, self.odd, self.even_part) == (
            other.p, other.n, other.algebra, other.odd, other.even_part)

    def __hash__(self):
        return hash((self.p, self.n, tuple(sorted(
            (i, hash(c)) for i, c in self.odd.items())), self.even_part))

    def __repr__(self):
        o = ", ".join("%d: %s" % (i, c) for i, c in sorted(self.odd.items()))
        e = ", ".join("%d: %s" % (i, c) for i, c in sorted(self.even.items()))
        return "<2-chunk aut odd {%s} even {%s}>" % (o, e)

    def _odd_coeff(self, i):
        return self.odd.get(i, self.algebra.zero())

    def multiply(self, other):
        """(f*g)(slot) = g(slot) with eps -> f1, x -> f2, componentwise."""
        if self.algebra != other.algebra or (self.p, self.n) != (other.p, other.n):
            raise ContextError("product needs matching algebra and chunk")
        even = self.even_part.multiply(other.even_part)
        odd = {}
        for i in range(self.n):
            acc = self._odd_coeff(i)
            for k in range(i + 1):
                c = other._odd_coeff(k)
                if c.is_zero():
                    continue
                b = self.even_part._coeff(i - k)
                if b.is_zero():
                    continue
                acc = acc + (b ** (self.p ** k)) * c
            if not acc.is_zero():
                odd[i] = acc
        return QuasiStrictAutGA(
            self.p, self.n, self.algebra, odd, even.coeffs, check=False)

    def inverse(self):
        even_inv = self.even_part.inverse()
        odd_inv = {}
        for i in range(self.n):
            trial = QuasiStrictAutGA(
                self.p, self.n, self.algebra, odd_inv, even_inv.coeffs, check=False)
            resid = self.multiply(trial)._odd_coeff(i)
            if not resid.is_zero():
                odd_inv[i] = -resid
        return QuasiStrictAutGA(
            self.p, self.n, self.algebra, odd_inv, even_inv.coeffs, check=False)

    def pair_ctx(self):
        return SeriesContext(
            self.algebra,
            [VariableSpec("eps", 1), VariableSpec("x", 2)],
            self.p ** self.n)

    def series_pair(self, ctx=None):
        ctx = ctx or self.pair_ctx()
        t1 = {(1, 0): self.algebra.one()}
        for i, c in self.odd.items():
            t1[(0, self.p ** i)] = c
        t2 = {(0, 1): self.algebra.one()}
        for i, c in self.even.items():
            t2[(0, self.p ** i)] = c
        return ctx.from_terms(1, t1), ctx.from_terms(2, t2)


def ga2_identity(p, n, algebra):
    return QuasiStrictAutGA(p, n, algebra, {}, {})


def alpha(aut_hn):
    """Chunk truncation Aut(law) -> Aut(additive chunk): keep indices < n."""
    fgl = aut_hn.fgl
    coeffs = {i: c for i, c in aut_hn.coeffs.items() if i < fgl.n}
    return StrictAutGa(fgl.p, fgl.n, aut_hn.algebra, coeffs, check=False)


def beta(aut_ga2):
    """Second-coordinate projection of a two-chunk automorphism."""
    return StrictAutGa(
        aut_ga2.p, aut_ga2.n, aut_ga2.algebra, dict(aut_ga2.even), check=False)


def is_additive(series, var_name="x"):
    """f(x1 + x2) = f(x1) + f(x2) for a one-variable series."""
    ctx = series.ctx
    if len(ctx.variables) != 1:
        raise ContextError("additivity check needs one variable")
    deg = ctx.variables[0].degree
    ctx2 = SeriesContext(
        ctx.algebra,
        [VariableSpec(var_name + "1", deg), VariableSpec(var_name + "2", deg)],
        ctx.order)
    a = ctx2.variable(var_name + "1")
    b = ctx2.variable(var_name + "2")
    split = compose(series, {var_name: a + b})
    apart = compose(series, {var_name: a}) + compose(series, {var_name: b})
    return split == apart


def is_additive_pair(f1, f2):
    """Additivity of a two-coordinate map on (eps, x), checked on a doubled
    coordinate system (eps1, eps2, x1, x2)."""
    ctx = f1.ctx
    if f2.ctx != ctx or len(ctx.variables) != 2:
        raise ContextError("pair additivity needs the shared (eps, x) context")
    (veps, vx) = ctx.variables
    ctx4 = SeriesContext(
        ctx.algebra,
        [VariableSpec("eps1", veps.degree), VariableSpec("eps2", veps.degree),
         VariableSpec("x1", vx.degree), VariableSpec("x2", vx.degree)],
        ctx.order)
    e1, e2, x1, x2 = (ctx4.variable(v) for v in ("eps1", "eps2", "x1", "x2"))
    for f in (f1, f2):
        both = compose(f, {veps.name: e1 + e2, vx.name: x1 + x2})
        one = compose(f, {veps.name: e1, vx.name: x1})
        two = compose(f, {veps.name: e2, vx.name: x2})
        if both != one + two:
            return False
    return True


def random_element_of_degree(algebra, degree, rng, bound=4096, max_terms=4):
    """Random sparse F_p combination of the monomial basis in one degree."""
    basis = degree_basis(algebra, degree, per_degree_basis_bound=bound)
    out = algebra.zero()
    if not basis:
        return out
    picks = rng.sample(range(len(basis)), min(max_terms, len(basis)))
    for idx in sorted(picks):
        c = rng.randrange(algebra.p)
        if c:
            vexp, exps = basis[idx]
            mono = algebra.scalar(c, vexp=vexp)
            for gi, e in enumerate(exps):
                if e:
                    mono = mono * algebra.gen(algebra.generators[gi].name) ** e
            out = out + mono
    return out


def random_hn_aut(fgl, algebra, window, rng):
    coeffs = {}
    for i in range(1, window + 1):
        c = random_element_of_degree(algebra, 2 - 2 * fgl.p ** i, rng)
        if not c.is_zero():
            coeffs[i] = c
    return StrictAutHn(fgl, algebra, coeffs, window)


def random_ga_aut(p, n, algebra, rng):
    coeffs = {}
    for i in range(1, n):
        c = random_element_of_degree(algebra, 2 - 2 * p ** i, rng)
        if not c.is_zero():
            coeffs[i] = c
    return StrictAutGa(p, n, algebra, coeffs)


def random_ga2_aut(p, n, algebra, rng):
    odd = {}
    even = {}
    for i in range(n):
        c = random_element_of_degree(algebra, 1 - 2 * p ** i, rng)
        if not c.is_zero():
            odd[i] = c
    for i in range(1, n):
        c = random_element_of_degree(algebra, 2 - 2 * p ** i, rng)
        if not c.is_zero():
            even[i] = c
    return QuasiStrictAutGA(p, n, algebra, odd, even)
