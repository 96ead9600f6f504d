"""Truncated homogeneous series in even and odd variables.

A series lives in a context: a coefficient algebra, an ordered tuple of
variables (degree 2 even, degree 1 odd) and a truncation order N.  Stored
terms keep the total exponent of the even variables below N; odd variables
carry exponent at most 1 and do not count toward N.  Every series is
homogeneous: coefficient degree plus variable degree is constant across
terms.  Coefficients are written to the left of the variables, so moving a
coefficient past an odd variable costs the Koszul sign.
"""

from dataclasses import dataclass

from gmpy2 import mpq

from .galgebra import (
    ContextError,
    DegreeError,
    PresentationError,
    _PolyParser,
    _tokenize,
    normalize,
    render_poly,
    parse_poly,
)


@dataclass(frozen=True)
class VariableSpec:
    name: str
    degree: int

    def __post_init__(self):
        if self.degree not in (1, 2):
            raise ContextError("series variables have degree 1 (odd) or 2 (even)")

    @property
    def parity(self):
        return self.degree & 1


class SeriesContext:
    """Variables plus truncation order over a fixed coefficient algebra."""

    def __init__(self, algebra, variables, order):
        self.algebra = algebra
        self.variables = tuple(variables)
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ContextError("duplicate variable name")
        for v in self.variables:
            if v.name in algebra.gen_index or v.name == "v":
                raise ContextError(
                    "variable %r collides with an algebra name" % (v.name,))
        if order < 1:
            raise ContextError("truncation order must be >= 1")
        self.order = order
        self.var_index = {v.name: i for i, v in enumerate(self.variables)}
        self.even_indices = tuple(i for i, v in enumerate(self.variables) if not v.parity)
        self.odd_indices = tuple(i for i, v in enumerate(self.variables) if v.parity)

    def _key(self):
        return (self.algebra, self.variables, self.order)

    def __eq__(self, other):
        if not isinstance(other, SeriesContext):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return "<series ctx (%s) mod order %d>" % (
            ",".join(v.name for v in self.variables), self.order)

    def admits(self, exps):
        if sum(exps[i] for i in self.even_indices) >= self.order:
            return False
        return all(exps[i] <= 1 for i in self.odd_indices)

    def exps_degree(self, exps):
        return sum(e * v.degree for e, v in zip(exps, self.variables))

    def zero(self, degree):
        return TruncatedSeries(self, degree, {})

    def variable(self, name):
        i = self.var_index[name]
        exps = [0] * len(self.variables)
        exps[i] = 1
        return TruncatedSeries(
            self, self.variables[i].degree,
            {tuple(exps): self.algebra.one()})

    def term(self, coeff, exps):
        """coeff * (variable monomial); validates homogeneity lazily via from_terms."""
        return self.from_terms(
            coeff.degree() + self.exps_degree(exps) if not coeff.is_zero() else None,
            {tuple(exps): coeff})

    def from_terms(self, degree, terms, check=True):
        """Build a series; check=True validates homogeneity against degree.

        With check=True and degree None the common degree is inferred.  With
        check=False and degree None the series carries no degree label, which
        arithmetic then propagates as 'untracked'.
        """
        clean = {}
        for exps, c in terms.items():
            exps = tuple(exps)
            if c.is_zero():
                continue
            if not self.admits(exps):
                continue
            if check:
                if c.alg != self.algebra:
                    raise ContextError("coefficient in the wrong algebra")
                d = c.degree() + self.exps_degree(exps)
                if degree is None:
                    degree = d
                elif d != degree:
                    raise DegreeError(
                        "term of degree %d in a degree-%r series" % (d, degree))
            clean[exps] = c
        if degree is None and check:
            degree = 0
        return TruncatedSeries(self, degree, clean)


class TruncatedSeries:
    """Homogeneous truncated series; immutable by convention."""

    __slots__ = ("ctx", "degree", "terms")

    def __init__(self, ctx, degree, terms):
        self.ctx = ctx
        self.degree = degree
        self.terms = terms

    def is_zero(self):
        return not self.terms

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), self.ctx.algebra.zero())

    def x_coefficient(self, k):
        """Coefficient of x^k in a one-variable series."""
        if len(self.ctx.variables) != 1:
            raise ContextError("x_coefficient needs a one-variable context")
        return self.coefficient((k,))

    def support_orders(self):
        ev = self.ctx.even_indices
        return sorted({sum(e[i] for i in ev) for e in self.terms})

    def _require(self, other):
        if self.ctx != other.ctx:
            raise ContextError("series contexts differ")

    def __add__(self, other):
        self._require(other)
        if not self.terms:
            deg = other.degree
        elif not other.terms:
            deg = self.degree
        elif self.degree is None or other.degree is None:
            deg = None
        elif self.degree != other.degree:
            raise DegreeError("adding series of different degrees")
        else:
            deg = self.degree
        acc = dict(self.terms)
        for e, c in other.terms.items():
            tot = acc.get(e)
            tot = c if tot is None else tot + c
            if tot.is_zero():
                acc.pop(e, None)
            else:
                acc[e] = tot
        return TruncatedSeries(self.ctx, deg, acc)

    def __neg__(self):
        return TruncatedSeries(self.ctx, self.degree,
                               {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, coeff):
        """Left multiplication by a coefficient; no variable crossings."""
        if coeff.alg != self.ctx.algebra:
            raise ContextError("scale coefficient in the wrong algebra")
        if coeff.is_zero():
            return self.ctx.zero(self.degree)
        acc = {}
        for e, c in self.terms.items():
            nc = coeff * c
            if not nc.is_zero():
                acc[e] = nc
        if self.degree is None:
            deg = None
        else:
            deg = self.degree + (coeff.degree() or 0)
        return TruncatedSeries(self.ctx, deg, acc)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._require(other)
        ctx = self.ctx
        neg_one = ctx.algebra.scalar_of(-1)
        acc = {}
        for e1, c1 in self.terms.items():
            n_odd1 = sum(e1[i] for i in ctx.odd_indices)
            for e2, c2 in other.terms.items():
                sign = 1
                if n_odd1:
                    # c2 crosses the odd variables of the first factor
                    if (c2.degree() or 0) & 1 and n_odd1 & 1:
                        sign = -sign
                    # then merge odd variable blocks
                    clash = False
                    inv = 0
                    for i in ctx.odd_indices:
                        if e2[i]:
                            if e1[i]:
                                clash = True
                                break
                            for j in ctx.odd_indices:
                                if j > i and e1[j]:
                                    inv += 1
                    if clash:
                        continue
                    if inv & 1:
                        sign = -sign
                else:
                    if any(e1[i] and e2[i] for i in ctx.odd_indices):
                        continue
                ne = tuple(a + b for a, b in zip(e1, e2))
                if not ctx.admits(ne):
                    continue
                nc = c1 * c2
                if sign < 0:
                    nc = nc.scale(neg_one)
                if nc.is_zero():
                    continue
                tot = acc.get(ne)
                tot = nc if tot is None else tot + nc
                if tot.is_zero():
                    acc.pop(ne, None)
                else:
                    acc[ne] = tot
        if self.degree is None or other.degree is None:
            deg = None
        else:
            deg = self.degree + other.degree
        return TruncatedSeries(ctx, deg, acc)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("series exponent must be a nonnegative integer")
        ctx = self.ctx
        if k == 0:
            return TruncatedSeries(ctx, 0, {(0,) * len(ctx.variables): ctx.algebra.one()})
        if ctx.algebra.coeff == "Kn":
            p = ctx.algebra.p
            result = None
            base = self
            while k:
                k, d = divmod(k, p)
                if d:
                    piece = base
                    for _ in range(d - 1):
                        piece = piece * base
                    result = piece if result is None else result * piece
                if k:
                    base = base.frobenius()
            return result
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def frobenius(self):
        """p-th power by the freshman's dream (F_p coefficient algebras only)."""
        ctx = self.ctx
        if ctx.algebra.coeff != "Kn":
            raise ContextError("frobenius requires F_p scalars")
        p = ctx.algebra.p
        acc = {}
        for e, c in self.terms.items():
            if any(e[i] for i in ctx.odd_indices):
                continue
            ne = tuple(x * p for x in e)
            if not ctx.admits(ne):
                continue
            nc = c ** p
            if not nc.is_zero():
                acc[ne] = nc
        deg = None if self.degree is None else p * self.degree
        return TruncatedSeries(ctx, deg, acc)

    def map_coefficients(self, fn, new_algebra=None, new_order=None):
        """Apply fn to every coefficient, optionally moving context."""
        ctx = self.ctx
        if new_algebra is not None or new_order is not None:
            ctx = SeriesContext(new_algebra or ctx.algebra, ctx.variables,
                                new_order or ctx.order)
        acc = {}
        for e, c in self.terms.items():
            if not ctx.admits(e):
                continue
            nc = fn(c)
            if not nc.is_zero():
                acc[e] = nc
        return TruncatedSeries(ctx, self.degree, acc)

    def truncate(self, order):
        ctx = SeriesContext(self.ctx.algebra, self.ctx.variables, order)
        return TruncatedSeries(
            ctx, self.degree, {e: c for e, c in self.terms.items() if ctx.admits(e)})

    def has_constant_term(self):
        z = (0,) * len(self.ctx.variables)
        return z in self.terms

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if self.ctx != other.ctx:
            return False
        if self.terms != other.terms:
            return False
        if self.is_zero() or other.is_zero():
            return True
        if self.degree is None or other.degree is None:
            return True
        return self.degree == other.degree

    def __hash__(self):
        return hash((self.ctx, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        return render_series(self)


def compose(outer, subst):
    """Substitute series for variables: an algebra map on the variable side.

    subst maps every variable name of outer's context to a series in one
    common target context whose truncation order does not exceed the outer
    order.  Substituted series must be degree-matching and have no constant
    term, so composition respects truncation ideals.
    """
    octx = outer.ctx
    values = []
    tctx = None
    for var in octx.variables:
        if var.name not in subst:
            raise ContextError("no substitution for variable %r" % (var.name,))
        s = subst[var.name]
        if tctx is None:
            tctx = s.ctx
        elif s.ctx != tctx:
            raise ContextError("substituted series live in different contexts")
        if s.has_constant_term():
            raise ContextError("substituted series must have zero constant term")
        if not s.is_zero() and s.degree is not None and s.degree != var.degree:
            raise DegreeError(
                "substitution for %r must have degree %d" % (var.name, var.degree))
        values.append(s)
    if tctx is None:
        tctx = octx
    if tctx.algebra != octx.algebra:
        raise ContextError("composition across coefficient algebras")
    if tctx.order > octx.order:
        raise ContextError(
            "target order %d exceeds outer order %d" % (tctx.order, octx.order))
    pow_cache = [dict() for _ in values]
    out = tctx.zero(outer.degree)
    for exps, c in sorted(outer.terms.items()):
        piece = None
        for i, e in enumerate(exps):
            if not e:
                continue
            pw = _cached_pow(values[i], e, pow_cache[i])
            piece = pw if piece is None else piece * pw
        if piece is None:
            piece = TruncatedSeries(
                tctx, 0, {(0,) * len(tctx.variables): tctx.algebra.one()})
        piece = piece.scale(c)
        if outer.degree is None:
            piece = TruncatedSeries(tctx, None, piece.terms)
        out = out + piece
    return out


def _cached_pow(s, e, cache):
    if e == 1:
        return s
    got = cache.get(e)
    if got is not None:
        return got
    below = [k for k in cache if k < e]
    if below:
        k = max(below)
        got = cache[k] * _cached_pow(s, e - k, cache)
    else:
        got = s ** e
    cache[e] = got
    return got


def compositional_inverse(f):
    """Inverse under substitution of a strict one-variable even series.

    Fixed-point iteration on g = x - (higher terms of f)(g); each pass fixes
    at least one more order, and the loop stops at stability, which also
    certifies compose(f, x -> g) = x to the context order.
    """
    ctx = f.ctx
    if len(ctx.variables) != 1 or ctx.variables[0].parity:
        raise ContextError("compositional inverse needs one even variable")
    name = ctx.variables[0].name
    x = ctx.variable(name)
    one = ctx.algebra.one()
    if f.coefficient((1,)) != one or f.has_constant_term():
        raise ContextError("series must be strict: f = x + higher order")
    higher = f - x
    g = x
    for _ in range(ctx.order + 1):
        correction = compose(higher, {name: g})
        g_new = x - correction
        if g_new == g:
            break
        g = g_new
    else:
        raise ContextError("compositional inverse did not stabilize")
    return g


def render_series(s):
    if not s.terms:
        return "0"
    parts = []
    for exps, c in sorted(s.terms.items(), key=lambda t: (sum(t[0]), t[0])):
        factors = []
        cs = render_poly(c)
        if cs != "1" or not any(exps):
            if " + " in cs:
                factors.append("(%s)" % cs)
            else:
                factors.append(cs)
        for e, var in zip(exps, s.ctx.variables):
            if e == 1:
                factors.append(var.name)
            elif e:
                factors.append("%s^%d" % (var.name, e))
        parts.append("*".join(factors))
    return " + ".join(parts)


def series_to_json(s):
    return {
        "degree": s.degree,
        "order": s.ctx.order,
        "variables": [[v.name, v.degree] for v in s.ctx.variables],
        "terms": {
            ",".join(map(str, e)): render_poly(c)
            for e, c in sorted(s.terms.items())
        },
    }


def series_from_json(ctx, data):
    if data.get("order") != ctx.order:
        raise ContextError("series JSON order mismatch")
    names = [v[0] for v in data.get("variables", [])]
    if names != [v.name for v in ctx.variables]:
        raise ContextError("series JSON variable mismatch")
    terms = {}
    for key, poly in data["terms"].items():
        exps = tuple(int(t) for t in key.split(","))
        terms[exps] = parse_poly(ctx.algebra, poly)
    deg = data.get("degree")
    return ctx.from_terms(deg, terms, check=deg is not None)


def parse_series(ctx, text, line_no=0):
    """Parse an ASCII series like 'x + 2*a*x^3' in the given context.

    Factors may mix coefficient names and variables; written order of odd
    symbols is honored, so 'tau0*eps' and 'eps*tau0' differ by sign.
    """
    tokens = _tokenize(text, line_no)
    if not tokens:
        raise PresentationError("empty series", line_no, 1)
    alg = ctx.algebra
    out = ctx.zero(0)
    i = 0

    def take():
        nonlocal i
        tok = tokens[i] if i < len(tokens) else (None, None, None)
        i += 1
        return tok

    def peek():
        return tokens[i] if i < len(tokens) else (None, None, None)

    sign = 1
    while True:
        # one term: '*'-joined factors
        scal = sign
        vexp = 0
        pieces = []          # coefficient elements in written order
        vexps = [0] * len(ctx.variables)
        odd_written = []     # parity-carrying symbols in written order
        expect = True
        while expect:
            kind, val, col = take()
            if kind == "op" and val == "-":
                scal = -scal
                continue
            if kind == "int":
                num = int(val)
                k2, v2, _ = peek()
                if k2 == "op" and v2 == "/":
                    take()
                    k3, v3, c3 = take()
                    if k3 != "int":
                        raise PresentationError("expected integer denominator", line_no, c3)
                    scal = scal * mpq(num, int(v3))
                else:
                    scal *= num
            elif kind == "name":
                exp = 1
                k2, v2, _ = peek()
                if k2 == "op" and v2 == "^":
                    take()
                    k3, v3, c3 = take()
                    neg = False
                    if k3 == "op" and v3 == "-":
                        neg = True
                        k3, v3, c3 = take()
                    if k3 != "int":
                        raise PresentationError("expected integer exponent", line_no, c3)
                    exp = -int(v3) if neg else int(v3)
                if val == "v":
                    vexp += exp
                elif val in ctx.var_index:
                    vi = ctx.var_index[val]
                    if exp < 0:
                        raise PresentationError("negative variable exponent", line_no, col)
                    vexps[vi] += exp
                    if ctx.variables[vi].parity and exp:
                        odd_written.append(("var", vi, exp))
                elif val in alg.gen_index:
                    gi = alg.gen_index[val]
                    if exp < 0:
                        raise PresentationError("negative generator exponent", line_no, col)
                    pieces.append(normalize(alg, [(1, 0, [(gi, exp)])]))
                    if alg.generators[gi].parity and exp:
                        odd_written.append(("coeff", gi, exp))
                else:
                    raise PresentationError("unknown name %r" % (val,), line_no, col)
            elif kind == "lparen":
                # parenthesized coefficient group; homogeneity of the series
                # term forces it to carry one parity, so the Koszul cost of
                # odd variables written before it is well defined
                depth = 1
                sub = []
                while True:
                    k2, v2, c2 = take()
                    if k2 is None:
                        raise PresentationError("unbalanced '('", line_no, col)
                    if k2 == "lparen":
                        depth += 1
                    elif k2 == "rparen":
                        depth -= 1
                        if not depth:
                            break
                    sub.append((k2, v2, c2))
                exp = 1
                k2, v2, _ = peek()
                if k2 == "op" and v2 == "^":
                    take()
                    k3, v3, c3 = take()
                    if k3 != "int":
                        raise PresentationError("expected integer exponent", line_no, c3)
                    exp = int(v3)
                group = _PolyParser(alg, sub, line_no).parse() ** exp
                pieces.append(group)
                try:
                    parity = (group.degree() or 0) & 1
                except DegreeError:
                    raise PresentationError(
                        "parenthesized group must be homogeneous", line_no, col)
                if parity:
                    odd_written.append(("coeff", -1, 1))
            else:
                raise PresentationError("expected a factor", line_no, col or 1)
            kind, val, col = peek()
            if kind == "op" and val == "*":
                take()
            else:
                expect = False
        # Koszul: move all coefficient symbols to the left of the variables,
        # then sort the odd variables into context order
        kos = 1
        seen_odd_vars = 0
        odd_var_seq = []
        for tag, idx, exp in odd_written:
            if tag == "var":
                seen_odd_vars += exp
                odd_var_seq.extend([idx] * exp)
            else:
                if (seen_odd_vars * exp) & 1:
                    kos = -kos
        dead = len(odd_var_seq) != len(set(odd_var_seq))
        for a in range(len(odd_var_seq)):
            for b in range(a + 1, len(odd_var_seq)):
                if odd_var_seq[a] > odd_var_seq[b]:
                    kos = -kos
        coeff = normalize(alg, [(scal * kos, vexp, [])])
        for piece in pieces:
            coeff = coeff * piece
        if not dead:
            term = ctx.term(coeff, tuple(vexps))
            out = out + term
        kind, val, col = peek()
        if kind is None:
            break
        if kind == "op" and val in "+-":
            take()
            sign = -1 if val == "-" else 1
        else:
            raise PresentationError("expected '+' or '-'", line_no, col)
    return out
