"""Graded-commutative presented algebras with exact scalars.

Everything downstream (truncated series, formal group laws, Hopf structure)
works over the algebras defined here: finitely presented graded-commutative
algebras over F_p or over the rationals, with one distinguished invertible
even element v carried as a Laurent exponent on every monomial rather than
as a generator.  Odd generators anticommute and square to zero; rewriting
rules cap single-generator powers.  All arithmetic is exact.
"""

import itertools
import re
from dataclasses import dataclass
from operator import add

from gmpy2 import mpq


class KncoopError(Exception):
    pass


class PresentationError(KncoopError):
    """Parse or construction error, with 1-based line/column when known."""

    def __init__(self, msg, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            msg = "line %d, col %d: %s" % (line, col if col is not None else 0, msg)
        super().__init__(msg)


class DegreeError(KncoopError):
    pass


class ContextError(KncoopError):
    """Operands belong to different algebras or series contexts."""


class EnumerationError(KncoopError):
    pass


class PIntegralityError(KncoopError):
    pass


_SMALL_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31)


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int

    @property
    def parity(self):
        return self.degree & 1


class AlgebraPresentation:
    """A graded-commutative algebra given by generators and rewriting rules.

    coeff is one of "Kn" (scalars F_p, v invertible, Laurent exponents),
    "Zp" (p-integral rationals, v exponent >= 0) or "Q" (rationals,
    v exponent >= 0).  Monomials are stored as (v exponent, generator
    exponent tuple) with generators in declaration order; odd generators
    carry exponent at most 1.  Each rewriting rule caps a power of a single
    even generator and may only mention that generator again (with a strictly
    smaller exponent), which makes reduction obviously terminating.
    """

    def __init__(self, p, n, coeff, generators, arity=1):
        if p not in _SMALL_PRIMES:
            raise PresentationError("p must be a small odd prime, got %r" % (p,))
        if n < 1:
            raise PresentationError("height n must be >= 1")
        if coeff not in ("Kn", "Zp", "Q"):
            raise PresentationError("unknown coefficient ring %r" % (coeff,))
        self.p = p
        self.n = n
        self.coeff = coeff
        self.generators = tuple(generators)
        self.arity = arity
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise PresentationError("duplicate generator name")
        if "v" in names:
            raise PresentationError("'v' is reserved for the distinguished element")
        self.gen_index = {g.name: i for i, g in enumerate(self.generators)}
        self.ngens = len(self.generators)
        self.v_degree = -2 * (p ** n - 1)
        self.odd_indices = tuple(i for i, g in enumerate(self.generators) if g.parity)
        # gidx -> (threshold, ((scalar, dv, dexp_on_g), ...))
        self.rules = {}
        self._reduce_cache = {}
        self._zero_exps = (0,) * self.ngens

    # -- construction ------------------------------------------------------

    @classmethod
    def build(cls, p, n, coeff, gens, rels=()):
        """gens: iterable of (name, degree); rels: iterable of (lhs, rhs) strings.

        Relation strings look like ("t1^9", "v^2*t1") or ("e^2", "0").
        """
        A = cls(p, n, coeff, [GeneratorSpec(nm, d) for nm, d in gens])
        for lhs, rhs in rels:
            m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_]*'*)\s*\^\s*(\d+)\s*", lhs)
            if not m:
                raise PresentationError("relation LHS must be name^power: %r" % (lhs,))
            A.add_rule(m.group(1), int(m.group(2)), parse_poly(A, rhs))
        return A

    def add_rule(self, gen_name, power, replacement):
        if gen_name not in self.gen_index:
            raise PresentationError("relation on unknown generator %r" % (gen_name,))
        g = self.gen_index[gen_name]
        spec = self.generators[g]
        if spec.parity:
            raise PresentationError(
                "odd generator %r squares to zero implicitly; no explicit rule allowed"
                % (gen_name,))
        if power < 2:
            raise PresentationError("relation power must be >= 2")
        if g in self.rules:
            raise PresentationError("second relation on generator %r" % (gen_name,))
        want = power * spec.degree
        terms = []
        for (dv, dexps), s in replacement.terms.items():
            for j, e in enumerate(dexps):
                if e and j != g:
                    raise PresentationError(
                        "rule replacement may only involve %r itself" % (gen_name,))
            if dexps[g] >= power:
                raise PresentationError("rule replacement does not lower the exponent")
            d = dv * self.v_degree + dexps[g] * spec.degree
            if d != want:
                raise DegreeError(
                    "rule for %s^%d is not homogeneous of degree %d" % (gen_name, power, want))
            terms.append((s, dv, dexps[g]))
        self.rules[g] = (power, tuple(terms))
        self._reduce_cache.clear()

    # -- scalar helpers ----------------------------------------------------

    def scalar_of(self, value):
        """Coerce an int or rational into this algebra's scalar domain."""
        if self.coeff == "Kn":
            if isinstance(value, int):
                return value % self.p
            value = mpq(value)
            den = int(value.denominator)
            if den % self.p == 0:
                raise PIntegralityError("denominator divisible by p=%d" % self.p)
            return int(value.numerator) * pow(den, -1, self.p) % self.p
        q = mpq(value)
        if self.coeff == "Zp" and int(q.denominator) % self.p == 0:
            raise PIntegralityError(
                "scalar %s is not p-integral at p=%d" % (q, self.p))
        return q

    def _scalar_is_unit_one(self, s):
        return s == 1

    # -- element constructors ---------------------------------------------

    def zero(self):
        return AlgebraElement(self, {})

    def one(self):
        return self.scalar(1)

    def scalar(self, value, vexp=0):
        s = self.scalar_of(value)
        if s == 0:
            return self.zero()
        self._check_vexp(vexp)
        return AlgebraElement(self, {(vexp, self._zero_exps): s})

    def v(self, k=1):
        return self.scalar(1, vexp=k)

    def gen(self, name):
        if name not in self.gen_index:
            raise ContextError("no generator %r in this algebra" % (name,))
        exps = list(self._zero_exps)
        exps[self.gen_index[name]] = 1
        return AlgebraElement(self, {(0, tuple(exps)): self.scalar_of(1)})

    def from_terms(self, raw_terms):
        """Normalize raw (scalar, vexp, [(gen index, exp), ...]) terms."""
        return normalize(self, raw_terms)

    def _check_vexp(self, vexp):
        if vexp < 0 and self.coeff != "Kn":
            raise PresentationError(
                "negative v exponent requires the K(n)_* coefficient ring")

    # -- monomial utilities ------------------------------------------------

    def monomial_degree(self, mono):
        vexp, exps = mono
        d = vexp * self.v_degree
        for e, g in zip(exps, self.generators):
            if e:
                d += e * g.degree
        return d

    def monomial_parity(self, exps):
        s = 0
        for i in self.odd_indices:
            s += exps[i]
        return s & 1

    def _reduce_monomial(self, vexp, exps):
        """Rewrite (vexp, exps) into admissible form: list of (scalar, monomial)."""
        for i in self.odd_indices:
            if exps[i] > 1:
                return []
        cached = self._reduce_cache.get(exps)
        if cached is None:
            cached = self._reduce_exps(exps)
            self._reduce_cache[exps] = cached
        return [(s, (vexp + dv, rexps)) for s, dv, rexps in cached]

    def _reduce_exps(self, exps):
        out = []
        stack = [(self.scalar_of(1), 0, exps)]
        while stack:
            s, dv, e = stack.pop()
            for g, (threshold, reps) in self.rules.items():
                if e[g] >= threshold:
                    rest = e[g] - threshold
                    for rs, rdv, rexp in reps:
                        ne = list(e)
                        ne[g] = rest + rexp
                        s2 = self._smul(s, rs)
                        if s2 != 0:
                            stack.append((s2, dv + rdv, tuple(ne)))
                    break
            else:
                out.append((s, dv, e))
        # merge duplicates
        acc = {}
        for s, dv, e in out:
            key = (dv, e)
            acc[key] = self._sadd(acc.get(key, 0), s)
        return tuple((s, dv, e) for (dv, e), s in sorted(acc.items()) if s != 0)

    def _smul(self, a, b):
        if self.coeff == "Kn":
            return (a * b) % self.p
        return a * b

    def _sadd(self, a, b):
        if self.coeff == "Kn":
            return (a + b) % self.p
        return a + b

    # -- comparison --------------------------------------------------------

    def _key(self):
        rules = tuple(sorted((g, t, reps) for g, (t, reps) in self.rules.items()))
        return (self.p, self.n, self.coeff,
                tuple((g.name, g.degree) for g in self.generators), rules)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, AlgebraPresentation):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return "<algebra p=%d n=%d %s gens=%s>" % (
            self.p, self.n, self.coeff, ",".join(g.name for g in self.generators))


def coefficient_algebra(p, n, coeff="Kn"):
    """The generator-free base: F_p[v,v^-1] (or Q[v] / Z_(p)[v])."""
    return AlgebraPresentation.build(p, n, coeff, [])


# -- normalization and arithmetic ------------------------------------------

def _ordered_sign(alg, factors):
    """Sign from sorting written odd factors into declaration order; None if zero."""
    odd_seq = []
    for g, e in factors:
        if alg.generators[g].parity:
            if e > 1:
                return None, None
            if e == 1:
                odd_seq.append(g)
    sign = 1
    for i in range(len(odd_seq)):
        for j in range(i + 1, len(odd_seq)):
            if odd_seq[i] == odd_seq[j]:
                return None, None
            if odd_seq[i] > odd_seq[j]:
                sign = -sign
    exps = [0] * alg.ngens
    for g, e in factors:
        exps[g] += e
    for i in alg.odd_indices:
        if exps[i] > 1:
            return None, None
    return sign, tuple(exps)


def normalize(alg, raw_terms):
    """Canonicalize raw terms: (scalar, vexp, [(gen index, exponent), ...]).

    Factor lists are taken in written order; moving odd generators into
    declaration order contributes the Koszul sign.
    """
    acc = {}
    for scalar, vexp, factors in raw_terms:
        alg._check_vexp(vexp)
        s = alg.scalar_of(scalar)
        if s == 0:
            continue
        sign, exps = _ordered_sign(alg, factors)
        if sign is None:
            continue
        if sign < 0:
            s = alg._smul(s, alg.scalar_of(-1))
        for rs, mono in alg._reduce_monomial(vexp, exps):
            alg._check_vexp(mono[0])
            s2 = alg._smul(s, rs)
            prev = acc.get(mono)
            if prev is None:
                if s2 != 0:
                    acc[mono] = s2
            else:
                tot = alg._sadd(prev, s2)
                if tot == 0:
                    del acc[mono]
                else:
                    acc[mono] = tot
    return AlgebraElement(alg, acc)


def koszul_sign(alg, exps1, exps2):
    """Sign merging two admissible monomials; 0 when an odd square appears."""
    sign = 1
    inv = 0
    for i in alg.odd_indices:
        if exps2[i]:
            if exps1[i]:
                return 0
            for j in alg.odd_indices:
                if j > i and exps1[j]:
                    inv += 1
    if inv & 1:
        sign = -1
    return sign


class AlgebraElement:
    """A finite scalar combination of admissible monomials."""

    __slots__ = ("alg", "terms", "_hash")

    def __init__(self, alg, terms):
        self.alg = alg
        self.terms = terms
        self._hash = None

    # construction helpers keep terms canonical; arithmetic preserves that.

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Common degree of all monomials; None for zero, error when mixed."""
        d = None
        for mono in self.terms:
            md = self.alg.monomial_degree(mono)
            if d is None:
                d = md
            elif d != md:
                raise DegreeError("element is not homogeneous: %s" % (self,))
        return d

    def is_homogeneous(self):
        try:
            self.degree()
            return True
        except DegreeError:
            return False

    def parity(self):
        d = self.degree()
        return 0 if d is None else d & 1

    def _require_same(self, other):
        if self.alg != other.alg:
            raise ContextError("elements live in different algebras")

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._require_same(other)
        alg = self.alg
        acc = dict(self.terms)
        for mono, s in other.terms.items():
            prev = acc.get(mono)
            if prev is None:
                acc[mono] = s
            else:
                tot = alg._sadd(prev, s)
                if tot == 0:
                    del acc[mono]
                else:
                    acc[mono] = tot
        return AlgebraElement(alg, acc)

    def __neg__(self):
        alg = self.alg
        minus = alg.scalar_of(-1)
        return AlgebraElement(alg, {m: alg._smul(minus, s) for m, s in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, value, vexp=0):
        """Multiply by scalar * v^vexp."""
        alg = self.alg
        s0 = alg.scalar_of(value)
        if s0 == 0:
            return alg.zero()
        acc = {}
        for (mv, me), s in self.terms.items():
            alg._check_vexp(mv + vexp)
            acc[(mv + vexp, me)] = alg._smul(s0, s)
        return AlgebraElement(alg, acc)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._require_same(other)
        alg = self.alg
        p = alg.p
        modp = alg.coeff == "Kn"
        odd_idx = alg.odd_indices
        reduce_cache = alg._reduce_cache
        reduce_exps = alg._reduce_exps
        acc = {}

        def packed(terms):
            if not odd_idx:
                return [(v, e, s, 0) for (v, e), s in terms.items()]
            out = []
            for (v, e), s in terms.items():
                b = 0
                for i in odd_idx:
                    if e[i]:
                        b |= 1 << i
                out.append((v, e, s, b))
            return out

        left = packed(self.terms)
        right = packed(other.terms)
        for v1, e1, s1, b1 in left:
            for v2, e2, s2, b2 in right:
                if b1 & b2:
                    continue  # squared odd factor
                s = s1 * s2
                if b1 and b2:
                    # crossings: bits of b1 above each bit of b2
                    inv = 0
                    bb = b2
                    while bb:
                        low = bb & -bb
                        inv += (b1 >> low.bit_length()).bit_count()
                        bb ^= low
                    if inv & 1:
                        s = -s
                if modp:
                    s %= p
                    if s == 0:
                        continue
                exps = tuple(map(add, e1, e2))
                v = v1 + v2
                cached = reduce_cache.get(exps)
                if cached is None:
                    cached = reduce_exps(exps)
                    reduce_cache[exps] = cached
                for rs, dv, rexps in cached:
                    mono = (v + dv, rexps)
                    s3 = s * rs
                    if modp:
                        s3 %= p
                    prev = acc.get(mono)
                    if prev is None:
                        if s3 != 0:
                            acc[mono] = s3
                    else:
                        tot = prev + s3
                        if modp:
                            tot %= p
                        if tot == 0:
                            del acc[mono]
                        else:
                            acc[mono] = tot
        for mono in acc:
            alg._check_vexp(mono[0])
        return AlgebraElement(alg, acc)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def frobenius(self):
        """p-th power via the freshman's dream; only over F_p scalars."""
        alg = self.alg
        if alg.coeff != "Kn":
            raise ContextError("frobenius requires F_p scalars")
        p = alg.p
        acc = {}
        for (mv, me), s in self.terms.items():
            if any(me[i] for i in alg.odd_indices):
                continue  # odd factors die in p-th powers
            exps = tuple(e * p for e in me)
            for rs, mono in alg._reduce_monomial(mv * p, exps):
                s3 = alg._smul(s, rs)  # s^p = s in F_p
                prev = acc.get(mono)
                if prev is None:
                    if s3 != 0:
                        acc[mono] = s3
                else:
                    tot = alg._sadd(prev, s3)
                    if tot == 0:
                        del acc[mono]
                    else:
                        acc[mono] = tot
        return AlgebraElement(alg, acc)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        alg = self.alg
        if k == 0:
            return alg.one()
        if alg.coeff == "Kn":
            # base-p digits: cheap Frobenius strides between small honest powers
            result = None
            base = self
            while k:
                k, d = divmod(k, alg.p)
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

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.alg == other.alg and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.alg, tuple(sorted(self.terms.items(), key=_mono_key))))
        return self._hash

    def sorted_terms(self):
        return sorted(self.terms.items(), key=_mono_key)

    def __repr__(self):
        return render_poly(self)


def _mono_key(item):
    (vexp, exps), _ = item
    return (exps, vexp)


# -- tensor products -------------------------------------------------------

def tensor(A, B):
    """Tensor product over the coefficient ring, generators of A first.

    Right-hand generator names gain one prime per left-hand tensor factor,
    which makes the construction strictly associative on presentations.
    """
    if (A.p, A.n, A.coeff) != (B.p, B.n, B.coeff):
        raise ContextError("tensor factors disagree on (p, n, coefficients)")
    gens = list(A.generators)
    suffix = "'" * A.arity
    for g in B.generators:
        gens.append(GeneratorSpec(g.name + suffix, g.degree))
    T = AlgebraPresentation(A.p, A.n, A.coeff, gens, arity=A.arity + B.arity)
    for g, (threshold, reps) in A.rules.items():
        T.rules[g] = (threshold, reps)
    for g, (threshold, reps) in B.rules.items():
        T.rules[g + A.ngens] = (threshold, reps)
    return T


def embed_left(T, a):
    """A -> A (x) B on the first factor."""
    pad = (0,) * (T.ngens - a.alg.ngens)
    terms = {(v, e + pad): s for (v, e), s in a.terms.items()}
    return AlgebraElement(T, terms)


def embed_right(T, b, left_ngens):
    pad = (0,) * left_ngens
    terms = {(v, pad + e): s for (v, e), s in b.terms.items()}
    return AlgebraElement(T, terms)


def tensor_pair(T, a, b, left_ngens=None):
    """The element a (x) b.  No sign: left factors precede right factors."""
    if left_ngens is None:
        left_ngens = a.alg.ngens
    acc = {}
    npad = T.ngens - left_ngens
    for (v1, e1), s1 in a.terms.items():
        if len(e1) != left_ngens:
            raise ContextError("left factor size mismatch")
        for (v2, e2), s2 in b.terms.items():
            if len(e2) != npad:
                raise ContextError("right factor size mismatch")
            mono = (v1 + v2, e1 + e2)
            s = T._smul(s1, s2)
            prev = acc.get(mono)
            acc[mono] = T._sadd(prev, s) if prev is not None else s
    return AlgebraElement(T, {m: s for m, s in acc.items() if s != 0})


def split_terms(elem, left_ngens):
    """Iterate (scalar, vexp, left exps, right exps) over a tensor element."""
    for (v, e), s in elem.terms.items():
        yield s, v, e[:left_ngens], e[left_ngens:]


def flip_tensor(elem, left_ngens):
    """Swap the two tensor factors with the Koszul sign.

    Only meaningful when both factors are the same algebra, so the element
    stays in the same presentation.
    """
    T = elem.alg
    if 2 * left_ngens != T.ngens:
        raise ContextError("flip needs equal factors")
    left_odd = [i for i in T.odd_indices if i < left_ngens]
    right_odd = [i for i in T.odd_indices if i >= left_ngens]
    acc = {}
    for (v, e), s in elem.terms.items():
        pl = sum(e[i] for i in left_odd) & 1
        pr = sum(e[i] for i in right_odd) & 1
        mono = (v, e[left_ngens:] + e[:left_ngens])
        if pl and pr:
            s = T._smul(s, T.scalar_of(-1))
        prev = acc.get(mono)
        acc[mono] = T._sadd(prev, s) if prev is not None else s
    return AlgebraElement(T, {m: s for m, s in acc.items() if s != 0})


# -- homomorphisms ---------------------------------------------------------

class AlgebraHom:
    """Graded algebra map determined by generator images; v maps to v.

    Construction verifies homogeneity of the images and that every rewriting
    rule of the source is respected in the target.  Odd generators square to
    zero automatically on odd-degree images (odd p), so only parity is checked
    for them.
    """

    def __init__(self, source, target, images, check=True):
        if (source.p, source.n) != (target.p, target.n):
            raise ContextError("hom endpoints disagree on (p, n)")
        self.source = source
        self.target = target
        self.images = {}
        for g in source.generators:
            if g.name not in images:
                raise ContextError("missing image for generator %r" % (g.name,))
            img = images[g.name]
            if img.alg != target:
                raise ContextError("image of %r lives in the wrong algebra" % (g.name,))
            if not img.is_zero() and img.degree() != g.degree:
                raise DegreeError(
                    "image of %s must have degree %d" % (g.name, g.degree))
            self.images[g.name] = img
        self._pow_cache = {}
        if check:
            bad = self.broken_relations()
            if bad:
                raise PresentationError(
                    "images violate relations on: %s" % ", ".join(bad))

    def broken_relations(self):
        out = []
        for g, (threshold, reps) in self.source.rules.items():
            name = self.source.generators[g].name
            img = self.images[name]
            lhs = img ** threshold
            rhs = self.target.zero()
            for s, dv, rexp in reps:
                piece = (img ** rexp).scale(s, vexp=dv)
                rhs = rhs + piece
            if lhs != rhs:
                out.append(name)
        return out

    def _img_pow(self, gidx, e):
        key = (gidx, e)
        got = self._pow_cache.get(key)
        if got is None:
            name = self.source.generators[gidx].name
            got = self.images[name] ** e
            self._pow_cache[key] = got
        return got

    def apply(self, elem):
        if elem.alg != self.source:
            raise ContextError("element not in the hom's source")
        target = self.target
        out = target.zero()
        for (v, e), s in elem.terms.items():
            piece = target.scalar(1, vexp=v)
            for gidx, exp in enumerate(e):
                if exp:
                    piece = piece * self._img_pow(gidx, exp)
            out = out + piece.scale(s)
        return out

    def __call__(self, elem):
        return self.apply(elem)


def identity_hom(A):
    return AlgebraHom(A, A, {g.name: A.gen(g.name) for g in A.generators}, check=False)


def tensor_hom(f, g, T_source=None, T_target=None):
    """f (x) g on tensor presentations."""
    if T_source is None:
        T_source = tensor(f.source, g.source)
    if T_target is None:
        T_target = tensor(f.target, g.target)
    images = {}
    kt = f.target.ngens
    for gen in f.source.generators:
        images[gen.name] = embed_left(T_target, f.images[gen.name])
    suffix = "'" * f.source.arity
    for gen in g.source.generators:
        images[gen.name + suffix] = embed_right(T_target, g.images[gen.name], kt)
    return AlgebraHom(T_source, T_target, images, check=False)


# -- degreewise bases and hom enumeration ----------------------------------

def degree_basis(R, d, per_degree_basis_bound=4096):
    """Admissible monomials of degree d, sorted; error when not finite."""
    ranges = []
    for i, g in enumerate(R.generators):
        if g.parity:
            ranges.append(range(2))
        elif i in R.rules:
            ranges.append(range(R.rules[i][0]))
        elif R.coeff != "Kn" and g.degree < 0:
            ranges.append(range(0, abs(d) // abs(g.degree) + 1 if d <= 0 else 1))
        else:
            raise EnumerationError(
                "degree component is not finite: generator %r has no cap" % (g.name,))
    out = []
    for exps in itertools.product(*ranges):
        partial = sum(e * g.degree for e, g in zip(exps, R.generators))
        rem = d - partial
        if rem % R.v_degree:
            continue
        vexp = rem // R.v_degree
        if vexp < 0 and R.coeff != "Kn":
            continue
        out.append((vexp, exps))
        if len(out) > per_degree_basis_bound:
            raise EnumerationError(
                "degree-%d component exceeds basis bound %d" % (d, per_degree_basis_bound))
    out.sort(key=lambda m: (m[1], m[0]))
    return out


def degree_component(R, d, per_degree_basis_bound=4096, max_elements=4096):
    """Every element of the degree-d component (finite only over F_p)."""
    if R.coeff != "Kn":
        raise EnumerationError("component enumeration needs F_p scalars")
    basis = degree_basis(R, d, per_degree_basis_bound)
    if R.p ** len(basis) > max_elements:
        raise EnumerationError(
            "degree-%d component has %d basis monomials; refusing to enumerate p^%d elements"
            % (d, len(basis), len(basis)))
    out = []
    for coeffs in itertools.product(range(R.p), repeat=len(basis)):
        terms = {m: c for m, c in zip(basis, coeffs) if c}
        out.append(AlgebraElement(R, terms))
    return out


def enumerate_homs(A, R, per_degree_basis_bound=4096, max_homs=100000):
    """All graded algebra maps A -> R, in a deterministic order."""
    choices = []
    total = 1
    for g in A.generators:
        cands = degree_component(R, g.degree, per_degree_basis_bound)
        choices.append(cands)
        total *= len(cands)
        if total > max_homs:
            raise EnumerationError("more than %d candidate assignments" % (max_homs,))
    out = []
    names = [g.name for g in A.generators]
    for assignment in itertools.product(*choices):
        images = dict(zip(names, assignment))
        try:
            out.append(AlgebraHom(A, R, images))
        except PresentationError:
            continue
    return out


# -- parsing ---------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*'*)
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<op>[\^*+\-/])
""", re.VERBOSE)


def _tokenize(text, line_no):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise PresentationError("unexpected character %r" % text[pos], line_no, pos + 1)
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    return out


class _PolyParser:
    def __init__(self, alg, tokens, line_no):
        self.alg = alg
        self.toks = tokens
        self.i = 0
        self.line = line_no

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def fail(self, msg, col):
        raise PresentationError(msg, self.line, col)

    def parse(self):
        raw = self.polynomial()
        kind, val, col = self.peek()
        if kind is not None:
            self.fail("expected '+' or '-', got %r" % val, col)
        return normalize(self.alg, raw)

    def polynomial(self):
        raw = list(self.term(1))
        while True:
            kind, val, col = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                raw.extend(self.term(-1 if val == "-" else 1))
            else:
                break
        return raw

    def term(self, sign):
        # a term is a list of raw monomials: parenthesized sums distribute
        acc = [(mpq(sign), 0, [])]
        expect_factor = True
        while expect_factor:
            kind, val, col = self.take()
            if kind == "op" and val == "-":
                acc = [(-c, v, f) for c, v, f in acc]
                continue
            if kind == "int":
                num = mpq(val)
                k2, v2, _ = self.peek()
                if k2 == "op" and v2 == "/":
                    self.take()
                    k3, v3, c3 = self.take()
                    if k3 != "int":
                        self.fail("expected integer denominator", c3)
                    num = num / mpq(v3)
                acc = [(c * num, v, f) for c, v, f in acc]
            elif kind == "name":
                exp = 1
                k2, v2, _ = self.peek()
                if k2 == "op" and v2 == "^":
                    self.take()
                    exp = self.exponent()
                if val == "v":
                    acc = [(c, v + exp, f) for c, v, f in acc]
                else:
                    gidx = self.alg.gen_index.get(val)
                    if gidx is None:
                        self.fail("unknown name %r" % val, col)
                    if exp < 0:
                        self.fail("negative exponent on generator %r" % val, col)
                    acc = [(c, v, f + [(gidx, exp)]) for c, v, f in acc]
            elif kind == "lparen":
                sub = self.polynomial()
                k2, v2, c2 = self.take()
                if k2 != "rparen":
                    self.fail("expected ')'", c2 if c2 else 1)
                k2, v2, c2 = self.peek()
                if k2 == "op" and v2 == "^":
                    self.take()
                    exp = self.exponent()
                    if exp < 0:
                        self.fail("negative exponent on a group", c2)
                    power = [(mpq(1), 0, [])]
                    for _ in range(exp):
                        power = [(ca * cb, va + vb, fa + fb)
                                 for ca, va, fa in power
                                 for cb, vb, fb in sub]
                    sub = power
                acc = [(c * c2_, v + v2_, f + f2_)
                       for c, v, f in acc for c2_, v2_, f2_ in sub]
            else:
                self.fail("expected a factor", col if col else 1)
            kind, val, col = self.peek()
            if kind == "op" and val == "*":
                self.take()
                expect_factor = True
            else:
                expect_factor = False
        return acc

    def exponent(self):
        kind, val, col = self.take()
        neg = False
        if kind == "op" and val == "-":
            neg = True
            kind, val, col = self.take()
        if kind != "int":
            self.fail("expected an integer exponent", col)
        e = int(val)
        return -e if neg else e


def parse_poly(alg, text, line_no=0):
    tokens = _tokenize(text, line_no)
    if not tokens:
        raise PresentationError("empty polynomial", line_no, 1)
    return _PolyParser(alg, tokens, line_no).parse()


def _render_scalar(alg, s):
    return str(s)


def render_poly(elem):
    if not elem.terms:
        return "0"
    alg = elem.alg
    parts = []
    for (vexp, exps), s in elem.sorted_terms():
        factors = []
        if s != 1 or (vexp == 0 and not any(exps)):
            factors.append(_render_scalar(alg, s))
        if vexp == 1:
            factors.append("v")
        elif vexp:
            factors.append("v^%d" % vexp)
        for e, g in zip(exps, alg.generators):
            if e == 1:
                factors.append(g.name)
            elif e:
                factors.append("%s^%d" % (g.name, e))
        parts.append("*".join(factors))
    return " + ".join(parts)


def parse_presentation(text, source="<string>"):
    """Parse the line-oriented presentation format into an algebra.

    Directives: 'prime P', 'height N', 'coeff Kn|Zp|Q', 'gen NAME deg D',
    'rel MONO -> POLY'.  '#' starts a comment.
    """
    p = n = None
    coeff = None
    gens = []
    rels = []
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split(None, 1)
        head, rest = fields[0], (fields[1] if len(fields) > 1 else "")
        if head == "prime":
            p = _parse_int(rest, line_no, "prime")
        elif head == "height":
            n = _parse_int(rest, line_no, "height")
        elif head == "coeff":
            coeff = rest.strip()
        elif head == "gen":
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s+deg\s+(-?\d+)", rest.strip())
            if not m:
                raise PresentationError("expected 'gen NAME deg D'", line_no, 1)
            gens.append((m.group(1), int(m.group(2))))
        elif head == "rel":
            if "->" not in rest:
                raise PresentationError("expected 'rel MONO -> POLY'", line_no, 1)
            lhs, rhs = rest.split("->", 1)
            rels.append((lhs.strip(), rhs.strip(), line_no))
        else:
            raise PresentationError("unknown directive %r" % head, line_no, 1)
    if p is None or n is None or coeff is None:
        raise PresentationError("prime, height and coeff are all required", 1, 1)
    try:
        A = AlgebraPresentation(p, n, coeff, [GeneratorSpec(nm, d) for nm, d in gens])
    except PresentationError:
        raise
    for lhs, rhs, line_no in rels:
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*'*)\s*\^\s*(\d+)", lhs)
        if not m:
            raise PresentationError("relation LHS must be name^power", line_no, 1)
        try:
            A.add_rule(m.group(1), int(m.group(2)), parse_poly(A, rhs, line_no))
        except KncoopError as exc:
            if isinstance(exc, PresentationError) and exc.line is not None:
                raise
            raise PresentationError(str(exc), line_no, 1) from exc
    return A


def _parse_int(text, line_no, what):
    try:
        return int(text.strip())
    except ValueError:
        raise PresentationError("bad %s value %r" % (what, text), line_no, 1) from None


def load_presentation(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_presentation(fh.read(), source=str(path))
