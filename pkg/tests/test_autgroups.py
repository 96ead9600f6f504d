import random

import pytest

from kncoop.galgebra import AlgebraPresentation, coefficient_algebra
from kncoop.series import SeriesContext, VariableSpec, compose
from kncoop.fgl import honda
from kncoop.autgroups import (
    QuasiStrictAutGA,
    StrictAutGa,
    StrictAutHn,
    alpha,
    beta,
    ga2_identity,
    ga_identity,
    hn_identity,
    hn_is_automorphism,
    hn_v_commutation,
    is_additive,
    is_additive_pair,
    random_ga2_aut,
    random_ga_aut,
    random_hn_aut,
)


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("KNCOOP_CACHE_DIR", str(tmp_path / "cache"))


def sigma_window(p, n, m):
    """F_p[v^pm][t_1..t_m] with t_i^{p^n} = v^{p^i-1} t_i."""
    gens = [("t%d" % i, -2 * (p ** i - 1)) for i in range(1, m + 1)]
    rels = [("t%d^%d" % (i, p ** n), "v^%d*t%d" % (p ** i - 1, i))
            for i in range(1, m + 1)]
    return AlgebraPresentation.build(p, n, "Kn", gens, rels)


def free_coeffs(p, n, names_degrees):
    return AlgebraPresentation.build(p, n, "Kn", names_degrees)


# ---------------------------------------------------------------- frozen facts

def test_chunk_product_frozen_example():
    # (x + a x^3) * (x + b x^3) = x + (a+b) x^3 + a^3 b x^9 in the n=3 chunk
    R = free_coeffs(3, 3, [("a", -4), ("b", -4)])
    a, b = R.gen("a"), R.gen("b")
    f = StrictAutGa(3, 3, R, {1: a})
    g = StrictAutGa(3, 3, R, {1: b})
    prod = f.multiply(g)
    assert prod.coeffs == {1: a + b, 2: (a ** 3) * b}


def test_tautological_point_is_automorphism():
    # over Sigma-window R the coefficient family (t_1, t_2) passes the
    # two-variable homomorphism test: degrees force the defining relations
    R = sigma_window(3, 1, 2)
    fgl = honda(3, 1, 28, use_cache=False)
    taut = StrictAutHn(fgl, R, {1: R.gen("t1"), 2: R.gen("t2")}, window=2)
    assert taut.satisfies_relations()
    assert hn_is_automorphism(taut)
    assert hn_v_commutation(taut, 28)


def test_degree_valid_but_relation_violating_family_fails_every_check():
    # eps^3 = 0 while v^2*eps is not: the checks must all agree it fails
    R = AlgebraPresentation.build(3, 1, "Kn", [("e", -4)], [("e^2", "0")])
    fgl = honda(3, 1, 28, use_cache=False)
    bad = StrictAutHn(fgl, R, {1: R.gen("e")}, window=1)
    assert not bad.satisfies_relations()
    assert not hn_is_automorphism(bad)
    assert not hn_v_commutation(bad, 10)


def test_hn_identity_and_inverse():
    R = sigma_window(3, 1, 2)
    fgl = honda(3, 1, 28, use_cache=False)
    e = hn_identity(fgl, R, 2)
    f = StrictAutHn(fgl, R, {1: R.gen("t1")}, window=2)
    assert f.multiply(e) == f
    assert e.multiply(f) == f
    finv = f.inverse()
    assert f.multiply(finv) == e
    assert finv.multiply(f) == e


def test_hn_group_axioms_seeded():
    R = sigma_window(3, 1, 2)
    fgl = honda(3, 1, 12, use_cache=False)
    rng = random.Random(5)
    e = hn_identity(fgl, R, 2)
    for trial in range(8):
        f = random_hn_aut(fgl, R, 2, rng)
        g = random_hn_aut(fgl, R, 2, rng)
        h = random_hn_aut(fgl, R, 2, rng)
        assert f.satisfies_relations(), "seed 5 trial %d" % trial
        assert f.multiply(g).multiply(h) == f.multiply(g.multiply(h)), \
            "seed 5 trial %d" % trial
        assert f.multiply(f.inverse()) == e, "seed 5 trial %d" % trial


def test_ga_formula_matches_series_composition_seeded():
    p, n = 3, 3
    R = free_coeffs(p, n, [("a1", -4), ("a2", -16), ("b1", -4), ("b2", -16)])
    rng = random.Random(13)
    ctx = SeriesContext(R, [VariableSpec("x", 2)], p ** n)
    for trial in range(10):
        f = StrictAutGa(p, n, R, {
            1: R.gen("a1").scale(R.scalar_of(rng.randrange(3))),
            2: R.gen("a2").scale(R.scalar_of(rng.randrange(3)))})
        g = StrictAutGa(p, n, R, {
            1: R.gen("b1").scale(R.scalar_of(rng.randrange(3))),
            2: R.gen("b2").scale(R.scalar_of(rng.randrange(3)))})
        prod = f.multiply(g)
        assert prod.series(ctx) == compose(g.series(ctx), {"x": f.series(ctx)}), \
            "seed 13 trial %d" % trial


def test_ga_group_axioms_seeded():
    p, n = 3, 3
    R = sigma_window(p, 2, 2)  # any scalar algebra works for the chunk group
    rng = random.Random(29)
    e = ga_identity(p, n, R)
    for trial in range(10):
        f = random_ga_aut(p, n, R, rng)
        g = random_ga_aut(p, n, R, rng)
        h = random_ga_aut(p, n, R, rng)
        assert f.multiply(g).multiply(h) == f.multiply(g.multiply(h)), \
            "seed 29 trial %d" % trial
        assert f.multiply(f.inverse()) == e, "seed 29 trial %d" % trial
        assert f.inverse().multiply(f) == e, "seed 29 trial %d" % trial


def test_ga2_formula_matches_series_composition_seeded():
    p, n = 3, 2
    R = AlgebraPresentation.build(p, 2, "Kn", [
        ("s0", -1), ("s1", -5), ("u0", -1), ("u1", -5),
        ("c1", -4), ("d1", -4)])
    rng = random.Random(31)
    for trial in range(10):
        f = QuasiStrictAutGA(p, n, R,
                             {0: R.gen("s0").scale(R.scalar_of(rng.randrange(3))),
                              1: R.gen("s1").scale(R.scalar_of(rng.randrange(3)))},
                             {1: R.gen("c1").scale(R.scalar_of(rng.randrange(3)))})
        g = QuasiStrictAutGA(p, n, R,
                             {0: R.gen("u0").scale(R.scalar_of(rng.randrange(3))),
                              1: R.gen("u1").scale(R.scalar_of(rng.randrange(3)))},
                             {1: R.gen("d1").scale(R.scalar_of(rng.randrange(3)))})
        prod = f.multiply(g)
        ctx = f.pair_ctx()
        f1, f2 = f.series_pair(ctx)
        g1, g2 = g.series_pair(ctx)
        p1 = compose(g1, {"eps": f1, "x": f2})
        p2 = compose(g2, {"eps": f1, "x": f2})
        q1, q2 = prod.series_pair(ctx)
        assert (p1, p2) == (q1, q2), "seed 31 trial %d" % trial


def test_ga2_group_axioms_seeded():
    p, n = 3, 2
    R = AlgebraPresentation.build(p, 2, "Kn",
                                  [("s0", -1), ("s1", -5), ("c1", -4)],
                                  [("c1^3", "0")])
    rng = random.Random(37)
    e = ga2_identity(p, n, R)
    for trial in range(12):
        f = random_ga2_aut(p, n, R, rng)
        g = random_ga2_aut(p, n, R, rng)
        h = random_ga2_aut(p, n, R, rng)
        assert f.multiply(g).multiply(h) == f.multiply(g.multiply(h)), \
            "seed 37 trial %d" % trial
        assert f.multiply(f.inverse()) == e, "seed 37 trial %d" % trial
        assert f.inverse().multiply(f) == e, "seed 37 trial %d" % trial
        assert f.multiply(e) == f and e.multiply(f) == f, "seed 37 trial %d" % trial


def test_alpha_is_group_homomorphism_seeded():
    p, n = 3, 2
    R = sigma_window(p, n, 3)
    fgl = honda(p, n, 28, use_cache=False)
    rng = random.Random(43)
    for trial in range(6):
        f = random_hn_aut(fgl, R, 3, rng)
        g = random_hn_aut(fgl, R, 3, rng)
        lhs = alpha(f.multiply(g))
        rhs = alpha(f).multiply(alpha(g))
        assert lhs == rhs, "seed 43 trial %d" % trial


def test_beta_is_group_homomorphism_seeded():
    p, n = 3, 2
    R = AlgebraPresentation.build(p, 2, "Kn",
                                  [("s0", -1), ("s1", -5), ("c1", -4)],
                                  [("c1^3", "0")])
    rng = random.Random(47)
    for trial in range(10):
        f = random_ga2_aut(p, n, R, rng)
        g = random_ga2_aut(p, n, R, rng)
        assert beta(f.multiply(g)) == beta(f).multiply(beta(g)), \
            "seed 47 trial %d" % trial


def test_alpha_drops_high_coefficients():
    p, n = 3, 2
    R = sigma_window(p, n, 3)
    fgl = honda(p, n, 28, use_cache=False)
    f = StrictAutHn(fgl, R, {1: R.gen("t1"), 2: R.gen("t2"), 3: R.gen("t3")},
                    window=3)
    assert alpha(f).coeffs == {1: R.gen("t1")}


def test_additivity_checks():
    R = AlgebraPresentation.build(3, 1, "Kn", [("c", -2)])
    ctx = SeriesContext(R, [VariableSpec("x", 2)], 9)
    good = ctx.from_terms(2, {(1,): R.one(), (3,): R.gen("c") * R.gen("c")})
    assert is_additive(good)
    bad = ctx.from_terms(2, {(1,): R.one(), (2,): R.gen("c")})
    assert not is_additive(bad)


def test_pair_additivity_check():
    p, n = 3, 2
    R = AlgebraPresentation.build(p, 2, "Kn", [("s0", -1), ("c1", -4)])
    f = QuasiStrictAutGA(p, n, R, {0: R.gen("s0")}, {1: R.gen("c1")})
    ctx = f.pair_ctx()
    f1, f2 = f.series_pair(ctx)
    assert is_additive_pair(f1, f2)
    # an eps*x^2 term breaks additivity through the 2*x1*x2 cross product
    broken = f1 + ctx.from_terms(1, {(1, 2): R.gen("c1")})
    assert not is_additive_pair(broken, f2)


def test_frobenius_twist_law_seeded():
    # every relation-satisfying family commutes with v x^{p^n}
    R = sigma_window(3, 1, 2)
    fgl = honda(3, 1, 12, use_cache=False)
    rng = random.Random(53)
    for trial in range(6):
        f = random_hn_aut(fgl, R, 2, rng)
        assert hn_v_commutation(f, 12), "seed 53 trial %d" % trial
