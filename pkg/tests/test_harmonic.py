import math

import numpy as np
import pytest

from coxtree.harmonic import (
    BallFunction,
    ProductTable,
    convolve,
    dense_opnorm,
    haagerup_gamma_check,
    haagerup_length_check,
    icc_hypotheses,
    icc_scan,
    opnorm_lower,
    opnorm_profile,
    powers_average_experiment,
    shape_classes,
    shape_decompose,
    shape_polynomial,
)
from coxtree.group import group_of
from coxtree.system import builtin


def _naive(f, h):
    out = {}
    for g, a in f.coeffs.items():
        for x, b in h.coeffs.items():
            y = g * x
            out[y] = out.get(y, 0) + a * b
    return BallFunction(out)


def _random(G, radius, seed, size=12):
    rng = np.random.default_rng(seed)
    elems = G.ball(radius).elements()
    pick = rng.choice(len(elems), size=min(size, len(elems)), replace=False)
    return BallFunction({elems[i]: complex(*rng.standard_normal(2)) for i in pick})


def test_a2_square():
    A = group_of(builtin("a2"))
    s, t = A.element("s"), A.element("t")
    f = BallFunction.delta(s) + BallFunction.delta(t)
    want = BallFunction({A.identity: 2, A.element("s t"): 1, A.element("t s"): 1})
    assert convolve(f, f).isclose(want)


def test_delta_identity_is_unit(G_figure):
    f = _random(G_figure, 3, 0)
    e = BallFunction.delta(G_figure.identity)
    assert convolve(e, f).isclose(f) and convolve(f, e).isclose(f)


def test_convolution_matches_naive(G_figure):
    f, h = _random(G_figure, 3, 1), _random(G_figure, 4, 2)
    assert convolve(f, h).isclose(_naive(f, h))


def test_associative_and_bilinear(G_figure):
    f, g, h = (_random(G_figure, 3, k, 8) for k in (3, 4, 5))
    assert convolve(convolve(f, g), h).isclose(convolve(f, convolve(g, h)), 1e-12)
    assert convolve(f + g * 2.5, h).isclose(convolve(f, h) + convolve(g, h) * 2.5, 1e-12)
    assert (f - f).support == []


def test_product_table_norm(G_figure):
    f, h = _random(G_figure, 3, 6), _random(G_figure, 3, 7)
    F, H = f.support, h.support
    pt = ProductTable(F, H)
    fv = np.array([f[g] for g in F])
    hv = np.array([h[x] for x in H])
    assert math.isclose(pt.norm(fv, hv), convolve(f, h).norm(), rel_tol=1e-12)


def test_shape_decompose_parseval(figure_ctx):
    ctx, part = figure_ctx
    G = ctx.group
    rng = np.random.default_rng(3)
    elems = [G.cache.element(i) for i in ctx.gamma_ball(10)]
    h = BallFunction({g: complex(rng.standard_normal()) for g in elems})
    pieces = shape_decompose(ctx, part, h)
    assert math.isclose(sum(p.norm() ** 2 for _, p in pieces), h.norm() ** 2, rel_tol=1e-12)
    supports = [set(p.support) for _, p in pieces]
    assert sum(map(len, supports)) == len(set().union(*supports)) == len(elems)
    assert [sum(s) for s, _ in pieces] == sorted(sum(s) for s, _ in pieces)


def test_dinf_shape_classes(dinf_ctx):
    ctx, part = dinf_ctx
    G = ctx.group
    cls = shape_classes(ctx, part, 4)
    assert set(cls[(2, 2)]) == {G.element("s t s t"), G.element("t s t s")}
    assert cls[(0, 0)] == [G.identity]
    assert shape_polynomial((2, 2)) == 9


def test_haagerup_reports(dinf_ctx):
    ctx, part = dinf_ctx
    a = haagerup_gamma_check(ctx, part, (2, 2), trials=10, seed=4)
    b = haagerup_gamma_check(ctx, part, (2, 2), trials=10, seed=4, workers=3)
    assert [t.ratio for t in a.trials] == [t.ratio for t in b.trials]
    assert a.ok and a.bound == 1.0 and a.h_support == 2
    with pytest.raises(ValueError):
        haagerup_gamma_check(ctx, part, (1, 2, 3))
    with pytest.raises(ValueError):
        haagerup_gamma_check(ctx, part, (1, 2))
    rep = haagerup_length_check(ctx, part, 4, trials=10, seed=4, on="G")
    assert not rep.asserted and rep.violations == 0
    rep = haagerup_length_check(ctx, part, 4, trials=10, seed=4)
    assert rep.bound == 5.0 ** 3 and rep.shape_count == 1


def test_opnorm_scalar_and_involution(G_dinf):
    e, s = G_dinf.identity, G_dinf.element("s")
    assert opnorm_lower(BallFunction.delta(e, -3.0), 3).value == 3.0
    est = opnorm_lower(BallFunction.delta(e) + BallFunction.delta(s), 2)
    assert math.isclose(est.value, 2.0, rel_tol=1e-8)


def test_opnorm_matches_dense_svd(G_figure):
    f = BallFunction({G_figure.element("a b"): 1.0, G_figure.element("c"): 0.5j, G_figure.element("d a"): -1.0})
    for r in (1, 2, 3):
        assert math.isclose(opnorm_lower(f, r, tol=1e-12).value, dense_opnorm(f, r), rel_tol=1e-6)


def test_opnorm_profile_monotone_below_limit(G_dinf):
    st = G_dinf.element("s t")
    f = BallFunction.delta(st) + BallFunction.delta(st.inverse())
    vals = [e.value for e in opnorm_profile(f, [1, 2, 4, 8, 16])]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[-1] <= 2 + 1e-9
    # the compression is a path graph on 2r + 1 vertices
    assert math.isclose(vals[-1], 2 * math.cos(math.pi / 34), rel_tol=1e-6)


def test_powers_small(G_figure):
    k, v = G_figure.element("a b c"), G_figure.element("b c d c")
    rep = powers_average_experiment(k, v, 4, 1, seed=2, eq3_trials=2)
    assert len(rep.values) == 4 and rep.bounded
    assert math.isclose(rep.values[0], 1.0, rel_tol=1e-9)
    with pytest.raises(ValueError):
        powers_average_experiment(G_figure.identity, v, 2)


def test_icc(G_figure):
    assert icc_hypotheses(G_figure.system)
    with pytest.raises(ValueError):
        icc_scan(G_figure.identity, [1, 2])
    A = group_of(builtin("a2"))
    rep = icc_scan(A.element("s"), [1, 2, 3, 4])
    assert rep.counts == [2, 3, 3, 3] and not rep.asserted and rep.ok
    rep = icc_scan(G_figure.element("a"), [1, 3, 5])
    assert rep.asserted and rep.increasing
