import math
from itertools import combinations

import numpy as np
import pytest

from coxtree.congruence import (
    BadPrimeError,
    CongruenceContext,
    build_context,
    default_prime,
    gamma_orbits,
    pi_permutation,
    prime_obstructions,
    shape,
    torsion_certificate,
)
from coxtree.group import ResourceCapExceeded
from coxtree.system import INF, builtin


def _integer_gens(cm):
    """Reflection matrices when every 2cos(pi/m) is an integer (m in 2, 3, inf)."""
    two_cos = {2: 0, 3: 1, INF: 2}
    n = cm.rank
    gens = []
    for s in range(n):
        M = np.eye(n, dtype=np.int64)
        for t in range(n):
            if t != s:
                M[s, t] = two_cos[cm.label(s, t)]
        M[s, s] = -1
        gens.append(M)
    return gens


def _bfs_order(gens, p):
    start = np.eye(len(gens[0]), dtype=np.int64)
    seen = {start.tobytes()}
    todo = [start]
    while todo:
        nxt = []
        for M in todo:
            for g in gens:
                P = (M @ g) % p
                k = P.tobytes()
                if k not in seen:
                    seen.add(k)
                    nxt.append(P)
        todo = nxt
    return len(seen)


@pytest.mark.parametrize("name,p", [("figure", 3), ("figure", 5), ("dinf", 3), ("dinf", 7), ("a2xa1", 5)])
def test_quotient_order_matches_bfs(name, p):
    S = builtin(name)
    ctx = CongruenceContext(S, p)
    assert ctx.quotient.order == _bfs_order(_integer_gens(S.cm), p)


def test_known_indices():
    assert build_context(builtin("dinf"), 3).index == 2
    assert build_context(builtin("dinf"), 3, enlarge=False).index == 6
    assert build_context(builtin("a2"), 3).index == 6
    assert build_context(builtin("figure"), 3).quotient.order == 648


def test_gamma_is_a_normal_subgroup(figure_ctx):
    ctx, _ = figure_ctx
    G = ctx.group
    members = [G.cache.element(i) for i in ctx.gamma_ball(10)[1:6]]
    assert members
    probes = [G.element(w) for w in ("a", "b c", "d a b", "c b a d")]
    for g, h in combinations(members, 2):
        assert ctx.is_in_gamma(g * h) and ctx.is_in_gamma(g.inverse())
    for g in members:
        for x in probes:
            assert ctx.is_in_gamma(g.conjugate(x))
    for s in G.gens:
        assert not ctx.is_in_gamma(s)


def test_dinf_gamma(dinf_ctx):
    ctx, _ = dinf_ctx
    G = ctx.group
    st = G.element("s t")
    assert ctx.is_in_gamma(st ** 3)
    assert not ctx.is_in_gamma(G.element("s"))
    unenlarged = build_context(G.system, 3, enlarge=False)
    assert unenlarged.is_in_gamma(st ** 3) and not unenlarged.is_in_gamma(st)


def test_figure_torsion_free(figure_ctx):
    ctx, _ = figure_ctx
    rep = torsion_certificate(ctx, 10)
    assert rep.ok and rep.checked == 14


def test_torsion_detected_without_filtering():
    ctx = build_context(builtin("a2"), 5)
    assert ctx.index == ctx.quotient.order
    rep = torsion_certificate(ctx, 3)
    assert rep.checked == 0


@pytest.mark.parametrize("p", [2, 4, 9, 1])
def test_bad_primes(p):
    with pytest.raises(BadPrimeError):
        CongruenceContext(builtin("figure"), p)


@pytest.mark.parametrize("p", [3, 7])
def test_ramified_primes(p):
    assert any("ramified" in msg for msg in prime_obstructions(builtin("t237"), p))
    with pytest.raises(BadPrimeError):
        CongruenceContext(builtin("t237"), p)


def test_default_primes():
    got = {n: default_prime(builtin(n)) for n in ("a2", "dinf", "figure", "a2xa1", "t237")}
    assert got == {"a2": 3, "dinf": 3, "figure": 3, "a2xa1": 3, "t237": 13}


def test_quotient_cap():
    with pytest.raises(ResourceCapExceeded):
        CongruenceContext(builtin("figure"), 3, quotient_cap=100)


def test_dinf_orbits(dinf_ctx):
    ctx, part = dinf_ctx
    assert part.lam == 2 and part.certified
    explicit = gamma_orbits(ctx, 7, 8, method="explicit")
    assert explicit.lam == 2
    assert sorted(map(sorted, part.members)) == sorted(map(sorted, explicit.members))


def test_figure_lambda(figure_ctx):
    ctx, part = figure_ctx
    assert part.lam == 72
    assert part.status == "stabilized"
    assert sum(part.orbit_sizes) == len(ctx.group.reflections_up_to(7))


def test_explicit_merges_are_sound(figure_ctx):
    ctx, part = figure_ctx
    explicit = gamma_orbits(ctx, 7, 8, method="explicit")
    hit = sum(1 for m in part.members if m)
    assert explicit.lam >= hit
    for members in explicit.members:
        assert len({part.orbit_of(r) for r in members}) == 1


def test_unknown_method(dinf_ctx):
    with pytest.raises(ValueError):
        gamma_orbits(dinf_ctx[0], 3, 3, method="magic")


def test_shape_sums_to_length(figure_ctx):
    ctx, part = figure_ctx
    G = ctx.group
    for i in ctx.gamma_ball(10):
        g = G.cache.element(i)
        assert sum(shape(ctx, part, g)) == g.length()
    with pytest.raises(ValueError):
        shape(ctx, part, G.element("a"))


def test_shape_is_additive_on_powers(dinf_ctx):
    ctx, part = dinf_ctx
    st = ctx.group.element("s t")
    assert shape(ctx, part, st ** 3) == (3, 3)
    assert shape(ctx, part, st ** -2) == (2, 2)


def test_pi_is_a_homomorphism(figure_ctx):
    ctx, part = figure_ctx
    G = ctx.group
    elems = [G.element(w) for w in ("a", "b", "c d", "a b c", "d c b a")]
    perms = {g: pi_permutation(ctx, part, g) for g in elems}
    for g in elems:
        assert sorted(perms[g]) == list(range(part.lam))
        for h in elems:
            gh = pi_permutation(ctx, part, g * h)
            assert gh == tuple(perms[g][perms[h][i]] for i in range(part.lam))
    for i in ctx.gamma_ball(8):
        assert pi_permutation(ctx, part, G.cache.element(i)) == tuple(range(part.lam))


def test_index_divides_lambda_bound(figure_ctx):
    ctx, part = figure_ctx
    assert part.lower_bound <= part.lam
    assert math.gcd(ctx.quotient.order, ctx.index) == ctx.index
