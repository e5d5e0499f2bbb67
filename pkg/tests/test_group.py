import math
from itertools import permutations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coxtree.group import Group, ResourceCapExceeded, group_of
from coxtree.system import INF, CoxeterMatrix, CoxeterSystem, builtin


def _system(names, edges):
    return CoxeterSystem(CoxeterMatrix.from_edges(names, edges))


A3 = _system("abc", [("a", "b", 3), ("b", "c", 3)])
B3 = _system("abc", [("a", "b", 4), ("b", "c", 3)])
H3 = _system("abc", [("a", "b", 5), ("b", "c", 3)])


def _float_growth(cm, radius):
    """Sphere sizes from a floating point copy of the reflection representation."""
    n = cm.rank
    B = np.eye(n)
    for i in range(n):
        for j in range(n):
            if i != j:
                m = cm.label(i, j)
                B[i, j] = -1.0 if m == INF else -math.cos(math.pi / m)
    gens = []
    for s in range(n):
        M = np.eye(n)
        M[s, :] -= 2 * B[s, :]
        gens.append(M.T)
    key = lambda M: tuple(np.round(M, 6).ravel() + 0.0)
    seen = {key(np.eye(n))}
    layer = [np.eye(n)]
    sizes = [1]
    for _ in range(radius):
        nxt = []
        for M in layer:
            for g in gens:
                P = M @ g
                k = key(P)
                if k not in seen:
                    seen.add(k)
                    nxt.append(P)
        sizes.append(len(nxt))
        layer = nxt
    return sizes


@pytest.mark.parametrize("name,radius", [("figure", 6), ("t237", 8), ("a2xa1", 5), ("dinf", 6)])
def test_sphere_sizes_match_float_oracle(name, radius):
    S = builtin(name)
    G = group_of(S)
    got = [len(G.sphere(k)) for k in range(radius + 1)]
    assert got == _float_growth(S.cm, radius)


@pytest.mark.parametrize("S,order,top", [(A3, 24, 6), (B3, 48, 9), (H3, 120, 15)])
def test_finite_orders(S, order, top):
    G = Group(S)
    assert len(G.ball(top)) == order
    assert len(G.sphere(top)) == 1
    assert len(G.ball(top + 2)) == order


def test_dinf_growth_and_a2_order(G_dinf):
    assert [len(G_dinf.sphere(k)) for k in range(7)] == [1, 2, 2, 2, 2, 2, 2]
    A = group_of(builtin("a2"))
    assert len(A.ball(5)) == 6


def _perm(word):
    p = list(range(4))
    for s in word:
        p[s], p[s + 1] = p[s + 1], p[s]
    return tuple(p)


def _inversions(p):
    return sum(p[i] > p[j] for i in range(4) for j in range(i + 1, 4))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 2), max_size=12))
def test_length_is_permutation_inversions(word):
    G = group_of(A3)
    g = G.element(list(word))
    assert g.length() == len(g.word) == _inversions(_perm(word))
    assert _perm(g.word) == _perm(word)


def test_shortlex_is_lex_minimal_reduced_word():
    G = group_of(A3)
    by_perm = {}
    for k in range(7):
        for w in product(range(3), repeat=k):
            by_perm.setdefault(_perm(w), w)
    assert len(by_perm) == 24
    for p in permutations(range(4)):
        w = by_perm[p]
        assert G.element(list(w)).word == w


def test_normal_form_strings(G_dinf):
    assert str(G_dinf.normal_form("s t s t")) == "s t s t"
    A = group_of(builtin("a2"))
    assert str(A.normal_form("s t s t")) == "t s"
    assert str(A.normal_form("t s t")) == "s t s"
    assert A.normal_form("s s").is_identity()


def test_element_algebra(G_figure):
    G = G_figure
    g = G.element("a b c d b")
    h = G.element("c a")
    assert (g * g.inverse()).is_identity()
    assert (g * h).inverse() == h.inverse() * g.inverse()
    assert g ** 3 == g * g * g
    assert g ** -2 == (g.inverse()) ** 2
    assert h.conjugate(g) == g * h * g.inverse()
    assert len({g, G.element("a b c d b"), h}) == 2
    assert G.element([]) == G.identity


def test_inversion_set_two_ways(G_figure):
    G = G_figure
    G.reflections_up_to(9)
    for g in G.ball(4):
        N = G.inversion_set(g)
        assert len(N) == g.length()
        assert N == G.inversion_set_by_roots(g)


def test_inversion_set_recovers_reflections(G_figure):
    G = G_figure
    g = G.element("a b c b d")
    for r in G.inversion_reflections(g):
        t = r.element
        assert (t * g).length() < g.length()
        assert G.is_reflection(t)


def _brute_reflections(G, n):
    out = set()
    for w in G.ball(n):
        for s in G.gens:
            t = s.conjugate(w)
            if t.length() <= n:
                out.add(t)
    return out


@pytest.mark.parametrize("name,n", [("figure", 5), ("dinf", 7), ("t237", 5)])
def test_reflections_up_to_matches_conjugates(name, n):
    G = group_of(builtin(name))
    refl = G.reflections_up_to(n)
    elems = [r.element for r in refl]
    assert len(set(elems)) == len(elems)
    assert set(elems) == _brute_reflections(G, n)
    assert all(len(r.word) % 2 == 1 and len(r.word) <= n for r in refl)


def test_dinf_reflection_count(G_dinf):
    assert len(G_dinf.reflections_up_to(5)) == 6
    assert len(group_of(builtin("a2")).reflections_up_to(9)) == 3


def test_non_reflection(G_figure):
    assert not G_figure.is_reflection(G_figure.element("a b"))
    with pytest.raises(ValueError):
        G_figure.root_of(G_figure.element("a b"))


def test_ball_cap():
    G = Group(builtin("figure"), ball_cap=50)
    with pytest.raises(ResourceCapExceeded):
        G.ball(6)
    with pytest.raises(ValueError):
        G.ball(-1)


def test_cross_system_product(G_figure, G_dinf):
    with pytest.raises(ValueError):
        G_figure.element("a") * G_dinf.element("s")
    assert G_figure.element("a") != G_dinf.element("s")
