import pytest

from coxtree.congruence import gamma_orbits, pi_permutation
from coxtree.group import group_of
from coxtree.system import builtin
from coxtree.trees import (
    TruncatedTree,
    TruncationTooSmall,
    UnstablePartitionError,
    act_on_tree,
    build_forest,
    check_acyclic,
    detect_translation,
    find_translation_tree,
    free_action_violations,
    freeness_check,
    isometry_check,
    ping_pong_pair,
    valency_profile,
    vertex_orbit_counts,
)


@pytest.fixture(scope="module")
def dinf_forest(dinf_ctx):
    ctx, part = dinf_ctx
    return ctx, part, build_forest(ctx, part, 6)


@pytest.fixture(scope="module")
def figure_forest(figure_ctx):
    ctx, part = figure_ctx
    return ctx, part, build_forest(ctx, part, 5)


# ---- graph fixtures ---------------------------------------------------------

def test_triangle_is_rejected():
    tri = TruncatedTree.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    res = check_acyclic(tri)
    assert not res.ok
    assert res.cycle[0] == res.cycle[-1] and set(res.cycle) == {0, 1, 2}


def test_star_and_path_fixtures():
    star = TruncatedTree.from_edges(4, [(0, 1), (0, 2), (0, 3)], boundary={1, 2, 3})
    assert check_acyclic(star)
    prof = valency_profile(star)
    assert prof.classification == "I3" and prof.witness == 0
    path = TruncatedTree.from_edges(4, [(0, 1), (1, 2), (2, 3)], boundary={0, 3})
    assert valency_profile(path).classification == "I2"
    edge = TruncatedTree.from_edges(2, [(0, 1)])
    assert valency_profile(edge).classification == "I1"
    hidden = TruncatedTree.from_edges(2, [(0, 1)], boundary={0, 1})
    assert valency_profile(hidden).classification == "undetermined"


def test_path_and_distance_on_fixture():
    path = TruncatedTree.from_edges(5, [(0, 1), (1, 2), (2, 3)])
    assert path.graph_distance(0, 3) == 3
    assert path.graph_distance(0, 4) is None
    assert path.dump().splitlines()[0] == "0 1 0"


# ---- D_inf ------------------------------------------------------------------

def test_radius_zero_is_a_point(dinf_ctx):
    ctx, part = dinf_ctx
    forest = build_forest(ctx, part, 0)
    assert [t.n_vertices for t in forest.trees] == [1, 1]


def test_dinf_trees_are_lines(dinf_forest):
    ctx, part, forest = dinf_forest
    for t in forest.trees:
        assert check_acyclic(t)
        prof = valency_profile(t)
        assert prof.classification == "I2" and prof.max_valency == 2


def test_dinf_isometry(dinf_forest):
    _, _, forest = dinf_forest
    rep = isometry_check(forest)
    assert rep.pairs == 55 and rep.violations == 0


def test_dinf_actions(dinf_forest):
    ctx, part, forest = dinf_forest
    G = ctx.group
    i_s = part.orbit_of(G.root_of(G.element("s")))
    assert detect_translation(ctx, forest, i_s, G.element("s")).kind == "inversion"
    assert detect_translation(ctx, forest, 1 - i_s, G.element("s")).kind == "fixed-vertex"
    assert detect_translation(ctx, forest, 0, G.identity).kind == "fixed-vertex"
    for i in range(2):
        res = detect_translation(ctx, forest, i, G.element("s t"))
        assert res.kind == "translation" and res.witness.amplitude == 1
        res = detect_translation(ctx, forest, i, G.element("s t s t s t"))
        assert res.witness.amplitude == 3


def test_dinf_quotient_is_a_loop(dinf_forest):
    _, _, forest = dinf_forest
    assert vertex_orbit_counts(forest, 6) == [1, 1]
    assert vertex_orbit_counts(forest, 0) == [7, 7]


def test_ping_pong_needs_branching(dinf_forest):
    ctx, part, forest = dinf_forest
    w = detect_translation(ctx, forest, 0, ctx.group.element("s t")).witness
    with pytest.raises(ValueError):
        ping_pong_pair(ctx, forest, 0, [w])


def test_unstable_partition_refused(figure_ctx):
    ctx, _ = figure_ctx
    part = gamma_orbits(ctx, 5, 0)
    assert part.status == "lower_bound"
    with pytest.raises(UnstablePartitionError):
        build_forest(ctx, part, 2)


# ---- figure group -------------------------------------------------------------

def test_figure_forest_acyclic_and_isometric(figure_forest):
    ctx, part, forest = figure_forest
    assert len(forest) == part.lam == 72
    assert all(check_acyclic(t) for t in forest.trees)
    assert isometry_check(forest, 3).violations == 0


def test_figure_free_action(figure_forest):
    _, _, forest = figure_forest
    assert free_action_violations(forest, 10) == []


def test_action_matches_pi(figure_forest):
    ctx, part, forest = figure_forest
    G = ctx.group
    for w in ("a", "c b", "d a b c"):
        g = G.element(w)
        perm = pi_permutation(ctx, part, g)
        for i in (0, 5, 40):
            m = act_on_tree(ctx, forest, i, g)
            assert m.target == perm[i]
            assert m.adjacency_ok


def test_translation_tree_for_gamma(figure_forest):
    ctx, part, _ = figure_forest
    G = ctx.group
    h = G.cache.element(ctx.gamma_ball(8)[1])
    w = find_translation_tree(ctx, part, h, 5, 8)
    assert w.amplitude > 0 and w.min_displacement > 0
    with pytest.raises(ValueError):
        find_translation_tree(ctx, part, G.identity, 5)
    with pytest.raises(ValueError):
        find_translation_tree(ctx, part, G.element("a"), 5)


def test_ping_pong_on_figure(figure_forest):
    ctx, part, forest = figure_forest
    G = ctx.group
    h = G.cache.element(ctx.gamma_ball(8)[1])
    for i in range(part.lam):
        act = detect_translation(ctx, forest, i, h)
        if act.kind != "translation":
            continue
        try:
            res = ping_pong_pair(ctx, forest, i, [act.witness])
        except (ValueError, TruncationTooSmall):
            continue
        assert res.certificate.ok
        assert ctx.is_in_gamma(res.v)
        assert freeness_check(h, res.v, 5).free
        return
    pytest.fail("no ping-pong configuration at radius 5")


def test_freeness_controls():
    A = group_of(builtin("a2"))
    res = freeness_check(A.element("s t"), A.element("t s"), 2)
    assert not res.free and res.relation == "hv"
    with pytest.raises(ValueError):
        freeness_check(A.identity, A.element("s"), 2)
    D = group_of(builtin("dinf"))
    st = D.element("s t")
    assert not freeness_check(st, st ** 2, 3).free


def test_figure_trees_all_i3_at_radius_5(figure_forest):
    """Every tree of the figure group shows a branch point at truncation radius 5."""
    _, part, forest = figure_forest
    kinds = [valency_profile(forest[i]).classification for i in range(part.lam)]
    assert kinds.count("I3") == part.lam, f"{kinds.count('I3')}/{part.lam} trees are I3"
