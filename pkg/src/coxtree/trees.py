"""Truncated reflection trees, the induced actions, translations and ping-pong.

A chamber is represented by a group element g.  In the tree built from the
orbit T_i, the vertex of g is the set N_g meet T_i (two chambers lie in the
same component iff no mirror of T_i separates them, i.e. (N_g xor N_h) meet
T_i is empty), and the distance between two vertices is the number of T_i
mirrors separating them: d_i(u, w) = |u xor w|.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .congruence import CongruenceContext, OrbitPartition, pi_permutation
from .group import GroupElement, ResourceCapExceeded, mat_key

Key = frozenset


class UnstablePartitionError(ValueError):
    """Trees are only built from stabilized orbit partitions."""


class TruncationTooSmall(RuntimeError):
    """The truncation radius does not contain enough of the tree."""


@dataclass
class TruncatedTree:
    index: int
    radius: int
    keys: list[Key]  # vertex id -> vertex key
    edges: dict[tuple[int, int], int]  # (u, w) with u < w -> reflection root id
    boundary: set[int]
    vertex_of: dict[int, int] = field(default_factory=dict)  # ball index -> vertex id
    _vid: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._vid:
            self._vid = {k: v for v, k in enumerate(self.keys)}
        self.adj: dict[int, list[int]] = {v: [] for v in range(len(self.keys))}
        for u, w in sorted(self.edges):
            self.adj[u].append(w)
            self.adj[w].append(u)

    @property
    def n_vertices(self) -> int:
        return len(self.keys)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vid(self, key: Key):
        return self._vid.get(key)

    def interior(self) -> list[int]:
        return [v for v in range(len(self.keys)) if v not in self.boundary]

    def valency(self, v: int) -> int:
        return len(self.adj[v])

    def label(self, u: int, w: int) -> int:
        return self.edges[(min(u, w), max(u, w))]

    @staticmethod
    def distance(a: Key, b: Key) -> int:
        return len(a ^ b)

    def graph_distance(self, u: int, w: int):
        """BFS distance inside the truncation (None if disconnected there)."""
        path = self.path(u, w)
        return None if path is None else len(path) - 1

    def path(self, u: int, w: int):
        prev = {u: None}
        q = deque([u])
        while q:
            x = q.popleft()
            if x == w:
                out = []
                while x is not None:
                    out.append(x)
                    x = prev[x]
                return out[::-1]
            for y in self.adj[x]:
                if y not in prev:
                    prev[y] = x
                    q.append(y)
        return None

    def dump(self, names=None) -> str:
        """Adjacency list: one line per edge, ``u w reflection``."""
        lines = []
        for (u, w), rid in sorted(self.edges.items()):
            lab = names(rid) if names else str(rid)
            lines.append(f"{u} {w} {lab}")
        return "\n".join(lines)

    @classmethod
    def from_edges(cls, n_vertices: int, edges, boundary=(), index: int = -1) -> "TruncatedTree":
        """A graph fixture with abstract vertices 0..n-1 (keys are singletons)."""
        keys = [frozenset({("v", i)}) for i in range(n_vertices)]
        e = {}
        for k, (u, w) in enumerate(edges):
            e[(min(u, w), max(u, w))] = k
        return cls(index, 0, keys, e, set(boundary))


class Forest:
    """All trees of a partition truncated at one radius."""

    def __init__(self, ctx: CongruenceContext, partition: OrbitPartition, radius: int,
                 require_stable: bool = True):
        if require_stable and partition.status != "stabilized":
            raise UnstablePartitionError("orbit partition is not stabilized; refusing to build trees")
        self.ctx = ctx
        self.partition = partition
        self.radius = radius
        G = ctx.group
        ball = G.cache
        N = ball.count(radius)
        lam = partition.lam
        orbit = partition.orbit_of
        keys: list[list[Key]] = [[] for _ in range(lam)]
        vids: list[dict] = [{} for _ in range(lam)]
        vertex_of: list[dict] = [{} for _ in range(lam)]
        boundary: list[set] = [set() for _ in range(lam)]
        self.element_keys: list[dict[int, Key]] = []
        empty = frozenset()
        for i in range(lam):
            vids[i][empty] = 0
            keys[i].append(empty)
        for a in range(N):
            per: dict[int, set] = {}
            for rid in ball.inversion_ids(a):
                per.setdefault(orbit(rid), set()).add(rid)
            ek = {i: frozenset(s) for i, s in per.items()}
            self.element_keys.append(ek)
            on_sphere = ball.length(a) == radius
            for i in range(lam):
                k = ek.get(i, empty)
                v = vids[i].get(k)
                if v is None:
                    v = vids[i][k] = len(keys[i])
                    keys[i].append(k)
                vertex_of[i][a] = v
                if on_sphere:
                    boundary[i].add(v)
        edges: list[dict] = [{} for _ in range(lam)]
        for a in range(ball.count(radius - 1) if radius > 0 else 0):
            for s in range(G.n):
                rid = wall_id(G, a, s)
                i = orbit(rid)
                u = vertex_of[i][a]
                k2 = keys[i][u] ^ {rid}
                w = vids[i][k2]
                edges[i][(min(u, w), max(u, w))] = rid
        self.trees = [
            TruncatedTree(i, radius, keys[i], edges[i], boundary[i], vertex_of[i], vids[i])
            for i in range(lam)
        ]

    def __getitem__(self, i: int) -> TruncatedTree:
        return self.trees[i]

    def __len__(self) -> int:
        return len(self.trees)

    def embed(self, a: int) -> tuple[int, ...]:
        """[g] = ([g]_1, ..., [g]_Lambda) for ball index a."""
        return tuple(t.vertex_of[a] for t in self.trees)


def wall_id(G, a: int, s: int) -> int:
    """Root id of g s g^-1 for ball element a (the wall between g and gs)."""
    ball = G.cache
    rid = ball.walls.get((a, s))
    if rid is None:
        col = ball.mats[a][:, s, :]
        if G.root_sign(col) < 0:
            col = -col
        rid = ball.walls[(a, s)] = G.registry.add(col, ball.words[a], s)
    return rid


def build_tree(ctx: CongruenceContext, partition: OrbitPartition, i: int, radius: int) -> TruncatedTree:
    return build_forest(ctx, partition, radius)[i]


_FORESTS: dict = {}


def build_forest(ctx: CongruenceContext, partition: OrbitPartition, radius: int) -> Forest:
    key = (id(partition), radius)
    f = _FORESTS.get(key)
    if f is None or f.partition is not partition:
        f = _FORESTS[key] = Forest(ctx, partition, radius)
    return f


# ---- structural checks -------------------------------------------------------

@dataclass
class AcyclicityResult:
    ok: bool
    cycle: list[int] | None = None

    def __bool__(self):
        return self.ok


def check_acyclic(tree: TruncatedTree) -> AcyclicityResult:
    """Union-find over the observed edges; a closing edge yields the cycle witness."""
    parent = list(range(tree.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    seen_adj: dict[int, list[int]] = {v: [] for v in range(tree.n_vertices)}
    for u, w in sorted(tree.edges):
        ru, rw = find(u), find(w)
        if ru == rw:
            # path u .. w in the forest so far, closed by the edge (w, u)
            prev = {u: None}
            q = deque([u])
            while q:
                x = q.popleft()
                for y in seen_adj[x]:
                    if y not in prev:
                        prev[y] = x
                        q.append(y)
            path = []
            x = w
            while x is not None:
                path.append(x)
                x = prev[x]
            return AcyclicityResult(False, path[::-1] + [u])
        parent[ru] = rw
        seen_adj[u].append(w)
        seen_adj[w].append(u)
    return AcyclicityResult(True)


@dataclass
class ValencyProfile:
    classification: str  # I1, I2, I3, or undetermined
    histogram: dict[int, int]
    max_valency: int
    interior_count: int
    witness: int | None = None


def valency_profile(tree: TruncatedTree) -> ValencyProfile:
    """I1: a single edge; I3: some vertex with at least three observed edges
    (observed edges are genuine, so this is certified even on the boundary);
    I2: no such vertex and every fully observed vertex has valency <= 2."""
    interior = tree.interior()
    hist: dict[int, int] = {}
    for v in interior:
        k = tree.valency(v)
        hist[k] = hist.get(k, 0) + 1
    vals = [tree.valency(v) for v in range(tree.n_vertices)]
    mx = max(vals, default=0)
    if mx >= 3:
        wit = next(v for v in range(tree.n_vertices) if vals[v] >= 3)
        return ValencyProfile("I3", hist, mx, len(interior), wit)
    if not tree.boundary and tree.n_vertices == 2 and tree.n_edges == 1:
        return ValencyProfile("I1", hist, mx, len(interior))
    if not interior:
        return ValencyProfile("undetermined", hist, mx, 0)
    return ValencyProfile("I2", hist, mx, len(interior))


def valency_escalating(ctx: CongruenceContext, partition: OrbitPartition, i: int, radius: int,
                       max_radius: int) -> tuple[ValencyProfile, int]:
    """Grow the truncation until tree i is classified (or max_radius is reached)."""
    r = radius
    while True:
        prof = valency_profile(build_forest(ctx, partition, r)[i])
        if prof.classification != "undetermined" or r >= max_radius:
            return prof, r
        r += 1


def _all_distances(tree: TruncatedTree) -> list[dict[int, int]]:
    out = []
    for src in range(tree.n_vertices):
        dist = {src: 0}
        q = deque([src])
        while q:
            x = q.popleft()
            for y in tree.adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    q.append(y)
        out.append(dist)
    return out


@dataclass
class IsometryReport:
    pairs: int
    violations: int


def isometry_check(forest: Forest, radius: int | None = None, interior_only: bool = False) -> IsometryReport:
    """Count pairs g, h in ball(radius) with sum_i d_i([g]_i, [h]_i) != l(g^-1 h).

    d_i is the graph distance in the observed truncation and l(g^-1 h) comes
    from locating g^-1 h in the enumerated ball, so the two sides are
    computed independently.
    """
    G = forest.ctx.group
    ball = G.cache
    r = forest.radius - 1 if radius is None else radius
    n = ball.count(r)
    ball.count(2 * r)
    dists = [_all_distances(t) for t in forest.trees]
    bad = pairs = 0
    for a in range(n):
        ga_inv = ball.invs[a]
        prods = G.mul_batch(ball.mats[:n], ga_inv, left=True)
        for b in range(a + 1, n):
            if interior_only and any(t.vertex_of[a] in t.boundary or t.vertex_of[b] in t.boundary
                                     for t in forest.trees):
                continue
            pairs += 1
            idx = ball.index.get(mat_key(prods[b]))
            word_len = None if idx is None else ball.length(idx)
            tot = 0
            for t, dd in zip(forest.trees, dists):
                d = dd[t.vertex_of[a]].get(t.vertex_of[b])
                if d is None:
                    tot = None
                    break
                tot += d
            if tot is None or tot != word_len:
                bad += 1
    return IsometryReport(pairs, bad)


def free_action_violations(forest: Forest, radius: int) -> list[str]:
    """Non-trivial gamma in Gamma of length <= radius fixing some embedded vertex tuple."""
    ctx = forest.ctx
    G = ctx.group
    ball = G.cache
    out = []
    n = ball.count(forest.radius)
    tuples = [forest.element_keys[a] for a in range(n)]
    for gi in ctx.gamma_ball(radius):
        if gi == 0:
            continue
        g = ball.element(gi)
        phi = VertexAction(ctx, forest.partition, g)
        for a in range(n):
            if all(phi.apply_tuple(tuples[a]).get(i, frozenset()) == tuples[a].get(i, frozenset())
                   for i in range(forest.partition.lam)):
                out.append(f"{g} fixes the vertex tuple of {G.system.format_word(ball.words[a])}")
                break
    return out


def vertex_orbit_counts(forest: Forest, gamma_radius: int) -> list[int]:
    """Per tree, classes of observed vertices joined by some gamma in Gamma of length <= gamma_radius.

    Images are exact, so this bounds the number of Gamma-orbits on vertices
    from above (1 for a loop quotient, 2 for a single edge).
    """
    ctx = forest.ctx
    G = ctx.group
    actions = [VertexAction(ctx, forest.partition, G.cache.element(a)) for a in ctx.gamma_ball(gamma_radius) if a]
    out: list[int] = []
    for tree in forest.trees:
        inner = range(tree.n_vertices)
        parent = {v: v for v in inner}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for phi in actions:
            for v in inner:
                w = tree.vid(phi.apply(tree.index, tree.keys[v]))
                if w is not None and w in parent:
                    a, b = find(v), find(w)
                    if a != b:
                        parent[max(a, b)] = min(a, b)
        out.append(len({find(v) for v in inner}))
    return out


# ---- actions -----------------------------------------------------------------

class VertexAction:
    """phi_g(v) = (N_g meet T_j) xor g v g^-1 with j = pi(g)(i)."""

    def __init__(self, ctx: CongruenceContext, partition: OrbitPartition, g: GroupElement):
        self.ctx = ctx
        self.partition = partition
        self.g = g
        self.perm = pi_permutation(ctx, partition, g, cross_check=False)
        G = ctx.group
        per: dict[int, set] = {}
        for rid in G.inversion_set(g):
            per.setdefault(partition.orbit_of(rid), set()).add(rid)
        self.shift = {i: frozenset(s) for i, s in per.items()}
        self._conj: dict[int, int] = {}

    def conj(self, rid: int) -> int:
        c = self._conj.get(rid)
        if c is None:
            c = self._conj[rid] = self.ctx.group.conjugate_root(self.g, rid)
        return c

    def target(self, i: int) -> int:
        return self.perm[i]

    def apply(self, i: int, key: Key) -> Key:
        j = self.perm[i]
        moved = frozenset(self.conj(r) for r in key)
        return self.shift.get(j, frozenset()) ^ moved

    def apply_tuple(self, keys: dict[int, Key]) -> dict[int, Key]:
        out = {}
        for i in range(self.partition.lam):
            k = self.apply(i, keys.get(i, frozenset()))
            if k:
                out[self.perm[i]] = k
        return out


@dataclass
class TreeMap:
    source: int
    target: int
    mapping: dict[int, int | None]  # source vid -> target vid (None: escaped the truncation)
    escaped: int
    adjacency_ok: bool


def act_on_tree(ctx: CongruenceContext, forest: Forest, i: int, g: GroupElement) -> TreeMap:
    phi = VertexAction(ctx, forest.partition, g)
    src = forest[i]
    j = phi.target(i)
    dst = forest[j]
    mapping = {}
    images = {}
    for v, key in enumerate(src.keys):
        img = phi.apply(i, key)
        images[v] = img
        mapping[v] = dst.vid(img)
    ok = True
    for (u, w), rid in src.edges.items():
        a, b = images[u], images[w]
        if a ^ b != {phi.conj(rid)}:
            ok = False
        elif mapping[u] is not None and mapping[w] is not None:
            e = (min(mapping[u], mapping[w]), max(mapping[u], mapping[w]))
            if e not in dst.edges:
                ok = False
    escaped = sum(1 for x in mapping.values() if x is None)
    return TreeMap(i, j, mapping, escaped, ok)


@dataclass
class TranslationWitness:
    element: GroupElement
    tree: int
    amplitude: int
    axis_segment: list  # vertex keys x, phi(x), phi^2(x) (plus the geodesic when observed)
    min_displacement: int
    kind: str = "translation"


@dataclass
class ActionType:
    kind: str  # translation, fixed-vertex, inversion, undetermined
    witness: TranslationWitness | None = None
    vertex: Key | None = None


def detect_translation(ctx: CongruenceContext, forest: Forest, i: int, g: GroupElement) -> ActionType:
    """Classify the automorphism of tree i induced by g (requires pi(g)(i) = i).

    A vertex x with d(x, g^2 x) = 2 d(x, g x) > 0 lies on an axis and
    certifies a translation of amplitude d(x, g x); distances are exact.
    """
    phi = VertexAction(ctx, forest.partition, g)
    if phi.target(i) != i:
        raise ValueError(f"g maps tree {i} to tree {phi.target(i)}")
    tree = forest[i]
    best = None
    min_disp = None
    for v in range(tree.n_vertices):
        x = tree.keys[v]
        y = phi.apply(i, x)
        d1 = len(x ^ y)
        min_disp = d1 if min_disp is None else min(min_disp, d1)
        if d1 == 0:
            return ActionType("fixed-vertex", vertex=x)
        z = phi.apply(i, y)
        d2 = len(x ^ z)
        if d1 == 1 and d2 == 0:
            return ActionType("inversion", vertex=x)
        if d2 == 2 * d1 and best is None:
            best = (x, y, z, d1)
    if best is None:
        return ActionType("undetermined")
    x, y, z, amp = best
    seg = [x, y, z]
    u, w = tree.vid(x), tree.vid(y)
    if u is not None and w is not None:
        p = tree.path(u, w)
        if p is not None:
            seg = [tree.keys[k] for k in p] + [z]
    return ActionType("translation", TranslationWitness(g, i, amp, seg, min_disp))


def detect_translation_escalating(ctx, partition, i, g, radius: int, max_radius: int) -> tuple[ActionType, int]:
    r = radius
    while True:
        res = detect_translation(ctx, build_forest(ctx, partition, r), i, g)
        if res.kind != "undetermined" or r >= max_radius:
            return res, r
        r += 1


def find_translation_tree(ctx: CongruenceContext, partition: OrbitPartition, gamma: GroupElement,
                          radius: int, max_radius: int | None = None) -> TranslationWitness:
    """A tree on which gamma acts as a translation; trees are ranked by growth of
    d_i([e], gamma^n [e]) for n = 1, 2, 3."""
    if gamma.is_identity():
        raise ValueError("gamma must be non-trivial")
    if not ctx.is_in_gamma(gamma):
        raise ValueError("gamma must lie in Gamma")
    G = ctx.group
    counts = []
    p = gamma
    for _ in range(3):
        c = [0] * partition.lam
        for rid in G.inversion_set(p):
            c[partition.orbit_of(rid)] += 1
        counts.append(c)
        p = p * gamma
    order = sorted(range(partition.lam), key=lambda i: (-(counts[2][i] - counts[0][i]), -counts[0][i], i))
    max_radius = radius if max_radius is None else max_radius
    r = radius
    while True:
        forest = build_forest(ctx, partition, r)
        for i in order:
            if counts[2][i] == counts[0][i]:
                break
            res = detect_translation(ctx, forest, i, gamma)
            if res.kind == "translation":
                return res.witness
        if r >= max_radius:
            raise TruncationTooSmall(f"no translation tree certified up to radius {r}")
        r += 1


def reflection_translation(ctx, forest: Forest, i: int, rid1: int, rid2: int) -> ActionType:
    """The product t2 t1 of two distinct reflections of T_i acting on tree i."""
    G = ctx.group
    t1 = G.registry.reflection(rid1).element
    t2 = G.registry.reflection(rid2).element
    return detect_translation(ctx, forest, i, t2 * t1)


# ---- ping-pong -------------------------------------------------------------------

@dataclass
class PingPongCertificate:
    tree: int
    x: Key
    x_prime: Key
    wall: int
    h_checks: list[tuple[str, bool]]
    v_checks: list[tuple[str, bool]]
    sample_checks: list[tuple[str, bool]]
    v_amplitude: int

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.h_checks + self.v_checks + self.sample_checks)


@dataclass
class PingPongResult:
    v: GroupElement
    reflections: tuple[int, int]
    certificate: PingPongCertificate


def _in_half(key: Key, x: Key, wall: int) -> bool:
    # V = the side of the wall away from x
    return wall in (key ^ x)


def ping_pong_pair(ctx: CongruenceContext, forest: Forest, i: int, translations: list[TranslationWitness],
                   sample_powers: int = 3) -> PingPongResult:
    """Build v in Gamma with <h, v> free for every given translation h of tree i.

    V is the half-tree across an edge e = (x, x') at a vertex of valency >= 3;
    h x' and h^-1 x' outside V give hV disjoint from V, hence (h hyperbolic)
    h^j V inside U = complement of V for all j != 0.  v is a translation
    whose axis passes through x' and stays in V, with v x and v^-1 x in V,
    so v^j U lies in V.  Klein's criterion then gives a free product.
    """
    tree = forest[i]
    prof = valency_profile(tree)
    if prof.classification != "I3":
        raise ValueError(f"tree {i} is not of type I3 ({prof.classification})")
    for w in translations:
        if w.tree != i:
            raise ValueError("translation witness for a different tree")
    partition = forest.partition
    hs = [(w.element, VertexAction(ctx, partition, w.element), VertexAction(ctx, partition, w.element.inverse()))
          for w in translations]
    order = sorted(range(tree.n_vertices), key=lambda v: (len(tree.keys[v]), v))
    for xv in order:
        if tree.valency(xv) < 3:
            continue
        x = tree.keys[xv]
        for xpv in sorted(tree.adj[xv]):
            xp = tree.keys[xpv]
            wall = tree.label(xv, xpv)
            h_checks = []
            for h, ph, phi_inv in hs:
                a = not _in_half(ph.apply(i, xp), x, wall)
                b = not _in_half(phi_inv.apply(i, xp), x, wall)
                h_checks += [(f"{h} x' outside V", a), (f"{h}^-1 x' outside V", b)]
            if not all(ok for _, ok in h_checks):
                continue
            res = _search_v(ctx, forest, i, x, xv, wall, xpv)
            if res is None:
                continue
            v, pair, v_checks, amp = res
            samples = []
            for h, _, _ in hs:
                for j in range(2, sample_powers + 1):
                    for sgn in (1, -1):
                        hj = h ** (sgn * j)
                        img = VertexAction(ctx, partition, hj).apply(i, xp)
                        samples.append((f"h^{sgn * j} x' outside V", not _in_half(img, x, wall)))
            for j in range(2, sample_powers + 1):
                for sgn in (1, -1):
                    img = VertexAction(ctx, partition, v ** (sgn * j)).apply(i, x)
                    samples.append((f"v^{sgn * j} x inside V", _in_half(img, x, wall)))
            cert = PingPongCertificate(i, x, xp, wall, h_checks, v_checks, samples, amp)
            return PingPongResult(v, pair, cert)
    raise TruncationTooSmall(f"no ping-pong configuration found in tree {i} at radius {forest.radius}")


def _search_v(ctx, forest, i, x, xv, wall, xpv):
    """v = t_e t_f' t_f t_e for two further edges f, f' at x.

    t_e moves f, f' to edges at x' away from x; the axis of t_f' t_f runs
    through f and f' and so avoids e, hence the axis of v lies in V.
    """
    tree = forest[i]
    G = ctx.group
    partition = forest.partition
    te = G.registry.reflection(wall).element
    others = [w for w in sorted(tree.adj[xv]) if w != xpv]
    for ai, a in enumerate(others):
        for b in others[ai + 1:]:
            r1, r2 = tree.label(xv, a), tree.label(xv, b)
            t1 = G.registry.reflection(r1).element
            t2 = G.registry.reflection(r2).element
            v = te * t2 * t1 * te
            in_gamma = ctx.is_in_gamma(v)
            pv = VertexAction(ctx, partition, v)
            pvi = VertexAction(ctx, partition, v.inverse())
            c1 = _in_half(pv.apply(i, x), x, wall)
            c2 = _in_half(pvi.apply(i, x), x, wall)
            xp = tree.keys[xpv]
            d1 = len(xp ^ pv.apply(i, xp))
            d2 = len(xp ^ pv.apply(i, pv.apply(i, xp)))
            hyper = d1 > 0 and d2 == 2 * d1
            checks = [("v x inside V", c1), ("v^-1 x inside V", c2),
                      ("v in Gamma", in_gamma), (f"x' on the axis of v, amplitude {d1}", hyper)]
            if all(ok for _, ok in checks):
                return v, (r1, r2), checks, d1
    return None


def certify_free_pair(ctx: CongruenceContext, partition: OrbitPartition, gamma: GroupElement,
                      radius: int = 5, max_radius: int = 8) -> tuple[PingPongResult, int]:
    """Find a tree where gamma translates and a ping-pong partner v, growing the truncation."""
    if not ctx.is_in_gamma(gamma) or gamma.is_identity():
        raise ValueError("gamma must be a non-trivial element of Gamma")
    last = None
    for r in range(radius, max_radius + 1):
        forest = build_forest(ctx, partition, r)
        for i in range(partition.lam):
            act = detect_translation(ctx, forest, i, gamma)
            if act.kind != "translation":
                continue
            try:
                return ping_pong_pair(ctx, forest, i, [act.witness]), r
            except (ValueError, TruncationTooSmall) as exc:
                last = exc
    raise TruncationTooSmall(f"no ping-pong pair up to radius {max_radius}: {last}")


@dataclass
class FreenessResult:
    free: bool
    max_len: int
    words_checked: int
    relation: str | None = None

    def __bool__(self):
        return self.free


def freeness_check(h: GroupElement, v: GroupElement, max_len: int, cap: int = 2_000_000) -> FreenessResult:
    """No non-empty reduced word in h^+-1, v^+-1 of length <= max_len is the identity."""
    if h.is_identity() or v.is_identity():
        raise ValueError("h and v must be non-trivial")
    G = h.group
    letters = [h.mat, h.inv, v.mat, v.inv]
    names = ["h", "H", "v", "V"]
    inverse = [1, 0, 3, 2]
    eye = G.identity.key
    level_mats = np.stack(letters)
    level_last = [0, 1, 2, 3]
    level_words = ["h", "H", "v", "V"]
    checked = 0
    for length in range(1, max_len + 1):
        if length > 1:
            new_mats, new_last, new_words = [], [], []
            prods = [G.mul_batch(level_mats, letters[c]) for c in range(4)]
            for k, last in enumerate(level_last):
                for c in range(4):
                    if c == inverse[last]:
                        continue
                    new_mats.append(prods[c][k])
                    new_last.append(c)
                    new_words.append(level_words[k] + names[c])
            level_mats = _stack_mats(new_mats)
            level_last, level_words = new_last, new_words
        checked += len(level_last)
        if checked > cap:
            raise ResourceCapExceeded("freeness check exceeded its word cap")
        for k in range(len(level_last)):
            if mat_key(level_mats[k]) == eye:
                return FreenessResult(False, max_len, checked, level_words[k])
    return FreenessResult(True, max_len, checked)


def _stack_mats(mats):
    if any(m.dtype == object for m in mats):
        return np.stack([m.astype(object) for m in mats])
    return np.stack(mats)
