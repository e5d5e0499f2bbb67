"""Congruence quotients, the torsion-free normal subgroup Gamma, reflection orbits.

The reduction Z[theta] -> F_p[x]/(phi) (phi an irreducible factor of the
minimal polynomial mod p) maps G onto a finite matrix group Gbar.  Gamma is
the preimage of a normal subgroup Nbar of Gbar meeting no non-trivial image
of a finite parabolic subgroup.  Every finite subgroup of G is conjugate into
a finite parabolic, so Gamma is torsion free; Nbar = {e} gives the plain
congruence kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .classify import finite_subsets
from .group import Group, GroupElement, ResourceCapExceeded, group_of, mat_key
from .system import CoxeterSystem

DEFAULT_QUOTIENT_CAP = 500_000


class BadPrimeError(ValueError):
    """The prime cannot be used for a congruence construction."""


class CoverageError(LookupError):
    """A reflection needed for the computation lies outside the enumerated set."""


def _polymod(coeffs: list[int], phi: list[int], p: int) -> list[int]:
    c = [x % p for x in coeffs]
    f = len(phi) - 1
    for top in range(len(c) - 1, f - 1, -1):
        lead = c[top]
        if lead:
            for i in range(f + 1):
                c[top - f + i] = (c[top - f + i] - lead * phi[i]) % p
    c = c[:f] + [0] * max(0, f - len(c))
    return c


def _power_table(count: int, phi: list[int], p: int) -> np.ndarray:
    f = len(phi) - 1
    out = np.zeros((count, f), dtype=np.int64)
    for e in range(count):
        v = [0] * (e + 1)
        v[e] = 1
        out[e] = _polymod(v, phi, p)
    return out


class Quotient:
    """The finite group Gbar, enumerated by breadth-first search with Cayley tables."""

    def __init__(self, system: CoxeterSystem, p: int, gens: np.ndarray, red: np.ndarray, cap: int):
        self.p = p
        self.red = red
        n = system.rank
        self.n = n
        f = gens.shape[-1]
        eye = np.zeros((n, n, f), dtype=np.int64)
        eye[np.arange(n), np.arange(n), 0] = 1
        mats = [eye]
        index = {eye.tobytes(): 0}
        parent, last = [-1], [-1]
        right_rows = []
        a = 0
        while a < len(mats):
            b = len(mats)
            batch = np.stack(mats[a:b])
            prods = [kernels.matmul(batch, gens[s], red, red, p=p) for s in range(n)]
            for i in range(b - a):
                row = []
                for s in range(n):
                    k = prods[s][i].tobytes()
                    j = index.get(k)
                    if j is None:
                        if len(mats) >= cap:
                            raise ResourceCapExceeded(f"quotient group exceeded {cap} elements")
                        j = index[k] = len(mats)
                        mats.append(prods[s][i])
                        parent.append(a + i)
                        last.append(s)
                    row.append(j)
                right_rows.append(row)
            a = b
        self.mats = np.stack(mats)
        self.index = index
        self.order = len(mats)
        self.parent = np.array(parent)
        self.last = np.array(last)
        self.right = np.array(right_rows, dtype=np.int64)
        left = np.empty_like(self.right)
        for s in range(n):
            prods = kernels.matmul(self.mats, gens[s], red, red, p=p, left=True)
            left[:, s] = [index[m.tobytes()] for m in prods]
        self.left = left
        self._words: dict[int, tuple[int, ...]] = {0: ()}

    def word(self, i: int) -> tuple[int, ...]:
        w = self._words.get(i)
        if w is None:
            out = []
            j = i
            while j:
                out.append(int(self.last[j]))
                j = int(self.parent[j])
            w = self._words[i] = tuple(reversed(out))
        return w

    def walk(self, x, word):
        """x . word, vectorized over an index array x."""
        x = np.asarray(x)
        for s in word:
            x = self.right[x, s]
        return x

    def mul(self, x, y: int):
        return self.walk(x, self.word(y))

    def inv(self, x: int) -> int:
        return int(self.walk(0, reversed(self.word(x))))

    def lookup(self, mat: np.ndarray):
        return self.index.get(mat.tobytes())

    def subgroup(self, gens) -> np.ndarray:
        """Boolean mask of the subgroup generated by the given elements."""
        mask = np.zeros(self.order, dtype=bool)
        mask[0] = True
        frontier = np.array([0])
        gens = [g for g in dict.fromkeys(int(g) for g in gens) if g != 0]
        while frontier.size:
            found = []
            for g in gens:
                y = self.mul(frontier, g)
                y = y[~mask[y]]
                if y.size:
                    y = np.unique(y)
                    mask[y] = True
                    found.append(y)
            frontier = np.unique(np.concatenate(found)) if found else np.array([], dtype=np.int64)
        return mask

    def left_cosets(self, gens) -> tuple[np.ndarray, int]:
        """Label x by its coset xK, K = <gens>; labels ordered by least member."""
        N = self.order
        gens = [int(g) for g in dict.fromkeys(gens) if g != 0]
        if not gens:
            return np.arange(N), N
        src = np.concatenate([np.arange(N)] * len(gens))
        dst = np.concatenate([self.mul(np.arange(N), g) for g in gens])
        graph = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(N, N))
        count, labels = connected_components(graph, directed=False)
        first = np.full(count, N)
        np.minimum.at(first, labels, np.arange(N))
        order = np.argsort(first)
        rank = np.empty(count, dtype=np.int64)
        rank[order] = np.arange(count)
        return rank[labels], count

    def conjugacy_classes(self) -> np.ndarray:
        """Class label per element (conjugation by generators suffices)."""
        N = self.order
        src = np.concatenate([np.arange(N)] * self.n)
        dst = np.concatenate([self.left[self.right[:, s], s] for s in range(self.n)])
        graph = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(N, N))
        count, labels = connected_components(graph, directed=False)
        first = np.full(count, N)
        np.minimum.at(first, labels, np.arange(N))
        order = np.argsort(first)
        rank = np.empty(count, dtype=np.int64)
        rank[order] = np.arange(count)
        return rank[labels]


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p**0.5) + 1))


def prime_obstructions(system: CoxeterSystem, p: int) -> list[str]:
    out = []
    if not isinstance(p, int) or not _is_prime(p):
        out.append(f"{p} is not a prime")
        return out
    if p == 2:
        out.append("2 is even (Gram entries have denominator 2)")
    mp = system.field.minpoly
    if len(mp) > 2:
        x = sympy.Symbol("x")
        disc = int(sympy.discriminant(sympy.Poly(list(reversed(mp)), x)))
        if disc % p == 0:
            out.append(f"{p} divides the discriminant {disc} of the minimal polynomial (ramified)")
    return out


def default_prime(system: CoxeterSystem, limit: int = 200) -> int:
    """Smallest odd unramified prime whose quotient is faithful on finite
    parabolics and has at most 50000 elements."""
    return _default_context(system, limit).prime


def _default_context(system: CoxeterSystem, limit: int = 200, enlarge: bool = True,
                     quotient_cap: int = 50_000) -> "CongruenceContext":
    for p in range(3, limit, 2):
        if prime_obstructions(system, p):
            continue
        try:
            return CongruenceContext(system, p, enlarge=enlarge, quotient_cap=quotient_cap)
        except (BadPrimeError, ResourceCapExceeded):
            continue
    raise BadPrimeError("no usable prime below the search limit")


class CongruenceContext:
    """Reduction data, the finite quotient Gbar and the subgroup Nbar defining Gamma."""

    def __init__(self, system: CoxeterSystem, prime: int, enlarge: bool = True,
                 quotient_cap: int = DEFAULT_QUOTIENT_CAP, group: Group | None = None):
        obstructions = prime_obstructions(system, prime)
        if obstructions:
            raise BadPrimeError("; ".join(obstructions))
        self.system = system
        self.group = group or group_of(system)
        self.prime = p = prime
        self.enlarge = enlarge
        x = sympy.Symbol("x")
        mp = system.field.minpoly
        facs = sympy.Poly(list(reversed(mp)), x, modulus=p).factor_list()[1]
        cands = []
        for fac, _ in facs:
            c = [int(v) % p for v in reversed(fac.all_coeffs())]
            inv = pow(c[-1], -1, p)
            cands.append([(v * inv) % p for v in c])
        self.phi = tuple(min(cands, key=lambda c: (len(c), list(reversed(c)))))
        f = self.f = len(self.phi) - 1
        self.proj = _power_table(system.degree, list(self.phi), p)
        self.red = _power_table(max(2 * f - 1, 1), list(self.phi), p)
        self.gen_images = np.stack([self.reduce(system.gens[s]) for s in range(system.rank)])
        self._check_homomorphism()
        self.quotient = Quotient(system, p, self.gen_images, self.red, quotient_cap)
        self.spherical = self._spherical_images()
        self.nbar_gens: list[int] = []
        self.nbar = np.zeros(self.quotient.order, dtype=bool)
        self.nbar[0] = True
        if enlarge:
            self._enlarge()
        self._ball_images: list[int] = []

    def __repr__(self) -> str:
        return f"CongruenceContext(p={self.prime}, |Gbar|={self.quotient.order}, |Nbar|={self.nbar_order})"

    # ---- reduction -----------------------------------------------------
    def reduce(self, mat: np.ndarray) -> np.ndarray:
        m = np.asarray(mat)
        if m.dtype == object:
            m = (m % self.prime).astype(np.int64)
        else:
            m = m % self.prime
        return (m @ self.proj) % self.prime

    def _check_homomorphism(self) -> None:
        G = self.group
        for s in range(G.n):
            for t in range(G.n):
                lhs = self.reduce(G.matmul(G.gen_mats[s], G.gen_mats[t]))
                rhs = kernels.matmul(self.gen_images[s][None], self.gen_images[t], self.red, self.red, p=self.prime)[0]
                if not np.array_equal(lhs, rhs):
                    raise AssertionError("reduction is not multiplicative on generator pairs")

    def image(self, g: GroupElement) -> int:
        i = self.quotient.lookup(self.reduce(g.mat))
        if i is None:
            raise AssertionError("reduced matrix missing from the enumerated quotient")
        return i

    def image_of_word(self, word) -> int:
        return int(self.quotient.walk(0, word))

    def ball_images(self, count: int) -> np.ndarray:
        """Quotient index of the first ``count`` ball elements (ShortLex order)."""
        ball = self.group.cache
        imgs = self._ball_images
        if len(imgs) < count:
            ball.count(0)
            for i in range(len(imgs), count):
                p = ball.parent[i]
                imgs.append(0 if p < 0 else int(self.quotient.right[imgs[p], ball.last[i]]))
        return np.array(imgs[:count], dtype=np.int64)

    # ---- Gamma ---------------------------------------------------------
    def _spherical_images(self) -> np.ndarray:
        """Mask of images of finite parabolic subgroups; checks they embed faithfully."""
        Q = self.quotient
        mask = np.zeros(Q.order, dtype=bool)
        self.finite_parabolics = []
        for J in finite_subsets(self.system.cm):
            sub = Group(CoxeterSystem(self.system.cm.restrict(J)))
            ball = sub.cache
            r = 0
            while True:
                ball.grow(r + 1)
                if ball.offsets[-1] == ball.offsets[-2]:
                    break
                r += 1
            order = ball.offsets[-1]
            img = Q.subgroup([Q.right[0, s] for s in J])
            if int(img.sum()) != order:
                raise BadPrimeError(
                    f"finite parabolic {{{' '.join(self.system.names[j] for j in J)}}} of order {order} "
                    f"does not embed mod {self.prime} (image order {int(img.sum())})")
            self.finite_parabolics.append((J, order))
            mask |= img
        mask[0] = False
        return mask

    def _enlarge(self) -> None:
        """Greedy maximal normal Nbar avoiding the finite parabolic images."""
        Q = self.quotient
        labels = Q.conjugacy_classes()
        reps = {}
        for x in range(Q.order):
            reps.setdefault(int(labels[x]), x)
        for lab in sorted(reps):
            cls = np.flatnonzero(labels == lab)
            if self.nbar[cls].all() or self.spherical[cls].any():
                continue
            cand = Q.subgroup(self.nbar_gens + [int(c) for c in cls])
            if not (cand & self.spherical).any():
                self.nbar = cand
                self.nbar_gens = self.nbar_gens + [int(c) for c in cls]
        # keep a small generating set
        gens: list[int] = []
        H = np.zeros(Q.order, dtype=bool)
        H[0] = True
        for g in self.nbar_gens:
            if not H[g]:
                gens.append(g)
                H = Q.subgroup(gens)
        self.nbar_gens = gens

    @property
    def nbar_order(self) -> int:
        return int(self.nbar.sum())

    @property
    def index(self) -> int:
        """[G : Gamma] = |Gbar| / |Nbar|."""
        return self.quotient.order // self.nbar_order

    def is_in_gamma(self, g: GroupElement) -> bool:
        return bool(self.nbar[self.image(g)])

    def gamma_ball(self, radius: int) -> list[int]:
        """Ball indices (ShortLex order) of Gamma-elements of length <= radius."""
        n = self.group.cache.count(radius)
        return [int(i) for i in np.flatnonzero(self.nbar[self.ball_images(n)])]


def build_context(system: CoxeterSystem, prime: int | None = None, enlarge: bool = True) -> CongruenceContext:
    if prime is None:
        return _default_context(system, enlarge=enlarge)
    return CongruenceContext(system, prime, enlarge=enlarge)


def is_in_gamma(ctx: CongruenceContext, g: GroupElement) -> bool:
    return ctx.is_in_gamma(g)


@dataclass
class TorsionReport:
    radius: int
    max_order: int
    checked: int
    torsion: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.torsion

    def summary(self) -> str:
        if self.ok and not self.checked:
            return f"vacuous: Gamma has no non-trivial element of length <= {self.radius}"
        if self.ok:
            return f"no torsion found up to radius {self.radius} (orders <= {self.max_order}, {self.checked} elements)"
        return f"torsion found: {self.torsion[:3]}"


def torsion_certificate(ctx: CongruenceContext, radius: int, max_order: int = 12) -> TorsionReport:
    """No non-identity gamma in Gamma of length <= radius has gamma^k = e for k <= max_order."""
    G = ctx.group
    rep = TorsionReport(radius, max_order, 0)
    for i in ctx.gamma_ball(radius):
        if i == 0:
            continue
        g = G.cache.element(i)
        rep.checked += 1
        m = g.mat
        for k in range(2, max_order + 1):
            m = G.matmul(m, g.mat)
            if mat_key(m) == G.identity.key:
                rep.torsion.append((str(g), k))
                break
    return rep


# ---- orbits ----------------------------------------------------------------

@dataclass
class OrbitPartition:
    ctx: CongruenceContext
    method: str
    refl_radius: int
    conj_radius: int
    lam: int
    status: str
    certified: bool
    lower_bound: int
    history: list[int]
    members: list[list[int]]
    _label: dict = field(repr=False, default_factory=dict)
    classes: list = field(repr=False, default_factory=list)

    def orbit_of(self, rid: int) -> int:
        lab = self._label.get(rid)
        if lab is None:
            if self.method != "coset":
                raise CoverageError(f"reflection {rid} outside the enumerated set")
            lab = self._label[rid] = _coset_label(self, rid)
        return lab

    @property
    def orbit_sizes(self) -> list[int]:
        return [len(m) for m in self.members]

    def orbit_ids(self, rids) -> list[int]:
        return [self.orbit_of(r) for r in rids]

    def representative(self, i: int) -> int:
        """Root id of a reflection in orbit i (smallest enumerated, else a quotient-built one)."""
        if self.members[i]:
            return self.members[i][0]
        if self.method != "coset":
            raise CoverageError(f"orbit {i} has no enumerated member")
        c = next(c for c in self.classes if c.offset <= i < c.offset + c.count)
        Q = self.ctx.quotient
        x = int(np.flatnonzero(c.coset == i - c.offset)[0])
        w = Q.word(x)
        G = self.ctx.group
        g = G.element(w)
        rid = G.registry.add(G.matmul(g.mat, _col(G, c.s0))[:, 0, :], w, c.s0)
        assert self.orbit_of(rid) == i
        return rid


@dataclass
class _ClassData:
    s0: int
    conjugators: dict  # simple s -> word u with s = u s0 u^-1
    coset: np.ndarray
    count: int
    offset: int
    centralizer_images: list

    @property
    def firsts(self) -> np.ndarray:
        # least quotient element of each coset (cosets are numbered by least member)
        out = np.full(self.count, -1)
        seen = np.unique(self.coset, return_index=True)
        out[seen[0]] = seen[1]
        return out


def _col(G: Group, s: int) -> np.ndarray:
    out = np.zeros((G.n, G.n, G.d), dtype=np.int64)
    out[s, 0, 0] = 1
    return out


def _simple_classes(G: Group) -> list[tuple[int, dict]]:
    """G-conjugacy classes of simple reflections with explicit conjugators."""
    cm = G.system.cm
    n = G.n
    seen = {}
    out = []
    for s0 in range(n):
        if s0 in seen:
            continue
        # odd-labelled edges connect conjugate generators
        comp, stack = {s0}, [s0]
        while stack:
            a = stack.pop()
            for b in range(n):
                m = cm.labels[a][b]
                if b not in comp and m != 1 and m != float("inf") and m % 2 == 1:
                    comp.add(b)
                    stack.append(b)
        conj = {s0: ()}
        need = set(comp) - {s0}
        r = 0
        ball = G.cache
        while need:
            r += 1
            for i in ball.sphere_range(r):
                col = ball.mats[i][:, s0, :]
                for s in list(need):
                    e = np.zeros_like(col)
                    e[s, 0] = 1
                    if np.array_equal(col, e) or np.array_equal(col, -e):
                        conj[s] = ball.words[i]
                        need.discard(s)
        for s in comp:
            seen[s] = s0
        out.append((s0, conj))
    return out


def _centralizer_images(ctx: CongruenceContext, s0: int, radius: int) -> list[int]:
    """Quotient images of g in ball(radius) with g alpha_s0 = +-alpha_s0 (g centralizes s0)."""
    ball = ctx.group.cache
    n = ball.count(radius)
    cols = ball.mats[:n, :, s0, :]
    e = np.zeros(cols.shape[1:], dtype=cols.dtype)
    e[s0, 0] = 1
    hit = np.all(cols == e, axis=(1, 2)) | np.all(cols == -e, axis=(1, 2))
    imgs = ctx.ball_images(n)[hit]
    return sorted(set(int(x) for x in imgs))


def _coset_label(part: OrbitPartition, rid: int) -> int:
    ctx = part.ctx
    reg = ctx.group.registry
    w, s = reg.conj[rid]
    for c in part.classes:
        if s in c.conjugators:
            x = ctx.image_of_word(tuple(w) + tuple(c.conjugators[s]))
            return c.offset + int(c.coset[x])
    raise AssertionError("generator missing from simple classes")


def _coset_lambda(ctx: CongruenceContext, conj_radius: int):
    Q = ctx.quotient
    classes = []
    offset = 0
    for s0, conj in _simple_classes(ctx.group):
        hs = _centralizer_images(ctx, s0, conj_radius)
        coset, count = Q.left_cosets(ctx.nbar_gens + hs)
        classes.append(_ClassData(s0, conj, coset, count, offset, hs))
        offset += count
    return offset, classes


def _reflection_image_bound(ctx: CongruenceContext) -> tuple[int, bool]:
    """Number of distinct images of reflections in Gbar/Nbar (a lower bound for Lambda)."""
    Q = ctx.quotient
    cls = Q.conjugacy_classes()
    ncos, _ = Q.left_cosets(ctx.nbar_gens)
    total = 0
    for s0, _ in _simple_classes(ctx.group):
        members = np.flatnonzero(cls == cls[Q.right[0, s0]])
        total += len(set(ncos[members].tolist()))
    return total, True


def gamma_orbits(ctx: CongruenceContext, refl_radius: int, conj_radius: int, method: str = "coset") -> OrbitPartition:
    """Gamma-conjugacy orbits of reflections.

    ``method="coset"``: a reflection t = g s g^-1 is labelled by the coset
    gbar K_s in Gbar, K_s = Nbar * H_s with H_s generated by images of
    centralizer elements of s found in ball(conj_radius).  Distinct labels
    can only over-count orbits; when K_s reaches the full preimage of the
    centralizer of sbar in Gbar/Nbar the count is exact.

    ``method="explicit"``: union-find merging t with gamma t gamma^-1 for
    gamma in Gamma of length <= conj_radius, restricted to the reflections
    of length <= refl_radius.
    """
    G = ctx.group
    refl = G.reflections_up_to(refl_radius)
    rids = [r.id for r in refl]
    lower, _ = _reflection_image_bound(ctx)
    history = []
    if method == "coset":
        radii = [max(conj_radius - 2, 0), max(conj_radius - 1, 0), conj_radius]
        for r in radii:
            lam, classes = _coset_lambda(ctx, r)
            history.append(lam)
        part = OrbitPartition(ctx, method, refl_radius, conj_radius, lam, "", False, lower, history, [], {}, classes)
        members = [[] for _ in range(lam)]
        for rid in rids:
            members[part.orbit_of(rid)].append(rid)
        part.members = members
        part.certified = lam == lower
    elif method == "explicit":
        radii = [max(conj_radius - 2, 0), max(conj_radius - 1, 0), conj_radius]
        for r in radii:
            labels = _union_find_orbits(ctx, rids, r)
            history.append(len(set(labels.values())))
        lam = history[-1]
        order = {}
        for rid in rids:
            order.setdefault(labels[rid], len(order))
        members = [[] for _ in range(lam)]
        lab = {}
        for rid in rids:
            lab[rid] = order[labels[rid]]
            members[lab[rid]].append(rid)
        part = OrbitPartition(ctx, method, refl_radius, conj_radius, lam, "", lam == lower, lower, history, members, lab)
    else:
        raise ValueError(f"unknown orbit method {method!r}")
    stable = conj_radius >= 2 and history[0] == history[-1]
    part.status = "stabilized" if (stable or part.certified) else "lower_bound"
    return part


def _union_find_orbits(ctx: CongruenceContext, rids: list[int], conj_radius: int) -> dict:
    G = ctx.group
    parent = {r: r for r in rids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    reg = G.registry
    for i in ctx.gamma_ball(conj_radius):
        if i == 0:
            continue
        g = G.cache.element(i)
        for rid in rids:
            img = G.matmul(g.mat, _as_col(reg.roots[rid]))[:, 0, :]
            if G.root_sign(img) < 0:
                img = -img
            other = reg.lookup(img)
            if other is not None and other in parent:
                a, b = find(rid), find(other)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    return {r: find(r) for r in rids}


def _as_col(beta):
    n, d = beta.shape
    out = np.zeros((n, n, d), dtype=beta.dtype)
    out[:, 0, :] = beta
    return out


def shape(ctx: CongruenceContext, partition: OrbitPartition, gamma: GroupElement) -> tuple[int, ...]:
    """Component i = |N_gamma meet T_i|."""
    if not ctx.is_in_gamma(gamma):
        raise ValueError("shape is defined for elements of Gamma only")
    out = [0] * partition.lam
    for rid in ctx.group.inversion_set(gamma):
        out[partition.orbit_of(rid)] += 1
    return tuple(out)


def pi_permutation(ctx: CongruenceContext, partition: OrbitPartition, g: GroupElement,
                   cross_check: bool = True) -> tuple[int, ...]:
    """pi(g)(i) = orbit of g t g^-1 for t in T_i."""
    G = ctx.group
    if partition.method == "coset":
        Q = ctx.quotient
        x = ctx.image(g)
        perm = []
        for c in partition.classes:
            for j in range(c.count):
                z = int(Q.mul(x, int(c.firsts[j])))
                perm.append(c.offset + int(c.coset[z]))
        perm = tuple(perm)
        if cross_check:
            for i in range(partition.lam):
                for rid in partition.members[i][:2]:
                    j = partition.orbit_of(G.conjugate_root(g, rid))
                    if j != perm[i]:
                        raise AssertionError("pi is not well defined on orbit representatives")
        return perm
    perm = []
    for i in range(partition.lam):
        targets = set()
        for rid in partition.members[i]:
            try:
                targets.add(partition.orbit_of(G.conjugate_root(g, rid)))
            except CoverageError:
                continue
        if len(targets) != 1:
            raise CoverageError(f"cannot determine pi on orbit {i}")
        perm.append(targets.pop())
    return tuple(perm)
