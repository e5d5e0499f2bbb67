"""Exact element arithmetic in the geometric representation.

Elements are stored as integer coefficient arrays of shape (n, n, d) over
Z[theta] together with the matrix of the inverse.  Two elements are equal
exactly when their matrices are (the representation is faithful), so the
raw bytes of the canonical array serve as a hash key.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .system import CoxeterSystem

DEFAULT_BALL_CAP = 10**6


class ResourceCapExceeded(RuntimeError):
    """An enumeration would exceed its configured element limit."""


def mat_key(m: np.ndarray):
    if m.dtype == np.int64:
        return m.tobytes()
    c = kernels.canonical(m)
    if c.dtype == np.int64:
        return c.tobytes()
    return tuple(int(x) for x in c.flat)


class GroupElement:
    __slots__ = ("group", "mat", "inv", "_word", "_key")

    def __init__(self, group: "Group", mat: np.ndarray, inv: np.ndarray, word=None):
        self.group = group
        self.mat = kernels.canonical(mat)
        self.inv = kernels.canonical(inv)
        self._word = None if word is None else tuple(word)
        self._key = None

    @property
    def key(self):
        if self._key is None:
            self._key = mat_key(self.mat)
        return self._key

    @property
    def word(self) -> tuple[int, ...]:
        if self._word is None:
            self._word = self.group.shortlex_word(self)
        return self._word

    def __len__(self) -> int:
        return len(self.word)

    def length(self) -> int:
        return self.group.length(self)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return self.group.multiply(self, other)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.group, self.inv, self.mat)

    def __pow__(self, k: int) -> "GroupElement":
        base = self if k >= 0 else self.inverse()
        out = self.group.identity
        for _ in range(abs(k)):
            out = out * base
        return out

    def conjugate(self, g: "GroupElement") -> "GroupElement":
        """g self g^-1."""
        return g * self * g.inverse()

    def is_identity(self) -> bool:
        return self.key == self.group.identity.key

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.group.system != self.group.system:
            return False
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"<{self.group.system.format_word(self.word)}>"

    def __str__(self) -> str:
        return self.group.system.format_word(self.word)


@dataclass
class Reflection:
    """A reflection t = w s w^-1 together with its positive root."""

    id: int
    root: np.ndarray
    conj_word: tuple[int, ...]
    simple: int
    group: "Group"

    @cached_property
    def element(self) -> GroupElement:
        g = self.group.element(self.conj_word)
        return g * self.group.gens[self.simple] * g.inverse()

    @property
    def word(self) -> tuple[int, ...]:
        return self.element.word

    def __hash__(self):
        return hash((self.id, id(self.group)))

    def __eq__(self, other):
        return isinstance(other, Reflection) and other.group is self.group and other.id == self.id

    def __repr__(self):
        return f"Reflection({self.id}: {self.group.system.format_word(self.word)})"


class RootRegistry:
    """Interns positive roots; a reflection is identified with its root id."""

    def __init__(self, group: "Group"):
        self.group = group
        self.roots: list[np.ndarray] = []
        self.conj: list[tuple[tuple[int, ...], int]] = []
        self.depth: list[int | None] = []
        self.index: dict = {}
        self._refl: dict[int, Reflection] = {}
        for s in range(group.n):
            e = np.zeros((group.n, group.d), dtype=np.int64)
            e[s, 0] = 1
            self.add(e, (), s, depth=1)

    def __len__(self) -> int:
        return len(self.roots)

    def add(self, root: np.ndarray, conj_word, s: int, depth=None) -> int:
        root = kernels.canonical(root)
        k = mat_key(root)
        rid = self.index.get(k)
        if rid is None:
            rid = len(self.roots)
            self.index[k] = rid
            self.roots.append(root)
            self.conj.append((tuple(conj_word), s))
            self.depth.append(depth)
        elif depth is not None and self.depth[rid] is None:
            self.depth[rid] = depth
        return rid

    def lookup(self, root: np.ndarray):
        return self.index.get(mat_key(kernels.canonical(root)))

    def reflection(self, rid: int) -> Reflection:
        r = self._refl.get(rid)
        if r is None:
            w, s = self.conj[rid]
            r = Reflection(rid, self.roots[rid], w, s, self.group)
            self._refl[rid] = r
        return r


class Ball:
    """Breadth-first enumeration of {g : l(g) <= radius} in ShortLex order.

    Sphere k+1 is generated from sphere k processed in ShortLex order with
    generators ascending; the first hit of an element is its ShortLex word,
    since a prefix of a ShortLex-minimal word is ShortLex-minimal.
    """

    def __init__(self, group: "Group", cap: int = DEFAULT_BALL_CAP):
        self.group = group
        self.cap = cap
        g = group.system
        self.mats = g.identity[None].copy()
        self.invs = g.identity[None].copy()
        self.words: list[tuple[int, ...]] = [()]
        self.parent = [-1]
        self.last = [-1]
        self.index = {mat_key(g.identity): 0}
        self.offsets = [0, 1]  # sphere k occupies offsets[k]:offsets[k+1]
        self._inv_sets: list[frozenset] = [frozenset()]
        self.walls: dict[tuple[int, int], int] = {}

    @property
    def radius(self) -> int:
        return len(self.offsets) - 2

    def grow(self, radius: int) -> None:
        G = self.group
        n = G.n
        while self.radius < radius:
            a, b = self.offsets[-2], self.offsets[-1]
            if a == b:  # finite group exhausted
                self.offsets.append(b)
                continue
            right = [G.mul_batch(self.mats[a:b], G.gen_mats[s]) for s in range(n)]
            left = [G.mul_batch(self.invs[a:b], G.gen_mats[s], left=True) for s in range(n)]
            new_m, new_i = [], []
            for i in range(b - a):
                for s in range(n):
                    k = mat_key(right[s][i])
                    if k in self.index:
                        continue
                    if len(self.words) >= self.cap:
                        raise ResourceCapExceeded(f"ball enumeration exceeded {self.cap} elements")
                    self.index[k] = len(self.words)
                    self.words.append(self.words[a + i] + (s,))
                    self.parent.append(a + i)
                    self.last.append(s)
                    new_m.append(right[s][i])
                    new_i.append(left[s][i])
            if new_m:
                self.mats = _stack(self.mats, new_m)
                self.invs = _stack(self.invs, new_i)
            self.offsets.append(len(self.words))

    def count(self, radius: int) -> int:
        self.grow(radius)
        return self.offsets[radius + 1]

    def sphere_range(self, radius: int) -> range:
        self.grow(radius)
        return range(self.offsets[radius], self.offsets[radius + 1])

    def length(self, i: int) -> int:
        return len(self.words[i])

    def element(self, i: int) -> GroupElement:
        g = GroupElement(self.group, self.mats[i], self.invs[i], self.words[i])
        return g

    def find(self, g: GroupElement):
        return self.index.get(g.key)

    def inversion_ids(self, i: int) -> frozenset:
        """N_g as root ids: N_{gs} = N_g + {g s g^-1} when l(gs) > l(g)."""
        sets = self._inv_sets
        if i < len(sets):
            return sets[i]
        reg = self.group.registry
        for j in range(len(sets), i + 1):
            p, s = self.parent[j], self.last[j]
            root = self.mats[p][:, s, :]
            rid = reg.add(root, self.words[p], s)
            sets.append(sets[p] | {rid})
        return sets[i]


def _stack(base: np.ndarray, rows: list[np.ndarray]) -> np.ndarray:
    new = np.stack(rows)
    if base.dtype != new.dtype:
        base, new = base.astype(object), new.astype(object)
    return np.concatenate([base, new])


class BallView:
    """The elements of length <= radius, in ShortLex order."""

    def __init__(self, ball: Ball, radius: int):
        self.ball = ball
        self.radius = radius
        self.size = ball.count(radius)

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        for i in range(self.size):
            yield self.ball.element(i)

    def __contains__(self, g: GroupElement) -> bool:
        i = self.ball.find(g)
        return i is not None and i < self.size

    def elements(self) -> list[GroupElement]:
        return list(self)

    def sphere(self, k: int) -> list[GroupElement]:
        if k > self.radius:
            raise ValueError("sphere beyond ball radius")
        return [self.ball.element(i) for i in self.ball.sphere_range(k)]


class Group:
    """The Coxeter group of a system acting through its geometric representation."""

    def __init__(self, system: CoxeterSystem, ball_cap: int = DEFAULT_BALL_CAP):
        self.system = system
        self.n = system.rank
        self.d = system.degree
        self.field = system.field
        self.red = system.field.reduction
        self.red64 = system.field.reduction_i64
        self.gen_mats = system.gens
        self.identity = GroupElement(self, system.identity, system.identity, ())
        self.gens = [GroupElement(self, system.gens[s], system.gens[s], (s,)) for s in range(self.n)]
        self._powers = self.field.theta ** np.arange(self.d)
        self.registry = RootRegistry(self)
        self._ball = Ball(self, ball_cap)
        self._root_depth_done = 1

    def __repr__(self) -> str:
        return f"Group({self.system!r})"

    # ---- arithmetic ----------------------------------------------------
    def mul_batch(self, A: np.ndarray, B: np.ndarray, left: bool = False) -> np.ndarray:
        """A[k] @ B for a batch A (or B @ A[k] when ``left``)."""
        return kernels.matmul(A, B, self.red, self.red64, left=left)

    def matmul(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return self.mul_batch(X[None], Y)[0]

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        if g.group.system != self.system or h.group.system != self.system:
            raise ValueError("cannot multiply elements of different Coxeter systems")
        return GroupElement(self, self.matmul(g.mat, h.mat), self.matmul(h.inv, g.inv))

    def invert(self, g: GroupElement) -> GroupElement:
        return g.inverse()

    def simple_reflection(self, s) -> GroupElement:
        return self.gens[self.system.index(s)]

    def element(self, word) -> GroupElement:
        """The element spelled by ``word`` (names, indices, or a space separated string)."""
        word = self.system.parse_word(word)
        m, inv = self.system.identity, self.system.identity
        for s in word:
            m = self.matmul(m, self.gen_mats[s])
        for s in reversed(word):
            inv = self.matmul(inv, self.gen_mats[s])
        return GroupElement(self, m, inv)

    def normal_form(self, word) -> GroupElement:
        g = self.element(word)
        g.word  # noqa: B018 - force the ShortLex computation
        return g

    # ---- signs and descents -------------------------------------------
    def root_sign(self, vec: np.ndarray) -> int:
        """Sign of a root given as (n, d) coefficients: +1 positive, -1 negative."""
        vals = np.asarray(vec, dtype=float) @ self._powers
        k = int(np.argmax(np.abs(vals)))
        scale = float(np.abs(np.asarray(vec, dtype=float)).sum()) * max(1.0, abs(self.field.theta)) ** self.d
        if abs(vals[k]) > 1e-9 * scale:
            return 1 if vals[k] > 0 else -1
        for row in vec:
            sg = self.field.sign([int(c) for c in row])
            if sg:
                return sg
        raise ArithmeticError("zero vector is not a root")

    def right_descents(self, g: GroupElement) -> list[int]:
        return [s for s in range(self.n) if self.root_sign(g.mat[:, s, :]) < 0]

    def left_descents(self, g: GroupElement) -> list[int]:
        return [s for s in range(self.n) if self.root_sign(g.inv[:, s, :]) < 0]

    def _is_identity_mat(self, m) -> bool:
        return mat_key(m) == self.identity.key

    def length(self, g: GroupElement) -> int:
        """l(g) by greedy right descents: while g != e replace g by gs for the least descent s."""
        m = g.mat
        steps = 0
        while not self._is_identity_mat(m):
            s = next(s for s in range(self.n) if self.root_sign(m[:, s, :]) < 0)
            m = self.matmul(m, self.gen_mats[s])
            steps += 1
        return steps

    def shortlex_word(self, g: GroupElement) -> tuple[int, ...]:
        """Greedy least left descent; yields the ShortLex-minimal reduced word."""
        inv = g.inv
        word = []
        while not self._is_identity_mat(inv):
            s = next(s for s in range(self.n) if self.root_sign(inv[:, s, :]) < 0)
            word.append(s)
            inv = self.matmul(inv, self.gen_mats[s])
        return tuple(word)

    # ---- balls ---------------------------------------------------------
    def ball(self, n: int) -> BallView:
        if n < 0:
            raise ValueError("radius must be non-negative")
        return BallView(self._ball, n)

    def sphere(self, n: int) -> list[GroupElement]:
        return self.ball(n).sphere(n)

    @property
    def cache(self) -> Ball:
        return self._ball

    # ---- roots, reflections, inversion sets ---------------------------
    def _grow_roots(self, depth: int, cap: int = DEFAULT_BALL_CAP) -> None:
        reg = self.registry
        while self._root_depth_done < depth:
            cur = self._root_depth_done
            layer = [i for i, dp in enumerate(reg.depth) if dp == cur]
            for rid in layer:
                beta = reg.roots[rid]
                pf = self.system.pair_form(beta)
                w, s0 = reg.conj[rid]
                for s in range(self.n):
                    c = pf[s]
                    if not any(c) or self.field.sign([int(x) for x in c]) >= 0:
                        continue
                    new = beta.astype(object) if beta.dtype == object else beta.copy()
                    new[s] = new[s] - c
                    if len(reg) >= cap:
                        raise ResourceCapExceeded(f"root enumeration exceeded {cap} roots")
                    reg.add(new, (s,) + w, s0, depth=cur + 1)
            self._root_depth_done = cur + 1

    def reflections_up_to(self, n: int) -> list[Reflection]:
        """All reflections of length <= n (a root of depth k gives a reflection of length 2k-1)."""
        if n < 1:
            return []
        depth = (n + 1) // 2
        self._grow_roots(depth)
        reg = self.registry
        ids = [i for i, dp in enumerate(reg.depth) if dp is not None and dp <= depth]
        ids.sort(key=lambda i: (reg.depth[i], i))
        return [reg.reflection(i) for i in ids]

    def inversion_roots(self, g: GroupElement) -> list[np.ndarray]:
        """beta_k = sigma(s_1 ... s_{k-1}) alpha_{s_k} along the ShortLex word."""
        out = []
        m = self.system.identity
        for s in g.word:
            out.append(m[:, s, :].copy())
            m = self.matmul(m, self.gen_mats[s])
        return out

    def inversion_set(self, g: GroupElement) -> frozenset:
        """N_g = {t : l(tg) < l(g)} as a set of root ids."""
        i = self._ball.find(g) if len(g.word) <= self._ball.radius else None
        if i is not None:
            return self._ball.inversion_ids(i)
        out = []
        m = self.system.identity
        w = g.word
        for k, s in enumerate(w):
            out.append(self.registry.add(m[:, s, :], w[:k], s))
            m = self.matmul(m, self.gen_mats[s])
        return frozenset(out)

    def inversion_reflections(self, g: GroupElement) -> list[Reflection]:
        return [self.registry.reflection(i) for i in sorted(self.inversion_set(g))]

    def inversion_set_by_roots(self, g: GroupElement) -> frozenset:
        """Positive roots made negative by sigma(g^-1); an independent route to N_g."""
        hits = []
        for rid, beta in enumerate(self.registry.roots):
            img = self.matmul(g.inv, _as_col(beta))[:, 0, :]
            if self.root_sign(img) < 0:
                hits.append(rid)
        return frozenset(hits)

    def reflection_matrix(self, beta: np.ndarray) -> np.ndarray:
        """sigma(r_beta) = I - beta (2B beta)^T."""
        pf = self.system.pair_form(beta)  # pf[t] = 2B(e_t, beta)
        n = self.n
        out = self.system.identity.astype(object).copy()
        for i in range(n):
            for j in range(n):
                out[i, j] = np.array(out[i, j], dtype=object) - np.array(
                    self.field.mul_vec([int(x) for x in beta[i]], [int(x) for x in pf[j]]), dtype=object)
        return kernels.canonical(out)

    def root_of(self, t: GroupElement) -> int:
        """Root id of a reflection element; raises ValueError if t is not a reflection."""
        w = t.word
        m = self.system.identity
        for k, s in enumerate(w):
            beta = m[:, s, :]
            if mat_key(self.reflection_matrix(beta)) == t.key:
                return self.registry.add(beta, w[:k], s)
            m = self.matmul(m, self.gen_mats[s])
        raise ValueError("element is not a reflection")

    def conjugate_root(self, g: GroupElement, rid: int) -> int:
        """Root id of g t g^-1 where t has root id ``rid``."""
        reg = self.registry
        img = self.matmul(g.mat, _as_col(reg.roots[rid]))[:, 0, :]
        w, s = reg.conj[rid]
        if self.root_sign(img) < 0:
            img = -img
        return reg.add(img, tuple(g.word) + w, s)

    def is_reflection(self, g: GroupElement) -> bool:
        try:
            self.root_of(g)
            return True
        except ValueError:
            return False


def _as_col(beta: np.ndarray) -> np.ndarray:
    n, d = beta.shape
    out = np.zeros((n, n, d), dtype=beta.dtype)
    out[:, 0, :] = beta
    return out


_GROUPS: dict = {}


def group_of(system: CoxeterSystem) -> Group:
    """Shared Group instance per system (caches balls and roots)."""
    g = _GROUPS.get(system.cm)
    if g is None:
        g = _GROUPS[system.cm] = Group(system)
    return g
