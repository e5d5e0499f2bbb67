"""Finitely supported functions on the group, convolution, and norm experiments.

Group arithmetic is exact; coefficients are complex doubles.  Products of
supports are resolved once into an index table, so repeated convolutions
over the same supports (randomized trials) cost one ``bincount`` each.
"""

from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .classify import INDEFINITE_NONDEGENERATE, classify_system, indecomposable_components
from .congruence import CongruenceContext, OrbitPartition, shape
from .group import DEFAULT_BALL_CAP, GroupElement, ResourceCapExceeded, mat_key

TOL = 1e-9


class BallFunction:
    """A finitely supported function G -> C."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs: dict[GroupElement, complex] = {}
        for g, c in (coeffs or {}).items():
            if c != 0:
                self.coeffs[g] = complex(c)

    @classmethod
    def delta(cls, g: GroupElement, c: complex = 1.0) -> "BallFunction":
        return cls({g: c})

    @classmethod
    def from_pairs(cls, pairs) -> "BallFunction":
        acc: dict[GroupElement, complex] = defaultdict(complex)
        for g, c in pairs:
            acc[g] += c
        return cls(acc)

    @property
    def support(self) -> list[GroupElement]:
        return list(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, g: GroupElement) -> complex:
        return self.coeffs.get(g, 0j)

    def norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def __add__(self, other: "BallFunction") -> "BallFunction":
        return BallFunction.from_pairs(list(self.coeffs.items()) + list(other.coeffs.items()))

    def __mul__(self, k: complex) -> "BallFunction":
        return BallFunction({g: k * c for g, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __sub__(self, other: "BallFunction") -> "BallFunction":
        return self + other * -1

    def __repr__(self) -> str:
        terms = ", ".join(f"{c:.4g}*{g!r}" for g, c in list(self.coeffs.items())[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"BallFunction({terms}{more})"

    def isclose(self, other: "BallFunction", tol: float = 1e-12) -> bool:
        scale = max(self.norm(), other.norm(), 1.0)
        return (self - other).norm() <= tol * scale


@dataclass
class NormEstimate:
    value: float
    kind: str
    truncation_radius: int
    iterations: int
    converged: bool = True
    ball_size: int = 0


# ---- convolution -------------------------------------------------------------------

def _mats(elems: list[GroupElement]):
    mats = [g.mat for g in elems]
    if any(m.dtype == object for m in mats):
        return np.stack([m.astype(object) for m in mats])
    return np.stack(mats)


class ProductTable:
    """All products g x for g in F, x in H, as indices into a list of distinct results."""

    def __init__(self, F: list[GroupElement], H: list[GroupElement], cap: int = DEFAULT_BALL_CAP,
                 with_elements: bool = False):
        self.F, self.H = F, H
        G = (F or H)[0].group
        index: dict = {}
        mats, invs = [], []
        table = np.empty((len(F), len(H)), dtype=np.int64)
        if F and H:
            Fm = _mats(F)
            Fi = _mats([g.inverse() for g in F]) if with_elements else None
            for j, x in enumerate(H):
                prod = G.mul_batch(Fm, x.mat)
                pinv = G.mul_batch(Fi, x.inv, left=True) if with_elements else None
                for i in range(len(F)):
                    k = mat_key(prod[i])
                    t = index.get(k)
                    if t is None:
                        if len(index) >= cap:
                            raise ResourceCapExceeded(f"convolution support exceeded {cap}")
                        t = index[k] = len(index)
                        if with_elements:
                            mats.append(prod[i])
                            invs.append(pinv[i])
                    table[i, j] = t
        self.table = table
        self.size = len(index)
        self.elements = [GroupElement(G, m, v) for m, v in zip(mats, invs)] if with_elements else None

    def norm(self, f: np.ndarray, h: np.ndarray) -> float:
        """||f * h||_2 for coefficient vectors aligned with F and H."""
        w = np.outer(f, h).ravel()
        idx = self.table.ravel()
        out = np.bincount(idx, weights=w.real, minlength=self.size).astype(complex)
        if np.iscomplexobj(w):
            out += 1j * np.bincount(idx, weights=w.imag, minlength=self.size)
        return float(np.linalg.norm(out))


def convolve(f: BallFunction, h: BallFunction, cap: int = DEFAULT_BALL_CAP) -> BallFunction:
    """(f * h)(y) = sum over g x = y of f(g) h(x)."""
    if not f.coeffs or not h.coeffs:
        return BallFunction()
    F, H = f.support, h.support
    pt = ProductTable(F, H, cap=cap, with_elements=True)
    fv = np.array([f.coeffs[g] for g in F])
    hv = np.array([h.coeffs[x] for x in H])
    w = np.outer(fv, hv).ravel()
    idx = pt.table.ravel()
    vals = np.bincount(idx, weights=w.real, minlength=pt.size) + 1j * np.bincount(idx, weights=w.imag, minlength=pt.size)
    return BallFunction({g: complex(c) for g, c in zip(pt.elements, vals)})


# ---- shapes ------------------------------------------------------------------------

def shape_decompose(ctx: CongruenceContext, partition: OrbitPartition, h: BallFunction) -> list[tuple[tuple, BallFunction]]:
    """Split h by shape; pieces come back sorted by (total length, shape)."""
    groups: dict[tuple, dict] = defaultdict(dict)
    for g, c in h.coeffs.items():
        groups[shape(ctx, partition, g)][g] = c
    keys = sorted(groups, key=lambda s: (sum(s), s))
    return [(k, BallFunction(groups[k])) for k in keys]


def gamma_elements(ctx: CongruenceContext, radius: int) -> list[GroupElement]:
    ball = ctx.group.cache
    return [ball.element(i) for i in ctx.gamma_ball(radius)]


def shape_classes(ctx: CongruenceContext, partition: OrbitPartition, radius: int) -> dict[tuple, list[GroupElement]]:
    """Gamma-elements of length <= radius grouped by shape."""
    out: dict[tuple, list[GroupElement]] = defaultdict(list)
    for g in gamma_elements(ctx, radius):
        out[shape(ctx, partition, g)].append(g)
    return dict(sorted(out.items(), key=lambda kv: (sum(kv[0]), kv[0])))


def realizable_shapes(ctx, partition, radius: int, count: int | None = None, nonzero: bool = True) -> list[tuple]:
    shapes = [s for s in shape_classes(ctx, partition, radius) if not nonzero or any(s)]
    return shapes if count is None else shapes[:count]


def shape_polynomial(shape_vec) -> int:
    return math.prod(n + 1 for n in shape_vec)


# ---- Haagerup checks ---------------------------------------------------------------

@dataclass
class TrialReport:
    index: int
    ratio: float
    norm_f: float
    norm_h: float
    norm_fh: float


@dataclass
class HaagerupReport:
    mode: str
    target: object
    bound: float
    seed: int
    f_radius: int
    f_support: int
    h_support: int
    trials: list[TrialReport] = field(default_factory=list)
    asserted: bool = True
    shape_count: int | None = None

    @property
    def max_ratio(self) -> float:
        return max((t.ratio for t in self.trials), default=0.0)

    @property
    def violations(self) -> int:
        if not self.asserted:
            return 0
        return sum(t.ratio > self.bound * (1 + TOL) for t in self.trials)

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _random_coeffs(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _run_trials(pt: ProductTable, trials: int, seed: int, workers: int = 1) -> list[TrialReport]:
    seqs = np.random.SeedSequence(seed).spawn(trials)

    def one(t: int) -> TrialReport:
        rng = np.random.default_rng(seqs[t])
        f = _random_coeffs(rng, len(pt.F))
        h = _random_coeffs(rng, len(pt.H))
        nf, nh = float(np.linalg.norm(f)), float(np.linalg.norm(h))
        nfh = pt.norm(f, h)
        return TrialReport(t, nfh / (nf * nh), nf, nh, nfh)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            return list(ex.map(one, range(trials)))
    return [one(t) for t in range(trials)]


def haagerup_gamma_check(ctx: CongruenceContext, partition: OrbitPartition, shape_vec, trials: int = 100,
                         seed: int = 0, f_radius: int | None = None, workers: int = 1) -> HaagerupReport:
    """||f * h|| <= p(shape) ||f|| ||h|| for h supported on one shape class of Gamma.

    The reported ratio already divides by p(shape), so the bound is 1.
    """
    shape_vec = tuple(shape_vec)
    if len(shape_vec) != partition.lam:
        raise ValueError(f"shape has {len(shape_vec)} entries, expected {partition.lam}")
    if trials < 1:
        raise ValueError("trials must be positive")
    n = sum(shape_vec)
    H = shape_classes(ctx, partition, n).get(shape_vec, [])
    if not H:
        raise ValueError(f"no element of Gamma has shape {shape_vec}")
    f_radius = _default_f_radius(n) if f_radius is None else f_radius
    F = gamma_elements(ctx, f_radius)
    pt = ProductTable(F, H)
    p = shape_polynomial(shape_vec)
    rep = HaagerupReport("shape", shape_vec, 1.0, seed, f_radius, len(F), len(H))
    for t in _run_trials(pt, trials, seed, workers):
        t.ratio /= p
        rep.trials.append(t)
    return rep


def _default_f_radius(n: int) -> int:
    return max(n, 8) + 4


def haagerup_length_check(ctx: CongruenceContext, partition: OrbitPartition, n: int, trials: int = 100,
                          seed: int = 0, f_radius: int | None = None, on: str = "gamma",
                          workers: int = 1) -> HaagerupReport:
    """||f * h|| <= (n+1)^(3 Lambda / 2) ||f|| ||h|| for h on length-n elements.

    With ``on="G"`` both functions live on G and the raw ratio is logged
    without an assertion.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    f_radius = _default_f_radius(n) if f_radius is None else f_radius
    G = ctx.group
    if on == "gamma":
        H = [g for g in gamma_elements(ctx, n) if len(g.word) == n]
        F = gamma_elements(ctx, f_radius)
    elif on == "G":
        H = G.sphere(n)
        F = G.ball(f_radius).elements()
    else:
        raise ValueError(on)
    if not H:
        raise ValueError(f"no element of length {n} available")
    bound = float(n + 1) ** (1.5 * partition.lam)
    rep = HaagerupReport("length", n, bound, seed, f_radius, len(F), len(H), asserted=(on == "gamma"))
    if on == "gamma":
        rep.shape_count = len({shape(ctx, partition, g) for g in H})
    rep.trials = _run_trials(ProductTable(F, H), trials, seed, workers)
    return rep


def rd_exponent_fit(ctx, partition, ns, trials: int = 20, seed: int = 0, on: str = "gamma") -> float:
    """Least-squares slope of log(max ratio) against log(n + 1); exploratory only."""
    xs, ys = [], []
    for n in ns:
        rep = haagerup_length_check(ctx, partition, n, trials, seed, on=on)
        xs.append(math.log(n + 1))
        ys.append(math.log(rep.max_ratio))
    if len(xs) < 2:
        raise ValueError("need at least two lengths")
    return float(np.polyfit(xs, ys, 1)[0])


# ---- operator norm lower bounds ----------------------------------------------------

class GeneratorBall:
    """Ball of radius r in the Cayley graph of a finite symmetric set, grown by left multiplication."""

    def __init__(self, gens: list[GroupElement], cap: int = DEFAULT_BALL_CAP):
        if not gens:
            raise ValueError("empty generating set")
        self.group = gens[0].group
        self.cap = cap
        uniq: dict = {}
        for g in gens:
            for x in (g, g.inverse()):
                if not x.is_identity():
                    uniq.setdefault(x.key, x)
        self.gens = list(uniq.values())
        e = self.group.identity
        self.mats = e.mat[None].copy()
        self.index = {e.key: 0}
        self.offsets = [0, 1]

    @property
    def radius(self) -> int:
        return len(self.offsets) - 2

    def grow(self, radius: int) -> None:
        G = self.group
        while self.radius < radius:
            a, b = self.offsets[-2], self.offsets[-1]
            new = []
            for u in self.gens:
                prod = G.mul_batch(self.mats[a:b], u.mat, left=True)
                for m in prod:
                    k = mat_key(m)
                    if k not in self.index:
                        if len(self.index) >= self.cap:
                            raise ResourceCapExceeded(f"generator ball exceeded {self.cap} elements")
                        self.index[k] = len(self.index)
                        new.append(m)
            if new:
                self.mats = _concat(self.mats, new)
            self.offsets.append(len(self.index))

    def count(self, radius: int) -> int:
        self.grow(radius)
        return self.offsets[radius + 1]

    def operator(self, f: BallFunction, radius: int) -> sp.csr_matrix:
        """Compression of left convolution by f to the span of the ball."""
        size = self.count(radius)
        G = self.group
        rows, cols, vals = [], [], []
        for g, c in f.coeffs.items():
            prod = G.mul_batch(self.mats[:size], g.mat, left=True)
            for x in range(size):
                y = self.index.get(mat_key(prod[x]))
                if y is not None and y < size:
                    rows.append(y)
                    cols.append(x)
                    vals.append(c)
        return sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(size, size))


def _concat(base: np.ndarray, rows: list[np.ndarray]) -> np.ndarray:
    if any(r.dtype == object for r in rows):
        rows = [r.astype(object) for r in rows]
    new = np.stack(rows)
    if base.dtype != new.dtype:
        base, new = base.astype(object), new.astype(object)
    return np.concatenate([base, new])


def _power_iteration(A: sp.csr_matrix, x: np.ndarray, max_iter: int, tol: float):
    """Largest singular value of A by iterating A^H A; returns the best Rayleigh value seen."""
    AH = A.conj().T.tocsr()
    nx = np.linalg.norm(x)
    if nx == 0:
        return 0.0, x, 0, True
    x = x / nx
    best, best_x, prev = 0.0, x, 0.0
    for it in range(1, max_iter + 1):
        y = A @ x
        val = float(np.linalg.norm(y))
        if val > best:
            best, best_x = val, x
        if val == 0.0:
            return best, best_x, it, True
        z = AH @ y
        nz = np.linalg.norm(z)
        if nz == 0:
            return best, best_x, it, True
        x = z / nz
        if it > 1 and abs(val - prev) <= tol * val:
            return best, best_x, it, True
        prev = val
    return best, best_x, max_iter, False


def _start_vector(size: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def opnorm_lower(f: BallFunction, truncation_radius: int, max_iter: int = 5000, tol: float = 1e-8,
                 seed: int = 0, generators: list[GroupElement] | None = None,
                 cap: int = DEFAULT_BALL_CAP) -> NormEstimate:
    """Lower bound on ||lambda(f)|| from its compression to a finite ball.

    The ball is taken in the Cayley graph of ``generators`` (default: the
    support of f), which is what makes long supports tractable.
    """
    return opnorm_profile(f, [truncation_radius], max_iter, tol, seed, generators, cap)[-1]


def opnorm_profile(f: BallFunction, radii, max_iter: int = 5000, tol: float = 1e-8, seed: int = 0,
                   generators: list[GroupElement] | None = None,
                   cap: int = DEFAULT_BALL_CAP) -> list[NormEstimate]:
    """opnorm_lower at increasing radii, each warm-started from the previous optimum.

    Balls are nested with a stable ordering, so the previous best vector is a
    feasible start at the next radius; this makes the values non-decreasing.
    """
    gens = generators if generators is not None else [g for g in f.support if not g.is_identity()]
    if not gens:
        # f is a multiple of delta_e (or zero): a scalar operator
        c = abs(next(iter(f.coeffs.values()), 0.0))
        return [NormEstimate(c, "lower_bound", r, 0, True, 1) for r in sorted(radii)]
    ball = GeneratorBall(gens, cap)
    out = []
    x_prev = None
    for r in sorted(radii):
        A = ball.operator(f, r)
        size = A.shape[0]
        x0 = _start_vector(size, seed)
        val, x, its, conv = _power_iteration(A, x0, max_iter, tol)
        if x_prev is not None:
            warm = np.zeros(size, dtype=complex)
            warm[:len(x_prev)] = x_prev
            v2, x2, its2, conv2 = _power_iteration(A, warm, max_iter, tol)
            its += its2
            if v2 >= val:
                val, x, conv = v2, x2, conv2
        x_prev = x
        out.append(NormEstimate(val, "lower_bound", r, its, conv, size))
    return out


def dense_opnorm(f: BallFunction, radius: int, generators=None) -> float:
    """Largest singular value of the same compression, by dense SVD (test oracle)."""
    gens = generators if generators is not None else [g for g in f.support if not g.is_identity()]
    A = GeneratorBall(gens).operator(f, radius).toarray()
    return float(np.linalg.svd(A, compute_uv=False)[0])


# ---- Powers averaging --------------------------------------------------------------

@dataclass
class PowersReport:
    values: list[float]
    iterations: list[int]
    radius: int
    eq3_ratios: list[float]
    seed: int

    @property
    def bounded(self) -> bool:
        return all(v <= 1 + TOL for v in self.values)

    @property
    def non_increasing(self) -> bool:
        return all(b <= a + 1e-6 for a, b in zip(self.values, self.values[1:]))

    @property
    def eq3_ok(self) -> bool:
        return all(r <= 2 + TOL for r in self.eq3_ratios)


def _conjugates(k: GroupElement, v: GroupElement, n: int, sign: int = 1) -> list[GroupElement]:
    """v^j k v^-j for j = 1..n (sign = -1 gives v^-j k v^j)."""
    step = v if sign > 0 else v.inverse()
    out, p = [], k.group.identity
    for _ in range(n):
        p = step * p
        out.append(p * k * p.inverse())
    return out


def powers_average_experiment(k: GroupElement, v: GroupElement, n_max: int, truncation_radius: int = 2,
                              seed: int = 0, eq3_trials: int = 3, max_iter: int = 5000) -> PowersReport:
    """Norm lower bounds of (1/n) sum_j delta_{v^j k v^-j}, n = 1..n_max.

    Also logs ||sum a_j delta_{v^-j k v^j}|| / ||a||_2 for random a (informational).
    """
    if k.is_identity() or v.is_identity():
        raise ValueError("k and v must be non-trivial")
    conj = _conjugates(k, v, n_max)
    values, its = [], []
    for n in range(1, n_max + 1):
        f = BallFunction.from_pairs((c, 1.0 / n) for c in conj[:n])
        est = opnorm_lower(f, truncation_radius, max_iter=max_iter, seed=seed)
        values.append(est.value)
        its.append(est.iterations)
    back = _conjugates(k, v, n_max, sign=-1)
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(eq3_trials):
        a = rng.standard_normal(n_max)
        f = BallFunction.from_pairs(zip(back, a))
        est = opnorm_lower(f, truncation_radius, max_iter=max_iter, seed=seed)
        ratios.append(est.value / float(np.linalg.norm(a)))
    return PowersReport(values, its, truncation_radius, ratios, seed)


# ---- icc ---------------------------------------------------------------------------

@dataclass
class IccReport:
    word: tuple[int, ...]
    radii: list[int]
    counts: list[int]
    asserted: bool

    @property
    def increasing(self) -> bool:
        return all(b > a for a, b in zip(self.counts, self.counts[1:]))

    @property
    def ok(self) -> bool:
        return self.increasing or not self.asserted


def icc_hypotheses(system) -> bool:
    """Indecomposable with an indefinite non-degenerate Gram form."""
    return (len(indecomposable_components(system.cm)) == 1
            and classify_system(system).category == INDEFINITE_NONDEGENERATE)


def icc_scan(w: GroupElement, radii) -> IccReport:
    """|{g w g^-1 : l(g) <= r}| for each r."""
    if w.is_identity():
        raise ValueError("w must be non-trivial")
    G = w.group
    radii = sorted(radii)
    ball = G.cache
    ball.grow(radii[-1])
    seen = set()
    counts = []
    done = 0
    for r in radii:
        stop = ball.count(r)
        if stop > done:
            left = G.mul_batch(ball.mats[done:stop], w.mat)
            for i in range(stop - done):
                seen.add(mat_key(G.matmul(left[i], ball.invs[done + i])))
            done = stop
        counts.append(len(seen))
    return IccReport(w.word, radii, counts, icc_hypotheses(G.system))
