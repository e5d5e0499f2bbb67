"""Gram form, signature classification, components, Moussong scan, verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from fractions import Fraction
from itertools import combinations

from .field import AlgebraicScalar
from .system import INF, CoxeterMatrix, CoxeterSystem

POSITIVE_DEFINITE = "PositiveDefinite"
AFFINE_DEGENERATE = "AffineDegenerate"
INDEFINITE_NONDEGENERATE = "IndefiniteNondegenerate"
INDEFINITE_DEGENERATE = "IndefiniteDegenerate"

VERDICT_FINITE = "finite"
VERDICT_AFFINE = "affine, amenable"
VERDICT_NILPOTENT = "nilpotent normal subgroup, not simple"
VERDICT_SIMPLE = "reduced C*-algebra simple with unique trace"


@dataclass(frozen=True)
class GramForm:
    entries: tuple[tuple[AlgebraicScalar, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def submatrix(self, idx) -> "GramForm":
        return GramForm(tuple(tuple(self.entries[i][j] for j in idx) for i in idx))

    def floats(self):
        return [[float(x) for x in row] for row in self.entries]


@dataclass(frozen=True)
class FormClass:
    signature: tuple[int, int, int]
    category: str

    @property
    def n_plus(self):
        return self.signature[0]

    @property
    def n_minus(self):
        return self.signature[1]

    @property
    def n_zero(self):
        return self.signature[2]


def category_of(signature) -> str:
    _, neg, zero = signature
    if neg == 0:
        return POSITIVE_DEFINITE if zero == 0 else AFFINE_DEGENERATE
    return INDEFINITE_NONDEGENERATE if zero == 0 else INDEFINITE_DEGENERATE


def gram_matrix(cm: CoxeterMatrix | CoxeterSystem) -> GramForm:
    system = cm if isinstance(cm, CoxeterSystem) else CoxeterSystem(cm)
    half = Fraction(1, 2)
    rows = []
    for i in range(system.rank):
        rows.append(tuple(
            AlgebraicScalar(system.field, [half * int(c) for c in system.two_b[i, j]])
            for j in range(system.rank)
        ))
    return GramForm(tuple(rows))


def classify_form(B: GramForm) -> FormClass:
    """Exact signature by symmetric elimination with certified pivot signs.

    Uses S' = p * A22 - v v^T (a positive multiple of the Schur complement
    when p > 0, a negative one when p < 0).  A zero diagonal with a nonzero
    off-diagonal entry is handled by the congruence row_i += row_j.
    """
    A = [list(r) for r in B.entries]
    pos = neg = 0
    flip = 1
    while A:
        n = len(A)
        piv = next((i for i in range(n) if not A[i][i].is_zero()), None)
        if piv is None:
            hit = next(((i, j) for i in range(n) for j in range(i + 1, n) if not A[i][j].is_zero()), None)
            if hit is None:
                break
            i, j = hit
            for k in range(n):
                A[i][k] = A[i][k] + A[j][k]
            for k in range(n):
                A[k][i] = A[k][i] + A[k][j]
            piv = i
        p = A[piv][piv]
        sp = p.sign()
        if sp * flip > 0:
            pos += 1
        else:
            neg += 1
        rest = [k for k in range(n) if k != piv]
        v = [A[piv][k] for k in rest]
        A = [[p * A[a][b] - v[x] * v[y] for y, b in enumerate(rest)] for x, a in enumerate(rest)]
        A = _rescale(A)
        if sp < 0:
            flip = -flip
    zero = B.rank - pos - neg
    sig = (pos, neg, zero)
    return FormClass(sig, category_of(sig))


def _rescale(A):
    # divide by the positive rational content: keeps entries small, preserves signature
    coeffs = [c for row in A for x in row for c in x.coeffs if c]
    if not coeffs:
        return A
    num = math.gcd(*(c.numerator for c in coeffs))
    den = math.lcm(*(c.denominator for c in coeffs))
    k = Fraction(den, num)
    if k == 1:
        return A
    return [[AlgebraicScalar(x.field, [c * k for c in x.coeffs]) for x in row] for row in A]


def classify_system(cm: CoxeterMatrix | CoxeterSystem) -> FormClass:
    return classify_form(gram_matrix(cm))


def indecomposable_components(cm: CoxeterMatrix) -> list[tuple[str, ...]]:
    """Connected components of the graph with edges where the label is not 2."""
    cm = cm.cm if isinstance(cm, CoxeterSystem) else cm
    n = cm.rank
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(n):
                if not seen[j] and j != i and cm.labels[i][j] != 2:
                    seen[j] = True
                    stack.append(j)
        comps.append(tuple(cm.names[i] for i in sorted(comp)))
    return comps


def _connected(cm: CoxeterMatrix, idx) -> bool:
    idx = list(idx)
    if not idx:
        return False
    seen = {idx[0]}
    stack = [idx[0]]
    while stack:
        i = stack.pop()
        for j in idx:
            if j not in seen and cm.labels[i][j] != 2:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(idx)


class RankCapExceeded(RuntimeError):
    pass


@dataclass
class MoussongReport:
    commuting_infinite_pairs: list[tuple[tuple[str, ...], tuple[str, ...]]] = field(default_factory=list)
    affine_subsystems: list[tuple[str, ...]] = field(default_factory=list)

    @property
    def hyperbolic(self) -> bool:
        return not self.commuting_infinite_pairs and not self.affine_subsystems


def moussong_check(cm: CoxeterMatrix, rank_cap: int = 12) -> MoussongReport:
    """Scan parabolic subsystems for Moussong's two obstructions to hyperbolicity."""
    cm = cm.cm if isinstance(cm, CoxeterSystem) else cm
    n = cm.rank
    if n > rank_cap:
        raise RankCapExceeded(f"rank {n} exceeds the subset-scan cap {rank_cap}")
    B = gram_matrix(cm)
    memo: dict[int, FormClass] = {}

    def cls(mask: int) -> FormClass:
        if mask not in memo:
            idx = [i for i in range(n) if mask >> i & 1]
            memo[mask] = classify_form(B.submatrix(idx))
        return memo[mask]

    def members(mask):
        return tuple(cm.names[i] for i in range(n) if mask >> i & 1)

    # commuting[m] = bitmask of generators commuting with every member of m
    comm = [sum(1 << j for j in range(n) if j != i and cm.labels[i][j] == 2) for i in range(n)]
    report = MoussongReport()
    infinite = [m for m in range(1, 1 << n) if cls(m).category != POSITIVE_DEFINITE]
    for a in infinite:
        ca = (1 << n) - 1
        for i in range(n):
            if a >> i & 1:
                ca &= comm[i]
        for b in infinite:
            if b > a and b & ~ca == 0:
                report.commuting_infinite_pairs.append((members(a), members(b)))
    for m in infinite:
        idx = [i for i in range(n) if m >> i & 1]
        if len(idx) >= 3 and _connected(cm, idx) and cls(m).category == AFFINE_DEGENERATE:
            report.affine_subsystems.append(members(m))
    return report


@dataclass
class Verdict:
    components: list[tuple[tuple[str, ...], FormClass, str]]

    @property
    def simple(self) -> bool:
        return all(v == VERDICT_SIMPLE for _, _, v in self.components)

    @property
    def overall(self) -> str:
        if len(self.components) == 1:
            return self.components[0][2]
        return VERDICT_SIMPLE if self.simple else "not simple"


def component_verdict(fc: FormClass) -> str:
    return {
        POSITIVE_DEFINITE: VERDICT_FINITE,
        AFFINE_DEGENERATE: VERDICT_AFFINE,
        INDEFINITE_DEGENERATE: VERDICT_NILPOTENT,
        INDEFINITE_NONDEGENERATE: VERDICT_SIMPLE,
    }[fc.category]


def simplicity_verdict(cm: CoxeterMatrix) -> Verdict:
    cm = cm.cm if isinstance(cm, CoxeterSystem) else cm
    out = []
    for comp in indecomposable_components(cm):
        sub = cm.restrict([cm.index(v) for v in comp])
        fc = classify_system(sub)
        out.append((comp, fc, component_verdict(fc)))
    return Verdict(out)


def all_labels_finite(cm: CoxeterMatrix) -> bool:
    return all(m != INF for row in cm.labels for m in row)


def finite_subsets(cm: CoxeterMatrix) -> list[tuple[int, ...]]:
    """Index tuples J whose parabolic W_J is finite (positive definite Gram form)."""
    cm = cm.cm if isinstance(cm, CoxeterSystem) else cm
    B = gram_matrix(cm)
    out = []
    for r in range(1, cm.rank + 1):
        for J in combinations(range(cm.rank), r):
            if classify_form(B.submatrix(J)).category == POSITIVE_DEFINITE:
                out.append(J)
    return out
