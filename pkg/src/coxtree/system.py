"""Coxeter matrices, the graph file format, and the geometric representation."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .field import AlgebraicScalar, RealCyclotomicField, field_for

INF = math.inf

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class CoxeterInputError(ValueError):
    """Malformed graph description or invalid Coxeter matrix."""


@dataclass(frozen=True)
class CoxeterMatrix:
    names: tuple[str, ...]
    labels: tuple[tuple, ...]  # ints >= 1, or INF

    def __post_init__(self):
        n = len(self.names)
        if n == 0:
            raise CoxeterInputError("a Coxeter matrix needs at least one generator")
        if len(set(self.names)) != n:
            raise CoxeterInputError("duplicate generator names")
        if len(self.labels) != n or any(len(r) != n for r in self.labels):
            raise CoxeterInputError("label table must be rank x rank")
        for i in range(n):
            if self.labels[i][i] != 1:
                raise CoxeterInputError("diagonal labels must equal 1")
            for j in range(n):
                m = self.labels[i][j]
                if m != self.labels[j][i]:
                    raise CoxeterInputError(f"labels not symmetric at ({self.names[i]},{self.names[j]})")
                if i != j and not (m == INF or (isinstance(m, int) and m >= 2)):
                    raise CoxeterInputError(f"off-diagonal label {m} below 2 at ({self.names[i]},{self.names[j]})")

    @property
    def rank(self) -> int:
        return len(self.names)

    def label(self, s, t):
        return self.labels[self.index(s)][self.index(t)]

    def index(self, s) -> int:
        if isinstance(s, int):
            if not 0 <= s < self.rank:
                raise KeyError(s)
            return s
        try:
            return self.names.index(s)
        except ValueError:
            raise KeyError(f"unknown generator {s!r}") from None

    @property
    def L(self) -> int:
        finite = {m for row in self.labels for m in row if m != INF and m >= 3}
        return math.lcm(*finite) if finite else 1

    def restrict(self, idx) -> "CoxeterMatrix":
        idx = list(idx)
        return CoxeterMatrix(
            tuple(self.names[i] for i in idx),
            tuple(tuple(self.labels[i][j] for j in idx) for i in idx),
        )

    def permute(self, perm) -> "CoxeterMatrix":
        return self.restrict(perm)

    @classmethod
    def from_edges(cls, names, edges) -> "CoxeterMatrix":
        names = tuple(names)
        n = len(names)
        lab = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
        pos = {v: i for i, v in enumerate(names)}
        for a, b, m in edges:
            i, j = pos[a], pos[b]
            lab[i][j] = lab[j][i] = m
        return cls(names, tuple(tuple(r) for r in lab))

    def to_text(self) -> str:
        lines = ["vertices: " + " ".join(self.names)]
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                m = self.labels[i][j]
                if m != 2:
                    lines.append(f"{self.names[i]} {self.names[j]} {'inf' if m == INF else m}")
        return "\n".join(lines) + "\n"


def parse_coxeter_graph(text: str) -> CoxeterMatrix:
    """Parse the line-oriented graph format.

    First non-comment line ``vertices: v1 v2 ...``; then ``vi vj m`` with
    ``m >= 3`` or ``inf``.  Unlisted pairs commute.  ``m = 2`` is accepted
    as an explicit commuting edge.
    """
    names = None
    edges: dict[tuple[int, int], object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if names is None:
            head, sep, rest = line.partition(":")
            if not sep or head.strip() != "vertices":
                raise CoxeterInputError(f"line {lineno}: expected 'vertices: ...'")
            names = rest.split()
            if not names:
                raise CoxeterInputError(f"line {lineno}: empty vertex list")
            for v in names:
                if not _NAME.match(v):
                    raise CoxeterInputError(f"line {lineno}: bad vertex name {v!r}")
            if len(set(names)) != len(names):
                raise CoxeterInputError(f"line {lineno}: duplicate vertex names")
            pos = {v: i for i, v in enumerate(names)}
            continue
        parts = line.split()
        if len(parts) != 3:
            raise CoxeterInputError(f"line {lineno}: expected 'vi vj m'")
        a, b, tok = parts
        if a not in pos or b not in pos:
            raise CoxeterInputError(f"line {lineno}: unknown vertex")
        if a == b:
            raise CoxeterInputError(f"line {lineno}: loop edge {a} {b}")
        if tok.lower() in ("inf", "infinity", "oo"):
            m = INF
        else:
            try:
                m = int(tok)
            except ValueError:
                raise CoxeterInputError(f"line {lineno}: bad label {tok!r}") from None
            if m < 2:
                raise CoxeterInputError(f"line {lineno}: off-diagonal label {m} below 2")
        key = tuple(sorted((pos[a], pos[b])))
        if key in edges and edges[key] != m:
            raise CoxeterInputError(f"line {lineno}: contradictory labels for {a} {b}")
        edges[key] = m
    if names is None:
        raise CoxeterInputError("missing 'vertices:' line")
    return CoxeterMatrix.from_edges(names, [(names[i], names[j], m) for (i, j), m in edges.items()])


BUILTINS = ("a2", "dinf", "t237", "figure", "a2xa1")


def read_text(path: str) -> str:
    """Read a graph file; ``builtin:NAME`` selects a shipped example."""
    if path.startswith("builtin:"):
        name = path.split(":", 1)[1]
        if name not in BUILTINS:
            raise FileNotFoundError(f"no builtin system {name!r}")
        return resources.files("coxtree").joinpath("data", f"{name}.cox").read_text()
    return Path(path).read_text()


def load_system(path: str) -> "CoxeterSystem":
    return CoxeterSystem(parse_coxeter_graph(read_text(path)))


def builtin(name: str) -> "CoxeterSystem":
    return load_system("builtin:" + name)


class CoxeterSystem:
    """A Coxeter matrix together with its geometric representation over Z[theta].

    ``two_b[s, t]`` holds 2B(e_s, e_t) as an integer residue of length
    ``degree``; the simple reflection matrices are integral in this basis.
    """

    def __init__(self, cm: CoxeterMatrix):
        self.cm = cm
        self.names = cm.names
        self.rank = n = cm.rank
        self.field: RealCyclotomicField = field_for(cm.L)
        d = self.degree = self.field.degree
        two_b = np.zeros((n, n, d), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                m = cm.labels[i][j]
                if m == 1:
                    two_b[i, j, 0] = 2
                elif m == INF:
                    two_b[i, j, 0] = -2
                elif m != 2:
                    two_b[i, j] = [-c for c in self.field.two_cos_pi_over(m)]
        self.two_b = two_b
        eye = np.zeros((n, n, d), dtype=np.int64)
        eye[np.arange(n), np.arange(n), 0] = 1
        self.identity = eye
        gens = np.repeat(eye[None], n, axis=0)
        for s in range(n):
            gens[s, s] = eye[s] - two_b[s]
        self.gens = gens
        # multiplication-by-2B(s,t) as d x d integer matrices acting on coefficient vectors
        mult = np.zeros((n, n, d, d), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                for k in range(d):
                    e = [0] * d
                    e[k] = 1
                    mult[i, j, :, k] = self.field.mul_vec(list(two_b[i, j]), e)
        self._two_b_mult = mult

    def __repr__(self) -> str:
        return f"CoxeterSystem({' '.join(self.names)}; L={self.cm.L})"

    def __eq__(self, other) -> bool:
        return isinstance(other, CoxeterSystem) and other.cm == self.cm

    def __hash__(self) -> int:
        return hash(self.cm)

    def index(self, s) -> int:
        return self.cm.index(s)

    def parse_word(self, word) -> tuple[int, ...]:
        if isinstance(word, str):
            word = word.split()
        return tuple(self.index(s) for s in word)

    def format_word(self, word) -> str:
        return " ".join(self.names[s] for s in word) if word else "e"

    def pair_form(self, beta: np.ndarray) -> np.ndarray:
        """Rows 2B(e_s, beta) for all s, as an (n, d) coefficient array."""
        if beta.dtype == object:
            return np.einsum("stij,tj->si", self._two_b_mult.astype(object), beta)
        return np.einsum("stij,tj->si", self._two_b_mult, beta)

    def scalar(self, coeffs) -> AlgebraicScalar:
        return AlgebraicScalar(self.field, list(coeffs))

