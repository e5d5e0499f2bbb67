"""Exact arithmetic in the real cyclotomic field Q(2cos(pi/L)).

Every Gram entry of a Coxeter system with finite labels dividing ``L`` is a
rational combination of powers of ``theta = 2cos(pi/L)``.  Elements are kept
as canonical residues modulo the minimal polynomial of ``theta`` so that
equality is a coefficient comparison, and signs are certified by interval
refinement of ``theta``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np
import sympy

PRECISION_CAP_BITS = 4096


class PrecisionCapError(ArithmeticError):
    """Sign certification needed more precision than the hard cap allows.

    This is a defect signal: the a-priori separation bound guarantees
    termination well below the cap for every input the engine produces.
    """


def chebyshev_two_cos(k: int) -> list[int]:
    """Integer coefficients (low to high) of C_k with 2cos(k t) = C_k(2cos t)."""
    prev, cur = [2], [0, 1]
    if k == 0:
        return prev
    for _ in range(k - 1):
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


def _lcm(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


class RealCyclotomicField:
    """The field Q(theta), theta = 2cos(pi/L), with theta an algebraic integer."""

    def __init__(self, L: int):
        if L < 1:
            raise ValueError("L must be positive")
        self.L = L
        x = sympy.Symbol("x")
        relation = sympy.Poly(list(reversed(chebyshev_two_cos(L))), x) + 2
        target = 2 * math.cos(math.pi / L)
        factors = [f for f, _ in relation.factor_list()[1]]
        best = min(factors, key=lambda f: abs(float(f.eval(target))))
        coeffs = [int(c) for c in reversed(best.all_coeffs())]
        if coeffs[-1] != 1:
            raise AssertionError("minimal polynomial of 2cos(pi/L) must be monic")
        self.minpoly: tuple[int, ...] = tuple(coeffs)
        self.degree = len(coeffs) - 1
        self._poly = best
        self.theta = target
        self._theta_interval = self._isolate()
        # reduction table: theta^e for e < 2d-1 as length-d integer vectors
        d = self.degree
        red = np.zeros((max(2 * d - 1, 1), d), dtype=object)
        for e in range(red.shape[0]):
            red[e] = self._power_residue(e)
        self.reduction = red
        self.reduction_i64 = red.astype(np.int64)

    def __repr__(self) -> str:
        return f"RealCyclotomicField(L={self.L}, degree={self.degree})"

    def __eq__(self, other) -> bool:
        return isinstance(other, RealCyclotomicField) and other.L == self.L

    def __hash__(self) -> int:
        return hash(("RealCyclotomicField", self.L))

    # ---- polynomial residues -------------------------------------------
    def _power_residue(self, e: int) -> list[int]:
        d = self.degree
        vec = [0] * max(e + 1, d)
        vec[e] = 1
        return self.reduce_poly(vec)

    def reduce_poly(self, coeffs: Sequence) -> list:
        """Reduce a coefficient list (low to high) modulo the minimal polynomial."""
        d = self.degree
        c = list(coeffs) + [0] * max(0, d - len(coeffs))
        mp = self.minpoly
        for top in range(len(c) - 1, d - 1, -1):
            lead = c[top]
            if lead:
                for i in range(d + 1):
                    c[top - d + i] -= lead * mp[i]
        return c[:d]

    def mul_vec(self, a: Sequence, b: Sequence) -> list:
        prod = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return self.reduce_poly(prod)

    def two_cos_pi_over(self, m: int) -> list[int]:
        """2cos(pi/m) as an integer residue; requires m | L."""
        if self.L % m:
            raise ValueError(f"2cos(pi/{m}) is not in Q(2cos(pi/{self.L}))")
        return self.reduce_poly(chebyshev_two_cos(self.L // m))

    # ---- sign certification --------------------------------------------
    def _isolate(self) -> tuple[Fraction, Fraction]:
        intervals = self._poly.intervals()
        lo, hi = max(intervals, key=lambda iv: iv[0][1])[0]
        return Fraction(int(lo.p), int(lo.q)), Fraction(int(hi.p), int(hi.q))

    def _minpoly_sign(self, x: Fraction) -> int:
        v = Fraction(0)
        for c in reversed(self.minpoly):
            v = v * x + c
        return (v > 0) - (v < 0)

    def float_value(self, coeffs: Sequence) -> float:
        v = 0.0
        for c in reversed(list(coeffs)):
            v = v * self.theta + float(c)
        return v

    def required_bits(self, coeffs: Sequence[Fraction]) -> int:
        """A-priori interval width (in bits) that certifies the sign of a nonzero element."""
        d = self.degree
        den = _lcm(Fraction(c).denominator for c in coeffs)
        H = max(abs(Fraction(c) * den) for c in coeffs)
        # |norm| >= 1 and each conjugate is bounded by H * (2^d - 1)
        log_delta = -math.log2(den) - (d - 1) * math.log2(max(H * (2**d - 1), 1))
        lip = sum(k * abs(float(c)) * 3.0 ** (k - 1) for k, c in enumerate(coeffs)) + 1.0
        return max(8, math.ceil(math.log2(2 * lip) - log_delta) + 2)

    def sign(self, coeffs: Sequence) -> int:
        """Certified sign of sum c_k theta^k."""
        if not any(coeffs):
            return 0
        if self.degree == 1:
            v = Fraction(coeffs[0])
            return (v > 0) - (v < 0)
        approx = self.float_value(coeffs)
        scale = sum(abs(float(c)) * abs(self.theta) ** k for k, c in enumerate(coeffs))
        if math.isfinite(approx) and abs(approx) > 1e-12 * scale + 1e-300:
            return 1 if approx > 0 else -1
        return self._certified_sign(tuple(Fraction(c) for c in coeffs))

    @lru_cache(maxsize=4096)
    def _certified_sign(self, coeffs: tuple[Fraction, ...]) -> int:
        bits = self.required_bits(coeffs)
        if bits > PRECISION_CAP_BITS:
            raise PrecisionCapError(f"sign certification needs {bits} bits (> cap {PRECISION_CAP_BITS})")
        lo, hi = self._theta_interval
        slo = self._minpoly_sign(lo)
        while True:
            vlo, vhi = _interval_horner(coeffs, lo, hi)
            if vlo > 0:
                return 1
            if vhi < 0:
                return -1
            if hi - lo < Fraction(1, 2 ** PRECISION_CAP_BITS):
                raise PrecisionCapError("interval refinement exceeded the precision cap")
            mid = (lo + hi) / 2
            smid = self._minpoly_sign(mid)
            if smid == 0:
                lo = hi = mid
            elif smid == slo:
                lo = mid
            else:
                hi = mid
            self._theta_interval = (lo, hi)


def _interval_horner(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    vlo = vhi = Fraction(0)
    for c in reversed(coeffs):
        prods = (vlo * lo, vlo * hi, vhi * lo, vhi * hi)
        vlo, vhi = min(prods) + c, max(prods) + c
    return vlo, vhi


@lru_cache(maxsize=None)
def field_for(L: int) -> RealCyclotomicField:
    return RealCyclotomicField(L)


class AlgebraicScalar:
    """Immutable element of Q(2cos(pi/L)) with rational coefficients."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: RealCyclotomicField, coeffs: Iterable):
        c = [Fraction(x) for x in coeffs]
        c = field.reduce_poly(c) if len(c) != field.degree else c
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, key, value):
        raise AttributeError("AlgebraicScalar is immutable")

    @classmethod
    def from_int(cls, field, value) -> "AlgebraicScalar":
        return cls(field, [Fraction(value)] + [0] * (field.degree - 1))

    def _coerce(self, other) -> "AlgebraicScalar":
        if isinstance(other, AlgebraicScalar):
            if other.field != self.field:
                raise ValueError("scalars from different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return AlgebraicScalar.from_int(self.field, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraicScalar(self.field, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicScalar(self.field, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return AlgebraicScalar(self.field, self.field.mul_vec(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.coeffs == o.coeffs

    def __hash__(self) -> int:
        return hash((self.field.L, self.coeffs))

    def __float__(self) -> float:
        return self.field.float_value(self.coeffs)

    def sign(self) -> int:
        return self.field.sign(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __repr__(self) -> str:
        if self.field.degree == 1:
            return str(self.coeffs[0])
        terms = [f"{c}*t^{k}" if k else str(c) for k, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) if terms else "0"
