"""Exact arithmetic in the cyclotomic field Q(w), w = exp(2*pi*i/3).

Elements are stored in the basis {1, w}; products are reduced with
w**2 = -1 - w.  Coefficients are :class:`fractions.Fraction`, so nothing is
ever rounded.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from numbers import Rational

__all__ = ["CycNum", "OMEGA", "ONE", "ZERO", "cyc_add", "cyc_mul", "cyc_conj", "cyc_is_real"]

_OMEGA_COMPLEX = cmath.exp(2j * cmath.pi / 3)


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to an exact rational")


class CycNum:
    """The number ``u + v*w`` with rational ``u`` and ``v``."""

    __slots__ = ("u", "v")

    def __init__(self, u=0, v=0):
        self.u = _frac(u)
        self.v = _frac(v)

    @classmethod
    def coerce(cls, x) -> "CycNum":
        if isinstance(x, CycNum):
            return x
        return cls(x, 0)

    @classmethod
    def omega_power(cls, k: int) -> "CycNum":
        k %= 3
        if k == 0:
            return cls(1, 0)
        if k == 1:
            return cls(0, 1)
        return cls(-1, -1)

    # ring operations -------------------------------------------------
    def __add__(self, other):
        try:
            o = CycNum.coerce(other)
        except TypeError:
            return NotImplemented
        return CycNum(self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __neg__(self):
        return CycNum(-self.u, -self.v)

    def __sub__(self, other):
        try:
            o = CycNum.coerce(other)
        except TypeError:
            return NotImplemented
        return CycNum(self.u - o.u, self.v - o.v)

    def __rsub__(self, other):
        return CycNum.coerce(other) - self

    def __mul__(self, other):
        try:
            o = CycNum.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = self.u, self.v, o.u, o.v
        bd = b * d
        return CycNum(a * c - bd, a * d + b * c - bd)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """``|z|**2 = u**2 - u*v + v**2`` (always a nonnegative rational)."""
        return self.u * self.u - self.u * self.v + self.v * self.v

    def inverse(self) -> "CycNum":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("CycNum division by zero")
        c = self.conj()
        return CycNum(c.u / n, c.v / n)

    def __truediv__(self, other):
        try:
            o = CycNum.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return CycNum.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = CycNum(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "CycNum":
        return CycNum(self.u - self.v, -self.v)

    def is_real(self) -> bool:
        return self.v == 0

    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    def real_part(self) -> Fraction:
        # Re(w) = -1/2
        return self.u - self.v / 2

    def is_eisenstein_integer(self) -> bool:
        return self.u.denominator == 1 and self.v.denominator == 1

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, CycNum):
            return self.u == other.u and self.v == other.v
        if isinstance(other, (int, Rational)):
            return self.v == 0 and self.u == other
        return NotImplemented

    def __hash__(self):
        if self.v == 0:
            return hash(self.u)
        return hash((self.u, self.v))

    def __complex__(self):
        return float(self.u) + float(self.v) * _OMEGA_COMPLEX

    def __repr__(self):
        return f"CycNum({self.u}, {self.v})"

    def __str__(self):
        if self.v == 0:
            return str(self.u)
        if self.u == 0:
            return "w" if self.v == 1 else ("-w" if self.v == -1 else f"{self.v}*w")
        sign = "+" if self.v > 0 else "-"
        mag = abs(self.v)
        vpart = "w" if mag == 1 else f"{mag}*w"
        return f"{self.u}{sign}{vpart}"

    # JSON ------------------------------------------------------------
    def to_json(self) -> dict:
        return {"u": str(self.u), "v": str(self.v)}

    @classmethod
    def from_json(cls, obj: dict) -> "CycNum":
        return cls(Fraction(obj["u"]), Fraction(obj["v"]))


ZERO = CycNum(0, 0)
ONE = CycNum(1, 0)
OMEGA = CycNum(0, 1)


def cyc_add(a: CycNum, b: CycNum) -> CycNum:
    return a + b


def cyc_mul(a: CycNum, b: CycNum) -> CycNum:
    return a * b


def cyc_conj(a: CycNum) -> CycNum:
    return a.conj()


def cyc_is_real(a: CycNum) -> bool:
    return a.is_real()
