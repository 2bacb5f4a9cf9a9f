"""Exact dyadic reals: integer mantissa times a power of two.

Accumulations in the correlation kernels are plain integer arithmetic at a
fixed binary scale, so results are naturally of the form m * 2**e.  Keeping
them that way (instead of rounding to a float or an mpfr) makes reports
reproducible byte for byte and lets error budgets be stated exactly.
"""

from __future__ import annotations

import math
from typing import Union

_TEN = 10


class Dyadic:
    """Immutable exact value man * 2**exp with int man, int exp."""

    __slots__ = ("man", "exp")

    def __init__(self, man: int, exp: int = 0):
        # normalize: strip trailing zero bits, canonical zero
        if man == 0:
            exp = 0
        else:
            shift = (man & -man).bit_length() - 1
            if shift:
                man >>= shift
                exp += shift
        object.__setattr__(self, "man", man)
        object.__setattr__(self, "exp", exp)

    def __setattr__(self, *a):
        raise AttributeError("Dyadic is immutable")

    @classmethod
    def from_int(cls, n: int) -> "Dyadic":
        return cls(n, 0)

    @classmethod
    def from_float(cls, x: float) -> "Dyadic":
        if x != x or x in (float("inf"), float("-inf")):
            raise ValueError("cannot represent non-finite float")
        m, e = math.frexp(x)
        return cls(int(m * (1 << 53)), e - 53)

    @classmethod
    def from_man_exp(cls, man: int, exp: int) -> "Dyadic":
        return cls(man, exp)

    def is_zero(self) -> bool:
        return self.man == 0

    def __bool__(self) -> bool:
        return self.man != 0

    def sign(self) -> int:
        return 0 if self.man == 0 else (1 if self.man > 0 else -1)

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.man, self.exp)

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.man), self.exp)

    def _align(self, other: "Dyadic"):
        if self.exp >= other.exp:
            return self.man << (self.exp - other.exp), other.man, other.exp
        return self.man, other.man << (other.exp - self.exp), self.exp

    def __add__(self, other: Union["Dyadic", int]) -> "Dyadic":
        other = _coerce(other)
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other: Union["Dyadic", int]) -> "Dyadic":
        other = _coerce(other)
        a, b, e = self._align(other)
        return Dyadic(a - b, e)

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __mul__(self, other: Union["Dyadic", int]) -> "Dyadic":
        other = _coerce(other)
        return Dyadic(self.man * other.man, self.exp + other.exp)

    __rmul__ = __mul__

    def ldexp(self, k: int) -> "Dyadic":
        return Dyadic(self.man, self.exp + k)

    def _cmp(self, other: "Dyadic") -> int:
        a, b, _ = self._align(_coerce(other))
        return (a > b) - (a < b)

    def __eq__(self, other) -> bool:
        if not isinstance(other, (Dyadic, int)):
            return NotImplemented
        return self._cmp(_coerce(other)) == 0

    def __lt__(self, other):
        return self._cmp(_coerce(other)) < 0

    def __le__(self, other):
        return self._cmp(_coerce(other)) <= 0

    def __gt__(self, other):
        return self._cmp(_coerce(other)) > 0

    def __ge__(self, other):
        return self._cmp(_coerce(other)) >= 0

    def __hash__(self):
        return hash((self.man, self.exp))

    def log2_abs(self) -> float:
        """log2(|value|); -inf for zero.  Accurate to ~1e-15 relative."""
        if self.man == 0:
            return float("-inf")
        m = abs(self.man)
        bl = m.bit_length()
        # top 64 bits give the fractional part of log2
        top = m >> max(0, bl - 64)
        return math.log2(top) + (max(0, bl - 64) + self.exp)

    def __float__(self) -> float:
        if self.man == 0:
            return 0.0
        m = abs(self.man)
        bl = m.bit_length()
        drop = max(0, bl - 64)
        try:
            val = math.ldexp(float(m >> drop), drop + self.exp)
        except OverflowError:
            val = float("inf")
        return -val if self.man < 0 else val

    def to_decimal(self, sig: int = 40) -> str:
        """Deterministic scientific-notation decimal string, round half to even.

        Uses only integer arithmetic so identical values render identically on
        any platform or backend.
        """
        if sig < 1:
            raise ValueError("sig must be >= 1")
        if self.man == 0:
            return "0"
        neg = self.man < 0
        m = abs(self.man)
        e = self.exp

        # decimal exponent estimate of v = m * 2^e, then exact digit extraction
        bl = m.bit_length()
        d10 = math.floor((bl - 1 + e) * math.log10(2))
        # want digits = round(v / 10^(d10 - sig + 1)); compute as exact ratio
        for _ in range(4):  # d10 estimate may be off by one; loop corrects
            p = d10 - sig + 1
            # digits = v * 10^-p = m * 2^e * 10^-p
            num, den = m, 1
            if e >= 0:
                num <<= e
            else:
                den <<= -e
            if p <= 0:
                num *= _TEN ** (-p)
            else:
                den *= _TEN**p
            q, r = divmod(num, den)
            # round half to even
            twice = 2 * r
            if twice > den or (twice == den and (q & 1)):
                q += 1
            nd = len(str(q))
            if nd == sig:
                break
            d10 += nd - sig  # rounding rippled (e.g. 999->1000) or estimate off
        s = str(q)
        if len(s) != sig:  # pragma: no cover - loop above always converges
            raise AssertionError("digit extraction failed to converge")
        body = s[0] + ("." + s[1:] if sig > 1 else "")
        out = f"{body}e{'+' if d10 >= 0 else '-'}{abs(d10):02d}"
        return "-" + out if neg else out

    def __repr__(self):
        return f"Dyadic({self.man}, {self.exp})"

    def __str__(self):
        return self.to_decimal(25)


def _coerce(x) -> Dyadic:
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, int):
        return Dyadic(x, 0)
    raise TypeError(f"cannot mix Dyadic with {type(x).__name__}")


def rel_gap(bound: Dyadic | float, value: Dyadic) -> float:
    """bound / |value| computed in log space; inf when value is zero."""
    if isinstance(bound, Dyadic):
        lb = bound.log2_abs()
    else:
        if bound == 0:
            return 0.0
        lb = math.log2(abs(bound))
    lv = value.log2_abs()
    if lv == float("-inf"):
        return float("inf")
    d = lb - lv
    if d > 1020:
        return float("inf")
    return 2.0**d
