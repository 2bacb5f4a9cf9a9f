"""Pure-CPython backend: Kronecker packing with divide-and-conquer shifts.

CPython multiplies large ints with Karatsuba, so the packed product is
asymptotically slower than GMP but still far faster than a coefficient-wise
schoolbook loop.  Packing by repeated pairwise combination keeps the shift
work at O(n log n) total bits instead of O(n^2).
"""

from __future__ import annotations

_SMALL = 32


def _pack_nonneg(vals, B: int) -> int:
    level = list(vals)
    width = B
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level) - 1, 2):
            nxt.append(level[i] | (level[i + 1] << width))
        if len(level) & 1:
            nxt.append(level[-1])
        level = nxt
        width <<= 1
    return level[0] if level else 0


def _pack_signed(vals, B: int) -> int:
    pos = [v if v > 0 else 0 for v in vals]
    packed = _pack_nonneg(pos, B)
    if any(v < 0 for v in vals):
        neg = [-v if v < 0 else 0 for v in vals]
        packed -= _pack_nonneg(neg, B)
    return packed


def _unpack_nonneg(P: int, B: int, n: int) -> list:
    if n <= _SMALL:
        mask = (1 << B) - 1
        out = []
        for _ in range(n):
            out.append(P & mask)
            P >>= B
        return out
    half = n >> 1
    lo = P & ((1 << (half * B)) - 1)
    hi = P >> (half * B)
    return _unpack_nonneg(lo, B, half) + _unpack_nonneg(hi, B, n - half)


def _unpack_balanced(P: int, B: int, n_out: int) -> list:
    if P == 0:
        return [0] * n_out
    sign = 1
    if P < 0:
        sign = -1
        P = -P
    raw = _unpack_nonneg(P, B, n_out + 1)
    half = 1 << (B - 1)
    full = 1 << B
    out = [0] * n_out
    carry = 0
    for i in range(n_out):
        t = raw[i] + carry
        if t >= half:
            t -= full
            carry = 1
        else:
            carry = 0
        out[i] = t if sign > 0 else -t
    return out


def convolve_packed(a, c, B: int, n_out: int) -> list:
    return _unpack_balanced(_pack_signed(a, B) * _pack_signed(c, B), B, n_out)


def square_packed(a, B: int, n_out: int) -> list:
    pa = _pack_signed(a, B)
    return _unpack_balanced(pa * pa, B, n_out)
