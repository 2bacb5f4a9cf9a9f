"""gmpy2 backend: Kronecker packing via gmpy2.pack/unpack, mpz product."""

from __future__ import annotations

import gmpy2
from gmpy2 import mpz

_ZERO = mpz(0)


def _pack_signed(vals, B: int):
    # gmpy2.pack needs non-negative slot values; split by sign and subtract.
    pos = [mpz(v) if v > 0 else _ZERO for v in vals]
    neg = [mpz(-v) if v < 0 else _ZERO for v in vals]
    packed = gmpy2.pack(pos, B)
    if any(v < 0 for v in vals):
        packed -= gmpy2.pack(neg, B)
    return packed


def _unpack_balanced(P, B: int, n_out: int) -> list:
    """Recover signed digits from a packed product.

    True digits satisfy |d| < 2^(B-1), so the balanced-digit representation
    is unique: raw slots at or above 2^(B-1) borrow one from the next slot.
    """
    if P == 0:
        return [0] * n_out
    sign = 1
    if P < 0:
        sign = -1
        P = -P
    raw = gmpy2.unpack(P, B)
    half = mpz(1) << (B - 1)
    full = mpz(1) << B
    out = [0] * n_out
    carry = _ZERO
    n_raw = len(raw)
    for i in range(n_out):
        t = (raw[i] if i < n_raw else _ZERO) + carry
        if t >= half:
            t -= full
            carry = mpz(1)
        else:
            carry = _ZERO
        out[i] = int(t) if sign > 0 else -int(t)
    return out


def convolve_packed(a, c, B: int, n_out: int) -> list:
    return _unpack_balanced(_pack_signed(a, B) * _pack_signed(c, B), B, n_out)


def square_packed(a, B: int, n_out: int) -> list:
    pa = _pack_signed(a, B)
    return _unpack_balanced(pa * pa, B, n_out)
