"""Exact integer convolution kernels with runtime backend selection.

Every correlation sum in this package reduces to one exact convolution of
integer sequences (see corrsum).  The hot operation is therefore a single
product of two huge integers built by Kronecker substitution: pack the
sequences into integers with a slot width wide enough that no cross-slot
carry can occur, multiply once, unpack.  Two interchangeable backends:

  gmp     packs/unpacks with gmpy2 and multiplies mpz values, so the product
          runs on GMP's FFT-based multiplication,
  purepy  CPython ints only, divide-and-conquer pack/unpack; slower but has
          no dependency beyond the standard library.

The fastest available backend is chosen at import; set TRICORR_CONVOLVE to
"gmp" or "purepy" to force one.  Both produce identical outputs.
"""

from __future__ import annotations

import importlib
import os

from . import _purepy

_FORCED = os.environ.get("TRICORR_CONVOLVE", "").strip().lower()

_gmp = None
if _FORCED != "purepy":
    try:
        _gmp = importlib.import_module("._gmp", __name__)
    except ImportError:
        _gmp = None
        if _FORCED == "gmp":
            raise ImportError(
                "TRICORR_CONVOLVE=gmp requested but gmpy2 is not importable"
            )

_impl = _gmp if _gmp is not None else _purepy

BACKEND = "gmp" if _gmp is not None else "purepy"


def backend_name() -> str:
    return BACKEND


def get_backend(name: str):
    """Return a backend module by name, for benchmarks and cross-checks."""
    if name == "purepy":
        return _purepy
    if name == "gmp":
        if _gmp is None:
            raise ImportError("gmp backend unavailable (gmpy2 not importable)")
        return _gmp
    raise ValueError(f"unknown backend {name!r}")


def slot_width(a, c) -> int:
    """Bits per slot so that convolution digits cannot collide.

    Each output digit is a sum of at most min(len(a), len(c)) products, each
    bounded by max|a| * max|c|; two extra bits cover the sign in the balanced
    representation.
    """
    ma = max((abs(x) for x in a), default=0)
    mc = max((abs(x) for x in c), default=0)
    bound = min(len(a), len(c)) * ma * mc
    return bound.bit_length() + 2


def convolve(a: list, c: list) -> list:
    """Exact linear convolution: out[n] = sum_{i+j=n} a[i]*c[j].

    Output length len(a)+len(c)-1.  Inputs are arbitrary Python ints.
    """
    if not a or not c:
        return []
    n_out = len(a) + len(c) - 1
    ma = any(a)
    mc = any(c)
    if not (ma and mc):
        return [0] * n_out
    B = slot_width(a, c)
    return _impl.convolve_packed(a, c, B, n_out)


def square(a: list) -> list:
    """Exact self-convolution of a; same as convolve(a, a) but one pack."""
    if not a:
        return []
    n_out = 2 * len(a) - 1
    if not any(a):
        return [0] * n_out
    B = slot_width(a, a)
    return _impl.square_packed(a, B, n_out)
