"""High-precision scalar backend facade.

Weight tables, the h^(-q) reweighting, and Dirichlet-series evaluations need
arbitrary-precision reals and complexes.  gmpy2 (MPFR/MPC) is used when
importable, mpmath otherwise; set TRICORR_HP to "gmp" or "mpmath" to force.
Both expose the same small surface, and arithmetic on the returned values
goes through the usual operators, so callers stay backend-agnostic.
"""

from __future__ import annotations

import os
from typing import Iterable

from .dyadic import Dyadic


class _GmpHP:
    name = "gmp"

    def __init__(self):
        import gmpy2

        self.g = gmpy2

    def ctx(self, prec_bits: int):
        return self.g.context(precision=prec_bits)

    def real(self, x):
        return self.g.mpfr(x)

    def comp(self, re, im):
        return self.g.mpc(self.g.mpfr(re), self.g.mpfr(im))

    def exp(self, z):
        return self.g.exp(z)

    def log(self, z):
        return self.g.log(z)

    def to_dyadic(self, x) -> Dyadic:
        if x == 0:
            return Dyadic(0)
        man, e = x.as_mantissa_exp()
        return Dyadic(int(man), int(e))

    def nint_scaled(self, x, P: int) -> int:
        """round(x * 2**P) to nearest integer."""
        return int(self.g.mpz(self.g.rint_round(self.g.mul_2exp(x, P))))

    def exp_weight_table(self, count: int, Z: float, P: int) -> list:
        """[round(2**P * exp(-n/Z)) for n in 1..count] by recurrence.

        Working precision P+64 keeps the accumulated drift after n steps
        below 2**(-39) of the scale for any count < 2**24, so each entry is
        within 0.51 of the exactly rounded value.
        """
        g = self.g
        with g.context(precision=P + 64):
            r = g.exp(g.mpfr(-1) / g.mpfr(Z))
            acc = g.mpfr(1)
            out = []
            for _ in range(count):
                acc = acc * r
                out.append(int(g.mpz(g.rint_round(g.mul_2exp(acc, P)))))
        return out

    def pow_table(self, ns: Iterable[int], expo, prec_bits: int) -> list:
        """[n**expo for n in ns] at the given precision (real exponent)."""
        g = self.g
        with g.context(precision=prec_bits):
            e = g.mpfr(expo)
            return [g.exp(e * g.log(g.mpfr(n))) for n in ns]


class _MpmathHP:
    name = "mpmath"

    def __init__(self):
        import mpmath

        self.m = mpmath

    def ctx(self, prec_bits: int):
        return self.m.workprec(prec_bits)

    def real(self, x):
        return self.m.mpf(x)

    def comp(self, re, im):
        return self.m.mpc(re, im)

    def exp(self, z):
        return self.m.exp(z)

    def log(self, z):
        return self.m.log(z)

    def to_dyadic(self, x) -> Dyadic:
        sign, man, e, _ = x._mpf_
        man = int(man)
        return Dyadic(-man if sign else man, int(e))

    def nint_scaled(self, x, P: int) -> int:
        return int(self.m.nint(self.m.ldexp(x, P)))

    def exp_weight_table(self, count: int, Z: float, P: int) -> list:
        m = self.m
        with m.workprec(P + 64):
            r = m.exp(m.mpf(-1) / m.mpf(Z))
            acc = m.mpf(1)
            out = []
            for _ in range(count):
                acc = acc * r
                out.append(int(m.nint(m.ldexp(acc, P))))
        return out

    def pow_table(self, ns: Iterable[int], expo, prec_bits: int) -> list:
        m = self.m
        with m.workprec(prec_bits):
            e = m.mpf(expo)
            return [m.exp(e * m.log(m.mpf(n))) for n in ns]


def _select():
    forced = os.environ.get("TRICORR_HP", "").strip().lower()
    if forced == "mpmath":
        return _MpmathHP()
    try:
        return _GmpHP()
    except ImportError:
        if forced == "gmp":
            raise
        return _MpmathHP()


hp = _select()


def backend_name() -> str:
    return hp.name


def get_backend(name: str):
    if name == "gmp":
        return _GmpHP()
    if name == "mpmath":
        return _MpmathHP()
    raise ValueError(f"unknown backend {name!r}")
