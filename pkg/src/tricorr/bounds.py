"""Sieves and rigorous majorants used by verification and error budgets.

All tail estimates here are genuine upper bounds, not heuristics:

  * d(n) <= sqrt(3 n) for every n >= 1 (the square divisor-pair argument,
    with the constant checked exactly for small n), so an eigenform of
    weight k has |a(n)| <= sqrt(3) * n^(k/2).
  * sum_{n>=1} n^a exp(-n/Z) <= Gamma(a+1) Z^(a+1) + (a Z)^a e^(-a), since a
    unimodal sequence is bounded by its integral plus its maximum.
  * sum_{n>N} n^a exp(-n/Z) <= f(N+1) (1 + Z/beta) with f the summand and
    beta = 1 - a Z/(N+1), valid when beta > 0 (term ratio is then at most
    exp(-beta/Z) and 1/(1-e^(-x)) <= 1 + 1/x).
  * sum_{n>N} n^(-p) <= N^(1-p)/(p-1) for p > 1.

Bounds are combined in log2 space to avoid overflow, with an explicit 5%
slack factor absorbing floating-point rounding of the bound itself.
"""

from __future__ import annotations

import math
from typing import Dict, List

LOG2E = math.log2(math.e)
_SLACK_LOG2 = math.log2(1.05)


# ---------------------------------------------------------------- sieves

def smallest_prime_factors(n_max: int) -> List[int]:
    """spf[n] = least prime factor of n (spf[1] = 1)."""
    spf = list(range(n_max + 1))
    for p in range(2, math.isqrt(n_max) + 1):
        if spf[p] == p:
            for m in range(p * p, n_max + 1, p):
                if spf[m] == m:
                    spf[m] = p
    return spf


def factorize(n: int, spf: List[int] | None = None) -> Dict[int, int]:
    """Prime factorization as {p: exponent}; trial division if no sieve."""
    out: Dict[int, int] = {}
    if spf is not None and n < len(spf):
        while n > 1:
            p = spf[n]
            out[p] = out.get(p, 0) + 1
            n //= p
        return out
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisor_counts(n_max: int) -> List[int]:
    """d(n) for n = 0..n_max (d[0] = 0)."""
    d = [0] * (n_max + 1)
    for q in range(1, n_max + 1):
        for m in range(q, n_max + 1, q):
            d[m] += 1
    return d


def sigma_table(power: int, n_max: int) -> List[int]:
    """sigma_power(n) = sum of d^power over divisors d of n, exact ints."""
    s = [0] * (n_max + 1)
    for q in range(1, n_max + 1):
        qp = q**power
        for m in range(q, n_max + 1, q):
            s[m] += qp
    return s


def squarefree_part(n: int) -> int:
    """Largest squarefree divisor q with n = q * square."""
    if n <= 0:
        raise ValueError("n must be positive")
    out = 1
    for p, e in factorize(n).items():
        if e & 1:
            out *= p
    return out


def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


# ------------------------------------------------------- log-space sums

def log2_add(a: float, b: float) -> float:
    """log2(2^a + 2^b), safe against -inf."""
    if a == float("-inf"):
        return b
    if b == float("-inf"):
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log2(1.0 + 2.0 ** (lo - hi))


def exp_series_full_log2(alpha: float, Z: float) -> float:
    """log2 upper bound for sum_{n>=1} n^alpha exp(-n/Z)."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    lg_integral = (math.lgamma(alpha + 1.0) + (alpha + 1.0) * math.log(Z)) * LOG2E
    lg_max = (alpha * (math.log(alpha * Z) - 1.0)) * LOG2E if alpha > 0 else 0.0
    return log2_add(lg_integral, lg_max) + _SLACK_LOG2


def exp_series_tail_log2(alpha: float, Z: float, N: int) -> float:
    """log2 upper bound for sum_{n>N} n^alpha exp(-n/Z); +inf if the
    geometric-domination condition N+1 > alpha*Z fails."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    n1 = N + 1
    beta = 1.0 - alpha * Z / n1
    if beta <= 0.0:
        return float("inf")
    lg_first = alpha * math.log2(n1) - n1 / Z * LOG2E
    return lg_first + math.log2(1.0 + Z / beta) + _SLACK_LOG2


def zeta_tail(p: float, N: int) -> float:
    """Upper bound for sum_{n>N} n^(-p), p > 1."""
    if p <= 1.0:
        raise ValueError("zeta tail needs p > 1")
    return N ** (1.0 - p) / (p - 1.0) * 1.05


# ---------------------------------------------- triple-sum tail majorant

def coefficient_majorant(kind: str, weight: int | None) -> tuple:
    """(log2 constant, exponent) with |a(n)| <= 2^const * n^expo.

    Eigenforms use the divisor-bound form sqrt(3) n^(k/2); the one-variable
    theta series has coefficients bounded by 2.
    """
    if kind == "eigenform":
        if weight is None:
            raise ValueError("eigenform majorant needs a weight")
        return (0.5 * math.log2(3.0), weight / 2.0)
    if kind == "theta":
        return (1.0, 0.0)
    raise ValueError(f"unknown form kind {kind!r}")


def triple_tail_log2(
    maj_a: tuple,
    maj_b: tuple,
    maj_c: tuple,
    X: float,
    Y: float,
    m_cut: int,
    h_cut: int,
) -> float:
    """log2 bound for the exponentially weighted triple-sum mass outside
    the rectangle m <= m_cut, h <= h_cut.

    Majorants are (log2 const, exponent) pairs for the h-indexed, m-indexed
    and (2m-h)-indexed factors; the third is bounded by its value at 2m.
    """
    ca, ea = maj_a
    cb, eb = maj_b
    cc, ec = maj_c
    c_all = ca + cb + cc + ec  # 2^ec from (2m-h) <= 2m
    am = eb + ec
    ah = ea
    t_m = exp_series_tail_log2(am, X, m_cut) + exp_series_full_log2(ah, Y)
    t_h = exp_series_full_log2(am, X) + exp_series_tail_log2(ah, Y, h_cut)
    return c_all + log2_add(t_m, t_h) + _SLACK_LOG2
