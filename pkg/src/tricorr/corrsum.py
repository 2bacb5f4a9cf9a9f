"""Triple correlation sums  S = sum_{m,h} a(h) b(m) c(2m-h) w(m,h).

Three weight kinds:

    exponential   w = exp(-m/X) exp(-h/Y), truncated at m_cut = ceil(T X),
                  h_cut = ceil(T Y) with tail factor T (default 40)
    sharp         w = [m <= X][h <= Y]
    omega         w = h^(-(k/2+3/2)) [m <= X][h <= 2X]

The computational core exploits that h + (2m-h) = 2m: the inner sums
I(m) = sum_h A(h) c(2m-h) for all m at once are the even-index coefficients
of the polynomial product A * C.  The direct path computes that product
exactly over the integers (convolve module), with exponential weights
embedded as fixed-point integers at P = precision_bits + 80 bits, so the
whole accumulation is exact integer arithmetic and the only approximation
is the rounding of the weight tables plus the truncated exponential tail;
both are covered by rigorous bounds in est_rel_err.  The FFT path runs the
same convolution in double precision with pre-scaled operands and reports a
roundoff model instead.

Because the direct accumulation is exact integer addition (associative),
results are bitwise reproducible for any thread count; threads only split
the final dot product into index blocks merged in order.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft

from . import convolve
from .bounds import coefficient_majorant, log2_add, triple_tail_log2
from .dyadic import Dyadic
from .errors import CoverageError
from .hp import hp

DEFAULT_PRECISION_BITS = 256
DEFAULT_TAIL_FACTOR = 40.0
WEIGHT_GUARD_BITS = 80
# per-term weight-product rounding: tables are within 0.51 of round-to-
# nearest at scale 2^P, so |w~ - 2^P w| contributes at most 1.02 * 2^-P
WEIGHT_ROUND_COEFF = 1.02
# FFT roundoff model constant; covers the log2(L) butterfly growth and the
# double rounding of inputs, validated against the exact path in tests
FFT_MODEL_C0 = 16.0
CANCELLATION_WARN_THRESHOLD = 1e-3

EXPONENTIAL = "exponential"
SHARP = "sharp"
OMEGA = "omega"
_KINDS = (EXPONENTIAL, SHARP, OMEGA)


@dataclass(frozen=True)
class SmoothingKernel:
    kind: str
    X: float
    Y: float

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected {_KINDS}")
        if not (self.X > 0 and self.Y > 0):
            raise ValueError("kernel scales must be positive")
        if self.kind == OMEGA and self.Y != 2 * self.X:
            raise ValueError("omega kernel fixes Y = 2X")

    @classmethod
    def exponential(cls, X: float, Y: float) -> "SmoothingKernel":
        return cls(EXPONENTIAL, float(X), float(Y))

    @classmethod
    def sharp(cls, X: float, Y: float) -> "SmoothingKernel":
        return cls(SHARP, float(X), float(Y))

    @classmethod
    def omega(cls, X: float) -> "SmoothingKernel":
        return cls(OMEGA, float(X), 2.0 * float(X))

    def cuts(self, tail_factor: float = DEFAULT_TAIL_FACTOR) -> tuple:
        """(m_cut, h_cut) truncation indices."""
        if self.kind == EXPONENTIAL:
            return math.ceil(tail_factor * self.X), math.ceil(tail_factor * self.Y)
        return math.floor(self.X), math.floor(self.Y)


@dataclass
class TripleSumResult:
    value: Dyadic
    method: str
    terms_used: int
    m_cut: int
    h_cut: int
    precision_bits: int
    est_rel_err: float
    cancellation_warning: bool = field(default=False, compare=False)

    def to_json_dict(self, sig_digits: int = 50) -> dict:
        err = self.est_rel_err
        return {
            "value": self.value.to_decimal(sig_digits),
            "method": self.method,
            "terms_used": self.terms_used,
            "m_cut": self.m_cut,
            "h_cut": self.h_cut,
            "precision_bits": self.precision_bits,
            "est_rel_err": err if math.isfinite(err) else "inf",
        }


# ------------------------------------------------------------ utilities

def _require_coverage(f1, f2, f3, m_cut: int, h_cut: int):
    """a is h-indexed to h_cut, b m-indexed to m_cut, c reaches 2*m_cut - 1."""
    if m_cut >= 1:
        f2.require_coverage(m_cut)
        f3.require_coverage(max(1, 2 * m_cut - 1))
    if h_cut >= 1:
        f1.require_coverage(h_cut)


def _coeff_list(form, lo: int, hi: int, theta_boundary: bool = True) -> list:
    """[value_at(n) for n in lo..hi]; index 0 honors the theta boundary flag."""
    out = [form.value_at(n) for n in range(lo, hi + 1)]
    if lo == 0 and not theta_boundary:
        out[0] = 0
    return out


def _floats(ints) -> np.ndarray:
    return np.array([float(v) for v in ints], dtype=np.float64)


def _omega_q(f1, f2, f3) -> float:
    weights = {f.weight for f in (f1, f2, f3)}
    if None in weights or len(weights) != 1:
        raise ValueError(
            "omega kernel needs three eigenforms of one common weight "
            "(the h-exponent is k/2 + 3/2)"
        )
    (k,) = weights
    return k / 2.0 + 1.5


def _tail_rel_log2(f1, f2, f3, X, Y, m_cut, h_cut) -> float:
    return triple_tail_log2(
        coefficient_majorant(f1.kind, f1.weight),
        coefficient_majorant(f2.kind, f2.weight),
        coefficient_majorant(f3.kind, f3.weight),
        X, Y, m_cut, h_cut,
    )


def _abs_even_mass(a_abs: np.ndarray, c_abs: np.ndarray, b_abs: np.ndarray,
                   m_cut: int) -> tuple:
    """(sum_m b_abs[m] * (|a|*|c|)[2m], per-m array), via one real FFT."""
    L = next_fast_len(len(a_abs) + len(c_abs))
    conv = irfft(rfft(a_abs, L) * rfft(c_abs, L), L)
    idx = 2 * np.arange(1, m_cut + 1)
    per_m = np.maximum(conv[idx], 0.0)
    return float(np.dot(b_abs, per_m)), per_m


def _zero_result(kernel, method, m_cut, h_cut, precision_bits) -> TripleSumResult:
    return TripleSumResult(
        value=Dyadic(0),
        method=method,
        terms_used=m_cut * h_cut,
        m_cut=m_cut,
        h_cut=h_cut,
        precision_bits=precision_bits,
        est_rel_err=0.0,
    )


def _blocked_dot(ub: list, conv, m_cut: int, threads: int) -> int:
    """sum_m ub[m-1] * conv[2m], split over index blocks; exact ints, so any
    split gives the identical result."""
    def block(lo, hi):
        s = 0
        for m in range(lo, hi):
            s += ub[m - 1] * conv[2 * m]
        return s

    if threads <= 1 or m_cut < 4096:
        return block(1, m_cut + 1)
    bounds = np.linspace(1, m_cut + 1, threads + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        parts = list(ex.map(lambda be: block(be[0], be[1]), zip(bounds, bounds[1:])))
    return sum(parts)


# ----------------------------------------------------------- direct path

def triple_sum_direct(
    f1,
    f2,
    f3,
    kernel: SmoothingKernel,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    tail_factor: float = DEFAULT_TAIL_FACTOR,
    theta_boundary: bool = True,
    threads: int = 1,
) -> TripleSumResult:
    """Exact/high-precision evaluation of the weighted triple sum.

    f1 supplies a(h), f2 supplies b(m), f3 supplies c(2m-h).  theta_boundary
    controls whether a ThetaSeries in the c slot contributes r1(0)=1 on the
    h = 2m diagonal (cusp forms have no constant term either way).
    """
    if precision_bits < 53:
        raise ValueError("precision_bits < 53 rejected")
    m_cut, h_cut = kernel.cuts(tail_factor)
    if m_cut < 1 or h_cut < 1:
        return _zero_result(kernel, "direct", max(m_cut, 0), max(h_cut, 0),
                            precision_bits)
    _require_coverage(f1, f2, f3, m_cut, h_cut)

    # h > 2 m_cut only ever meets c(2m-h) with a negative index, which is
    # zero for every admissible f3, so the a side can stop at the diagonal
    h_eff = min(h_cut, 2 * m_cut)
    a = _coeff_list(f1, 1, h_eff)
    b = _coeff_list(f2, 1, m_cut)
    c = _coeff_list(f3, 0, 2 * m_cut - 1, theta_boundary)

    if kernel.kind == SHARP:
        conv = convolve.convolve([0] + a, c)
        total = _blocked_dot(b, conv, m_cut, threads)
        res = _zero_result(kernel, "direct", m_cut, h_cut, precision_bits)
        res.value = Dyadic(total)
        return res

    if kernel.kind == OMEGA:
        q = _omega_q(f1, f2, f3)
        # R(h) = sum_m b(m) c(2m-h) = (B2R * C)[2 m_cut - h] with b embedded
        # at even slots in reverse
        b2r = [0] * (2 * m_cut + 1)
        for m in range(1, m_cut + 1):
            b2r[2 * (m_cut - m)] = b[m - 1]
        conv = convolve.convolve(b2r, c)
        h_top = min(h_cut, 2 * m_cut)  # larger h hit only c(j <= 0) = 0
        work_prec = max(precision_bits, 64) + 48
        max_bits = 0
        terms = []
        for h in range(1, h_top + 1):
            r_h = conv[2 * m_cut - h]
            t = a[h - 1] * r_h
            if t:
                terms.append((h, t))
                max_bits = max(max_bits, abs(t).bit_length())
        work_prec = max(work_prec, max_bits + 48)
        with hp.ctx(work_prec):
            acc = hp.real(0)
            negq = hp.real(-q)
            for h, t in terms:
                acc = acc + hp.real(t) * hp.exp(negq * hp.log(hp.real(h)))
            value = hp.to_dyadic(acc)
        res = _zero_result(kernel, "direct", m_cut, h_cut, precision_bits)
        res.value = value
        return res

    # exponential kernel
    X, Y = kernel.X, kernel.Y
    P = precision_bits + WEIGHT_GUARD_BITS
    v = hp.exp_weight_table(h_eff, Y, P)
    u = hp.exp_weight_table(m_cut, X, P)
    va = [0] + [v[h - 1] * a[h - 1] for h in range(1, h_eff + 1)]
    ub = [u[m - 1] * b[m - 1] for m in range(1, m_cut + 1)]
    if not (any(va) and any(ub) and any(c)):
        return _zero_result(kernel, "direct", m_cut, h_cut, precision_bits)
    conv = convolve.convolve(va, c)
    scaled = _blocked_dot(ub, conv, m_cut, threads)
    value = Dyadic(scaled, -2 * P)

    # error budget: fixed-point weight rounding over the unweighted
    # rectangle mass, plus the rigorous exponential tail majorant
    a_abs = np.zeros(h_eff + 1)
    a_abs[1:] = np.abs(_floats(a))
    c_abs = np.abs(_floats(c))
    b_abs = np.abs(_floats(b))
    absrect, _ = _abs_even_mass(a_abs, c_abs, b_abs, m_cut)
    wr_log2 = (
        math.log2(absrect * WEIGHT_ROUND_COEFF * 1.001) - P
        if absrect > 0 else float("-inf")
    )
    tail_log2 = _tail_rel_log2(f1, f2, f3, X, Y, m_cut, h_cut)
    err_log2 = log2_add(wr_log2, tail_log2)
    val_log2 = value.log2_abs()
    if val_log2 == float("-inf"):
        est = float("inf") if err_log2 > float("-inf") else 0.0
    else:
        d = err_log2 - val_log2
        est = 2.0**d if d < 1023 else float("inf")

    return TripleSumResult(
        value=value,
        method="direct",
        terms_used=m_cut * h_cut,
        m_cut=m_cut,
        h_cut=h_cut,
        precision_bits=precision_bits,
        est_rel_err=est,
    )


# -------------------------------------------------------------- FFT path

def triple_sum_fft(
    f1,
    f2,
    f3,
    kernel: SmoothingKernel,
    fft_precision: str = "double",
    tail_factor: float = DEFAULT_TAIL_FACTOR,
    theta_boundary: bool = True,
) -> TripleSumResult:
    """Fast path: one double-precision FFT cross-correlation of {w_h(h)a(h)}
    and {c(j)}, then the weighted m-sum; operands are pre-scaled by their max
    magnitude to control dynamic range.

    fft_precision="extended" runs the identical convolution exactly (integer
    Kronecker substitution with 106-bit fixed-point weights) and therefore
    drops the roundoff model from est_rel_err; it is the slow-but-sure
    variant of the same algorithm.
    """
    if fft_precision not in ("double", "extended"):
        raise ValueError("fft_precision must be 'double' or 'extended'")
    if fft_precision == "extended":
        res = triple_sum_direct(
            f1, f2, f3, kernel,
            precision_bits=106,
            tail_factor=tail_factor,
            theta_boundary=theta_boundary,
        )
        res.method = "fft"
        return res

    m_cut, h_cut = kernel.cuts(tail_factor)
    if m_cut < 1 or h_cut < 1:
        return _zero_result(kernel, "fft", max(m_cut, 0), max(h_cut, 0), 53)
    _require_coverage(f1, f2, f3, m_cut, h_cut)

    h_eff = min(h_cut, 2 * m_cut)  # see triple_sum_direct: c(j<0) = 0
    a = np.zeros(h_eff + 1)
    a[1:] = _floats(_coeff_list(f1, 1, h_eff))
    b = _floats(_coeff_list(f2, 1, m_cut))
    c = _floats(_coeff_list(f3, 0, 2 * m_cut - 1, theta_boundary))
    m_idx = np.arange(1, m_cut + 1, dtype=np.float64)

    if kernel.kind == EXPONENTIAL:
        h_idx = np.arange(h_eff + 1, dtype=np.float64)
        va = a * np.exp(-h_idx / kernel.Y)
        ub = b * np.exp(-m_idx / kernel.X)
        conv_len = h_eff + 2 * m_cut
    elif kernel.kind == SHARP:
        va = a
        ub = b
        conv_len = h_eff + 2 * m_cut
    else:  # omega: correlate b against c, then weight the h-sum
        q = _omega_q(f1, f2, f3)
        b2r = np.zeros(2 * m_cut + 1)
        b2r[2 * (m_cut - np.arange(1, m_cut + 1, dtype=int))] = b
        conv_len = len(b2r) + len(c)
        sb = float(np.max(np.abs(b2r)))
        sc = float(np.max(np.abs(c)))
        if sb == 0.0 or sc == 0.0:
            return _zero_result(kernel, "fft", m_cut, h_cut, 53)
        L = next_fast_len(conv_len)
        conv = irfft(rfft(b2r / sb, L) * rfft(c / sc, L), L)
        h_top = min(h_cut, 2 * m_cut)
        h_idx = np.arange(1, h_top + 1, dtype=np.float64)
        r = conv[2 * m_cut - np.arange(1, h_top + 1, dtype=int)]
        hw = h_idx ** (-q)
        value_f = float(np.dot(a[1 : h_top + 1] * hw, r)) * sb * sc
        # roundoff model: elementwise FFT error scales with the peak of the
        # absolute convolution, not with the extracted entries
        conv_abs = irfft(rfft(np.abs(b2r) / sb, L) * rfft(np.abs(c) / sc, L), L)
        peak = float(np.max(conv_abs[: conv_len]))
        mass = float(np.sum(np.abs(a[1 : h_top + 1]) * hw)) * max(peak, 0.0) * sb * sc
        return _finish_fft(kernel, value_f, mass, L, m_cut, h_cut, None)

    sa = float(np.max(np.abs(va)))
    sc = float(np.max(np.abs(c)))
    if sa == 0.0 or sc == 0.0 or not np.any(ub):
        return _zero_result(kernel, "fft", m_cut, h_cut, 53)
    L = next_fast_len(conv_len + 1)
    conv = irfft(rfft(va / sa, L) * rfft(c / sc, L), L)
    idx = 2 * np.arange(1, m_cut + 1)
    value_f = float(np.dot(ub, conv[idx])) * sa * sc
    conv_abs = irfft(rfft(np.abs(va) / sa, L) * rfft(np.abs(c) / sc, L), L)
    peak = float(np.max(conv_abs[: conv_len]))
    mass = float(np.sum(np.abs(ub))) * max(peak, 0.0) * sa * sc

    tail = None
    if kernel.kind == EXPONENTIAL:
        tail = _tail_rel_log2(f1, f2, f3, kernel.X, kernel.Y, m_cut, h_cut)
    return _finish_fft(kernel, value_f, mass, L, m_cut, h_cut, tail)


def _finish_fft(kernel, value_f: float, abs_mass: float, L: int,
                m_cut: int, h_cut: int, tail_log2: Optional[float]) -> TripleSumResult:
    eps = 2.0**-53
    round_abs = FFT_MODEL_C0 * math.log2(max(L, 2)) * eps * abs_mass
    err_log2 = math.log2(round_abs) if round_abs > 0 else float("-inf")
    if tail_log2 is not None:
        err_log2 = log2_add(err_log2, tail_log2)
    if value_f == 0.0:
        est = float("inf") if err_log2 > float("-inf") else 0.0
    else:
        d = err_log2 - math.log2(abs(value_f))
        est = 2.0**d if d < 1023 else float("inf")
    warn = est > CANCELLATION_WARN_THRESHOLD
    if warn:
        warnings.warn(
            f"fft path near-cancellation: est_rel_err {est:.3e} "
            f"exceeds {CANCELLATION_WARN_THRESHOLD}"
        )
    return TripleSumResult(
        value=Dyadic.from_float(value_f),
        method="fft",
        terms_used=m_cut * h_cut,
        m_cut=m_cut,
        h_cut=h_cut,
        precision_bits=53,
        est_rel_err=est,
        cancellation_warning=warn,
    )


def omega_sum(f1, f2, f3, X: float,
              precision_bits: int = DEFAULT_PRECISION_BITS) -> TripleSumResult:
    """sum_{m<=X} sum_{h<=2X} a(h)b(m)c(2m-h) / h^(k/2+3/2), exact finite sum."""
    if X < 1:
        return _zero_result(SmoothingKernel(OMEGA, max(X, 0.5), 2 * max(X, 0.5)),
                            "direct", 0, 0, precision_bits)
    return triple_sum_direct(
        f1, f2, f3, SmoothingKernel.omega(X), precision_bits=precision_bits
    )
