"""Confront computed sums with predicted growth exponents.

theorem_bound evaluates X^ex Y^ey for the proved exponent pairs and the
classical comparison bounds.  fit_exponent regresses log|S| on log X over a
geometric grid to measure the observed cancellation exponent.  scan_grid
collects the grid data (direct path, optional FFT cross-check), choosing
the exponential tail factor adaptively so est_rel_err meets a target.
omega_growth_report normalizes the weighted sums by X^(k-1/2).
nonvanishing_scan counts three-term progressions (n-h, n, n+h) with all
three coefficients nonzero, exactly, via bitmask sweeps.  congruent_search
enumerates arithmetic progressions of squares and reports the squarefree
parts of their common differences.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .bounds import coefficient_majorant, squarefree_part, triple_tail_log2
from .corrsum import (
    DEFAULT_TAIL_FACTOR,
    SmoothingKernel,
    TripleSumResult,
    omega_sum,
    triple_sum_direct,
    triple_sum_fft,
)
from .errors import CoverageError

THETA_BEST = 7.0 / 64.0


@dataclass(frozen=True)
class TheoremBoundParams:
    k: int = 12
    theta: float = THETA_BEST
    rh: bool = False
    epsilon: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= THETA_BEST):
            raise ValueError("theta must lie in [0, 7/64]")
        if self.epsilon < 0.0:
            raise ValueError("epsilon must be >= 0")

    def exponents(self) -> tuple:
        """(x_exponent, y_exponent) of the proved bound."""
        ex = self.k - 1.0 + self.theta + 0.5 + self.epsilon
        ey = (self.k - 1.0) / 2.0 - self.theta + self.epsilon
        ey += 0.25 if self.rh else 0.5
        return ex, ey


def theorem_bound(params: TheoremBoundParams, X: float, Y: float) -> float:
    """X^(k-1+theta+1/2+eps) * Y^((k-1)/2-theta+1/2+eps), RH variant
    lowers the Y-exponent by 1/4."""
    if not (X >= 1.0 and Y >= 1.0):
        raise ValueError("bound evaluation needs X, Y >= 1")
    ex, ey = params.exponents()
    return X**ex * Y**ey


def comparison_bounds(k: int, X: float, Y: float) -> dict:
    """The benchmark envelopes: trivial term counting and the fully
    square-rooted heuristic."""
    return {
        "naive": X**k * Y ** ((k + 1) / 2.0),
        "sqrt2": X ** (k - 0.5) * Y ** (k / 2.0),
    }


def benchmark_slopes(params: TheoremBoundParams) -> dict:
    """Slope (X-exponent sum at fixed Y/X ratio) of each benchmark for
    log|S| vs log X regression comparisons."""
    k = params.k
    ex, ey = params.exponents()
    return {
        "naive": k + (k + 1) / 2.0,
        "double_sqrt": (k - 0.5) + k / 2.0,
        "thm1": ex + ey if not params.rh else ex + ey + 0.25,
        "thm2_rh": (k - 1.0 + params.theta + 0.5) + ((k - 1.0) / 2.0
                    - params.theta + 0.25) + 2 * params.epsilon,
        "three_quarter_avg": (k - 0.5) + (k / 2.0 - 0.25),
    }


# -------------------------------------------------------------- fitting

@dataclass
class ExponentFit:
    grid: list
    slope: float
    intercept: float
    r_squared: float
    window: tuple
    benchmark_distance: dict = field(default_factory=dict)
    dropped_zeros: int = 0


def _grid_pairs(results) -> list:
    out = []
    for row in results:
        if len(row) == 3:
            x, _, res = row
            v = abs(float(res.value)) if isinstance(res, TripleSumResult) else abs(float(res))
        else:
            x, v = row
            v = abs(float(v.value)) if isinstance(v, TripleSumResult) else abs(float(v))
        out.append((float(x), v))
    return out


def fit_exponent(
    results,
    window: Optional[tuple] = None,
    params: Optional[TheoremBoundParams] = None,
) -> ExponentFit:
    """Least-squares slope of log|value| against log(scale).

    results: (scale, value) pairs or scan_grid (X, Y, result) triples.
    window: (lo, hi) index range into the grid, inclusive-exclusive.
    """
    pairs = _grid_pairs(results)
    if window is None:
        window = (0, len(pairs))
    pairs = pairs[window[0] : window[1]]
    kept = [(x, v) for x, v in pairs if v > 0.0]
    dropped = len(pairs) - len(kept)
    if dropped:
        warnings.warn(f"dropping {dropped} zero-magnitude grid points from fit")
    if len(kept) < 3:
        raise ValueError("need at least 3 nonzero grid points to fit")
    lx = np.log([x for x, _ in kept])
    ly = np.log([v for _, v in kept])
    if float(np.ptp(lx)) == 0.0:
        raise ValueError("degenerate fit: all scales equal")
    A = np.vstack([lx, np.ones_like(lx)]).T
    (slope, intercept), res, _, _ = np.linalg.lstsq(A, ly, rcond=None)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(res[0]) if len(res) else float(np.sum((ly - A @ [slope, intercept]) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    dist = {}
    if params is not None:
        dist = {name: slope - bench for name, bench in benchmark_slopes(params).items()}
    return ExponentFit(
        grid=kept,
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        window=window,
        benchmark_distance=dist,
        dropped_zeros=dropped,
    )


# ------------------------------------------------------------- scanning

_KERNEL_BUILDERS = {
    "exponential": SmoothingKernel.exponential,
    "sharp": SmoothingKernel.sharp,
    "omega": lambda X, Y: SmoothingKernel.omega(X),
}


def _solve_tail_factor(majs, X, Y, val_log2, est_target) -> Optional[float]:
    """Smallest grid tail factor whose rigorous majorant tail sits below
    est_target relative to the measured |value|."""
    target = math.log2(est_target) + val_log2 - 0.5
    T = DEFAULT_TAIL_FACTOR
    while T <= 400.0:
        t = triple_tail_log2(majs[0], majs[1], majs[2], X, Y,
                             math.ceil(T * X), math.ceil(T * Y))
        if t <= target:
            return T
        T *= 1.2
    return None


def scan_grid(
    f1,
    f2,
    f3,
    kernel_kind: str,
    scales: Sequence[float],
    ratio: float = 1.0,
    tail_factor: Optional[float] = None,
    est_target: float = 1e-6,
    precision_bits: int = 256,
    threads: int = 1,
    fft_check: bool = False,
    theta_boundary: bool = True,
) -> list:
    """Evaluate the configured sum at each grid scale; returns
    [(X, Y, TripleSumResult), ...] in grid order.

    tail_factor=None picks, per exponential-kernel point, the smallest
    factor whose rigorous tail majorant pushes est_rel_err below
    est_target (warning if 400 is not enough).  Grid points are
    independent; any thread count gives identical results.
    """
    if kernel_kind not in _KERNEL_BUILDERS:
        raise ValueError(f"unknown kernel kind {kernel_kind!r}")
    scales = [float(s) for s in scales]
    if any(b <= a for a, b in zip(scales, scales[1:])):
        raise ValueError("scales must be strictly increasing")
    if not scales:
        return []
    build = _KERNEL_BUILDERS[kernel_kind]
    majs = tuple(coefficient_majorant(f.kind, f.weight) for f in (f1, f2, f3))

    def one_point(X: float):
        Y = 2.0 * X if kernel_kind == "omega" else ratio * X
        kern = build(X, Y)
        try:
            T0 = tail_factor if tail_factor is not None else DEFAULT_TAIL_FACTOR
            res = triple_sum_direct(
                f1, f2, f3, kern,
                precision_bits=precision_bits,
                tail_factor=T0,
                theta_boundary=theta_boundary,
            )
            if (tail_factor is None and kernel_kind == "exponential"
                    and res.est_rel_err > est_target):
                for _ in range(2):
                    T = _solve_tail_factor(majs, X, Y, res.value.log2_abs(),
                                           est_target)
                    if T is None or T <= T0:
                        break
                    T0 = T
                    res = triple_sum_direct(
                        f1, f2, f3, kern,
                        precision_bits=precision_bits,
                        tail_factor=T0,
                        theta_boundary=theta_boundary,
                    )
                    if res.est_rel_err <= est_target:
                        break
                if res.est_rel_err > est_target:
                    warnings.warn(
                        f"scale X={X:g}: est_rel_err {res.est_rel_err:.3e} "
                        f"above target {est_target:g} at tail factor {T0:g}"
                    )
        except CoverageError as e:
            raise CoverageError(
                f"scale X={X:g}: {e}", required_n_max=e.required_n_max
            ) from e
        if fft_check:
            fres = triple_sum_fft(
                f1, f2, f3, kern,
                tail_factor=T0 if kernel_kind == "exponential" else DEFAULT_TAIL_FACTOR,
                theta_boundary=theta_boundary,
            )
            budget = res.est_rel_err + fres.est_rel_err
            ref = abs(float(res.value))
            gap = abs(float(fres.value) - float(res.value))
            if ref > 0.0 and not (gap <= budget * ref or gap <= budget):
                raise ValueError(
                    f"scale X={X:g}: fft/direct gap {gap:.3e} exceeds "
                    f"combined error budget {budget:.3e}"
                )
        return (X, Y, res)

    if threads <= 1 or len(scales) == 1:
        return [one_point(X) for X in scales]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(one_point, scales))


# --------------------------------------------------------- omega growth

@dataclass
class OmegaGrowthReport:
    rows: list                 # (X, ratio, TripleSumResult)
    max_ratio: float
    min_ratio: float
    decays_top_decade: Optional[bool]
    degenerate: bool

    def table(self) -> str:
        lines = ["X,ratio,value"]
        for X, r, res in self.rows:
            lines.append(f"{X:g},{r!r},{res.value.to_decimal(25)}")
        return "\n".join(lines) + "\n"


def omega_growth_report(f1, f2, f3, scales: Sequence[float],
                        precision_bits: int = 256) -> OmegaGrowthReport:
    """R(X) = |S_omega(X)| / X^(k-1/2) over the grid.

    A monotone drop of more than 10^3 across the top decade is reported in
    the flag (evidence worth inspecting, not a failure).
    """
    ks = {f.weight for f in (f1, f2, f3)}
    if None in ks or len(ks) != 1:
        raise ValueError("growth report needs three eigenforms of one weight")
    (k,) = ks
    scales = [float(s) for s in scales]
    rows = []
    for X in scales:
        res = omega_sum(f1, f2, f3, X, precision_bits=precision_bits)
        l2 = res.value.log2_abs()
        ratio = 0.0 if l2 == float("-inf") else 2.0 ** (l2 - (k - 0.5) * math.log2(X))
        rows.append((X, ratio, res))
    ratios = [r for _, r, _ in rows]
    decays: Optional[bool] = None
    if len(rows) >= 2:
        top = [r for X, r, _ in rows if X >= max(scales) / 10.0]
        if len(top) >= 2:
            monotone = all(b < a for a, b in zip(top, top[1:]))
            decays = monotone and top[0] > 1e3 * top[-1] > 0.0
        else:
            decays = False
    return OmegaGrowthReport(
        rows=rows,
        max_ratio=max(ratios),
        min_ratio=min(ratios),
        decays_top_decade=decays,
        degenerate=all(r == 0.0 for r in ratios),
    )


# --------------------------------------------------- nonvanishing triples

@dataclass(frozen=True)
class APTriple:
    h: int
    m: int
    third: int
    product: int

    def __post_init__(self):
        if self.third != 2 * self.m - self.h or self.third < 1:
            raise ValueError("AP triple must satisfy third = 2m - h >= 1")


@dataclass
class NonvanishingReport:
    n_limit: int
    total_triples: int
    nonvanishing_count: int
    density_fraction: Optional[Fraction]
    witnesses: list

    @property
    def density(self) -> Optional[float]:
        return None if self.density_fraction is None else float(self.density_fraction)


def nonvanishing_scan(f, n_limit: int, witness_cap: int = 100) -> NonvanishingReport:
    """Count pairs (n, h), 1 <= h < n <= n_limit, with
    a(n-h) a(n) a(n+h) != 0, by exact integer tests.

    One bitmask V of nonzero indices up to 2 n_limit - 1 turns each h into
    popcount(V & V>>h & V<<h) over the n-window.
    """
    if n_limit < 1:
        raise ValueError("n_limit must be >= 1")
    top = 2 * n_limit - 1
    f.require_coverage(max(top, 1))
    V = 0
    for n in range(1, top + 1):
        if f.a(n) != 0:
            V |= 1 << n
    total = n_limit * (n_limit - 1) // 2
    count = 0
    for h in range(1, n_limit):
        window = ((1 << (n_limit + 1)) - (1 << (h + 1)))  # bits h+1 .. n_limit
        count += (V & (V >> h) & (V << h) & window).bit_count()
    witnesses = []
    for n in range(2, n_limit + 1):
        for h in range(1, n):
            p = f.a(n - h) * f.a(n) * f.a(n + h)
            if p != 0:
                witnesses.append(APTriple(h=n - h, m=n, third=n + h, product=p))
                if len(witnesses) >= witness_cap:
                    break
        if len(witnesses) >= witness_cap:
            break
    return NonvanishingReport(
        n_limit=n_limit,
        total_triples=total,
        nonvanishing_count=count,
        density_fraction=Fraction(count, total) if total else None,
        witnesses=witnesses,
    )


# ------------------------------------------------------- congruent search

@dataclass(frozen=True)
class CongruentHit:
    x2: int
    y2: int
    z2: int
    area: int
    squarefree_part: int

    def verify(self) -> bool:
        rx, ry, rz = (math.isqrt(self.x2), math.isqrt(self.y2), math.isqrt(self.z2))
        sq = rx * rx == self.x2 and ry * ry == self.y2 and rz * rz == self.z2
        ap = self.y2 - self.x2 == self.z2 - self.y2
        t = self.squarefree_part
        s2, rem = divmod(self.area, t)
        rs = math.isqrt(s2) if rem == 0 else -1
        return sq and ap and rem == 0 and rs * rs == s2 and self.area == self.y2 - self.x2


def congruent_search(square_limit: int) -> list:
    """Arithmetic progressions of squares x^2 < y^2 <= square_limit with
    2y^2 - x^2 a perfect square; one primitive hit per squarefree class.

    The common difference y^2 - x^2 is (a square multiple of) a congruent
    number; ascending enumeration meets each class's primitive triple
    first, so first-seen wins the dedup.
    """
    if square_limit < 1:
        return []
    hits = {}
    order = []
    for y in range(2, math.isqrt(square_limit) + 1):
        yy = y * y
        for x in range(1, y):
            zz = 2 * yy - x * x
            z = math.isqrt(zz)
            if z * z != zz:
                continue
            area = yy - x * x
            t = squarefree_part(area)
            if t not in hits:
                hit = CongruentHit(x2=x * x, y2=yy, z2=zz, area=area,
                                   squarefree_part=t)
                hits[t] = hit
                order.append(t)
    return [hits[t] for t in order]
