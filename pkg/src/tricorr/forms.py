"""Eigenform coefficient tables: generation, validation, ingestion, caching.

The level-1 cusp spaces of weight 12, 16, 18, 20, 22, 26 are one-dimensional,
so each normalized eigenform there is an explicit product of Delta with
Eisenstein series:

    12: Delta   16: Delta*E4     18: Delta*E6      20: Delta*E4^2
                22: Delta*E4*E6  26: Delta*E4^2*E6

Delta itself comes from the Jacobi identity for the eta cube,

    eta(q)^3 (up to the q^(1/8) prefactor) = sum_{j>=0} (-1)^j (2j+1) q^(j(j+1)/2),

which has ~sqrt(n) nonzero terms; three exact squarings give the 24th power
and a final index shift the tau values.  Everything is arbitrary-precision
integer arithmetic; floats never touch a coefficient.

Validation checks the Hecke relations and the Deligne bound as exact integer
statements (the bound via |a(n)|^2 <= d(n)^2 n^(k-1)).  Ingestion reads the
same CSV format the cache writes, or a remote JSON object with decimal-string
coefficients.
"""

from __future__ import annotations

import json
import math
import re
import time
import urllib.request
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from . import convolve
from .bounds import divisor_counts, is_square, smallest_prime_factors
from .errors import CoverageError, IngestError

EIGENFORM_WEIGHTS = (12, 16, 18, 20, 22, 26)

_DEFAULT_LABELS = {12: "delta", 16: "w16", 18: "w18", 20: "w20", 22: "w22", 26: "w26"}

# generation guard: coefficient tables are O(n_max) big ints; past this the
# packed squarings alone need multiple GB
N_MAX_LIMIT = 1 << 24


class PowerSeries:
    """Truncated integer q-expansion; coeffs[n] is the coefficient of q^n."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: List[int]):
        self.coeffs = list(coeffs)

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i):
        return self.coeffs[i]

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, PowerSeries) and self.coeffs == other.coeffs

    def mul(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.n_max, other.n_max)
        prod = convolve.convolve(self.coeffs[: n + 1], other.coeffs[: n + 1])
        return PowerSeries(prod[: n + 1])

    def square(self) -> "PowerSeries":
        sq = convolve.square(self.coeffs)
        return PowerSeries(sq[: self.n_max + 1])

    def power(self, e: int) -> "PowerSeries":
        if e < 0:
            raise ValueError("negative power")
        out = PowerSeries([1] + [0] * self.n_max)
        base = self
        while e:
            if e & 1:
                out = out.mul(base)
            e >>= 1
            if e:
                base = base.square()
        return out

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        return f"PowerSeries([{head}{', ...' if self.n_max > 5 else ''}], n_max={self.n_max})"


def _check_budget(n_max: int):
    if n_max > N_MAX_LIMIT:
        raise MemoryError(
            f"n_max={n_max} exceeds the configured generation budget {N_MAX_LIMIT}"
        )


def gen_eta24(n_max: int) -> PowerSeries:
    """q-expansion of Delta: coefficient of q^n is tau(n), index 0 is 0."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    _check_budget(n_max)
    # eta cube, sparse: (-1)^j (2j+1) at triangular indices
    e3 = [0] * n_max
    j = 0
    while j * (j + 1) // 2 < n_max:
        e3[j * (j + 1) // 2] = (2 * j + 1) if j % 2 == 0 else -(2 * j + 1)
        j += 1
    e6 = convolve.square(e3)[:n_max]
    e12 = convolve.square(e6)[:n_max]
    e24 = convolve.square(e12)[:n_max]
    return PowerSeries([0] + e24)


def gen_eisenstein(weight: int, n_max: int) -> PowerSeries:
    """Normalized E4 or E6 with exact integer coefficients."""
    if weight not in (4, 6):
        raise ValueError(f"unsupported Eisenstein weight {weight}; expected 4 or 6")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    _check_budget(n_max)
    power, scale = (3, 240) if weight == 4 else (5, -504)
    coeffs = [1] + [0] * n_max
    # sigma_power sieve folded directly into the output
    for q in range(1, n_max + 1):
        qp = q**power
        for m in range(q, n_max + 1, q):
            coeffs[m] += scale * qp
    return PowerSeries(coeffs)


@dataclass(frozen=True)
class HeckeEigenform:
    """Normalized eigenform coefficients a(1)..a(n_max), exact integers.

    coeffs is index-aligned: coeffs[0] = 0, coeffs[n] = a(n).
    """

    weight: int
    level: int
    label: str
    coeffs: List[int]
    source: str = "generated"  # generated | file | remote

    kind = "eigenform"

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def a(self, n: int) -> int:
        if n < 1 or n > self.n_max:
            raise CoverageError(
                f"a({n}) outside table for {self.label} (n_max={self.n_max})",
                required_n_max=n,
            )
        return self.coeffs[n]

    def value_at(self, n: int) -> int:
        """Coefficient with q-expansion support: 0 for n <= 0."""
        if n <= 0:
            return 0
        return self.a(n)

    def require_coverage(self, n_need: int):
        if n_need > self.n_max:
            raise CoverageError(
                f"form {self.label} covers n <= {self.n_max} but n <= {n_need} is required",
                required_n_max=n_need,
            )

    def truncated(self, n_max: int) -> "HeckeEigenform":
        self.require_coverage(n_max)
        return HeckeEigenform(
            self.weight, self.level, self.label, self.coeffs[: n_max + 1], self.source
        )


@dataclass(frozen=True)
class ThetaSeries:
    """r1 table: r1(0)=1, r1(n)=2 for positive squares, else 0."""

    coeffs: List[int]

    kind = "theta"
    weight = None
    level = 1
    label = "theta"

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def value_at(self, n: int) -> int:
        if n < 0:
            return 0
        if n > self.n_max:
            raise CoverageError(
                f"r1({n}) outside table (n_max={self.n_max})", required_n_max=n
            )
        return self.coeffs[n]

    def require_coverage(self, n_need: int):
        if n_need > self.n_max:
            raise CoverageError(
                f"theta table covers n <= {self.n_max} but n <= {n_need} is required",
                required_n_max=n_need,
            )


def gen_theta(n_max: int) -> ThetaSeries:
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    coeffs = [0] * (n_max + 1)
    coeffs[0] = 1
    r = 1
    while r * r <= n_max:
        coeffs[r * r] = 2
        r += 1
    return ThetaSeries(coeffs)


def gen_level1_eigenform(k: int, n_max: int) -> HeckeEigenform:
    """The unique normalized eigenform of level 1, weight k in {12,...,26}."""
    if k not in EIGENFORM_WEIGHTS:
        raise ValueError(
            f"weight {k} has no one-dimensional level-1 cusp space; "
            f"supported weights: {EIGENFORM_WEIGHTS}"
        )
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    delta = gen_eta24(n_max)
    if k == 12:
        series = delta
    else:
        e4_count, e6_count = {16: (1, 0), 18: (0, 1), 20: (2, 0), 22: (1, 1), 26: (2, 1)}[k]
        series = delta
        if e4_count:
            e4 = gen_eisenstein(4, n_max)
            series = series.mul(e4.power(e4_count) if e4_count > 1 else e4)
        if e6_count:
            series = series.mul(gen_eisenstein(6, n_max))
    return HeckeEigenform(k, 1, _DEFAULT_LABELS[k], series.coeffs)


# ----------------------------------------------------------- validation

@dataclass
class ValidationReport:
    label: str
    n_limit: int
    mult_checked: int = 0
    recursion_checked: int = 0
    deligne_checked: int = 0
    violations: List[dict] = field(default_factory=list)
    elapsed_s: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        state = "pass" if self.ok else f"FAIL ({len(self.violations)} violations)"
        return (
            f"{self.label}: n <= {self.n_limit}: mult {self.mult_checked}, "
            f"recursion {self.recursion_checked}, Deligne {self.deligne_checked}: {state}"
        )


def verify_form(form: HeckeEigenform, n_limit: int) -> ValidationReport:
    """Exact-arithmetic Hecke/Deligne audit of a coefficient table.

    For every n <= n_limit coprime to the level this checks multiplicativity
    against the p-part split n = p^e * rest, the prime-power recursion
    a(p^(r+1)) = a(p) a(p^r) - p^(k-1) a(p^(r-1)), and the squared Deligne
    bound |a(n)|^2 <= d(n)^2 n^(k-1).  All integer comparisons, no floats.
    """
    if n_limit > form.n_max:
        raise CoverageError(
            f"verify_form needs n <= {n_limit} but table stops at {form.n_max}",
            required_n_max=n_limit,
        )
    t0 = time.monotonic()
    rep = ValidationReport(label=form.label, n_limit=n_limit)
    a = form.coeffs
    k1 = form.weight - 1
    level = form.level

    if n_limit >= 1 and a[1] != 1:
        rep.violations.append({"n": 1, "check": "normalization", "detail": f"a(1)={a[1]}"})

    spf = smallest_prime_factors(n_limit)
    dcount = divisor_counts(n_limit)

    for n in range(2, n_limit + 1):
        p = spf[n]
        if level % p == 0:
            continue
        pe = p
        rest = n // p
        while rest % p == 0:
            pe *= p
            rest //= p
        if rest > 1 and math.gcd(rest, level) == 1:
            rep.mult_checked += 1
            if a[n] != a[pe] * a[rest]:
                rep.violations.append(
                    {"n": n, "check": "multiplicativity",
                     "detail": f"a({n}) != a({pe})*a({rest})"}
                )

    for p in range(2, n_limit + 1):
        if spf[p] != p or level % p == 0:
            continue
        pk = p**k1
        r = 1
        while p ** (r + 1) <= n_limit:
            rep.recursion_checked += 1
            lhs = a[p ** (r + 1)]
            rhs = a[p] * a[p**r] - pk * a[p ** (r - 1)] if r >= 2 else a[p] * a[p] - pk
            if lhs != rhs:
                rep.violations.append(
                    {"n": p ** (r + 1), "check": "recursion",
                     "detail": f"p={p}, r={r}"}
                )
            r += 1

    for n in range(1, n_limit + 1):
        if math.gcd(n, level) != 1:
            continue
        rep.deligne_checked += 1
        if a[n] * a[n] > dcount[n] * dcount[n] * n**k1:
            rep.violations.append(
                {"n": n, "check": "deligne", "detail": f"|a({n})| > d({n}) n^{(k1 / 2)}"}
            )

    rep.elapsed_s = time.monotonic() - t0
    return rep


# ------------------------------------------------------ files and cache

_HEADER_RE = re.compile(r"^#\s*weight=(\d+)\s+level=(\d+)\s+label=(\S+)\s*$")


def export_csv(form: HeckeEigenform, path) -> None:
    """Write the canonical coefficient CSV (also the cache format).

    Deterministic byte-for-byte: header plus one `n,a(n)` row per index,
    no timestamps.
    """
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# weight={form.weight} level={form.level} label={form.label}\n")
        for n in range(1, form.n_max + 1):
            f.write(f"{n},{form.coeffs[n]}\n")


def _parse_csv(path) -> HeckeEigenform:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise e
    lines = text.splitlines()
    if not lines:
        raise IngestError(f"{path}: empty file")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise IngestError(
            f"{path}:1: bad header; expected '# weight=<k> level=<N> label=<str>'"
        )
    weight, level, label = int(m.group(1)), int(m.group(2)), m.group(3)
    coeffs = [0]
    expect = 1
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise IngestError(f"{path}:{i}: expected 'n,a(n)'")
        try:
            n = int(parts[0])
            an = int(parts[1])
        except ValueError:
            raise IngestError(f"{path}:{i}: non-integer field") from None
        if n != expect:
            raise IngestError(
                f"{path}:{i}: index {n} out of order (expected {expect}; "
                "rows must be strictly increasing from 1 with no gaps)"
            )
        coeffs.append(an)
        expect += 1
    if expect == 1:
        raise IngestError(f"{path}: no coefficient rows")
    return HeckeEigenform(weight, level, label, coeffs, source="file")


def _parse_remote_json(url: str, timeout: float) -> HeckeEigenform:
    req = urllib.request.Request(url, headers={"Accept": "application/json"})
    with urllib.request.urlopen(req, timeout=timeout) as resp:
        payload = json.loads(resp.read().decode("utf-8"))
    for key in ("weight", "level", "label", "coeffs"):
        if key not in payload:
            raise IngestError(f"remote object missing key {key!r}")
    try:
        coeffs = [0] + [int(c) for c in payload["coeffs"]]
    except (TypeError, ValueError):
        raise IngestError("remote coeffs must be decimal integer strings") from None
    if len(coeffs) < 2:
        raise IngestError("remote coeffs empty")
    return HeckeEigenform(
        int(payload["weight"]), int(payload["level"]), str(payload["label"]),
        coeffs, source="remote",
    )


def ingest_coefficients(
    source,
    fmt: Optional[str] = None,
    force: bool = False,
    timeout: float = 30.0,
    validate: bool = True,
) -> HeckeEigenform:
    """Load a coefficient table from a CSV file or a remote JSON endpoint.

    Hecke/Deligne validation runs on the full table and rejects violations
    unless force=True downgrades them to a warning (deliberately ingesting
    non-eigenform data is allowed but must be explicit).
    """
    src = str(source)
    if fmt is None:
        fmt = "json" if src.startswith(("http://", "https://")) else "csv"
    if fmt == "csv":
        form = _parse_csv(src)
    elif fmt == "json":
        form = _parse_remote_json(src, timeout)
    else:
        raise ValueError(f"unknown format {fmt!r}")

    if validate:
        rep = verify_form(form, form.n_max)
        if not rep.ok:
            head = rep.violations[:3]
            msg = (
                f"ingested table {form.label!r} fails validation at "
                f"{len(rep.violations)} indices; first: {head}"
            )
            if force:
                warnings.warn(msg)
            else:
                raise IngestError(msg)
    return form


def default_label(weight: int) -> str:
    return _DEFAULT_LABELS.get(weight, f"w{weight}")


def _cache_stem(label: str, weight: int, level: int, n_max: int) -> str:
    return f"{label}.w{weight}.l{level}.n{n_max}"


def cached_eigenform(
    weight: int,
    n_max: int,
    cache_dir=None,
    label: Optional[str] = None,
) -> HeckeEigenform:
    """gen_level1_eigenform with a disk cache in the ingestion CSV format.

    Cache files are addressed by (label, weight, level, n_max); a lookup may
    satisfy a request from any file with the same identity and a larger
    n_max, returning an exact prefix.  Generation timestamps live in a
    .meta.json sidecar so the data file stays byte-deterministic.
    """
    label = label or default_label(weight)
    if cache_dir is not None:
        cache_dir = Path(cache_dir)
        best = None
        pattern = re.compile(
            re.escape(f"{label}.w{weight}.l1.n") + r"(\d+)\.csv$"
        )
        if cache_dir.is_dir():
            for p in cache_dir.iterdir():
                m = pattern.match(p.name)
                if m:
                    size = int(m.group(1))
                    if size >= n_max and (best is None or size < best[0]):
                        best = (size, p)
        if best is not None:
            form = ingest_coefficients(best[1], fmt="csv", validate=False)
            form = form.truncated(n_max)
            return HeckeEigenform(
                form.weight, form.level, form.label, form.coeffs, source="generated"
            )

    form = gen_level1_eigenform(weight, n_max)
    if label != form.label:
        form = HeckeEigenform(form.weight, form.level, label, form.coeffs)
    if cache_dir is not None:
        cache_dir.mkdir(parents=True, exist_ok=True)
        stem = _cache_stem(label, weight, 1, n_max)
        csv_path = cache_dir / f"{stem}.csv"
        export_csv(form, csv_path)
        meta = {
            "created_unix": time.time(),
            "weight": weight,
            "level": 1,
            "label": label,
            "n_max": n_max,
        }
        (cache_dir / f"{stem}.meta.json").write_text(
            json.dumps(meta, sort_keys=True), encoding="utf-8"
        )
    return form


def zeroed_variant(form: HeckeEigenform, zero_indices) -> HeckeEigenform:
    """Copy of a form with chosen coefficients forced to zero (test fixture)."""
    coeffs = list(form.coeffs)
    for n in zero_indices:
        if 1 <= n <= form.n_max:
            coeffs[n] = 0
    return HeckeEigenform(
        form.weight, form.level, form.label + "-zeroed", coeffs, source=form.source
    )
