"""Command-line front end.

Subcommands: gen, ingest, sum, scan, fit, dseries, mellin, omega,
nonvanish, congruent.  Exit codes: 0 success, 1 I/O failure, 2 invalid
input or precondition, 3 failed --assert clause.

Configuration: an INI file (--config) with one section per subcommand
plus an optional [global] section; command-line flags win over config
values, config values win over built-in defaults.

Reports are JSON with the resolved configuration and package version
embedded; the only timestamp lives under "meta".  Scan output is CSV with
sorted "# key=value" echo lines; values are exact decimal strings, so
identical configuration yields byte-identical files for any --threads.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from typing import Optional

from . import __version__
from . import analysis, dseries, forms
from .corrsum import (
    DEFAULT_PRECISION_BITS,
    DEFAULT_TAIL_FACTOR,
    SmoothingKernel,
    omega_sum,
    triple_sum_direct,
    triple_sum_fft,
)
from .errors import CoverageError, IngestError, RegionError

_LABEL_WEIGHTS = {"delta": 12, "w16": 16, "w18": 18, "w20": 20, "w22": 22, "w26": 26}
_KERNEL_ALIASES = {"exp": "exponential", "exponential": "exponential",
                   "sharp": "sharp", "omega": "omega"}

EXIT_OK = 0
EXIT_IO = 1
EXIT_PRECONDITION = 2
EXIT_ASSERT = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def default_cache_dir() -> str:
    env = os.environ.get("TRICORR_CACHE")
    if env:
        return env
    return os.path.join(os.path.expanduser("~"), ".cache", "tricorr")


# ------------------------------------------------------- config plumbing

def _load_config(path: Optional[str]) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if path:
        if not os.path.exists(path):
            raise CliError(f"config file not found: {path}", EXIT_IO)
        cfg.read(path)
    return cfg


class Resolver:
    """flag > config-section > [global] > default, with type coercion."""

    def __init__(self, args: argparse.Namespace, cfg: configparser.ConfigParser,
                 section: str):
        self.args = args
        self.cfg = cfg
        self.section = section
        self.resolved: dict = {}

    def _raw(self, key: str):
        flag = getattr(self.args, key, None)
        if flag is not None:
            return flag, True
        ini_key = key.replace("_", "-")
        for sec in (self.section, "global"):
            if self.cfg.has_option(sec, ini_key):
                return self.cfg.get(sec, ini_key), False
            if self.cfg.has_option(sec, key):
                return self.cfg.get(sec, key), False
        return None, False

    def get(self, key: str, default=None, cast=str):
        raw, from_flag = self._raw(key)
        if raw is None:
            value = default
        elif from_flag:
            value = raw
        else:
            if cast is bool:
                value = str(raw).strip().lower() in ("1", "true", "yes", "on")
            else:
                value = cast(raw)
        self.resolved[key] = value
        return value


def _emit(payload: dict, resolver: Resolver, out: Optional[str],
          echo_exclude=("out", "threads", "cache_dir", "config")) -> int:
    config_echo = {k: v for k, v in sorted(resolver.resolved.items())
                   if k not in echo_exclude}
    doc = {
        "report": payload,
        "config": config_echo,
        "version": __version__,
        "meta": {"timestamp": datetime.now(timezone.utc).isoformat()},
    }
    text = json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            raise CliError(f"cannot write {out}: {e}", EXIT_IO) from e
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --------------------------------------------------------------- asserts

def _check_asserts(spec: Optional[str], facts: dict) -> None:
    if not spec:
        return
    failures = []
    for clause in (c.strip() for c in spec.split(";")):
        if not clause:
            continue
        if "=" not in clause:
            raise CliError(f"malformed assert clause {clause!r}", EXIT_PRECONDITION)
        key, _, val = clause.partition("=")
        key = key.strip()
        val = val.strip()
        if key == "contains":
            want = {int(v) for v in val.split(",") if v}
            have = set(facts.get("squarefree_parts", ()))
            if not want <= have:
                failures.append(f"contains={val}: missing {sorted(want - have)}")
        elif key == "slope_in":
            lo, _, hi = val.partition(":")
            slope = facts.get("slope")
            if slope is None or not (float(lo) <= slope <= float(hi)):
                failures.append(f"slope_in={val}: slope is {slope}")
        elif key == "rel_err_le":
            err = facts.get("est_rel_err")
            if err is None or not (err <= float(val)):
                failures.append(f"rel_err_le={val}: est_rel_err is {err}")
        elif key == "density_eq":
            dens = facts.get("density_fraction")
            if dens is None or Fraction(dens) != Fraction(val):
                failures.append(f"density_eq={val}: density is {dens}")
        elif key == "residual_le":
            res = facts.get("rel_residual")
            if res is None or not (res <= float(val)):
                failures.append(f"residual_le={val}: rel_residual is {res}")
        else:
            raise CliError(f"unknown assert clause {key!r}", EXIT_PRECONDITION)
    if failures:
        raise CliError("assertion failed: " + "; ".join(failures), EXIT_ASSERT)


# -------------------------------------------------------- form resolution

def _parse_forms_spec(spec: str, count: int) -> list:
    parts = [p.strip() for p in spec.split(",") if p.strip()]
    if len(parts) == 1 and count > 1:
        parts = parts * count
    if len(parts) != count:
        raise CliError(
            f"--forms needs {count} comma-separated entries, got {len(parts)}",
            EXIT_PRECONDITION,
        )
    return parts


def _resolve_forms(specs: list, needs: list, cache_dir: str):
    need_by_spec: dict = {}
    for spec, need in zip(specs, needs):
        need_by_spec[spec] = max(need, need_by_spec.get(spec, 0))
    resolved = {}
    for spec, need in need_by_spec.items():
        need = max(need, 1)
        if spec == "theta":
            resolved[spec] = forms.gen_theta(need)
        elif spec in _LABEL_WEIGHTS:
            resolved[spec] = forms.cached_eigenform(
                _LABEL_WEIGHTS[spec], need, cache_dir=cache_dir
            )
        elif spec.isdigit():
            resolved[spec] = forms.cached_eigenform(int(spec), need,
                                                    cache_dir=cache_dir)
        else:
            form = forms.ingest_coefficients(spec)
            form.require_coverage(need)
            resolved[spec] = form
    return [resolved[s] for s in specs]


def _coverage_needs(m_cut: int, h_cut: int) -> list:
    return [max(h_cut, 1), max(m_cut, 1), max(2 * m_cut - 1, 1)]


def _build_kernel(resolver: Resolver) -> SmoothingKernel:
    kind_raw = resolver.get("kernel", "exponential")
    kind = _KERNEL_ALIASES.get(str(kind_raw).lower())
    if kind is None:
        raise CliError(f"unknown kernel {kind_raw!r} (exp, sharp, omega)",
                       EXIT_PRECONDITION)
    X = resolver.get("X", None, float)
    if X is None:
        raise CliError("kernel needs --X", EXIT_PRECONDITION)
    X = float(X)
    if kind == "omega":
        resolver.resolved["Y"] = 2.0 * X
        return SmoothingKernel.omega(X)
    Y = resolver.get("Y", None, float)
    Y = X if Y is None else float(Y)
    resolver.resolved["Y"] = Y
    return SmoothingKernel(kind, X, Y)


# ------------------------------------------------------------ subcommands

def cmd_gen(args, cfg) -> int:
    r = Resolver(args, cfg, "gen")
    weight = r.get("weight", None, int)
    if weight is None:
        raise CliError("gen needs --weight", EXIT_PRECONDITION)
    weight = int(weight)
    if weight not in forms.EIGENFORM_WEIGHTS:
        raise CliError(
            f"weight {weight}: no level-1 eigenform (space dimension 0); "
            f"supported weights: {sorted(forms.EIGENFORM_WEIGHTS)}",
            EXIT_PRECONDITION,
        )
    n_max = int(r.get("nmax", 1000, int))
    if n_max < 1:
        raise CliError("--nmax must be >= 1", EXIT_PRECONDITION)
    label = r.get("label", forms.default_label(weight))
    form = forms.gen_level1_eigenform(weight, n_max)
    if label != form.label:
        form = forms.HeckeEigenform(form.weight, form.level, label, form.coeffs)
    out = r.get("out", f"{label}.w{weight}.l1.n{n_max}.csv")
    try:
        forms.export_csv(form, out)
    except OSError as e:
        raise CliError(f"cannot write {out}: {e}", EXIT_IO) from e
    sys.stdout.write(f"wrote {out} ({n_max} coefficients)\n")
    return EXIT_OK


def cmd_ingest(args, cfg) -> int:
    r = Resolver(args, cfg, "ingest")
    source = r.get("source")
    if not source:
        raise CliError("ingest needs --source", EXIT_PRECONDITION)
    force = bool(r.get("force", False, bool))
    validate = not bool(r.get("no_validate", False, bool))
    form = forms.ingest_coefficients(source, force=force, validate=validate)
    cache_dir = r.get("cache_dir", default_cache_dir())
    os.makedirs(cache_dir, exist_ok=True)
    n_max = len(form.coeffs) - 1
    dest = os.path.join(
        cache_dir, f"{form.label}.w{form.weight}.l{form.level}.n{n_max}.csv"
    )
    try:
        forms.export_csv(form, dest)
    except OSError as e:
        raise CliError(f"cannot write {dest}: {e}", EXIT_IO) from e
    payload = {
        "label": form.label,
        "weight": form.weight,
        "level": form.level,
        "n_max": n_max,
        "validated": validate,
        "cached_as": dest,
    }
    return _emit(payload, r, r.get("out"))


def _run_triple_sum(r: Resolver, assert_spec: Optional[str]) -> int:
    specs = _parse_forms_spec(r.get("forms", "delta,delta,delta"), 3)
    kernel = _build_kernel(r)
    precision = int(r.get("precision_bits", DEFAULT_PRECISION_BITS, int))
    tail = float(r.get("tail_factor", DEFAULT_TAIL_FACTOR, float))
    method = r.get("method", "direct")
    fft_precision = r.get("fft_precision", "double")
    theta_boundary = not bool(r.get("no_theta_boundary", False, bool))
    threads = int(r.get("threads", os.cpu_count() or 1, int))
    cache_dir = r.get("cache_dir", default_cache_dir())

    m_cut, h_cut = kernel.cuts(tail)
    f1, f2, f3 = _resolve_forms(specs, _coverage_needs(m_cut, h_cut), cache_dir)
    if method == "direct":
        res = triple_sum_direct(f1, f2, f3, kernel, precision_bits=precision,
                                tail_factor=tail, theta_boundary=theta_boundary,
                                threads=threads)
    elif method == "fft":
        res = triple_sum_fft(f1, f2, f3, kernel, fft_precision=fft_precision,
                             tail_factor=tail, theta_boundary=theta_boundary)
    else:
        raise CliError(f"unknown method {method!r}", EXIT_PRECONDITION)
    payload = res.to_json_dict()
    _check_asserts(assert_spec, {"est_rel_err": res.est_rel_err})
    return _emit(payload, r, r.get("out"))


def cmd_sum(args, cfg) -> int:
    r = Resolver(args, cfg, "sum")
    return _run_triple_sum(r, getattr(args, "assert_spec", None))


def _scan_csv(rows, params, echo: dict) -> str:
    lines = [f"# {key}={echo[key]}" for key in sorted(echo)]
    lines.append("X,Y,value,bound_thm1,bound_thm2,naive,sqrt2")
    rh_params = None
    if params is not None:
        rh_params = analysis.TheoremBoundParams(
            k=params.k, theta=params.theta, rh=True, epsilon=params.epsilon
        )
    for X, Y, res in rows:
        val = res.value.to_decimal(30)
        if params is not None and X >= 1.0 and Y >= 1.0:
            b1 = repr(analysis.theorem_bound(params, X, Y))
            b2 = repr(analysis.theorem_bound(rh_params, X, Y))
            comp = analysis.comparison_bounds(params.k, X, Y)
            nv, s2 = repr(comp["naive"]), repr(comp["sqrt2"])
        else:
            b1 = b2 = nv = s2 = ""
        lines.append(f"{X:g},{Y:g},{val},{b1},{b2},{nv},{s2}")
    return "\n".join(lines) + "\n"


def cmd_scan(args, cfg) -> int:
    r = Resolver(args, cfg, "scan")
    specs = _parse_forms_spec(r.get("forms", "delta,delta,delta"), 3)
    kind_raw = r.get("kernel", "exponential")
    kind = _KERNEL_ALIASES.get(str(kind_raw).lower())
    if kind is None:
        raise CliError(f"unknown kernel {kind_raw!r}", EXIT_PRECONDITION)
    scales_raw = r.get("scales")
    if not scales_raw:
        raise CliError("scan needs --scales (comma-separated)", EXIT_PRECONDITION)
    try:
        scales = [float(s) for s in str(scales_raw).split(",") if s.strip()]
    except ValueError as e:
        raise CliError(f"bad --scales: {e}", EXIT_PRECONDITION) from e
    ratio = float(r.get("ratio", 1.0, float))
    tail_raw = r.get("tail_factor", None, float)
    tail = None if tail_raw is None else float(tail_raw)
    est_target = float(r.get("est_target", 1e-6, float))
    precision = int(r.get("precision_bits", DEFAULT_PRECISION_BITS, int))
    threads = int(r.get("threads", os.cpu_count() or 1, int))
    fft_check = bool(r.get("fft_check", False, bool))
    theta_val = float(r.get("theta", analysis.THETA_BEST, float))
    epsilon = float(r.get("epsilon", 0.0, float))
    cache_dir = r.get("cache_dir", default_cache_dir())

    top = max(scales) if scales else 0.0
    t_cov = tail if tail is not None else 400.0
    if kind == "omega":
        m_cut, h_cut = math.floor(top), math.floor(2.0 * top)
    elif kind == "sharp":
        m_cut, h_cut = math.floor(top), math.floor(ratio * top)
    else:
        m_cut, h_cut = math.ceil(t_cov * top), math.ceil(t_cov * ratio * top)
    f1, f2, f3 = _resolve_forms(specs, _coverage_needs(m_cut, h_cut), cache_dir)

    rows = analysis.scan_grid(
        f1, f2, f3, kind, scales, ratio=ratio, tail_factor=tail,
        est_target=est_target, precision_bits=precision, threads=threads,
        fft_check=fft_check,
    )
    weights = {f.weight for f in (f1, f2, f3)}
    params = None
    if len(weights) == 1 and None not in weights:
        params = analysis.TheoremBoundParams(k=weights.pop(), theta=theta_val,
                                             epsilon=epsilon)
    echo = {k2: v for k2, v in sorted(r.resolved.items())
            if k2 not in ("out", "threads", "cache_dir", "config") and v is not None}
    text = _scan_csv(rows, params, echo)
    out = r.get("out")
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as e:
            raise CliError(f"cannot write {out}: {e}", EXIT_IO) from e
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _read_scan_csv(path: str) -> list:
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or line.startswith("X,"):
                    continue
                parts = line.split(",")
                rows.append((float(parts[0]), float(parts[2])))
    except OSError as e:
        raise CliError(f"cannot read {path}: {e}", EXIT_IO) from e
    return rows


def cmd_fit(args, cfg) -> int:
    r = Resolver(args, cfg, "fit")
    src = r.get("in_path")
    if not src:
        raise CliError("fit needs --in (scan CSV)", EXIT_PRECONDITION)
    rows = _read_scan_csv(src)
    window = None
    win_raw = r.get("window")
    if win_raw:
        lo, _, hi = str(win_raw).partition(":")
        window = (int(lo), int(hi))
    k = int(r.get("weight", 12, int))
    theta_val = float(r.get("theta", analysis.THETA_BEST, float))
    epsilon = float(r.get("epsilon", 0.0, float))
    params = analysis.TheoremBoundParams(k=k, theta=theta_val, epsilon=epsilon)
    try:
        fit = analysis.fit_exponent(rows, window=window, params=params)
    except ValueError as e:
        raise CliError(str(e), EXIT_PRECONDITION) from e
    payload = {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "window": list(fit.window),
        "points": len(fit.grid),
        "dropped_zeros": fit.dropped_zeros,
        "benchmark_distance": fit.benchmark_distance,
        "benchmark_slopes": analysis.benchmark_slopes(params),
    }
    _check_asserts(getattr(args, "assert_spec", None), {"slope": fit.slope})
    return _emit(payload, r, r.get("out"))


def cmd_dseries(args, cfg) -> int:
    r = Resolver(args, cfg, "dseries")
    theta_series = bool(r.get("theta_series", False, bool))
    try:
        s = complex(str(r.get("s", "3")).replace(" ", ""))
        w = complex(str(r.get("w", "8")).replace(" ", ""))
    except ValueError as e:
        raise CliError(f"bad complex literal: {e}", EXIT_PRECONDITION) from e
    M_cut = int(r.get("mcut", 50, int))
    H_cut = int(r.get("hcut", 50, int))
    precision = int(r.get("precision_bits", DEFAULT_PRECISION_BITS, int))
    point = dseries.DirichletPoint(s, w)
    if theta_series:
        ev = dseries.eval_D_theta(point, M_cut, H_cut, precision_bits=precision)
    else:
        specs = _parse_forms_spec(r.get("forms", "delta,delta,delta"), 3)
        cache_dir = r.get("cache_dir", default_cache_dir())
        f1, f2, f3 = _resolve_forms(
            specs, _coverage_needs(M_cut, H_cut), cache_dir
        )
        ev = dseries.eval_D(f1, f2, f3, point, M_cut, H_cut,
                            precision_bits=precision)
    payload = {
        "s": [s.real, s.imag],
        "w": [w.real, w.imag],
        "value_re": ev.value_re.to_decimal(40),
        "value_im": ev.value_im.to_decimal(40),
        "M_cut": ev.M_cut,
        "H_cut": ev.H_cut,
        "tail_bound": ev.tail_bound,
        "thresholds": ev.thresholds,
    }
    return _emit(payload, r, r.get("out"))


def cmd_mellin(args, cfg) -> int:
    r = Resolver(args, cfg, "mellin")
    specs = _parse_forms_spec(r.get("forms", "delta,delta,delta"), 3)
    X = float(r.get("X", 5.0, float))
    Y = float(r.get("Y", X, float))
    M_cut = int(r.get("mcut", 400, int))
    H_cut = int(r.get("hcut", 400, int))
    contour = {
        "t_max": float(r.get("tmax", 60.0, float)),
        "quad_step": float(r.get("step", 0.05, float)),
    }
    sig_s = r.get("sigma_s", None, float)
    sig_w = r.get("sigma_w", None, float)
    if sig_s is not None:
        contour["sigma_s"] = float(sig_s)
    if sig_w is not None:
        contour["sigma_w"] = float(sig_w)
    cache_dir = r.get("cache_dir", default_cache_dir())
    # the direct-sum side reruns the kernel out to the same rectangle, so
    # its ceil(tf*scale) cuts can exceed the series cuts by the X/Y ratio
    tf = max(M_cut / X, H_cut / Y)
    m_rhs = math.ceil(tf * X)
    h_rhs = math.ceil(tf * Y)
    needs = [
        max(n, r2)
        for n, r2 in zip(_coverage_needs(M_cut, H_cut),
                         _coverage_needs(m_rhs, h_rhs))
    ]
    f1, f2, f3 = _resolve_forms(specs, needs, cache_dir)
    rep = dseries.mellin_inversion_check(f1, f2, f3, X, Y, contour=contour,
                                         cuts=(M_cut, H_cut))
    payload = rep.to_json_dict()
    _check_asserts(getattr(args, "assert_spec", None),
                   {"rel_residual": rep.rel_residual})
    return _emit(payload, r, r.get("out"))


def cmd_omega(args, cfg) -> int:
    r = Resolver(args, cfg, "omega")
    specs = _parse_forms_spec(r.get("forms", "delta,delta,delta"), 3)
    precision = int(r.get("precision_bits", DEFAULT_PRECISION_BITS, int))
    cache_dir = r.get("cache_dir", default_cache_dir())
    scales_raw = r.get("scales")
    if scales_raw:
        scales = [float(s) for s in str(scales_raw).split(",") if s.strip()]
        top = max(scales)
        f1, f2, f3 = _resolve_forms(
            specs,
            _coverage_needs(math.floor(top), math.floor(2 * top)),
            cache_dir,
        )
        rep = analysis.omega_growth_report(f1, f2, f3, scales,
                                           precision_bits=precision)
        payload = {
            "rows": [
                {"X": X, "ratio": ratio, "value": res.value.to_decimal(30)}
                for X, ratio, res in rep.rows
            ],
            "max_ratio": rep.max_ratio,
            "min_ratio": rep.min_ratio,
            "decays_top_decade": rep.decays_top_decade,
            "degenerate": rep.degenerate,
        }
        return _emit(payload, r, r.get("out"))
    X = r.get("X", None, float)
    if X is None:
        raise CliError("omega needs --X or --scales", EXIT_PRECONDITION)
    X = float(X)
    f1, f2, f3 = _resolve_forms(
        specs,
        _coverage_needs(math.floor(X), math.floor(2 * X)),
        cache_dir,
    )
    res = omega_sum(f1, f2, f3, X, precision_bits=precision)
    _check_asserts(getattr(args, "assert_spec", None),
                   {"est_rel_err": res.est_rel_err})
    return _emit(res.to_json_dict(), r, r.get("out"))


def cmd_nonvanish(args, cfg) -> int:
    r = Resolver(args, cfg, "nonvanish")
    spec = r.get("form", "delta")
    n_limit = int(r.get("nlimit", 100, int))
    cache_dir = r.get("cache_dir", default_cache_dir())
    (f,) = _resolve_forms([spec], [max(2 * n_limit - 1, 1)], cache_dir)
    rep = analysis.nonvanishing_scan(f, n_limit)
    dens = rep.density_fraction
    payload = {
        "n_limit": rep.n_limit,
        "total_triples": rep.total_triples,
        "nonvanishing_count": rep.nonvanishing_count,
        "density": rep.density,
        "density_fraction": None if dens is None else f"{dens.numerator}/{dens.denominator}",
        "witnesses": [
            {"h": w.h, "m": w.m, "third": w.third, "product": str(w.product)}
            for w in rep.witnesses
        ],
    }
    _check_asserts(
        getattr(args, "assert_spec", None),
        {"density_fraction": dens},
    )
    return _emit(payload, r, r.get("out"))


def cmd_congruent(args, cfg) -> int:
    r = Resolver(args, cfg, "congruent")
    limit = int(r.get("limit", 2500, int))
    hits = analysis.congruent_search(limit)
    payload = {
        "square_limit": limit,
        "hits": [
            {"x2": h.x2, "y2": h.y2, "z2": h.z2, "area": h.area,
             "squarefree_part": h.squarefree_part}
            for h in hits
        ],
    }
    _check_asserts(
        getattr(args, "assert_spec", None),
        {"squarefree_parts": [h.squarefree_part for h in hits]},
    )
    return _emit(payload, r, r.get("out"))


# ----------------------------------------------------------------- main

def _common_parser(for_subparser: bool = False) -> argparse.ArgumentParser:
    # the same flags hang off the root parser and every subparser; the
    # subparser copies default to SUPPRESS so that parsing `tricorr --config
    # x CMD` does not clobber the root-level value with None when the flag
    # is absent after CMD (the subparser namespace is copied wholesale)
    kw = {"default": argparse.SUPPRESS} if for_subparser else {}
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI config file (sections per subcommand)",
                        **kw)
    common.add_argument("--threads", type=int, help="parallelism cap (default: cpu count)",
                        **kw)
    common.add_argument("--precision-bits", dest="precision_bits", type=int,
                        help="working mantissa bits (default 256)", **kw)
    common.add_argument("--cache-dir", dest="cache_dir",
                        help="coefficient cache directory", **kw)
    common.add_argument("--out", help="write report to this path instead of stdout",
                        **kw)
    common.add_argument("--assert", dest="assert_spec", metavar="CLAUSES",
                        help="semicolon-separated checks, e.g. "
                             "'contains=5,6; slope_in=16.5:17.8; rel_err_le=1e-6; "
                             "density_eq=1; residual_le=1e-3'", **kw)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser(for_subparser=True)
    p = argparse.ArgumentParser(
        prog="tricorr",
        description="Triple correlation sums of eigenform coefficients: "
                    "exact generators, smoothed/sharp/omega sums, Dirichlet "
                    "series, Mellin checks, growth scans.",
        parents=[_common_parser()],
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    sp = sub.add_parser("gen", parents=[common], help="generate eigenform coefficients")
    sp.add_argument("--weight", type=int)
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--label")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("ingest", parents=[common], help="ingest and validate a coefficient table")
    sp.add_argument("--source", help="CSV path or JSON URL")
    sp.add_argument("--force", action="store_const", const=True, default=None,
                    help="downgrade validation failures to warnings")
    sp.add_argument("--no-validate", dest="no_validate", action="store_const",
                    const=True, default=None)
    sp.set_defaults(func=cmd_ingest)

    sp = sub.add_parser("sum", parents=[common], help="one smoothed triple sum")
    sp.add_argument("--forms", help="three comma-separated form specs")
    sp.add_argument("--kernel", help="exp | sharp | omega")
    sp.add_argument("--X", type=float)
    sp.add_argument("--Y", type=float)
    sp.add_argument("--method", choices=("direct", "fft"))
    sp.add_argument("--fft-precision", dest="fft_precision",
                    choices=("double", "extended"))
    sp.add_argument("--tail-factor", dest="tail_factor", type=float)
    sp.add_argument("--no-theta-boundary", dest="no_theta_boundary",
                    action="store_const", const=True, default=None)
    sp.set_defaults(func=cmd_sum)

    sp = sub.add_parser("scan", parents=[common], help="grid scan to CSV")
    sp.add_argument("--forms")
    sp.add_argument("--kernel")
    sp.add_argument("--scales", help="comma-separated X values, increasing")
    sp.add_argument("--ratio", type=float, help="Y/X (default 1)")
    sp.add_argument("--tail-factor", dest="tail_factor", type=float,
                    help="fixed tail factor (default: adaptive to --est-target)")
    sp.add_argument("--est-target", dest="est_target", type=float)
    sp.add_argument("--fft-check", dest="fft_check", action="store_const",
                    const=True, default=None)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--epsilon", type=float)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("fit", parents=[common], help="exponent fit from scan CSV")
    sp.add_argument("--in", dest="in_path", help="scan CSV path")
    sp.add_argument("--window", help="lo:hi index range")
    sp.add_argument("--weight", type=int)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--epsilon", type=float)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("dseries", parents=[common], help="truncated D(s,w) value")
    sp.add_argument("--forms")
    sp.add_argument("--s")
    sp.add_argument("--w")
    sp.add_argument("--mcut", type=int)
    sp.add_argument("--hcut", type=int)
    sp.add_argument("--theta-series", dest="theta_series", action="store_const",
                    const=True, default=None,
                    help="evaluate the square-representation analogue")
    sp.set_defaults(func=cmd_dseries)

    sp = sub.add_parser("mellin", parents=[common], help="Mellin inversion residual check")
    sp.add_argument("--forms")
    sp.add_argument("--X", type=float)
    sp.add_argument("--Y", type=float)
    sp.add_argument("--mcut", type=int)
    sp.add_argument("--hcut", type=int)
    sp.add_argument("--sigma-s", dest="sigma_s", type=float)
    sp.add_argument("--sigma-w", dest="sigma_w", type=float)
    sp.add_argument("--tmax", type=float)
    sp.add_argument("--step", type=float)
    sp.set_defaults(func=cmd_mellin)

    sp = sub.add_parser("omega", parents=[common], help="weighted sum or growth report")
    sp.add_argument("--forms")
    sp.add_argument("--X", type=float)
    sp.add_argument("--scales", help="growth report over these X values")
    sp.set_defaults(func=cmd_omega)

    sp = sub.add_parser("nonvanish", parents=[common], help="nonvanishing triple scan")
    sp.add_argument("--form")
    sp.add_argument("--nlimit", type=int)
    sp.set_defaults(func=cmd_nonvanish)

    sp = sub.add_parser("congruent", parents=[common], help="squares in arithmetic progression")
    sp.add_argument("--limit", type=int)
    sp.set_defaults(func=cmd_congruent)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_help()
        return EXIT_PRECONDITION
    try:
        cfg = _load_config(args.config)
        return args.func(args, cfg)
    except CliError as e:
        sys.stderr.write(f"error: {e}\n")
        return e.code
    except CoverageError as e:
        sys.stderr.write(
            f"error: insufficient coefficient coverage: {e} "
            f"(required n_max {e.required_n_max})\n"
        )
        return EXIT_PRECONDITION
    except (RegionError, IngestError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_PRECONDITION
    except OSError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
