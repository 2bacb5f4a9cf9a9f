import json
import math
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tricorr import forms
from tricorr.errors import CoverageError, IngestError

# first twelve tau values, classical table
TAU = [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920,
       534612, -370944]

# a(2) for each supported weight
A2 = {12: -24, 16: 216, 18: -528, 20: 456, 22: -288, 26: -48}


def test_tau_frozen_prefix(delta_2k):
    assert delta_2k.coeffs[1:13] == TAU


@pytest.mark.parametrize("k", sorted(forms.EIGENFORM_WEIGHTS))
def test_a2_all_weights(k):
    f = forms.gen_level1_eigenform(k, 2)
    assert f.a(1) == 1
    assert f.a(2) == A2[k]


def test_delta_against_eisenstein_identity(delta_2k):
    # 1728 Delta = E4^3 - E6^2, exact integer identity
    n = 600
    e4 = forms.gen_eisenstein(4, n)
    e6 = forms.gen_eisenstein(6, n)
    lhs = e4.power(3).coeffs
    rhs = e6.square().coeffs
    for i in range(n + 1):
        assert lhs[i] - rhs[i] == 1728 * (delta_2k.coeffs[i] if i else 0)


def test_weight_16_is_delta_times_e4():
    f = forms.gen_level1_eigenform(16, 200)
    d = forms.gen_eta24(200)
    e4 = forms.gen_eisenstein(4, 200)
    assert d.mul(e4).coeffs == f.coeffs


@pytest.mark.parametrize("k", sorted(forms.EIGENFORM_WEIGHTS))
def test_verify_all_weights(k):
    f = forms.gen_level1_eigenform(k, 2000)
    rep = forms.verify_form(f, 2000)
    assert rep.ok, rep.summary()


def test_verify_detects_corruption(delta_2k):
    bad = list(delta_2k.coeffs)
    bad[6] += 1  # break a(2)a(3) = a(6)
    f = forms.HeckeEigenform(12, 1, "delta", bad)
    rep = forms.verify_form(f, 2000)
    assert not rep.ok
    assert any(v["n"] == 6 for v in rep.violations)


def test_deligne_bound_sample(delta_2k):
    # |a(n)| <= d(n) n^{(k-1)/2}
    import sympy
    for n in range(1, 2001):
        lhs = abs(delta_2k.coeffs[n])
        assert lhs <= sympy.divisor_count(n) * n**5.5 * (1 + 1e-12)


def test_hecke_multiplicativity_spot(delta_2k):
    a = delta_2k.coeffs
    assert a[6] == a[2] * a[3]
    assert a[35] == a[5] * a[7]
    # prime power recursion at p=2: a(4) = a(2)^2 - 2^11
    assert a[4] == a[2] ** 2 - 2**11
    assert a[8] == a[2] * a[4] - 2**11 * a[2]


def test_coverage_error_names_requirement(delta_200):
    with pytest.raises(CoverageError) as ei:
        delta_200.a(201)
    assert ei.value.required_n_max == 201
    with pytest.raises(CoverageError):
        delta_200.require_coverage(500)


def test_value_at_zero_and_negative(delta_200):
    assert delta_200.value_at(0) == 0
    assert delta_200.value_at(-5) == 0
    assert delta_200.value_at(1) == 1


def test_theta_series_values(theta_2k):
    assert theta_2k.value_at(0) == 1
    squares = {i * i for i in range(1, 45)}
    for n in range(1, 2001):
        assert theta_2k.value_at(n) == (2 if n in squares else 0)
    assert theta_2k.weight is None


def test_export_ingest_roundtrip(tmp_path, delta_200):
    p = tmp_path / "d.csv"
    forms.export_csv(delta_200, p)
    back = forms.ingest_coefficients(p)
    assert back.coeffs == delta_200.coeffs
    assert back.weight == 12 and back.level == 1 and back.label == "delta"


def test_export_is_byte_deterministic(tmp_path, delta_200):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    forms.export_csv(delta_200, p1)
    forms.export_csv(delta_200, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_ingest_rejects_malformed(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("# weight=12 level=1 label=x\n1,1\n3,252\n")  # gap at n=2
    with pytest.raises(IngestError):
        forms.ingest_coefficients(p)
    p2 = tmp_path / "bad2.csv"
    p2.write_text("no header\n1,1\n")
    with pytest.raises(IngestError):
        forms.ingest_coefficients(p2)


def test_ingest_rejects_non_eigenform(tmp_path, delta_200):
    bad = list(delta_200.coeffs)
    bad[6] = 0
    f = forms.HeckeEigenform(12, 1, "delta", bad)
    p = tmp_path / "corrupt.csv"
    forms.export_csv(f, p)
    with pytest.raises(IngestError):
        forms.ingest_coefficients(p)
    with pytest.warns(UserWarning):
        got = forms.ingest_coefficients(p, force=True)
    assert got.coeffs[6] == 0


def test_ingest_remote_json(delta_200):
    payload = json.dumps({
        "weight": 12,
        "level": 1,
        "label": "delta",
        "coeffs": [str(c) for c in delta_200.coeffs[1:51]],
    }).encode()

    class H(BaseHTTPRequestHandler):
        def do_GET(self):
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, *a):
            pass

    srv = HTTPServer(("127.0.0.1", 0), H)
    t = threading.Thread(target=srv.serve_forever, daemon=True)
    t.start()
    try:
        url = f"http://127.0.0.1:{srv.server_port}/delta.json"
        form = forms.ingest_coefficients(url)
        assert form.coeffs == delta_200.coeffs[:51]
        assert form.source == "remote"
    finally:
        srv.shutdown()


def test_cached_eigenform_prefix_reuse(tmp_path):
    big = forms.cached_eigenform(12, 300, cache_dir=tmp_path)
    files = sorted(p.name for p in tmp_path.iterdir())
    assert "delta.w12.l1.n300.csv" in files
    small = forms.cached_eigenform(12, 100, cache_dir=tmp_path)
    assert small.coeffs == big.coeffs[:101]
    # the meta sidecar keeps the data file timestamp-free
    data = (tmp_path / "delta.w12.l1.n300.csv").read_text()
    assert "time" not in data and "date" not in data


def test_truncated_prefix_stability(delta_2k):
    t = delta_2k.truncated(97)
    assert t.n_max == 97
    assert t.coeffs == delta_2k.coeffs[:98]


def test_zeroed_variant(delta_200):
    z = forms.zeroed_variant(delta_200, [3, 5, 8])
    assert z.coeffs[3] == z.coeffs[5] == z.coeffs[8] == 0
    assert z.coeffs[2] == delta_200.coeffs[2]
    assert z.label != delta_200.label


@given(st.integers(min_value=2, max_value=400))
def test_eta24_pentagonal_sparsity(n):
    # eta^3 has support only on n(n+1)/2 offsets; its 8th power (eta^24)
    # inherits integrality, checked here by regenerating a prefix
    f = forms.gen_eta24(n)
    assert f.coeffs[0] == 0 and f.coeffs[1] == 1
    assert len(f.coeffs) == n + 1


def test_gen_rejects_bad_weight():
    with pytest.raises(ValueError):
        forms.gen_level1_eigenform(14, 10)
    with pytest.raises(ValueError):
        forms.gen_level1_eigenform(12, 0)
