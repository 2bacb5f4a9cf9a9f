import math

import mpmath
import pytest

from tricorr.corrsum import (
    SmoothingKernel,
    omega_sum,
    triple_sum_direct,
    triple_sum_fft,
)
from tricorr.dyadic import Dyadic


def brute_exponential(f1, f2, f3, X, Y, tail_factor=40.0, theta_boundary=True,
                      dps=80):
    """Slow mpmath reference for the smoothed sum, same truncation box."""
    m_cut = math.ceil(tail_factor * X)
    h_cut = math.ceil(tail_factor * Y)
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for m in range(1, m_cut + 1):
            b = f2.value_at(m)
            if b == 0:
                continue
            wm = mpmath.exp(-mpmath.mpf(m) / X)
            for h in range(1, h_cut + 1):
                j = 2 * m - h
                if j < 0:
                    continue
                if j == 0 and not theta_boundary:
                    continue
                c = f3.value_at(j)
                if c == 0:
                    continue
                a = f1.value_at(h)
                if a == 0:
                    continue
                total += mpmath.mpf(a * b * c) * wm * mpmath.exp(-mpmath.mpf(h) / Y)
        return total


def brute_sharp(f1, f2, f3, X, Y):
    m_cut, h_cut = math.floor(X), math.floor(Y)
    total = 0
    for m in range(1, m_cut + 1):
        for h in range(1, h_cut + 1):
            j = 2 * m - h
            if j >= 1:
                total += f1.value_at(h) * f2.value_at(m) * f3.value_at(j)
    return total


def brute_omega(f, X, dps=80):
    q = f.weight / 2.0 + 1.5
    m_cut = math.floor(X)
    h_cut = math.floor(2 * X)
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for m in range(1, m_cut + 1):
            for h in range(1, h_cut + 1):
                j = 2 * m - h
                if j >= 1:
                    t = f.value_at(h) * f.value_at(m) * f.value_at(j)
                    if t:
                        total += mpmath.mpf(t) * mpmath.power(h, -q)
        return total


def rel_diff(x, y):
    if x == 0 and y == 0:
        return 0.0
    return abs(x - y) / max(abs(x), abs(y))


def test_sharp_frozen_example(delta_200):
    # hand expansion: 1*1*tau(1) + 1*tau(2)*tau(3) = 1 - 24*252
    res = triple_sum_direct(delta_200, delta_200, delta_200,
                            SmoothingKernel.sharp(2, 1))
    assert res.value == -6047
    assert res.est_rel_err == 0.0
    assert res.method == "direct"


@pytest.mark.parametrize("X,Y", [(5, 5), (12, 7), (9, 30), (1, 1), (30, 60)])
def test_sharp_matches_brute(delta_200, X, Y):
    res = triple_sum_direct(delta_200, delta_200, delta_200,
                            SmoothingKernel.sharp(X, Y))
    assert res.value == brute_sharp(delta_200, delta_200, delta_200, X, Y)


def test_exponential_matches_mpmath(delta_200):
    res = triple_sum_direct(delta_200, delta_200, delta_200,
                            SmoothingKernel.exponential(2, 2))
    want = brute_exponential(delta_200, delta_200, delta_200, 2, 2)
    with mpmath.workdps(80):
        got = mpmath.mpf(res.value.man) * mpmath.power(2, res.value.exp)
        assert rel_diff(got, want) < 1e-40


def test_exponential_asymmetric_scales(delta_200, w16_10k):
    f16 = w16_10k.truncated(200)
    res = triple_sum_direct(delta_200, f16, delta_200,
                            SmoothingKernel.exponential(1.5, 3.0))
    want = brute_exponential(delta_200, f16, delta_200, 1.5, 3.0)
    with mpmath.workdps(80):
        got = mpmath.mpf(res.value.man) * mpmath.power(2, res.value.exp)
        assert rel_diff(got, want) < 1e-40


def test_omega_matches_mpmath(delta_200):
    res = omega_sum(delta_200, delta_200, delta_200, 20)
    want = brute_omega(delta_200, 20)
    with mpmath.workdps(80):
        got = mpmath.mpf(res.value.man) * mpmath.power(2, res.value.exp)
        assert rel_diff(got, want) < 1e-40


def test_theta_boundary_term(delta_200, theta_2k):
    th = theta_2k
    k = SmoothingKernel.exponential(3, 3)
    on = triple_sum_direct(delta_200, delta_200, th, k, theta_boundary=True)
    off = triple_sum_direct(delta_200, delta_200, th, k, theta_boundary=False)
    with mpmath.workdps(60):
        von = mpmath.mpf(on.value.man) * mpmath.power(2, on.value.exp)
        voff = mpmath.mpf(off.value.man) * mpmath.power(2, off.value.exp)
        # the h = 2m diagonal carries r1(0) = 1
        want = mpmath.mpf(0)
        for m in range(1, math.ceil(40 * 3) + 1):
            h = 2 * m
            if h <= math.ceil(40 * 3):
                want += (delta_200.value_at(h) * delta_200.value_at(m)
                         * mpmath.exp(-mpmath.mpf(m) / 3 - mpmath.mpf(h) / 3))
        assert rel_diff(von - voff, want) < 1e-30


def test_theta_boundary_noop_for_cusp_f3(delta_200):
    k = SmoothingKernel.exponential(2, 2)
    on = triple_sum_direct(delta_200, delta_200, delta_200, k, theta_boundary=True)
    off = triple_sum_direct(delta_200, delta_200, delta_200, k, theta_boundary=False)
    assert on.value == off.value


def test_sharp_swap_symmetry_at_y_eq_2x(delta_200, w16_10k):
    # h <-> 2m-h reflects the sharp box onto itself exactly when Y = 2X
    f16 = w16_10k.truncated(200)
    k = SmoothingKernel.sharp(12, 24)
    lhs = triple_sum_direct(delta_200, f16, f16, k)
    rhs = triple_sum_direct(f16, f16, delta_200, k)
    assert lhs.value == rhs.value


def test_sharp_swap_asymmetry_off_ratio(delta_200, w16_10k):
    # once Y < 2X-1 the h truncation clips the reflected box: no identity
    f16 = w16_10k.truncated(200)
    k = SmoothingKernel.sharp(12, 10)
    lhs = triple_sum_direct(delta_200, f16, f16, k)
    rhs = triple_sum_direct(f16, f16, delta_200, k)
    assert lhs.value != rhs.value


def test_fft_matches_direct_exponential(delta_2k):
    k = SmoothingKernel.exponential(8, 8)
    d = triple_sum_direct(delta_2k, delta_2k, delta_2k, k)
    # the conservative tail majorant dwarfs the cancelled sum here, so the
    # est-based warning must fire even though the actual agreement is tight
    with pytest.warns(UserWarning, match="near-cancellation"):
        f = triple_sum_fft(delta_2k, delta_2k, delta_2k, k)
    assert rel_diff(float(d.value), float(f.value)) < 1e-9
    assert f.method == "fft" and f.precision_bits == 53
    assert f.cancellation_warning


def test_fft_matches_direct_sharp(delta_200):
    k = SmoothingKernel.sharp(40, 25)
    d = triple_sum_direct(delta_200, delta_200, delta_200, k)
    f = triple_sum_fft(delta_200, delta_200, delta_200, k)
    assert rel_diff(float(d.value), float(f.value)) < 1e-9


def test_fft_matches_direct_omega(delta_200):
    k = SmoothingKernel.omega(30)
    d = triple_sum_direct(delta_200, delta_200, delta_200, k)
    f = triple_sum_fft(delta_200, delta_200, delta_200, k)
    assert rel_diff(float(d.value), float(f.value)) < 1e-9


def test_fft_extended_tier_is_exact_route(delta_2k):
    k = SmoothingKernel.exponential(6, 6)
    f = triple_sum_fft(delta_2k, delta_2k, delta_2k, k, fft_precision="extended")
    d = triple_sum_direct(delta_2k, delta_2k, delta_2k, k, precision_bits=106)
    assert f.method == "fft"
    assert f.value == d.value
    with pytest.raises(ValueError):
        triple_sum_fft(delta_2k, delta_2k, delta_2k, k, fft_precision="single")


def test_tail_doubling_within_estimate(delta_2k):
    k40 = SmoothingKernel.exponential(4, 4)
    r40 = triple_sum_direct(delta_2k, delta_2k, delta_2k, k40, tail_factor=40)
    r120 = triple_sum_direct(delta_2k, delta_2k, delta_2k, k40, tail_factor=120)
    v40, v120 = float(r40.value), float(r120.value)
    assert abs(v40 - v120) <= r40.est_rel_err * abs(v40)
    # larger truncation box never degrades the estimate
    assert r120.est_rel_err <= r40.est_rel_err


def test_tiny_scales(delta_200):
    res = triple_sum_direct(delta_200, delta_200, delta_200,
                            SmoothingKernel.exponential(0.01, 0.01))
    assert res.m_cut == 1 and res.h_cut == 1
    with mpmath.workdps(60):
        # the scale is the IEEE double nearest 0.01, not 1/100
        want = mpmath.exp(-2 / mpmath.mpf(0.01))
        got = mpmath.mpf(res.value.man) * mpmath.power(2, res.value.exp)
        assert rel_diff(got, want) < 1e-20


def test_sharp_below_one_is_zero(delta_200):
    res = triple_sum_direct(delta_200, delta_200, delta_200,
                            SmoothingKernel.sharp(0.5, 0.5))
    assert res.value.is_zero()
    assert res.est_rel_err == 0.0


def test_omega_x_below_one(delta_200):
    res = omega_sum(delta_200, delta_200, delta_200, 0.25)
    assert res.value.is_zero()


def test_omega_kernel_forces_y(delta_200):
    k = SmoothingKernel.omega(7)
    assert k.Y == 14.0
    with pytest.raises(ValueError):
        SmoothingKernel("omega", 7, 10)
    with pytest.raises(ValueError):
        SmoothingKernel("boxcar", 1, 1)
    with pytest.raises(ValueError):
        SmoothingKernel.exponential(-1, 1)


def test_precision_floor(delta_200):
    with pytest.raises(ValueError):
        triple_sum_direct(delta_200, delta_200, delta_200,
                          SmoothingKernel.exponential(2, 2), precision_bits=40)


def test_threads_do_not_change_value(delta_big):
    d = delta_big.truncated(9000)
    k = SmoothingKernel.exponential(103, 103)
    one = triple_sum_direct(d, d, d, k, threads=1)
    four = triple_sum_direct(d, d, d, k, threads=4)
    assert one.value == four.value
    assert one.est_rel_err == four.est_rel_err


def test_json_dict_shape(delta_200):
    res = triple_sum_direct(delta_200, delta_200, delta_200,
                            SmoothingKernel.sharp(3, 3))
    doc = res.to_json_dict()
    assert set(doc) == {"value", "method", "terms_used", "m_cut", "h_cut",
                        "precision_bits", "est_rel_err"}
    assert isinstance(doc["value"], str)


def test_json_infinite_estimate_encoding(delta_200):
    res = triple_sum_direct(delta_200, delta_200, delta_200,
                            SmoothingKernel.sharp(3, 3))
    res.est_rel_err = float("inf")
    assert res.to_json_dict()["est_rel_err"] == "inf"


def test_coverage_enforced(delta_200):
    from tricorr.errors import CoverageError
    with pytest.raises(CoverageError) as ei:
        triple_sum_direct(delta_200, delta_200, delta_200,
                          SmoothingKernel.exponential(10, 10))
    assert ei.value.required_n_max == 400
