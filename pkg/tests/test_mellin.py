import math

import pytest

from tricorr.dseries import mellin_inversion_check
from tricorr.errors import RegionError


def test_residual_small_contour(delta_big):
    d = delta_big.truncated(240)
    rep = mellin_inversion_check(
        d, d, d, 5.0, 5.0,
        contour={"sigma_s": 2.0, "sigma_w": 8.0, "t_max": 20.0, "quad_step": 0.1},
        cuts=(120, 120),
    )
    assert rep.rel_residual < 1e-3
    assert rep.abs_residual < abs(rep.rhs) * 1e-3
    # factored and blocked 2-D quadratures are the same sum reassociated
    f_re, f_im = rep.contour_params["lhs_factored"]
    assert math.isclose(f_re, rep.lhs, rel_tol=1e-9)
    assert abs(f_im) <= abs(rep.lhs) * 1e-6


def test_per_term_identity_sampled(delta_big):
    d = delta_big.truncated(240)
    rep = mellin_inversion_check(
        d, d, d, 5.0, 5.0,
        contour={"sigma_s": 2.0, "sigma_w": 8.0, "t_max": 40.0, "quad_step": 0.05},
        cuts=(120, 120),
    )
    assert rep.per_term, "expected sampled per-term checks"
    assert len(rep.per_term) <= 10
    for entry in rep.per_term:
        assert entry["rel_err"] <= 1e-6


def test_longer_contour_does_not_regress(delta_big):
    d = delta_big.truncated(200)
    base = {"sigma_s": 2.0, "sigma_w": 8.0, "quad_step": 0.1}
    r20 = mellin_inversion_check(d, d, d, 4.0, 4.0,
                                 contour=dict(base, t_max=20.0), cuts=(100, 100))
    r40 = mellin_inversion_check(d, d, d, 4.0, 4.0,
                                 contour=dict(base, t_max=40.0), cuts=(100, 100))
    assert r40.rel_residual <= r20.rel_residual * 1.5 + 1e-12


def test_convergence_flag_reported(delta_big):
    d = delta_big.truncated(200)
    rep = mellin_inversion_check(
        d, d, d, 4.0, 4.0,
        contour={"sigma_s": 2.0, "sigma_w": 8.0, "t_max": 60.0, "quad_step": 0.1},
        cuts=(100, 100),
    )
    assert rep.contour_params["converged"] is True
    for key in ("sigma_s", "sigma_w", "t_max", "quad_step", "nodes",
                "M_cut", "H_cut", "conv_tol"):
        assert key in rep.contour_params


def test_tiny_scale_both_sides_vanish(delta_200):
    rep = mellin_inversion_check(
        delta_200, delta_200, delta_200, 0.02, 0.02,
        contour={"sigma_s": 2.0, "sigma_w": 8.0, "t_max": 10.0, "quad_step": 0.2},
        cuts=(40, 40),
    )
    assert abs(rep.lhs) <= 1e-8
    assert abs(rep.rhs) <= 1e-8


def test_contour_region_guard(delta_200):
    with pytest.raises(RegionError):
        mellin_inversion_check(
            delta_200, delta_200, delta_200, 5.0, 5.0,
            contour={"sigma_s": 0.5, "sigma_w": 8.0}, cuts=(50, 50),
        )
    with pytest.raises(RegionError):
        mellin_inversion_check(
            delta_200, delta_200, delta_200, 5.0, 5.0,
            contour={"sigma_s": 2.0, "sigma_w": 6.0}, cuts=(50, 50),
        )


def test_json_keys(delta_200):
    rep = mellin_inversion_check(
        delta_200, delta_200, delta_200, 2.0, 2.0,
        contour={"t_max": 10.0, "quad_step": 0.2}, cuts=(60, 60),
    )
    doc = rep.to_json_dict()
    assert set(doc) == {"lhs", "rhs", "abs_residual", "rel_residual",
                        "per_term", "contour_params"}
