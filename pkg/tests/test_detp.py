import logging
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from flab.cutplane import Box
from flab.detp import (AnchorConfig, DetpConstants, anchor_direction, bound_suite, check_perturbation_bound,
                       check_upper_bound, det_p, det_p_eigen_oracle, det_p_via_exp, determinant_function,
                       log_det_p, normalize_h, perturbation_envelope, random_matrices, select_anchor)
from flab.errors import AnchorNotFoundError, BoundaryZeroError, ConfigError, CutError, NumericalError
from flab.families import family_inverse_sqrt, family_scalar
from flab.spectra import GrowthEnvelope
from flab.zerofind import winding_count


def test_det_p_examples():
    assert det_p(np.diag([1.0]), 1) == pytest.approx(2)
    assert det_p(np.diag([1.0]), 2) == pytest.approx(2 / math.e, rel=1e-15)
    assert det_p(np.diag([1.0]), 2) == pytest.approx(0.735758882342885, rel=1e-14)
    assert det_p([[0, 1], [0, 0]], 2) == pytest.approx(1, abs=1e-15)


def test_oracle_examples():
    assert det_p_eigen_oracle(np.diag([1.0]), 3) == pytest.approx(2 * math.exp(-0.5), rel=1e-15)
    assert det_p_eigen_oracle(np.diag([-1.0, 0.0]), 2) == 0
    A = np.array([[0.3, 1j], [2, -0.1]])
    assert det_p_eigen_oracle(A, 1) == pytest.approx(np.linalg.det(np.eye(2) + A), rel=1e-14)


@pytest.mark.parametrize("p", [0, -1, 1.5, "2", True])
def test_det_p_rejects_order(p):
    with pytest.raises(ConfigError):
        det_p(np.eye(2), p)


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_three_routes_agree(p):
    rng = np.random.default_rng(p)
    for _ in range(50):
        n = rng.integers(1, 9)
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        A *= rng.uniform(0, 3) / np.linalg.norm(A, 2)
        d = det_p(A, p)
        assert abs(d - det_p_eigen_oracle(A, p)) <= 1e-8 * (1 + abs(d))
        assert abs(d - det_p_via_exp(A, p)) <= 1e-10 * (1 + abs(d))


@pytest.mark.parametrize("p", [1, 2, 3])
def test_planted_eigenvalue_gives_zero(p):
    rng = np.random.default_rng(7 + p)
    for n in (1, 3, 6):
        S = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        D = np.diag(np.concatenate([[-1.0], rng.uniform(-0.5, 0.5, n - 1)]))
        A = S @ D @ np.linalg.inv(S)
        assert abs(det_p(A, p)) <= 1e-8


def test_log_det_p_handles_overflow():
    # det_2 = (1 + a) e^(-a) = -799 e^800 is past the double range
    A = np.diag([-800.0 + 0j])
    with pytest.raises(NumericalError):
        det_p(A, 2)
    lg = log_det_p(A, 2)
    assert lg.real == pytest.approx(math.log(799) + 800)
    assert np.exp(1j * lg.imag) == pytest.approx(-1)


def test_log_det_p_singular_is_minus_inf():
    assert log_det_p(np.diag([-1.0, 2.0]), 2).real == -math.inf


def test_upper_bound_examples():
    r = check_upper_bound(np.zeros((2, 2)), 1)
    assert (r.lhs, r.rhs, r.holds) == (0.0, 0.0, True)
    r = check_upper_bound(np.diag([0.7]), 1)
    assert r.lhs == pytest.approx(math.log(1.7)) and r.rhs == pytest.approx(0.7) and r.holds
    r = check_upper_bound(np.diag([1.0]), 2)
    assert r.lhs == pytest.approx(math.log(2 / math.e)) and r.rhs == pytest.approx(0.5) and r.holds
    r = check_upper_bound(np.diag([-1.0]), 2)
    assert r.lhs == -math.inf and r.holds


def test_perturbation_bound_examples():
    r = check_perturbation_bound(np.zeros((3, 3)), 2)
    assert r.lhs == 0 and r.rhs == 0 and r.holds
    r = check_perturbation_bound(np.diag([1.0]), 1)
    assert r.lhs == pytest.approx(1) and r.rhs == pytest.approx(math.e ** 2) and r.holds
    r = check_perturbation_bound(np.diag([1.0]), 2)
    assert r.lhs == pytest.approx(1 - 2 / math.e) and r.rhs == pytest.approx(math.e ** 2) and r.holds


def test_perturbation_envelope_overflow_is_inf():
    assert perturbation_envelope(100.0, 3, 1.0) == math.inf


def test_constants_defaults():
    assert DetpConstants(1).gamma_p == 1 and DetpConstants(2).gamma_p == 0.5 and DetpConstants(5).gamma_p == 1
    with pytest.raises(ConfigError):
        DetpConstants(2, -1.0)


@pytest.mark.parametrize("p", [1, 2])
def test_bound_suite_no_violations(p):
    rep = bound_suite(p, 500, 8, 2.0, seed=3)
    assert rep["violations_upper"] == 0 and rep["violations_perturbation"] == 0
    assert rep["max_slack"] <= 1e-10


def test_bound_suite_raises_gamma_for_high_p(caplog):
    c = DetpConstants(3, 1e-6)
    with caplog.at_level(logging.WARNING):
        rep = bound_suite(3, 200, 6, 2.0, seed=1, constants=c)
    assert rep["violations_upper"] + rep["violations_perturbation"] > 0
    assert rep["gamma_p_final"] > 1e-6 and c.gamma_p == rep["gamma_p_final"]
    assert "raising" in caplog.text
    # the raised constant passes the same draw
    again = bound_suite(3, 200, 6, 2.0, seed=1, constants=DetpConstants(3, c.gamma_p * (1 + 1e-9)))
    assert again["violations_upper"] == again["violations_perturbation"] == 0


def test_bound_suite_deterministic():
    assert bound_suite(2, 50, 5, 2.0, seed=9) == bound_suite(2, 50, 5, 2.0, seed=9)


def test_random_matrices_norms():
    rng = np.random.default_rng(0)
    from flab.linalg import schatten_norm
    for A in random_matrices(rng, 30, 5, 2.0, 2):
        assert schatten_norm(A, 2) <= 2.0 + 1e-12


def test_determinant_function_examples():
    zero = family_scalar(np.eye(2), lambda lam: 0 * lam, GrowthEnvelope(1, 1, -0.5))
    f0 = determinant_function(zero, 1)
    assert f0(-3 + 1j) == 1
    fam = family_inverse_sqrt(np.diag([-1j]))
    f = determinant_function(fam, 1)
    assert abs(f(-1)) < 1e-15
    lam = np.array([-2 + 1j, 3j, -0.5 - 4j])
    np.testing.assert_allclose(f(lam), 1 - 1j / np.array([complex(np.sqrt(z)) if np.sqrt(z).imag > 0 else -np.sqrt(z) for z in lam]), rtol=1e-14)
    g = determinant_function(family_inverse_sqrt(np.diag([1.0])), 1)
    assert winding_count(g, Box(-5, -1e-3, -5, 5)) == 0
    with pytest.raises(CutError):
        f(2.0)


def test_anchor_examples():
    assert select_anchor(lambda z: 1.0) == 1
    from flab.cutplane import sqrt_cut
    assert select_anchor(lambda z: 1 + 0.1 / sqrt_cut(z)) == 1
    # |1 + 10 (-t)^(-1/2)|^2 = 1 + 100 / t >= 1, so the first grid point already works
    assert select_anchor(lambda z: 1 + 10 / sqrt_cut(z)) == 1


def test_anchor_decreasing_and_failure():
    cfg = AnchorConfig("decreasing")
    assert cfg.t_grid[0] == 1 and cfg.t_grid[1] == 0.5
    # |f(-t)| = 1 / (4t) reaches 1/2 first at t = 1/2 on the decreasing grid
    assert select_anchor(lambda z: 1 / (4 * abs(complex(z))) + 0j, cfg) == 0.5
    with pytest.raises(AnchorNotFoundError):
        select_anchor(lambda z: 0.0, AnchorConfig())
    assert anchor_direction(1, -0.5) == "increasing" and anchor_direction(1, -1.5) == "decreasing"


@pytest.mark.parametrize("kw", [dict(direction="up"), dict(threshold=1.0), dict(t_grid=(1.0, 1.0)),
                                dict(direction="decreasing", t_grid=(1.0, 2.0))])
def test_anchor_config_validation(kw):
    with pytest.raises(ConfigError):
        AnchorConfig(**kw)


def test_normalize_h_examples():
    h = normalize_h(lambda z: 3 - 2j, 8.0)
    assert h(-1) == 1 and h(-7 + 2j) == pytest.approx(1)
    with pytest.raises(NumericalError):
        normalize_h(lambda z: z + 1, 1.0)
    f = determinant_function(family_inverse_sqrt(np.diag([-1j])), 1)
    h = normalize_h(f, 4.0)
    assert h(-1) == 1
    assert abs(h(-0.25)) < 1e-15
    lam = -0.3 + 0.2j
    expected = (1 - 1j / np.sqrt(complex(lam)) / 2) / 0.5
    assert h(lam) == pytest.approx(expected, rel=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 20), st.floats(-3, 3), st.floats(0.2, 4))
def test_normalization_exact_and_preserves_winding(t, shift, size):
    # zeros at -0.75 - i and 0.75 - i, away from the anchor points -t
    f = determinant_function(family_inverse_sqrt(np.diag([0.5 - 1j, 1 - 0.5j])), 1)
    h = normalize_h(f, t)
    assert h(-1) == 1
    box = Box(-size - 1.5, -0.05, shift - size, shift + size)
    try:
        expected = winding_count(f, box)
    except BoundaryZeroError:
        assume(False)
    assert winding_count(h, box.scaled(1 / t)) == expected
