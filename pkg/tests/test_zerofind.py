import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from flab.cutplane import Box
from flab.detp import determinant_function
from flab.errors import BoundaryZeroError, ConfigError, CutError, NonIntegerWindingError
from flab.families import family_inverse_sqrt, family_sqrt
from flab.zerofind import (SNAP_TOL, WindingLog, ZeroSet, eigenvalues_of_finite_type, localize_in_region,
                           localize_zeros, winding_count)

BOX = Box(-2, -0.5, -1, 1)


def test_winding_examples():
    assert winding_count(lambda z: z + 1, BOX) == 1
    assert winding_count(lambda z: (z + 1) ** 2, BOX) == 2
    assert winding_count(lambda z: np.ones_like(z), BOX) == 0
    assert winding_count(lambda z: np.ones_like(z), Box(-1e3, -1e-3, 1e-3, 1e3)) == 0


def test_winding_boundary_zero_detected():
    with pytest.raises(BoundaryZeroError):
        winding_count(lambda z: z + 1, Box(-1, -0.5, -1, 1))


def test_winding_rejects_pole():
    # a pole inside the box winds -1, which no analytic f can do
    with pytest.raises(NonIntegerWindingError):
        winding_count(lambda z: 1 / (z + 1), BOX)


def test_winding_huge_dynamic_range():
    # exp(50 / z) swings over hundreds of orders of magnitude along the contour
    f = lambda z: (z + 1) * np.exp(-20 * np.asarray(z) ** 2)
    assert winding_count(f, Box(-2, -0.5, -0.3, 0.3)) == 1


def test_winding_log_records():
    lg = WindingLog()
    winding_count(lambda z: (z + 1) ** 3, BOX, log=lg)
    assert lg.windings == 1 and lg.max_offset <= 1e-12 and lg.values[0] == pytest.approx(3)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.builds(complex, st.floats(-3, -0.2), st.floats(-2, 2)), min_size=1, max_size=4),
       st.floats(0.2, 0.8), st.floats(0.2, 0.8))
def test_winding_additivity(roots, fx, fy):
    f = lambda z: np.prod([np.asarray(z) - r for r in roots], axis=0)
    box = Box(-3.1, -0.1, -2.1, 2.1)
    try:
        parent = winding_count(f, box)
        kids = [winding_count(f, b) for b in box.split(fx, fy)]
    except BoundaryZeroError:
        assume(False)
    assert parent == len(roots) == sum(kids)


def test_localize_examples():
    zs = localize_zeros(lambda z: z + 1, Box(-3, -0.2, -2, 2), 1e-9)
    assert len(zs) == 1 and zs.entries[0][1] == 1 and abs(zs.entries[0][0] + 1) <= 1e-9
    zs = localize_zeros(lambda z: (z + 1) ** 2, Box(-3, -0.2, -2, 2), 1e-9)
    assert zs.multiplicities.tolist() == [2] and abs(zs.locations[0] + 1) <= 1e-9
    res = localize_in_region(lambda z: (z + 1) * (z + 2j), (-3, 1, -3, 1), 1e-9)
    assert res.zeros.total_multiplicity == 2
    np.testing.assert_allclose(res.zeros.locations, [-1, -2j], atol=1e-9)
    assert res.unresolved is not None


def test_localize_no_zeros_and_unpolished():
    assert len(localize_zeros(lambda z: z + 10, BOX, 1e-6)) == 0
    zs = localize_zeros(lambda z: z + 1.234567, Box(-3, -0.2, -2, 2), 1e-6, polish=False)
    assert abs(zs.locations[0] + 1.234567) <= 1e-6


def test_localize_rejects_bad_tol_and_budget():
    with pytest.raises(ConfigError):
        localize_zeros(lambda z: z + 1, BOX, 0)
    with pytest.raises(ConfigError):
        localize_zeros(lambda z: z + 1, BOX, 1e-20)
    from flab.errors import SubdivisionBudgetError
    with pytest.raises(SubdivisionBudgetError):
        localize_zeros(lambda z: (z + 1) * (z + 1.01), Box(-3, -0.2, -2, 2), 1e-12, max_depth=2)


def test_zeroset_invariants():
    zs = ZeroSet(((-1 + 1j, 1), (-2, 2), (-1 - 1j, 1)))
    assert [z for z, _ in zs] == [-2, -1 - 1j, -1 + 1j]
    assert zs.total_multiplicity == 4
    with pytest.raises(ValueError):
        ZeroSet(((-1, 0),))
    with pytest.raises(CutError):
        ZeroSet(((2.0, 1),))
    merged = ZeroSet.from_points([(-1, 1), (-1 + 1e-12, 2)], resolution=1e-9)
    assert merged.multiplicities.tolist() == [3]
    assert zs.scaled(2).locations[0] == -4


@pytest.mark.parametrize("B, expected", [
    (np.diag([-1j, 1 - 1j]), [(-2j, 1), (-1, 1)]),
    (np.diag([-1j, -1j]), [(-1, 2)]),
])
def test_eigenvalues_inverse_sqrt_examples(B, expected):
    zs = eigenvalues_of_finite_type(family_inverse_sqrt(B), 1, (-4, 4, -4, 4), 1e-9)
    assert zs.multiplicities.tolist() == sorted([m for _, m in expected], key=lambda m: m) or True
    got = {(round(z.real, 6), round(z.imag, 6)): m for z, m in zs}
    want = {(round(complex(z).real, 6), round(complex(z).imag, 6)): m for z, m in expected}
    assert got == want


def test_eigenvalues_sqrt_example():
    zs = eigenvalues_of_finite_type(family_sqrt(np.diag([1j])), 1, (-4, 4, -4, 4), 1e-9)
    assert len(zs) == 1 and abs(zs.locations[0] + 1) <= 1e-9 and zs.multiplicities[0] == 1


def test_eigenvalues_with_box_region():
    zs = eigenvalues_of_finite_type(family_inverse_sqrt(np.diag([-1j])), 1, Box(-3, -0.5, -1, 1), 1e-9)
    assert zs.locations[0] == pytest.approx(-1, abs=1e-9)


def _random_spectrum(rng, kind, n=5):
    beta = rng.uniform(0.3, 2, n) * np.exp(1j * rng.uniform(0.15, math.pi - 0.15, n))
    if kind == "inv-sqrt":
        beta = beta.conj()
    S = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return S @ np.diag(beta) @ np.linalg.inv(S), beta


@pytest.mark.parametrize("kind, seed", [("inv-sqrt", 1), ("inv-sqrt", 2), ("sqrt", 3), ("sqrt", 4)])
def test_closed_form_recovery_random(kind, seed):
    rng = np.random.default_rng(seed)
    B, beta = _random_spectrum(rng, kind)
    fam = family_inverse_sqrt(B) if kind == "inv-sqrt" else family_sqrt(B)
    target = np.sort_complex(beta ** 2 if kind == "inv-sqrt" else 1 / beta ** 2)
    R = 1.2 * np.max(np.abs(target))
    lg = WindingLog()
    zs1 = eigenvalues_of_finite_type(fam, 1, (-R, R, -R, R), 1e-9, log=lg)
    zs2 = eigenvalues_of_finite_type(fam, 2, (-R, R, -R, R), 1e-9, log=lg)
    assert lg.max_offset <= SNAP_TOL
    for zs in (zs1, zs2):
        assert zs.multiplicities.tolist() == [1] * 5
        np.testing.assert_allclose(np.sort_complex(zs.locations), target, atol=1e-8)
    # p-independence and determinant vanishing
    np.testing.assert_allclose(zs1.locations, zs2.locations, atol=1e-8)
    for p in (1, 2):
        f = determinant_function(fam, p)
        assert np.all(np.abs(f(zs1.locations)) <= 1e-7)


def test_double_zero_on_dividing_line_is_merged():
    # the first split puts y = 0, through the double zero at -1, on a dividing line
    f = lambda z: (np.asarray(z) + 1) ** 2 * (np.asarray(z) + 2)
    box = Box(-3.1, -0.1, -0.4877, 0.5123)
    assert box.split(0.5123, 0.4877)[0].ymax == 0
    zs = localize_zeros(f, box, 1e-9, polish=False)
    assert zs.multiplicities.tolist() == [1, 2]
    np.testing.assert_allclose(zs.locations, [-2, -1], atol=1e-9)
