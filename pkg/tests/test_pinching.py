import numpy as np
import pytest
from hypothesis import given, strategies as st

from corrdyn.errors import BadParameters, OutOfStrip
from corrdyn.pinching import (
    StripModel,
    beltrami_coefficient,
    beltrami_grid,
    check_model,
    default_model,
    strip_map,
)

MODEL = default_model()
times = st.floats(0, 0.999)
heights = st.floats(0, 2)


def test_default_model_passes_its_invariants():
    report = check_model(MODEL)
    assert report["ok"]
    assert report["identity_error"] == 0.0


def test_closed_form_values():
    # Phi(1.2) = 1 - log(0.8) and mu = (1 - 1/(1 - 0.2)) / (1 + 1/(1 - 0.2)) = -1/9
    assert strip_map(MODEL, 0.9, 1.2j) == pytest.approx(1j * (1 - np.log(0.8)))
    assert beltrami_coefficient(MODEL, 0.5, 1.2j) == pytest.approx(-1 / 9)
    assert MODEL.tau(0.5) == pytest.approx(4.0)
    assert MODEL.v(0.5, 2.0) == pytest.approx(4.0)


@given(times)
def test_top_edge_reaches_tau(t):
    assert MODEL.v(t, 2.0) == pytest.approx(MODEL.tau(t), rel=1e-12)


def test_identity_at_time_zero():
    y = np.linspace(0, 2, 101)
    assert np.allclose(MODEL.v(0.0, y), y, atol=1e-12)


@given(times, st.floats(0, 1))
def test_zero_on_identity_strip(t, y):
    assert beltrami_coefficient(MODEL, t, 0.7 + 1j * y) == 0


@given(times, heights)
def test_modulus_below_one(t, y):
    assert abs(beltrami_coefficient(MODEL, t, 1j * y)) < 1


@given(times, heights)
def test_analytic_derivative_matches_differences(t, y):
    y = min(max(y, 1e-4), 2 - 1e-4)
    numeric = StripModel(MODEL.L_y, MODEL.L_r, MODEL.tau, MODEL.v)
    # v is C^1, so central differences agree across the joins too
    assert numeric.derivative(t, y) == pytest.approx(MODEL.derivative(t, y), rel=1e-3, abs=1e-3)


def test_map_is_c1_at_the_joins():
    t = 0.5
    ys = 1 + 1.0 * t
    eps = 1e-9
    left, right = MODEL.dv(t, ys - eps), MODEL.dv(t, ys + eps)
    assert left == pytest.approx(right, rel=1e-6)


def test_heights_freeze():
    Lp = 1.5
    t0 = MODEL.freeze_time(Lp)
    assert t0 == pytest.approx(0.5)
    y = np.linspace(0, Lp, 50)
    ref = MODEL.v(t0, y)
    for s in (0.6, 0.9, 0.999):
        assert np.array_equal(MODEL.v(s, y), ref)
    assert MODEL.freeze_time(0.5) == 0.0


def test_modulus_tends_to_one_at_the_pinch_corner():
    ts = 1 - np.logspace(-1, -6, 12)
    path = np.abs(beltrami_coefficient(MODEL, ts, 1j * (1 + ts)))
    assert path[-1] > 0.99
    assert np.all(np.diff(path) >= 0)


def test_grid_shape_and_bounds():
    t, y, mu = beltrami_grid(MODEL, 20, 30, 0.99)
    assert mu.shape == (20, 30)
    assert mu[:, y <= 1].max() == 0
    assert mu.max() < 1


def test_other_widths():
    m = default_model(0.5, 3.0)
    assert check_model(m)["ok"]
    assert m.v(0.3, 3.0) == pytest.approx(m.tau(0.3))


@pytest.mark.parametrize("L_y, L_r", [(0, 1), (2, 1), (1, 1), (1, np.inf)])
def test_bad_widths_rejected(L_y, L_r):
    with pytest.raises(BadParameters):
        default_model(L_y, L_r)


@pytest.mark.parametrize("t, z", [(1.0, 1j), (-0.1, 1j), (0.5, 2.5j), (0.5, -0.1j)])
def test_out_of_strip_rejected(t, z):
    with pytest.raises(OutOfStrip):
        beltrami_coefficient(MODEL, t, z)
    with pytest.raises(OutOfStrip):
        strip_map(MODEL, t, z)


def test_check_model_flags_non_injective_map():
    bad = StripModel(1.0, 2.0, MODEL.tau, lambda t, y: np.where(y <= 1, y, 1 + 0 * y))
    assert not check_model(bad)["injective"]
