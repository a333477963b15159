import cmath

import numpy as np
import pytest
from hypothesis import given, strategies as st

from corrdyn.algebra import (
    Correspondence,
    branch_multipliers,
    compatible_involution_check,
    covering_correspondence,
    covering_correspondence_reduced,
    critical_fixed_parameter,
    cycle_multiplier,
    find_cycles,
    relative_residual,
    solve_biquadratic,
)
from corrdyn.errors import ParameterDegenerate
from corrdyn.numeric import INF, chordal

INTERIOR = Correspondence(critical_fixed_parameter(0.9), 0.9)
PARABOLIC = Correspondence(5, 1)

finite = st.floats(-4, 4, allow_nan=False)
points = st.builds(complex, finite, finite)
params = st.tuples(
    st.builds(complex, st.floats(-8, 8), st.floats(-8, 8)).filter(lambda a: abs(a - 1) > 0.05 and abs(a + 1) > 0.05),
    st.builds(complex, st.floats(0.05, 3), st.floats(-1, 1)),
)


def direct_p(a, k, z, w):
    A, B, C, D = a * z + 1, z + 1, a * w - 1, w - 1
    return A * A * D * D + A * B * C * D + B * B * C * C - 3 * k * B * B * D * D


def eval_cleared(P, z, w):
    return sum(P[i, j] * z**i * w**j for i in range(3) for j in range(3))


@given(params, points, points)
def test_cleared_coefficients_match_direct_expansion(ak, z, w):
    a, k = ak
    P = Correspondence(a, k).cleared_coefficients()
    ref = direct_p(a, k, z, w)
    scale = sum(abs(P[i, j]) * abs(z) ** i * abs(w) ** j for i in range(3) for j in range(3))
    assert abs(eval_cleared(P, z, w) - ref) <= 1e-12 * max(scale, 1.0)


@given(params, points)
def test_forward_images_lie_on_curve(ak, z):
    c = Correspondence(*ak)
    w1, w2, _ = c.forward_array(z)
    assert c.residual(z, w1) < 1e-9
    assert c.residual(z, w2) < 1e-9


@given(params, points)
def test_backward_is_adjoint_to_forward(ak, z):
    c = Correspondence(*ak)
    for w in c.forward_array(z)[:2]:
        back = c.backward_array(w)[:2]
        assert min(chordal(b, z) for b in back) < 1e-8


@given(params, points)
def test_backward_is_conjugate_of_forward(ak, z):
    c = Correspondence(*ak)
    f1, f2, _ = c.forward_array(-z)
    b1, b2, _ = c.backward_array(z)
    assert b1 == -f1 and b2 == -f2


@given(params, points)
def test_curve_symmetric_under_swap_and_negate(ak, z):
    c = Correspondence(*ak)
    for w in c.forward_array(z)[:2]:
        assert c.residual(-w, -z) < 1e-9


def test_poles_and_infinity_are_handled():
    c = INTERIOR
    for z in (-1, INF, 1):
        img = c.forward(z)
        for w in img:
            assert c.residual(z, w) < 1e-12


def test_critical_points_for_parabolic_parameter():
    crit = PARABOLIC.critical_points()
    assert crit[0] == pytest.approx(1 / 3)
    assert crit[1] == pytest.approx(-3 / 7)
    assert PARABOLIC.critical_points("backward") == [-z for z in crit]
    for z in crit:
        assert PARABOLIC.forward(z).coincident
    with pytest.raises(ValueError):
        PARABOLIC.critical_points("sideways")


def test_discriminant_is_normalised():
    rng = np.random.default_rng(3)
    z = rng.normal(size=500) + 1j * rng.normal(size=500)
    _, _, disc = INTERIOR.forward_array(z)
    assert np.all((disc >= 0) & (disc <= 1))
    assert INTERIOR.forward(INTERIOR.critical_points()[0]).discriminant < 1e-12


def test_critical_fixed_parameter_fixes_the_critical_point():
    for k in (0.36, 0.5, 0.9, 1.0, 0.7 + 0.2j):
        c = Correspondence(critical_fixed_parameter(k), k)
        crit = c.critical_points()[0]
        assert c.residual(crit, crit) < 1e-12
    assert critical_fixed_parameter(1) == pytest.approx(5)
    with pytest.raises(ParameterDegenerate):
        critical_fixed_parameter(4)


@pytest.mark.parametrize("a", [1, -1, complex("nan"), complex("inf")])
def test_degenerate_parameters_rejected(a):
    with pytest.raises(ParameterDegenerate):
        Correspondence(a, 1)


def test_parabolic_fixed_points():
    fps = {round(f.z.real, 9) + 0.0: f for f in PARABOLIC.fixed_points()}
    third = round(1 / 3, 9)
    assert set(fps) == {0.0, third, -third}
    assert fps[0.0].multiplicity == 2
    assert fps[0.0].multipliers[0] == pytest.approx(1, abs=1e-9)
    assert abs(fps[-third].multipliers[0]) < 1e-12
    m = fps[third].multipliers[0]
    assert not cmath.isfinite(m) or abs(m) > 1e12


def test_interior_fixed_points():
    fps = sorted(INTERIOR.fixed_points(), key=lambda f: f.z.real)
    assert sum(f.multiplicity for f in fps) == 4
    mult = {round(f.z.real, 4): abs(f.multipliers[0]) for f in fps}
    assert mult[-0.3694] < 1e-12
    assert mult[-0.2028] == pytest.approx(1.2985, abs=1e-4)
    assert mult[0.2028] == pytest.approx(0.7701, abs=1e-4)
    assert mult[0.3694] > 1e12


def test_branch_multiplier_matches_finite_difference():
    c = INTERIOR
    P = c.cleared_coefficients()
    z = 0.3 + 0.2j
    h = 1e-6
    for i in range(2):
        w = c.forward_array(z)[i]
        wh = c.forward_array(z + h)[i]
        (m,) = branch_multipliers(P, z, w)
        assert m == pytest.approx((wh - w) / h, rel=1e-4)


def test_branch_multiplier_in_flipped_chart():
    c = INTERIOR
    P = c.cleared_coefficients()
    z = 3.0 + 4.0j
    h = 1e-6
    w = c.forward_array(z)[0]
    wh = c.forward_array(z + h)[0]
    (m,) = branch_multipliers(P, z, w)
    assert m == pytest.approx((wh - w) / h, rel=1e-4)


def test_involution_check_passes_and_detects_perturbation():
    report = compatible_involution_check(INTERIOR, samples=500)
    assert report.passed and report.worst_violation < 1e-8
    P = INTERIOR.cleared_coefficients().copy()
    P[1, 1] += 0.1
    bad = compatible_involution_check(INTERIOR, samples=500, coefficients=P)
    assert not bad.passed and bad.worst_violation > 1e-3


def test_generic_solver_agrees_with_family_solver():
    rng = np.random.default_rng(1)
    z = rng.normal(size=50) + 1j * rng.normal(size=50)
    w1, w2 = solve_biquadratic(INTERIOR.cleared_coefficients(), z)
    f1, f2, _ = INTERIOR.forward_array(z)
    for i in range(50):
        got = sorted([w1[i], w2[i]], key=lambda x: (x.real, x.imag))
        ref = sorted([f1[i], f2[i]], key=lambda x: (x.real, x.imag))
        assert np.allclose(got, ref, atol=1e-9)


@given(points)
def test_covering_correspondence_preserves_cubic(z):
    def Q(x):
        return x**3 - 3 * x

    roots = covering_correspondence(z)
    assert roots[0] == z
    for w in roots[1:]:
        assert abs(Q(w) - Q(z)) <= 1e-9 * max(1.0, abs(z) ** 3)
    assert covering_correspondence_reduced(INF) == (INF, INF)


def test_cycles_of_period_two():
    cycles = find_cycles(INTERIOR, 2, n_seeds=80)
    assert cycles
    P = INTERIOR.cleared_coefficients()
    for cy in cycles:
        pts = np.array(cy.points)
        assert relative_residual(P, pts, np.roll(pts, -1)).max() < 1e-10
        assert abs(pts[0] - pts[1]) > 1e-6
        # the multiplier does not depend on where the cycle starts
        assert cycle_multiplier(P, cy.points[1:] + cy.points[:1]) == pytest.approx(cy.multiplier)


def test_cycle_search_is_reproducible():
    a = find_cycles(INTERIOR, 3, n_seeds=40, seed=5)
    b = find_cycles(INTERIOR, 3, n_seeds=40, seed=5)
    assert [cy.points for cy in a] == [cy.points for cy in b]
    for cy in a:
        assert cy.period == 3
