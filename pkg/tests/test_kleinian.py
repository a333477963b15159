import cmath

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial import cKDTree

from corrdyn.errors import DegenerateCrossRatio, NoConvergence
from corrdyn.kleinian import (
    OMEGA,
    GroupWord,
    build_representation,
    evaluate_word,
    fit_circle,
    jorgensen_heuristic,
    limit_set_sample,
    modular_representation,
    parabolic_parameter_solve,
    sturmian_word_to_group_word,
    trace_word,
)
from corrdyn.mobius import MobiusMap
from corrdyn.numeric import chordal, to_sphere
from corrdyn.sturmian import RotationNumber

# away from the degenerate cross-ratios 0, 1 and infinity
params = st.builds(complex, st.floats(-5, 5), st.floats(-5, 5)).filter(lambda p: abs(p) > 0.05 and abs(p - 1) > 0.05)
letters = st.text(alphabet="srRc", max_size=12)


@given(params)
def test_relations_hold(p):
    assert build_representation(p).relation_violation() < 1e-9


@given(params)
def test_cross_ratio_round_trip(p):
    rep = build_representation(p)
    assert min(abs(x - p) for x in rep.recovered_params()) < 1e-9 * max(1.0, abs(p))


@given(params)
def test_parameter_and_its_reciprocal_give_the_same_traces(p):
    w = GroupWord.parse("srsR")
    t1 = trace_word(build_representation(p), w)
    t2 = trace_word(build_representation(1 / p), w)
    assert abs(t1 - t2) < 1e-8 * max(1.0, abs(t1))


def test_rho_rotates_anticlockwise_about_P():
    rep = build_representation(3 + 1j)
    f = rep.fixed_point_data()
    assert f["P"] == 0
    assert rep.rho.apply(0.1) == pytest.approx(0.1 * OMEGA)


@pytest.mark.parametrize("p", [0, 1, complex("inf"), 1e-12])
def test_degenerate_parameters_rejected(p):
    with pytest.raises(DegenerateCrossRatio):
        build_representation(p)


def test_modular_identities():
    rep = modular_representation()
    s, r = rep.sigma, rep.rho
    assert s.projective_distance(MobiusMap(0, -1, 1, 0)) < 1e-12
    assert r.projective_distance(MobiusMap(0, -1, 1, 1)) < 1e-12
    assert (s @ r).projective_distance(MobiusMap(1, 1, 0, 1)) < 1e-9
    assert (s @ r.inverse()).projective_distance(MobiusMap(1, 0, 1, 1)) < 1e-9
    assert (r @ r @ r).is_identity(1e-9)
    assert (s @ s).is_identity(1e-9)
    assert rep.relation_violation() < 1e-9


def test_modular_parameter_value():
    # (i, -i; conj(omega), omega) = 7 + 4 sqrt 3 up to the p <-> 1/p ambiguity
    p = modular_representation().param
    assert min(abs(p - (7 + 4 * 3**0.5)), abs(1 / p - (7 + 4 * 3**0.5))) < 1e-9


@pytest.mark.parametrize("word, expected", [("", 4), ("sr", 4), ("sR", 4), ("r", 1), ("s", 0), ("srsR", 9)])
def test_modular_trace_squares(word, expected):
    assert trace_word(modular_representation(), GroupWord.parse(word)) == pytest.approx(expected, abs=1e-9)


def test_jorgensen_heuristic_for_modular_group():
    assert jorgensen_heuristic(modular_representation()) == pytest.approx(1.0, abs=1e-9)


def test_word_reduction():
    assert str(GroupWord.parse("ss")) == ""
    assert str(GroupWord.parse("rr")) == "R"
    assert str(GroupWord.parse("rrr")) == ""
    assert str(GroupWord.parse("rR")) == ""
    assert str(GroupWord.parse("src")) == "csR"
    assert str(GroupWord.parse("cc")) == ""
    assert GroupWord.parse("sr").pretty() == "σρ"
    assert GroupWord.parse("").pretty() == "1"
    with pytest.raises(ValueError):
        GroupWord.parse("x")


@given(letters, letters)
def test_reduction_is_a_homomorphism(u, v):
    rep = build_representation(2.5 + 0.7j)
    raw = evaluate_word(rep, GroupWord(()))
    for x in u + v:
        raw = raw @ rep.generator(x)
    reduced = evaluate_word(rep, GroupWord.parse(u) * GroupWord.parse(v))
    # products of up to 24 loxodromic letters lose several digits
    assert raw.projective_distance(reduced) < 1e-5


@given(letters)
def test_inverse_word(u):
    w = GroupWord.parse(u)
    assert len(w * w.inverse()) == 0


def test_sturmian_word_mapping():
    assert str(sturmian_word_to_group_word(RotationNumber(0, 1))) == "sr"
    assert str(sturmian_word_to_group_word(RotationNumber(1, 2))) == "srsR"
    assert str(sturmian_word_to_group_word(RotationNumber(1, 3))) == "srsrsR"


def test_solve_zero_word_recovers_modular_group():
    word = sturmian_word_to_group_word(RotationNumber(0, 1))
    res = parabolic_parameter_solve(word)
    assert res.residual < 1e-10
    modular = modular_representation()
    assert min(abs(res.param - modular.param), abs(1 / res.param - modular.param)) < 1e-8
    assert trace_word(modular, word) == pytest.approx(4, abs=1e-10)


def test_solve_half_word_gives_circle_limit_set():
    word = sturmian_word_to_group_word(RotationNumber(1, 2))
    res = parabolic_parameter_solve(word)
    assert res.residual < 1e-10
    rep = build_representation(res.param)
    assert abs(trace_word(rep, word) - 4) < 1e-10
    assert fit_circle(limit_set_sample(rep, 4000, 30).points).max_deviation < 1e-4


def test_solve_rejects_empty_word_and_reports_failure():
    with pytest.raises(ValueError):
        parabolic_parameter_solve(GroupWord(()))
    with pytest.raises(NoConvergence):
        parabolic_parameter_solve(GroupWord.parse("r"), max_iter=5)


def test_modular_limit_set_is_the_real_line():
    pts = limit_set_sample(modular_representation(), 2000, 30).points
    assert np.max(chordal(pts, pts.real + 0j)) < 1e-6


def test_generic_limit_set_is_not_a_circle():
    pts = limit_set_sample(build_representation(6 + 2j), 4000, 30).points
    assert fit_circle(pts).max_deviation > 1e-2


def test_limit_set_words_are_prefix_stable():
    rep = build_representation(6 + 2j)
    short = limit_set_sample(rep, 300, 10, seed=4)
    long = limit_set_sample(rep, 300, 25, seed=4)
    assert np.array_equal(short.words, long.words[:, :10])
    # consecutive letters alternate between sigma and a power of rho
    is_sigma = long.words == 0
    assert np.all(is_sigma[:, 1:] != is_sigma[:, :-1])


def test_limit_set_is_invariant_under_generators():
    rep = build_representation(6 + 2j)
    pts = limit_set_sample(rep, 20000, 30).points
    tree = cKDTree(to_sphere(pts))
    for g in (rep.sigma, rep.rho, rep.chi):
        d, _ = tree.query(to_sphere(g.apply(pts[:2000])))
        assert d.max() < 1e-4


def test_limit_set_moves_with_conjugation():
    rep = build_representation(6 + 2j)
    g = MobiusMap(1, 2j, 0.5, 3)
    pts = limit_set_sample(rep, 500, 20, seed=1).points
    moved = limit_set_sample(rep.conjugate(g), 500, 20, seed=1).points
    # the base point moves with the group, so sampled points correspond exactly
    assert np.max(chordal(moved, g.apply(pts))) < 1e-8


def test_fit_circle_on_exact_circles():
    t = np.linspace(0, 2 * np.pi, 200)
    circle = 2 + 1j + 3 * np.exp(1j * t)
    fit = fit_circle(circle)
    assert fit.max_deviation < 1e-12 and not fit.degenerate
    line = np.linspace(-50, 50, 200) * cmath.exp(0.3j)
    assert fit_circle(line).max_deviation < 1e-12
