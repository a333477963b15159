import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from corrdyn.numeric import (
    INF,
    check_point,
    chordal,
    dehomogenize,
    from_sphere,
    multiset_distance,
    projective_quadratic_roots,
    to_sphere,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)
points = st.builds(complex, finite, finite)


@given(points)
def test_sphere_round_trip(z):
    back = complex(from_sphere(to_sphere(z)))
    assert chordal(back, z) < 1e-12


@given(points)
def test_to_sphere_lands_on_unit_sphere(z):
    assert abs(np.linalg.norm(to_sphere(z)) - 1) < 1e-12


def test_infinity_is_north_pole():
    assert np.allclose(to_sphere(INF), [0, 0, 1])
    assert np.allclose(to_sphere(0), [0, 0, -1])


def test_chordal_known_values():
    # 0 and infinity are antipodal; 1 and -1 lie on the equator
    assert chordal(0, INF) == pytest.approx(2.0)
    assert chordal(1, -1) == pytest.approx(2.0)
    assert chordal(1, 1j) == pytest.approx(math.sqrt(2))


@given(points, points)
def test_chordal_symmetric_and_bounded(z, w):
    d = chordal(z, w)
    assert d == pytest.approx(chordal(w, z), abs=1e-15)
    assert 0 <= d <= 2 + 1e-12


def test_check_point_rejects_nan_and_canonicalises_infinity():
    with pytest.raises(ValueError):
        check_point(complex(math.nan, 0))
    assert check_point(complex(math.inf, -math.inf)) == INF


@given(points, points, points)
def test_quadratic_roots_match_numpy(a, b, c):
    if abs(a) < 1e-3:
        return
    n1, d1, n2, d2, _ = projective_quadratic_roots(a, b, c)
    ours = np.array([dehomogenize(n1, d1), dehomogenize(n2, d2)]).astype(complex)
    ref = np.roots([a, b, c])
    scale = max(1.0, abs(b / a), abs(c / a) ** 0.5)
    assert multiset_distance(ours / scale, ref / scale)[0] < 1e-7


def test_quadratic_degenerate_leading_coefficient_gives_infinity():
    # 0 z^2 + 2 z - 4 = 0 has roots 2 and infinity
    n1, d1, n2, d2, _ = projective_quadratic_roots(0, 2, -4)
    roots = sorted([complex(dehomogenize(n1, d1)), complex(dehomogenize(n2, d2))], key=abs)
    assert roots[0] == pytest.approx(2)
    assert roots[1] == INF


def test_multiset_distance_is_order_free():
    a = np.array([1, 2j, -3])
    assert multiset_distance(a, a[::-1])[0] == 0.0
    assert multiset_distance(a, np.array([1, 2j, 5]))[0] > 0.1
