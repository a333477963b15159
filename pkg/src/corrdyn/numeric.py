"""Riemann-sphere arithmetic and the shared tolerance policy.

Points of the sphere are plain Python/numpy complex numbers. Any value with an
infinite component is the point at infinity; ``INF`` is the canonical one.
All comparisons go through the chordal metric, which is finite everywhere.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

INF = complex(math.inf, 0.0)


@dataclass(frozen=True)
class NumericPolicy:
    chordal_eq: float = 1e-8
    residual: float = 1e-9
    coincident: float = 1e-10
    det_min: float = 1e-12
    projective_eq: float = 1e-9


DEFAULT_POLICY = NumericPolicy()


def is_inf(z) -> bool:
    return cmath.isinf(complex(z))


def check_point(z) -> complex:
    """Validate and canonicalise a scalar sphere point."""
    z = complex(z)
    if cmath.isnan(z):
        raise ValueError("NaN is not a point of the sphere")
    return INF if cmath.isinf(z) else z


def to_sphere(z) -> np.ndarray:
    """Inverse stereographic projection onto the unit sphere, shape (..., 3).

    Large moduli are handled through 1/z so nothing overflows.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (3,))
    infmask = ~np.isfinite(z)
    big = (np.abs(np.where(infmask, 0, z)) > 1.0) & ~infmask
    small = ~big & ~infmask

    zs = z[small]
    r2 = zs.real**2 + zs.imag**2
    d = 1.0 + r2
    out[small, 0] = 2 * zs.real / d
    out[small, 1] = 2 * zs.imag / d
    out[small, 2] = (r2 - 1.0) / d

    w = 1.0 / z[big]
    r2 = w.real**2 + w.imag**2
    d = 1.0 + r2
    out[big, 0] = 2 * w.real / d
    out[big, 1] = -2 * w.imag / d
    out[big, 2] = (1.0 - r2) / d

    out[infmask] = (0.0, 0.0, 1.0)
    return out


def from_sphere(x) -> np.ndarray:
    """Stereographic projection; the upper hemisphere uses (1 + x3)/(x1 - i x2)
    to avoid cancelling in 1 - x3."""
    x = np.asarray(x, dtype=float)
    w = x[..., 0] + 1j * x[..., 1]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lower = w / (1.0 - x[..., 2])
        upper = (1.0 + x[..., 2]) / np.conj(w)
    z = np.where(x[..., 2] <= 0, lower, upper)
    return np.where((x[..., 2] > 0) & (w == 0), INF, z)


def chordal(z, w):
    """Chordal distance 2|z-w|/sqrt((1+|z|^2)(1+|w|^2)); broadcasts."""
    d = np.linalg.norm(to_sphere(z) - to_sphere(w), axis=-1)
    return float(d) if d.ndim == 0 else d


def multiset_distance(a, b) -> np.ndarray:
    """Bottleneck chordal distance between equal-size point multisets.

    ``a`` and ``b`` have shape (n, m); the result has shape (n,). Brute force
    over permutations, so only meant for the small m used here (m <= 4).
    """
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    m = a.shape[1]
    sa = to_sphere(a)
    sb = to_sphere(b)
    best = np.full(a.shape[0], np.inf)
    for perm in itertools.permutations(range(m)):
        d = np.linalg.norm(sa - sb[:, perm], axis=-1).max(axis=1)
        best = np.minimum(best, d)
    return best


def projective_quadratic_roots(A, B, C):
    """Roots of A x^2 + B x + C, as homogeneous pairs (num, den).

    Cancellation-free: the larger-magnitude root comes from -(B + s)/2 with the
    square root aligned to B, the other from Vieta. A vanishing leading
    coefficient yields a root at infinity (den == 0) instead of a division.
    Returns ``(n1, d1, n2, d2, disc)`` with ``disc = B^2 - 4AC``.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    C = np.asarray(C, dtype=complex)
    disc = B * B - 4 * A * C
    s = np.sqrt(disc)
    s = np.where((np.conj(B) * s).real < 0, -s, s)
    q = -(B + s) / 2
    # q == 0 only when B == 0 and AC == 0: both roots sit at 0 or at infinity
    qz = q == 0
    zn = np.where(C == 0, 0, 1)
    zd = np.where((A == 0) & (C != 0), 0, 1)
    n1 = np.where(qz, zn, q)
    d1 = np.where(qz, zd, A)
    n2 = np.where(qz, zn, C)
    d2 = np.where(qz, zd, q)
    return n1, d1, n2, d2, disc


def dehomogenize(num, den):
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = num / den
    return np.where(den == 0, INF, val)


def as_scalar(x):
    x = np.asarray(x)
    return complex(x) if x.ndim == 0 else x


def sample_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform random points on the sphere, returned as complex numbers."""
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return from_sphere(v)
