"""The two-parameter (2:2) correspondence family and its covering model.

A member is fixed by complex ``(a, k)``. Writing ``u = (az+1)/(z+1)`` and
``v = (aw-1)/(w-1)``, the graph is ``u^2 + uv + v^2 = 3k``. Because
``u(-w) = v(w)`` the composite ``J o f`` with ``J(z) = -z`` is the reduced
covering correspondence of ``Q(z) = z^3 - 3z`` read in the coordinate
``U = u / sqrt(k)``, which is what makes ``(J o f) U id`` an equivalence
relation.

Every evaluation is projective: points travel as homogeneous pairs scaled to
unit max-norm, so the poles ``z = -1`` and ``w = 1`` and the point at infinity
need no special cases.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegenerateRoot, ParameterDegenerate, SamplingDegenerate
from .mobius import MobiusMap
from .numeric import (
    DEFAULT_POLICY,
    INF,
    NumericPolicy,
    chordal,
    check_point,
    dehomogenize,
    multiset_distance,
    projective_quadratic_roots,
)

NEG = MobiusMap(-1, 0, 0, 1)


def homogenize(z):
    """Unit max-norm homogeneous coordinates (z0, z1) with z = z0/z1."""
    z = np.asarray(z, dtype=complex)
    inf = ~np.isfinite(z)
    zf = np.where(inf, 0, z)
    big = np.abs(zf) > 1
    # 1/zf is evaluated everywhere but only kept where |zf| > 1
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        z0 = np.where(inf | big, 1.0 + 0j, zf)
        z1 = np.where(inf, 0j, np.where(big, 1 / zf, 1.0 + 0j))
    return z0, z1


def _rescale(x0, x1):
    s = np.maximum(np.abs(x0), np.abs(x1))
    s = np.where(s == 0, 1.0, s)
    return x0 / s, x1 / s


@dataclass(frozen=True)
class BranchImage:
    """The two images of one point, with a normalised discriminant.

    ``discriminant`` is ``|12k - 3u^2| / (12|k| + 3|u|^2)``, which lies in
    [0, 1] and equals 1 at the node ``u = inf``; ``coincident`` flags a
    critical value.
    """

    points: tuple[complex, complex]
    discriminant: float
    coincident: bool

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return 2


@dataclass(frozen=True)
class Correspondence:
    a: complex
    k: complex
    policy: NumericPolicy = field(default=DEFAULT_POLICY, compare=False, repr=False)

    def __post_init__(self):
        a = complex(self.a)
        k = complex(self.k)
        if not (cmath.isfinite(a) and cmath.isfinite(k)):
            raise ParameterDegenerate("a and k must be finite", field="a" if not cmath.isfinite(a) else "k")
        if abs(a - 1) < 1e-12 or abs(a + 1) < 1e-12:
            raise ParameterDegenerate(f"a = {a} makes the coordinate change degenerate", field="a")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "k", k)

    @property
    def jmap(self) -> MobiusMap:
        return NEG

    @property
    def u_map(self) -> MobiusMap:
        """z -> (az+1)/(z+1)."""
        return MobiusMap(self.a, 1, 1, 1)

    @property
    def v_map(self) -> MobiusMap:
        """w -> (aw-1)/(w-1)."""
        return MobiusMap(self.a, -1, 1, -1)

    @property
    def covering_chart(self) -> MobiusMap:
        """z -> u(z)/sqrt(k): conjugates J o f to the reduced covering correspondence."""
        return MobiusMap(1, 0, 0, cmath.sqrt(self.k)) @ self.u_map

    def cleared_coefficients(self) -> np.ndarray:
        """3x3 array P with p(z, w) = sum P[i, j] z^i w^j."""
        A = np.array([1, self.a])
        B = np.array([1, 1], dtype=complex)
        C = np.array([-1, self.a])
        D = np.array([-1, 1], dtype=complex)
        m = np.convolve  # keeps zero leading coefficients, unlike polymul
        return (
            np.outer(m(A, A), m(D, D))
            + np.outer(m(A, B), m(C, D))
            + np.outer(m(B, B), m(C, C))
            - 3 * self.k * np.outer(m(B, B), m(D, D))
        )

    # vectorised core; scalar wrappers below
    def forward_array(self, z):
        """Both forward images of an array of points, plus the discriminant."""
        return forward_images(self.a, self.k, z)

    def backward_array(self, w):
        w = np.asarray(w, dtype=complex)
        z1, z2, disc = self.forward_array(-w)
        return -z1, -z2, disc

    def forward(self, z) -> BranchImage:
        return self._image(self.forward_array(check_point(z)))

    def backward(self, w) -> BranchImage:
        return self._image(self.backward_array(check_point(w)))

    def _image(self, res) -> BranchImage:
        w1, w2, disc = res
        disc = float(disc)
        return BranchImage(
            (check_point(complex(w1)), check_point(complex(w2))),
            disc,
            disc < self.policy.coincident,
        )

    def residual(self, z, w):
        """Relative residual |p| / sum |P_ij| |z|^i |w|^j in homogeneous form."""
        return relative_residual(self.cleared_coefficients(), z, w)

    def critical_points(self, direction: str = "forward") -> list[complex]:
        """Points whose two images coincide (u = +-2 sqrt k); backward ones are their negatives."""
        s = 2 * cmath.sqrt(self.k)
        inv = self.u_map.inverse()
        pts = [check_point(inv.apply(s)), check_point(inv.apply(-s))]
        if direction == "forward":
            return pts
        if direction == "backward":
            return [check_point(-p) for p in pts]
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")

    def fixed_points(self) -> list["FixedPoint"]:
        return fixed_points(self)


def critical_fixed_parameter(k: complex) -> complex:
    """The a for which the forward critical point (s - 1)/(a - s), s = 2 sqrt(k),
    is also a fixed point: a = r(4r + 1)/(2 - r) with r = sqrt(k).

    For real 0 < k <= 1 this is the analogue of z^2, whose critical point is
    a superattracting fixed point.
    """
    r = cmath.sqrt(k)
    if abs(2 - r) < 1e-12:
        raise ParameterDegenerate("k = 4 has no such parameter", field="k")
    return r * (4 * r + 1) / (2 - r)


def forward_images(a, k, z):
    """Forward images for arrays of points and (broadcast) arrays of parameters."""
    a = np.asarray(a, dtype=complex)
    k = np.asarray(k, dtype=complex)
    z0, z1 = homogenize(z)
    u0, u1 = _rescale(a * z0 + z1, z0 + z1)
    n1, d1, n2, d2, _ = projective_quadratic_roots(u1 * u1, u0 * u1, u0 * u0 - 3 * k * u1 * u1)
    disc = np.abs(12 * k * u1 * u1 - 3 * u0 * u0) / (12 * np.abs(k) * np.abs(u1) ** 2 + 3 * np.abs(u0) ** 2)
    out = []
    for n, d in ((n1, d1), (n2, d2)):
        n, d = _rescale(n, d)
        out.append(dehomogenize(n - d, n - a * d))
    return out[0], out[1], disc


def relative_residual(P, z, w):
    P = np.asarray(P, dtype=complex)
    z0, z1 = homogenize(z)
    w0, w1 = homogenize(w)
    zs = np.stack([z1 * z1, z0 * z1, z0 * z0])
    ws = np.stack([w1 * w1, w0 * w1, w0 * w0])
    val = np.einsum("ij,i...,j...->...", P, zs, ws)
    scale = np.einsum("ij,i...,j...->...", np.abs(P), np.abs(zs), np.abs(ws))
    out = np.abs(val) / np.where(scale == 0, 1.0, scale)
    return float(out) if out.ndim == 0 else out


def solve_biquadratic(P, z):
    """The two w with sum P[i, j] z^i w^j = 0, for arbitrary 3x3 coefficients."""
    P = np.asarray(P, dtype=complex)
    z0, z1 = homogenize(z)
    zs = np.stack([z1 * z1, z0 * z1, z0 * z0])
    c = np.einsum("ij,i...->j...", P, zs)
    n1, d1, n2, d2, _ = projective_quadratic_roots(c[2], c[1], c[0])
    return dehomogenize(*_rescale(n1, d1)), dehomogenize(*_rescale(n2, d2))


# covering correspondence of Q(z) = z^3 - 3z

def covering_correspondence_reduced(z) -> tuple[complex, complex]:
    """Roots w of w^2 + wz + z^2 - 3 = 0, i.e. Q(w) = Q(z) with w = z removed."""
    z = check_point(z)
    if z == INF:
        return INF, INF
    n1, d1, n2, d2, _ = projective_quadratic_roots(1, z, z * z - 3)
    return check_point(complex(dehomogenize(n1, d1))), check_point(complex(dehomogenize(n2, d2)))


def covering_correspondence(z) -> tuple[complex, complex, complex]:
    """All three roots w of Q(w) = Q(z); the first is z itself."""
    z = check_point(z)
    return (z, *covering_correspondence_reduced(z))


def involution_class(c: Correspondence, z, coefficients=None) -> np.ndarray:
    """The class {z} U (J o f)(z) as three sphere points.

    With ``coefficients`` the images come from a generic solve of that
    biquadratic, so a perturbed equation can be tested the same way.
    """
    z = np.asarray(z, dtype=complex)
    if coefficients is None:
        w1, w2, _ = c.forward_array(z)
    else:
        w1, w2 = solve_biquadratic(coefficients, z)
    return np.stack([z, -w1, -w2], axis=-1)


@dataclass(frozen=True)
class InvolutionReport:
    passed: bool
    worst_violation: float
    samples: int
    resampled: int


def compatible_involution_check(
    c: Correspondence,
    samples: int = 1000,
    tol: float | None = None,
    seed: int = 0,
    coefficients=None,
) -> InvolutionReport:
    """Check that (J o f) U id is an equivalence relation on random points.

    For every sampled z and every y in the class of z, the class of y must
    equal the class of z as a multiset (chordal bottleneck distance).
    """
    tol = c.policy.chordal_eq if tol is None else tol
    rng = np.random.default_rng(seed)
    z = rng.normal(size=samples) + 1j * rng.normal(size=samples)
    resampled = 0
    # the node z = -1 and the pole of the first image are not sample-worthy
    for _ in range(100):
        bad = chordal(z, -1) < 1e-6
        if not bad.any():
            break
        resampled += int(bad.sum())
        z[bad] = rng.normal(size=bad.sum()) + 1j * rng.normal(size=bad.sum())
    else:
        raise SamplingDegenerate("could not draw samples away from the node z = -1")
    cls = involution_class(c, z, coefficients)
    worst = 0.0
    for m in range(3):
        other = involution_class(c, cls[:, m], coefficients)
        worst = max(worst, float(multiset_distance(cls, other).max()))
    return InvolutionReport(worst < tol, worst, samples, resampled)


# fixed points and cycles

@dataclass(frozen=True)
class FixedPoint:
    """A root of p(z, z) with the multipliers dw/dz of the branches through (z, z).

    ``multipliers`` has one entry on a smooth point of the curve and two at a
    node.
    """

    z: complex
    multiplicity: int
    multipliers: tuple[complex, ...]


def _partials(P, z, w):
    zi = np.array([1, z, z * z])
    wj = np.array([1, w, w * w])
    dz = np.array([0, 1, 2 * z])
    dw = np.array([0, 1, 2 * w])
    dzz = np.array([0, 0, 2])
    f = zi @ P @ wj
    return (
        f,
        dz @ P @ wj,
        zi @ P @ dw,
        dzz @ P @ wj,
        dz @ P @ dw,
        zi @ P @ dzz,
    )


def branch_multipliers(P, z, w, tol: float = 1e-7) -> tuple[complex, ...]:
    """dw/dz along the branches through (z, w) by implicit differentiation.

    Evaluated in the flipped chart when a coordinate is large. On a node the
    gradient vanishes and the slopes come from the tangent cone.
    """
    P = np.asarray(P, dtype=complex)
    z = check_point(z)
    w = check_point(w)
    flip_z = z == INF or abs(z) > 1
    flip_w = w == INF or abs(w) > 1
    Q = P[::-1, :] if flip_z else P
    Q = Q[:, ::-1] if flip_w else Q
    zz = (0j if z == INF else 1 / z) if flip_z else z
    ww = (0j if w == INF else 1 / w) if flip_w else w
    _, pz, pw, pzz, pzw, pww = _partials(Q, zz, ww)
    scale = np.abs(Q).sum()
    if abs(pz) + abs(pw) > tol * scale:
        slopes = (-pz / pw if pw != 0 else complex(INF),)
    else:
        # pww m^2 + 2 pzw m + pzz = 0
        n1, d1, n2, d2, _ = projective_quadratic_roots(pww, 2 * pzw, pzz)
        slopes = (complex(dehomogenize(n1, d1)), complex(dehomogenize(n2, d2)))
    # d(1/w)/d(1/z) = (z/w)^2 dw/dz, so undo the chart in the same way
    out = []
    for m in slopes:
        if flip_z and flip_w:
            if z == INF and w == INF:
                out.append(m)  # the multiplier of a fixed point at infinity
            else:
                out.append(m * (w / z) ** 2 if cmath.isfinite(m) else m)
        elif flip_z:
            out.append(m * -(1 / z) ** 2 if cmath.isfinite(m) and z != INF else m)
        elif flip_w:
            out.append(m * -(w * w) if cmath.isfinite(m) and w != INF else m)
        else:
            out.append(m)
    return tuple(complex(x) for x in out)


def _diagonal(P) -> np.ndarray:
    d = np.zeros(5, dtype=complex)
    for i in range(3):
        for j in range(3):
            d[i + j] += P[i, j]
    return d


def _polish(coeffs, root, mult, iters=8):
    """Newton on the (mult-1)th derivative, which has a simple root there."""
    c = coeffs
    for _ in range(mult - 1):
        c = npoly.polyder(c)
    dc = npoly.polyder(c)
    for _ in range(iters):
        f = npoly.polyval(root, c)
        g = npoly.polyval(root, dc)
        if g == 0:
            break
        step = f / g
        root = root - step
        if abs(step) < 1e-16 * max(1.0, abs(root)):
            break
    return complex(root)


def fixed_points(c: Correspondence, cluster: float = 1e-5) -> list[FixedPoint]:
    """Roots of p(z, z) with multiplicity, including infinity when the degree drops."""
    P = c.cleared_coefficients()
    d = _diagonal(P)
    scale = np.abs(d).max()
    if scale < 1e-14 * np.abs(P).max():
        raise DegenerateRoot("p(z, z) vanishes identically")
    deg = 4
    while deg > 0 and abs(d[deg]) < 1e-13 * scale:
        deg -= 1
    roots = list(np.roots(d[: deg + 1][::-1])) if deg > 0 else []
    groups: list[list[complex]] = []
    for r in roots:
        for g in groups:
            if abs(r - g[0]) < cluster * max(1.0, abs(g[0])):
                g.append(r)
                break
        else:
            groups.append([r])
    out = []
    for g in groups:
        z = _polish(d[: deg + 1], complex(np.mean(g)), len(g))
        out.append(FixedPoint(z, len(g), branch_multipliers(P, z, z)))
    if deg < 4:
        out.append(FixedPoint(INF, 4 - deg, branch_multipliers(P, INF, INF)))
    return out


@dataclass(frozen=True)
class Cycle:
    points: tuple[complex, ...]
    multiplier: complex

    @property
    def period(self) -> int:
        return len(self.points)


def cycle_multiplier(P, points) -> complex:
    """Product of dw/dz along z_0 -> z_1 -> ... -> z_0 (one branch per step)."""
    n = len(points)
    lam = 1 + 0j
    for i in range(n):
        lam *= branch_multipliers(P, points[i], points[(i + 1) % n])[0]
    return complex(lam)


def _canonical_rotation(pts):
    i = min(range(len(pts)), key=lambda j: (round(pts[j].real, 7), round(pts[j].imag, 7)))
    return tuple(pts[i:] + pts[:i])


def find_cycles(
    c: Correspondence,
    period: int,
    n_seeds: int = 200,
    seed: int = 0,
    max_iter: int = 60,
    tol: float = 1e-12,
) -> list[Cycle]:
    """Finite cycles of exact period ``period`` by Newton on the cyclic system.

    The unknowns are z_0..z_{n-1} with p(z_i, z_{i+1 mod n}) = 0. Seeds are
    random branch walks. Cycles are deduplicated up to rotation and those
    whose minimal period is a proper divisor are dropped.
    """
    P = c.cleared_coefficients()
    n = period
    rng = np.random.default_rng(seed)
    found: list[Cycle] = []
    for _ in range(n_seeds):
        z = np.empty(n, dtype=complex)
        z[0] = complex(rng.normal(), rng.normal())
        for i in range(1, n):
            w1, w2, _ = c.forward_array(z[i - 1])
            z[i] = complex(w1 if rng.integers(2) == 0 else w2)
        if not np.all(np.isfinite(z)):
            continue
        ok = False
        for _ in range(max_iter):
            F = np.empty(n, dtype=complex)
            Jm = np.zeros((n, n), dtype=complex)
            for i in range(n):
                j = (i + 1) % n
                f, pz, pw, *_ = _partials(P, z[i], z[j])
                F[i] = f
                Jm[i, i] += pz
                Jm[i, j] += pw
            try:
                step = np.linalg.solve(Jm, F)
            except np.linalg.LinAlgError:
                break
            z = z - step
            if not np.all(np.isfinite(z)) or np.abs(z).max() > 1e8:
                break
            if np.abs(step).max() < tol * max(1.0, np.abs(z).max()):
                ok = True
                break
        if not ok:
            continue
        if relative_residual(P, z, np.roll(z, -1)).max() > 1e-10:
            continue
        pts = [complex(x) for x in z]
        if any(
            n % d == 0 and all(abs(pts[i] - pts[(i + d) % n]) < 1e-7 for i in range(n))
            for d in range(1, n)
        ):
            continue
        canon = _canonical_rotation(pts)
        if any(np.allclose(canon, cy.points, atol=1e-7) for cy in found):
            continue
        found.append(Cycle(canon, cycle_multiplier(P, canon)))
    return found
