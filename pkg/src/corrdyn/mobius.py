"""Projective 2x2 matrices acting on the Riemann sphere."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation
from .numeric import DEFAULT_POLICY, INF, dehomogenize


def _normalize(m: np.ndarray) -> np.ndarray:
    return m / np.linalg.norm(m)


@dataclass(frozen=True, eq=False)
class MobiusMap:
    """z -> (m00 z + m01) / (m10 z + m11), stored with unit Frobenius norm."""

    m00: complex
    m01: complex
    m10: complex
    m11: complex

    def __post_init__(self):
        m = _normalize(np.array([[self.m00, self.m01], [self.m10, self.m11]], dtype=complex))
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if not np.all(np.isfinite(m)) or abs(det) <= DEFAULT_POLICY.det_min:
            raise InvariantViolation(f"degenerate Mobius matrix (|det|={abs(det):.3g})")
        for name, v in zip(("m00", "m01", "m10", "m11"), m.ravel()):
            object.__setattr__(self, name, complex(v))

    @classmethod
    def from_matrix(cls, m) -> "MobiusMap":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_points(cls, src, dst) -> "MobiusMap":
        """The unique map sending the three points ``src`` to ``dst``."""
        return _to_standard(dst).inverse() @ _to_standard(src)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.m00, self.m01], [self.m10, self.m11]], dtype=complex)

    @property
    def det(self) -> complex:
        return self.m00 * self.m11 - self.m01 * self.m10

    def sl2(self) -> np.ndarray:
        """Representative with determinant 1 (defined up to sign)."""
        return self.matrix / np.sqrt(self.det)

    def trace_squared(self) -> complex:
        return (self.m00 + self.m11) ** 2 / self.det

    def __call__(self, z):
        return self.apply(z)

    def apply(self, z):
        """Evaluate on a scalar or array of sphere points, infinity included."""
        z = np.asarray(z, dtype=complex)
        inf = ~np.isfinite(z)
        zf = np.where(inf, 0, z)
        num = np.where(inf, self.m00, self.m00 * zf + self.m01)
        den = np.where(inf, self.m10, self.m10 * zf + self.m11)
        out = dehomogenize(num, den)
        return complex(out) if out.ndim == 0 else out

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self after other."""
        return MobiusMap.from_matrix(self.matrix @ other.matrix)

    __matmul__ = compose

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.m11, -self.m01, -self.m10, self.m00)

    def conjugate_by(self, g: "MobiusMap") -> "MobiusMap":
        """g self g^-1."""
        return g @ self @ g.inverse()

    def projective_distance(self, other: "MobiusMap") -> float:
        a = self.sl2().ravel()
        b = other.sl2().ravel()
        return float(min(np.abs(a - b).max(), np.abs(a + b).max()))

    def is_close(self, other: "MobiusMap", tol: float | None = None) -> bool:
        tol = DEFAULT_POLICY.projective_eq if tol is None else tol
        return self.projective_distance(other) < tol

    def is_identity(self, tol: float | None = None) -> bool:
        return self.is_close(IDENTITY, tol)

    def fixed_points(self) -> tuple[complex, complex]:
        """Both fixed points (equal for a parabolic map)."""
        a, b, c, d = self.m00, self.m01, self.m10, self.m11
        if abs(c) < 1e-14:
            # c z^2 + (d-a) z - b = 0 degenerates: infinity is fixed
            if abs(d - a) < 1e-14:
                return INF, INF
            return complex(b / (d - a)), INF
        s = np.sqrt(complex((a - d) ** 2 + 4 * b * c))
        return complex((a - d + s) / (2 * c)), complex((a - d - s) / (2 * c))

    def __repr__(self):
        return f"MobiusMap([[{self.m00:.6g}, {self.m01:.6g}], [{self.m10:.6g}, {self.m11:.6g}]])"


IDENTITY = MobiusMap(1, 0, 0, 1)


def _to_standard(pts) -> MobiusMap:
    """Map sending pts[0], pts[1], pts[2] to 0, 1, infinity."""
    z1, z2, z3 = (complex(p) for p in pts)
    if np.isinf(z1):
        return MobiusMap(0, z2 - z3, 1, -z3)
    if np.isinf(z2):
        return MobiusMap(1, -z1, 1, -z3)
    if np.isinf(z3):
        return MobiusMap(1, -z1, 0, z2 - z1)
    return MobiusMap(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))


def cross_ratio(a, b, c, d) -> complex:
    """(a, b; c, d) = (a-c)(b-d) / ((a-d)(b-c)), so (a, b; 0, inf) = a/b."""
    return complex(MobiusMap.from_points((c, b, d), (0, 1, INF)).apply(a))
