"""Model strip deformation x + iy -> x + i v_t(y) and its Beltrami coefficient.

The default model uses tau(t) = L_r / (1 - t) and, with h = L_r - L_y,

    Phi(y) = L_y - h log(1 - (y - L_y) / h),   y*(t) = L_y + h t,

    v_t(y) = y                         for y <= L_y,
           = Phi(y)                    for L_y <= y <= y*(t),
           = Hermite quadratic         for y*(t) <= y <= L_r,

where the quadratic matches Phi to first order at y*(t) and hits tau(t) at
L_r. Its curvature coefficient is nonnegative, so v_t is C^1 and strictly
increasing; v_0 is the identity and heights below L' freeze once
t >= (L' - L_y) / h.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BadParameters, InvariantViolation, OutOfStrip


@dataclass(frozen=True)
class StripModel:
    L_y: float
    L_r: float
    tau: Callable
    v: Callable
    dv: Callable | None = None
    freeze_time: Callable | None = None

    def __post_init__(self):
        if not (0 < self.L_y < self.L_r and np.isfinite(self.L_r)):
            raise BadParameters(f"need 0 < L_y < L_r, got L_y={self.L_y}, L_r={self.L_r}", field="L_y")

    def derivative(self, t, y, h: float = 1e-6):
        """dv/dy, analytic when available, otherwise central differences."""
        if self.dv is not None:
            return self.dv(t, y)
        y = np.asarray(y, dtype=float)
        lo = np.clip(y - h, 0, self.L_r)
        hi = np.clip(y + h, 0, self.L_r)
        return (self.v(t, hi) - self.v(t, lo)) / (hi - lo)


def default_model(L_y: float = 1.0, L_r: float = 2.0, check: bool = True) -> StripModel:
    L_y, L_r = float(L_y), float(L_r)
    if not (0 < L_y < L_r and np.isfinite(L_r)):
        raise BadParameters(f"need 0 < L_y < L_r, got L_y={L_y}, L_r={L_r}", field="L_y")
    h = L_r - L_y

    def tau(t):
        return L_r / (1 - np.asarray(t, dtype=float))

    def pieces(t, y):
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        t, y = np.broadcast_arrays(t, y)
        ys = L_y + h * t
        d = L_r - ys
        phi_s = L_y - h * np.log1p(-t)
        dphi_s = 1 / (1 - t)
        c = (tau(t) - phi_s - dphi_s * d) / (d * d)
        return t, y, ys, phi_s, dphi_s, c

    def v(t, y):
        t, y, ys, phi_s, dphi_s, c = pieces(t, y)
        x = np.clip((y - L_y) / h, 0, None)
        mid = L_y - h * np.log1p(-np.minimum(x, t))
        e = y - ys
        top = phi_s + dphi_s * e + c * e * e
        return np.where(y <= L_y, y, np.where(y <= ys, mid, top))

    def dv(t, y):
        t, y, ys, phi_s, dphi_s, c = pieces(t, y)
        x = np.clip((y - L_y) / h, 0, None)
        mid = 1 / (1 - np.minimum(x, t))
        top = dphi_s + 2 * c * (y - ys)
        return np.where(y <= L_y, 1.0, np.where(y <= ys, mid, top))

    def freeze_time(Lp):
        return max(0.0, (Lp - L_y) / h)

    model = StripModel(L_y, L_r, tau, v, dv, freeze_time)
    if check:
        report = check_model(model)
        if not report["ok"]:
            raise InvariantViolation(f"default model fails its invariants: {report}")
    return model


def _check_domain(model: StripModel, t, y):
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(t < 0) or np.any(t >= 1):
        raise OutOfStrip("t must lie in [0, 1)", field="t")
    if np.any(y < 0) or np.any(y > model.L_r):
        raise OutOfStrip(f"y must lie in [0, {model.L_r}]", field="y")


def strip_map(model: StripModel, t, z):
    z = np.asarray(z, dtype=complex)
    _check_domain(model, t, z.imag)
    out = z.real + 1j * model.v(t, z.imag)
    return complex(out) if np.ndim(out) == 0 else out


def beltrami_coefficient(model: StripModel, t, z):
    """(1 - dv/dy) / (1 + dv/dy); real-valued for this family of maps."""
    z = np.asarray(z, dtype=complex)
    _check_domain(model, t, z.imag)
    d = model.derivative(t, z.imag)
    mu = (1 - d) / (1 + d) + 0j
    return complex(mu) if np.ndim(mu) == 0 else mu


@dataclass(frozen=True)
class BeltramiSample:
    t: float
    x: float
    y: float
    value: complex

    @property
    def modulus(self) -> float:
        return abs(self.value)


def beltrami_grid(model: StripModel, nt: int = 100, ny: int = 100, t_max: float = 0.999):
    """Moduli on a regular (t, y) grid over [0, t_max] x [0, L_r]; returns (t, y, |mu|)."""
    t = np.linspace(0, t_max, nt)
    y = np.linspace(0, model.L_r, ny)
    T, Y = np.meshgrid(t, y, indexing="ij")
    mu = beltrami_coefficient(model, T, 1j * Y)
    return t, y, np.abs(mu)


def check_model(model: StripModel, n: int = 200) -> dict:
    """Sample the identity, injectivity and freezing invariants on an n-point grid."""
    ts = np.linspace(0, 0.99, n)
    ys = np.linspace(0, model.L_r, n)
    T, Y = np.meshgrid(ts, ys, indexing="ij")
    V = model.v(T, Y)
    below = Y <= model.L_y
    identity_err = float(np.abs(V[below] - Y[below]).max()) if below.any() else 0.0
    monotone = bool(np.all(np.diff(V, axis=1) > 0))
    freeze_err = 0.0
    if model.freeze_time is not None:
        Lp = 0.5 * (model.L_y + model.L_r)
        t0 = model.freeze_time(Lp)
        yy = ys[ys <= Lp]
        ref = model.v(t0, yy)
        for s in np.linspace(t0, 0.999, 25):
            freeze_err = max(freeze_err, float(np.abs(model.v(s, yy) - ref).max()))
    return {
        "identity_error": identity_err,
        "injective": monotone,
        "freeze_error": freeze_err,
        "ok": identity_err == 0.0 and monotone and freeze_err < 1e-12,
    }
