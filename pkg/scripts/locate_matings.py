"""Locate parameters where the forward critical point is fixed (matings with z^2).

For each k the condition f(c) = c at the critical point c(a), whose two
forward images coincide, is solved numerically in a and compared with the
closed form from
``critical_fixed_parameter``. The script then checks, at sampling
resolution, that the Lambda- cloud traces a single closed curve.

    python3 scripts/locate_matings.py --k 0.5 0.75 0.9 1.0
"""

import argparse

import numpy as np
from scipy import ndimage, optimize

from corrdyn.algebra import Correspondence, critical_fixed_parameter
from corrdyn.dynamics import RasterSpec, RenderConfig, Viewport, accumulate, attractor_backward


def critical_residual(a: float, k: float) -> float:
    """Image minus critical point at u = 2 sqrt(k) (p(c, c) itself has a double zero)."""
    c = Correspondence(a, k)
    z = c.critical_points("forward")[0]
    w = c.forward(z).points[0]
    return float((w - z).real)


def closed_curve(points: np.ndarray, size: int = 128) -> tuple[int, int]:
    """(components of the dilated cloud, components of its complement)."""
    lo = complex(points.real.min(), points.imag.min())
    hi = complex(points.real.max(), points.imag.max())
    pad = 0.1 * max(hi.real - lo.real, hi.imag - lo.imag)
    spec = RasterSpec(size, size, Viewport.from_corners(lo - pad * (1 + 1j), hi + pad * (1 + 1j)))
    mask = ndimage.binary_dilation(accumulate(spec, points) > 0)
    _, inside = ndimage.label(mask, structure=np.ones((3, 3)))
    _, outside = ndimage.label(~mask)
    return inside, outside


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, nargs="+", default=[0.5, 0.75, 0.9, 1.0])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'k':>6} {'a (solved)':>18} {'a (closed form)':>18} {'cloud':>6} {'complement':>10}")
    for k in args.k:
        guess = critical_fixed_parameter(k).real
        a = optimize.brentq(critical_residual, guess - 0.5, guess + 0.5, args=(k,), xtol=1e-14)
        cloud = attractor_backward(Correspondence(a, k), RenderConfig(seed=args.seed)).points
        inside, outside = closed_curve(cloud)
        print(f"{k:6.3f} {a:18.12f} {guess:18.12f} {inside:6d} {outside:10d}")


if __name__ == "__main__":
    main()
