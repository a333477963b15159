"""Raster colouring and file writers (PPM, PNG, CSV point clouds)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dynamics import LAMBDA_MINUS, LAMBDA_PLUS, MASKED, OMEGA, UNDECIDED, Raster

CODE_COLORS = {
    LAMBDA_MINUS: (40, 70, 170),
    LAMBDA_PLUS: (190, 50, 40),
    UNDECIDED: (230, 0, 230),
    MASKED: (128, 128, 128),
}
CLOUD_COLOR = (0, 0, 0)


def escape_shade(escape: np.ndarray, period: int = 12) -> np.ndarray:
    """Cyclic grey-green shading of escape steps, (..., 3) uint8."""
    t = (np.asarray(escape) % period) / period
    g = 150 + 100 * np.abs(2 * t - 1)
    return np.stack([0.6 * g + 40, g, 0.6 * g + 40], axis=-1).astype(np.uint8)


def to_rgb(raster: Raster, show_cloud: bool = True) -> np.ndarray:
    """(height, width, 3) uint8 image of a classification raster."""
    rgb = np.zeros(raster.codes.shape + (3,), dtype=np.uint8)
    om = raster.codes == OMEGA
    rgb[om] = escape_shade(raster.escape[om])
    for code, color in CODE_COLORS.items():
        rgb[raster.codes == code] = color
    if show_cloud and raster.counts is not None:
        rgb[raster.counts > 0] = CLOUD_COLOR
    return rgb


def heatmap(values: np.ndarray, vmin: float = 0.0, vmax: float = 1.0) -> np.ndarray:
    """Black-red-yellow-white ramp for a 2-D array of scalars."""
    t = np.clip((np.asarray(values, dtype=float) - vmin) / (vmax - vmin), 0, 1)
    r = np.clip(3 * t, 0, 1)
    g = np.clip(3 * t - 1, 0, 1)
    b = np.clip(3 * t - 2, 0, 1)
    return (255 * np.stack([r, g, b], axis=-1)).round().astype(np.uint8)


def write_ppm(path, rgb: np.ndarray) -> None:
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P6":
        raise ValueError(f"{path} is not a binary PPM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError("only 8-bit PPM is supported")
    return np.frombuffer(parts[4][: w * h * 3], dtype=np.uint8).reshape(h, w, 3)


def write_png(path, rgb: np.ndarray) -> None:
    from PIL import Image

    Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8), "RGB").save(path, format="PNG")


def write_image(path, rgb: np.ndarray) -> None:
    """PPM for a .ppm suffix, PNG otherwise."""
    if Path(path).suffix.lower() == ".ppm":
        write_ppm(path, rgb)
    else:
        write_png(path, rgb)


def write_csv(path, points, provenance: dict | None = None) -> None:
    """Point cloud as ``x,y`` lines under a ``#``-commented JSON provenance header."""
    pts = np.asarray(points, dtype=complex).ravel()
    pts = pts[np.isfinite(pts)]
    header = ""
    if provenance is not None:
        header = json.dumps(provenance, sort_keys=True, default=str) + "\n"
    header += "x,y"
    np.savetxt(path, np.column_stack([pts.real, pts.imag]), fmt="%.17g", delimiter=",", header=header, comments="# ")


def read_csv(path) -> tuple[np.ndarray, dict | None]:
    provenance = None
    with open(path) as fh:
        first = fh.readline()
    if first.startswith("# {"):
        provenance = json.loads(first[2:])
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    return data[:, 0] + 1j * data[:, 1], provenance
