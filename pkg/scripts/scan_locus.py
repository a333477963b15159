"""Scan the a-plane at fixed k and print a coarse text picture of the locus.

'#' marks parameters whose critical orbits stay bounded to the scan depth,
'?' undecided pixels, digits the escape step (9 for 9 or more).

    python3 scripts/scan_locus.py --k 1 --region=-6,-6,14,6 --size 96 --out locus.png
"""

import argparse

from corrdyn import imaging
from corrdyn.cli import parse_box
from corrdyn.dynamics import LAMBDA_MINUS, OMEGA, RasterSpec, RenderConfig, Viewport, scan_parameter_plane


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=complex, default=1.0)
    ap.add_argument("--region", type=parse_box, default=(-6 - 6j, 14 + 6j))
    ap.add_argument("--size", type=int, default=96)
    ap.add_argument("--depth", type=int, default=40)
    ap.add_argument("--out")
    args = ap.parse_args()
    region = Viewport.from_corners(*args.region)
    spec = RasterSpec(args.size, args.size // 2, region)
    raster = scan_parameter_plane(region, args.k, spec, RenderConfig(depth=args.depth, width=32))
    for code_row, esc_row in zip(raster.codes, raster.escape):
        line = []
        for code, esc in zip(code_row, esc_row):
            if code == OMEGA:
                line.append(str(min(int(esc), 9)))
            elif code == LAMBDA_MINUS:
                line.append("#")
            else:
                line.append("?" if code != 4 else "x")
        print("".join(line))
    print(raster.code_fractions())
    if args.out:
        imaging.write_image(args.out, imaging.to_rgb(raster))


if __name__ == "__main__":
    main()
