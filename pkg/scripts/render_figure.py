"""Render the limit sets of one correspondence to PNG and PPM with a sidecar.

    python3 scripts/render_figure.py --k 0.9 --size 512 --out figure.png
"""

import argparse
import time

from corrdyn import cli
from corrdyn.algebra import critical_fixed_parameter


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=float, default=0.9)
    ap.add_argument("--a", type=float, help="defaults to the critical-fixed parameter for k")
    ap.add_argument("--size", type=int, default=512)
    ap.add_argument("--out", default="figure.png")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    a = args.a if args.a is not None else critical_fixed_parameter(args.k).real
    argv = ["render", "--a", f"{a!r},0", "--k", f"{args.k!r},0", "--size", str(args.size), "--seed", str(args.seed)]
    t0 = time.perf_counter()
    for out in (args.out, args.out.rsplit(".", 1)[0] + ".ppm"):
        cli.main(argv + ["--out", out])
    print(f"rendered a={a:.12g}, k={args.k} in {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
