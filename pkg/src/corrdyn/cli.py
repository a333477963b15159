"""The ``corrdyn`` command line.

Every subcommand builds a ``RunConfig`` (defaults, then an optional
``--config`` file, then explicit flags), runs it, prints a JSON summary and,
when it writes files, a ``<out>.json`` sidecar holding the effective config.
Passing a sidecar back through ``--config`` reproduces the run.
"""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, algebra, dynamics, imaging, kleinian, pinching, sturmian, verify
from .config import RunConfig
from .errors import ConfigInvalid, CorrdynError, InvariantViolation

# per-command defaults layered under the config file and flags
COMMAND_DEFAULTS = {
    "scan": {
        "correspondence": {"k": [1.0, 0.0]},
        "raster": {"width": 256, "height": 256, "lower_left": [-6.0, -6.0], "upper_right": [14.0, 6.0]},
        "render": {"depth": 40, "width": 32},
    },
    "kleinian": {
        "raster": {"width": 512, "height": 512, "lower_left": [-3.0, -3.0], "upper_right": [3.0, 3.0]},
    },
}


# argument parsing helpers

def parse_complex(text: str) -> complex:
    """'re,im', 're' or a Python complex literal such as '1+2j'."""
    text = text.strip()
    try:
        if "," in text:
            re_, im = text.split(",")
            return complex(float(re_), float(im))
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot read {text!r} as a complex number") from exc


def parse_box(text: str) -> tuple[complex, complex]:
    try:
        x0, y0, x1, y1 = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected x0,y0,x1,y1 (lower-left then upper-right)") from exc
    return complex(x0, y0), complex(x1, y1)


def parse_size(text: str) -> tuple[int, int]:
    try:
        w, _, h = text.lower().partition("x")
        return int(w), int(h or w)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected WIDTHxHEIGHT or WIDTH") from exc


def _pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def _add_common(p: argparse.ArgumentParser, out_help: str) -> None:
    p.add_argument("--config", help="JSON config or sidecar to start from")
    p.add_argument("--out", help=out_help)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="worker threads (CORRDYN_THREADS overrides)")
    p.add_argument("--no-sidecar", action="store_true", help="skip the JSON provenance sidecar")


def _add_dynamics(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=parse_complex, help="k as re,im")
    p.add_argument("--size", type=parse_size, help="raster WIDTHxHEIGHT")
    p.add_argument("--budget", type=int, help="chaos-game steps per walker")
    p.add_argument("--transient", type=int, help="discarded chaos-game steps")
    p.add_argument("--walkers", type=int)
    p.add_argument("--trap-radius", type=float)
    p.add_argument("--depth", type=int, help="branch-tree depth")
    p.add_argument("--tree-width", type=int, help="live branches allowed per point")
    p.add_argument("--margin", type=float, help="undecided band around the trap boundary")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corrdyn", description="Holomorphic correspondences, matings and pinching.")
    parser.add_argument("--version", action="version", version=f"corrdyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="classify a viewport and draw the limit sets")
    _add_common(p, "image path (.png or .ppm)")
    _add_dynamics(p)
    p.add_argument("--a", type=parse_complex, help="a as re,im")
    p.add_argument("--viewport", type=parse_box, help="x0,y0,x1,y1 (use --viewport=-1,... for negatives)")
    p.add_argument("--csv", help="write the Lambda+ cloud as CSV")

    p = sub.add_parser("scan", help="escape indicator of the critical orbits over the a-plane")
    _add_common(p, "image path (.png or .ppm)")
    _add_dynamics(p)
    p.add_argument("--region", type=parse_box, help="a-plane box x0,y0,x1,y1 (use --region=-6,... for negatives)")
    p.add_argument("--csv", help="write (Re a, Im a, code, escape) rows as CSV")

    p = sub.add_parser("sturmian", help="Sturmian orbit, pairing and quotient data for p/q")
    _add_common(p, "JSON path")
    p.add_argument("--pq", help="rotation number p/q")
    p.add_argument("--quotient-depth", type=int, help="generations of identified pairs")

    p = sub.add_parser("kleinian", help="C2*C3 representations, parabolic solves and limit sets")
    _add_common(p, "JSON, CSV or image path for the limit-set sample")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--param", type=parse_complex, help="cross-ratio parameter re,im")
    grp.add_argument("--modular", action="store_true", help="the modular group")
    grp.add_argument("--pinch", help="solve trace^2 = 4 for the word of p/q")
    p.add_argument("--initial", type=parse_complex, help="Newton start for --pinch")
    p.add_argument("--samples", type=int)
    p.add_argument("--depth", type=int, help="word length of the samples")
    p.add_argument("--viewport", type=parse_box, help="x0,y0,x1,y1 for image output")
    p.add_argument("--size", type=parse_size)

    p = sub.add_parser("pinch-demo", help="Beltrami moduli of the model strip deformation")
    _add_common(p, "CSV path for the (t, y, |mu|) grid")
    p.add_argument("--image", help="heatmap PNG/PPM")
    p.add_argument("--ly", type=float, dest="L_y")
    p.add_argument("--lr", type=float, dest="L_r")
    p.add_argument("--nt", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--t-max", type=float)

    p = sub.add_parser("verify", help="run an invariant suite")
    _add_common(p, "JSON report path")
    p.add_argument("--suite", help=f"one of {sorted(verify.SUITES) + ['all']}")
    return parser


# config assembly

def _merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _flag_overrides(ns: argparse.Namespace) -> dict:
    g = vars(ns)
    d: dict = {}

    def put(section, key, value):
        if value is not None:
            d.setdefault(section, {})[key] = value

    for key in ("a", "k"):
        if g.get(key) is not None:
            put("correspondence", key, _pair(g[key]))
    box = g.get("viewport") or g.get("region")
    if box is not None:
        put("raster", "lower_left", _pair(box[0]))
        put("raster", "upper_right", _pair(box[1]))
    if g.get("size") is not None:
        put("raster", "width", g["size"][0])
        put("raster", "height", g["size"][1])
    for flag, key in (
        ("budget", "budget"),
        ("transient", "transient"),
        ("walkers", "walkers"),
        ("trap_radius", "trap_radius"),
        ("tree_width", "width"),
        ("margin", "margin"),
        ("seed", "seed"),
    ):
        put("render", key, g.get(flag))
    if ns.command != "kleinian":
        put("render", "depth", g.get("depth"))
    else:
        if g.get("param") is not None:
            put("kleinian", "param", _pair(g["param"]))
        if g.get("modular"):
            put("kleinian", "modular", True)
        put("kleinian", "pinch", g.get("pinch"))
        if g.get("initial") is not None:
            put("kleinian", "initial", _pair(g["initial"]))
        put("kleinian", "samples", g.get("samples"))
        put("kleinian", "depth", g.get("depth"))
    for key in ("L_y", "L_r", "nt", "ny", "t_max"):
        put("pinch", key, g.get(key))
    for key in ("pq", "suite", "threads", "quotient_depth"):
        if g.get(key) is not None:
            d[key] = g[key]
    put("output", "out", g.get("out"))
    put("output", "image", g.get("image"))
    put("output", "csv", g.get("csv"))
    if g.get("no_sidecar"):
        put("output", "sidecar", False)
    return d


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    data = RunConfig(ns.command).to_dict()
    data = _merge(data, COMMAND_DEFAULTS.get(ns.command, {}))
    if ns.config:
        try:
            loaded = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {ns.config}: {exc}", field="config") from exc
        if isinstance(loaded, dict) and "config" in loaded and "versions" in loaded:
            loaded = loaded["config"]
        if loaded.get("command", ns.command) != ns.command:
            raise ConfigInvalid(f"config is for {loaded['command']!r}, not {ns.command!r}", field="command")
        data = _merge(data, loaded)
    data = _merge(data, _flag_overrides(ns))
    return RunConfig.from_dict(data)


# runners: each returns (summary dict, list of written paths)

def _correspondence(cfg: RunConfig) -> algebra.Correspondence:
    return algebra.Correspondence(cfg.correspondence.a, cfg.correspondence.k)


def _spec(cfg: RunConfig) -> dynamics.RasterSpec:
    return dynamics.RasterSpec(cfg.raster.width, cfg.raster.height, cfg.raster.viewport())


def run_render(cfg: RunConfig):
    c = _correspondence(cfg)
    raster = dynamics.render_limit_sets(c, _spec(cfg), cfg.render, workers=cfg.threads)
    written = []
    if cfg.output.out:
        imaging.write_image(cfg.output.out, imaging.to_rgb(raster))
        written.append(cfg.output.out)
    if cfg.output.csv:
        cloud = dynamics.build_traps(c, cfg.render).cloud_plus.points
        imaging.write_csv(cfg.output.csv, cloud, {"cloud": "Lambda+ (Lambda- is its negative)", "config": cfg.to_dict()})
        written.append(cfg.output.csv)
    summary = {"fractions": raster.code_fractions(), "max_escape": int(raster.escape.max()), **raster.meta}
    return summary, written


def run_scan(cfg: RunConfig):
    spec = _spec(cfg)
    raster = dynamics.scan_parameter_plane(spec.viewport, cfg.correspondence.k, spec, cfg.render, workers=cfg.threads)
    written = []
    if cfg.output.out:
        imaging.write_image(cfg.output.out, imaging.to_rgb(raster))
        written.append(cfg.output.out)
    if cfg.output.csv:
        a = spec.grid().ravel()
        rows = np.column_stack([a.real, a.imag, raster.codes.ravel(), raster.escape.ravel()])
        header = json.dumps({"config": cfg.to_dict()}, sort_keys=True) + "\nre_a,im_a,code,escape"
        np.savetxt(cfg.output.csv, rows, fmt=["%.17g", "%.17g", "%d", "%d"], delimiter=",", header=header, comments="# ")
        written.append(cfg.output.csv)
    return {"fractions": raster.code_fractions(), "max_escape": int(raster.escape.max())}, written


def _frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def run_sturmian(cfg: RunConfig):
    try:
        r = sturmian.RotationNumber.parse(cfg.pq)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigInvalid(f"cannot read rotation number {cfg.pq!r}", field="pq") from exc
    r = r.mod1()
    lo, hi = sturmian.min_max_words(r)
    gens = sturmian.quotient_generations(r, cfg.quotient_depth)
    summary = {
        "rotation_number": str(r),
        "word": str(sturmian.mechanical_word(r)),
        "min_word": str(lo),
        "max_word": str(hi),
        "orbit_angles": [_frac(t) for t in sturmian.sturmian_orbit_angles(r)],
        "pairing": [[str(a), str(b)] for a, b in sturmian.pairing_table(r)],
        "symmetry": list(sturmian.word_symmetry(r)),
        "endpoint_cone_points": list(sturmian.endpoint_cone_points(r)),
        "image_arcs": {"concentric": sturmian.image_arc_structure(r).concentric, "spike": sturmian.image_arc_structure(r).spike},
        "separating_diameter": _frac(sturmian.separating_diameter(r)),
        "quotient_generations": [[[_frac(x), _frac(y)] for x, y in g] for g in gens],
    }
    return summary, _write_json(cfg, summary)


def _write_json(cfg: RunConfig, payload: dict) -> list[str]:
    if not cfg.output.out:
        return []
    Path(cfg.output.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return [cfg.output.out]


def _matrix(m) -> list:
    return [[_pair(complex(x)) for x in row] for row in m.sl2()]


def run_kleinian(cfg: RunConfig):
    kc = cfg.kleinian
    solve = None
    if kc.pinch is not None:
        try:
            r = sturmian.RotationNumber.parse(kc.pinch).mod1()
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigInvalid(f"cannot read rotation number {kc.pinch!r}", field="kleinian.pinch") from exc
        word = kleinian.sturmian_word_to_group_word(r)
        res = kleinian.parabolic_parameter_solve(word, kc.initial)
        rep = kleinian.build_representation(res.param)
        solve = {"word": word.pretty(), "residual": res.residual, "iterations": res.iterations}
    elif kc.param is not None:
        rep = kleinian.build_representation(kc.param)
    else:
        rep = kleinian.modular_representation()
    sample = kleinian.limit_set_sample(rep, kc.samples, kc.depth, seed=cfg.render.seed)
    pts = sample.points
    fit = kleinian.fit_circle(pts[np.isfinite(pts)])
    summary = {
        "param": _pair(complex(rep.param)),
        "sigma": _matrix(rep.sigma),
        "rho": _matrix(rep.rho),
        "chi": _matrix(rep.chi),
        "relation_violation": rep.relation_violation(),
        "jorgensen_heuristic": kleinian.jorgensen_heuristic(rep),
        "circle_fit_deviation": fit.max_deviation,
        "solve": solve,
        "samples": int(pts.size),
    }
    written = []
    out = cfg.output.out
    if out:
        suffix = Path(out).suffix.lower()
        if suffix == ".csv":
            imaging.write_csv(out, pts, {"config": cfg.to_dict()})
        elif suffix in (".png", ".ppm"):
            counts = dynamics.accumulate(_spec(cfg), pts)
            imaging.write_image(out, imaging.heatmap(np.log1p(counts), 0, max(1.0, float(np.log1p(counts).max()))))
        else:
            payload = dict(summary, points=[_pair(complex(z)) if np.isfinite(z) else None for z in pts])
            Path(out).write_text(json.dumps(payload) + "\n")
        written.append(out)
    return summary, written


def run_pinch(cfg: RunConfig):
    pc = cfg.pinch
    model = pinching.default_model(pc.L_y, pc.L_r)
    t, y, mu = pinching.beltrami_grid(model, pc.nt, pc.ny, pc.t_max)
    written = []
    if cfg.output.out:
        T, Y = np.meshgrid(t, y, indexing="ij")
        header = json.dumps({"config": cfg.to_dict()}, sort_keys=True) + "\nt,y,abs_mu"
        np.savetxt(cfg.output.out, np.column_stack([T.ravel(), Y.ravel(), mu.ravel()]), fmt="%.17g", delimiter=",", header=header, comments="# ")
        written.append(cfg.output.out)
    if cfg.output.image:
        # t runs left to right, y bottom to top
        imaging.write_image(cfg.output.image, imaging.heatmap(mu.T[::-1]))
        written.append(cfg.output.image)
    below = y <= model.L_y
    return {
        "max_abs_mu": float(mu.max()),
        "max_abs_mu_identity_strip": float(mu[:, below].max()),
        "invariants": pinching.check_model(model),
    }, written


def run_verify(cfg: RunConfig):
    report = verify.run_suite(cfg.suite, seed=cfg.render.seed)
    return report, _write_json(cfg, report)


RUNNERS = {
    "render": run_render,
    "scan": run_scan,
    "sturmian": run_sturmian,
    "kleinian": run_kleinian,
    "pinch-demo": run_pinch,
    "verify": run_verify,
}


def versions() -> dict:
    import scipy

    out = {"corrdyn": __version__, "python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__}
    try:
        import PIL

        out["Pillow"] = PIL.__version__
    except ImportError:
        pass
    return out


def run(cfg: RunConfig) -> tuple[dict, list[str]]:
    """Execute a config; returns the summary and the paths written (sidecar included)."""
    start = time.perf_counter()
    summary, written = RUNNERS[cfg.command](cfg)
    wall = time.perf_counter() - start
    if written and cfg.output.sidecar:
        sidecar = f"{written[0]}.json"
        Path(sidecar).write_text(
            json.dumps(
                {
                    "config": cfg.to_dict(),
                    "versions": versions(),
                    "seed": cfg.render.seed,
                    "wall_time_s": wall,
                    "outputs": written,
                },
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )
        written.append(sidecar)
    return summary, written


def _error_report(exc: BaseException, code: int) -> str:
    report = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if getattr(exc, "field", None) is not None:
        report["field"] = exc.field
    if getattr(exc, "last_residual", None) is not None:
        report["last_residual"] = exc.last_residual
    return json.dumps(report)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        summary, written = run(cfg)
    except CorrdynError as exc:
        print(_error_report(exc, exc.exit_code), file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # anything unexpected is an internal failure
        print(_error_report(exc, InvariantViolation.exit_code), file=sys.stderr)
        return InvariantViolation.exit_code
    print(json.dumps({"command": cfg.command, "summary": summary, "written": written}, indent=2, sort_keys=True))
    if cfg.command == "verify" and not summary["passed"]:
        return InvariantViolation.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
