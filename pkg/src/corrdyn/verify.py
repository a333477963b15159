"""Named invariant suites with a machine-readable report.

Each suite returns ``Check`` records carrying the worst value seen and the
tolerance it was held to, so a report shows margins and not just verdicts.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from itertools import product

import numpy as np
from scipy import ndimage

from . import algebra, dynamics, kleinian, pinching, sturmian
from .errors import UnknownSuite
from .mobius import MobiusMap
from .numeric import chordal, multiset_distance


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""


def _check(suite, name, worst, tol, detail="", strict=True) -> Check:
    worst = float(worst)
    ok = worst < tol if strict else worst <= tol
    return Check(suite, name, bool(ok), worst, float(tol), detail)


# helpers shared with the test-suite oracles

def random_parameters(rng: np.random.Generator, n: int) -> list[tuple[complex, complex]]:
    """Random (a, k), with a kept away from the degenerate values +-1."""
    out = []
    while len(out) < n:
        a = complex(*rng.normal(scale=3.0, size=2))
        k = complex(*rng.normal(size=2))
        if min(abs(a - 1), abs(a + 1)) > 0.1 and abs(k) > 0.05:
            out.append((a, k))
    return out


def random_points(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def is_balanced(bits) -> bool:
    """Cyclic balance: equal-length cyclic factors differ by at most one 1."""
    q = len(bits)
    doubled = list(bits) * 2
    for m in range(1, q):
        counts = {sum(doubled[i : i + m]) for i in range(q)}
        if max(counts) - min(counts) > 1:
            return False
    return True


def interior_parameter(k: float = 0.9) -> tuple[float, float]:
    """(a, k) where the forward critical point is fixed; the picture is a mating with z^2."""
    return algebra.critical_fixed_parameter(k).real, float(k)


# suites

def suite_algebra(seed: int = 0, n_params: int = 50, samples: int = 1000) -> list[Check]:
    rng = np.random.default_rng(seed)
    adj = sym = res = inv = 0.0
    for a, k in random_parameters(rng, n_params):
        c = algebra.Correspondence(a, k)
        z = random_points(rng, samples)
        w1, w2, _ = c.forward_array(z)
        P = c.cleared_coefficients()
        for w in (w1, w2):
            b1, b2, _ = c.backward_array(w)
            adj = max(adj, float(np.minimum(chordal(b1, z), chordal(b2, z)).max()))
            f1, f2, _ = c.forward_array(-w)
            sym = max(sym, float(np.minimum(chordal(f1, -z), chordal(f2, -z)).max()))
            res = max(res, float(np.max(algebra.relative_residual(P, z, w))))
        inv = max(inv, algebra.compatible_involution_check(c, samples, seed=int(rng.integers(2**31))).worst_violation)
    # covering correspondence against the roots of the cubic Q(w) - Q(z)
    zs = random_points(rng, 200)
    cov = 0.0
    for z in zs:
        roots = np.roots([1, 0, -3, -(z**3 - 3 * z)])
        cov = max(cov, multiset_distance(np.array(algebra.covering_correspondence(z)), roots).item())
    return [
        _check("algebra", "adjointness", adj, 1e-8, f"{n_params} parameters x {samples} points"),
        _check("algebra", "symmetry (z,w) -> (-w,-z)", sym, 1e-8),
        _check("algebra", "relative residual", res, 1e-9),
        _check("algebra", "compatible involution", inv, 1e-8),
        _check("algebra", "covering factorisation", cov, 1e-8, "root multiset vs cubic roots"),
    ]


def suite_sturmian(seed: int = 0, qmax: int = 12) -> list[Check]:
    wrong_classes = 0
    bad_minmax = 0
    wide = sturmian.Fraction(0)
    unbalanced = 0
    for q in range(1, qmax + 1):
        orbits = {}
        for bits in product((0, 1), repeat=q):
            w = sturmian.BinaryWord(bits)
            rigid = sturmian.is_sturmian(w)
            unbalanced += rigid != is_balanced(bits)
            if not rigid:
                continue
            r = sturmian.RotationNumber(w.ones(), q).mod1()
            if r.q != q:
                continue
            orbits.setdefault(r, set()).add(tuple(sturmian.orbit_angles(w)))
        for p in range(q):
            r = sturmian.RotationNumber(p, q)
            if r.q != q:
                continue
            expected = tuple(sturmian.orbit_angles(sturmian.mechanical_word(r)))
            if orbits.get(r) != {expected}:
                wrong_classes += 1
            lo, hi = sturmian.min_max_words(r)
            if lo != hi.reverse():
                bad_minmax += 1
            wide = max(wide, 1 - sturmian.max_gap(sturmian.sturmian_orbit_angles(r)))
    table = [(str(a), str(b)) for a, b in sturmian.pairing_table(sturmian.RotationNumber(1, 3))]
    pairing_ok = sorted(table) == sorted([("010", "100"), ("100", "010"), ("001", "001")])
    arc_bad = 0
    for r in sturmian.reduced_fractions(qmax):
        gen0 = sturmian.quotient_generations(r, 0)[0]
        chords = sum(x != y for x, y in gen0)
        spikes = sum(x == y for x, y in gen0)
        s = sturmian.image_arc_structure(r)
        if (s.concentric, s.spike) != (chords, spikes):
            arc_bad += 1
    sym = sturmian.word_symmetry(sturmian.RotationNumber(2, 5))
    return [
        _check("sturmian", "one Sturmian orbit per rotation number", wrong_classes, 0, f"q <= {qmax}", strict=False),
        _check("sturmian", "rigid rotation iff balanced", unbalanced, 0, strict=False),
        _check("sturmian", "min word is reverse of max word", bad_minmax, 0, strict=False),
        _check("sturmian", "orbit lies in an arc shorter than 1/2", float(wide), 0.5),
        _check("sturmian", "pairing table 1/3", 0 if pairing_ok else 1, 0, str(table), strict=False),
        _check("sturmian", "image-arc structure", arc_bad, 0, strict=False),
        _check("sturmian", "2/5 symmetry types", 0 if set(sym) == {"at-0", "between-0s"} else 1, 0, str(sym), strict=False),
    ]


def suite_kleinian_modular(seed: int = 0) -> list[Check]:
    rep = kleinian.modular_representation()
    s, r = rep.sigma, rep.rho
    T = MobiusMap(1, 1, 0, 1)
    U = MobiusMap(1, 0, 1, 1)
    return [
        _check("kleinian-modular", "sigma rho = z+1", (s @ r).projective_distance(T), 1e-9),
        _check("kleinian-modular", "sigma rho^-1 = z/(z+1)", (s @ r.inverse()).projective_distance(U), 1e-9),
        _check("kleinian-modular", "rho^3 = 1", (r @ r @ r).projective_distance(MobiusMap.identity()), 1e-9),
        _check("kleinian-modular", "sigma^2 = 1", (s @ s).projective_distance(MobiusMap.identity()), 1e-9),
        _check("kleinian-modular", "relations incl. chi", rep.relation_violation(), 1e-9),
    ]


def suite_kleinian(seed: int = 0, n_params: int = 20, samples: int = 10000) -> list[Check]:
    rng = np.random.default_rng(seed)
    rel = trip = conj = 0.0
    for _ in range(n_params):
        p = complex(*rng.normal(scale=2.0, size=2))
        rep = kleinian.build_representation(p)
        rel = max(rel, rep.relation_violation())
        trip = max(trip, min(abs(x - p) for x in rep.recovered_params()) / max(1.0, abs(p)))
        g = MobiusMap(*(rng.normal(size=4) + 1j * rng.normal(size=4)))
        w = kleinian.GroupWord.parse("srsR")
        t0 = kleinian.trace_word(rep, w)
        conj = max(conj, abs(t0 - kleinian.trace_word(rep.conjugate(g), w)) / max(1.0, abs(t0)))
    modular = kleinian.modular_representation()
    w0 = kleinian.sturmian_word_to_group_word(sturmian.RotationNumber(0, 1))
    s0 = kleinian.parabolic_parameter_solve(w0)
    cross = min(abs(s0.param - modular.param), abs(s0.param - 1 / modular.param))
    w2 = kleinian.sturmian_word_to_group_word(sturmian.RotationNumber(1, 2))
    s2 = kleinian.parabolic_parameter_solve(w2)
    cloud = kleinian.limit_set_sample(kleinian.build_representation(s2.param), samples, 40, seed=seed).points
    fit = kleinian.fit_circle(cloud)
    real_line = kleinian.limit_set_sample(modular, 2000, 30, seed=seed).points
    off_real = float(np.max(chordal(real_line, real_line.real + 0j)))
    return [
        _check("kleinian", "group relations", rel, 1e-9, f"{n_params} random parameters"),
        _check("kleinian", "cross-ratio round trip", trip, 1e-9),
        _check("kleinian", "trace^2 conjugation invariance", conj, 1e-9, "relative"),
        _check("kleinian", "0/1 word residual", s0.residual, 1e-10, f"param {s0.param:.12g}"),
        _check("kleinian", "0/1 solution is the modular parameter", cross, 1e-8),
        _check("kleinian", "1/2 word residual", s2.residual, 1e-10, f"param {s2.param:.12g}"),
        _check("kleinian", "1/2 limit set is a circle", fit.max_deviation, 1e-4, f"{samples} samples"),
        _check("kleinian", "modular limit set on the real line", off_real, 1e-6),
    ]


def suite_pinching(seed: int = 0) -> list[Check]:
    model = pinching.default_model()
    t, y, mu = pinching.beltrami_grid(model, 100, 100, 0.999)
    below = y <= model.L_y
    h = model.L_r - model.L_y
    ts = 1 - np.logspace(-1, -6, 12)
    path = np.abs(pinching.beltrami_coefficient(model, ts, 1j * (model.L_y + h * ts)))
    report = pinching.check_model(model)
    return [
        _check("pinching", "zero on the identity strip", mu[:, below].max(), 0, strict=False),
        _check("pinching", "modulus below 1 on the grid", mu.max(), 1.0),
        _check("pinching", "modulus tends to 1 at (1, L_r)", 1 - path[-1], 0.01, f"|mu| = {path[-1]:.6f}"),
        _check("pinching", "monotone along the path", float(np.max(-np.diff(path), initial=0)), 0, strict=False),
        _check("pinching", "model invariants", 0 if report["ok"] else 1, 0, str(report), strict=False),
    ]


def suite_dynamics(seed: int = 0, size: int = 128) -> list[Check]:
    a, k = interior_parameter()
    c = algebra.Correspondence(a, k)
    config = dynamics.RenderConfig(seed=seed)
    spec = dynamics.RasterSpec(size, size, dynamics.Viewport(0j, 0.6, 0.6))
    r1 = dynamics.render_limit_sets(c, spec, config, workers=1)
    r2 = dynamics.render_limit_sets(c, spec, config, workers=3)
    same = np.array_equal(r1.codes, r2.codes) and np.array_equal(r1.escape, r2.escape)
    plus = dynamics.attractor_forward(c, config).points
    minus = dynamics.attractor_backward(c, config).points
    mirror = float(np.max(chordal(minus, -plus)))
    _, n_omega = ndimage.label(r1.codes == dynamics.OMEGA)
    flipped = r1.codes[::-1, ::-1]
    swapped = np.choose(flipped, [0, 2, 1, 3, 4]).astype(np.uint8)
    sym = float(np.mean(swapped != r1.codes))
    return [
        _check("dynamics", "worker-count independence", 0 if same else 1, 0, strict=False),
        _check("dynamics", "Lambda- cloud = -(Lambda+ cloud)", mirror, config.trap_radius),
        _check("dynamics", "Omega is connected", n_omega, 1, f"{n_omega} component(s)", strict=False),
        _check("dynamics", "z -> -z swaps Lambda codes", sym, 0.01, "fraction of mismatched pixels"),
        _check("dynamics", "Undecided fraction", r1.code_fractions()["Undecided"], 0.05),
    ]


SUITES = {
    "algebra": suite_algebra,
    "sturmian": suite_sturmian,
    "kleinian-modular": suite_kleinian_modular,
    "kleinian": suite_kleinian,
    "pinching": suite_pinching,
    "dynamics": suite_dynamics,
}


def run_suite(name: str, seed: int = 0) -> dict:
    """Run one suite (or ``all``) and return a JSON-ready report."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {sorted(SUITES) + ['all']}", field="suite")
    start = time.perf_counter()
    checks = []
    for n in names:
        checks.extend(SUITES[n](seed=seed))
    return {
        "suite": name,
        "seed": seed,
        "passed": all(c.passed for c in checks),
        "checks": [asdict(c) for c in checks],
        "elapsed_s": time.perf_counter() - start,
    }
