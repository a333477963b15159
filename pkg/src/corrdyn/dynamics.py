"""Attractor sampling, point classification and raster rendering.

Classification uses two traps. The Lambda+ trap is the open half-plane
through 0 that contains the forward attractor cloud, joined with a chordal
ball of ``trap_radius`` around the cloud; the Lambda- trap is its negative.
A point is then sorted by which of its pruned branch trees survive:

* forward tree survives, backward tree dies   -> LambdaMinus
* backward tree survives, forward tree dies   -> LambdaPlus
* both die                                    -> Omega(n), n = forward escape step
* both survive, or a tree outgrows its width  -> Undecided

Points within ``trap_radius`` of a cloud take that cloud's label outright:
the clouds sample the boundaries of the closed sets Lambda+-, where the
trees are numerically ambiguous.

A surviving tree whose live branches still lie within ``margin`` (chordal)
of the trap's boundary line after ``depth`` steps is also Undecided: slow
orbits near a parabolic point have not yet chosen a side.
"""

from __future__ import annotations

import functools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .algebra import Correspondence, forward_images
from .errors import ConfigInvalid, OrbitHitPole
from .numeric import DEFAULT_POLICY, INF, NumericPolicy, dehomogenize, projective_quadratic_roots, to_sphere

OMEGA, LAMBDA_MINUS, LAMBDA_PLUS, UNDECIDED, MASKED = 0, 1, 2, 3, 4
CODE_NAMES = {
    OMEGA: "Omega",
    LAMBDA_MINUS: "LambdaMinus",
    LAMBDA_PLUS: "LambdaPlus",
    UNDECIDED: "Undecided",
    MASKED: "Masked",
}


@dataclass(frozen=True)
class RenderConfig:
    budget: int = 400
    transient: int = 100
    trap_radius: float = 1e-3
    seed: int = 0
    walkers: int = 1000
    depth: int = 60
    width: int = 64
    q_max: int = 4
    multiplier_tol: float = 1e-6
    margin: float = 1e-2
    policy: NumericPolicy = field(default=DEFAULT_POLICY)

    def __post_init__(self):
        if not self.budget >= self.transient >= 0:
            raise ConfigInvalid("need budget >= transient >= 0", field="budget")
        if not self.trap_radius > 0:
            raise ConfigInvalid("trap_radius must be positive", field="trap_radius")
        for name in ("walkers", "depth", "width"):
            if getattr(self, name) < 1:
                raise ConfigInvalid(f"{name} must be at least 1", field=name)
        if self.margin < 0:
            raise ConfigInvalid("margin must be nonnegative", field="margin")
        if self.q_max < 1:
            raise ConfigInvalid("q_max must be at least 1", field="q_max")


@dataclass(frozen=True)
class Viewport:
    center: complex
    half_width: float
    half_height: float

    def __post_init__(self):
        if not (self.half_width > 0 and self.half_height > 0):
            raise ConfigInvalid("viewport needs positive area", field="viewport")
        object.__setattr__(self, "center", complex(self.center))

    @classmethod
    def from_corners(cls, lower_left: complex, upper_right: complex) -> "Viewport":
        lo, hi = complex(lower_left), complex(upper_right)
        if not (hi.real > lo.real and hi.imag > lo.imag):
            raise ConfigInvalid("viewport corners must be (lower-left, upper-right)", field="viewport")
        return cls((lo + hi) / 2, (hi.real - lo.real) / 2, (hi.imag - lo.imag) / 2)

    @property
    def corners(self) -> tuple[complex, complex]:
        d = complex(self.half_width, self.half_height)
        return self.center - d, self.center + d


@dataclass(frozen=True)
class RasterSpec:
    width: int
    height: int
    viewport: Viewport

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ConfigInvalid("raster needs at least one pixel", field="raster")

    @property
    def dx(self) -> float:
        return 2 * self.viewport.half_width / self.width

    @property
    def dy(self) -> float:
        return 2 * self.viewport.half_height / self.height

    def pixel_to_complex(self, row, col):
        """Pixel centres; row 0 is the top edge. Exactly odd under z -> -z about a 0 centre."""
        row = np.asarray(row, dtype=float)
        col = np.asarray(col, dtype=float)
        c = self.viewport.center
        x = c.real + (col - (self.width - 1) / 2) * self.dx
        y = c.imag - (row - (self.height - 1) / 2) * self.dy
        return x + 1j * y

    def complex_to_pixel(self, z):
        z = np.asarray(z, dtype=complex)
        c = self.viewport.center
        col = (z.real - c.real) / self.dx + (self.width - 1) / 2
        row = -(z.imag - c.imag) / self.dy + (self.height - 1) / 2
        return row, col

    def grid(self, rows=None) -> np.ndarray:
        rows = np.arange(self.height) if rows is None else np.asarray(rows)
        R, C = np.meshgrid(rows, np.arange(self.width), indexing="ij")
        return self.pixel_to_complex(R, C)


@dataclass
class Raster:
    spec: RasterSpec
    codes: np.ndarray
    escape: np.ndarray
    counts: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def code_fractions(self) -> dict[str, float]:
        n = self.codes.size
        return {CODE_NAMES[c]: float((self.codes == c).sum()) / n for c in CODE_NAMES}


@dataclass(frozen=True)
class Classification:
    kind: str
    escape_steps: int | None = None

    def __str__(self):
        return f"Omega({self.escape_steps})" if self.kind == "Omega" else self.kind


# systems: anything exposing vectorised forward_array / backward_array

@dataclass(frozen=True)
class CoveringSystem:
    """The reduced covering correspondence of Q(z) = z^3 - 3z on its own (no J)."""

    def forward_array(self, z):
        z = np.asarray(z, dtype=complex)
        fin = np.isfinite(z)
        zf = np.where(fin, z, 0)
        n1, d1, n2, d2, _ = projective_quadratic_roots(np.ones_like(zf), zf, zf * zf - 3)
        w1 = np.where(fin, dehomogenize(n1, d1), INF)
        w2 = np.where(fin, dehomogenize(n2, d2), INF)
        return w1, w2, None

    backward_array = forward_array


def worker_count(requested: int | None = None) -> int:
    env = os.environ.get("CORRDYN_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigInvalid(f"CORRDYN_THREADS must be an integer, got {env!r}", field="CORRDYN_THREADS") from exc
        return max(1, n)
    if requested:
        return max(1, int(requested))
    return os.cpu_count() or 1


def _row_chunks(height: int, workers: int):
    n = max(1, min(height, workers * 4))
    bounds = np.linspace(0, height, n + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def map_rows(fn, height: int, workers: int | None = None):
    """Apply ``fn(r0, r1)`` over row bands and stack the results in row order."""
    chunks = _row_chunks(height, worker_count(workers))
    if worker_count(workers) == 1 or len(chunks) == 1:
        parts = [fn(a, b) for a, b in chunks]
    else:
        with ThreadPoolExecutor(max_workers=worker_count(workers)) as ex:
            parts = list(ex.map(lambda ab: fn(*ab), chunks))
    return parts


# attractors

@dataclass(frozen=True)
class AttractorCloud:
    points: np.ndarray
    resampled: int

    def sphere(self) -> np.ndarray:
        return to_sphere(self.points)


def _chaos_game(step, config: RenderConfig, sign: float) -> AttractorCloud:
    rng = np.random.default_rng(config.seed)
    n = config.walkers
    z = sign * (rng.normal(size=n) + 1j * rng.normal(size=n))
    out = []
    resampled = 0
    for i in range(config.budget):
        w1, w2, _ = step(z)
        pick = rng.integers(0, 2, n).astype(bool)
        z = np.where(pick, w1, w2)
        bad = ~np.isfinite(z)
        if bad.any():
            good = np.flatnonzero(~bad)
            if good.size < n // 2:
                raise OrbitHitPole(f"{bad.sum()} of {n} walkers hit the pole at step {i}")
            resampled += int(bad.sum())
            z[bad] = z[good[rng.integers(0, good.size, bad.sum())]]
        if i >= config.transient:
            out.append(z.copy())
    pts = np.concatenate(out) if out else np.empty(0, dtype=complex)
    return AttractorCloud(pts, resampled)


def _corner_anchors(c, cloud: np.ndarray, radius: float) -> list[tuple[complex, float]]:
    """Fixed points on the cloud where a forward branch contracts, with |multiplier|.

    Near such a point the chaos game needs long runs of one branch, so the
    uniform walk visits it rarely and the cloud has a hole at the corner.
    """
    if not hasattr(c, "fixed_points") or cloud.size == 0:
        return []
    tree = cKDTree(to_sphere(cloud))
    out = []
    for fp in c.fixed_points():
        ms = [abs(m) for m in fp.multipliers if np.isfinite(m) and 0 < abs(m) < 1]
        if not ms or not np.isfinite(fp.z):
            continue
        d, _ = tree.query(to_sphere(np.array([fp.z]))[0])
        if d < 10 * radius + 1e-2:
            out.append((complex(fp.z), max(ms)))
    return out


def _refine_corners(step, seeds: np.ndarray, anchors, radius: float) -> np.ndarray:
    """Push ``seeds`` repeatedly through the branch nearest each anchor.

    Forward images of attractor points stay on the attractor, so this only
    adds genuine points, concentrated where the walk is thin.
    """
    extra = []
    for p, m in anchors:
        steps = int(min(200, np.ceil(np.log(radius / 10) / np.log(m))))
        x = seeds
        for _ in range(steps):
            w1, w2, _ = step(x)
            x = np.where(np.abs(w1 - p) <= np.abs(w2 - p), w1, w2)
            x = x[np.isfinite(x)]
            extra.append(x)
    return np.concatenate(extra) if extra else np.empty(0, dtype=complex)


def _attractor(c, step, config: RenderConfig, sign: float) -> AttractorCloud:
    cloud = _chaos_game(step, config, sign)
    if cloud.points.size == 0:
        return cloud
    # anchors come from the forward picture; the backward one is its mirror image
    anchors = [(sign * p, m) for p, m in _corner_anchors(c, sign * cloud.points, config.trap_radius)]
    # the first emitted batch does not depend on the budget, which keeps clouds nested
    extra = _refine_corners(step, cloud.points[: config.walkers], anchors, config.trap_radius)
    return AttractorCloud(np.concatenate([cloud.points, extra]), cloud.resampled)


def attractor_forward(c, config: RenderConfig) -> AttractorCloud:
    """Chaos game with uniform forward branch choice, plus corner refinement;
    approximates the boundary of Lambda+."""
    return _attractor(c, c.forward_array, config, 1.0)


def attractor_backward(c, config: RenderConfig) -> AttractorCloud:
    """Chaos game with backward branches. With the same seed the starts and
    choices mirror the forward run, so the cloud is exactly its negative."""
    return _attractor(c, c.backward_array, config, -1.0)


def hausdorff(a, b) -> float:
    """Symmetric chordal Hausdorff distance between two finite clouds."""
    sa, sb = to_sphere(a), to_sphere(b)
    d1, _ = cKDTree(sb).query(sa)
    d2, _ = cKDTree(sa).query(sb)
    return float(max(d1.max(), d2.max()))


# traps

def _arc_direction(z: np.ndarray) -> complex | None:
    """Unit vector bisecting the smallest arc of directions containing all of z,
    or None when that arc is not shorter than a half-turn."""
    if z.size == 0 or not np.all(np.isfinite(z)) or np.any(z == 0):
        return None
    ang = np.sort(np.angle(z))
    gaps = np.diff(np.concatenate([ang, [ang[0] + 2 * np.pi]]))
    i = int(np.argmax(gaps))
    span = 2 * np.pi - gaps[i]
    if span >= np.pi * 0.98:
        return None
    start = ang[(i + 1) % ang.size]
    mid = start + span / 2
    return complex(np.cos(mid), np.sin(mid))


@dataclass(frozen=True, eq=False)
class Trap:
    """Half-plane {Re(z conj(u)) > 0} (when u is set) union a chordal ball around a cloud."""

    direction: complex | None
    cloud: np.ndarray
    radius: float
    _tree: cKDTree | None = field(default=None, repr=False)
    _ball_inside: bool = False

    @classmethod
    def build(cls, cloud: np.ndarray, radius: float, direction: complex | None) -> "Trap":
        cloud = np.asarray(cloud, dtype=complex)
        tree = cKDTree(to_sphere(cloud)) if cloud.size else None
        inside = False
        if direction is not None and cloud.size:
            # chordal distance from the cloud to the boundary line of the half-plane
            x = to_sphere(cloud)
            nx = x[:, 0] * direction.real + x[:, 1] * direction.imag
            inside = bool(nx.min() > 1.01 * radius)
        return cls(direction, cloud, radius, tree, inside)

    def negated(self) -> "Trap":
        d = None if self.direction is None else -self.direction
        return Trap.build(-self.cloud, self.radius, d)

    def line_distance(self, z) -> np.ndarray:
        """Chordal distance to the boundary line of the half-plane (inf without one)."""
        z = np.asarray(z, dtype=complex)
        if self.direction is None:
            return np.full(z.shape, np.inf)
        x = to_sphere(z.ravel()).reshape(z.shape + (3,))
        u = self.direction
        return np.abs(x[..., 0] * u.real + x[..., 1] * u.imag)

    def near_cloud(self, z) -> np.ndarray:
        """Within ``radius`` (chordal) of the cloud."""
        z = np.asarray(z, dtype=complex)
        if self._tree is None:
            return np.zeros(z.shape, dtype=bool)
        d, _ = self._tree.query(to_sphere(z.ravel()), distance_upper_bound=self.radius)
        return (d <= self.radius).reshape(z.shape)

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        fin = np.isfinite(z)
        zf = np.where(fin, z, 0)
        hit = np.zeros(z.shape, dtype=bool)
        if self.direction is not None:
            u = self.direction
            hit = fin & ((zf.real * u.real + zf.imag * u.imag) > 0)
            if self._ball_inside:
                return hit
        if self._tree is not None:
            rest = ~hit
            if rest.any():
                d, _ = self._tree.query(to_sphere(z[rest]), distance_upper_bound=self.radius)
                hit[rest] = d <= self.radius
        return hit


@dataclass(frozen=True, eq=False)
class TrapPair:
    plus: Trap
    minus: Trap
    cloud_plus: AttractorCloud


@functools.lru_cache(maxsize=32)
def build_traps(c, config: RenderConfig) -> TrapPair:
    cloud = attractor_forward(c, config)
    plus = Trap.build(cloud.points, config.trap_radius, _arc_direction(cloud.points))
    return TrapPair(plus, plus.negated(), cloud)


def ball_trap_at_infinity(radius: float) -> Trap:
    return Trap.build(np.array([complex(np.inf, 0)]), radius, None)


# pruned branch trees

def prune_tree(step, z0: np.ndarray, trap: Trap, depth: int, width: int, margin: float = 0.0):
    """Iterate every branch, dropping those inside ``trap``.

    Returns ``(survived, escape, overflow, pending)``: whether some branch is
    still outside the trap after ``depth`` steps, the first step by which all
    branches had been trapped (``depth + 1`` when some survived), whether a
    point ever carried more than ``width`` live branches, and whether a
    surviving branch ends within ``margin`` of the trap's boundary line.
    """
    z0 = np.asarray(z0, dtype=complex).ravel()
    n = z0.size
    pid = np.arange(n)
    alive = ~trap.contains(z0)
    pid, z = pid[alive], z0[alive]
    escape = np.zeros(n, dtype=np.int64)
    overflow = np.zeros(n, dtype=bool)
    for d in range(1, depth + 1):
        if pid.size == 0:
            break
        escape[pid] = d
        w1, w2, _ = step(z)
        pid = np.concatenate([pid, pid])
        z = np.concatenate([w1, w2])
        keep = ~trap.contains(z)
        pid, z = pid[keep], z[keep]
        cnt = np.bincount(pid, minlength=n)
        big = cnt > width
        if big.any():
            overflow |= big
            m = ~big[pid]
            pid, z = pid[m], z[m]
    survived = np.zeros(n, dtype=bool)
    survived[pid] = True
    escape[survived] = depth + 1
    pending = np.zeros(n, dtype=bool)
    if margin > 0 and pid.size:
        near = trap.line_distance(z) < margin
        pending[pid[near]] = True
    return survived, escape, overflow, pending


def classify_array(system, z, traps: TrapPair, depth: int, width: int, margin: float = 0.0):
    """Codes and escape steps for an array of points."""
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    sf, ef, of, pf = prune_tree(system.forward_array, z, traps.plus, depth, width, margin)
    sb, _, ob, pb = prune_tree(system.backward_array, z, traps.minus, depth, width, margin)
    codes = np.full(z.size, OMEGA, dtype=np.uint8)
    codes[sf & ~sb] = LAMBDA_MINUS
    codes[sb & ~sf] = LAMBDA_PLUS
    codes[(sf & sb) | of | ob | pf | pb] = UNDECIDED
    # the clouds sample the boundaries of the closed sets; at trap resolution
    # their neighbourhoods belong to those sets whatever the trees say
    flat = z.ravel()
    codes[traps.plus.near_cloud(flat)] = LAMBDA_PLUS
    codes[traps.minus.near_cloud(flat)] = LAMBDA_MINUS
    esc = np.where(codes == OMEGA, ef, -1)
    return codes.reshape(shape), esc.reshape(shape)


def classify_point(c, z, config: RenderConfig) -> Classification:
    traps = build_traps(c, config)
    codes, esc = classify_array(c, np.array([complex(z)]), traps, config.depth, config.width, config.margin)
    kind = CODE_NAMES[int(codes[0])]
    return Classification(kind, int(esc[0]) if kind == "Omega" else None)


def classify_points(c, z, config: RenderConfig):
    return classify_array(c, z, build_traps(c, config), config.depth, config.width, config.margin)


# rendering

def accumulate(spec: RasterSpec, points) -> np.ndarray:
    pts = np.asarray(points, dtype=complex)
    pts = pts[np.isfinite(pts)]
    row, col = spec.complex_to_pixel(pts)
    r = np.rint(row).astype(np.int64)
    q = np.rint(col).astype(np.int64)
    ok = (r >= 0) & (r < spec.height) & (q >= 0) & (q < spec.width)
    counts = np.zeros((spec.height, spec.width), dtype=np.int64)
    np.add.at(counts, (r[ok], q[ok]), 1)
    return counts


def render_limit_sets(
    c,
    spec: RasterSpec,
    config: RenderConfig,
    workers: int | None = None,
    traps: TrapPair | None = None,
) -> Raster:
    """Per-pixel classification plus accumulation counts of both attractor clouds.

    ``traps`` overrides the cloud-derived traps, which is how systems
    without an attractor (such as the covering correspondence) are rendered.
    """
    if traps is None:
        traps = build_traps(c, config)

    def band(r0, r1):
        return classify_array(c, spec.grid(np.arange(r0, r1)), traps, config.depth, config.width, config.margin)

    parts = map_rows(band, spec.height, workers)
    codes = np.concatenate([p[0] for p in parts], axis=0)
    escape = np.concatenate([p[1] for p in parts], axis=0)
    cloud = traps.cloud_plus.points if traps.cloud_plus is not None else np.empty(0, dtype=complex)
    counts = accumulate(spec, cloud) + accumulate(spec, -cloud) if isinstance(c, Correspondence) else None
    meta = {
        "cloud_points": int(cloud.size),
        "half_plane": None if traps.plus.direction is None else [traps.plus.direction.real, traps.plus.direction.imag],
    }
    return Raster(spec, codes, escape, counts, meta)


# parameter plane

def _arc_directions(pts: np.ndarray) -> np.ndarray:
    """Row-wise version of ``_arc_direction``; 0 marks rows without a half-plane."""
    ok = np.all(np.isfinite(pts) & (pts != 0), axis=1)
    ang = np.sort(np.angle(np.where(np.isfinite(pts), pts, 1)), axis=1)
    gaps = np.diff(np.concatenate([ang, ang[:, :1] + 2 * np.pi], axis=1), axis=1)
    i = np.argmax(gaps, axis=1)
    span = 2 * np.pi - gaps[np.arange(len(i)), i]
    start = ang[np.arange(len(i)), (i + 1) % ang.shape[1]]
    mid = start + span / 2
    ok &= span < np.pi * 0.98
    return np.where(ok, np.exp(1j * mid), 0)


def _scan_directions(a, k, config: RenderConfig, walkers: int = 24, steps: int = 48) -> np.ndarray:
    """Per-parameter bisecting direction of a short forward chaos game (0 when undefined).

    Every pixel replays the same starts and branch choices, so the result does
    not depend on how the raster is split between workers.
    """
    rng = np.random.default_rng(config.seed)
    start = rng.normal(size=walkers) + 1j * rng.normal(size=walkers)
    picks = rng.integers(0, 2, (steps, walkers)).astype(bool)
    z = np.broadcast_to(start, (a.size, walkers)).copy()
    A = a[:, None]
    keep = []
    for i in range(steps):
        w1, w2, _ = forward_images(A, k, z)
        z = np.where(picks[i], w1, w2)
        if i >= steps // 2:
            keep.append(z)
    return _arc_directions(np.concatenate(keep, axis=1))


def scan_parameter_plane(
    region: Viewport,
    k: complex,
    spec: RasterSpec,
    config: RenderConfig,
    workers: int | None = None,
) -> Raster:
    """Escape indicator of the critical orbits over a rectangle of ``a`` values.

    The critical points of the forward correspondence sit on the Lambda+ side,
    so their orbits are followed under the backward branches until every
    branch enters the Lambda- trap (the half-plane opposite the per-pixel
    attractor direction). Codes: OMEGA with the escape step, LAMBDA_MINUS
    for orbits bounded to the given depth, UNDECIDED for width overflow or a
    missing half-plane, MASKED at a = +-1.
    """
    if spec.viewport != region:
        spec = RasterSpec(spec.width, spec.height, region)
    k = complex(k)
    s = 2 * np.sqrt(k)

    def band(r0, r1):
        a = spec.grid(np.arange(r0, r1)).ravel()
        masked = (np.abs(a - 1) < 0.5 * min(spec.dx, spec.dy)) | (np.abs(a + 1) < 0.5 * min(spec.dx, spec.dy))
        asafe = np.where(masked, 0, a)
        u = _scan_directions(asafe, k, config)
        codes = np.full(a.size, UNDECIDED, dtype=np.uint8)
        escape = np.full(a.size, -1, dtype=np.int64)
        ok = ~masked & (u != 0)
        idx = np.flatnonzero(ok)
        if idx.size:
            # forward critical points (s-1)/(a-s) and (-s-1)/(a+s)
            A = asafe[idx]
            with np.errstate(divide="ignore", invalid="ignore"):
                crit = np.stack([(s - 1) / (A - s), (-s - 1) / (A + s)], axis=1)
            surv, esc, over = _scan_trees(A, k, crit, -u[idx], config)
            codes[idx] = np.where(over, UNDECIDED, np.where(surv, LAMBDA_MINUS, OMEGA))
            escape[idx] = np.where(codes[idx] == OMEGA, esc, -1)
        codes[masked] = MASKED
        h = r1 - r0
        return codes.reshape(h, spec.width), escape.reshape(h, spec.width)

    parts = map_rows(band, spec.height, workers)
    codes = np.concatenate([p[0] for p in parts], axis=0)
    escape = np.concatenate([p[1] for p in parts], axis=0)
    return Raster(spec, codes, escape, None, {"k": [k.real, k.imag]})


def _scan_trees(a, k, crit, u, config: RenderConfig):
    """Backward trees of both critical points per parameter, trapped by Re(z conj(u)) > 0."""
    n = a.size
    pid = np.repeat(np.arange(n), 2)
    z = crit.ravel()
    escape = np.zeros(n, dtype=np.int64)
    overflow = np.zeros(n, dtype=bool)

    def trapped(z, p):
        uu = u[p]
        fin = np.isfinite(z)
        zf = np.where(fin, z, 0)
        return fin & ((zf.real * uu.real + zf.imag * uu.imag) > 0)

    keep = ~trapped(z, pid)
    pid, z = pid[keep], z[keep]
    for d in range(1, config.depth + 1):
        if pid.size == 0:
            break
        escape[pid] = d
        # backward(w) = -forward(-w)
        w1, w2, _ = forward_images(a[pid], k, -z)
        pid = np.concatenate([pid, pid])
        z = -np.concatenate([w1, w2])
        keep = ~trapped(z, pid)
        pid, z = pid[keep], z[keep]
        cnt = np.bincount(pid, minlength=n)
        big = cnt > config.width
        if big.any():
            overflow |= big
            m = ~big[pid]
            pid, z = pid[m], z[m]
    survived = np.zeros(n, dtype=bool)
    survived[pid] = True
    return survived, escape, overflow


# parabolic detection

@dataclass(frozen=True)
class ParabolicCandidate:
    points: tuple[complex, ...]
    multiplier: complex
    distance: float


def parabolic_detect(c: Correspondence, config: RenderConfig) -> list[ParabolicCandidate]:
    """Fixed points and cycles (period <= q_max) whose multiplier is within tol of 1."""
    from .algebra import find_cycles

    out = []
    for fp in c.fixed_points():
        for m in fp.multipliers:
            if np.isfinite(m) and abs(m - 1) < config.multiplier_tol:
                out.append(ParabolicCandidate((fp.z,), m, abs(m - 1)))
    for q in range(2, config.q_max + 1):
        for cyc in find_cycles(c, q, seed=config.seed):
            m = cyc.multiplier
            if np.isfinite(m) and abs(m - 1) < config.multiplier_tol:
                out.append(ParabolicCandidate(cyc.points, m, abs(m - 1)))
    return out
