"""Representations of C2*C3 in PSL2(C), group words and limit-set sampling.

Normal form: rho(z) = omega z with omega = exp(2 pi i / 3), so its fixed
points are P = 0 (anticlockwise rotation) and P' = inf. The fixed points of
sigma are Q = sqrt(p) and Q' = 1/sqrt(p), giving cross-ratio
(Q, Q'; P, P') = p, and chi(z) = 1/z swaps both pairs. The representation
depends on p only through s^2 = p + 2 + 1/p with s = Q + Q', so p and 1/p
give the same triple.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCrossRatio, InvariantViolation, NoConvergence
from .mobius import IDENTITY, MobiusMap, cross_ratio
from .numeric import INF, chordal, to_sphere
from .sturmian import RotationNumber, mechanical_word

OMEGA = cmath.exp(2j * cmath.pi / 3)

# letters: s = sigma, r = rho, R = rho^-1, c = chi
_INVERT = {"s": "s", "r": "R", "R": "r", "c": "c"}
_PRETTY = {"s": "σ", "r": "ρ", "R": "ρ⁻¹", "c": "χ"}


@dataclass(frozen=True)
class GroupWord:
    """A word in sigma, rho, rho^-1, chi kept in normal form.

    Every chi is moved to the front using chi sigma = sigma chi and
    chi rho = rho^-1 chi, and the rest is reduced in <sigma> * <rho>.
    """

    letters: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", _reduce(tuple(self.letters)))

    @classmethod
    def parse(cls, text: str) -> "GroupWord":
        bad = set(text) - set(_INVERT)
        if bad:
            raise ValueError(f"unknown letters {sorted(bad)}; use s, r, R, c")
        return cls(tuple(text))

    def __str__(self):
        return "".join(self.letters)

    def pretty(self) -> str:
        return "".join(_PRETTY[x] for x in self.letters) or "1"

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "GroupWord") -> "GroupWord":
        return GroupWord(self.letters + other.letters)

    def inverse(self) -> "GroupWord":
        return GroupWord(tuple(_INVERT[x] for x in reversed(self.letters)))


def _reduce(word: tuple[str, ...]) -> tuple[str, ...]:
    chis = 0
    out: list[str] = []
    for x in word:
        if x not in _INVERT:
            raise ValueError(f"unknown letter {x!r}")
        if x == "c":
            out = [_INVERT[y] for y in out]
            chis ^= 1
            continue
        out.append(x)
        while len(out) >= 2:
            a, b = out[-2], out[-1]
            if a == b == "s" or {a, b} == {"r", "R"}:
                del out[-2:]
            elif a == b:  # rr -> R, RR -> r
                out[-2:] = [_INVERT[a]]
            else:
                break
    return ("c",) * chis + tuple(out)


@dataclass(frozen=True)
class Representation:
    sigma: MobiusMap
    rho: MobiusMap
    chi: MobiusMap
    param: complex

    def __post_init__(self):
        worst = self.relation_violation()
        if worst > 1e-9:
            raise InvariantViolation(f"group relations fail by {worst:.3g}")

    def generator(self, letter: str) -> MobiusMap:
        return {"s": self.sigma, "r": self.rho, "R": self.rho.inverse(), "c": self.chi}[letter]

    def relation_violation(self) -> float:
        s, r, c = self.sigma, self.rho, self.chi
        checks = [
            (s @ s).projective_distance(IDENTITY),
            (r @ r @ r).projective_distance(IDENTITY),
            (c @ c).projective_distance(IDENTITY),
            (c @ s).projective_distance(s @ c),
            (c @ r).projective_distance(r.inverse() @ c),
        ]
        return max(checks)

    def conjugate(self, g: MobiusMap) -> "Representation":
        return Representation(
            self.sigma.conjugate_by(g), self.rho.conjugate_by(g), self.chi.conjugate_by(g), self.param
        )

    def fixed_point_data(self) -> dict[str, complex]:
        """P (where rho turns anticlockwise), P', and the fixed points of sigma."""
        p1, p2 = self.rho.fixed_points()
        if _multiplier(self.rho, p1).imag < 0:
            p1, p2 = p2, p1
        q1, q2 = self.sigma.fixed_points()
        return {"P": p1, "P'": p2, "Q": q1, "Q'": q2}

    def recovered_params(self) -> tuple[complex, complex]:
        """Cross-ratios (Q, Q'; P, P') for both labellings of sigma's fixed points."""
        f = self.fixed_point_data()
        x = cross_ratio(f["Q"], f["Q'"], f["P"], f["P'"])
        return x, 1 / x


def _multiplier(m: MobiusMap, z: complex) -> complex:
    """Derivative of m at a fixed point z (in the chart at infinity if needed)."""
    if z == INF or abs(z) > 1e8:
        # conjugate by 1/z so the fixed point sits at 0
        flip = MobiusMap(0, 1, 1, 0)
        return _multiplier(m.conjugate_by(flip), 0j)
    return m.det / (m.m10 * z + m.m11) ** 2


def sigma_from_s(s: complex) -> MobiusMap:
    return MobiusMap(s, -2, 2, -s)


def build_representation(param: complex, tol: float = 1e-9) -> Representation:
    p = complex(param)
    if not cmath.isfinite(p) or abs(p) < tol or abs(p - 1) < tol or chordal(p, INF) < tol:
        raise DegenerateCrossRatio(f"cross-ratio {p} is degenerate (0, 1 or infinity)", field="param")
    q = cmath.sqrt(p)
    s = q + 1 / q
    return Representation(sigma_from_s(s), MobiusMap(OMEGA, 0, 0, 1), MobiusMap(0, 1, 1, 0), p)


def modular_representation() -> Representation:
    """sigma(z) = -1/z, rho(z) = -1/(z+1): sigma rho = z+1, sigma rho^-1 = z/(z+1)."""
    sigma = MobiusMap(0, -1, 1, 0)
    rho = MobiusMap(0, -1, 1, 1)
    P = complex(OMEGA.conjugate())  # rho'(P) = omega
    Pp = OMEGA
    Q, Qp = 1j, -1j
    chi = MobiusMap.from_points((P, Pp, Q), (Pp, P, Qp))
    return Representation(sigma, rho, chi, cross_ratio(Q, Qp, P, Pp))


def evaluate_word(rep: Representation, word: GroupWord) -> MobiusMap:
    m = IDENTITY
    for x in word.letters:
        m = m @ rep.generator(x)
    return m


def trace_word(rep: Representation, word: GroupWord) -> complex:
    """trace^2 of the word with determinant normalised to 1."""
    return evaluate_word(rep, word).trace_squared()


def sturmian_word_to_group_word(r: RotationNumber) -> GroupWord:
    """0 -> sigma rho, 1 -> sigma rho^-1 over one period of the Sturmian word."""
    return GroupWord(tuple(x for b in mechanical_word(r).bits for x in ("s", "r" if b == 0 else "R")))


@dataclass(frozen=True)
class SolveResult:
    param: complex
    residual: float
    iterations: int


DEFAULT_INITIAL = 2j


def parabolic_parameter_solve(
    word: GroupWord,
    initial: complex = DEFAULT_INITIAL,
    tol: float = 1e-10,
    max_iter: int = 100,
    h: float = 1e-6,
) -> SolveResult:
    """Damped Newton for trace^2(word) = 4, derivative by central differences."""
    if len(word) == 0:
        raise ValueError("word must be nonempty")

    def F(p):
        try:
            return trace_word(build_representation(p), word) - 4
        except (DegenerateCrossRatio, InvariantViolation):
            raise NoConvergence(f"Newton reached the degenerate parameter {p}", last_residual=None)

    p = complex(initial)
    f = F(p)
    stalls = 0
    for it in range(1, max_iter + 1):
        dh = h * max(1.0, abs(p))
        df = (F(p + dh) - F(p - dh)) / (2 * dh)
        if df == 0:
            raise NoConvergence("zero derivative in Newton step", last_residual=abs(f))
        step = f / df
        lam = 1.0
        while True:
            cand = p - lam * step
            try:
                fc = F(cand)
            except NoConvergence:
                fc = complex(np.inf)
            if abs(fc) < abs(f) or lam < 1e-6:
                break
            lam /= 2
        if not np.isfinite(abs(fc)):
            raise NoConvergence("Newton left the valid parameter range", last_residual=abs(f))
        improved = abs(fc) < abs(f)
        p, f = cand, fc
        if abs(f) < tol:
            # a few more steps polish to working precision
            for _ in range(3):
                df = (F(p + dh) - F(p - dh)) / (2 * dh)
                cand = p - f / df
                fc = F(cand)
                if abs(fc) >= abs(f):
                    break
                p, f = cand, fc
            return SolveResult(p, abs(f), it)
        stalls = 0 if improved else stalls + 1
        if stalls > 5:
            break
    raise NoConvergence(f"no convergence after {max_iter} iterations", last_residual=abs(f))


def jorgensen_heuristic(rep: Representation) -> float:
    """|tr^2 A - 4| + |tr [A, B] - 2| for A = sigma rho, B = sigma rho^-1.

    Discrete non-elementary groups give at least 1; this is a necessary
    condition only and certifies nothing.
    """
    A = evaluate_word(rep, GroupWord.parse("sr")).sl2()
    B = evaluate_word(rep, GroupWord.parse("sR")).sl2()
    comm = A @ B @ np.linalg.inv(A) @ np.linalg.inv(B)
    return float(abs(np.trace(A) ** 2 - 4) + abs(np.trace(comm) - 2))


@dataclass(frozen=True)
class LimitSetSample:
    points: np.ndarray
    words: np.ndarray  # (n, L) letter codes: 0 = sigma, 1 = rho, 2 = rho^-1


def _column_bits(seed: int, col: int, n: int) -> np.ndarray:
    return np.random.default_rng([seed, col]).integers(0, 2, n)


def limit_set_sample(rep: Representation, n_points: int, max_word_length: int, seed: int = 0) -> LimitSetSample:
    """Images of a fixed point of sigma rho under random reduced words.

    Each letter column has its own random stream, so the words drawn with a
    longer ``max_word_length`` extend the shorter ones letter for letter.
    Letters alternate between sigma and rho^(+-1).
    """
    n, L = int(n_points), int(max_word_length)
    if n < 1 or L < 1:
        raise ValueError("n_points and max_word_length must be positive")
    start_sigma = _column_bits(seed, 0, n).astype(bool)
    words = np.empty((n, L), dtype=np.int8)
    mats = {0: rep.sigma.sl2(), 1: rep.rho.sl2(), 2: rep.rho.inverse().sl2()}
    M = np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2)).copy()
    for j in range(L):
        pm = _column_bits(seed, j + 1, n)
        is_sigma = start_sigma if j % 2 == 0 else ~start_sigma
        code = np.where(is_sigma, 0, 1 + pm)
        words[:, j] = code
        G = np.stack([mats[0], mats[1], mats[2]])[code]
        M = M @ G
        M /= np.linalg.norm(M, axis=(1, 2), keepdims=True)
    base = evaluate_word(rep, GroupWord.parse("sr")).fixed_points()[0]
    if base == INF:
        num, den = M[:, 0, 0], M[:, 1, 0]
    else:
        num = M[:, 0, 0] * base + M[:, 0, 1]
        den = M[:, 1, 0] * base + M[:, 1, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        pts = np.where(den == 0, INF, num / den)
    return LimitSetSample(pts, words)


@dataclass(frozen=True)
class CircleFit:
    normal: np.ndarray
    offset: float
    max_deviation: float

    @property
    def degenerate(self) -> bool:
        return abs(self.offset) > 1 - 1e-12


def fit_circle(points) -> CircleFit:
    """Least-squares circle on the Riemann sphere (a plane section), chordal deviation.

    Working on the sphere lets lines through infinity count as circles.
    """
    x = to_sphere(np.asarray(points, dtype=complex).ravel())
    c = x.mean(axis=0)
    _, _, vt = np.linalg.svd(x - c, full_matrices=False)
    n = vt[-1]
    d = float(n @ c)
    t = x @ n
    perp = x - np.outer(t, n)
    norm = np.linalg.norm(perp, axis=1, keepdims=True)
    rad = np.sqrt(max(0.0, 1 - d * d))
    nearest = d * n + rad * perp / np.where(norm == 0, 1, norm)
    dev = np.linalg.norm(x - nearest, axis=1)
    return CircleFit(n, d, float(dev.max()))
