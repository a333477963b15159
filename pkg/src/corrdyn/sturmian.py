"""Periodic Sturmian words, their doubling orbits and the circle quotients they induce.

Angles are exact ``Fraction`` values in [0, 1); the periodic word
``u_1 ... u_q`` repeated forever is the binary expansion of
``int(u_1...u_q, 2) / (2^q - 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotSturmian

HALF = Fraction(1, 2)


@dataclass(frozen=True, order=True)
class RotationNumber:
    """A reduced fraction p/q with q >= 1 (auto-reduced on construction)."""

    p: int
    q: int

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if q == 0:
            raise ValueError("denominator must be nonzero")
        if q < 0:
            p, q = -p, -q
        g = math.gcd(p, q) or 1
        object.__setattr__(self, "p", p // g)
        object.__setattr__(self, "q", q // g)

    @classmethod
    def parse(cls, text: str) -> "RotationNumber":
        num, _, den = text.strip().partition("/")
        return cls(int(num), int(den) if den else 1)

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)

    def mod1(self) -> "RotationNumber":
        return RotationNumber(self.p % self.q, self.q)

    def mod2(self) -> "RotationNumber":
        return RotationNumber(self.p % (2 * self.q), self.q)

    def __str__(self):
        return f"{self.p}/{self.q}"


@dataclass(frozen=True)
class BinaryWord:
    """One period of an infinitely repeated binary word.

    ``normal_form`` is the lexicographically least rotation and ``phase`` the
    left-rotation taking it to ``bits``, so two words are cyclically equal iff
    their normal forms agree.
    """

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("a word needs at least one letter")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("letters must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, text: str) -> "BinaryWord":
        return cls(tuple(int(c) for c in text.strip()))

    def __str__(self):
        return "".join(map(str, self.bits))

    def __len__(self):
        return len(self.bits)

    def rotate(self, n: int = 1) -> "BinaryWord":
        """Left rotation by n, i.e. n applications of the doubling map."""
        n %= len(self.bits)
        return BinaryWord(self.bits[n:] + self.bits[:n])

    def reverse(self) -> "BinaryWord":
        return BinaryWord(self.bits[::-1])

    def rotations(self) -> list["BinaryWord"]:
        return [self.rotate(i) for i in range(len(self.bits))]

    @property
    def normal_form(self) -> "BinaryWord":
        return min(self.rotations(), key=lambda w: w.bits)

    @property
    def phase(self) -> int:
        nf = self.normal_form.bits
        return next(i for i in range(len(self.bits)) if nf[i:] + nf[:i] == self.bits)

    def cyclic_equal(self, other: "BinaryWord") -> bool:
        return len(self) == len(other) and self.normal_form == other.normal_form

    def angle(self) -> Fraction:
        q = len(self.bits)
        return Fraction(int(str(self), 2), 2**q - 1) % 1

    def ones(self) -> int:
        return sum(self.bits)


def doubling(t: Fraction) -> Fraction:
    return (2 * t) % 1


def mechanical_word(r: RotationNumber) -> BinaryWord:
    """Lower mechanical word of slope p/q (p taken mod 1)."""
    r = r.mod1()
    p, q = r.p, r.q
    return BinaryWord(tuple((i + 1) * p // q - i * p // q for i in range(q)))


def orbit_angles(w: BinaryWord) -> list[Fraction]:
    """Distinct doubling-orbit angles of the periodic word, sorted."""
    return sorted({v.angle() for v in w.rotations()})


def is_sturmian(w: BinaryWord) -> bool:
    """Doubling permutes the sorted orbit as a rigid rotation."""
    pts = orbit_angles(w)
    n = len(pts)
    idx = {t: i for i, t in enumerate(pts)}
    shifts = {(idx[doubling(t)] - i) % n for i, t in enumerate(pts)}
    return len(shifts) == 1


def rotation_number(w: BinaryWord) -> RotationNumber:
    if not is_sturmian(w):
        raise NotSturmian(f"{w} is not a Sturmian word", field="word")
    return RotationNumber(w.ones(), len(w)).mod1()


def min_max_words(r: RotationNumber) -> tuple[BinaryWord, BinaryWord]:
    rots = mechanical_word(r).rotations()
    return min(rots, key=lambda w: w.bits), max(rots, key=lambda w: w.bits)


def sturmian_orbit_angles(r: RotationNumber) -> list[Fraction]:
    return sorted(w.angle() for w in mechanical_word(r).rotations())


def max_gap(angles) -> Fraction:
    """Largest complementary arc of a finite set of circle points."""
    pts = sorted(angles)
    gaps = [pts[i + 1] - pts[i] for i in range(len(pts) - 1)]
    gaps.append(pts[0] + 1 - pts[-1])
    return max(gaps)


def pair_landing(w: BinaryWord) -> BinaryWord:
    """u_{q-1} u_{q-2} ... u_1 u_q: the partner word of u_1 ... u_q."""
    if not is_sturmian(w):
        raise NotSturmian(f"{w} is not a Sturmian word", field="word")
    b = w.bits
    return BinaryWord(b[:-1][::-1] + b[-1:])


def pairing_table(r: RotationNumber) -> list[tuple[BinaryWord, BinaryWord]]:
    """(word, partner) for every rotation of the Sturmian p/q word."""
    return [(w, pair_landing(w)) for w in sorted(mechanical_word(r).rotations(), key=lambda w: w.bits)]


def endpoint_cone_points(r: RotationNumber) -> tuple[str, str]:
    """Cone-point labels at the ends of the arc for the full value p/q."""
    p, q = r.p, r.q
    if q % 2 == 0:
        return ("Q", "S")
    if p % 2 == 1:
        return ("Q", "R")
    return ("R", "S")


SYMMETRY_TYPES = ("at-0", "at-1", "between-0s", "between-1s")


def word_symmetry(r: RotationNumber) -> tuple[str, ...]:
    """Reflection types of the bi-infinite periodic word, by exhaustive axis search.

    Axis ``c`` (an integer or half-integer position) is a symmetry when
    ``x[c+j] = x[c-j]`` for all j; one period of offsets suffices.
    """
    x = mechanical_word(r).bits
    q = len(x)
    found = set()
    for twice_c in range(2 * q):
        # positions c + j and c - j are (twice_c + m) / 2 and (twice_c - m) / 2 for m of matching parity
        ok = all(
            x[((twice_c + m) // 2) % q] == x[((twice_c - m) // 2) % q]
            for m in range(twice_c % 2, 2 * q + 1, 2)
        )
        if not ok:
            continue
        if twice_c % 2 == 0:
            found.add(f"at-{x[(twice_c // 2) % q]}")
        else:
            found.add(f"between-{x[(twice_c // 2) % q]}s")
    return tuple(t for t in SYMMETRY_TYPES if t in found)


def phi(w: BinaryWord) -> BinaryWord:
    """Flip the first letter of one period."""
    return BinaryWord((1 - w.bits[0],) + w.bits[1:])


def phi_angle(t: Fraction) -> Fraction:
    """Flipping only the first digit of an infinite expansion moves the angle by 1/2."""
    return (t + HALF) % 1


@dataclass(frozen=True)
class ArcStructure:
    concentric: int
    spike: int


def image_arc_structure(r: RotationNumber) -> ArcStructure:
    q = r.q
    if q % 2 == 0:
        return ArcStructure(q // 2, 0)
    return ArcStructure((q - 1) // 2, 1)


def _arc_order(points, start: Fraction):
    return sorted(points, key=lambda t: (t - start) % 1)


def _hull_start(points) -> Fraction:
    """Counterclockwise start of the shortest arc containing ``points``."""
    pts = sorted(points)
    n = len(pts)
    if n == 1:
        return pts[0]
    best = max(range(n), key=lambda i: (pts[(i + 1) % n] - pts[i]) % 1)
    return pts[(best + 1) % n]


def _hull_end(points) -> Fraction:
    return _arc_order(points, _hull_start(points))[-1]


def separating_diameter(r: RotationNumber) -> Fraction:
    """Angle d such that the diameter {d, d + 1/2} separates the orbit from its antipodes."""
    omega = sturmian_orbit_angles(r)
    # walk counterclockwise from the end of hull(omega) to the start of hull(omega')
    end = _hull_end(omega)
    start_prime = (_hull_start(omega) + HALF) % 1
    gap = (start_prime - end) % 1
    return (end + gap / 2) % 1


def quotient_generations(r: RotationNumber, depth: int) -> list[list[tuple[Fraction, Fraction]]]:
    """Identified pairs by generation.

    Generation 0 folds the antipodal set omega' in pairs from the outside of
    its short arc inwards. Generation n takes both preimages of every pair of
    generation n-1 and pairs the two preimages lying in the same half of the
    circle cut by the separating diameter.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    r = r.mod1()
    omega_p = [(t + HALF) % 1 for t in sturmian_orbit_angles(r)]
    order = _arc_order(omega_p, _hull_start(omega_p))
    q = len(order)
    gens = [[(order[i], order[q - 1 - i]) for i in range((q + 1) // 2)]]
    d = separating_diameter(r)

    def half(t):
        return 0 if (t - d) % 1 < HALF else 1

    for _ in range(depth):
        nxt = []
        for x, y in gens[-1]:
            xs = {half(t): t for t in (x / 2, x / 2 + HALF)}
            ys = {half(t): t for t in (y / 2, y / 2 + HALF)}
            if len(xs) != 2 or len(ys) != 2:
                raise ValueError("a preimage lies on the separating diameter")
            nxt.extend((xs[h], ys[h]) for h in (0, 1))
        gens.append(nxt)
    return gens


def quotient_pairs(r: RotationNumber, depth: int) -> list[tuple[Fraction, Fraction]]:
    return [pair for gen in quotient_generations(r, depth) for pair in gen]


def chords_cross(c1, c2) -> bool:
    """Whether two chords with distinct endpoints interleave on the circle."""
    a, b = sorted(c1)
    x, y = c2
    if a == b or x == y or len({a, b, x, y}) < 4:
        return False
    return (a < x < b) != (a < y < b)


def reduced_fractions(qmax: int):
    """Every p/q in [0, 1) with q <= qmax, in lowest terms."""
    for q in range(1, qmax + 1):
        for p in range(q):
            if math.gcd(p, q) == 1:
                yield RotationNumber(p, q)
