"""Exact similitudes, boxes and words over rational coordinates."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import logging

_LOGGER = logging.getLogger(__name__)

Word = tuple[int, ...]
Point = tuple[Fraction, ...]


class GeometryError(ValueError):
    """Raised on dimension mismatches, bad symbols or non-contractive maps."""


class InvariantBoxError(GeometryError):
    """Raised when a box is not mapped into itself by every map."""


@dataclass(frozen=True)
class SignedPermutation:
    """Orthogonal part of a similitude: (R x)_i = signs[i] * x[axis_map[i]].

    Axes are 0-based here; configs use 1-based permutations.
    """

    axis_map: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.axis_map) != len(self.signs):
            raise GeometryError("permutation and signs differ in length")
        if sorted(self.axis_map) != list(range(len(self.axis_map))):
            raise GeometryError(f"not a permutation: {self.axis_map}")
        if any(s not in (1, -1) for s in self.signs):
            raise GeometryError(f"signs must be +1 or -1: {self.signs}")

    @classmethod
    def identity(cls, dimension: int) -> SignedPermutation:
        return cls(tuple(range(dimension)), (1,) * dimension)

    @property
    def dimension(self) -> int:
        return len(self.axis_map)

    @property
    def is_identity(self) -> bool:
        return self.axis_map == tuple(range(self.dimension)) and all(s == 1 for s in self.signs)

    def apply(self, point: Point) -> Point:
        return tuple(s * point[j] for j, s in zip(self.axis_map, self.signs))

    def compose(self, other: SignedPermutation) -> SignedPermutation:
        """Return self after other."""
        return SignedPermutation(
            tuple(other.axis_map[j] for j in self.axis_map),
            tuple(s * other.signs[j] for j, s in zip(self.axis_map, self.signs)),
        )

    def inverse(self) -> SignedPermutation:
        back = [0] * self.dimension
        for i, j in enumerate(self.axis_map):
            back[j] = i
        return SignedPermutation(tuple(back), tuple(self.signs[i] for i in back))


@dataclass(frozen=True)
class Similitude:
    """x -> ratio * orth(x) + trans, with exact rational data."""

    ratio: Fraction
    orth: SignedPermutation
    trans: Point

    def __post_init__(self):
        if self.ratio <= 0:
            raise GeometryError(f"ratio must be positive, got {self.ratio}")
        if len(self.trans) != self.orth.dimension:
            raise GeometryError("translation and orthogonal part differ in dimension")

    @classmethod
    def identity(cls, dimension: int) -> Similitude:
        return cls(Fraction(1), SignedPermutation.identity(dimension), (Fraction(0),) * dimension)

    @property
    def dimension(self) -> int:
        return len(self.trans)

    @property
    def is_contractive(self) -> bool:
        return self.ratio < 1

    @property
    def key(self) -> tuple:
        """Totally ordered key; equal keys mean equal maps."""
        return (self.ratio, self.orth.axis_map, self.orth.signs, self.trans)

    def __call__(self, point: Point) -> Point:
        if len(point) != self.dimension:
            raise GeometryError("point has wrong dimension")
        rotated = self.orth.apply(point)
        return tuple(self.ratio * x + b for x, b in zip(rotated, self.trans))


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned box."""

    lo: Point
    hi: Point

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise GeometryError("box corners differ in dimension")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise GeometryError("box has lo > hi on some axis")

    @property
    def dimension(self) -> int:
        return len(self.lo)

    def contains(self, other: Box) -> bool:
        return all(a <= c and d <= b for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))


@dataclass(frozen=True)
class IFS:
    dimension: int
    maps: tuple[Similitude, ...]

    def __post_init__(self):
        if self.dimension < 1:
            raise GeometryError("dimension must be at least 1")
        if len(self.maps) < 2:
            raise GeometryError("an IFS needs at least two maps")
        for i, f in enumerate(self.maps, start=1):
            if f.dimension != self.dimension:
                raise GeometryError(f"map {i} has dimension {f.dimension}, expected {self.dimension}")
            if not f.is_contractive:
                raise GeometryError(f"map {i} is not contractive (ratio {f.ratio})")

    @property
    def size(self) -> int:
        return len(self.maps)

    @property
    def ratios(self) -> tuple[Fraction, ...]:
        return tuple(f.ratio for f in self.maps)

    @property
    def max_ratio(self) -> Fraction:
        return max(self.ratios)

    @property
    def is_homogeneous(self) -> bool:
        return len(set(self.ratios)) == 1

    def map(self, symbol: int) -> Similitude:
        if not 1 <= symbol <= self.size:
            raise GeometryError(f"symbol {symbol} outside 1..{self.size}")
        return self.maps[symbol - 1]


def compose(f: Similitude, g: Similitude) -> Similitude:
    """Return f after g."""
    if f.dimension != g.dimension:
        raise GeometryError("cannot compose maps of different dimension")
    rotated = f.orth.apply(g.trans)
    return Similitude(
        f.ratio * g.ratio,
        f.orth.compose(g.orth),
        tuple(f.ratio * x + b for x, b in zip(rotated, f.trans)),
    )


def inverse(f: Similitude) -> Similitude:
    """The inverse similitude, ratio 1/r."""
    back = f.orth.inverse()
    ratio = 1 / f.ratio
    shifted = back.apply(f.trans)
    return Similitude(ratio, back, tuple(-ratio * x for x in shifted))


def relative_map(f: Similitude, g: Similitude) -> Similitude:
    """f^-1 after g; the position of g seen from f."""
    return compose(inverse(f), g)


def word_map(ifs: IFS, word: Word) -> Similitude:
    """f_{w1} after ... after f_{wn}; the empty word gives the identity."""
    result = Similitude.identity(ifs.dimension)
    for symbol in word:
        result = compose(result, ifs.map(symbol))
    return result


def map_equal(f: Similitude, g: Similitude) -> bool:
    """Exact equality of two maps."""
    return f.key == g.key


def image_box(f: Similitude, box: Box) -> Box:
    """Exact image of a box; f(box) is again a box since the orth part permutes axes."""
    if box.dimension != f.dimension:
        raise GeometryError("box and map differ in dimension")
    # the images of the two corners are again opposite corners
    a, b = f(box.lo), f(box.hi)
    return Box(tuple(map(min, a, b)), tuple(map(max, a, b)))


def boxes_disjoint(a: Box, b: Box) -> bool:
    """Closed boxes: touching counts as intersecting."""
    if a.dimension != b.dimension:
        raise GeometryError("boxes differ in dimension")
    return any(a.hi[i] < b.lo[i] or b.hi[i] < a.lo[i] for i in range(a.dimension))


def intersecting_pairs(boxes: list[Box]) -> list[tuple[int, int]]:
    """Index pairs (i < j) of intersecting boxes, sorted.

    Sweep along the first axis, exact test on the rest.
    """
    order = sorted(range(len(boxes)), key=lambda i: boxes[i].lo[0])
    active: list[int] = []
    pairs = []
    for i in order:
        start = boxes[i].lo[0]
        active = [a for a in active if boxes[a].hi[0] >= start]
        for a in active:
            if not boxes_disjoint(boxes[a], boxes[i]):
                pairs.append((min(a, i), max(a, i)))
        active.append(i)
    pairs.sort()
    return pairs


def validate_invariant_box(ifs: IFS, box: Box) -> bool:
    """True iff every map sends the box into itself, decided exactly."""
    if box.dimension != ifs.dimension:
        raise GeometryError(f"box has dimension {box.dimension}, expected {ifs.dimension}")
    return all(box.contains(image_box(f, box)) for f in ifs.maps)


def require_invariant_box(ifs: IFS, box: Box) -> None:
    if box.dimension != ifs.dimension:
        raise InvariantBoxError(f"box has dimension {box.dimension}, expected {ifs.dimension}")
    for i, f in enumerate(ifs.maps, start=1):
        if not box.contains(image_box(f, box)):
            raise InvariantBoxError(f"map {i} does not send the box into itself")


def suggest_invariant_box(ifs: IFS) -> Box:
    """Smallest box spanned by the fixed points; invariant when every orth part is the identity."""
    if not all(f.orth.is_identity for f in ifs.maps):
        raise InvariantBoxError("cannot suggest a box when orthogonal parts are not the identity")
    fixed = [tuple(b / (1 - f.ratio) for b in f.trans) for f in ifs.maps]
    lo = tuple(min(p[j] for p in fixed) for j in range(ifs.dimension))
    hi = tuple(max(p[j] for p in fixed) for j in range(ifs.dimension))
    box = Box(lo, hi)
    _LOGGER.debug("Suggested invariant box %s", box)
    return box
