"""Neighbour types, transfer matrix and growth bounds of the survivor frontier."""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
import logging
import math

import numpy as np

from .GammaEnumerator import Entry, GammaEnumerator, Level
from .const import (
    DEFAULT_FRONTIER_BUDGET,
    DEFAULT_REFINE_ROUNDS,
    DEFAULT_SPECTRAL_ITERATIONS,
    DEFAULT_WORKERS,
)
from .geometry import IFS, Box, GeometryError, Similitude, Word, image_box, intersecting_pairs, relative_map
from .ratutil import format_word

_LOGGER = logging.getLogger(__name__)


class AutomatonNotClosedError(ValueError):
    """Raised when counts or growth are requested from an automaton that did not close."""


@dataclass(frozen=True)
class NeighborType:
    """A frontier word's view of its intersecting neighbours.

    fingerprint is the sorted set of relative maps g_u^-1 g_v over neighbours v;
    key additionally carries the neighbours' own keys, refined a fixed number of rounds.
    """

    fingerprint: tuple
    key: tuple
    representative: Word


@dataclass(frozen=True)
class TypeAutomaton:
    types: tuple[NeighborType, ...]
    A: tuple[tuple[int, ...], ...]
    emission: tuple[int, ...]
    pruned_children: tuple[int, ...]
    base_counts: tuple[int, ...]
    base_depth: int
    preperiodic_S: tuple[int, ...]
    closed: bool
    depth_reached: int
    first_seen: tuple[int, ...] = ()
    conflicts: tuple[str, ...] = ()

    @property
    def size(self) -> int:
        return len(self.types)

    def matrix(self) -> np.ndarray:
        return np.array(self.A, dtype=object).reshape(self.size, self.size)


@dataclass(frozen=True)
class _Neighbourhood:
    members: list[Entry]
    index: dict[Similitude, int]
    fingerprints: list[tuple]
    keys: list[tuple]


def _frontier_members(level: Level) -> list[Entry]:
    """One entry per distinct map among T, pruned and shadow words, smallest word first."""
    reps: dict[Similitude, Entry] = {}
    for entry in sorted(level.T + level.pruned + level.shadow, key=lambda e: e[0]):
        reps.setdefault(entry[1], entry)
    return sorted(reps.values(), key=lambda e: e[0])


def _neighbourhood(box: Box, level: Level, refine_rounds: int, workers: int) -> _Neighbourhood:
    members = _frontier_members(level)
    index = {g: i for i, (_, g) in enumerate(members)}
    boxes = [image_box(g, box) for _, g in members]
    relations: list[list[tuple[int, tuple]]] = [[] for _ in members]
    for i, j in intersecting_pairs(boxes):
        gi, gj = members[i][1], members[j][1]
        relations[i].append((j, relative_map(gi, gj).key))
        relations[j].append((i, relative_map(gj, gi).key))

    fingerprints = [tuple(sorted(rel for _, rel in relations[i])) for i in range(len(members))]

    keys: list[tuple] = [()] * len(members)
    for _ in range(refine_rounds + 1):
        prev = keys

        def refine(i, prev=prev):
            return tuple(sorted((rel, prev[j]) for j, rel in relations[i]))

        if workers > 1 and len(members) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                keys = list(pool.map(refine, range(len(members))))
        else:
            keys = [refine(i) for i in range(len(members))]
    return _Neighbourhood(members, index, fingerprints, keys)


def fingerprint(
    ifs: IFS,
    box: Box,
    frontier: Level,
    word: Word,
    refine_rounds: int = DEFAULT_REFINE_ROUNDS,
) -> NeighborType:
    """Neighbour type of a word of the given level.

    S-words meet nothing, so their type is empty.
    """
    if box.dimension != ifs.dimension:
        raise GeometryError("box and IFS differ in dimension")
    if any(w == word for w, _ in frontier.S):
        return NeighborType((), (), word)
    for w, g in frontier.T + frontier.pruned + frontier.shadow:
        if w == word:
            nb = _neighbourhood(box, frontier, refine_rounds, 1)
            i = nb.index[g]
            return NeighborType(nb.fingerprints[i], nb.keys[i], word)
    raise ValueError(f"word {format_word(word, ifs.size)} is not in the level-{frontier.k} frontier")


def _record_profiles(
    m: int,
    level: Level,
    parents: dict[Word, int],
    children: dict[Word, int],
    profiles: dict[int, tuple],
    conflicts: list[str],
) -> None:
    s_words = {w for w, _ in level.S}
    pruned_words = {w for w, _ in level.pruned}
    for parent, t in parents.items():
        emitted = pruned = 0
        kids = []
        for j in range(1, m + 1):
            child = parent + (j,)
            if child in s_words:
                emitted += 1
            elif child in pruned_words:
                pruned += 1
            else:
                kids.append(children[child])
        profile = (emitted, pruned, tuple(sorted(kids)))
        known = profiles.setdefault(t, profile)
        if known != profile:
            conflicts.append(f"type {t} at word {format_word(parent, m)}: {profile} differs from {known}")


def build(
    ifs: IFS,
    box: Box,
    max_depth: int,
    refine_rounds: int = DEFAULT_REFINE_ROUNDS,
    prune_twins: bool = True,
    frontier_budget: int = DEFAULT_FRONTIER_BUDGET,
    workers: int = DEFAULT_WORKERS,
) -> TypeAutomaton:
    """Type the frontier level by level until a level adds no new type."""
    if max_depth < 2:
        raise ValueError("max_depth must be at least 2")
    enumerator = GammaEnumerator(
        ifs, box, prune_twins=prune_twins, frontier_budget=frontier_budget, reach=refine_rounds + 1
    )
    registry: dict[tuple, int] = {}
    types: list[NeighborType] = []
    first_seen: list[int] = []
    profiles: dict[int, tuple] = {}
    conflicts: list[str] = []
    s_counts: list[int] = []
    populations: list[dict[Word, int]] = []
    closed = False

    level = enumerator.initial_level()
    while True:
        s_counts.append(len(level.S))
        nb = _neighbourhood(box, level, refine_rounds, workers)
        assigned: dict[Word, int] = {}
        new = 0
        for word, g in level.T:
            i = nb.index[g]
            t = registry.get(nb.keys[i])
            if t is None:
                t = registry[nb.keys[i]] = len(types)
                types.append(NeighborType(nb.fingerprints[i], nb.keys[i], word))
                first_seen.append(level.k)
                new += 1
            assigned[word] = t
        if populations:
            _record_profiles(ifs.size, level, populations[-1], assigned, profiles, conflicts)
        populations.append(assigned)
        _LOGGER.debug("[build] k=%d types=%d new=%d", level.k, len(types), new)

        if conflicts:
            _LOGGER.warning("[build] Inconsistent child profiles, automaton left open: %s", conflicts[0])
            break
        if level.k >= 2 and new == 0:
            closed = True
            break
        if level.k >= max_depth:
            _LOGGER.warning("[build] No closure within depth %d", max_depth)
            break
        if level.frontier_size * ifs.size > frontier_budget:
            _LOGGER.warning("[build] Frontier budget exhausted at level %d", level.k)
            break
        level = enumerator.next_level(level)

    if closed:
        k0 = level.k - 1
        base = Counter(populations[k0 - 1].values())
        reachable = set(base)
        stack = list(base)
        while stack:
            t = stack.pop()
            for child in profiles.get(t, (0, 0, ()))[2]:
                if child not in reachable:
                    reachable.add(child)
                    stack.append(child)
        missing = [t for t in reachable if t not in profiles]
        if missing:
            _LOGGER.warning("[build] Types %s were never expanded; automaton left open", missing)
            closed = False
    if not closed:
        k0 = level.k
        base = Counter(populations[-1].values())
        reachable = set(range(len(types)))

    order = sorted(reachable)
    pos = {t: n for n, t in enumerate(order)}
    A = [[0] * len(order) for _ in order]
    for t in order:
        for child in profiles.get(t, (0, 0, ()))[2]:
            if child in pos:
                A[pos[child]][pos[t]] += 1

    automaton = TypeAutomaton(
        types=tuple(types[t] for t in order),
        A=tuple(tuple(row) for row in A),
        emission=tuple(profiles.get(t, (0, 0, ()))[0] for t in order),
        pruned_children=tuple(profiles.get(t, (0, 0, ()))[1] for t in order),
        base_counts=tuple(base.get(t, 0) for t in order),
        base_depth=k0,
        preperiodic_S=tuple(s_counts[:k0]),
        closed=closed,
        depth_reached=level.k,
        first_seen=tuple(first_seen[t] for t in order),
        conflicts=tuple(conflicts),
    )
    _LOGGER.debug(
        "[build] closed=%s k0=%d types=%d emission=%s", closed, k0, automaton.size, automaton.emission
    )
    return automaton


def _dot(a, b) -> int:
    return int(sum(x * y for x, y in zip(a, b)))


def counts(aut: TypeAutomaton, n: int) -> tuple[int, tuple[int, ...]]:
    """|S_{n+1}| and the level-n type vector A^(n-k0) base_counts, exactly."""
    if not aut.closed:
        raise AutomatonNotClosedError("automaton did not close; counts are unavailable")
    if n < aut.base_depth:
        raise ValueError(f"n must be at least the base depth {aut.base_depth}")
    A = aut.matrix()
    vector = np.array(aut.base_counts, dtype=object)
    for _ in range(n - aut.base_depth):
        vector = A.dot(vector)
    vector = tuple(int(x) for x in vector)
    return _dot(aut.emission, vector), vector


def s_counts(aut: TypeAutomaton, upto: int) -> list[int]:
    """|S_1| .. |S_upto| from the automaton."""
    if not aut.closed:
        raise AutomatonNotClosedError("automaton did not close; counts are unavailable")
    result = list(aut.preperiodic_S[:upto])
    A = aut.matrix()
    vector = np.array(aut.base_counts, dtype=object)
    while len(result) < upto:
        result.append(_dot(aut.emission, vector))
        vector = A.dot(vector)
    return result


def _round_down(q: Fraction) -> float:
    f = float(q)
    return f if Fraction(f) <= q else math.nextafter(f, -math.inf)


def _round_up(q: Fraction) -> float:
    f = float(q)
    return f if Fraction(f) >= q else math.nextafter(f, math.inf)


def spectral_bounds(A, v0=None, iters: int = DEFAULT_SPECTRAL_ITERATIONS) -> tuple[float, float]:
    """Collatz-Wielandt bounds on the spectral radius of a nonnegative matrix.

    Iterates on A + I, which keeps every vector strictly positive, and subtracts 1.
    Ratios are exact; the float ends are rounded outward.
    """
    B = np.array(A, dtype=object)
    if B.size == 0:
        return 0.0, 0.0
    n = B.shape[0]
    B = B.reshape(n, n)
    if any(x < 0 for x in B.flat):
        raise ValueError("matrix must be nonnegative")
    if all(x == 0 for x in B.flat):
        return 0.0, 0.0
    vector = np.array([1] * n if v0 is None else list(v0), dtype=object)
    if any(x <= 0 for x in vector):
        raise ValueError("start vector must be strictly positive")
    shifted = B + np.identity(n, dtype=int).astype(object)
    lower: Fraction | None = None
    upper: Fraction | None = None
    for _ in range(max(1, iters)):
        image = shifted.dot(vector)
        ratios = [Fraction(image[i]) / Fraction(vector[i]) for i in range(n)]
        lo, hi = min(ratios) - 1, max(ratios) - 1
        lower = lo if lower is None else max(lower, lo)
        upper = hi if upper is None else min(upper, hi)
        vector = image
    return max(0.0, _round_down(lower)), _round_up(upper)


def survivor_growth(aut: TypeAutomaton, iters: int = DEFAULT_SPECTRAL_ITERATIONS) -> tuple[float, float]:
    """Bounds on the exponential growth rate of the prune-all frontier."""
    if not aut.closed:
        raise AutomatonNotClosedError("automaton did not close; use the truncated lower bounds instead")
    return spectral_bounds(aut.A, None, iters)
