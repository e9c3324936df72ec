"""Level-by-level construction of the disjoint survivor set Gamma."""

from __future__ import annotations

from dataclasses import dataclass
from collections import deque
from itertools import combinations, pairwise
import logging

from .const import DEFAULT_FRONTIER_BUDGET, DEFAULT_SHADOW_REACH
from .geometry import (
    IFS,
    Box,
    Similitude,
    Word,
    compose,
    image_box,
    intersecting_pairs,
    require_invariant_box,
)
from .ratutil import format_word

_LOGGER = logging.getLogger(__name__)

Entry = tuple[Word, Similitude]


@dataclass(frozen=True)
class Level:
    """One level of the construction.

    S holds the words whose cylinder meets nothing else at this level, T the
    survivors that are expanded further. pruned holds exact twins (two words with
    the same map); shadow holds one representative per map for the twins and the
    children of the previous blockers. blockers is the part of the shadow that is
    expanded along with T so that descendants of pruned twins still block.
    """

    k: int
    S: tuple[Entry, ...]
    T: tuple[Entry, ...]
    pruned: tuple[Entry, ...] = ()
    shadow: tuple[Entry, ...] = ()
    blockers: tuple[Entry, ...] = ()

    @property
    def frontier_size(self) -> int:
        return len(self.T) + len(self.blockers)


@dataclass(frozen=True)
class OverlapPair:
    u: Word
    v: Word

    @property
    def length(self) -> int:
        return max(len(self.u), len(self.v))


@dataclass(frozen=True)
class GammaTruncation:
    ifs: IFS
    box: Box
    levels: tuple[Level, ...]
    truncated_by_budget: bool = False
    prune_twins: bool = True

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def gamma_words(self) -> list[Entry]:
        return [entry for level in self.levels for entry in level.S]

    @property
    def s_counts(self) -> list[int]:
        return [len(level.S) for level in self.levels]

    @property
    def t_counts(self) -> list[int]:
        return [len(level.T) for level in self.levels]


class GammaEnumerator:
    """Builds S_k and T_k for an IFS inside an invariant box."""

    def __init__(
        self,
        ifs: IFS,
        box: Box,
        prune_twins: bool = True,
        frontier_budget: int = DEFAULT_FRONTIER_BUDGET,
        reach: int = DEFAULT_SHADOW_REACH,
    ) -> None:
        require_invariant_box(ifs, box)
        self.ifs = ifs
        self.box = box
        self.prune_twins = prune_twins
        self.frontier_budget = frontier_budget
        self.reach = reach

    def initial_level(self) -> Level:
        candidates = [((j,), f) for j, f in enumerate(self.ifs.maps, start=1)]
        return self._classify(1, candidates, [])

    def next_level(self, prev: Level) -> Level:
        candidates = self._children(prev.T)
        blockers = self._children(prev.blockers) if self.prune_twins else []
        return self._classify(prev.k + 1, candidates, blockers)

    def enumerate(self, depth: int, cache=None) -> GammaTruncation:
        """Run levels 1..depth, replaying from and appending to the cache when given."""
        if depth < 1:
            raise ValueError("depth must be at least 1")
        levels: list[Level] = []
        if cache is not None:
            levels = cache.load(self, depth)
            if levels:
                _LOGGER.info("[enumerate] Replayed %d level(s) from %s", len(levels), cache.path)
        if not levels:
            levels.append(self.initial_level())
            if cache is not None:
                cache.append(levels[-1])
        truncated = False
        while len(levels) < depth:
            last = levels[-1]
            if last.frontier_size * self.ifs.size > self.frontier_budget:
                _LOGGER.warning(
                    "[enumerate] Frontier of %d word(s) at level %d exceeds the budget of %d; stopping",
                    last.frontier_size,
                    last.k,
                    self.frontier_budget,
                )
                truncated = True
                break
            level = self.next_level(last)
            levels.append(level)
            if cache is not None:
                cache.append(level)
        for level in levels:
            _LOGGER.debug(
                "[enumerate] k=%d |S|=%d |T|=%d pruned=%d blockers=%d",
                level.k,
                len(level.S),
                len(level.T),
                len(level.pruned),
                len(level.blockers),
            )
        return GammaTruncation(
            self.ifs, self.box, tuple(levels[:depth]), truncated, self.prune_twins
        )

    def _children(self, entries) -> list[Entry]:
        maps = self.ifs.maps
        return [
            (word + (j,), compose(g, f))
            for word, g in entries
            for j, f in enumerate(maps, start=1)
        ]

    def _classify(self, k: int, candidates: list[Entry], blockers: list[Entry]) -> Level:
        items = candidates + blockers
        boxes = [image_box(g, self.box) for _, g in items]
        pairs = intersecting_pairs(boxes)
        touching = [False] * len(items)
        neighbours: list[list[int]] = [[] for _ in items]
        for i, j in pairs:
            touching[i] = touching[j] = True
            neighbours[i].append(j)
            neighbours[j].append(i)

        by_map: dict[Similitude, list[int]] = {}
        for idx, (_, g) in enumerate(items):
            by_map.setdefault(g, []).append(idx)

        S, T, pruned = [], [], []
        t_index, pruned_index = [], []
        for idx in range(len(candidates)):
            entry = items[idx]
            if len(by_map[entry[1]]) > 1:
                if self.prune_twins:
                    pruned.append(entry)
                    pruned_index.append(idx)
                else:
                    T.append(entry)
                    t_index.append(idx)
            elif touching[idx]:
                T.append(entry)
                t_index.append(idx)
            else:
                S.append(entry)

        shadow: list[Entry] = []
        kept: list[Entry] = []
        if self.prune_twins:
            # one representative per map, the lexicographically smallest word
            reps: dict[Similitude, int] = {}
            for idx in sorted(pruned_index + list(range(len(candidates), len(items))), key=lambda i: items[i][0]):
                reps.setdefault(items[idx][1], idx)
            shadow_index = sorted(reps.values(), key=lambda i: items[i][0])
            shadow = [items[i] for i in shadow_index]
            near = self._within_reach(t_index, set(shadow_index), neighbours)
            kept = [items[i] for i in shadow_index if i in near]

        return Level(k, tuple(S), tuple(T), tuple(pruned), tuple(shadow), tuple(kept))

    def _within_reach(self, sources: list[int], allowed: set[int], neighbours) -> set[int]:
        """Shadow indices within reach hops of a T-word through T and shadow words."""
        nodes = allowed | set(sources)
        dist = {i: 0 for i in sources}
        queue = deque(sources)
        while queue:
            i = queue.popleft()
            if dist[i] == self.reach:
                continue
            for j in neighbours[i]:
                if j in nodes and j not in dist:
                    dist[j] = dist[i] + 1
                    queue.append(j)
        return {i for i in dist if i in allowed}


def enumerate_gamma(ifs: IFS, box: Box, depth: int, prune_twins: bool = True, **kwargs) -> GammaTruncation:
    """Levels 1..depth of Gamma without a cache."""
    return GammaEnumerator(ifs, box, prune_twins=prune_twins, **kwargs).enumerate(depth)


def detect_overlaps(ifs: IFS, depth: int) -> list[OverlapPair]:
    """Pairs of distinct words of length <= depth with equal maps.

    Only pairs whose first symbols differ and whose last symbols differ are
    reported, shortest first.
    """
    groups: dict[Similitude, list[Word]] = {}
    layer: list[Entry] = [((), Similitude.identity(ifs.dimension))]
    for _ in range(depth):
        layer = [
            (word + (j,), compose(g, f))
            for word, g in layer
            for j, f in enumerate(ifs.maps, start=1)
        ]
        for word, g in layer:
            groups.setdefault(g, []).append(word)
    pairs = []
    for words in groups.values():
        if len(words) < 2:
            continue
        for u, v in combinations(sorted(words, key=lambda w: (len(w), w)), 2):
            if u[0] != v[0] and u[-1] != v[-1]:
                pairs.append(OverlapPair(u, v))
    pairs.sort(key=lambda p: (p.length, len(p.u), p.u, p.v))
    if pairs:
        _LOGGER.info(
            "[detect_overlaps] %d exact overlap(s) up to depth %d, first %s = %s",
            len(pairs),
            depth,
            format_word(pairs[0].u, ifs.size),
            format_word(pairs[0].v, ifs.size),
        )
    return pairs


def survivor_cover_counts(trunc: GammaTruncation, mode: str = "prune-all") -> list[int]:
    """N_k, the number of level-k cylinders covering the non-Gamma part."""
    if mode == "prune-all":
        return [len(level.T) for level in trunc.levels]
    if mode == "dedup-one":
        return [len({g for _, g in level.T + level.pruned}) for level in trunc.levels]
    raise ValueError(f"unknown counting mode {mode!r}")


def prefix_free_check(trunc: GammaTruncation) -> bool:
    """Check that Gamma is prefix-free and that its cylinders are pairwise disjoint.

    Each S-word is also checked against every other word of its own level.
    """
    gamma = trunc.gamma_words
    words = sorted(word for word, _ in gamma)
    for a, b in pairwise(words):
        if b[: len(a)] == a:
            _LOGGER.warning("[prefix_free_check] %s is a prefix of %s", a, b)
            return False
    if intersecting_pairs([image_box(g, trunc.box) for _, g in gamma]):
        _LOGGER.warning("[prefix_free_check] Gamma cylinders intersect")
        return False
    for level in trunc.levels:
        items = list(level.S) + list(level.T) + list(level.pruned) + list(level.blockers)
        n_s = len(level.S)
        for i, j in intersecting_pairs([image_box(g, trunc.box) for _, g in items]):
            if i < n_s:
                _LOGGER.warning("[prefix_free_check] S-word %s meets %s at level %d", items[i][0], items[j][0], level.k)
                return False
    return True
