"""Strong types for the config document and the analysis report."""

try:
    from typing import NotRequired, TypedDict
except ImportError:  # Python < 3.11
    from typing_extensions import NotRequired, TypedDict


class OrthData(TypedDict):
    """1-based axis permutation and per-axis signs."""

    perm: list[int]
    signs: list[int]


class MapData(TypedDict):
    """Rationals are strings such as "9/17"."""

    ratio: str
    orth: NotRequired[OrthData]
    translation: list[str]


class BoxData(TypedDict):
    """Closed box as lower and upper corners."""

    lo: list[str]
    hi: list[str]


class ConfigData(TypedDict):
    """The config document; the report echoes it without workers."""

    dimension: int
    maps: list[MapData]
    invariant_box: NotRequired[BoxData]
    depth: int
    prune_twins: bool
    tolerance: float
    frontier_budget: int
    overlap_depth: int
    automaton_depth: int
    spectral_iterations: int
    slack: float
    refine_rounds: int
    workers: NotRequired[int]


class LevelRow(TypedDict):
    """Counts for one level of the construction."""

    k: int
    S: int
    T: int
    pruned: int
    N_dedup: int
    S_words: list[str]


class OverlapData(TypedDict):
    u: str
    v: str


class TypeData(TypedDict):
    representative: str
    first_seen: int
    neighbours: int


class BoundsData(TypedDict):
    lower: float
    upper: float


class AutomatonData(TypedDict):
    closed: bool
    depth_reached: int
    base_depth: int
    types: list[TypeData]
    matrix: list[list[int]]
    emission: list[int]
    pruned_children: list[int]
    base_counts: list[int]
    preperiodic_S: list[int]
    spectral_radius: BoundsData | None


class SExactData(TypedDict):
    value: float
    tolerance: float
    x: float


class BracketData(TypedDict):
    lower: float
    upper: float
    method: str


class OscData(TypedDict):
    overlaps: list[OverlapData]
    automaton_closed: bool
    osc: bool | None
    conclusion: str
    similarity_dim: float
    s_best: float | None
    gap: float | None


class DimensionData(TypedDict):
    similarity_dim: float
    s_lower_by_depth: list[list[float]]
    s_exact: SExactData | None
    dV_upper: float | None
    bracket: BracketData
    verdict: str
    verdict_text: str
    osc_evidence: OscData


class AnalysisReport(TypedDict):
    version: int
    status: str
    config: ConfigData
    invariant_box: BoxData
    levels: list[LevelRow]
    gamma_prefix_free: bool
    overlaps: list[OverlapData]
    automaton: AutomatonData | None
    dimension: DimensionData
    warnings: list[str]
    timings: NotRequired[dict[str, float]]


class CheckRow(TypedDict):
    """One assertion of a built-in verification."""

    check: str
    expected: str
    actual: str
    passed: bool
