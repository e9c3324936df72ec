"""Config parsing and validation for an analysis run."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import hashlib
import json
import logging

import voluptuous as vol

from .apitypes import ConfigData
from .const import (
    DEFAULT_AUTOMATON_DEPTH,
    DEFAULT_DEPTH,
    DEFAULT_FRONTIER_BUDGET,
    DEFAULT_OVERLAP_DEPTH,
    DEFAULT_REFINE_ROUNDS,
    DEFAULT_SLACK,
    DEFAULT_SPECTRAL_ITERATIONS,
    DEFAULT_TOLERANCE,
    DEFAULT_WORKERS,
)
from .geometry import IFS, Box, SignedPermutation, Similitude
from .ratutil import format_rational, parse_rational

_LOGGER = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Carries every field-level problem found in a config document."""

    def __init__(self, errors: list[str]) -> None:
        super().__init__("; ".join(errors))
        self.errors = list(errors)


def _rational(value):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise vol.Invalid("expected a rational string such as \"1/4\"")
    try:
        return parse_rational(str(value))
    except ValueError as err:
        raise vol.Invalid(str(err)) from err


_positive_int = vol.All(int, vol.Range(min=1))

ORTH_SCHEMA = vol.Schema(
    {
        vol.Required("perm"): [int],
        vol.Required("signs"): [vol.In([1, -1])],
    }
)

MAP_SCHEMA = vol.Schema(
    {
        vol.Required("ratio"): _rational,
        vol.Optional("orth"): ORTH_SCHEMA,
        vol.Required("translation"): [_rational],
    }
)

BOX_SCHEMA = vol.Schema(
    {
        vol.Required("lo"): [_rational],
        vol.Required("hi"): [_rational],
    }
)

CONFIG_SCHEMA = vol.Schema(
    {
        vol.Required("dimension"): _positive_int,
        vol.Required("maps"): vol.All([MAP_SCHEMA], vol.Length(min=2)),
        vol.Optional("invariant_box"): BOX_SCHEMA,
        vol.Optional("depth", default=DEFAULT_DEPTH): _positive_int,
        vol.Optional("prune_twins", default=True): bool,
        vol.Optional("tolerance", default=DEFAULT_TOLERANCE): vol.All(
            vol.Coerce(float), vol.Range(min=0, min_included=False)
        ),
        vol.Optional("frontier_budget", default=DEFAULT_FRONTIER_BUDGET): _positive_int,
        vol.Optional("overlap_depth", default=DEFAULT_OVERLAP_DEPTH): _positive_int,
        vol.Optional("automaton_depth", default=DEFAULT_AUTOMATON_DEPTH): vol.All(int, vol.Range(min=2)),
        vol.Optional("spectral_iterations", default=DEFAULT_SPECTRAL_ITERATIONS): _positive_int,
        vol.Optional("slack", default=DEFAULT_SLACK): vol.All(vol.Coerce(float), vol.Range(min=0)),
        vol.Optional("refine_rounds", default=DEFAULT_REFINE_ROUNDS): vol.All(int, vol.Range(min=0)),
        vol.Optional("workers", default=DEFAULT_WORKERS): _positive_int,
    }
)


@dataclass(frozen=True)
class AnalysisConfig:
    ifs: IFS
    invariant_box: Box | None = None
    depth: int = DEFAULT_DEPTH
    prune_twins: bool = True
    tolerance: float = DEFAULT_TOLERANCE
    frontier_budget: int = DEFAULT_FRONTIER_BUDGET
    overlap_depth: int = DEFAULT_OVERLAP_DEPTH
    automaton_depth: int = DEFAULT_AUTOMATON_DEPTH
    spectral_iterations: int = DEFAULT_SPECTRAL_ITERATIONS
    slack: float = DEFAULT_SLACK
    refine_rounds: int = DEFAULT_REFINE_ROUNDS
    workers: int = DEFAULT_WORKERS


def _path(path) -> str:
    return ".".join(str(p) for p in path) or "<root>"


def _build_map(i: int, data: dict, dimension: int, errors: list[str]) -> Similitude | None:
    where = f"maps.{i}"
    ratio: Fraction = data["ratio"]
    ok = True
    if not 0 < ratio < 1:
        errors.append(f"{where}.ratio: ratio not in (0,1)")
        ok = False
    if len(data["translation"]) != dimension:
        errors.append(
            f"{where}.translation: dimension mismatch ({len(data['translation'])} entries, expected {dimension})"
        )
        ok = False
    orth = SignedPermutation.identity(dimension)
    if "orth" in data:
        perm, signs = data["orth"]["perm"], data["orth"]["signs"]
        if sorted(perm) != list(range(1, dimension + 1)) or len(signs) != dimension:
            errors.append(f"{where}.orth: bad permutation {perm} with signs {signs}")
            ok = False
        else:
            orth = SignedPermutation(tuple(p - 1 for p in perm), tuple(signs))
    if not ok:
        return None
    return Similitude(ratio, orth, tuple(data["translation"]))


def config_from_dict(data: dict) -> AnalysisConfig:
    try:
        data = CONFIG_SCHEMA(data)
    except vol.MultipleInvalid as err:
        raise ConfigError([f"{_path(e.path)}: {e.msg}" for e in err.errors]) from err

    dimension = data["dimension"]
    errors: list[str] = []
    maps = [_build_map(i, m, dimension, errors) for i, m in enumerate(data["maps"])]
    box = None
    if "invariant_box" in data:
        lo, hi = data["invariant_box"]["lo"], data["invariant_box"]["hi"]
        if len(lo) != dimension or len(hi) != dimension:
            errors.append("invariant_box: dimension mismatch")
        elif any(a > b for a, b in zip(lo, hi)):
            errors.append("invariant_box: lo exceeds hi")
        else:
            box = Box(tuple(lo), tuple(hi))
    if errors:
        raise ConfigError(errors)

    return AnalysisConfig(
        ifs=IFS(dimension, tuple(maps)),
        invariant_box=box,
        depth=data["depth"],
        prune_twins=data["prune_twins"],
        tolerance=data["tolerance"],
        frontier_budget=data["frontier_budget"],
        overlap_depth=data["overlap_depth"],
        automaton_depth=data["automaton_depth"],
        spectral_iterations=data["spectral_iterations"],
        slack=data["slack"],
        refine_rounds=data["refine_rounds"],
        workers=data["workers"],
    )


def parse_config(text: str) -> AnalysisConfig:
    """Parse a JSON config document; raises ConfigError listing every problem."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError([f"<root>: not valid JSON ({err.msg} at line {err.lineno})"]) from err
    if not isinstance(data, dict):
        raise ConfigError(["<root>: expected an object"])
    cfg = config_from_dict(data)
    _LOGGER.debug("[parse_config] %d map(s) in dimension %d", cfg.ifs.size, cfg.ifs.dimension)
    return cfg


def config_to_dict(cfg: AnalysisConfig) -> ConfigData:
    """The config document for cfg; rationals are written as strings."""
    maps = []
    for f in cfg.ifs.maps:
        entry = {"ratio": format_rational(f.ratio)}
        if not f.orth.is_identity:
            entry["orth"] = {"perm": [j + 1 for j in f.orth.axis_map], "signs": list(f.orth.signs)}
        entry["translation"] = [format_rational(b) for b in f.trans]
        maps.append(entry)
    data = {"dimension": cfg.ifs.dimension, "maps": maps}
    if cfg.invariant_box is not None:
        data["invariant_box"] = {
            "lo": [format_rational(x) for x in cfg.invariant_box.lo],
            "hi": [format_rational(x) for x in cfg.invariant_box.hi],
        }
    data.update(
        depth=cfg.depth,
        prune_twins=cfg.prune_twins,
        tolerance=cfg.tolerance,
        frontier_budget=cfg.frontier_budget,
        overlap_depth=cfg.overlap_depth,
        automaton_depth=cfg.automaton_depth,
        spectral_iterations=cfg.spectral_iterations,
        slack=cfg.slack,
        refine_rounds=cfg.refine_rounds,
        workers=cfg.workers,
    )
    return data


def dump_config(cfg: AnalysisConfig) -> str:
    """Serialize cfg so that parse_config reads it back unchanged."""
    return json.dumps(config_to_dict(cfg), indent=2)


def config_hash(cfg: AnalysisConfig, box: Box | None = None) -> str:
    """Digest of everything that determines the level sequence."""
    data = config_to_dict(cfg)
    box = box or cfg.invariant_box
    payload = {
        "dimension": data["dimension"],
        "maps": data["maps"],
        "box": [[format_rational(x) for x in box.lo], [format_rational(x) for x in box.hi]] if box else None,
        "prune_twins": cfg.prune_twins,
        "reach": cfg.refine_rounds + 1,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()
