"""Runs the full analysis pipeline for one config."""

from __future__ import annotations

from contextlib import nullcontext
import logging
from pathlib import Path
import time

from .GammaEnumerator import GammaEnumerator, GammaTruncation, detect_overlaps, prefix_free_check
from .apitypes import AnalysisReport
from .automaton import TypeAutomaton, build, survivor_growth
from .cache import LevelCache
from .config_flow import AnalysisConfig, config_hash, config_to_dict
from .const import REPORT_VERSION
from .geometry import Box, InvariantBoxError, require_invariant_box, suggest_invariant_box
from .report import automaton_data, box_data, dimension_data, level_rows, overlap_data
from .solver import (
    DimensionReport,
    common_ratio,
    gamma_exact,
    gamma_lower,
    osc_report,
    similarity_dim,
    v_upper,
    verdict,
)

_LOGGER = logging.getLogger(__name__)


class BudgetAbortError(ValueError):
    """Raised when the frontier budget does not even cover the first level."""


class AnalysisCoordinator:
    """Coordinates the stages of an analysis and collects their results.

    Stage failures degrade the report and are listed under warnings; only an
    invalid invariant box or an unusable budget abort the run.
    """

    def __init__(
        self,
        cfg: AnalysisConfig,
        cache_path: Path | str | None = None,
        include_timings: bool = False,
    ) -> None:
        self.cfg = cfg
        self.cache_path = cache_path
        self.include_timings = include_timings
        self.warnings: list[str] = []
        self.timings: dict[str, float] = {}
        self.truncation: GammaTruncation | None = None
        self.overlaps: list = []
        self.automaton: TypeAutomaton | None = None
        self.growth: tuple[float, float] | None = None
        self.dimension: DimensionReport | None = None

    def _timed(self, name: str, func, *args, **kwargs):
        start = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            self.timings[name] = round(time.perf_counter() - start, 6)

    def _warn(self, message: str) -> None:
        _LOGGER.warning("[run] %s", message)
        self.warnings.append(message)

    def invariant_box(self) -> Box:
        ifs = self.cfg.ifs
        if self.cfg.invariant_box is not None:
            require_invariant_box(ifs, self.cfg.invariant_box)
            return self.cfg.invariant_box
        box = suggest_invariant_box(ifs)
        require_invariant_box(ifs, box)
        _LOGGER.info("[run] Using suggested invariant box lo=%s hi=%s", box.lo, box.hi)
        return box

    def enumerate(self, box: Box) -> GammaTruncation:
        cfg = self.cfg
        enumerator = GammaEnumerator(
            cfg.ifs,
            box,
            prune_twins=cfg.prune_twins,
            frontier_budget=cfg.frontier_budget,
            reach=cfg.refine_rounds + 1,
        )
        cache = None
        if self.cache_path is not None:
            digest = config_hash(cfg, box)
            # an empty path selects the per-user cache directory
            path = LevelCache.default_path(digest) if self.cache_path == "" else Path(self.cache_path)
            cache = LevelCache(path, digest, cfg.ifs.size)
        with cache if cache is not None else nullcontext():
            return enumerator.enumerate(cfg.depth, cache)

    def build_automaton(self, box: Box) -> TypeAutomaton | None:
        cfg = self.cfg
        try:
            aut = build(
                cfg.ifs,
                box,
                cfg.automaton_depth,
                refine_rounds=cfg.refine_rounds,
                prune_twins=cfg.prune_twins,
                frontier_budget=cfg.frontier_budget,
                workers=cfg.workers,
            )
        except ValueError as err:
            self._warn(f"automaton build failed: {err}")
            return None
        if not aut.closed:
            self._warn(f"automaton did not close within depth {aut.depth_reached}; no exact s")
        return aut

    def run(self) -> AnalysisReport:
        cfg = self.cfg
        ifs = cfg.ifs
        box = self.invariant_box()
        if cfg.frontier_budget < ifs.size:
            raise BudgetAbortError(f"frontier budget {cfg.frontier_budget} is below the {ifs.size} first-level words")

        _LOGGER.info("[run] Enumerating Gamma to depth %d", cfg.depth)
        trunc = self._timed("enumerate", self.enumerate, box)
        if trunc.truncated_by_budget:
            self._warn(f"frontier budget exceeded; levels stop at {trunc.depth} of {cfg.depth}")
        prefix_free = self._timed("prefix_free_check", prefix_free_check, trunc)
        if not prefix_free:
            self._warn("Gamma truncation failed the prefix-free and disjointness check")

        _LOGGER.info("[run] Searching exact overlaps to depth %d", cfg.overlap_depth)
        overlaps = self._timed("overlaps", detect_overlaps, ifs, cfg.overlap_depth)

        _LOGGER.info("[run] Building type automaton")
        aut = self._timed("automaton", self.build_automaton, box)
        closed = aut is not None and aut.closed
        growth = None
        if closed:
            growth = self._timed("growth", survivor_growth, aut, cfg.spectral_iterations)

        _LOGGER.info("[run] Solving dimension equations")
        sim = self._timed("similarity_dim", similarity_dim, ifs, cfg.tolerance)
        lowers = self._timed("gamma_lower", gamma_lower, trunc, cfg.tolerance)
        if not lowers:
            self._warn(f"Gamma is empty up to depth {trunc.depth}; lower bound 0")
        s_exact = None
        if closed:
            try:
                ratio = common_ratio(ifs)
                s_exact = self._timed(
                    "gamma_exact", gamma_exact, aut, ratio, cfg.tolerance, growth[1] if growth else None
                )
            except ValueError as err:
                self._warn(f"exact solve unavailable: {err}")
        dV = v_upper(growth[1], ifs) if growth is not None else None

        if s_exact is not None:
            s_best = s_exact
        else:
            s_best = lowers[-1][1] if lowers else 0.0
        dimension = DimensionReport(
            similarity_dim=sim,
            s_lower_by_depth=tuple(lowers),
            s_exact=s_exact,
            s_exact_tolerance=cfg.tolerance if s_exact is not None else None,
            dV_upper=dV,
            verdict=verdict(s_best, s_exact is not None, dV, cfg.slack, gamma_empty=not lowers),
            osc_evidence=osc_report(overlaps, closed, sim, s_best, ifs.size),
            ambient_dimension=ifs.dimension,
        )
        self.truncation, self.overlaps, self.automaton = trunc, overlaps, aut
        self.growth, self.dimension = growth, dimension
        _LOGGER.info("[run] Verdict %s (s=%.5f, dV=%s)", dimension.verdict.value, s_best, dV)

        # reports must not depend on the thread count
        config_data = config_to_dict(cfg)
        del config_data["workers"]
        report: AnalysisReport = {
            "version": REPORT_VERSION,
            "status": "partial" if trunc.truncated_by_budget else "complete",
            "config": config_data,
            "invariant_box": box_data(box),
            "levels": level_rows(trunc),
            "gamma_prefix_free": prefix_free,
            "overlaps": overlap_data(overlaps, ifs.size),
            "automaton": automaton_data(aut, growth, ifs.size) if aut is not None else None,
            "dimension": dimension_data(dimension, common_ratio(ifs) if ifs.is_homogeneous else None, ifs.size),
            "warnings": list(self.warnings),
        }
        if self.include_timings:
            report["timings"] = dict(self.timings)
        return report


def run_analysis(
    cfg: AnalysisConfig, cache_path: Path | str | None = None, include_timings: bool = False
) -> AnalysisReport:
    """Run every stage and return the report.

    Raises InvariantBoxError when no valid box is available and BudgetAbortError
    when the budget cannot cover the first level.
    """
    return AnalysisCoordinator(cfg, cache_path, include_timings).run()


__all__ = ["AnalysisCoordinator", "BudgetAbortError", "InvariantBoxError", "run_analysis"]
