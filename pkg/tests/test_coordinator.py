import dataclasses
from fractions import Fraction
import json

import pytest

from univoque.config_flow import config_from_dict
from univoque.coordinator import AnalysisCoordinator, BudgetAbortError, run_analysis
from univoque.geometry import Box, InvariantBoxError
from univoque.report import emit_report
from univoque.solver import Verdict


@pytest.fixture(scope="module")
def ex4_report(ex4_cfg):
    return run_analysis(ex4_cfg)


def test_ex4_report(ex4_report):
    assert ex4_report["status"] == "complete"
    assert ex4_report["gamma_prefix_free"] is True
    assert [row["S"] for row in ex4_report["levels"]][:6] == [1, 1, 2, 4, 9, 21]
    assert ex4_report["levels"][0] == {"k": 1, "S": 1, "T": 2, "pruned": 0, "N_dedup": 2, "S_words": ["1"]}
    assert {"u": "232", "v": "311"} in ex4_report["overlaps"]
    aut = ex4_report["automaton"]
    assert aut["closed"] and len(aut["types"]) == 5
    lower, upper = aut["spectral_radius"]["lower"], aut["spectral_radius"]["upper"]
    assert lower <= upper
    assert abs((lower + upper) / 2 - 2.2775) <= 5e-4
    dim = ex4_report["dimension"]
    assert dim["verdict"] == Verdict.EQUALITY_CERTIFIED.value
    assert dim["dV_upper"] <= dim["s_exact"]["value"]
    assert dim["osc_evidence"]["osc"] is False
    assert "timings" not in ex4_report


def test_json_is_deterministic(ex4_cfg, ex4_report):
    text = emit_report(ex4_report)
    assert text == emit_report(run_analysis(ex4_cfg))
    assert json.loads(text)["version"] == 1


def test_json_ignores_workers(ex4_cfg, ex4_report, cantor_cfg):
    assert emit_report(run_analysis(dataclasses.replace(ex4_cfg, workers=4))) == emit_report(ex4_report)
    assert emit_report(run_analysis(dataclasses.replace(cantor_cfg, workers=3))) == emit_report(run_analysis(cantor_cfg))
    assert "workers" not in ex4_report["config"]


def test_empty_gamma_is_inconclusive():
    halves = config_from_dict(
        {
            "dimension": 1,
            "maps": [
                {"ratio": "1/2", "translation": ["0"]},
                {"ratio": "1/2", "translation": ["1/2"]},
            ],
            "invariant_box": {"lo": ["0"], "hi": ["1"]},
            "depth": 8,
        }
    )
    coordinator = AnalysisCoordinator(halves)
    report = coordinator.run()
    assert [row["S"] for row in report["levels"]] == [0] * 8
    assert any("empty" in w for w in report["warnings"])
    assert coordinator.dimension.s_lower_by_depth == ()
    assert coordinator.dimension.dV_upper is not None
    assert report["dimension"]["verdict"] == Verdict.INCONCLUSIVE.value
    assert coordinator.dimension.bracket.lower == 0.0
    assert coordinator.dimension.bracket.upper <= 1.0


def test_cantor_certified(cantor_cfg):
    coordinator = AnalysisCoordinator(dataclasses.replace(cantor_cfg, invariant_box=None))
    report = coordinator.run()
    assert report["invariant_box"] == {"lo": ["0"], "hi": ["1"]}
    assert coordinator.automaton.size == 0
    assert coordinator.dimension.verdict is Verdict.EQUALITY_CERTIFIED
    assert report["dimension"]["s_exact"]["value"] == pytest.approx(0.63093, abs=1e-5)
    assert report["dimension"]["dV_upper"] == 0.0
    assert report["dimension"]["osc_evidence"]["osc"] is True
    assert report["overlaps"] == []


def test_partial_run(ex4_cfg):
    report = run_analysis(dataclasses.replace(ex4_cfg, frontier_budget=10), include_timings=True)
    assert report["status"] == "partial"
    assert len(report["levels"]) == 2
    assert report["dimension"]["verdict"] == Verdict.INCONCLUSIVE.value
    assert report["dimension"]["s_exact"] is None
    assert any("budget" in w for w in report["warnings"])
    assert "enumerate" in report["timings"]


def test_aborts(ex1_cfg, ex4_cfg):
    with pytest.raises(BudgetAbortError):
        run_analysis(dataclasses.replace(ex4_cfg, frontier_budget=2))
    with pytest.raises(InvariantBoxError):
        run_analysis(dataclasses.replace(ex1_cfg, invariant_box=Box((Fraction(0),), (Fraction(1),))))


def test_cached_run_matches(tmp_path, ex4_cfg, ex4_report):
    cfg = dataclasses.replace(ex4_cfg, depth=6)
    path = tmp_path / "ex4.jsonl"
    first = run_analysis(cfg, cache_path=path)
    second = run_analysis(cfg, cache_path=path)
    assert first == second
    assert first["levels"] == ex4_report["levels"][:6]
    assert path.exists()
