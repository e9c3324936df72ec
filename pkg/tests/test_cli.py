import json

from click.testing import CliRunner
import pytest

from univoque.builtin import ex1, ex4
from univoque.cli import main
from univoque.config_flow import dump_config


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def ex4_path(tmp_path):
    path = tmp_path / "ex4.json"
    path.write_text(dump_config(ex4(depth=6)))
    return path


@pytest.fixture
def ex1_path(tmp_path):
    path = tmp_path / "ex1.json"
    path.write_text(dump_config(ex1(depth=6)))
    return path


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def _s_column(text):
    return [line.split(",")[1] for line in text.splitlines() if line[:1].isdigit()]


def test_analyze_json(runner, ex4_path):
    result = runner.invoke(main, ["analyze", str(ex4_path)])
    assert result.exit_code == 0, result.output
    report = json.loads(result.stdout)
    assert [row["S"] for row in report["levels"]] == [1, 1, 2, 4, 9, 21]
    assert report["dimension"]["verdict"] == "EqualityCertified"


def test_analyze_csv_and_depth(runner, ex4_path):
    result = runner.invoke(main, ["analyze", str(ex4_path), "--format", "csv-counts", "--depth", "3"])
    assert result.exit_code == 0, result.output
    assert result.stdout.splitlines() == ["k,S,T,N", "1,1,2,2", "2,1,5,5", "3,2,11,12"]


def test_analyze_no_prune(runner, ex1_path):
    pruned = runner.invoke(main, ["analyze", str(ex1_path), "--format", "csv-counts"])
    full = runner.invoke(main, ["analyze", str(ex1_path), "--format", "csv-counts", "--no-prune"])
    assert pruned.exit_code == full.exit_code == 0
    assert _s_column(pruned.stdout) == _s_column(full.stdout)
    assert len(_s_column(full.stdout)) == 6


def test_analyze_cache(runner, ex4_path, tmp_path):
    cache = tmp_path / "levels.jsonl"
    first = runner.invoke(main, ["analyze", str(ex4_path), f"--cache={cache}"])
    second = runner.invoke(main, ["analyze", str(ex4_path), f"--cache={cache}"])
    assert first.exit_code == second.exit_code == 0
    assert first.stdout == second.stdout
    assert cache.exists()


def test_locked_cache_exit(runner, ex4_path, tmp_path):
    cache = tmp_path / "levels.jsonl"
    lock = tmp_path / "levels.jsonl.lock"
    lock.touch()
    result = runner.invoke(main, ["analyze", str(ex4_path), f"--cache={cache}"])
    assert result.exit_code == 5
    assert result.exception is None or isinstance(result.exception, SystemExit)
    assert lock.exists()


def test_analyze_markdown_has_timings(runner, ex4_path):
    result = runner.invoke(main, ["analyze", str(ex4_path), "--format", "markdown"])
    assert result.exit_code == 0, result.output
    assert "## Timings" in result.stdout


def test_config_error_exit(runner, tmp_path):
    doc = json.loads(dump_config(ex4()))
    doc["maps"][0]["ratio"] = "5/4"
    result = runner.invoke(main, ["analyze", str(_write(tmp_path, "bad.json", doc))])
    assert result.exit_code == 2


def test_invariant_box_exit(runner, tmp_path):
    doc = json.loads(dump_config(ex1()))
    doc["invariant_box"] = {"lo": ["0"], "hi": ["1"]}
    path = _write(tmp_path, "box.json", doc)
    assert runner.invoke(main, ["analyze", str(path)]).exit_code == 3
    assert runner.invoke(main, ["gamma", str(path)]).exit_code == 3


def test_budget_exit(runner, tmp_path):
    doc = json.loads(dump_config(ex4()))
    doc["frontier_budget"] = 2
    result = runner.invoke(main, ["analyze", str(_write(tmp_path, "budget.json", doc))])
    assert result.exit_code == 4


def test_overlaps(runner, ex4_path):
    result = runner.invoke(main, ["overlaps", str(ex4_path), "--depth", "3"])
    assert result.exit_code == 0
    assert "232 311" in result.stdout.splitlines()


def test_gamma(runner, ex1_path):
    result = runner.invoke(main, ["gamma", str(ex1_path), "--depth", "2"])
    assert result.exit_code == 0
    assert result.stdout == "1: 3\n2: 23\n"


def test_verify(runner):
    result = runner.invoke(main, ["verify-paper", "ex3"])
    assert result.exit_code == 0
    assert "ex3: pass" in result.stdout
    assert runner.invoke(main, ["verify-paper", "ex7"]).exit_code == 2
