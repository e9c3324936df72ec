"""Command line interface."""

from __future__ import annotations

import dataclasses
import logging
from pathlib import Path

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .GammaEnumerator import GammaEnumerator, detect_overlaps
from .builtin import verify_builtin
from .cache import CacheLockedError
from .config_flow import AnalysisConfig, ConfigError, parse_config
from .coordinator import BudgetAbortError, run_analysis
from .geometry import InvariantBoxError, suggest_invariant_box
from .ratutil import format_word
from .report import FORMATS, emit_report

_LOGGER = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_BOX = 3
EXIT_BUDGET = 4
EXIT_CACHE = 5

err_console = Console(stderr=True)


def _load(ctx: click.Context, path: Path) -> AnalysisConfig:
    try:
        return parse_config(path.read_text(encoding="utf-8"))
    except ConfigError as err:
        for message in err.errors:
            err_console.print(f"[red]config error[/red] {message}")
        ctx.exit(EXIT_CONFIG)


def _box(ctx: click.Context, cfg: AnalysisConfig):
    try:
        return cfg.invariant_box or suggest_invariant_box(cfg.ifs)
    except InvariantBoxError as err:
        err_console.print(f"[red]invariant box[/red] {err}")
        ctx.exit(EXIT_BOX)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log debug output.")
def main(verbose):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
    )


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--depth", type=click.IntRange(min=1), help="Override the enumeration depth.")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="json", show_default=True)
@click.option(
    "--cache",
    is_flag=False,
    flag_value="",
    default=None,
    metavar="[PATH]",
    help="Resume from a level cache; without PATH the per-user cache directory is used.",
)
@click.option("--no-prune", is_flag=True, help="Expand twin words instead of pruning them.")
@click.option("--timings", is_flag=True, help="Include stage timings in json output.")
@click.pass_context
def analyze(ctx, config, depth, fmt, cache, no_prune, timings):
    """Run the full analysis for CONFIG."""
    cfg = _load(ctx, config)
    if depth is not None:
        cfg = dataclasses.replace(cfg, depth=depth)
    if no_prune:
        cfg = dataclasses.replace(cfg, prune_twins=False)
    try:
        report = run_analysis(cfg, cache_path=cache, include_timings=timings or fmt == "markdown")
    except InvariantBoxError as err:
        err_console.print(f"[red]invariant box[/red] {err}")
        ctx.exit(EXIT_BOX)
    except BudgetAbortError as err:
        err_console.print(f"[red]budget[/red] {err}")
        ctx.exit(EXIT_BUDGET)
    except CacheLockedError as err:
        err_console.print(f"[red]cache[/red] {err}")
        ctx.exit(EXIT_CACHE)
    click.echo(emit_report(report, fmt), nl=False)
    if report["status"] == "partial":
        err_console.print("[yellow]partial result:[/yellow] the frontier budget was exceeded")


@main.command("verify-paper")
@click.argument("name", type=click.Choice(["ex1", "ex2", "ex3", "ex4"]))
@click.pass_context
def verify_example(ctx, name):
    """Check a built-in example against its published numbers."""
    result = verify_builtin(name)
    table = Table(title=f"{name}: {'pass' if result.passed else 'FAIL'}")
    table.add_column("check")
    table.add_column("expected")
    table.add_column("actual")
    table.add_column("")
    for row in result.rows:
        table.add_row(row["check"], row["expected"], row["actual"], "[green]ok[/green]" if row["passed"] else "[red]fail[/red]")
    Console().print(table)
    ctx.exit(0 if result.passed else 1)


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--depth", type=click.IntRange(min=1), help="Longest word length searched.")
@click.pass_context
def overlaps(ctx, config, depth):
    """List exact overlaps f_u = f_v, shortest first."""
    cfg = _load(ctx, config)
    pairs = detect_overlaps(cfg.ifs, depth or cfg.overlap_depth)
    for pair in pairs:
        click.echo(f"{format_word(pair.u, cfg.ifs.size)} {format_word(pair.v, cfg.ifs.size)}")
    if not pairs:
        err_console.print("no exact overlaps found")


@main.command()
@click.argument("config", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--depth", type=click.IntRange(min=1), help="Override the enumeration depth.")
@click.pass_context
def gamma(ctx, config, depth):
    """Print the Gamma words level by level."""
    cfg = _load(ctx, config)
    box = _box(ctx, cfg)
    try:
        enumerator = GammaEnumerator(
            cfg.ifs, box, cfg.prune_twins, cfg.frontier_budget, reach=cfg.refine_rounds + 1
        )
    except InvariantBoxError as err:
        err_console.print(f"[red]invariant box[/red] {err}")
        ctx.exit(EXIT_BOX)
    trunc = enumerator.enumerate(depth or cfg.depth)
    for level in trunc.levels:
        words = " ".join(format_word(w, cfg.ifs.size) for w, _ in level.S)
        click.echo(f"{level.k}: {words}")
