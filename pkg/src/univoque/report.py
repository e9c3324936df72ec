"""Report sections and their json, markdown and csv renderings."""

from __future__ import annotations

import csv
from fractions import Fraction
import io
import json
import math

from .GammaEnumerator import GammaTruncation, OverlapPair
from .apitypes import AnalysisReport, AutomatonData, BoxData, DimensionData, LevelRow, OverlapData
from .automaton import TypeAutomaton
from .const import REPORT_DIGITS
from .geometry import Box
from .ratutil import format_rational, format_word
from .solver import DimensionReport, Verdict

FORMATS = ("json", "markdown", "csv-counts")

_SCALE = 10**REPORT_DIGITS


def _round(x: float) -> float:
    return round(x, REPORT_DIGITS)


def _floor(x: float) -> float:
    return math.floor(x * _SCALE) / _SCALE


def _ceil(x: float) -> float:
    return math.ceil(x * _SCALE) / _SCALE


def box_data(box: Box) -> BoxData:
    """Corners of the box as rational strings."""
    return {
        "lo": [format_rational(x) for x in box.lo],
        "hi": [format_rational(x) for x in box.hi],
    }


def level_rows(trunc: GammaTruncation) -> list[LevelRow]:
    m = trunc.ifs.size
    return [
        {
            "k": level.k,
            "S": len(level.S),
            "T": len(level.T),
            "pruned": len(level.pruned),
            "N_dedup": len({g for _, g in level.T + level.pruned}),
            "S_words": [format_word(w, m) for w, _ in level.S],
        }
        for level in trunc.levels
    ]


def overlap_data(overlaps: list[OverlapPair], alphabet_size: int) -> list[OverlapData]:
    return [{"u": format_word(p.u, alphabet_size), "v": format_word(p.v, alphabet_size)} for p in overlaps]


def automaton_data(aut: TypeAutomaton, growth: tuple[float, float] | None, alphabet_size: int) -> AutomatonData:
    return {
        "closed": aut.closed,
        "depth_reached": aut.depth_reached,
        "base_depth": aut.base_depth,
        "types": [
            {
                "representative": format_word(t.representative, alphabet_size),
                "first_seen": seen,
                "neighbours": len(t.fingerprint),
            }
            for t, seen in zip(aut.types, aut.first_seen)
        ],
        "matrix": [list(row) for row in aut.A],
        "emission": list(aut.emission),
        "pruned_children": list(aut.pruned_children),
        "base_counts": list(aut.base_counts),
        "preperiodic_S": list(aut.preperiodic_S),
        "spectral_radius": {"lower": _floor(growth[0]), "upper": _ceil(growth[1])} if growth is not None else None,
    }


def verdict_text(dim: DimensionReport) -> str:
    s = f"{dim.s_best:.5f}"
    if dim.verdict is Verdict.EQUALITY_CERTIFIED:
        return f"dim_H U = s = {s}"
    if dim.verdict is Verdict.BRACKET_ONLY:
        return (
            f"dim_H U lies in [{s}, {dim.bracket.upper:.5f}];"
            " the covering bound is only an upper bound, so this does not imply dim_H U > s"
        )
    return f"dim_H U >= {s}"


def dimension_data(dim: DimensionReport, ratio: Fraction | None, alphabet_size: int) -> DimensionData:
    s_exact = None
    if dim.s_exact is not None:
        x = float(ratio) ** dim.s_exact if ratio is not None else math.nan
        s_exact = {"value": _round(dim.s_exact), "tolerance": dim.s_exact_tolerance, "x": _round(x)}
    osc = dim.osc_evidence
    gap = osc.gap
    bracket = dim.bracket
    return {
        "similarity_dim": _round(dim.similarity_dim),
        "s_lower_by_depth": [[n, _floor(s)] for n, s in dim.s_lower_by_depth],
        "s_exact": s_exact,
        "dV_upper": _ceil(dim.dV_upper) if dim.dV_upper is not None else None,
        "bracket": {"lower": _floor(bracket.lower), "upper": _ceil(bracket.upper), "method": bracket.method},
        "verdict": dim.verdict.value,
        "verdict_text": verdict_text(dim),
        "osc_evidence": {
            "overlaps": overlap_data(list(osc.overlaps), alphabet_size),
            "automaton_closed": osc.automaton_closed,
            "osc": osc.osc,
            "conclusion": osc.conclusion,
            "similarity_dim": _round(osc.similarity_dim),
            "s_best": _round(osc.s_best) if osc.s_best is not None else None,
            "gap": _round(gap) if gap is not None else None,
        },
    }


def _markdown(report: AnalysisReport) -> str:
    dim = report["dimension"]
    lines = [
        "# Univoque analysis",
        "",
        f"- status: {report['status']}",
        f"- invariant box: lo={report['invariant_box']['lo']} hi={report['invariant_box']['hi']}",
        f"- similarity dimension: {dim['similarity_dim']}",
        f"- verdict: **{dim['verdict']}** ({dim['verdict_text']})",
        "",
        "## Levels",
        "",
        "| k | S | T | pruned | N (dedup) |",
        "|---|---|---|---|---|",
    ]
    lines += [f"| {r['k']} | {r['S']} | {r['T']} | {r['pruned']} | {r['N_dedup']} |" for r in report["levels"]]

    lines += ["", "## Overlaps", ""]
    if report["overlaps"]:
        lines += [f"- f_{p['u']} = f_{p['v']}" for p in report["overlaps"]]
    else:
        lines.append("none found")

    aut = report["automaton"]
    lines += ["", "## Automaton", ""]
    if aut is None:
        lines.append("not built")
    else:
        lines.append(f"- closed: {aut['closed']} (base depth {aut['base_depth']}, {len(aut['types'])} types)")
        lines.append(f"- emission: {aut['emission']}")
        lines.append(f"- base counts: {aut['base_counts']}")
        if aut["spectral_radius"] is not None:
            bounds = aut["spectral_radius"]
            lines.append(f"- spectral radius: [{bounds['lower']}, {bounds['upper']}]")
        if aut["matrix"]:
            lines += ["", "```"] + [" ".join(f"{x:>3}" for x in row) for row in aut["matrix"]] + ["```"]

    lines += ["", "## Dimension", ""]
    if dim["s_lower_by_depth"]:
        n, s = dim["s_lower_by_depth"][-1]
        lines.append(f"- s lower bound (N={n}): {s}")
    if dim["s_exact"] is not None:
        lines.append(f"- s exact: {dim['s_exact']['value']} (x = {dim['s_exact']['x']})")
    lines.append(f"- d_V upper bound: {dim['dV_upper']}")
    lines.append(f"- bracket: [{dim['bracket']['lower']}, {dim['bracket']['upper']}] ({dim['bracket']['method']})")
    lines.append(f"- OSC: {dim['osc_evidence']['conclusion']}")

    if report["warnings"]:
        lines += ["", "## Warnings", ""] + [f"- {w}" for w in report["warnings"]]
    if "timings" in report:
        lines += ["", "## Timings", ""] + [f"- {name}: {t:.3f}s" for name, t in report["timings"].items()]
    return "\n".join(lines) + "\n"


def _csv_counts(report: AnalysisReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["k", "S", "T", "N"])
    for row in report["levels"]:
        writer.writerow([row["k"], row["S"], row["T"], row["N_dedup"]])
    return out.getvalue()


def emit_report(report: AnalysisReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "markdown":
        return _markdown(report)
    if fmt == "csv-counts":
        return _csv_counts(report)
    raise ValueError(f"unknown report format {fmt!r}")
