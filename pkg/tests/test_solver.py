from fractions import Fraction
import math

import pytest

from univoque.GammaEnumerator import OverlapPair, detect_overlaps
from univoque.automaton import AutomatonNotClosedError, build
from univoque.geometry import IFS, SignedPermutation, Similitude
from univoque.solver import (
    DimensionBracket,
    DimensionReport,
    SolverError,
    Verdict,
    common_ratio,
    gamma_exact,
    gamma_lower,
    gamma_lower_from_counts,
    osc_report,
    similarity_dim,
    v_upper,
    verdict,
)

GOLDEN = (math.sqrt(5) - 1) / 2


def test_similarity_dim(ex1_cfg, ex2_cfg, ex4_cfg):
    assert similarity_dim(ex1_cfg.ifs) == pytest.approx(1.0, abs=1e-8)
    assert similarity_dim(ex2_cfg.ifs) == pytest.approx(math.log(5) / math.log(3), abs=1e-8)
    assert similarity_dim(ex4_cfg.ifs) == pytest.approx(math.log(3) / math.log(4), abs=1e-8)
    with pytest.raises(ValueError):
        similarity_dim(ex1_cfg.ifs, tol=0)


def test_similarity_dim_mixed_ratios():
    ifs = IFS(
        1,
        (
            Similitude(Fraction(1, 2), SignedPermutation.identity(1), (Fraction(0),)),
            Similitude(Fraction(1, 4), SignedPermutation.identity(1), (Fraction(3, 4),)),
        ),
    )
    # (1/2)^s + (1/4)^s = 1 at 2^-s = golden
    assert similarity_dim(ifs) == pytest.approx(math.log(GOLDEN) / math.log(0.5), abs=1e-8)
    with pytest.raises(SolverError):
        common_ratio(ifs)


def test_gamma_lower_second_level(ex1_trunc, ex2_trunc, ex4_trunc):
    assert gamma_lower(ex1_trunc)[1] == (2, pytest.approx(math.log(GOLDEN) / math.log(1 / 3), abs=1e-8))
    assert gamma_lower(ex1_trunc)[1][1] == pytest.approx(0.43802, abs=1e-5)
    x = (math.sqrt(29) - 3) / 10
    assert gamma_lower(ex2_trunc)[1][1] == pytest.approx(math.log(x) / math.log(1 / 3), abs=1e-8)
    assert gamma_lower(ex4_trunc)[1][1] == pytest.approx(0.34712, abs=1e-5)


def test_gamma_lower_increases(ex4_trunc):
    values = [s for _, s in gamma_lower(ex4_trunc)]
    assert all(b >= a - 1e-8 for a, b in zip(values, values[1:]))


def test_gamma_exact_ex1(ex1_aut, ex1_trunc):
    s = gamma_exact(ex1_aut, Fraction(1, 3))
    lam = 3**s
    assert abs(lam**3 - 3 * lam**2 + 2 * lam - 1) < 1e-6
    assert lam == pytest.approx(2.3247, abs=5e-4)
    assert all(lower <= s + 1e-8 for _, lower in gamma_lower(ex1_trunc))


def test_gamma_exact_ex2(ex2_aut):
    s = gamma_exact(ex2_aut, Fraction(1, 3))
    x = (1 / 3) ** s
    assert abs(x**3 - 2 * x**2 + 5 * x - 1) < 1e-6
    assert 1 / x == pytest.approx(4.61347, abs=1e-3)


def test_gamma_exact_ex4(ex4_aut, ex4_cfg):
    s = gamma_exact(ex4_aut, Fraction(1, 4))
    assert 4**s > 2.4693
    assert s <= similarity_dim(ex4_cfg.ifs)
    deep = gamma_lower_from_counts(ex4_aut, Fraction(1, 4), 30)
    assert deep[-1][0] == 30
    assert abs(deep[-1][1] - s) <= 1e-3
    assert deep[-1][1] <= s + 1e-8


def test_gamma_exact_cantor(cantor_aut):
    assert gamma_exact(cantor_aut, Fraction(1, 3)) == pytest.approx(math.log(2) / math.log(3), abs=1e-8)


@pytest.mark.parametrize(
    ("name", "ratio", "overlap_depth"),
    [("ex1", Fraction(1, 3), 2), ("ex2", Fraction(1, 3), 2), ("ex4", Fraction(1, 4), 3)],
)
def test_overlapping_examples_fall_below_similarity_dim(request, name, ratio, overlap_depth):
    cfg = request.getfixturevalue(f"{name}_cfg")
    aut = request.getfixturevalue(f"{name}_aut")
    sim = similarity_dim(cfg.ifs)
    s = gamma_exact(aut, ratio)
    evidence = osc_report(detect_overlaps(cfg.ifs, overlap_depth), aut.closed, sim, s, cfg.ifs.size)
    assert evidence.overlaps
    assert evidence.osc is False
    assert evidence.gap >= 0.05


def test_lower_from_counts_matches_enumeration(ex4_aut, ex4_trunc):
    from_counts = gamma_lower_from_counts(ex4_aut, Fraction(1, 4), ex4_trunc.depth)
    enumerated = gamma_lower(ex4_trunc)
    assert [n for n, _ in from_counts] == [n for n, _ in enumerated]
    for (_, a), (_, b) in zip(from_counts, enumerated):
        assert a == pytest.approx(b, abs=1e-9)


def test_gamma_exact_errors(ex4_aut, ex4_cfg):
    with pytest.raises(SolverError):
        gamma_exact(ex4_aut, Fraction(1))
    # an overstated spectral bound leaves no room for the root
    with pytest.raises(SolverError):
        gamma_exact(ex4_aut, Fraction(1, 4), spectral_upper=100.0)
    open_aut = build(ex4_cfg.ifs, ex4_cfg.invariant_box, 2)
    with pytest.raises(AutomatonNotClosedError):
        gamma_exact(open_aut, Fraction(1, 4))


def test_common_ratio(ex4_cfg):
    assert common_ratio(ex4_cfg.ifs) == Fraction(1, 4)


def test_v_upper(ex1_cfg, ex4_cfg):
    assert v_upper(2.0, ex1_cfg.ifs) == pytest.approx(0.63093, abs=1e-5)
    assert v_upper(2.0, ex1_cfg.ifs) >= math.log(2) / math.log(3)
    assert v_upper(1.0, ex1_cfg.ifs) == 0.0
    assert v_upper(0.5, ex1_cfg.ifs) == 0.0
    assert v_upper(2.2775, ex4_cfg.ifs) == pytest.approx(0.59373, abs=1e-4)


@pytest.mark.parametrize(
    ("s_best", "exact", "dV", "expected"),
    [
        (0.7679, True, 0.63093, Verdict.EQUALITY_CERTIFIED),
        (0.5, True, 0.5 + 1e-7, Verdict.EQUALITY_CERTIFIED),
        (0.5, True, 0.6, Verdict.BRACKET_ONLY),
        (0.5, False, 0.1, Verdict.BRACKET_ONLY),
        (0.5, True, None, Verdict.INCONCLUSIVE),
    ],
)
def test_verdict(s_best, exact, dV, expected):
    assert verdict(s_best, exact, dV, 1e-6) is expected


def test_verdict_empty_gamma():
    assert verdict(0.0, False, 1.0, 1e-6, gamma_empty=True) is Verdict.INCONCLUSIVE
    assert verdict(0.0, False, 1.0, 1e-6) is Verdict.BRACKET_ONLY
    assert verdict(0.0, True, 0.0, 1e-6, gamma_empty=True) is Verdict.EQUALITY_CERTIFIED


def test_osc_report():
    pair = OverlapPair((1, 3), (2, 1))
    with_overlap = osc_report([pair], True, 1.0, 0.7)
    assert with_overlap.osc is False
    assert "f_13 = f_21" in with_overlap.conclusion
    assert with_overlap.gap == pytest.approx(0.3)
    assert osc_report([], True, 0.63, 0.63).osc is True
    open_report = osc_report([], False, 0.63)
    assert open_report.osc is None
    assert open_report.gap is None


def _report(s_exact, dV, lowers=((2, 0.4),), sim=1.0, ambient=None):
    s_best = s_exact if s_exact is not None else (lowers[-1][1] if lowers else 0.0)
    return DimensionReport(
        similarity_dim=sim,
        s_lower_by_depth=lowers,
        s_exact=s_exact,
        s_exact_tolerance=1e-9 if s_exact is not None else None,
        dV_upper=dV,
        verdict=verdict(s_best, s_exact is not None, dV, 1e-6),
        osc_evidence=osc_report([], dV is not None, sim),
        ambient_dimension=ambient,
    )


def test_bracket():
    assert _report(0.7, 0.5).bracket == DimensionBracket(0.7, 0.7, "covering")
    assert _report(0.7, 0.9).bracket == DimensionBracket(0.7, 0.9, "covering")
    assert _report(0.7, None).bracket == DimensionBracket(0.7, 1.0, "generating-function")
    # a truncated lower bound says nothing about the covering bound
    assert _report(None, 0.2).bracket == DimensionBracket(0.4, 1.0, "truncation")
    assert _report(None, None, ()).bracket.lower == 0.0
    with pytest.raises(ValueError):
        DimensionBracket(0.5, 0.4)


def test_bracket_capped_by_ambient_dimension():
    assert _report(None, None, sim=1.08214, ambient=1).bracket == DimensionBracket(0.4, 1.0, "truncation")
    assert _report(0.7, None, sim=1.08214, ambient=1).bracket.upper == 1.0
    assert _report(0.7, 1.2, sim=1.08214, ambient=1).bracket == DimensionBracket(0.7, 1.0, "covering")
    assert _report(None, None, sim=1.08214).bracket.upper == 1.08214
