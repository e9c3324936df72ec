"""Built-in example systems and their verification checks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
import logging
import math

from .GammaEnumerator import detect_overlaps
from .apitypes import CheckRow
from .config_flow import AnalysisConfig, ConfigError
from .coordinator import AnalysisCoordinator
from .geometry import IFS, Box, SignedPermutation, Similitude
from .ratutil import format_rational, parse_word
from .solver import Verdict, gamma_lower_from_counts

_LOGGER = logging.getLogger(__name__)

# published transfer matrix, rows and columns in the order a..e
EX4_MATRIX = (
    (0, 1, 0, 0, 1),
    (0, 1, 0, 1, 1),
    (1, 0, 1, 0, 0),
    (1, 0, 1, 0, 0),
    (0, 1, 0, 1, 0),
)


def below_golden_threshold(rho: Fraction) -> bool:
    """rho < (3 - sqrt 5)/2, decided exactly by squaring."""
    t = 3 - 2 * Fraction(rho)
    return t > 0 and t * t > 5


def _interval_map(ratio: Fraction, b: Fraction) -> Similitude:
    return Similitude(ratio, SignedPermutation.identity(1), (Fraction(b),))


def _square_map(ratio: Fraction, a: Fraction, b: Fraction) -> Similitude:
    return Similitude(ratio, SignedPermutation.identity(2), (Fraction(a), Fraction(b)))


def ex1(rho: Fraction = Fraction(1, 3), depth: int = 12) -> AnalysisConfig:
    """{rho x, rho x + rho, rho x + 1} on [0, 1/(1-rho)]."""
    rho = Fraction(rho)
    if not (0 < rho and below_golden_threshold(rho)):
        raise ConfigError([f"rho: {format_rational(rho)} is not in (0, (3-sqrt5)/2)"])
    ifs = IFS(1, tuple(_interval_map(rho, b) for b in (0, rho, 1)))
    return AnalysisConfig(ifs, Box((Fraction(0),), (1 / (1 - rho),)), depth=depth)


def _ex_square(lam: Fraction, fifth: tuple[Fraction, Fraction], depth: int) -> AnalysisConfig:
    corners = [(0, 0), (1 - lam, 0), (1 - lam, 1 - lam), (0, 1 - lam), fifth]
    ifs = IFS(2, tuple(_square_map(lam, a, b) for a, b in corners))
    return AnalysisConfig(ifs, Box((Fraction(0),) * 2, (Fraction(1),) * 2), depth=depth)


def ex2(lam: Fraction = Fraction(1, 3), depth: int = 10) -> AnalysisConfig:
    """Five squares; the fifth sits at (lam(1-lam), (1-lam)^2)."""
    lam = Fraction(lam)
    if not (0 < lam and below_golden_threshold(lam)):
        raise ConfigError([f"lambda: {format_rational(lam)} is not in (0, (3-sqrt5)/2)"])
    return _ex_square(lam, (lam * (1 - lam), (1 - lam) ** 2), depth)


def ex3(lam: Fraction = Fraction(1, 3), u: int = 2, depth: int = 10) -> AnalysisConfig:
    """Five squares; the fifth sits at (lam - lam^(u+1), 1 - 2 lam + lam^(u+1))."""
    lam = Fraction(lam)
    errors = []
    if not 0 < lam < 1:
        errors.append(f"lambda: {format_rational(lam)} is not in (0,1)")
    if u < 1:
        errors.append(f"u: {u} is not a positive integer")
    if not errors and not lam ** (u + 1) - 3 * lam + 1 > 0:
        errors.append(f"lambda^(u+1) - 3 lambda + 1 must be positive for lambda={format_rational(lam)}, u={u}")
    if errors:
        raise ConfigError(errors)
    p = lam ** (u + 1)
    return _ex_square(lam, (lam - p, 1 - 2 * lam + p), depth)


def ex4(depth: int = 10) -> AnalysisConfig:
    """{x/4, x/4 + 9/17, (x+3)/4} on [0,1]."""
    quarter = Fraction(1, 4)
    ifs = IFS(1, tuple(_interval_map(quarter, b) for b in (0, Fraction(9, 17), Fraction(3, 4))))
    return AnalysisConfig(ifs, Box((Fraction(0),), (Fraction(1),)), depth=depth)


def cantor() -> AnalysisConfig:
    third = Fraction(1, 3)
    ifs = IFS(1, (_interval_map(third, 0), _interval_map(third, Fraction(2, 3))))
    return AnalysisConfig(ifs, Box((Fraction(0),), (Fraction(1),)), depth=8)


BUILTINS = {
    "ex1": ex1,
    "ex2": ex2,
    "ex3": ex3,
    "ex4": ex4,
}


def same_up_to_permutation(A, B) -> bool:
    """A equals P B P^T for some permutation P."""
    n = len(B)
    if len(A) != n:
        return False
    for p in permutations(range(n)):
        if all(A[p[i]][p[j]] == B[i][j] for i in range(n) for j in range(n)):
            return True
    return False


@dataclass(frozen=True)
class VerificationResult:
    name: str
    rows: tuple[CheckRow, ...]

    @property
    def passed(self) -> bool:
        return all(row["passed"] for row in self.rows)


class _Checks:
    def __init__(self) -> None:
        self.rows: list[CheckRow] = []

    def add(self, check: str, expected, actual, passed: bool) -> None:
        self.rows.append({"check": check, "expected": str(expected), "actual": str(actual), "passed": bool(passed)})


def _has_overlap(overlaps, u: str, v: str) -> bool:
    pair = (parse_word(u), parse_word(v))
    return any((p.u, p.v) == pair or (p.v, p.u) == pair for p in overlaps)


def _verify_ex1(checks: _Checks) -> None:
    coordinator = AnalysisCoordinator(ex1())
    report = coordinator.run()
    counts = [row["S"] for row in report["levels"]]
    expected = [1] + [k - 1 for k in range(2, 13)]
    checks.add("|S_k|, k=1..12", expected, counts, counts == expected)
    s = coordinator.dimension.s_exact
    lam = 3**s if s is not None else math.nan
    checks.add("rho^-s", "2.3247 +- 5e-4", f"{lam:.6f}", abs(lam - 2.3247) <= 5e-4)
    residual = lam**3 - 3 * lam**2 + 2 * lam - 1
    checks.add("x^3-3x^2+2x-1 at rho^-s", "|r| < 1e-6", f"{residual:.2e}", abs(residual) < 1e-6)
    checks.add("overlap 13 = 21", True, _has_overlap(coordinator.overlaps, "13", "21"), _has_overlap(coordinator.overlaps, "13", "21"))
    dV = coordinator.dimension.dV_upper
    checks.add("d_V", "<= 0.63093", dV, dV is not None and dV <= 0.63093)
    verdict = coordinator.dimension.verdict
    checks.add("verdict", Verdict.EQUALITY_CERTIFIED.value, verdict.value, verdict is Verdict.EQUALITY_CERTIFIED)


def _verify_ex2(checks: _Checks) -> None:
    coordinator = AnalysisCoordinator(ex2())
    report = coordinator.run()
    counts = [row["S"] for row in report["levels"]]
    expected = [3] + [3 * k - 1 for k in range(2, 11)]
    checks.add("|S_k|, k=1..10", expected, counts, counts == expected)
    s = coordinator.dimension.s_exact
    x = (1 / 3) ** s if s is not None else math.nan
    checks.add("1/x", "4.61347 +- 1e-3", f"{1 / x:.6f}", abs(1 / x - 4.61347) <= 1e-3)
    residual = x**3 - 2 * x**2 + 5 * x - 1
    checks.add("x^3-2x^2+5x-1 at lambda^s", "|r| < 1e-6", f"{residual:.2e}", abs(residual) < 1e-6)
    checks.add("overlap 42 = 54", True, _has_overlap(coordinator.overlaps, "42", "54"), _has_overlap(coordinator.overlaps, "42", "54"))
    verdict = coordinator.dimension.verdict
    checks.add("verdict", Verdict.EQUALITY_CERTIFIED.value, verdict.value, verdict is Verdict.EQUALITY_CERTIFIED)


def _verify_ex3(checks: _Checks, u: int = 2) -> None:
    cfg = ex3(u=u)
    overlaps = detect_overlaps(cfg.ifs, u + 1)
    u_word, v_word = "4" + "2" * u, "5" + "4" * u
    found = _has_overlap(overlaps, u_word, v_word)
    checks.add(f"overlap {u_word} = {v_word}", True, found, found)
    same = ex3(u=1).ifs == ex2().ifs
    checks.add("u=1 gives the five-square system", True, same, same)


def _verify_ex4(checks: _Checks) -> None:
    coordinator = AnalysisCoordinator(ex4())
    report = coordinator.run()
    counts = [row["S"] for row in report["levels"]][:6]
    expected = [1, 1, 2, 4, 9, 21]
    checks.add("|S_k|, k=1..6", expected, counts, counts == expected)
    aut = coordinator.automaton
    closed = aut is not None and aut.closed
    checks.add("automaton closed with 5 types", True, f"{closed}, {aut.size if aut else 0}", closed and aut.size == 5)
    same = closed and same_up_to_permutation(aut.A, EX4_MATRIX)
    checks.add("matrix equals the published one up to relabelling", True, same, same)
    support = [e for e in aut.emission if e] if aut else []
    checks.add("emission support", [1, 1], support, support == [1, 1])
    lower, upper = coordinator.growth or (math.nan, math.nan)
    mid = (lower + upper) / 2
    checks.add(
        "spectral radius",
        "2.2775 +- 5e-4, width <= 1e-3",
        f"[{lower:.6f}, {upper:.6f}]",
        abs(mid - 2.2775) <= 5e-4 and upper - lower <= 1e-3,
    )
    s = coordinator.dimension.s_exact
    power = 4**s if s is not None else math.nan
    checks.add("4^s", "> 2.4693", f"{power:.6f}", power > 2.4693)
    deep = gamma_lower_from_counts(aut, Fraction(1, 4), 30)[-1][1] if closed else math.nan
    checks.add("s_30 from counts", f"{s} +- 1e-3", f"{deep:.6f}", s is not None and abs(deep - s) <= 1e-3)
    checks.add("overlap 232 = 311", True, _has_overlap(coordinator.overlaps, "232", "311"), _has_overlap(coordinator.overlaps, "232", "311"))
    verdict = coordinator.dimension.verdict
    checks.add("verdict", Verdict.EQUALITY_CERTIFIED.value, verdict.value, verdict is Verdict.EQUALITY_CERTIFIED)


_VERIFIERS = {
    "ex1": _verify_ex1,
    "ex2": _verify_ex2,
    "ex3": _verify_ex3,
    "ex4": _verify_ex4,
}


def verify_builtin(name: str) -> VerificationResult:
    """Run a built-in example and check it against the published numbers."""
    if name not in _VERIFIERS:
        raise ConfigError([f"unknown built-in {name!r}; expected one of {', '.join(_VERIFIERS)}"])
    checks = _Checks()
    _VERIFIERS[name](checks)
    result = VerificationResult(name, tuple(checks.rows))
    _LOGGER.info("[verify_builtin] %s: %s", name, "pass" if result.passed else "FAIL")
    return result
