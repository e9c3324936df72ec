"""Moran equations, the covering bound and the dimension verdict."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
import logging
import math
from typing import Callable

from mpmath import mp, workdps

from .GammaEnumerator import GammaTruncation, OverlapPair
from .automaton import AutomatonNotClosedError, TypeAutomaton, s_counts, spectral_bounds
from .const import DEFAULT_TOLERANCE, GUARD_FACTOR, WORKING_DPS
from .geometry import IFS
from .ratutil import format_word

_LOGGER = logging.getLogger(__name__)


class SolverError(ValueError):
    """Raised when an equation cannot be solved soundly."""


class Verdict(str, Enum):
    EQUALITY_CERTIFIED = "EqualityCertified"
    BRACKET_ONLY = "BracketOnly"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DimensionBracket:
    """Certified lower bound on dim_H U and the best available upper bound."""

    lower: float
    upper: float = math.inf
    method: str = "truncation"

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"bracket lower {self.lower} exceeds upper {self.upper}")
        if self.method not in ("truncation", "generating-function", "covering"):
            raise ValueError(f"unknown bracket method {self.method!r}")


@dataclass(frozen=True)
class OscEvidence:
    overlaps: tuple[OverlapPair, ...]
    automaton_closed: bool
    osc: bool | None
    conclusion: str
    similarity_dim: float
    s_best: float | None = None

    @property
    def gap(self) -> float | None:
        if self.s_best is None:
            return None
        return self.similarity_dim - self.s_best


@dataclass(frozen=True)
class DimensionReport:
    similarity_dim: float
    s_lower_by_depth: tuple[tuple[int, float], ...]
    s_exact: float | None
    s_exact_tolerance: float | None
    dV_upper: float | None
    verdict: Verdict
    osc_evidence: OscEvidence
    ambient_dimension: int | None = None

    @property
    def s_best(self) -> float:
        if self.s_exact is not None:
            return self.s_exact
        if self.s_lower_by_depth:
            return self.s_lower_by_depth[-1][1]
        return 0.0

    @property
    def bracket(self) -> DimensionBracket:
        """s_best below; above, the covering bound when s is exact, else the similarity dimension.

        The similarity dimension is capped by the ambient dimension when it is known.
        """
        s = self.s_best
        ceiling = self.similarity_dim
        if self.ambient_dimension is not None:
            ceiling = min(ceiling, float(self.ambient_dimension))
        ceiling = max(s, ceiling)
        if self.s_exact is None:
            return DimensionBracket(s, ceiling, "truncation")
        if self.dV_upper is None:
            return DimensionBracket(s, ceiling, "generating-function")
        return DimensionBracket(s, min(max(s, self.dV_upper), ceiling), "covering")


def _mpf(q: Fraction):
    return mp.mpf(q.numerator) / q.denominator


def _bisect(func: Callable, lo, hi, tol: float, increasing: bool):
    """Root of a monotone function bracketed by [lo, hi]."""
    f_lo, f_hi = func(lo), func(hi)
    if (f_lo > 0 or f_hi < 0) if increasing else (f_lo < 0 or f_hi > 0):
        raise SolverError(f"root not bracketed: f({lo})={f_lo}, f({hi})={f_hi}")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        value = func(mid)
        if value == 0:
            return mid
        if (value < 0) == increasing:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _moran_root(weights: dict[Fraction, int], tol: float) -> float:
    """Solve sum c * r^s = 1 for s >= 0, weights mapping r -> c with r < 1."""
    total = sum(weights.values())
    if total == 1:
        return 0.0
    with workdps(WORKING_DPS):
        terms = [(_mpf(r), c) for r, c in weights.items()]
        r_max = max(r for r, _ in terms)
        # total * r_max^s bounds the sum, so past this point it is below 1
        hi = mp.log(total) / -mp.log(r_max) + 1
        root = _bisect(
            lambda s: sum(c * r**s for r, c in terms) - 1,
            mp.mpf(0),
            hi,
            tol,
            increasing=False,
        )
        return float(root)


def similarity_dim(ifs: IFS, tol: float = DEFAULT_TOLERANCE) -> float:
    """Root of sum r_i^s = 1 over the maps."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return _moran_root(Counter(ifs.ratios), tol)


def gamma_lower(trunc: GammaTruncation, tol: float = DEFAULT_TOLERANCE) -> list[tuple[int, float]]:
    """s_N solving sum over Gamma_{<=N} of ratio(w)^s = 1, for each N with Gamma_{<=N} nonempty."""
    weights: Counter[Fraction] = Counter()
    result = []
    for level in trunc.levels:
        for _, g in level.S:
            weights[g.ratio] += 1
        if weights:
            result.append((level.k, _moran_root(weights, tol)))
    if not result:
        _LOGGER.warning("[gamma_lower] Gamma is empty up to depth %d", trunc.depth)
    return result


def gamma_lower_from_counts(
    aut: TypeAutomaton, ratio: Fraction, depth: int, tol: float = DEFAULT_TOLERANCE
) -> list[tuple[int, float]]:
    """Same sequence as gamma_lower, with |S_k| taken from the automaton."""
    weights: Counter[Fraction] = Counter()
    result = []
    for k, count in enumerate(s_counts(aut, depth), start=1):
        if count:
            weights[Fraction(ratio) ** k] += count
        if weights:
            result.append((k, _moran_root(weights, tol)))
    return result


def common_ratio(ifs: IFS) -> Fraction:
    """The shared contraction ratio; the exact solve needs it."""
    if not ifs.is_homogeneous:
        raise SolverError("ratios are not all equal; only truncated lower bounds are available")
    return ifs.ratios[0]


def gamma_exact(
    aut: TypeAutomaton,
    ratio: Fraction,
    tol: float = DEFAULT_TOLERANCE,
    spectral_upper: float | None = None,
) -> float:
    """s with sum over Gamma of ratio^(s|w|) = 1, through the generating function of the automaton.

    G(x) = sum_{k<=k0} |S_k| x^k + x^(k0+1) e (I - xA)^-1 b is solved for G(x) = 1
    on [0, 1/rho(A)), and s = ln x / ln ratio.
    """
    if not aut.closed:
        raise AutomatonNotClosedError("automaton did not close; no exact solve")
    ratio = Fraction(ratio)
    if not 0 < ratio < 1:
        raise SolverError(f"ratio {ratio} is not in (0,1)")
    n = aut.size
    k0 = aut.base_depth
    if n and spectral_upper is None:
        spectral_upper = spectral_bounds(aut.A)[1]

    with workdps(WORKING_DPS):
        if n:
            A = mp.matrix([list(row) for row in aut.A])
            b = mp.matrix(list(aut.base_counts))
            identity = mp.eye(n)

        def G(x):
            total = sum(c * x**k for k, c in enumerate(aut.preperiodic_S, start=1))
            if n:
                try:
                    y = mp.lu_solve(identity - x * A, b)
                except ZeroDivisionError as err:
                    raise SolverError(f"I - xA is singular at x={x}") from err
                total += x ** (k0 + 1) * sum(aut.emission[i] * y[i] for i in range(n))
            return total

        x_hi = mp.mpf(1)
        if n and spectral_upper and spectral_upper > 0:
            x_hi = min(x_hi, (1 - GUARD_FACTOR * mp.mpf(tol)) / mp.mpf(spectral_upper))
        g_hi = G(x_hi)
        if g_hi < 1:
            raise SolverError(
                f"G({float(x_hi):.6g}) = {float(g_hi):.6g} < 1: the root lies at or beyond the radius of convergence"
                f" (spectral upper bound {spectral_upper})"
            )
        x = _bisect(lambda t: G(t) - 1, mp.mpf(0), x_hi, tol, increasing=True)
        s = float(mp.log(x) / mp.log(_mpf(ratio)))
    _LOGGER.debug("[gamma_exact] x=%s s=%s", float(x), s)
    return s


def v_upper(sigma_upper: float, ifs: IFS) -> float:
    """Covering bound ln(sigma) / -ln(r_max) on the dimension of the survivor part."""
    if sigma_upper <= 1:
        return 0.0
    value = math.log(sigma_upper) / -math.log(float(ifs.max_ratio))
    return math.nextafter(value, math.inf)


def verdict(
    s_best: float, s_is_exact: bool, dV: float | None, tol: float, gamma_empty: bool = False
) -> Verdict:
    """EqualityCertified when the exact s reaches the covering bound within tol.

    An empty Gamma with no exact s only gives the trivial lower bound 0, which
    brackets nothing.
    """
    if dV is None or (gamma_empty and not s_is_exact):
        return Verdict.INCONCLUSIVE
    if s_is_exact and dV <= s_best + tol:
        return Verdict.EQUALITY_CERTIFIED
    return Verdict.BRACKET_ONLY


def osc_report(
    overlaps: list[OverlapPair],
    aut_closed: bool,
    similarity_dim: float,
    s_best: float | None = None,
    alphabet_size: int = 9,
) -> OscEvidence:
    """Evidence for or against the open set condition, from overlaps and automaton closure."""
    if overlaps:
        first = overlaps[0]
        conclusion = (
            f"no OSC: exact overlap f_{format_word(first.u, alphabet_size)} = f_{format_word(first.v, alphabet_size)};"
            " dim_H U < dim_S K expected"
        )
        osc = False
    elif aut_closed:
        conclusion = "finite type and no exact overlaps up to the searched depth: OSC, dim_H U = dim_S K"
        osc = True
    else:
        conclusion = "inconclusive at this depth"
        osc = None
    return OscEvidence(tuple(overlaps), aut_closed, osc, conclusion, similarity_dim, s_best)
