"""Utils relating to rationals and words."""

from fractions import Fraction
import re

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or "p" into an exact Fraction."""
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise ValueError(f"malformed rational {text!r}")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(numerator, denominator)


def format_rational(value: Fraction) -> str:
    """Format as "p/q", or "p" for integers."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_word(word: tuple[int, ...], alphabet_size: int = 9) -> str:
    """Render a word as its symbols, e.g. (2, 3, 2) -> "232"; dotted once symbols exceed 9."""
    if alphabet_size <= 9:
        return "".join(str(symbol) for symbol in word)
    return ".".join(str(symbol) for symbol in word)


def parse_word(text: str, alphabet_size: int = 9) -> tuple[int, ...]:
    """Inverse of format_word."""
    if text == "":
        return ()
    if alphabet_size <= 9:
        return tuple(int(ch) for ch in text)
    return tuple(int(part) for part in text.split("."))
