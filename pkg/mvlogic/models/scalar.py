"""
Scalar kinds shared by terms and networks

Integer and Rational values are exact (``int`` and ``fractions.Fraction``);
Real values are ``float`` and are compared with a tolerance.
"""

import math
from enum import Enum
from fractions import Fraction
from typing import Iterable, List, Sequence, Union

Scalar = Union[int, Fraction, float]


class ScalarKind(str, Enum):
    """Numeric kind of a network's weights"""
    INTEGER = 'int'
    RATIONAL = 'rational'
    REAL = 'real'

    @property
    def rank(self) -> int:
        return _RANK[self]


_RANK = {ScalarKind.INTEGER: 0, ScalarKind.RATIONAL: 1, ScalarKind.REAL: 2}


class PointError(ValueError):
    """Raised when an evaluation point has the wrong dimension or leaves [0,1]"""
    pass


def is_exact(kind: ScalarKind) -> bool:
    return kind is not ScalarKind.REAL


def coerce(value: Scalar, kind: ScalarKind) -> Scalar:
    """
    Convert a value to the Python type used by a scalar kind

    Args:
        value: int, Fraction or float
        kind: Target kind

    Returns:
        int for Integer, Fraction for Rational, float for Real

    Raises:
        ValueError: If the value cannot be represented in the target kind
    """
    if isinstance(value, bool):
        raise ValueError(f"Boolean is not a scalar: {value!r}")
    if kind is ScalarKind.REAL:
        result = float(value)
        if not math.isfinite(result):
            raise ValueError(f"Non-finite real scalar: {value!r}")
        return result
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"Non-finite scalar: {value!r}")
        value = Fraction(value)
    if kind is ScalarKind.RATIONAL:
        return Fraction(value)
    exact = Fraction(value)
    if exact.denominator != 1:
        raise ValueError(f"Value {value} is not an integer")
    return int(exact)


def matches_kind(value: Scalar, kind: ScalarKind) -> bool:
    """Check the stored Python type of a value against a kind"""
    if isinstance(value, bool):
        return False
    if kind is ScalarKind.INTEGER:
        return isinstance(value, int)
    if kind is ScalarKind.RATIONAL:
        return isinstance(value, Fraction)
    return isinstance(value, float) and math.isfinite(value)


def narrowest_kind(values: Iterable[Scalar]) -> ScalarKind:
    """Smallest kind able to hold every value exactly"""
    kind = ScalarKind.INTEGER
    for value in values:
        if isinstance(value, float):
            return ScalarKind.REAL
        if Fraction(value).denominator != 1:
            kind = ScalarKind.RATIONAL
    return kind


def parse_scalar(raw: Union[str, int, float], kind: ScalarKind) -> Scalar:
    """
    Parse a scalar from its textual or JSON form

    Integers are JSON numbers, rationals are "p/q" strings (plain integers
    allowed), reals are decimal strings or numbers.
    """
    if isinstance(raw, bool):
        raise ValueError(f"Boolean is not a scalar: {raw!r}")
    if kind is ScalarKind.INTEGER:
        if isinstance(raw, int):
            return raw
        raise ValueError(f"Expected an integer, got {raw!r}")
    if kind is ScalarKind.RATIONAL:
        if isinstance(raw, int):
            return Fraction(raw)
        if isinstance(raw, str):
            try:
                return Fraction(raw.strip())
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"Invalid rational {raw!r}")
        raise ValueError(f"Expected a 'p/q' string, got {raw!r}")
    if isinstance(raw, (str, int, float)):
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(f"Invalid real {raw!r}")
        if not math.isfinite(value):
            raise ValueError(f"Non-finite real {raw!r}")
        return value
    raise ValueError(f"Expected a decimal string, got {raw!r}")


def format_scalar(value: Scalar, kind: ScalarKind) -> Union[int, str]:
    """Inverse of ``parse_scalar``"""
    if kind is ScalarKind.INTEGER:
        return int(value)
    if kind is ScalarKind.RATIONAL:
        exact = Fraction(value)
        return f"{exact.numerator}/{exact.denominator}"
    return repr(float(value))


def parse_point(text: str) -> List[Fraction]:
    """Parse a comma-separated point such as "1/2,0,0.25" into exact rationals"""
    if not text or not text.strip():
        raise PointError("Point must contain at least one component")
    point = []
    for part in text.split(','):
        try:
            point.append(Fraction(part.strip()))
        except (ValueError, ZeroDivisionError):
            raise PointError(f"Invalid point component {part.strip()!r}")
    return point


def check_point(point: Sequence[Scalar], dim: int) -> None:
    """Reject points that are too short or leave the unit cube"""
    if len(point) < dim:
        raise PointError(f"Point has {len(point)} components, expected {dim}")
    for value in point:
        if not 0 <= value <= 1:
            raise PointError(f"Point component {value} is outside [0,1]")


def format_value(value: Scalar) -> str:
    """Human-readable rendering of an evaluation result"""
    if isinstance(value, float):
        return repr(value)
    return str(Fraction(value))
