"""
Numeric profiles.

The default profile is exact rational arithmetic on fractions.Fraction; the
f64 profile runs the same code on Python floats. Library functions are
profile-agnostic: they work on whatever numbers they are given, so the profile
only matters where numbers enter (coerce) and where they are compared.
"""
import math
from enum import Enum
from fractions import Fraction
from typing import Union

from .errors import InvalidParameterError

Number = Union[int, Fraction, float]

FLOAT_REL_TOL = 1e-9
FLOAT_ABS_TOL = 1e-12


class Profile(str, Enum):
    RATIONAL = "rational"
    FLOAT64 = "f64"

    @classmethod
    def parse(cls, value: "str | Profile") -> "Profile":
        if isinstance(value, Profile):
            return value
        key = str(value).strip().lower()
        if key in ("float64", "float"):
            key = "f64"
        try:
            return cls(key)
        except ValueError:
            raise InvalidParameterError(f"unknown numeric profile {value!r} (expected rational or f64)")


def coerce(value, profile: Profile = Profile.RATIONAL) -> Number:
    """
    Convert a config or user value to a number of the given profile.

    Strings may be integers, decimals or fractions such as "1/3". In the
    rational profile decimals are read exactly ("0.1" is 1/10, not the
    nearest binary double).
    """
    if isinstance(value, bool):
        raise InvalidParameterError(f"expected a number, got {value!r}")
    if isinstance(value, str):
        text = value.strip()
        try:
            exact = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InvalidParameterError(f"cannot parse {value!r} as a number")
    elif isinstance(value, (int, Fraction)):
        exact = Fraction(value)
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidParameterError(f"non-finite value {value!r}")
        if profile is Profile.FLOAT64:
            return value
        exact = Fraction(repr(value))
    else:
        raise InvalidParameterError(f"expected a number, got {type(value).__name__}")

    if profile is Profile.FLOAT64:
        return float(exact)
    return exact


def discrepancy(a: Number, b: Number) -> Number:
    """Absolute difference, exact for rationals."""
    return abs(a - b)


def within_tolerance(a: Number, b: Number, profile: Profile = Profile.RATIONAL,
                     rel: float = FLOAT_REL_TOL) -> bool:
    if profile is Profile.RATIONAL and not (isinstance(a, float) or isinstance(b, float)):
        return a == b
    return math.isclose(float(a), float(b), rel_tol=rel, abs_tol=FLOAT_ABS_TOL)


def format_number(value: Number) -> str:
    """Stable text form: p/q for rationals, repr for floats."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))
