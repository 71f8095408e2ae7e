"""Deterministic numeric rendering for reports.

All report numbers are emitted as decimal strings so output bytes do not
depend on platform float formatting.
"""

from __future__ import annotations

from fractions import Fraction


def decimal_string(value: Fraction | int, digits: int = 24) -> str:
    """Exact decimal expansion of a rational, truncated toward zero."""
    if isinstance(value, int):
        return str(value)
    n, d = value.numerator, value.denominator
    sign = "-" if n < 0 else ""
    n = abs(n)
    whole, rem = divmod(n, d)
    if digits <= 0 or rem == 0:
        frac = (rem * 10**digits) // d if digits > 0 else 0
        if frac == 0:
            return f"{sign}{whole}"
    frac = (rem * 10**digits) // d
    return f"{sign}{whole}.{str(frac).zfill(digits)}"
