"""JSON encodings shared by every module.

Rationals are strings ``"num/den"`` in lowest terms with ``den > 0`` (the
denominator is always written, ``"3/1"``, ``"0/1"``), complex numbers are
``{"re": x, "im": y}``.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    """Parse ``"a/b"``, ``"a"`` or a finite decimal such as ``"0.088"``."""
    m = _RATIONAL.match(s)
    if m:
        num, den = m.groups()
        if den is not None and int(den) == 0:
            raise ValueError(f"zero denominator in {s!r}")
        return Fraction(int(num), int(den or 1))
    try:
        return Fraction(s.strip())
    except ValueError:
        raise ValueError(f"not a rational: {s!r}") from None


def complex_json(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed indentation, trailing newline)."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
