"""Exact bound expressions  sum c * p^a * (log p)^b.

Coefficients are ``Fraction``; ``a, b >= 0`` are integers.  Factors that
depend on p in a non-polynomial way (the genus, N0, ratios such as
12(p+1)/(p-13)) are folded into the coefficients by the caller, so an
expression is meant to be evaluated at the prime it was built for.

Nothing here uses floating point except ``evaluate``.  ``enclosure`` gives
an exact rational interval, using a rigorous interval enclosure of log p
(mpmath interval arithmetic with outward rounding).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

from mpmath.ctx_iv import MPIntervalContext
from mpmath.libmp import to_rational

from .encoding import frac_str

__all__ = ["BoundExpr", "as_bound", "log_enclosure", "LOG_PREC_BITS"]

LOG_PREC_BITS = 128

# private context: never mutated after construction, so safe to share
_IV = MPIntervalContext()
_IV.prec = LOG_PREC_BITS

Number = Union[int, Fraction, "BoundExpr"]


@lru_cache(maxsize=4096)
def log_enclosure(p: int) -> tuple[Fraction, Fraction]:
    """Rational lo <= log(p) <= hi, width about 2**-120 * log(p)."""
    if p < 1:
        raise ValueError("log enclosure needs p >= 1")
    lo, hi = _IV.log(_IV.mpf(p))._mpi_
    return Fraction(*to_rational(lo)), Fraction(*to_rational(hi))


@dataclass(frozen=True)
class BoundExpr:
    terms: tuple[tuple[int, int, Fraction], ...] = ()

    @classmethod
    def from_terms(cls, items: Iterable[tuple[int, int, object]]) -> "BoundExpr":
        acc: dict[tuple[int, int], Fraction] = {}
        for a, b, c in items:
            if a < 0 or b < 0:
                raise ValueError("exponents must be non-negative")
            acc[(a, b)] = acc.get((a, b), Fraction(0)) + Fraction(c)
        return cls(tuple((a, b, c) for (a, b), c in sorted(acc.items()) if c))

    @classmethod
    def const(cls, c) -> "BoundExpr":
        return cls.from_terms([(0, 0, c)])

    @classmethod
    def monomial(cls, c, a: int = 0, b: int = 0) -> "BoundExpr":
        return cls.from_terms([(a, b, c)])

    def coefficient(self, a: int, b: int) -> Fraction:
        for x, y, c in self.terms:
            if (x, y) == (a, b):
                return c
        return Fraction(0)

    def __add__(self, other: Number) -> "BoundExpr":
        other = as_bound(other)
        return BoundExpr.from_terms(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self) -> "BoundExpr":
        return BoundExpr(tuple((a, b, -c) for a, b, c in self.terms))

    def __sub__(self, other: Number) -> "BoundExpr":
        return self + (-as_bound(other))

    def __rsub__(self, other: Number) -> "BoundExpr":
        return as_bound(other) - self

    def __mul__(self, other: Number) -> "BoundExpr":
        other = as_bound(other)
        return BoundExpr.from_terms(
            (a1 + a2, b1 + b2, c1 * c2) for a1, b1, c1 in self.terms for a2, b2, c2 in other.terms
        )

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.terms)

    def has_log(self) -> bool:
        return any(b for _, b, _ in self.terms)

    def degree(self) -> tuple[int, int]:
        """Largest (a, b) present, in lexicographic order; (0, 0) if empty."""
        return max(((a, b) for a, b, _ in self.terms), default=(0, 0))

    def exact(self, p: int) -> Fraction:
        """Exact value; only defined when no log p appears."""
        if self.has_log():
            raise ValueError("expression involves log p; use enclosure()")
        return sum((c * Fraction(p) ** a for a, _, c in self.terms), Fraction(0))

    def enclosure(self, p: int) -> tuple[Fraction, Fraction]:
        """Exact rational interval containing the value at p."""
        if not self.has_log():
            v = self.exact(p)
            return v, v
        llo, lhi = log_enclosure(p)
        lo = hi = Fraction(0)
        for a, b, c in self.terms:
            pa = Fraction(p) ** a
            t_lo, t_hi = c * pa * llo ** b, c * pa * lhi ** b
            if t_lo > t_hi:
                t_lo, t_hi = t_hi, t_lo
            lo += t_lo
            hi += t_hi
        return lo, hi

    def upper(self, p: int) -> Fraction:
        return self.enclosure(p)[1]

    def lower(self, p: int) -> Fraction:
        return self.enclosure(p)[0]

    def evaluate(self, p: int) -> float:
        """Double-precision value (report only; not used in any decision)."""
        L = math.log(p)
        return math.fsum(float(c) * float(p) ** a * L ** b for a, b, c in self.terms)

    def to_json(self) -> list[dict]:
        return [{"coeff": frac_str(c), "p_pow": a, "log_pow": b} for a, b, c in self.terms]

    def report(self, p: int) -> dict:
        lo, hi = self.enclosure(p)
        return {"terms": self.to_json(), "float": self.evaluate(p), "upper": frac_str(hi), "lower": frac_str(lo)}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for a, b, c in reversed(self.terms):
            s = str(c)
            if a:
                s += "*p" + (f"^{a}" if a > 1 else "")
            if b:
                s += "*log(p)" + (f"^{b}" if b > 1 else "")
            parts.append(s)
        return " + ".join(parts)


def as_bound(x: Number) -> BoundExpr:
    if isinstance(x, BoundExpr):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return BoundExpr.const(x)
    raise TypeError(f"cannot use {type(x).__name__} in an exact bound expression")
