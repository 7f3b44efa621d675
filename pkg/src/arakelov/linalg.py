"""Exact linear algebra over Q.

Rows are sparse ``{column: value}`` dicts.  Elimination is fraction-free:
rational input rows are first scaled to integer rows, eliminated with
integer cross-multiplication (each row kept primitive, i.e. divided by the
gcd of its entries), and only the final back-substitution touches
``Fraction``.  Among the rows carrying the current leading column, the pivot
with the smallest absolute value (then the fewest non-zeros) is chosen, which
keeps coefficient growth small on the very sparse systems coming from dual
graphs and Manin relations.

Dense matrices are plain lists of lists.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import InconsistentSystem, SingularSystem

__all__ = [
    "integer_row",
    "echelon",
    "rref",
    "rank",
    "nullspace",
    "solve",
    "det",
    "IncrementalEchelon",
    "matmul",
    "matvec",
    "identity",
    "mat_sub",
    "mat_scale",
    "is_zero_matrix",
    "transpose",
]


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _as_dict(row) -> dict:
    if isinstance(row, dict):
        return {c: v for c, v in row.items() if v}
    return {c: v for c, v in enumerate(row) if v}


def integer_row(row) -> dict[int, int]:
    """Scale a rational row to a primitive integer row with the same span."""
    row = _as_dict(row)
    if not row:
        return {}
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = _lcm(den, v.denominator)
    out = {c: int(v * den) for c, v in row.items()}
    return _primitive(out)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g == 0:
        return {}
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g == 1:
        return row
    return {c: v // g for c, v in row.items()}


def _eliminate(row: dict[int, int], piv: dict[int, int], col: int) -> dict[int, int]:
    """Return a primitive combination of ``row`` and ``piv`` with zero at ``col``."""
    a, b = row[col], piv[col]
    g = gcd(a, b)
    ra, rb = b // g, a // g
    out = {c: ra * v for c, v in row.items()}
    for c, v in piv.items():
        w = out.get(c, 0) - rb * v
        if w:
            out[c] = w
        else:
            out.pop(c, None)
    return _primitive(out)


def echelon(rows: Iterable) -> list[tuple[int, dict[int, int]]]:
    """Fraction-free row echelon form.

    Returns ``(pivot_column, row)`` pairs in increasing pivot order; every
    returned row is a primitive integer row whose smallest column is its
    pivot.
    """
    remaining = [r for r in (integer_row(r) for r in rows) if r]
    out = []
    while remaining:
        col = min(min(r) for r in remaining)
        best = None
        for i, r in enumerate(remaining):
            v = r.get(col)
            if v is None:
                continue
            key = (abs(v), len(r))
            if best is None or key < best[0]:
                best = (key, i)
        piv = remaining.pop(best[1])
        nxt = []
        for r in remaining:
            if col in r:
                r = _eliminate(r, piv, col)
                if not r:
                    continue
            nxt.append(r)
        remaining = nxt
        out.append((col, piv))
    return out


def rref(rows: Iterable) -> tuple[list[dict[int, Fraction]], list[int]]:
    """Reduced row echelon form over Q (pivot entries equal to 1)."""
    ech = echelon(rows)
    pivots = [c for c, _ in ech]
    reduced: dict[int, dict[int, Fraction]] = {}
    for col, row in reversed(ech):
        lead = row[col]
        r = {c: Fraction(v, lead) for c, v in row.items()}
        for pc in [c for c in r if c != col and c in reduced]:
            f = r.pop(pc)
            for c, v in reduced[pc].items():
                if c == pc:
                    continue
                w = r.get(c, 0) - f * v
                if w:
                    r[c] = w
                else:
                    r.pop(c, None)
        reduced[col] = r
    return [reduced[c] for c in pivots], pivots


def rank(rows: Iterable) -> int:
    return len(echelon(rows))


def nullspace(rows: Iterable, ncols: int) -> list[list[Fraction]]:
    """Basis of the right kernel, one vector per free column.

    The vector attached to free column ``f`` has a 1 at ``f`` and 0 at every
    other free column, so coordinates of a kernel element in this basis are
    simply its entries at the free columns.
    """
    R, pivots = rref(rows)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for pc, row in zip(pivots, R):
            x = row.get(f)
            if x:
                v[pc] = -x
        basis.append(v)
    return basis


def nullspace_free_columns(rows: Iterable, ncols: int) -> list[int]:
    pivset = {c for c, _ in echelon(rows)}
    return [c for c in range(ncols) if c not in pivset]


def solve(rows: Sequence, rhs: Sequence, ncols: int) -> list[Fraction]:
    """Unique solution of ``A x = rhs`` (A may be overdetermined)."""
    aug = []
    for row, b in zip(rows, rhs):
        d = _as_dict(row)
        if b:
            d[ncols] = b
        aug.append(d)
    R, pivots = rref(aug)
    if ncols in pivots:
        raise InconsistentSystem("linear system has no solution")
    if len(pivots) < ncols:
        raise SingularSystem(f"solution not unique: rank {len(pivots)} < {ncols}")
    x = [Fraction(0)] * ncols
    for pc, row in zip(pivots, R):
        x[pc] = row.get(ncols, Fraction(0))
    return x


def det(M: Sequence[Sequence]) -> Fraction:
    """Determinant by Bareiss fraction-free elimination (exact)."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    den = 1
    for row in M:
        for v in row:
            if isinstance(v, Fraction):
                den = _lcm(den, v.denominator)
    A = [[int(v * den) for v in row] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return Fraction(sign * A[n - 1][n - 1], den ** n)


class IncrementalEchelon:
    """Echelon basis grown one vector at a time (used for span saturation)."""

    def __init__(self):
        self._rows: dict[int, dict[int, int]] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, vec) -> dict[int, int]:
        row = integer_row(vec)
        while row:
            c = min(row)
            piv = self._rows.get(c)
            if piv is None:
                break
            row = _eliminate(row, piv, c)
        return row

    def add(self, vec) -> bool:
        row = self.reduce(vec)
        if not row:
            return False
        self._rows[min(row)] = row
        return True


# dense helpers -----------------------------------------------------------

def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(A):
    return [list(col) for col in zip(*A)]


def matmul(A, B):
    Bt = transpose(B)
    return [[sum((a * b for a, b in zip(row, col) if a and b), Fraction(0)) for col in Bt] for row in A]


def matvec(A, v):
    return [sum((a * b for a, b in zip(row, v) if a and b), Fraction(0)) for row in A]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A, c):
    return [[c * a for a in row] for row in A]


def is_zero_matrix(A) -> bool:
    return all(not v for row in A for v in row)
