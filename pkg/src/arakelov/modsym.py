"""Weight-2 modular symbols for Gamma0(p), p prime.

Manin symbols (c:d) run over P^1(F_p).  Index ``i < p`` stands for
(i:1), the symbol {0, 1/i} (``i = 0`` is {0, inf}); index ``p`` stands for
(1:0) = {inf, 0}.  The symbol of g = [[a, b], [c, d]] in SL2(Z) is
g{0, inf} = {b/d, a/c}.

The space M is the Q-span of the symbols modulo

    x + x S = 0,    x + x T + x T^2 = 0,

with (c:d)S = (d:-c) and (c:d)T = (d:-c-d).  Boundaries use
delta{alpha, beta} = [beta] - [alpha]; there are two cusps, 0 and inf, and
a fraction x/y is equivalent to inf exactly when p | y.  The cuspidal
subspace S = ker(delta) has dimension 2g and M = S + (Eisenstein line).

Operator matrices act on column coordinate vectors: column j holds the
image of basis vector j.  Hecke operators use Cremona's Heilbronn matrices;
the Fricke involution w_p is computed geometrically from z -> -1/(pz) and
the continued-fraction (Manin) trick.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd

from . import linalg
from .encoding import frac_str
from .errors import BadPrime, InternalInvariantError, NonPrime, PTooSmall, SturmNotReached
from .fiber import genus_x0
from .heights import brumer_gate
from .primes import is_prime, primes_between

__all__ = [
    "ManinSpace",
    "OperatorMatrix",
    "WindingReport",
    "build_manin_space",
    "heilbronn_cremona",
    "hecke_matrix",
    "atkin_lehner",
    "sturm_bound",
    "winding_dimension",
    "winding_report",
    "brumer_scan",
    "reports_to_csv",
    "reports_to_json",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("p", "g", "dim_plus", "dim_minus", "dim_Je", "ratio", "brumer_weak")


def _round_half_away(a: int, b: int) -> int:
    """Nearest integer to a/b, ties away from zero."""
    q, r = divmod(2 * a + b, 2 * b)  # floor(a/b + 1/2)
    if r == 0 and (a < 0) != (b < 0):
        q -= 1  # exact tie on the negative side: round toward -inf, i.e. away from zero
    return q


def heilbronn_cremona(ell: int) -> list[tuple[int, int, int, int]]:
    """Cremona's Heilbronn matrices [a, b, c, d] of determinant ``ell``."""
    if not is_prime(ell):
        raise BadPrime(f"{ell} is not prime")
    if ell == 2:
        return [(1, 0, 0, 2), (2, 0, 0, 1), (2, 1, 0, 1), (1, 0, 1, 2)]
    out = [(1, 0, 0, ell)]
    half = (ell - 1) // 2
    for r in range(-half, half + 1):
        x1, x2, y1, y2, a, b = ell, -r, 0, 1, -ell, r
        out.append((x1, x2, y1, y2))
        while b != 0:
            q = _round_half_away(a, b)
            c = a - b * q
            a, b = -b, c
            x1, x2 = x2, q * x2 - x1
            y1, y2 = y2, q * y2 - y1
            out.append((x1, x2, y1, y2))
    return out


def _convergents(a: int, b: int) -> list[tuple[int, int]]:
    """Convergents p_j/q_j of a/b (b > 0), j = 0..r."""
    out = []
    p0, q0, p1, q1 = 0, 1, 1, 0  # p_{-2}/q_{-2}, p_{-1}/q_{-1}
    while b:
        t, r = divmod(a, b)
        p0, q0, p1, q1 = p1, q1, t * p1 + p0, t * q1 + q0
        out.append((p1, q1))
        a, b = b, r
    return out


@dataclass(frozen=True)
class OperatorMatrix:
    label: str
    matrix: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def rows(self) -> list[list[Fraction]]:
        return [list(r) for r in self.matrix]

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(f"{self.label}*{other.label}", _freeze(linalg.matmul(self.matrix, other.matrix)))

    def trace(self) -> Fraction:
        return sum((self.matrix[i][i] for i in range(self.dim)), Fraction(0))

    def apply(self, vec) -> list[Fraction]:
        return linalg.matvec(self.matrix, vec)

    def commutes_with(self, other: "OperatorMatrix") -> bool:
        return (self @ other).matrix == (other @ self).matrix

    def is_involution(self) -> bool:
        return [list(r) for r in (self @ self).matrix] == linalg.identity(self.dim)

    def eigenspace_dim(self, lam) -> int:
        A = [[v - (lam if i == j else 0) for j, v in enumerate(row)] for i, row in enumerate(self.matrix)]
        return self.dim - linalg.rank(A)

    def to_json(self) -> dict:
        return {"label": self.label, "matrix": [[frac_str(v) for v in r] for r in self.matrix]}


def _freeze(A) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(v) for v in row) for row in A)


class ManinSpace:
    """Modular symbols M for Gamma0(p) with its cuspidal subspace S.

    Built by ``build_manin_space``; treat as immutable.
    """

    def __init__(self, p: int, gens: list[int], coords: list[dict[int, int]], denom: int):
        self.p = p
        self.g = genus_x0(p)
        self.gens = tuple(gens)  # symbol index of each basis vector of M
        self._coords = coords  # symbol index -> integer coordinates (scaled by denom)
        self.denom = denom
        self.dim = len(gens)

        bnd = [self._boundary_of_symbol(i) for i in gens]
        # kernel of the boundary; coordinates in S are the entries at free columns
        rows = [{j: bnd[j][k] for j in range(self.dim) if bnd[j][k]} for k in range(2)]
        self.cuspidal_basis = tuple(tuple(v) for v in linalg.nullspace(rows, self.dim))
        self.cuspidal_free = tuple(linalg.nullspace_free_columns(rows, self.dim))
        self.boundary_matrix = tuple(tuple(Fraction(bnd[j][k]) for j in range(self.dim)) for k in range(2))
        if len(self.cuspidal_basis) != 2 * self.g:
            raise InternalInvariantError(f"cuspidal dimension {len(self.cuspidal_basis)} != 2g = {2 * self.g} at p={self.p}")

    @property
    def num_symbols(self) -> int:
        return self.p + 1

    @property
    def cuspidal_dim(self) -> int:
        return len(self.cuspidal_basis)

    # symbols ---------------------------------------------------------------

    def symbol_index(self, c: int, d: int) -> int:
        p = self.p
        c %= p
        d %= p
        if d:
            return c * pow(d, -1, p) % p
        if not c:
            raise ValueError("(0:0) is not a point of P^1")
        return p

    def symbol_pair(self, i: int) -> tuple[int, int]:
        return (i, 1) if i < self.p else (1, 0)

    def symbol_vector(self, i: int) -> list[Fraction]:
        """Class of symbol ``i`` in M, as a coordinate vector."""
        v = [Fraction(0)] * self.dim
        for j, x in self._coords[i].items():
            v[j] = Fraction(x, self.denom)
        return v

    def _boundary_of_symbol(self, i: int) -> tuple[int, int]:
        # (c:d) = {b/d, a/c}: the endpoint a/c is at inf iff p | c, b/d iff p | d
        if i == 0:
            return (-1, 1)  # [inf] - [0], cusp order (0, inf)
        if i == self.p:
            return (1, -1)
        return (0, 0)

    def boundary(self, vec) -> tuple[Fraction, Fraction]:
        """delta(vec) as coefficients on the cusps (0, inf)."""
        return tuple(sum((b[j] * vec[j] for j in range(self.dim)), Fraction(0)) for b in self.boundary_matrix)

    # operators on M (integer scaled) ---------------------------------------

    def _accumulate(self, counts: dict[int, int]) -> dict[int, int]:
        out: dict[int, int] = {}
        for s, n in counts.items():
            for j, x in self._coords[s].items():
                out[j] = out.get(j, 0) + n * x
        return {j: x for j, x in out.items() if x}

    def _hecke_columns(self, ell: int) -> list[dict[int, int]]:
        """Columns of denom * T_ell on M (integer sparse dicts)."""
        H = heilbronn_cremona(ell)
        cols = []
        for i in self.gens:
            u, v = self.symbol_pair(i)
            counts: dict[int, int] = {}
            for a, b, c, d in H:
                k = self.symbol_index(u * a + v * c, u * b + v * d)
                counts[k] = counts.get(k, 0) + 1
            cols.append(self._accumulate(counts))
        return cols

    def _fricke_symbol(self, i: int) -> dict[int, int]:
        """w_p applied to symbol ``i``, as symbol multiplicities."""
        p = self.p
        if i == 0:
            return {p: 1}  # {0, inf} -> {inf, 0}
        if i == p:
            return {0: 1}
        # {0, 1/i} -> {inf, -i/p} = {inf, 0} + {0, -i/p}
        counts = {p: 1, 0: 1}  # {inf,0} and the j = -1 term {0, inf} of the expansion
        prev_q = 0  # q_{-1}
        for j, (_, q) in enumerate(_convergents(-i, p)):
            k = self.symbol_index(q, prev_q if j % 2 else -prev_q)  # (q_j : (-1)^(j-1) q_{j-1})
            counts[k] = counts.get(k, 0) + 1
            prev_q = q
        return counts

    def _fricke_columns(self) -> list[dict[int, int]]:
        return [self._accumulate(self._fricke_symbol(i)) for i in self.gens]

    def _dense(self, cols: list[dict[int, int]]) -> list[list[Fraction]]:
        A = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for j, col in enumerate(cols):
            for i, x in col.items():
                A[i][j] = Fraction(x, self.denom)
        return A

    def hecke_on_m(self, ell: int) -> list[list[Fraction]]:
        self._check_ell(ell)
        return self._dense(self._hecke_columns(ell))

    def fricke_on_m(self) -> list[list[Fraction]]:
        return self._dense(self._fricke_columns())

    def star_on_m(self) -> list[list[Fraction]]:
        """Complex conjugation (c:d) -> (-c:d)."""
        cols = []
        for i in self.gens:
            u, v = self.symbol_pair(i)
            cols.append(self._accumulate({self.symbol_index(-u, v): 1}))
        return self._dense(cols)

    def _check_ell(self, ell: int):
        if not is_prime(ell):
            raise BadPrime(f"{ell} is not prime")
        if ell == self.p:
            raise BadPrime(f"T_{ell} is not defined by Heilbronn matrices at level {self.p}")

    def restrict(self, A) -> list[list[Fraction]]:
        """Matrix of an S-stable operator on M, restricted to the cuspidal basis."""
        out = [[Fraction(0)] * self.cuspidal_dim for _ in range(self.cuspidal_dim)]
        for k, b in enumerate(self.cuspidal_basis):
            img = linalg.matvec(A, b)
            if any(self.boundary(img)):
                raise InternalInvariantError("operator does not preserve the cuspidal subspace")
            for r, f in enumerate(self.cuspidal_free):
                out[r][k] = img[f]
        return out

    # winding element ---------------------------------------------------------

    @cached_property
    def eisenstein_vector(self) -> tuple[Fraction, ...]:
        """Generator of ker(T_2 - 3) on M, the Eisenstein line."""
        T = self.hecke_on_m(2)
        A = [[v - (3 if i == j else 0) for j, v in enumerate(r)] for i, r in enumerate(T)]
        ker = linalg.nullspace(A, self.dim)
        if len(ker) != 1:
            raise InternalInvariantError(f"Eisenstein line has dimension {len(ker)} at p={self.p}")
        return tuple(ker[0])

    @cached_property
    def winding_element(self) -> tuple[Fraction, ...]:
        """{0, inf} = (0:1) in M; its boundary is [inf] - [0]."""
        return tuple(self.symbol_vector(0))

    @cached_property
    def winding_projection(self) -> tuple[Fraction, ...]:
        """Projection of {0, inf} to S along the Eisenstein line (in M coordinates)."""
        e = self.winding_element
        E = self.eisenstein_vector
        be, bE = self.boundary(e), self.boundary(E)
        k = 0 if bE[0] else 1
        t = be[k] / bE[k]
        v = tuple(x - t * y for x, y in zip(e, E))
        if any(self.boundary(v)):
            raise InternalInvariantError("winding projection is not cuspidal")
        return v

    def cuspidal_coordinates(self, vec) -> list[Fraction]:
        """Coordinates of a cuspidal element of M in the cuspidal basis."""
        if any(self.boundary(vec)):
            raise ValueError("vector is not cuspidal")
        return [vec[f] for f in self.cuspidal_free]


def build_manin_space(p: int) -> ManinSpace:
    """Quotient of the p+1 Manin symbols by the 2- and 3-term relations."""
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if p <= 3:
        raise PTooSmall(f"need p > 3, got {p}")
    N = p + 1

    def idx(c, d):
        c %= p
        d %= p
        return c * pow(d, -1, p) % p if d else p

    pairs = [(i, 1) for i in range(p)] + [(1, 0)]
    s_img = [idx(d, -c) for c, d in pairs]
    t_img = [idx(d, -c - d) for c, d in pairs]

    # 2-term relations: x_i = sign * x_rep, or x_i = 0 on S-fixed points
    rep: list[tuple[int, int]] = [(0, 0)] * N
    for i in range(N):
        j = s_img[i]
        if j == i:
            rep[i] = (0, i)
        elif i < j:
            rep[i] = (1, i)
            rep[j] = (-1, i)
    free = sorted({r for sgn, r in rep if sgn})
    col = {r: k for k, r in enumerate(free)}

    # 3-term relations in terms of the S-representatives
    rows = []
    seen = set()
    for i in range(N):
        if i in seen:
            continue
        orbit = (i, t_img[i], t_img[t_img[i]])
        seen.update(orbit)
        row: dict[int, int] = {}
        for k in orbit:
            sgn, r = rep[k]
            if sgn:
                row[col[r]] = row.get(col[r], 0) + sgn
        row = {c: v for c, v in row.items() if v}
        if row:
            rows.append(row)

    R, pivots = linalg.rref(rows)
    pivset = set(pivots)
    basis_cols = [c for c in range(len(free)) if c not in pivset]
    pos = {c: k for k, c in enumerate(basis_cols)}
    # each representative as a combination of basis representatives
    rep_coords: dict[int, dict[int, Fraction]] = {c: {pos[c]: Fraction(1)} for c in basis_cols}
    for pc, row in zip(pivots, R):
        rep_coords[pc] = {pos[c]: -v for c, v in row.items() if c != pc}

    denom = 1
    for d in rep_coords.values():
        for v in d.values():
            denom = denom * v.denominator // gcd(denom, v.denominator)
    coords: list[dict[int, int]] = []
    for i in range(N):
        sgn, r = rep[i]
        if not sgn:
            coords.append({})
            continue
        coords.append({j: int(sgn * v * denom) for j, v in rep_coords[col[r]].items()})
    gens = [free[c] for c in basis_cols]
    return ManinSpace(p, gens, coords, denom)


def hecke_matrix(space: ManinSpace, ell: int) -> OperatorMatrix:
    """T_ell on the cuspidal subspace."""
    space._check_ell(ell)
    return OperatorMatrix(f"T_{ell}", _freeze(space.restrict(space.hecke_on_m(ell))))


@dataclass(frozen=True)
class AtkinLehner:
    matrix: OperatorMatrix
    dim_plus: int
    dim_minus: int


def atkin_lehner(space: ManinSpace) -> AtkinLehner:
    """w_p on S with its eigenspace dimensions halved (abelian-variety dims)."""
    W = OperatorMatrix("w_p", _freeze(space.restrict(space.fricke_on_m())))
    plus, minus = W.eigenspace_dim(1), W.eigenspace_dim(-1)
    if plus % 2 or minus % 2 or plus + minus != space.cuspidal_dim:
        raise InternalInvariantError(f"w_p eigenspaces {plus}, {minus} on S of dimension {space.cuspidal_dim}")
    return AtkinLehner(W, plus // 2, minus // 2)


def sturm_bound(p: int) -> int:
    return -(-(p + 1) // 6)


def winding_dimension(space: ManinSpace, hecke_primes=None) -> int:
    """Dimension of J_e: rank of the Hecke module generated by the winding element.

    The module generated by the cuspidal projection of {0, inf} lies in the
    +1 part of S for the star involution, where its rank equals dim J_e.
    ``hecke_primes`` must contain every prime up to the Sturm bound
    ceil((p+1)/6) other than p; extra primes are allowed.
    """
    B = sturm_bound(space.p)
    needed = [q for q in primes_between(2, B) if q != space.p]
    if hecke_primes is None:
        hecke_primes = needed
    hecke_primes = sorted(set(hecke_primes))
    missing = sorted(set(needed) - set(hecke_primes))
    if missing:
        raise SturmNotReached(f"Hecke primes miss {missing} below the Sturm bound {B}")
    for q in hecke_primes:
        space._check_ell(q)
    if space.cuspidal_dim == 0:
        return 0
    v0 = space.winding_projection
    if not any(v0):
        return 0
    den = 1
    for x in v0:
        den = den * x.denominator // gcd(den, x.denominator)
    start = [int(x * den) for x in v0]
    # scaled operators generate the same module
    ops = [_int_dense(space._hecke_columns(q), space.dim) for q in hecke_primes]
    basis = linalg.IncrementalEchelon()
    basis.add(start)
    queue = [start]
    while queue:
        v = queue.pop()
        for T in ops:
            w = _int_matvec(T, v)
            if basis.add(dict(enumerate(w))):
                queue.append(w)
    return len(basis)


def _int_dense(cols, n):
    A = [[0] * n for _ in range(n)]
    for j, col in enumerate(cols):
        for i, x in col.items():
            A[i][j] = x
    return A


def _int_matvec(A, v):
    out = []
    for row in A:
        s = sum(a * b for a, b in zip(row, v) if a)
        out.append(s)
    g = 0
    for x in out:
        g = gcd(g, x)
    return [x // g for x in out] if g > 1 else out


@dataclass(frozen=True)
class WindingReport:
    p: int
    g: int
    dim_plus: int
    dim_minus: int
    dim_Je: int
    brumer_weak: bool

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.dim_Je, self.g) if self.g else Fraction(0)

    def row(self) -> list:
        return [self.p, self.g, self.dim_plus, self.dim_minus, self.dim_Je, frac_str(self.ratio), str(self.brumer_weak).lower()]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "g": self.g,
            "dim_plus": self.dim_plus,
            "dim_minus": self.dim_minus,
            "dim_Je": self.dim_Je,
            "ratio": frac_str(self.ratio),
            "brumer_weak": self.brumer_weak,
        }


def winding_report(p: int) -> WindingReport:
    space = build_manin_space(p)
    al = atkin_lehner(space)
    dJe = winding_dimension(space)
    if dJe > al.dim_minus:
        raise InternalInvariantError(f"dim J_e = {dJe} exceeds dim J^- = {al.dim_minus} at p={p}")
    if dJe >= 1:
        weak = brumer_gate(space.g, dJe).brumer_weak
    else:
        weak = Fraction(0) >= Fraction(space.g, 3) + 1
    return WindingReport(p, space.g, al.dim_plus, al.dim_minus, dJe, weak)


def brumer_scan(p_min: int, p_max: int, jobs: int = 1, exclude=()) -> list[WindingReport]:
    """One WindingReport per prime in [p_min, p_max], ordered by p."""
    if p_min <= 17:
        raise PTooSmall(f"brumer_scan works with primes > 17, got lower end {p_min}")
    ps = [p for p in primes_between(p_min, p_max) if p not in set(exclude)]
    if jobs > 1 and len(ps) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(winding_report, ps))
    return [winding_report(p) for p in ps]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def reports_to_json(reports) -> list[dict]:
    return [r.to_json() for r in reports]
