"""Special fibre of the minimal regular model of X0(p) at a place above p.

The dual graph has two extremal components ``C_inf`` and ``C_0`` joined by
``s = g + 1`` branches, one per supersingular point.  Branch ``n`` has width
``w_n`` in {1, 2, 3} and ``w_n * e - 1`` interior components ``C_{n,m}``,
``1 <= m <= w_n e - 1``.  ``C_{n,0}`` is an alias of ``C_inf`` and
``C_{n, w_n e}`` an alias of ``C_0``.

Components are ordered as ``C_inf``, the interior of branch 1, ..., the
interior of branch s, ``C_0``; branches are listed by increasing width so
the (at most two) exceptional ones come last.

All intersection numbers are pure rationals in units of ``log #k(v)``
(``= f_v log p``); the logarithm is never materialised here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import linalg
from .encoding import frac_str
from .errors import (
    ComponentOutOfRange,
    InternalInvariantError,
    InvalidPermutation,
    NonIntegralMass,
    NonPrime,
    PTooSmall,
)
from .primes import is_prime

__all__ = [
    "FiberParams",
    "Branch",
    "Component",
    "C_INF",
    "C_ZERO",
    "interior",
    "SpecialFiber",
    "VerticalDivisor",
    "IntersectionMatrix",
    "genus_x0",
    "exceptional_counts",
    "build_special_fiber",
    "intersection_matrix",
    "solve_vertical_divisor",
    "closed_form_phi",
    "implied_zero_coefficients",
    "phi_omega",
    "cuspidal_divisor_class",
    "fricke_involution",
    "full_fiber",
]


def exceptional_counts(p: int) -> tuple[int, int]:
    """(a2, a3): number of supersingular points with j = 1728 resp. j = 0."""
    return int(p % 4 == 3), int(p % 3 == 2)


def genus_x0(p: int) -> int:
    """Genus of X0(p) for a prime p >= 5, from the Eichler mass formula."""
    if not is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if p < 5:
        raise PTooSmall(f"mass formula needs p >= 5, got {p}")
    a2, a3 = exceptional_counts(p)
    s = Fraction(p - 1, 12) + Fraction(a2, 2) + Fraction(2 * a3, 3)
    if s.denominator != 1:
        raise NonIntegralMass(f"branch count {s} is not an integer for p={p}")
    return int(s) - 1


@dataclass(frozen=True)
class FiberParams:
    p: int
    e: int = 1
    f: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise NonPrime(f"{self.p} is not prime")
        if self.p <= 17:
            raise PTooSmall(f"primes must be > 17, got {self.p}")
        for name in ("e", "f"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")


@dataclass(frozen=True)
class Branch:
    n: int
    w: int
    interior_length: int


@dataclass(frozen=True, order=True)
class Component:
    """A fibre component: kind is "inf", "zero" or "int" (interior C_{n,m})."""

    kind: str
    n: int = 0
    m: int = 0

    def label(self) -> str:
        if self.kind == "inf":
            return "C_inf"
        if self.kind == "zero":
            return "C_0"
        return f"C_{{{self.n},{self.m}}}"

    def to_json(self) -> dict:
        if self.kind == "int":
            return {"t": "int", "n": self.n, "m": self.m}
        return {"t": self.kind}

    @classmethod
    def from_json(cls, obj: dict) -> "Component":
        t = obj["t"]
        if t == "int":
            return interior(obj["n"], obj["m"])
        if t in ("inf", "zero"):
            return cls(t)
        raise ValueError(f"unknown component type {t!r}")


C_INF = Component("inf")
C_ZERO = Component("zero")


def interior(n: int, m: int) -> Component:
    return Component("int", n, m)


@dataclass(frozen=True)
class SpecialFiber:
    params: FiberParams
    branches: tuple[Branch, ...]
    s: int
    g: int

    @property
    def p(self) -> int:
        return self.params.p

    @property
    def e(self) -> int:
        return self.params.e

    @cached_property
    def basis(self) -> tuple[Component, ...]:
        comps = [C_INF]
        for b in self.branches:
            comps.extend(interior(b.n, m) for m in range(1, b.interior_length + 1))
        comps.append(C_ZERO)
        return tuple(comps)

    @cached_property
    def _index(self) -> dict[Component, int]:
        return {c: i for i, c in enumerate(self.basis)}

    def __len__(self) -> int:
        return len(self.basis)

    def branch(self, n: int) -> Branch:
        if not 1 <= n <= self.s:
            raise ComponentOutOfRange(f"branch {n} not in 1..{self.s}")
        return self.branches[n - 1]

    def component(self, n: int, m: int) -> Component:
        """C_{n,m} with the extremal aliases m = 0 and m = w_n e resolved."""
        b = self.branch(n)
        top = b.w * self.e
        if not 0 <= m <= top:
            raise ComponentOutOfRange(f"m={m} outside 0..{top} on branch {n}")
        if m == 0:
            return C_INF
        if m == top:
            return C_ZERO
        return interior(n, m)

    def resolve(self, comp: Component) -> Component:
        if comp.kind == "int":
            return self.component(comp.n, comp.m)
        if comp in (C_INF, C_ZERO):
            return comp
        raise ComponentOutOfRange(f"unknown component {comp!r}")

    def index(self, comp: Component) -> int:
        return self._index[self.resolve(comp)]

    def eichler_mass(self) -> Fraction:
        return sum((Fraction(1, b.w) for b in self.branches), Fraction(0))


def build_special_fiber(params: FiberParams) -> SpecialFiber:
    p, e = params.p, params.e
    a2, a3 = exceptional_counts(p)
    s = Fraction(p - 1, 12) + Fraction(a2, 2) + Fraction(2 * a3, 3)
    if s.denominator != 1:
        raise NonIntegralMass(f"branch count {s} is not an integer for p={p}")
    s = int(s)
    widths = [1] * (s - a2 - a3) + [2] * a2 + [3] * a3
    branches = tuple(Branch(n, w, w * e - 1) for n, w in enumerate(widths, start=1))
    fib = SpecialFiber(params, branches, s, s - 1)
    if fib.eichler_mass() != Fraction(p - 1, 12):
        raise NonIntegralMass(f"Eichler mass {fib.eichler_mass()} != (p-1)/12 for p={p}")
    return fib


@dataclass(frozen=True)
class VerticalDivisor:
    """Rational combination of the components of one fibre.

    ``values`` follows ``fiber.basis``.  By convention the coefficient at
    ``C_inf`` vanishes; divisors that deliberately break this convention
    (the Fricke-antisymmetric cuspidal class, the full fibre) carry
    ``exempt=True``.
    """

    fiber: SpecialFiber
    values: tuple[Fraction, ...]
    exempt: bool = field(default=False, compare=False)

    def __post_init__(self):
        if len(self.values) != len(self.fiber.basis):
            raise ValueError("coefficient vector does not match the fibre basis")
        if not self.exempt and self.values[0] != 0:
            raise InternalInvariantError("non-exempt vertical divisor with non-zero C_inf coefficient")

    @classmethod
    def from_values(cls, fiber: SpecialFiber, values: Sequence) -> "VerticalDivisor":
        vals = tuple(Fraction(v) for v in values)
        return cls(fiber, vals, exempt=vals[0] != 0)

    def __getitem__(self, comp: Component) -> Fraction:
        return self.values[self.fiber.index(comp)]

    def coefficient(self, n: int, m: int) -> Fraction:
        return self[self.fiber.component(n, m)]

    def items(self):
        return zip(self.fiber.basis, self.values)

    def _check(self, other: "VerticalDivisor"):
        if other.fiber != self.fiber:
            raise ValueError("divisors live on different fibres")

    def __add__(self, other: "VerticalDivisor") -> "VerticalDivisor":
        self._check(other)
        return VerticalDivisor.from_values(self.fiber, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other: "VerticalDivisor") -> "VerticalDivisor":
        return self + (-other)

    def __neg__(self) -> "VerticalDivisor":
        return VerticalDivisor.from_values(self.fiber, [-a for a in self.values])

    def __mul__(self, c) -> "VerticalDivisor":
        c = Fraction(c)
        return VerticalDivisor.from_values(self.fiber, [c * a for a in self.values])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.values)

    def min_coefficient(self) -> Fraction:
        return min(self.values)

    def to_json(self) -> dict:
        prm = self.fiber.params
        return {
            "p": prm.p,
            "e": prm.e,
            "f": prm.f,
            "unit": "log #k(v) = f*log(p)",
            "exempt_from_c_inf_convention": self.exempt,
            "coefficients": [
                {"component": c.to_json(), "value": frac_str(v)} for c, v in self.items()
            ],
        }


def full_fiber(fiber: SpecialFiber) -> VerticalDivisor:
    return VerticalDivisor(fiber, tuple(Fraction(1) for _ in fiber.basis), exempt=True)


def _zero(fiber: SpecialFiber) -> VerticalDivisor:
    return VerticalDivisor(fiber, tuple(Fraction(0) for _ in fiber.basis))


@dataclass(frozen=True)
class IntersectionMatrix:
    fiber: SpecialFiber
    rows: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.rows)

    def apply(self, vec) -> tuple[Fraction, ...]:
        if isinstance(vec, VerticalDivisor):
            vec = vec.values
        return tuple(sum((Fraction(a) * x for a, x in zip(row, vec) if a), Fraction(0)) for row in self.rows)

    def block(self, n: int) -> list[list[int]]:
        """The tridiagonal block on the interior of branch n."""
        b = self.fiber.branch(n)
        if b.interior_length == 0:
            return []
        i0 = self.fiber.index(interior(n, 1))
        sl = range(i0, i0 + b.interior_length)
        return [[self.rows[i][j] for j in sl] for i in sl]

    def is_symmetric(self) -> bool:
        n = len(self.rows)
        return all(self.rows[i][j] == self.rows[j][i] for i in range(n) for j in range(i))

    def row_sums(self) -> list[int]:
        return [sum(r) for r in self.rows]

    def to_json(self) -> dict:
        prm = self.fiber.params
        return {
            "p": prm.p,
            "e": prm.e,
            "f": prm.f,
            "unit": "log #k(v) = f*log(p)",
            "basis": [c.to_json() for c in self.fiber.basis],
            "matrix": [list(r) for r in self.rows],
        }


def intersection_matrix(fiber: SpecialFiber) -> IntersectionMatrix:
    n = len(fiber.basis)
    M = [[0] * n for _ in range(n)]
    inf, zero = 0, n - 1
    M[inf][inf] = -fiber.s
    M[zero][zero] = -fiber.s

    def link(i, j):
        M[i][j] += 1
        M[j][i] += 1

    for b in fiber.branches:
        L = b.interior_length
        if L == 0:
            # e = 1, w = 1: the branch is a single edge C_inf -- C_0
            link(inf, zero)
            continue
        idx = [fiber.index(interior(b.n, m)) for m in range(1, L + 1)]
        for i in idx:
            M[i][i] = -2
        for i, j in zip(idx, idx[1:]):
            link(i, j)
        link(inf, idx[0])
        link(idx[-1], zero)
    return IntersectionMatrix(fiber, tuple(tuple(r) for r in M))


def _check_target(fiber: SpecialFiber, target: Component) -> Component:
    try:
        return fiber.resolve(target)
    except ComponentOutOfRange:
        raise
    except Exception as exc:  # malformed component
        raise ComponentOutOfRange(str(exc)) from exc


def solve_vertical_divisor(fiber: SpecialFiber, target: Component) -> VerticalDivisor:
    """Solve M.phi = delta_target - delta_inf with phi(C_inf) = 0 by elimination."""
    target = _check_target(fiber, target)
    M = intersection_matrix(fiber)
    n = len(M)
    rhs = [0] * n
    rhs[fiber.index(target)] += 1
    rhs[0] -= 1
    rows = [list(r) for r in M.rows]
    norm = [0] * n
    norm[0] = 1
    rows.append(norm)
    rhs.append(0)
    x = linalg.solve(rows, rhs, n)
    return VerticalDivisor(fiber, tuple(x))


def closed_form_phi(fiber: SpecialFiber, target: Component) -> VerticalDivisor:
    """Closed-form vertical divisor for a point specialising on ``target``."""
    target = _check_target(fiber, target)
    if target == C_INF:
        return _zero(fiber)
    p, e = fiber.p, fiber.e
    vals = []
    if target == C_ZERO:
        for comp in fiber.basis:
            if comp == C_INF:
                vals.append(Fraction(0))
            elif comp == C_ZERO:
                vals.append(Fraction(-12 * e, p - 1))
            else:
                w = fiber.branch(comp.n).w
                vals.append(Fraction(-12 * comp.m, (p - 1) * w))
        return VerticalDivisor(fiber, tuple(vals))

    n0, m0 = target.n, target.m
    w0 = fiber.branch(n0).w
    slope = Fraction(m0, w0 * e) * (1 - Fraction(12, (p - 1) * w0))
    beta = Fraction(-12 * m0, (p - 1) * w0 * e)
    for comp in fiber.basis:
        if comp == C_INF:
            vals.append(Fraction(0))
        elif comp == C_ZERO:
            vals.append(beta * e)
        elif comp.n == n0:
            m = comp.m
            vals.append((slope - 1) * m if m <= m0 else slope * m - m0)
        else:
            vals.append(beta * Fraction(comp.m, fiber.branch(comp.n).w))
    return VerticalDivisor(fiber, tuple(vals))


def implied_zero_coefficients(fiber: SpecialFiber, target: Component) -> list[Fraction]:
    """C_0 coefficient implied by each branch's closed formula evaluated at m = w_n e.

    All entries agree; this is the consistency condition between the two
    regimes m <= m0 and m >= m0 on the target branch and the other branches.
    """
    target = _check_target(fiber, target)
    p, e = fiber.p, fiber.e
    out = []
    if target == C_INF:
        return [Fraction(0)] * fiber.s
    if target == C_ZERO:
        return [Fraction(-12, (p - 1) * b.w) * b.w * e for b in fiber.branches]
    n0, m0 = target.n, target.m
    w0 = fiber.branch(n0).w
    slope = Fraction(m0, w0 * e) * (1 - Fraction(12, (p - 1) * w0))
    beta = Fraction(-12 * m0, (p - 1) * w0 * e)
    for b in fiber.branches:
        top = b.w * e
        out.append(slope * top - m0 if b.n == n0 else beta * Fraction(top, b.w))
    return out


def phi_omega(fiber: SpecialFiber) -> VerticalDivisor:
    """Vertical part of the relative dualizing sheaf: (g - 1) * Phi_{C_0}."""
    return (fiber.g - 1) * closed_form_phi(fiber, C_ZERO)


def cuspidal_divisor_class(fiber: SpecialFiber) -> VerticalDivisor:
    """Fricke-antisymmetric representative of the cuspidal divisor (0) - (inf).

    Coefficient 6/(p-1) * (e - 2m/w_n) at C_{n,m}; non-zero at C_inf.
    """
    p, e = fiber.p, fiber.e
    c = Fraction(6, p - 1)
    vals = []
    for comp in fiber.basis:
        if comp == C_INF:
            vals.append(c * e)
        elif comp == C_ZERO:
            vals.append(-c * e)
        else:
            vals.append(c * (e - Fraction(2 * comp.m, fiber.branch(comp.n).w)))
    return VerticalDivisor(fiber, tuple(vals), exempt=True)


def fricke_involution(fiber: SpecialFiber, div: VerticalDivisor, branch_perm: Sequence[int] | None = None) -> VerticalDivisor:
    """Pull ``div`` back along C_{n,m} -> C_{perm(n), w_n e - m}.

    ``branch_perm[n-1]`` is the image of branch n (1-based); it must be an
    involution preserving widths (Frobenius of F_{p^2}/F_p on the
    supersingular points).  The default is the identity permutation.
    """
    if div.fiber != fiber:
        raise ValueError("divisor does not live on this fibre")
    s = fiber.s
    perm = list(range(1, s + 1)) if branch_perm is None else list(branch_perm)
    if sorted(perm) != list(range(1, s + 1)):
        raise InvalidPermutation(f"{perm} is not a permutation of 1..{s}")
    if any(perm[k - 1] != n for n, k in enumerate(perm, start=1)):
        raise InvalidPermutation(f"{perm} is not an involution")
    for n, k in enumerate(perm, start=1):
        if fiber.branch(n).w != fiber.branch(k).w:
            raise InvalidPermutation(f"branch {n} (w={fiber.branch(n).w}) sent to branch {k} (w={fiber.branch(k).w})")
    e = fiber.e
    vals = []
    for comp in fiber.basis:
        if comp == C_INF:
            vals.append(div[C_ZERO])
        elif comp == C_ZERO:
            vals.append(div[C_INF])
        else:
            w = fiber.branch(comp.n).w
            vals.append(div[fiber.component(perm[comp.n - 1], w * e - comp.m)])
    return VerticalDivisor.from_values(fiber, vals)
