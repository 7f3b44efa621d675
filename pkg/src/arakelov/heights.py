"""Explicit height inequalities for X0(p) and the quadratic-point bound b(p).

Everything is exact.  Quantities that involve log p are ``BoundExpr``
values; genus-dependent and N0-dependent factors are folded into their
coefficients, so an expression belongs to the prime it was built for.
Unspecified O(.) constants come from a ``ConstantLedger``.

Pipeline of ``assemble_b`` (quadratic points, p > 71):

1. degree and height of the image W2 of the symmetric square in J0(p);
2. arithmetic Bezout for the intersection of two such surfaces;
3. inversion of Mumford's repulsion inequality;
4. comparison of the theta height with the j-height.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .bound import BoundExpr, as_bound, log_enclosure
from .encoding import frac_str
from .errors import (
    DimATooSmall,
    DimensionOverflow,
    GenusDegenerate,
    GonalityPrecondition,
    PDegenerate,
)
from .fiber import genus_x0
from .ledger import DEFAULT_LEDGER, ConstantLedger
from .primes import next_prime

__all__ = [
    "n0",
    "bruin_sup",
    "j_from_pairing",
    "j_from_pairing_expr",
    "theta_to_j",
    "theta_coefficient",
    "WdEstimate",
    "wd_estimate",
    "segre_degree_height",
    "BezoutTerms",
    "bezout_terms",
    "bezout_bound",
    "mumford",
    "mumford_invert",
    "quotient_degree_bound",
    "BrumerGate",
    "brumer_gate",
    "BTrace",
    "assemble_b",
    "err_mode_crossover",
    "CuspPairing",
    "cusp_pairing_relation",
    "ERR_MODES",
    "GONALITY_MIN_P",
]

ERR_MODES = ("p3", "autissier")
# X0(p) has gonality > 2 for p > 71 (Ogg)
GONALITY_MIN_P = 71


def n0(p: int) -> int:
    """Numerator of (p-1)/12 in lowest terms."""
    if p <= 17:
        warnings.warn(f"n0: p={p} is below the p > 17 convention", stacklevel=2)
    return Fraction(p - 1, 12).numerator


def bruin_sup(p: int, ledger: ConstantLedger = DEFAULT_LEDGER) -> Fraction:
    """Upper bound a*p^2 + b*p + c for sup g_mu over X0(p)(C)."""
    return ledger["bruin_a"] * p * p + ledger["bruin_b"] * p + ledger["bruin_c"]


def _integral_constant(mode: str, ledger: ConstantLedger) -> Fraction:
    if mode == "mu0":
        return ledger["a0_integral"]
    if mode == "mu_e":
        return ledger["ae_integral"]
    raise ValueError(f"mode must be 'mu0' or 'mu_e', got {mode!r}")


def j_from_pairing(p: int, pairing, ledger: ConstantLedger = DEFAULT_LEDGER, mode: str = "mu0") -> Fraction:
    """Upper bound for h_j(P) from the normalized pairing [P, inf]_mu.

    Returns ``(p+1) * (pairing + sup g_mu + A * (p+1))`` where A is
    ``a0_integral`` (mode ``mu0``) or ``ae_integral`` (mode ``mu_e``).
    The sup bound is the same for both measures.  The p*[P, Phi0] and
    log(2)/2 corrections are left out here; see ``j_from_pairing_expr``.
    """
    A = _integral_constant(mode, ledger)
    return (p + 1) * (Fraction(pairing) + bruin_sup(p, ledger) + A * (p + 1))


def j_from_pairing_expr(p: int, pairing, ledger: ConstantLedger = DEFAULT_LEDGER, mode: str = "mu0") -> BoundExpr:
    """``j_from_pairing`` plus the explicit lower-order terms.

    Adds ``p * 6 log p / (p-1)`` (pairing of P against the cuspidal vertical
    divisor, via j^*(inf) = p(0) + (inf)) and ``log(2)/2 <= 7/20``.
    """
    main = as_bound(j_from_pairing(p, pairing, ledger, mode))
    return main + BoundExpr.monomial(Fraction(6 * p, p - 1), 0, 1) + Fraction(7, 20)


def theta_coefficient(p: int) -> Fraction:
    """12(p+1)/(p-13); decreases to 12 as p grows."""
    if p <= 13:
        raise PDegenerate(f"12(p+1)/(p-13) needs p > 13, got {p}")
    return Fraction(12 * (p + 1), p - 13)


def theta_to_j(p: int, h_theta, ledger: ConstantLedger = DEFAULT_LEDGER, shifted: bool = True):
    """j-height bound from a Neron-Tate theta height.

    shifted: 12(p+1)/(p-13) * h + gamma p^3 (height of the shifted point);
    unshifted: 4 * 12(p+1)/(p-13) * h + gamma1 p^3 (height of P - inf; the
    factor 4 comes from the quadraticity of the theta height).

    The result is a Fraction for rational input and a BoundExpr otherwise.
    """
    coeff = theta_coefficient(p)
    if shifted:
        extra = ledger["gamma"] * p**3
    else:
        coeff *= 4
        extra = ledger["gamma1"] * p**3
    if isinstance(h_theta, BoundExpr):
        return coeff * h_theta + extra
    return coeff * Fraction(h_theta) + extra


@dataclass(frozen=True)
class WdEstimate:
    d: int
    deg_bound: BoundExpr
    height_bound: BoundExpr

    def __post_init__(self):
        if self.deg_bound.has_log():
            raise ValueError("degree bounds carry no log p factor")

    def to_json(self, p: int) -> dict:
        return {"d": self.d, "deg_bound": self.deg_bound.report(p), "height_bound": self.height_bound.report(p)}


def wd_estimate(p: int, d: int, ledger: ConstantLedger = DEFAULT_LEDGER) -> WdEstimate:
    """Theta-degree and Neron-Tate height of W_d (image of X0(p)^(d)).

    d=1: deg <= g, h <= g * c_MU log p (Zhang with mu_ess <= c_MU log p).
    d=2: deg <= 8 g^2, h <= 64 g^2 c_MU log p (needs gonality > 2, p > 71).
    """
    g = genus_x0(p)
    c = ledger["c_MU"]
    if d == 1:
        return WdEstimate(1, BoundExpr.const(g), BoundExpr.monomial(g * c, 0, 1))
    if d == 2:
        if p <= GONALITY_MIN_P:
            raise GonalityPrecondition(f"W_2 estimate needs p > {GONALITY_MIN_P}, got {p}")
        return WdEstimate(2, BoundExpr.const(8 * g * g), BoundExpr.monomial(64 * g * g * c, 0, 1))
    raise ValueError(f"d must be 1 or 2, got {d}")


def segre_degree_height(dV: int, dW: int, degV, degW, hV, hW):
    """Degree and height of the product V x W under the Segre embedding."""
    if dV < 0 or dW < 0:
        raise ValueError("dimensions must be non-negative")
    n = dV + dW
    degree = comb(n, dV) * degV * degW
    height = comb(n + 1, dV) * degV * hW + comb(n + 1, dW) * degW * hV
    return degree, height


@dataclass(frozen=True)
class BezoutTerms:
    main: BoundExpr
    error: BoundExpr

    @property
    def total(self) -> BoundExpr:
        return self.main + self.error


def _error_rate(p: int, ledger: ConstantLedger, err_mode: str) -> BoundExpr:
    if err_mode == "p3":
        return BoundExpr.monomial(ledger["c_bezout_err3"], 3, 0)
    if err_mode == "autissier":
        return BoundExpr.monomial(ledger["c_bezout_err1"], 1, 1)
    raise ValueError(f"err_mode must be one of {ERR_MODES}, got {err_mode!r}")


def bezout_terms(p, dV, dW, degV, degW, hV, hW, ledger=DEFAULT_LEDGER, err_mode="p3") -> BezoutTerms:
    """Main and error parts of the arithmetic Bezout bound."""
    g = genus_x0(p)
    n = dV + dW
    if dV < 0 or dW < 0:
        raise ValueError("dimensions must be non-negative")
    if n > g:
        raise DimensionOverflow(f"dV + dW = {n} exceeds g = {g}")
    degV, degW, hV, hW = (as_bound(_exact(x)) for x in (degV, degW, hV, hW))
    k = 4 * n0(p) ** 2
    main = Fraction(k**n, 2) * (
        (dW + 1) * comb(n + 1, dV) * hW * degV + (dV + 1) * comb(n + 1, dW) * hV * degW
    )
    if n == 0:
        error = BoundExpr()
    else:
        error = _error_rate(p, ledger, err_mode) * (Fraction(n * k ** (n - 1), 2) * comb(n, dV)) * degV * degW
    return BezoutTerms(main, error)


def _exact(x):
    if isinstance(x, BoundExpr):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact bounds")
    return Fraction(x)


def bezout_bound(p, dV, dW, degV, degW, hV, hW, ledger=DEFAULT_LEDGER, err_mode="p3") -> BoundExpr:
    """Upper bound on the theta height of a point isolated in V n W."""
    return bezout_terms(p, dV, dW, degV, degW, hV, hW, ledger, err_mode).total


def mumford(p: int, hP, hQ, ledger: ConstantLedger = DEFAULT_LEDGER):
    """Lower bound (g-2)/(4g) (hP + hQ) - c_mumford p^2 for h(P - Q)."""
    g = genus_x0(p)
    s = hP + hQ if isinstance(hP, BoundExpr) or isinstance(hQ, BoundExpr) else Fraction(hP) + Fraction(hQ)
    return Fraction(g - 2, 4 * g) * s - ledger["c_mumford"] * p * p


def mumford_invert(p: int, B, ledger: ConstantLedger = DEFAULT_LEDGER):
    """Largest h = h(P) = h(Q) compatible with h(P - Q) <= B."""
    g = genus_x0(p)
    if g <= 2:
        raise GenusDegenerate(f"Mumford inversion needs g >= 3, got g = {g} at p = {p}")
    B = B if isinstance(B, BoundExpr) else Fraction(B)
    return Fraction(2 * g, g - 2) * (B + ledger["c_mumford"] * p * p)


def quotient_degree_bound(dimJ: int, dimA: int) -> Fraction:
    """(dimJ - 1)/(dimA - 1): degree bound for the image of X0(p) in A."""
    if dimA < 2:
        raise DimATooSmall(f"need dimA >= 2, got {dimA}")
    if dimJ < dimA:
        raise DimATooSmall(f"need dimJ >= dimA, got {dimJ} < {dimA}")
    return Fraction(dimJ - 1, dimA - 1)


@dataclass(frozen=True)
class BrumerGate:
    brumer_weak: bool
    dn_max: int | float  # math.inf when dimJe < 2
    degree_one: bool

    def to_json(self) -> dict:
        dn = "inf" if self.dn_max == math.inf else self.dn_max
        return {"brumer_weak": self.brumer_weak, "dn_max": dn, "degree_one": self.degree_one}


def brumer_gate(g: int, dimJe: int) -> BrumerGate:
    """Weak Brumer test dimJe >= g/3 + 1 and the resulting d*n bound.

    With d the degree of the quadratic point's image and n the degree of
    X0(p) -> J_e, d*n <= (g-1)/(dimJe-1); d*n <= 2 forces d = 1.
    """
    if dimJe < 1 or g < dimJe:
        raise ValueError(f"need 1 <= dimJe <= g, got dimJe={dimJe}, g={g}")
    weak = Fraction(dimJe) >= Fraction(g, 3) + 1
    if dimJe < 2:
        return BrumerGate(weak, math.inf, False)
    dn = (g - 1) // (dimJe - 1)
    return BrumerGate(weak, dn, dn <= 2)


LEDGER_KEYS_B = ("c_MU", "c_mumford", "gamma1")


@dataclass(frozen=True)
class BTrace:
    p: int
    g: int
    n0: int
    err_mode: str
    wd: WdEstimate
    bezout_main: BoundExpr
    bezout_error: BoundExpr
    bezout_total: BoundExpr
    mumford_p2: BoundExpr
    h_point: BoundExpr
    h_point_without_p2: BoundExpr
    theta_coefficient: Fraction
    bound: BoundExpr
    bound_without_p2: BoundExpr
    ledger_used: dict

    def log_ratio(self) -> float:
        """log b(p) / log p (float, report only)."""
        return math.log(self.bound.evaluate(self.p)) / math.log(self.p)

    def to_json(self) -> dict:
        p = self.p
        lo, hi = log_enclosure(p)
        return {
            "p": p,
            "g": self.g,
            "n0": self.n0,
            "err_mode": self.err_mode,
            "log_p_enclosure": [frac_str(lo), frac_str(hi)],
            "w2": self.wd.to_json(p),
            "bezout_main": self.bezout_main.report(p),
            "bezout_error": self.bezout_error.report(p),
            "bezout_total": self.bezout_total.report(p),
            "mumford_p2_term": self.mumford_p2.report(p),
            "h_point": self.h_point.report(p),
            "h_point_without_mumford_p2": self.h_point_without_p2.report(p),
            "theta_coefficient": frac_str(self.theta_coefficient),
            "b": self.bound.report(p),
            "b_without_mumford_p2": self.bound_without_p2.report(p),
            "log_b_over_log_p": self.log_ratio(),
            "ledger": self.ledger_used,
        }


def assemble_b(p: int, ledger: ConstantLedger = DEFAULT_LEDGER, err_mode: str = "p3") -> BTrace:
    """Bound b(p) on the j-height of quadratic points of X0(p), with trace.

    The e-orthogonal pseudo-projection of W2 is given the same degree and
    height bounds as W2 itself.
    """
    if err_mode not in ERR_MODES:
        raise ValueError(f"err_mode must be one of {ERR_MODES}, got {err_mode!r}")
    w = wd_estimate(p, 2, ledger)
    g = genus_x0(p)
    terms = bezout_terms(p, 2, 2, w.deg_bound, w.deg_bound, w.height_bound, w.height_bound, ledger, err_mode)
    B = terms.total
    h = mumford_invert(p, B, ledger)
    p2 = BoundExpr.monomial(Fraction(2 * g, g - 2) * ledger["c_mumford"], 2, 0)
    h_bare = h - p2
    b = theta_to_j(p, h, ledger, shifted=False)
    b_bare = theta_to_j(p, h_bare, ledger, shifted=False)
    err_key = "c_bezout_err3" if err_mode == "p3" else "c_bezout_err1"
    used = {k: {"value": frac_str(ledger[k]), "provenance": ledger.provenance(k)} for k in (*LEDGER_KEYS_B, err_key)}
    return BTrace(
        p=p,
        g=g,
        n0=n0(p),
        err_mode=err_mode,
        wd=w,
        bezout_main=terms.main,
        bezout_error=terms.error,
        bezout_total=B,
        mumford_p2=p2,
        h_point=h,
        h_point_without_p2=h_bare,
        theta_coefficient=theta_coefficient(p),
        bound=b,
        bound_without_p2=b_bare,
        ledger_used=used,
    )


def err_mode_crossover(ledger: ConstantLedger = DEFAULT_LEDGER, start: int = 19) -> int:
    """First prime p >= start with c3 p^3 >= c1 p log p, rigorously.

    p^2 / log p increases for p >= 2, so the inequality persists beyond it,
    and then assemble_b(p3) >= assemble_b(autissier) termwise.
    """
    c3, c1 = ledger["c_bezout_err3"], ledger["c_bezout_err1"]
    p = next_prime(start)
    while c3 * p * p < c1 * log_enclosure(p)[1]:
        p = next_prime(p + 1)
    return p


@dataclass(frozen=True)
class CuspPairing:
    inf_inf: BoundExpr
    zero_zero: BoundExpr

    def to_json(self, p: int) -> dict:
        return {"inf_inf": self.inf_inf.report(p), "zero_zero": self.zero_zero.report(p)}


def cusp_pairing_relation(p: int, pairing_0_inf) -> CuspPairing:
    """[inf, inf]_mu = [0, 0]_mu = [0, inf]_mu - 6 log p / (p-1).

    The input may be rational or a BoundExpr in log p; the output keeps the
    log p coefficient and the constant part apart.
    """
    x = pairing_0_inf if isinstance(pairing_0_inf, BoundExpr) else as_bound(Fraction(pairing_0_inf))
    if x.degree()[0] > 0:
        raise ValueError("pairing may only involve constants and powers of log p")
    v = x - BoundExpr.monomial(Fraction(6, p - 1), 0, 1)
    return CuspPairing(v, v)
