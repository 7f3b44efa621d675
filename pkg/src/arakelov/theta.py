"""Riemann theta function in genus 1 and 2, with its analytic norm.

    theta(z, tau) = sum_{m in Z^g} exp(i pi m^T tau m + 2 i pi m^T z)
    ||theta||(z) = det(Y)^(1/4) exp(-pi y^T Y^-1 y) |theta(z)|,

with Y = Im tau and y = Im z.  Writing c = -Y^-1 y, the modulus of the
m-th term is exp(pi y^T Y^-1 y) exp(-pi (m-c)^T Y (m-c)), so the series is
summed over the box ||m - n0||_inf <= R around n0 = round(c) and the
prefactor exp(-pi y^T Y^-1 y) is applied term by term (no overflow).

Truncation bound (for the normalized sum exp(-pi y^T Y^-1 y) theta).  A
lattice point with ||m - n0||_inf = k satisfies |m - c|_2 >= k - 1/2, and
there are at most 2g(2k+1)^(g-1) of them, so with lambda = lambda_min(Y)

    tail(R) <= sum_{k > R} t_k,   t_k = 2g (2k+1)^(g-1) exp(-pi lambda (k - 1/2)^2).

The ratio t_{k+1}/t_k decreases in k; if rho = t_{R+2}/t_{R+1} < 1 the tail
is at most t_{R+1}/(1 - rho).  ``error_estimate`` is this bound; it
controls the normalized value, hence also norm_an up to det(Y)^(1/4).
Rounding errors of the double-precision sum are not included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite, TailBoundFailure

__all__ = ["PeriodMatrix", "ThetaValue", "theta_eval", "norm_invariance_check", "tail_bound", "MAX_RADIUS"]

MAX_RADIUS = 400
_SYM_TOL = 1e-12
_PD_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PeriodMatrix:
    tau: np.ndarray

    def __post_init__(self):
        t = np.atleast_2d(np.asarray(self.tau, dtype=complex))
        if t.shape not in ((1, 1), (2, 2)):
            raise ValueError(f"only genus 1 and 2 are supported, got shape {t.shape}")
        if np.max(np.abs(t - t.T)) > _SYM_TOL:
            raise ValueError("tau must be symmetric")
        Y = t.imag
        minors = [Y[0, 0]] + ([float(np.linalg.det(Y))] if len(Y) == 2 else [])
        if min(minors) <= _PD_TOL:
            raise NotPositiveDefinite(f"Im(tau) is not positive definite (leading minors {minors})")
        t.setflags(write=False)
        object.__setattr__(self, "tau", t)

    @property
    def g(self) -> int:
        return self.tau.shape[0]

    @property
    def Y(self) -> np.ndarray:
        return self.tau.imag

    @property
    def lambda_min(self) -> float:
        return float(np.linalg.eigvalsh(self.Y)[0])


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    norm_an: float
    truncation_radius: int
    error_estimate: float
    normalized: complex  # exp(-pi y^T Y^-1 y) * theta
    log_scale: float  # pi y^T Y^-1 y

    def to_json(self) -> dict:
        z = self.value
        v = {"re": float(z.real), "im": float(z.imag)} if math.isfinite(abs(z)) else None
        return {
            "value": v,
            "normalized": {"re": float(self.normalized.real), "im": float(self.normalized.imag)},
            "log_scale": self.log_scale,
            "norm_an": self.norm_an,
            "truncation_radius": self.truncation_radius,
            "error_estimate": self.error_estimate,
        }


def tail_bound(g: int, lam: float, R: int) -> float:
    """Over-estimate of the normalized tail beyond ||m - n0||_inf = R."""

    def t(k):
        return 2 * g * (2 * k + 1) ** (g - 1) * math.exp(-math.pi * lam * (k - 0.5) ** 2)

    t1, t2 = t(R + 1), t(R + 2)
    if t1 == 0.0:
        return 0.0
    rho = t2 / t1
    if rho >= 1:
        return math.inf
    return t1 / (1 - rho)


def _radius(g: int, lam: float, tol: float) -> tuple[int, float]:
    R = 1
    while True:
        err = tail_bound(g, lam, R)
        if err < tol:
            return R, err
        R += 1
        if R > MAX_RADIUS:
            raise TailBoundFailure(f"truncation radius would exceed {MAX_RADIUS} (lambda_min = {lam:g}, tol = {tol:g})")


def _as_period(tau) -> PeriodMatrix:
    return tau if isinstance(tau, PeriodMatrix) else PeriodMatrix(tau)


def theta_eval(tau, z, tol: float = 1e-12) -> ThetaValue:
    """theta(z, tau) and its analytic norm, truncated so the tail is < tol."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    P = _as_period(tau)
    g = P.g
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (g,):
        raise ValueError(f"z must have {g} entries")
    Y = P.Y
    y = z.imag
    Yinv_y = np.linalg.solve(Y, y)
    log_scale = float(math.pi * y @ Yinv_y)
    c = -Yinv_y
    n0 = np.rint(c).astype(int)
    R, err = _radius(g, P.lambda_min, tol)

    axis = np.arange(-R, R + 1)
    grids = np.meshgrid(*([axis] * g), indexing="ij")
    M = np.stack([gr.ravel() for gr in grids], axis=1) + n0  # (N, g)
    D = M - c
    # modulus from the completed square, phase from the real parts
    real = -math.pi * np.einsum("ni,ij,nj->n", D, Y, D)
    phase = math.pi * np.einsum("ni,ij,nj->n", M, P.tau.real, M) + 2 * math.pi * (M @ z.real)
    expo = real + 1j * phase
    normalized = complex(np.sum(np.exp(expo)))

    det = float(np.linalg.det(Y))
    norm_an = det**0.25 * abs(normalized)
    try:
        value = normalized * math.exp(log_scale)
    except OverflowError:
        value = complex(math.inf, math.inf)
    return ThetaValue(value, norm_an, R, err, normalized, log_scale)


def norm_invariance_check(tau, z, m, n, tol: float = 1e-12) -> float:
    """|norm_an(z + m + tau n) - norm_an(z)| for integer vectors m, n."""
    P = _as_period(tau)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    m = np.atleast_1d(np.asarray(m, dtype=int))
    n = np.atleast_1d(np.asarray(n, dtype=int))
    shifted = z + m + P.tau @ n
    a = theta_eval(P, z, tol).norm_an
    b = theta_eval(P, shifted, tol).norm_an
    return abs(b - a)
