"""Jacobi polynomials, composite Simpson quadrature and second differences."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvenSampleCount, RecurrenceBreakdown, TooFewSamples

RECURRENCE_RTOL = 1e-12


@dataclass(frozen=True)
class JacobiParams:
    degree: int
    alpha_p: float
    beta_p: float

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        if not (math.isfinite(self.alpha_p) and math.isfinite(self.beta_p)):
            raise ValueError("Jacobi parameters must be finite")


def sech2(x):
    """``sech(x)**2`` without overflow for large ``|x|``."""
    e = np.exp(-2.0 * np.abs(x))
    return 4.0 * e / (1.0 + e) ** 2


def log_cosh(x):
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


def gen_binomial(z: float, m: int) -> float:
    """Generalized binomial coefficient ``C(z, m)`` for real ``z`` and integer ``m >= 0``."""
    out = 1.0
    for j in range(m):
        out *= (z - j) / (j + 1)
    return out


def _recurrence(n: int, a: float, b: float, x):
    """Three-term recurrence plus a running first-order bound on its absolute error."""
    u = np.finfo(float).eps
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    p_prev = np.ones_like(x)
    e_prev = np.zeros_like(x)
    if n == 0:
        return p_prev, e_prev
    t = (a + b + 2.0) * (x - 1.0) / 2.0
    p = (a + 1.0) + t
    e = 4.0 * u * (abs(a) + 1.0 + (abs(a) + abs(b) + 2.0) * (ax + 1.0) / 2.0)
    for k in range(2, n + 1):
        s = 2 * k + a + b
        lead = 2.0 * k * (k + a + b) * (s - 2.0)
        if lead == 0.0:
            raise RecurrenceBreakdown(f"degree {k}, a={a}, b={b}")
        sa = 2 * k + abs(a) + abs(b)
        c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b)
        c2 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s
        dc1 = 8.0 * u * (sa + 1.0) * (sa * (sa + 2.0) * ax + a * a + b * b)
        dc2 = 16.0 * u * (k + abs(a) + 1.0) * (k + abs(b) + 1.0) * sa
        dlead = 16.0 * u * k * (k + abs(a) + abs(b)) * (sa + 2.0)
        t1, t2 = c1 * p, c2 * p_prev
        num = t1 - t2
        new = num / lead
        e_num = (np.abs(c1) * e + abs(c2) * e_prev + dc1 * np.abs(p) + dc2 * np.abs(p_prev)
                 + 2.0 * u * (np.abs(t1) + np.abs(t2)))
        e, e_prev = (e_num + np.abs(new) * dlead) / abs(lead) + u * np.abs(new), e
        p, p_prev = new, p
    return p, e


def jacobi_recurrence(n: int, a: float, b: float, x, rtol: float = RECURRENCE_RTOL):
    """Three-term recurrence in the degree.

    The result is certified against ``rtol * max(|P|, S)`` where ``S`` is the summed
    magnitude of the explicit-sum terms.  Raises RecurrenceBreakdown if a leading
    coefficient vanishes or any sample fails certification (near-degenerate
    parameter combinations amplify rounding without bound).
    """
    p, err = _recurrence(n, a, b, x)
    _, scale = jacobi_series(n, a, b, x, return_scale=True)
    if np.any(err > rtol * np.maximum(np.abs(p), scale)):
        raise RecurrenceBreakdown(f"uncertified recurrence for n={n}, a={a}, b={b}")
    return p


def jacobi_series(n: int, a: float, b: float, x, return_scale: bool = False):
    """Explicit finite sum

    ``sum_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^(n-s)``.

    With ``return_scale`` also returns ``sum_s |term_s|``, the magnitude that bounds
    cancellation error in the sum.
    """
    x = np.asarray(x, dtype=float)
    xm = (x - 1.0) / 2.0
    xp = (x + 1.0) / 2.0
    total = np.zeros_like(x)
    scale = np.zeros_like(x)
    for s in range(n + 1):
        term = gen_binomial(n + a, n - s) * gen_binomial(n + b, s) * xm**s * xp ** (n - s)
        total = total + term
        scale = scale + np.abs(term)
    if return_scale:
        return total, scale
    return total


def jacobi_eval(params: JacobiParams | int, *args):
    """``P_n^{(a,b)}(x)`` for real parameters and any real ``x``.

    Call as ``jacobi_eval(JacobiParams(n, a, b), x)`` or ``jacobi_eval(n, a, b, x)``.
    Samples where the recurrence cannot certify its result are recomputed from the
    explicit sum.
    """
    if isinstance(params, JacobiParams):
        (x,) = args
        n, a, b = params.degree, params.alpha_p, params.beta_p
    else:
        n = params
        a, b, x = args
    x = np.asarray(x, dtype=float)
    try:
        p, err = _recurrence(n, a, b, x)
    except RecurrenceBreakdown:
        return jacobi_series(n, a, b, x)
    series, scale = jacobi_series(n, a, b, x, return_scale=True)
    return np.where(err > RECURRENCE_RTOL * np.maximum(np.abs(p), scale), series, p)


def simpson(values, spacing: float) -> float:
    """Composite Simpson rule on an odd number of uniformly spaced samples."""
    f = np.asarray(values, dtype=float)
    if f.size < 3 or f.size % 2 == 0:
        raise EvenSampleCount(f"Simpson needs an odd sample count >= 3, got {f.size}")
    return spacing / 3.0 * (f[0] + f[-1] + 4.0 * f[1:-1:2].sum() + 2.0 * f[2:-1:2].sum())


def central_diff2(values, spacing: float) -> np.ndarray:
    """Three-point second derivative at interior samples (endpoints dropped)."""
    f = np.asarray(values, dtype=float)
    if f.size < 3:
        raise TooFewSamples(f"need >= 3 samples, got {f.size}")
    return (f[:-2] - 2.0 * f[1:-1] + f[2:]) / spacing**2
