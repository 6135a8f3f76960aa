"""Superpotential, partner potentials and the shape-invariance ladder.

Sign conventions (all pinned by :func:`riccati_residual` being zero):

* ``W(r) = A - B tanh(alpha r)`` solves ``W^2 - W' = V_eff - lambda0`` with
  ``B^2 - alpha B + 2 (E + M) V1 = 0`` and ``A B = (E + M) V2``, so
  ``B = (alpha +- sqrt(alpha^2 - 8 (E + M) V1)) / 2`` and ``lambda0 = -(A^2 + B^2)``.
* ``V_+- = W^2 +- W'``.
* One shape step maps ``(A, B) -> (AB / (B - alpha), B - alpha)``.  Starting from
  the PLUS root, step ``m`` carries the superpotential whose zero mode is the
  physical level ``m - 1`` (see :func:`susy_ladder`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Branch, PotentialSpec, RadialGrid, ShapeParams, SuperCoeffs
from .errors import ComplexDiscriminant, DivisionByZero, LadderTerminated, SingularMap
from .specialfns import sech2


def effective_potential(spec: PotentialSpec, trial_energy: float, r):
    """``2 (E + M) [V1 sech^2(alpha r) - V2 tanh(alpha r)]``."""
    x = spec.alpha * np.asarray(r, dtype=float)
    return 2.0 * (trial_energy + spec.mass) * (spec.v1 * sech2(x) - spec.v2 * np.tanh(x))


def riccati_discriminant(spec: PotentialSpec, trial_energy: float) -> float:
    return spec.alpha**2 - 8.0 * (trial_energy + spec.mass) * spec.v1


def super_coeffs(spec: PotentialSpec, trial_energy: float, branch: Branch = Branch.PLUS) -> SuperCoeffs:
    disc = riccati_discriminant(spec, trial_energy)
    if disc < 0:
        raise ComplexDiscriminant(f"alpha^2 - 8(E+M)V1 = {disc} < 0 at E = {trial_energy}")
    denom = spec.alpha + branch.sign * math.sqrt(disc)
    coupling = 2.0 * (trial_energy + spec.mass) * spec.v2
    if denom == 0.0:
        if coupling != 0.0:
            raise DivisionByZero(f"{branch.value} branch has B = 0 with V2 != 0")
        a_coef = 0.0
    else:
        a_coef = coupling / denom
    b_coef = denom / 2.0
    return SuperCoeffs(a_coef, b_coef, -(a_coef**2 + b_coef**2), branch, float(trial_energy))


def superpotential(coeffs: SuperCoeffs, alpha: float, r):
    return coeffs.a_coef - coeffs.b_coef * np.tanh(alpha * np.asarray(r, dtype=float))


def superpotential_derivative(coeffs: SuperCoeffs, alpha: float, r):
    return -coeffs.b_coef * alpha * sech2(alpha * np.asarray(r, dtype=float))


def partner_potentials(coeffs: SuperCoeffs, alpha: float, r):
    """``(V_+, V_-)`` with ``V_+- = W^2 +- W' = A^2 + B^2 - B (B +- alpha) sech^2 - 2 A B tanh``."""
    a, b = coeffs.a_coef, coeffs.b_coef
    x = alpha * np.asarray(r, dtype=float)
    s2, th = sech2(x), np.tanh(x)
    base = a * a + b * b - 2.0 * a * b * th
    return base - b * (b + alpha) * s2, base - b * (b - alpha) * s2


def riccati_residual(spec: PotentialSpec, coeffs: SuperCoeffs, grid: RadialGrid) -> float:
    """Sup-norm of ``W^2 - W' - (V_eff - lambda0)`` over the grid."""
    r = grid.points
    w = superpotential(coeffs, spec.alpha, r)
    dw = superpotential_derivative(coeffs, spec.alpha, r)
    veff = effective_potential(spec, coeffs.trial_energy, r)
    return float(np.max(np.abs(w * w - dw - (veff - coeffs.lambda0))))


@dataclass(frozen=True)
class LadderTerm:
    k: int
    params: ShapeParams
    cumulative: float


def shape_step(params_in: SuperCoeffs | ShapeParams, alpha: float) -> ShapeParams:
    """Map ``(A, B)`` to ``a0 = -AB / (alpha - B)``, ``a1 = B - alpha`` and ``R = a0^2 + a1^2 - (A^2 + B^2)``.

    A ShapeParams input is read as ``(A, B) = (a0, a1)``, so iterating keeps ``A B``
    fixed and lowers ``B`` by ``alpha`` per step.
    """
    if isinstance(params_in, ShapeParams):
        a, b = params_in.a0, params_in.a1
    else:
        a, b = params_in.a_coef, params_in.b_coef
    if alpha - b == 0.0:
        raise SingularMap(f"B = alpha = {alpha}")
    a0 = -a * b / (alpha - b)
    a1 = b - alpha
    return ShapeParams(a0, a1, a0 * a0 + a1 * a1 - (a * a + b * b))


def shape_ladder(coeffs: SuperCoeffs, alpha: float, n: int) -> list[LadderTerm]:
    terms = []
    current: SuperCoeffs | ShapeParams = coeffs
    total = 0.0
    for k in range(1, n + 1):
        current = shape_step(current, alpha)
        total += current.remainder
        terms.append(LadderTerm(k, current, total))
    return terms


def ladder_sum(coeffs: SuperCoeffs, alpha: float, n: int) -> float:
    """Running sum of the shape remainders over ``n`` steps."""
    terms = shape_ladder(coeffs, alpha, n)
    return terms[-1].cumulative if terms else 0.0


def ladder_closed_form(coeffs: SuperCoeffs, alpha: float, n: int) -> float:
    """Closed form of :func:`ladder_sum`: ``(AB/(alpha n - B))^2 + (alpha n - B)^2 - (A^2 + B^2)``."""
    a, b = coeffs.a_coef, coeffs.b_coef
    if n == 0:
        return 0.0
    gap = alpha * n - b
    if gap == 0.0:
        raise SingularMap(f"B = {n} alpha")
    return (a * b / gap) ** 2 + gap**2 - (a * a + b * b)


def susy_ladder(coeffs: SuperCoeffs, alpha: float, n: int) -> float:
    """Binding ``A_n^2 + B_n^2`` of ladder step ``n`` (``B_n = B - n alpha``, ``A_n B_n = A B``).

    This is ``-lambda``; with PLUS-branch coefficients evaluated at ``E`` it equals
    ``M^2 - E^2`` for the physical level ``n - 1``.  Step 0 returns ``A^2 + B^2``.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    b = coeffs.b_coef
    if n > 0 and alpha * n >= b:
        raise LadderTerminated(f"alpha*n = {alpha * n} >= B = {b}")
    b_n = b - alpha * n
    a_n = coeffs.a_coef * b / b_n
    return a_n * a_n + b_n * b_n
