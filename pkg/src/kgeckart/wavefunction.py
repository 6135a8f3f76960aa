"""Analytic bound-state wavefunctions.

Level ``n`` is

    f_n(r) = cosh(alpha r)^(p+w) exp(alpha (w - p) r) P_n^(-2p, -2w)(-tanh(alpha r)),

evaluated in log space for the prefactor.  On the full line the values are ``f``;
on the half line they are ``R = f / r`` sampled half a spacing off the origin.
"""
from __future__ import annotations

import numpy as np

from .core import (Branch, DomainMode, EnergyLevel, PotentialSpec, RadialFunction, RadialGrid,
                   SuperCoeffs, count_nodes, fix_sign)
from .errors import NotNormalizable
from .specialfns import central_diff2, jacobi_eval, log_cosh, sech2, simpson
from .spectrum import pw_of
from .susy import effective_potential, super_coeffs

NODE_FLOOR = 1e-12


def pw_params(spec: PotentialSpec, level: EnergyLevel) -> tuple[float, float]:
    return pw_of(spec, level.n, level.energy, level.delta)


def sample_points(grid: RadialGrid) -> np.ndarray:
    r = grid.points
    if grid.domain_mode is DomainMode.HALF:
        r = r + 0.5 * grid.spacing
    return r


def _finish(grid: RadialGrid, r: np.ndarray, f: np.ndarray, **diagnostics) -> RadialFunction:
    """Normalize ``f`` (Simpson of ``f^2`` = 1), convert to R on the half line, count nodes."""
    f = fix_sign(f)
    norm = 1.0 / np.sqrt(simpson(f * f, grid.spacing))
    f = f * norm
    peak = np.max(np.abs(f))
    diagnostics["endpoint_ratio"] = float(max(abs(f[0]), abs(f[-1])) / peak)
    values = f
    if grid.domain_mode is DomainMode.HALF:
        values = f / r
        # R = f / r stays finite at the origin only if f vanishes there
        diagnostics["origin_pole"] = bool(abs(f[0]) > 1e-8 * peak)
    return RadialFunction(grid, r, values, float(norm), count_nodes(f, NODE_FLOOR), diagnostics)


def _check_decay(p: float, w: float):
    # decay rates / alpha at +inf and -inf
    right, left = -2.0 * w, -2.0 * p
    if not (right > 0 and left > 0):
        raise NotNormalizable(f"decay exponents {right:.6g} (r->+inf), {left:.6g} (r->-inf)")


def ground_state_f(spec: PotentialSpec, coeffs: SuperCoeffs, grid: RadialGrid) -> RadialFunction:
    """Zero mode ``N exp(-A r) cosh(alpha r)^(B/alpha)`` of ``W^2 - W'``.

    Only the MINUS root decays; PLUS coefficients are converted to the MINUS root at
    the same trial energy.
    """
    if coeffs.branch is Branch.PLUS:
        coeffs = super_coeffs(spec, coeffs.trial_energy, Branch.MINUS)
    a, b = coeffs.a_coef, coeffs.b_coef
    if not b < -abs(a):
        raise NotNormalizable(f"need B < -|A|, got A = {a:.6g}, B = {b:.6g}")
    r = sample_points(grid)
    log_f = -a * r + (b / spec.alpha) * log_cosh(spec.alpha * r)
    return _finish(grid, r, np.exp(log_f - log_f.max()))


def excited_state_R(spec: PotentialSpec, level: EnergyLevel, grid: RadialGrid) -> RadialFunction:
    p, w = pw_params(spec, level)
    _check_decay(p, w)
    r = sample_points(grid)
    x = spec.alpha * r
    log_pref = (p + w) * log_cosh(x) + (w - p) * x
    poly = jacobi_eval(level.n, -2.0 * p, -2.0 * w, -np.tanh(x))
    return _finish(grid, r, np.exp(log_pref - log_pref.max()) * poly, p=p, w=w)


def ode_residual(spec: PotentialSpec, level: EnergyLevel, rf: RadialFunction) -> float:
    """``sup |-f'' + (V_eff - lambda) f| / max|f|`` over interior samples."""
    f = rf.reduced
    veff = effective_potential(spec, level.energy, rf.r[1:-1])
    res = -central_diff2(f, rf.grid.spacing) + (veff - level.lam) * f[1:-1]
    return float(np.max(np.abs(res)) / np.max(np.abs(f)))


def inner_product(u: RadialFunction, v: RadialFunction) -> float:
    return float(simpson(u.reduced * v.reduced, u.grid.spacing))


def kg_inner_product(spec: PotentialSpec, u: RadialFunction, energy_u: float,
                     v: RadialFunction, energy_v: float) -> float:
    """Charge-weighted overlap ``int f_u f_v [E_u + E_v - 2 U(r)] dr``.

    ``U = V1 sech^2 - V2 tanh`` is the bare potential.  Because ``V_eff`` depends on
    the energy, distinct levels are orthogonal in this product rather than the
    plain one.
    """
    x = spec.alpha * u.r
    pot = spec.v1 * sech2(x) - spec.v2 * np.tanh(x)
    weight = energy_u + energy_v - 2.0 * pot
    return float(simpson(u.reduced * v.reduced * weight, u.grid.spacing))


def max_abs_difference(u: RadialFunction, v: RadialFunction) -> float:
    """Max deviation of the reduced functions after fixing the global sign of each."""
    a = fix_sign(u.reduced)
    b = fix_sign(v.reduced)
    return float(min(np.max(np.abs(a - b)), np.max(np.abs(a + b))))
