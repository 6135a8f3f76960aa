"""Level-by-level solution of the implicit relativistic energy condition.

Level ``n`` at energy ``E`` is bound when ``nu = delta(E) - n > 0`` and

    M^2 - E^2 = alpha^2 nu^2 + (E + M)^2 V2^2 / (alpha^2 nu^2),

with ``delta(E) = -1/2 + 1/2 sqrt(1 - 8 (E + M) V1 / alpha^2)``.  Because ``delta``
depends on ``E`` the condition is transcendental; roots are bracketed on a scan of
``(-M, M)`` and refined with Brent's method.
"""
from __future__ import annotations

import logging
import math

import numpy as np
from scipy.optimize import brentq

from .core import BRACKET_INSET, EnergyLevel, PotentialSpec, SolverSettings
from .errors import ComplexDelta, DegenerateIndex, NoConvergence, NoRoot

log = logging.getLogger(__name__)


def delta_of(spec: PotentialSpec, trial_energy: float) -> float:
    radicand = 1.0 - 8.0 * (trial_energy + spec.mass) * spec.v1 / spec.alpha**2
    if radicand < 0:
        raise ComplexDelta(f"radicand {radicand} < 0 at E = {trial_energy}")
    return -0.5 + 0.5 * math.sqrt(radicand)


def spectrum_residual(spec: PotentialSpec, n: int, trial_energy: float) -> float:
    """``g(E) = M^2 - E^2 - (E+M)^2 V2^2 / (alpha^2 nu^2) - alpha^2 nu^2``.

    Defined for any ``nu != 0``; roots with ``nu < 0`` are algebraic artefacts and
    :func:`solve_level` never brackets them.
    """
    e, m, a = trial_energy, spec.mass, spec.alpha
    nu = delta_of(spec, e) - n
    if nu == 0.0:
        raise DegenerateIndex(f"delta(E) = n = {n} at E = {e}")
    return m * m - e * e - ((e + m) * spec.v2) ** 2 / (a * nu) ** 2 - (a * nu) ** 2


def _residual_on(spec: PotentialSpec, n: int, energies: np.ndarray) -> np.ndarray:
    """Vectorised :func:`spectrum_residual`; NaN where level ``n`` cannot exist."""
    e, m, a = energies, spec.mass, spec.alpha
    radicand = 1.0 - 8.0 * (e + m) * spec.v1 / a**2
    with np.errstate(invalid="ignore", divide="ignore"):
        nu = -0.5 + 0.5 * np.sqrt(radicand) - n
        g = m * m - e * e - ((e + m) * spec.v2) ** 2 / (a * nu) ** 2 - (a * nu) ** 2
    return np.where((radicand >= 0) & (nu > 0), g, np.nan)


def pw_of(spec: PotentialSpec, n: int, energy: float, delta: float | None = None) -> tuple[float, float]:
    """Exponents of ``cosh(alpha r)^(p+w) exp(alpha (w-p) r)``.

    ``p + w = n - delta`` and ``p - w = (E + M) V2 / (alpha^2 (n - delta))``.
    """
    if delta is None:
        delta = delta_of(spec, energy)
    s = n - delta
    d = (energy + spec.mass) * spec.v2 / (spec.alpha**2 * s)
    return 0.5 * (s + d), 0.5 * (s - d)


def is_normalizable(spec: PotentialSpec, n: int, energy: float) -> bool:
    """Both asymptotic decay rates ``nu -+ q/nu`` (in units of alpha) positive."""
    nu = delta_of(spec, energy) - n
    q = (energy + spec.mass) * spec.v2 / spec.alpha**2
    return nu > 0 and nu * nu > abs(q)


def energy_window(spec: PotentialSpec) -> tuple[float, float]:
    eps = BRACKET_INSET * spec.mass
    return -spec.mass + eps, spec.mass - eps


def find_roots(spec: PotentialSpec, n: int, settings: SolverSettings = SolverSettings()):
    """All sign changes of ``g`` on the scan, refined; returns ``[(E, iterations)]``."""
    lo, hi = energy_window(spec)
    grid = np.linspace(lo, hi, settings.bracket_samples + 1)
    g = _residual_on(spec, n, grid)
    roots = []
    for i in range(grid.size - 1):
        g0, g1 = g[i], g[i + 1]
        if not (np.isfinite(g0) and np.isfinite(g1)):
            continue
        if g0 == 0.0:
            roots.append((float(grid[i]), 0))
            continue
        if g0 * g1 < 0:
            root, info = brentq(
                lambda e: spectrum_residual(spec, n, e), grid[i], grid[i + 1],
                xtol=settings.abs_tol * 1e-3, rtol=4 * np.finfo(float).eps,
                maxiter=settings.max_iter, full_output=True, disp=False,
            )
            if not info.converged:
                raise NoConvergence(f"level {n}: {info.flag} after {info.iterations} iterations")
            roots.append((float(root), int(info.iterations)))
    if np.isfinite(g[-1]) and g[-1] == 0.0:
        roots.append((float(grid[-1]), 0))
    return roots


def solve_level(spec: PotentialSpec, n: int, settings: SolverSettings = SolverSettings()) -> EnergyLevel:
    """Solve for bound level ``n``.

    Among the roots with normalizable asymptotics the most strongly bound one is
    returned; every other root is listed in ``rejected_roots``.
    """
    roots = find_roots(spec, n, settings)
    physical = [(e, it) for e, it in roots if is_normalizable(spec, n, e)]
    if not physical:
        raise NoRoot(f"level {n} is not bound" + (f" (spurious roots {[e for e, _ in roots]})" if roots else ""))
    energy, iterations = min(physical, key=lambda t: t[0] * t[0])
    if len(physical) > 1:
        log.warning("level %d: %d normalizable roots, kept E = %r", n, len(physical), energy)
    residual = abs(spectrum_residual(spec, n, energy))
    if residual >= settings.abs_tol:
        raise NoConvergence(f"level {n}: |g(E)| = {residual} >= abs_tol")
    delta = delta_of(spec, energy)
    p, w = pw_of(spec, n, energy, delta)
    return EnergyLevel(
        n=n,
        energy=energy,
        lam=energy * energy - spec.mass**2,
        delta=delta,
        p_param=p,
        w_param=w,
        residual=residual,
        iterations=iterations,
        rejected_roots=tuple(e for e, _ in roots if e != energy),
    )


def enumerate_levels(
    spec: PotentialSpec,
    settings: SolverSettings = SolverSettings(),
    failures: list | None = None,
) -> list[EnergyLevel]:
    """Levels ``n = 0, 1, ...`` up to the first unbound one.

    The list is in ascending ``n``, which is also ascending ``E``.  It is not in
    ascending ``lambda = E^2 - M^2``: the coupling grows with ``E + M``, so an
    excited level can have a more negative ``lambda`` than the ground level.

    A level that fails to converge ends the census; the ``(n, exception)`` pair is
    appended to ``failures`` when a list is supplied.
    """
    levels = []
    n = 0
    while True:
        try:
            levels.append(solve_level(spec, n, settings))
        except NoRoot:
            break
        except NoConvergence as exc:
            log.error("level %d: %s", n, exc)
            if failures is not None:
                failures.append((n, exc))
            break
        n += 1
    return levels
