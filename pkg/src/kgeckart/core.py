"""Domain types, configuration parsing and grid defaults.

Natural units (hbar = c = 1) are used everywhere; there is no unit layer.
"""
from __future__ import annotations

import configparser
import enum
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .errors import MissingField, NonFinite, NonPositive, UnknownKey, ConfigError

#: Relative inset of the energy bracket from +-M (E = -M kills the coupling).
BRACKET_INSET = 1e-9
DEFAULT_R_MAX_FACTOR = 25.0
DEFAULT_N_POINTS = 4001


class Branch(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> float:
        return 1.0 if self is Branch.PLUS else -1.0


class DomainMode(enum.Enum):
    FULL = "full"
    HALF = "half"


@dataclass(frozen=True)
class PotentialSpec:
    """Eckart problem ``V(r) = v1 sech^2(alpha r) - v2 tanh(alpha r)`` for a particle of mass ``mass``."""

    v1: float
    v2: float
    alpha: float
    mass: float

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            object.__setattr__(self, f.name, value)
            if not math.isfinite(value):
                raise NonFinite(f"{f.name} must be finite, got {value!r}")
        if self.alpha <= 0:
            raise NonPositive("alpha")
        if self.mass <= 0:
            raise NonPositive("mass")

    def with_param(self, name: str, value: float) -> PotentialSpec:
        return replace(self, **{name: float(value)})


@dataclass(frozen=True)
class SolverSettings:
    abs_tol: float = 1e-12
    max_iter: int = 200
    bracket_samples: int = 400

    def __post_init__(self):
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise NonPositive("abs_tol")
        if self.max_iter < 10:
            raise ConfigError("max_iter must be >= 10")
        if self.bracket_samples < 2:
            raise ConfigError("bracket_samples must be >= 2")


@dataclass(frozen=True)
class SuperCoeffs:
    """Coefficients of the superpotential ``W(r) = A - B tanh(alpha r)``.

    ``lambda0`` defaults to the Riccati-consistent offset ``-(A^2 + B^2)``.
    """

    a_coef: float
    b_coef: float
    lambda0: float | None = None
    branch: Branch = Branch.PLUS
    trial_energy: float = math.nan

    def __post_init__(self):
        if self.lambda0 is None:
            object.__setattr__(self, "lambda0", -(self.a_coef**2 + self.b_coef**2))


@dataclass(frozen=True)
class ShapeParams:
    """One shape-invariance step: new ``(A, B)`` pair and the constant shift ``R``."""

    a0: float
    a1: float
    remainder: float


@dataclass(frozen=True)
class EnergyLevel:
    n: int
    energy: float
    lam: float
    delta: float
    p_param: float
    w_param: float
    residual: float
    iterations: int
    rejected_roots: tuple[float, ...] = ()

    @property
    def nu(self) -> float:
        """Effective index ``delta - n``; positive for a bound level."""
        return self.delta - self.n


@dataclass(frozen=True)
class RadialGrid:
    r_min: float
    r_max: float
    n_points: int
    domain_mode: DomainMode = DomainMode.FULL

    def __post_init__(self):
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise ConfigError(f"n_points must be odd and >= 3, got {self.n_points}")
        if not self.r_min < self.r_max:
            raise ConfigError("r_min must be < r_max")
        if self.domain_mode is DomainMode.HALF and self.r_min != 0:
            raise ConfigError("half-line grids start at r = 0")
        if self.domain_mode is DomainMode.FULL and self.r_min != -self.r_max:
            raise ConfigError("full-line grids are symmetric about r = 0")

    @property
    def spacing(self) -> float:
        return (self.r_max - self.r_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.r_min, self.r_max, self.n_points)


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """Sampled wavefunction.

    ``r`` holds the sample positions; they coincide with ``grid.points`` except in
    half-line mode, where analytic functions are sampled half a spacing off the origin.
    """

    grid: RadialGrid
    r: np.ndarray
    values: np.ndarray
    norm_constant: float
    node_count: int
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.r.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def reduced(self) -> np.ndarray:
        """``f = r R`` in half-line mode, the values themselves otherwise."""
        if self.grid.domain_mode is DomainMode.HALF:
            return self.r * self.values
        return self.values


def default_grid(
    spec: PotentialSpec,
    mode: DomainMode = DomainMode.FULL,
    r_max_factor: float = DEFAULT_R_MAX_FACTOR,
    n_points: int = DEFAULT_N_POINTS,
) -> RadialGrid:
    r_max = r_max_factor / spec.alpha
    r_min = -r_max if mode is DomainMode.FULL else 0.0
    return RadialGrid(r_min, r_max, n_points, mode)


def count_nodes(values: np.ndarray, floor: float = 1e-12) -> int:
    """Sign changes between consecutive samples above ``floor * max|values|``."""
    v = np.asarray(values, dtype=float)
    big = v[np.abs(v) > floor * np.max(np.abs(v))]
    return int(np.count_nonzero(np.signbit(big[1:]) != np.signbit(big[:-1])))


def fix_sign(values: np.ndarray) -> np.ndarray:
    """Flip so the first sample above 1e-3 of the peak is positive."""
    v = np.asarray(values, dtype=float)
    idx = np.flatnonzero(np.abs(v) > 1e-3 * np.max(np.abs(v)))
    if idx.size and v[idx[0]] < 0:
        return -v
    return v


# --- configuration -----------------------------------------------------------

_SECTIONS = {
    "potential": ("v1", "v2", "alpha", "mass"),
    "solver": ("abs_tol", "max_iter", "bracket_samples"),
    "grid": ("r_max_factor", "n_points", "domain_mode"),
}
_KEY_SECTION = {k: s for s, keys in _SECTIONS.items() for k in keys}
_INT_KEYS = {"max_iter", "bracket_samples", "n_points"}
_ROOT = "__root__"


@dataclass(frozen=True)
class GridSettings:
    r_max_factor: float = DEFAULT_R_MAX_FACTOR
    n_points: int = DEFAULT_N_POINTS
    domain_mode: DomainMode = DomainMode.FULL

    def grid_for(self, spec: PotentialSpec, mode: DomainMode | None = None) -> RadialGrid:
        return default_grid(spec, mode or self.domain_mode, self.r_max_factor, self.n_points)


@dataclass(frozen=True)
class RunConfig:
    spec: PotentialSpec
    solver: SolverSettings = SolverSettings()
    grid: GridSettings = GridSettings()


def _number(key: str, text: str):
    text = text.strip()
    try:
        value = int(text) if key in _INT_KEYS else float(text)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise NonFinite(f"{key} must be finite, got {text!r}")
    return value


def parse_config(config_text: str) -> RunConfig:
    """Parse an INI-style key/value document.

    Keys may sit under their ``[potential]``, ``[solver]`` or ``[grid]`` section or
    before any section header.  Unknown keys are errors.
    """
    parser = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), default_section="__none__"
    )
    parser.optionxform = str
    try:
        parser.read_string(f"[{_ROOT}]\n" + config_text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    raw: dict[str, str] = {}
    for section in parser.sections():
        if section != _ROOT and section not in _SECTIONS:
            raise UnknownKey(f"unknown section [{section}]")
        for key, value in parser.items(section):
            home = _KEY_SECTION.get(key)
            if home is None or (section != _ROOT and section != home):
                raise UnknownKey(f"unknown key {key!r} in [{section}]")
            if key in raw:
                raise ConfigError(f"duplicate key {key!r}")
            raw[key] = value

    missing = [k for k in _SECTIONS["potential"] if k not in raw]
    if missing:
        raise MissingField(", ".join(missing))
    spec = PotentialSpec(**{k: _number(k, raw[k]) for k in _SECTIONS["potential"]})

    solver = SolverSettings(**{k: _number(k, raw[k]) for k in _SECTIONS["solver"] if k in raw})
    grid_kw = {}
    for k in ("r_max_factor", "n_points"):
        if k in raw:
            grid_kw[k] = _number(k, raw[k])
    if "domain_mode" in raw:
        try:
            grid_kw["domain_mode"] = DomainMode(raw["domain_mode"].strip().lower())
        except ValueError:
            raise ConfigError(f"domain_mode must be 'full' or 'half', got {raw['domain_mode']!r}") from None
    if grid_kw.get("r_max_factor", 1.0) <= 0:
        raise NonPositive("r_max_factor")
    grid = GridSettings(**grid_kw)
    default_grid(spec, grid.domain_mode, grid.r_max_factor, grid.n_points)  # validates n_points
    return RunConfig(spec, solver, grid)


def parse_spec(config_text: str) -> PotentialSpec:
    return parse_config(config_text).spec


def emit_config(config: RunConfig | PotentialSpec) -> str:
    """Inverse of :func:`parse_config`; floats are written with ``repr`` so they round-trip."""
    if isinstance(config, PotentialSpec):
        config = RunConfig(config)
    s, sv, g = config.spec, config.solver, config.grid
    lines = ["[potential]"]
    lines += [f"{k} = {getattr(s, k)!r}" for k in _SECTIONS["potential"]]
    lines += ["", "[solver]"]
    lines += [f"{k} = {getattr(sv, k)!r}" for k in _SECTIONS["solver"]]
    lines += ["", "[grid]", f"r_max_factor = {g.r_max_factor!r}", f"n_points = {g.n_points}",
              f"domain_mode = {g.domain_mode.value}"]
    return "\n".join(lines) + "\n"


def emit_spec(spec: PotentialSpec) -> str:
    return emit_config(spec)
