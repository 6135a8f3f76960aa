import itertools
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from kgeckart.core import PotentialSpec
from kgeckart.susy import riccati_discriminant

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"
CONFIGS = FIXTURES / "configs"

FIXTURE_FAMILY = [PotentialSpec(v1, v2, 1.0, 1.0)
                  for v1, v2 in itertools.product((-0.5, -2.0, -5.0), (0.0, 0.25, 0.5))]


def config_name(spec: PotentialSpec) -> str:
    def tag(x):
        return f"{x:g}".replace("-", "m").replace(".", "p")
    return f"v1{tag(spec.v1)}_v2{tag(spec.v2)}"


def random_spec_energy(rng, v1_range=(-6.0, 1.0)):
    """Random spec and trial energy with a real Riccati discriminant."""
    while True:
        spec = PotentialSpec(rng.uniform(*v1_range), rng.uniform(-2, 2), rng.uniform(0.3, 3.0),
                             rng.uniform(0.5, 3.0))
        energy = rng.uniform(-spec.mass, spec.mass)
        if riccati_discriminant(spec, energy) >= 0:
            return spec, energy


def random_attractive_specs(seed, count):
    """Wells that bind at least one level, with moderate depth."""
    from kgeckart.spectrum import enumerate_levels
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        spec = PotentialSpec(rng.uniform(-5, -0.5), rng.uniform(-0.6, 0.6), rng.uniform(0.6, 1.5), 1.0)
        if enumerate_levels(spec):
            out.append(spec)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, echoed again at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
