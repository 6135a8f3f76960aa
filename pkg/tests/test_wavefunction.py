import itertools

import numpy as np
import pytest

from kgeckart.core import Branch, DomainMode, PotentialSpec, SuperCoeffs, default_grid
from kgeckart.errors import NotNormalizable
from kgeckart.oracle import self_consistent_level
from kgeckart.specialfns import central_diff2, jacobi_eval, log_cosh, simpson
from kgeckart.spectrum import enumerate_levels, solve_level
from kgeckart.susy import effective_potential, super_coeffs
from kgeckart.wavefunction import (_finish, excited_state_R, ground_state_f, inner_product, kg_inner_product,
                                   max_abs_difference, ode_residual, pw_params)

from conftest import FIXTURE_FAMILY, random_attractive_specs

BOUND = [s for s in FIXTURE_FAMILY if enumerate_levels(s)]


def test_pw_symmetric_case():
    spec = PotentialSpec(-2, 0, 1, 1)
    for lv in enumerate_levels(spec):
        p, w = pw_params(spec, lv)
        assert p == w == pytest.approx((lv.n - lv.delta) / 2)


@pytest.mark.parametrize("spec", BOUND)
def test_pw_identities(spec):
    for lv in enumerate_levels(spec):
        p, w = pw_params(spec, lv)
        assert p + w == pytest.approx(lv.n - lv.delta, rel=1e-13)
        q = (lv.energy + spec.mass) * spec.v2 / spec.alpha**2
        assert p - w == pytest.approx(q / (lv.n - lv.delta), abs=1e-14)
        # both decay rates positive
        assert p < 0 and w < 0


def test_pw_fixture_value():
    spec = PotentialSpec(-2, 0.5, 1, 1)
    lv = solve_level(spec, 0)
    p, w = pw_params(spec, lv)
    assert (p, w) == pytest.approx((-0.4273728430732142, -0.22128998905694441), rel=1e-9)
    # independent check: tail slopes of the oracle eigenvector are 2 p alpha and -2 w alpha
    vec = self_consistent_level(spec, 0).eigenvector
    r, f = vec.r, vec.values
    right = (r > 8) & (r < 14)
    left = (r < -8) & (r > -14)
    slope_right = np.polyfit(r[right], np.log(f[right]), 1)[0]
    slope_left = np.polyfit(r[left], np.log(f[left]), 1)[0]
    assert slope_right == pytest.approx(2 * w * spec.alpha, rel=1e-3)
    assert slope_left == pytest.approx(-2 * p * spec.alpha, rel=1e-3)


@pytest.mark.parametrize("spec", BOUND)
def test_ground_state_nodeless_and_matches_jacobi_form(spec):
    g = default_grid(spec)
    lv = solve_level(spec, 0)
    gs = ground_state_f(spec, super_coeffs(spec, lv.energy), g)
    assert gs.node_count == 0
    assert max_abs_difference(gs, excited_state_R(spec, lv, g)) < 1e-10
    assert simpson(gs.values**2, g.spacing) == pytest.approx(1.0, abs=1e-8)


def test_ground_state_even_for_symmetric_well():
    spec = PotentialSpec(-2, 0, 1, 1)
    g = default_grid(spec)
    gs = ground_state_f(spec, super_coeffs(spec, solve_level(spec, 0).energy, Branch.MINUS), g)
    assert np.allclose(gs.values, gs.values[::-1], atol=1e-14)
    mid = g.n_points // 2
    assert abs(gs.values[mid + 1] - gs.values[mid - 1]) / (2 * g.spacing) < 1e-8


def test_ground_state_rejects_growing_form():
    spec = PotentialSpec(-2, 0, 1, 1)
    with pytest.raises(NotNormalizable):
        ground_state_f(spec, SuperCoeffs(0.0, 1.0, branch=Branch.MINUS), default_grid(spec))


@pytest.mark.parametrize("spec", BOUND)
def test_nodes_normalization_and_residual(spec):
    g, g2 = default_grid(spec), default_grid(spec, n_points=8001)
    for lv in enumerate_levels(spec):
        rf = excited_state_R(spec, lv, g)
        assert rf.node_count == lv.n
        assert simpson(rf.values**2, g.spacing) == pytest.approx(1.0, abs=1e-8)
        r1 = ode_residual(spec, lv, rf)
        r2 = ode_residual(spec, lv, excited_state_R(spec, lv, g2))
        assert 3.8 < r1 / r2 < 4.2


def test_residual_is_pure_truncation_error():
    # the leading term of the 3-point residual is h^2/12 f''''; subtracting it leaves O(h^4)
    spec = PotentialSpec(-5, 0.25, 1, 1)
    lv = solve_level(spec, 2)
    g = default_grid(spec)
    rf = excited_state_R(spec, lv, g)
    f, h = rf.values, g.spacing
    d2 = central_diff2(f, h)
    d4 = central_diff2(central_diff2(f, h), h)
    corrected = d2[1:-1] - h * h / 12 * d4
    res = -corrected + (effective_potential(spec, lv.energy, rf.r[2:-2]) - lv.lam) * f[2:-2]
    assert np.max(np.abs(res)) / np.max(np.abs(f)) < 1e-6 < ode_residual(spec, lv, rf)


def test_coth_argument_fails_ode():
    spec = PotentialSpec(-2, 0, 1, 1)
    lv = solve_level(spec, 1)
    g = default_grid(spec)
    x = spec.alpha * g.points
    x = np.where(x == 0, g.spacing / 2, x)
    p, w = pw_params(spec, lv)
    f = np.exp((p + w) * log_cosh(x) + (w - p) * x) * jacobi_eval(1, -2 * p, -2 * w, -1 / np.tanh(x))
    bad = _finish(g, g.points, f / np.max(np.abs(f)))
    assert ode_residual(spec, lv, bad) > 1e-2
    assert ode_residual(spec, lv, excited_state_R(spec, lv, g)) < 1e-3


@pytest.mark.parametrize("spec", [s for s in BOUND if len(enumerate_levels(s)) > 1])
def test_charge_weighted_orthogonality(spec):
    g = default_grid(spec)
    levels = enumerate_levels(spec)
    wf = [excited_state_R(spec, lv, g) for lv in levels]
    for i, j in itertools.combinations(range(len(levels)), 2):
        assert abs(kg_inner_product(spec, wf[i], levels[i].energy, wf[j], levels[j].energy)) < 1e-6


def test_plain_overlap_is_not_small():
    # distinct levels solve different operators; only the weighted product vanishes
    spec = PotentialSpec(-2, 0.25, 1, 1)
    g = default_grid(spec)
    a, b = (excited_state_R(spec, lv, g) for lv in enumerate_levels(spec))
    assert abs(inner_product(a, b)) > 1e-2


def test_parity_for_symmetric_well():
    spec = PotentialSpec(-5, 0, 1, 1)
    g = default_grid(spec)
    for lv in enumerate_levels(spec):
        f = excited_state_R(spec, lv, g).values
        assert np.allclose(f[::-1], (-1) ** lv.n * f, atol=1e-12)


@pytest.mark.parametrize("spec", BOUND)
def test_matches_oracle_eigenvectors(spec):
    # the oracle vector carries O(h^2) stencil error, up to 1.4e-4 for the deepest n = 3 level
    g = default_grid(spec)
    for lv in enumerate_levels(spec):
        rep = self_consistent_level(spec, lv.n, g)
        assert rep.eigenvector.node_count == lv.n
        assert max_abs_difference(excited_state_R(spec, lv, g), rep.eigenvector) < 5e-4


@pytest.mark.parametrize("v1, v2, n", [(-2, 0.5, 0), (-2, 0, 1), (-2, 0.25, 1)])
def test_eigenvector_examples(v1, v2, n):
    spec = PotentialSpec(v1, v2, 1, 1)
    g = default_grid(spec)
    rep = self_consistent_level(spec, n, g)
    assert max_abs_difference(excited_state_R(spec, solve_level(spec, n), g), rep.eigenvector) < 1e-4


def test_randomized_node_counts():
    for spec in random_attractive_specs(11, 12):
        g = default_grid(spec)
        for lv in enumerate_levels(spec):
            assert excited_state_R(spec, lv, g).node_count == lv.n


def test_half_line_mode_reports_origin_pole():
    spec = PotentialSpec(-2, 0.5, 1, 1)
    g = default_grid(spec, DomainMode.HALF)
    rf = excited_state_R(spec, solve_level(spec, 0), g)
    assert rf.r[0] == pytest.approx(g.spacing / 2)
    assert rf.diagnostics["origin_pole"]
    assert np.allclose(rf.reduced, rf.r * rf.values)
    assert simpson(rf.reduced**2, g.spacing) == pytest.approx(1.0, abs=1e-8)


def test_endpoint_diagnostic_small_for_strongly_bound():
    spec = PotentialSpec(-5, 0, 1, 1)
    rf = excited_state_R(spec, solve_level(spec, 1), default_grid(spec))
    assert rf.diagnostics["endpoint_ratio"] < 1e-6


def test_outputs_are_read_only():
    spec = PotentialSpec(-2, 0, 1, 1)
    rf = excited_state_R(spec, solve_level(spec, 0), default_grid(spec))
    with pytest.raises(ValueError):
        rf.values[0] = 1.0
