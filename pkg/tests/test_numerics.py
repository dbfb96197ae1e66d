import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from colombeau_lab import numerics as nu
from colombeau_lab.exceptions import InvalidArgument
from colombeau_lab.testobjects import bump


def test_integrate_polynomial():
    assert nu.integrate(lambda x: x**2, 0.0, 1.0) == pytest.approx(1 / 3, abs=1e-14)


def test_integrate_bump_against_fine_reference():
    ref = nu.integrate(bump, -1.0, 1.0, panels=10 * nu.DEFAULT_PANELS)
    val = nu.integrate(bump, -1.0, 1.0)
    assert val == pytest.approx(ref, abs=1e-13)
    assert val == pytest.approx(0.443993816, abs=1e-9)


def test_integrate_empty_interval():
    assert nu.integrate(math.sin, 0.3, 0.3) == 0.0


def test_integrate_rejects_reversed_interval():
    with pytest.raises(InvalidArgument):
        nu.integrate(math.sin, 1.0, 0.0)


def test_integrate_scalar_only_callable():
    # math.sin rejects arrays, so the scalar fallback is taken
    assert nu.integrate(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-13)


@given(st.integers(0, 31), st.floats(-3, 3), st.floats(0.1, 3))
def test_integrate_exact_on_polynomials(deg, a, width):
    b = a + width
    exact = (b ** (deg + 1) - a ** (deg + 1)) / (deg + 1)
    got = nu.integrate(lambda x: x**deg, a, b, panels=1)
    assert got == pytest.approx(exact, rel=1e-12, abs=1e-13)


def test_hp_rule_integrates_polynomials_to_working_precision():
    xs, ws = nu.hp_rule()
    total = nu.HP.fsum(w * x**30 for x, w in zip(xs, ws))
    assert abs(total - nu.HP.mpf(2) / 31) < nu.HP.mpf(10) ** -50


def test_geometric_grid_examples():
    assert nu.geometric_grid(1, 0.5, 3) == [1, 0.5, 0.25]
    g = nu.geometric_grid(2.0**-4, 0.5, 11)
    assert g[-1] == 2.0**-14
    assert all(a > b > 0 for a, b in zip(g, g[1:]))
    assert tuple(g) == nu.DEFAULT_EPS_GRID


@pytest.mark.parametrize("args", [(0, 0.5, 3), (1, 1.0, 3), (1, 0.5, 1), (1, -0.5, 3)])
def test_geometric_grid_rejects_bad_input(args):
    with pytest.raises(InvalidArgument):
        nu.geometric_grid(*args)


def _power_samples(m, c=3.0, wobble=0.0):
    return [(e, c * e**m * (1 + wobble * math.sin(1 / e))) for e in nu.DEFAULT_EPS_GRID]


@pytest.mark.parametrize("m", [-3, -1, 0, 2, 5])
def test_fit_order_exact_power_law(m):
    est = nu.fit_order(_power_samples(m))
    assert abs(est.exponent - m) < 1e-9
    assert est.residual_rms < 1e-9
    assert est.n_points_used == 11 and not est.saturated
    assert est.prefactor_log == pytest.approx(math.log(3.0), abs=1e-8)


def test_fit_order_with_oscillation():
    assert abs(nu.fit_order(_power_samples(3, wobble=0.01)).exponent - 3) < 0.05


def test_fit_order_saturated():
    est = nu.fit_order([(e, 0.0) for e in nu.DEFAULT_EPS_GRID])
    assert est.saturated and est.exponent == math.inf and est.n_points_used == 0
    est = nu.fit_order([(0.1, 1.0), (0.05, 0.0)])
    assert est.saturated and est.n_points_used == 1


def test_fit_order_excludes_values_below_floor():
    samples = _power_samples(2) + [(1e-5, 0.0)]
    est = nu.fit_order(samples)
    assert est.n_points_used == 11 and abs(est.exponent - 2) < 1e-9


def test_fit_order_rejects_nonpositive_eps():
    with pytest.raises(InvalidArgument):
        nu.fit_order([(0.0, 1.0), (0.1, 1.0)])


def test_fit_order_handles_values_below_double_range():
    samples = [(e, nu.HP.mpf(e) ** 80) for e in nu.DEFAULT_EPS_GRID]
    assert abs(nu.fit_order(samples, floor=1e-300).exponent - 80) < 1e-9
    # float(e**80) underflows for small eps; the HP path must not
    assert float(samples[-1][1]) == 0.0


@given(st.floats(-4, 6), st.floats(1e-6, 1e6))
def test_fit_order_scale_invariant(m, c):
    a = nu.fit_order(_power_samples(m, 1.0)).exponent
    b = nu.fit_order(_power_samples(m, c)).exponent
    assert abs(a - b) < 1e-9


def test_order_estimate_serializes():
    d = nu.fit_order(_power_samples(2)).to_dict()
    assert set(d) == {"exponent", "prefactor_log", "residual_rms", "n_points_used", "window", "saturated"}
    assert d["window"] == pytest.approx([2.0**-14, 2.0**-4], rel=1e-12)


def test_sup_abs_is_deterministic_and_keeps_hp():
    vals = [1e-3, -2e-3, nu.HP.mpf("1e-400")]
    assert nu.sup_abs(vals) == 2e-3
    assert nu.sup_abs([nu.HP.mpf("1e-400"), nu.HP.mpf("-3e-400")]) == nu.HP.mpf("3e-400")
    assert nu.sup_abs([]) == 0.0
    assert nu.log_abs(0) == -math.inf
    assert nu.log_abs(complex(3, 4)) == pytest.approx(math.log(5))
    assert np.isfinite(nu.log_abs(nu.HP.mpf("1e-500")))
