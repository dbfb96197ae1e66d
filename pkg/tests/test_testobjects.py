import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from colombeau_lab import testobjects as to
from colombeau_lab.classification import TypeTag
from colombeau_lab.exceptions import ConstructionFailure, InvalidArgument
from colombeau_lab.numerics import DEFAULT_EPS_GRID, HP, fit_order

EXACT = to.MomentProfile


def test_make_bump_values():
    assert to.make_bump(1)(0.0) == pytest.approx(math.exp(-1), abs=1e-15)
    assert to.make_bump(1)(1.0) == 0.0
    assert to.make_bump(2)(3.0) == 0.0
    with pytest.raises(InvalidArgument):
        to.make_bump(0)


def test_vanishes_outside_support():
    phi = to.make_Aq_generic(4, 1.5)
    xs = np.concatenate([np.linspace(-5, -1.5, 50), np.linspace(1.5, 5, 50)])
    assert np.all(phi(xs) == 0)
    assert np.all(to.scale(phi, 0.1)(xs / 5) == 0)


def test_make_Aq_q0_is_normalized_bump():
    phi = to.make_Aq(0)
    beta = to.make_bump(1)
    xs = np.linspace(-1, 1, 11)
    np.testing.assert_allclose(phi(xs), beta(xs) / to.moment(beta, 0), rtol=1e-12)
    assert to.moment(phi, 0) == pytest.approx(1, abs=1e-10)


@pytest.mark.parametrize("q", range(0, 11))
def test_make_Aq_certified(q):
    assert to.verify_moments(to.make_Aq(q), EXACT(q), 1e-8).passed


def test_make_Aq_odd_moment_vanishes_by_symmetry():
    phi = to.make_Aq(1)
    assert abs(to.moment(phi, 1)) < 1e-15
    assert to.exact_moment(phi, 1) == 0


def test_make_Aq_limits():
    with pytest.raises(InvalidArgument):
        to.make_Aq(-1)
    with pytest.raises(InvalidArgument):
        to.make_Aq(2, radius=-1)
    with pytest.raises(ConstructionFailure):
        to.make_Aq(to.MAX_Q + 1)
    assert to.hankel_condition(12) < to.MAX_CONDITION


@pytest.mark.parametrize("q", [0, 1, 2, 3, 4, 6])
def test_generic_Aq_has_free_next_moment(q):
    phi = to.make_Aq_generic(q)
    assert to.verify_moments(phi, EXACT(q)).passed
    assert abs(to.moment(phi, q + 1)) > 1e-3


def test_verify_moments_fails_when_claim_too_strong():
    rep = to.verify_moments(to.make_Aq_generic(2), EXACT(4), 1e-8)
    assert not rep.passed
    assert rep.residuals[3] > 1e-8 or rep.residuals[4] > 1e-8
    assert to.verify_moments(to.zero_function(), EXACT(3, "zero_mass"), 1e-30).passed
    assert to.verify_moments(to.make_bump(1), EXACT(5, "unconstrained")).passed
    with pytest.raises(InvalidArgument):
        to.verify_moments(to.make_bump(1), EXACT(0), 0)
    with pytest.raises(InvalidArgument):
        EXACT(1, "sideways")


def test_moment_examples():
    assert abs(to.moment(to.make_Aq(3), 2)) < 1e-8
    odd = to.make_moment_direction(1)
    assert abs(to.moment(odd, 0)) < 1e-15
    assert to.half_moment(odd) == pytest.approx(0, abs=1e-15)
    assert to.half_moment(to.make_Aq(0)) > 0
    assert to.moment(to.make_Aq(0), 0) == pytest.approx(1, abs=1e-10)


def test_exact_and_quadrature_moments_agree():
    phi = to.make_Aq_generic(5, 0.7)
    for k in range(10):
        assert float(to.exact_moment(phi, k)) == pytest.approx(to.moment(phi, k), abs=1e-10)


@pytest.mark.parametrize("k", range(0, 13))
def test_moment_scaling_law(k):
    phi = to.make_Aq_generic(3)
    m = to.moment(phi, k)
    for eps in DEFAULT_EPS_GRID:
        got = to.moment(to.scale(phi, eps), k)
        assert abs(got - eps**k * m) <= 1e-10 * (1 + abs(m)) * max(eps**k, 1e-300) + 1e-300


def test_scale_examples():
    phi = to.make_Aq_generic(2)
    eps = 0.125
    s = to.scale(phi, eps)
    assert s.support_radius == pytest.approx(eps * phi.support_radius)
    assert to.moment(s, 0) == pytest.approx(to.moment(phi, 0), rel=1e-12)
    assert to.l2_inner(s) == pytest.approx(to.l2_inner(phi) / eps, rel=1e-10)
    xs = np.linspace(-0.3, 0.3, 41)
    np.testing.assert_allclose(to.scale(to.scale(phi, 0.5), 0.5)(xs), to.scale(phi, 0.25)(xs), rtol=1e-13)
    with pytest.raises(InvalidArgument):
        to.scale(phi, 0)


@given(st.floats(1e-4, 1.0))
def test_scaling_invariance_of_v(eps):
    phi = to.make_Aq_generic(2)
    v = to.half_moment(phi) * math.sqrt(to.l2_inner(phi))
    s = to.scale(phi, eps)
    assert to.half_moment(s) * math.sqrt(to.l2_inner(s)) == pytest.approx(v, rel=1e-8)
    assert to.half_moment(s) == pytest.approx(math.sqrt(eps) * to.half_moment(phi), rel=1e-8)


@given(st.floats(-3, 3).filter(lambda c: abs(c) > 1e-3))
def test_l2_homogeneity(c):
    phi = to.make_Aq(2)
    assert to.l2_inner(to.linear_combine([(c, phi)])) == pytest.approx(c * c * to.l2_inner(phi), rel=1e-12)
    assert to.l2_inner(phi) > 0
    assert to.l2_inner(to.zero_function()) == 0


def test_linear_combine():
    phi, psi = to.make_Aq(2), to.make_moment_direction(3, 0.5)
    xs = np.linspace(-1, 1, 33)
    np.testing.assert_allclose(to.linear_combine([(1, phi)])(xs), phi(xs), rtol=1e-15)
    assert np.all(to.linear_combine([(1, phi), (-1, phi)])(xs) == 0)
    mix = to.linear_combine([(2.0, phi), (-3.0, psi)])
    assert mix.support_radius == 1.0
    for k in range(6):
        assert to.moment(mix, k) == pytest.approx(2 * to.moment(phi, k) - 3 * to.moment(psi, k), abs=1e-10)
    with pytest.raises(InvalidArgument):
        to.linear_combine([])


def test_linear_combine_mixed_scales():
    phi = to.make_Aq(0)
    a, b = to.scale(phi, 0.5), to.scale(phi, 0.25)
    mix = to.linear_combine([(1, a), (1, b)])
    xs = np.linspace(-0.6, 0.6, 25)
    np.testing.assert_allclose(mix(xs), a(xs) + b(xs), rtol=1e-13, atol=1e-15)


def test_derivatives_match_finite_differences():
    phi = to.make_Aq_generic(3, 0.8)
    xs = np.linspace(-0.7, 0.7, 9)
    h = 1e-5
    for d in range(1, 4):
        fd = (phi.derivative(xs + h, d - 1) - phi.derivative(xs - h, d - 1)) / (2 * h)
        np.testing.assert_allclose(phi.derivative(xs, d), fd, rtol=1e-5, atol=1e-5)


def test_json_roundtrip_is_exact():
    phi = to.scale(to.make_Aq_generic(4, 1.3), 0.25)
    back = to.TestFunction.from_json(phi.to_json())
    assert back == phi
    d = phi.to_dict()
    assert {"radius", "coeffs", "scale", "amplitude"} <= set(d)
    # plain float coefficients are accepted too
    plain = to.TestFunction.from_dict({"radius": 1.0, "coeffs": [1.0]})
    assert plain(0.0) == pytest.approx(math.exp(-1))


def test_directions_have_the_claimed_moments():
    psi = to.make_moment_direction(4, 0.5)
    assert to.verify_moments(psi, EXACT(3, "zero_mass")).passed
    assert float(to.exact_moment(psi, 4)) == pytest.approx(1, rel=1e-12)
    eta = to.make_half_moment_direction(4, 2.0)
    assert to.verify_moments(eta, EXACT(4, "zero_mass")).passed
    assert to.half_moment(eta) == pytest.approx(1, rel=1e-8)
    xs = np.linspace(-2, 2, 21)
    np.testing.assert_allclose(eta(xs), eta(-xs))


def test_asymptotic_path_with_exact_base():
    path = to.make_asymptotic_path(3, to.make_Aq(3), to.make_moment_direction(1))
    assert path.type_tag == TypeTag("e", "A")
    for eps in (0.1, 0.01):
        assert abs(to.moment(path(eps), 1) - eps**3) < 1e-12


def test_asymptotic_path_order_fit():
    path = to.make_asymptotic_path(2, to.make_Aq(0), to.make_moment_direction(1))
    vals = [(e, float(to.exact_moment(path(e), 1))) for e in DEFAULT_EPS_GRID]
    assert vals[0][1] == pytest.approx(DEFAULT_EPS_GRID[0] ** 2, rel=1e-12)
    assert abs(fit_order(vals).exponent - 2) < 0.02


@pytest.mark.parametrize("q", [1, 2, 3])
def test_asymptotic_path_all_moments_of_order_q(q):
    # direction with every moment 1..q nonzero
    dirs = [to.make_moment_direction(j) for j in range(1, q + 1)]
    direction = to.linear_combine([(1.0, d) for d in dirs])
    path = to.make_asymptotic_path(q, to.make_Aq(q), direction, x_modulation=math.cos)
    assert path.type_tag == TypeTag("ex", "Aginf")
    for j in range(1, q + 1):
        for x in (0.0, 0.7):
            vals = [(e, float(to.exact_moment(path(e, x), j))) for e in DEFAULT_EPS_GRID]
            assert abs(fit_order(vals).exponent - q) < 0.02


def test_asymptotic_path_rejects_bad_inputs():
    with pytest.raises(InvalidArgument):
        to.make_asymptotic_path(2, to.make_Aq(2), to.make_Aq(0))
    with pytest.raises(InvalidArgument):
        to.make_asymptotic_path(2, to.make_moment_direction(1), to.make_moment_direction(1))


def test_constant_path():
    phi = to.make_Aq(2)
    path = to.make_constant_path(phi, 2)
    assert path(0.1, 0.3) is phi and path.type_tag == TypeTag("c", "V")
    assert to.make_constant_path(phi).type_tag == TypeTag("c", "0")


def test_family_certification():
    fam = to.make_family(q_max=4, per_q=2, seed=3)
    assert fam.check()
    assert len(fam.members) == 10
    assert all(m.support_radius <= fam.common_radius for m in fam.members)
    assert len(fam.select(4)) == 2
    assert len(fam.select(0)) == 10
    for m in fam.select(3):
        assert to.verify_moments(m, EXACT(3)).passed
    # a tampered certificate is caught
    bad = to.BoundedFamily(fam.members, fam.common_radius, 0, (1e-3,), "bad", fam.member_orders)
    assert not bad.check()


def test_family_is_seed_deterministic():
    a = to.make_family(q_max=2, per_q=3, seed=7)
    b = to.make_family(q_max=2, per_q=3, seed=7)
    c = to.make_family(q_max=2, per_q=3, seed=8)
    assert a.members == b.members
    assert a.members != c.members
