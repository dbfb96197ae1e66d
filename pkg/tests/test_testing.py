import math

import pytest

from colombeau_lab import embedding as emb
from colombeau_lab import testing as T
from colombeau_lab import testobjects as to
from colombeau_lab.exceptions import InvalidArgument, PreconditionViolation
from colombeau_lab.numerics import HP, geometric_grid

GRID = geometric_grid(2.0**-4, 0.5, 7)
SIN = emb.named_function("sin")
IOTA_SIGMA_SIN = emb.embed_smooth(SIN) - emb.const_embed(SIN)


def test_eval_scaled_examples():
    phi = to.make_Aq_generic(2)
    assert T.eval_scaled(emb.const_embed(SIN), phi, 0.01, 0.4) == HP.sin(HP.mpf(0.4))
    got = T.eval_scaled(emb.embed_delta(), phi, 0.01, 0.0)
    assert float(got) == pytest.approx(phi(0.0) / 0.01, rel=1e-14)
    sq = emb.embed_smooth(emb.named_function("x^2"))
    assert abs(T.eval_scaled(sq, phi, 0.3, 0.7) - HP.mpf(0.7) ** 2) < 1e-40


def test_eval_scaled_rejects_bad_input():
    with pytest.raises(InvalidArgument):
        T.eval_scaled(T.ZERO, to.make_moment_direction(1), 0.1, 0.0)
    with pytest.raises(InvalidArgument):
        T.eval_scaled(T.ZERO, to.make_Aq(0), 0.0, 0.0)


def test_x_grid():
    assert T.x_grid((-1, 1), 3) == [-1.0, 0.0, 1.0]
    assert T.x_grid((0.5, 0.5), 9) == [0.5]
    with pytest.raises(InvalidArgument):
        T.x_grid((1, 0), 3)


def test_analytic_dx_agrees_with_finite_differences():
    phi = to.scale(to.make_Aq_generic(2), 0.1)
    R = emb.embed_smooth(SIN) * emb.embed_smooth(emb.named_function("exp"))
    plain = T.Representative(R.eval)
    for x in (-0.5, 0.2):
        for k in (1, 2):
            assert abs(R.dx(phi, x, k) - plain.dx(phi, x, k)) < 1e-6


def test_negligible_c0_finds_q(family):
    rep = T.test_negligible_c0(IOTA_SIGMA_SIN, (-1, 1), 3, [family], (0, 4), GRID, x_samples=5)
    assert rep.verdict and rep.q_found == 2
    assert rep.per_q_orders[2].exponent == pytest.approx(3, abs=0.1)
    d = rep.to_dict()
    assert d["verdict"] == "pass" and d["family_id"] == family.label and "caveat" in d


def test_negligible_c0_orders_monotone_in_q(family):
    rep = T.test_negligible_c0(IOTA_SIGMA_SIN, (-1, 1), 20, [family], (1, 6), GRID, x_samples=3)
    orders = [rep.per_q_orders[q].exponent for q in range(1, 7)]
    assert all(b >= a - 0.1 for a, b in zip(orders, orders[1:]))
    assert not rep.verdict


def test_negligible_c0_fails_for_sigma(small_family):
    rep = T.test_negligible_c0(emb.const_embed(SIN), (-1, 1), 1, [small_family], (0, 2), GRID, x_samples=3)
    assert not rep.verdict and rep.q_found is None
    assert abs(rep.per_q_orders[0].exponent) < 1e-9


def test_negligible_c0_zero_representative(small_family):
    rep = T.test_negligible_c0(T.ZERO, (-1, 1), 5, [small_family], (1, 2), GRID, x_samples=3)
    assert rep.verdict and rep.q_found == 1
    assert all(o.saturated for o in rep.per_q_orders.values())


def test_negligible_c0_skips_uncovered_q(small_family):
    rep = T.test_negligible_c0(T.ZERO, (-1, 1), 1, [small_family], (2, 4), GRID, x_samples=3)
    assert sorted(rep.per_q_orders) == [2]
    assert len(rep.warnings) == 2


def test_negligible_c1(family):
    rep = T.test_negligible_c1(IOTA_SIGMA_SIN, (-1, 1), 2, 4, [family], (4, 4), GRID, x_samples=5)
    assert rep.verdict
    for a in range(3):
        assert rep.per_order[a].per_q_orders[4].exponent >= 4.5
    zero = T.test_negligible_c1(T.ZERO, (-1, 1), 2, 5, [family], (0, 0), GRID, x_samples=3)
    assert zero.verdict


def test_negligible_c1_fails_for_sigma_x(small_family):
    R = emb.const_embed(emb.named_function("x"))
    rep = T.test_negligible_c1(R, (-1, 1), 1, 1, [small_family], (0, 1), GRID, x_samples=3)
    assert not rep.per_order[1].verdict
    assert abs(rep.per_order[1].per_q_orders[0].exponent) < 1e-9


def test_c0_pass_implies_c1_pass_one_order_lower(family):
    c0 = T.test_negligible_c0(IOTA_SIGMA_SIN, (-1, 1), 4, [family], (3, 3), GRID, x_samples=5)
    assert c0.verdict
    c1 = T.test_negligible_c1(IOTA_SIGMA_SIN, (-1, 1), 1, 3, [family], (3, 3), GRID, x_samples=5)
    assert c1.verdict


def test_moderate_examples(family):
    delta = T.test_moderate(emb.embed_delta(), (-0.5, 0.5), [family], GRID, x_samples=5)
    assert delta.order.exponent == pytest.approx(-1, abs=0.1) and delta.moderate
    const = T.test_moderate(emb.const_embed(SIN), (-1, 1), [family], GRID, x_samples=5)
    assert abs(const.order.exponent) < 0.05
    smooth = T.test_moderate(emb.embed_smooth(SIN), (-1, 1), [family], GRID, x_samples=5)
    assert smooth.order.exponent >= -0.05
    wild = T.Representative(lambda phi, x: HP.mpf(phi.scale) ** -12)
    assert not T.test_moderate(wild, (0, 0), [family], GRID, x_samples=1).moderate


def test_directional_d1_linear_representative():
    R = emb.embed_delta()
    psi = to.make_moment_direction(2, 0.8)
    x = HP.mpf(0.3)
    d_a = T.directional_d1(R, to.make_Aq(0), [psi], x)
    d_b = T.directional_d1(R, to.make_Aq_generic(4), [psi], x)
    expect = psi.hp_value(-x)
    assert abs(d_a - expect) <= 1e-8 * abs(expect)
    assert abs(d_b - expect) <= 1e-8 * abs(expect)
    # linear in psi
    d2psi = T.directional_d1(R, to.make_Aq(0), [to.linear_combine([(2.5, psi)])], x)
    assert abs(d2psi - 2.5 * expect) <= 1e-8 * abs(expect)
    assert abs(T.directional_d1(R, to.make_Aq(0), [psi], x, k=2)) < 1e-30


def test_directional_d1_quadratic_functional():
    R = T.Representative(lambda phi, x: to.l2_inner(phi))
    phi, psi = to.make_Aq(2), to.make_moment_direction(1)
    d1 = T.directional_d1(R, phi, [psi], 0.0)
    assert float(d1) == pytest.approx(2 * to.inner(phi, psi), rel=1e-8)
    d2 = T.directional_d1(R, phi, [psi], 0.0, k=2)
    assert float(d2) == pytest.approx(2 * to.l2_inner(psi), rel=1e-6)


def test_directional_d1_rejects_bad_input():
    with pytest.raises(InvalidArgument):
        T.directional_d1(T.ZERO, to.make_Aq(0), [to.make_Aq(0)], 0.0)
    with pytest.raises(InvalidArgument):
        T.directional_d1(T.ZERO, to.make_Aq(0), [to.make_moment_direction(1)], 0.0, k=3)
    with pytest.raises(InvalidArgument):
        T.directional_d1(T.ZERO, to.make_Aq(0), [], 0.0)


def test_landau_demo(family):
    rep = T.demo_c0_implies_c1(IOTA_SIGMA_SIN, (-1, 1), 3, 4, [family], GRID, x_samples=5)
    assert rep.dx_order.exponent >= 2.5
    assert rep.quotient_ok and rep.dx_ok
    assert rep.remainder_order.exponent == pytest.approx(rep.remainder_predicted, abs=0.5)
    assert rep.to_dict()["step"] == f"eps^{3 + rep.N}"


def test_landau_demo_zero(small_family):
    rep = T.demo_c0_implies_c1(T.ZERO, (-1, 1), 2, 1, [small_family], GRID, x_samples=3)
    assert all(r[1] == 0 and r[2] == 0 for r in rep.rows)


def test_landau_demo_polynomial_saturates(family):
    f = emb.named_function("x^3")
    R = emb.embed_smooth(f) - emb.const_embed(f)
    rep = T.demo_c0_implies_c1(R, (-1, 1), 3, 4, [family], GRID, x_samples=3)
    assert rep.c0.per_q_orders[4].saturated


def test_landau_demo_precondition(small_family):
    with pytest.raises(PreconditionViolation) as err:
        T.demo_c0_implies_c1(emb.const_embed(SIN), (-1, 1), 2, 1, [small_family], GRID, x_samples=3)
    assert err.value.report is not None and not err.value.report.verdict


def test_reports_are_deterministic(small_family):
    a = T.test_negligible_c0(IOTA_SIGMA_SIN, (-1, 1), 2, [small_family], (0, 2), GRID, x_samples=3)
    b = T.test_negligible_c0(IOTA_SIGMA_SIN, (-1, 1), 2, [small_family], (0, 2), GRID, x_samples=3)
    assert a.rows == b.rows and a.to_dict() == b.to_dict()
    assert all(math.isfinite(r[2]) for r in a.rows)
