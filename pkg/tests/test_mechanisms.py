import math

import numpy as np
import pytest

from mechlab import mechanisms as mech
from mechlab.distributions import Power, Tabulated, Uniform
from mechlab.exceptions import RegularityError
from mechlab.numerics import integrate

U = Uniform()
P2 = Power(2.0)
DSS = (260.0 - 8.0 * math.sqrt(10.0)) / 279.0


def uniform_dynamic_profit(tb, d):
    return (1 - tb) * (tb - d * tb**2 / 4 - 0.5) + d * tb**3 / 12


def test_power2_posted_prices():
    eafp = mech.solve_eafp(P2, U)
    # psi(p) = (3p^2 - 1) / (2p) = 1/2
    assert eafp.price0 == pytest.approx((1 + math.sqrt(13)) / 6, abs=1e-12)
    eao = mech.solve_eao(P2, U)
    # (1 - p^2) p^2 / 2 peaks at p = 1/sqrt(2)
    assert eao.price0 == pytest.approx(1 / math.sqrt(2), abs=1e-7)
    assert eao.profit == pytest.approx(0.125, abs=1e-12)


def test_ex_post_profit_uniform():
    assert mech.ex_post_profit(U, U) == pytest.approx(1 / 12, abs=1e-13)


def test_epo_is_linear_in_delta():
    base = mech.solve_epo(P2, U, 1.0).profit
    for d in (0.1, 0.37, 0.8):
        assert mech.solve_epo(P2, U, d).profit == pytest.approx(d * base, abs=1e-10)


@pytest.mark.parametrize("tb, d", [(0.3, 0.2), (0.7, 0.5), (0.93, 0.9), (1.0, 0.6)])
def test_dynamic_profit_uniform_closed_form(tb, d):
    assert mech.dynamic_profit(U, U, tb, d) == pytest.approx(uniform_dynamic_profit(tb, d), abs=1e-12)
    assert mech.coasian_p0(U, U, tb, d) == pytest.approx(tb - d * tb**2 / 4, abs=1e-12)


def test_dynamic_at_point_nine():
    s = mech.solve_dynamic(U, U, 0.9)
    assert s.theta_bar == pytest.approx(0.9298840362, abs=1e-8)
    assert s.price0 == pytest.approx(0.7353300, abs=1e-6)
    assert s.profit == pytest.approx(0.0768046, abs=1e-7)
    assert s.theta_star == pytest.approx(s.theta_bar / 2, abs=1e-10)


def test_phi_values():
    assert mech.phi_cap(U, U, 1.0) == pytest.approx(1 / 12, abs=1e-12)
    assert mech.phi_cap(U, U, 0.0) == 0.0
    x = 0.6
    assert mech.phi_cap(U, U, x) == pytest.approx(x**3 / 12 - (1 - x) * x**2 / 4, abs=1e-12)


def test_decomposition_at_point_eight():
    lhs = mech.dynamic_profit(U, U, 0.8, 0.5)
    rhs = mech.eafp_objective(U, U, 0.8) + 0.5 * mech.phi_cap(U, U, 0.8)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_theta_bar_monotone_and_above_eafp_price():
    grid = np.linspace(0.02, 0.98, 50)
    tbs = np.array([mech.solve_dynamic(U, U, d).theta_bar for d in grid])
    assert np.all(np.diff(tbs) > 0)
    assert np.all(tbs > 0.75)


@pytest.mark.parametrize("F", [U, P2], ids=["uniform", "power2"])
@pytest.mark.parametrize("d", [0.3, 0.9])
def test_coasian_gap_and_no_deviation(F, d):
    s = mech.solve_dynamic(F, U, d)
    tb, p0 = s.theta_bar, s.price0
    assert p0 < tb
    rule = s.price_rule
    for theta in np.linspace(tb, 1.0, 20):
        def gain(w):
            return max(theta - rule(w), 0.0)

        wait = d * integrate(gain, 0.0, tb, tol=1e-12).value
        assert theta - p0 >= wait - 1e-8
        if theta == tb:
            assert theta - p0 == pytest.approx(wait, abs=1e-8)


def test_dynamic_converges_to_epo():
    d = 0.9999
    gap = mech.solve_dynamic(U, U, d).profit - mech.solve_epo(U, U, d).profit
    assert 0 < gap < 1e-3


def test_ex_post_rule():
    r = mech.ExPostPriceRule(U, 0.8)
    assert r(0.2) == pytest.approx(0.5)
    assert math.isnan(r(0.9))
    rp = mech.ExPostPriceRule(P2, 0.8)
    w = np.array([0.0, 0.1, 0.5, 0.79, 0.85])
    p = rp(w)
    assert math.isnan(p[-1])
    np.testing.assert_allclose(P2._psi(p[:-1], 0.8), w[:-1], atol=1e-12)
    assert rp(0.5) == pytest.approx(p[2], abs=1e-12)


def test_thresholds_uniform():
    th = mech.regime_thresholds(U, U)
    assert th.delta_star == pytest.approx(0.75, abs=1e-10)
    assert th.delta_bar == pytest.approx(8 / 9, abs=1e-10)
    assert th.delta_double_star == pytest.approx(DSS, abs=1e-9)
    assert th.delta_star < th.delta_double_star < th.delta_bar


def test_compare_flips_at_threshold():
    assert mech.compare(U, U, 0.5).best == "EAO"
    assert mech.compare(U, U, 0.9).best == "D"
    assert mech.compare(U, U, DSS - 1e-6).best == "EAO"
    assert mech.compare(U, U, DSS + 1e-6).best == "D"


def test_power2_single_crossing():
    # D profit is the upper envelope of eafp(x) + delta * phi(x) over x
    xs = np.linspace(0.001, 1.0, 2001)
    base = np.array([mech.eafp_objective(P2, U, x) for x in xs])
    phi = np.array([mech.phi_cap(P2, U, x) for x in xs])
    deltas = np.linspace(0.005, 0.995, 200)
    pi_d = np.max(base[None, :] + deltas[:, None] * phi[None, :], axis=1)
    gap = pi_d - mech.solve_eao(P2, U).profit
    flips = np.nonzero(np.diff(np.sign(gap)))[0]
    assert flips.size == 1
    th = mech.regime_thresholds(P2, U)
    assert deltas[flips[0]] - 0.01 < th.delta_double_star < deltas[flips[0] + 1] + 0.01
    assert th.delta_star == pytest.approx(0.80048, abs=1e-5)


def test_solution_record():
    d = mech.solve("d", U, U, 0.5).to_dict()
    assert set(d) == {"kind", "price0", "theta_bar", "theta_star", "profit", "delta"}
    assert d["kind"] == "D"


def test_solve_errors():
    with pytest.raises(ValueError):
        mech.solve("EPO", U, U)
    with pytest.raises(ValueError):
        mech.solve("XYZ", U, U, 0.5)
    with pytest.raises(RegularityError):
        mech.solve_eafp(Power(0.5), U)
    with pytest.raises(RegularityError):
        mech.solve_dynamic(Tabulated((0.0, 0.8, 0.85, 0.9, 0.95, 1.0)), U, 0.5)
