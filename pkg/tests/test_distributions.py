import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mechlab.distributions import Power, Tabulated, Uniform, from_spec
from mechlab.exceptions import DomainError, UndefinedConditionalError, ZeroDensityError

unit = st.floats(0.0, 1.0, allow_nan=False)
powers = st.floats(0.3, 5.0)


def test_uniform_basics():
    U = Uniform()
    assert U.cdf(0.3) == pytest.approx(0.3)
    assert U.pdf(0.3) == pytest.approx(1.0)
    assert U.left_integral(1.0) == pytest.approx(0.5)
    assert U.mean() == pytest.approx(0.5)
    assert U.is_uniform
    assert U.virtual_valuation(0.75) == pytest.approx(0.5)
    assert U.virtual_valuation(0.4, 0.8) == pytest.approx(0.0)
    assert U.virtual_cost(0.25) == pytest.approx(0.5)


def test_power_closed_forms():
    P = Power(2.0)
    x = np.array([0.1, 0.5, 0.9])
    np.testing.assert_allclose(P.cdf(x), x**2)
    np.testing.assert_allclose(P.pdf(x), 2 * x)
    np.testing.assert_allclose(P.left_integral(x), x**3 / 3)
    assert P.mean() == pytest.approx(2.0 / 3.0)
    assert P.pdf(0.0) == 0.0
    assert np.isinf(Power(0.5).pdf(0.0))


def test_truncated_mean():
    U = Uniform()
    assert U.truncated_mean_below(0.6) == pytest.approx(0.3)
    with pytest.raises(UndefinedConditionalError):
        U.truncated_mean_below(0.0)


def test_domain_errors():
    U = Uniform()
    for bad in (-0.1, 1.1, np.nan):
        with pytest.raises(DomainError):
            U.cdf(bad)
    with pytest.raises(DomainError):
        U.virtual_valuation(0.9, 0.5)
    with pytest.raises(ZeroDensityError):
        Power(2.0).virtual_valuation(0.0)
    with pytest.raises(DomainError):
        Power(0.0)


@given(powers, unit)
def test_ppf_inverts_cdf(k, u):
    P = Power(k)
    assert P.cdf(P.ppf(u)) == pytest.approx(u, abs=1e-12)


@settings(max_examples=50)
@given(powers)
def test_left_integral_matches_trapezoid(k):
    P = Power(k)
    x = np.linspace(0.0, 1.0, 20001)
    trap = getattr(np, "trapezoid", None) or np.trapz
    approx = trap(P.cdf(x), x)
    assert P.left_integral(1.0) == pytest.approx(approx, abs=1e-6)


@pytest.mark.parametrize("k", [1.0, 2.0, 3.0, 7.5])
def test_power_family_is_regular(k):
    assert Power(k).check_regular().regular


def test_power_below_one_is_irregular():
    # psi = 3 theta - 2 sqrt(theta), decreasing below 1/9
    rep = Power(0.5).check_regular()
    assert not rep.regular
    assert rep.violation[1] < 1.0 / 9.0


def test_irregular_tabulated_is_flagged():
    # steep then flat: density drops sharply, so the virtual valuation dips
    cdf = [0.0, 0.8, 0.85, 0.9, 0.95, 1.0]
    rep = Tabulated(tuple(cdf)).check_regular()
    assert not rep.regular
    assert rep.violation is not None


def test_tabulated_reproduces_uniform():
    T = Tabulated(tuple(np.linspace(0.0, 1.0, 11)))
    x = np.linspace(0.0, 1.0, 37)
    np.testing.assert_allclose(T.cdf(x), x, atol=1e-15)
    np.testing.assert_allclose(T.pdf(x), 1.0)
    np.testing.assert_allclose(T.left_integral(x), x**2 / 2, atol=1e-15)
    np.testing.assert_allclose(T.ppf(x), x, atol=1e-15)


def test_tabulated_knot_density_is_mean_of_slopes():
    T = Tabulated((0.0, 0.2, 1.0))
    assert T.pdf(0.25) == pytest.approx(0.4)
    assert T.pdf(0.75) == pytest.approx(1.6)
    assert T.pdf(0.5) == pytest.approx(1.0)


def test_tabulated_left_integral_exact():
    T = Tabulated.from_distribution(Power(2.0), m=7)
    x = np.linspace(0.0, 1.0, 100001)
    c = T.cdf(x)
    ref = np.concatenate(([0.0], np.cumsum(0.5 * (c[1:] + c[:-1]) * np.diff(x))))
    np.testing.assert_allclose(T.left_integral(x), ref, atol=1e-10)


@pytest.mark.parametrize("cdf", [(0.0, 0.5, 0.4, 1.0), (0.1, 1.0), (0.0, 0.9), (0.0,)])
def test_tabulated_rejects_bad_input(cdf):
    with pytest.raises(DomainError):
        Tabulated(cdf)


def test_breakpoints():
    T = Tabulated(tuple(np.linspace(0.0, 1.0, 5)))
    np.testing.assert_allclose(T.breakpoints(0.3, 0.9), [0.5, 0.75])
    assert Uniform().breakpoints(0.0, 1.0).size == 0


@pytest.mark.parametrize("spec", ["uniform", {"family": "power", "k": 2.5},
                                  {"family": "tabulated", "cdf": [0.0, 0.3, 1.0]}])
def test_spec_round_trip(spec):
    d = from_spec(spec)
    assert from_spec(d.to_spec()) == d


@pytest.mark.parametrize("spec", [{"family": "beta"}, {"family": "power"}, {"k": 2}, 3])
def test_bad_specs(spec):
    with pytest.raises(DomainError):
        from_spec(spec)
