import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blochlip.errors import PoleError
from blochlip.operator_monotone import (
    Artanh,
    Nevanlinna,
    check_sqrt_mean_inequality,
    is_derivative_increasing,
    om_derivative,
    om_eval,
    parse_om_spec,
    random_nevanlinna,
)

open_unit = st.floats(-0.999, 0.999, allow_nan=False)


@st.composite
def nevanlinnas(draw):
    k = draw(st.integers(1, 5))
    nodes = draw(st.lists(st.floats(-1, 1), min_size=k, max_size=k))
    raw = np.array(draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k)))
    w = raw / raw.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return Nevanlinna(draw(st.floats(-2, 2)), draw(st.floats(0.1, 5)), tuple(zip(nodes, w)))


def test_artanh_values():
    phi = Artanh()
    assert om_eval(phi, 0.5) == pytest.approx(0.5493061443340549)
    assert om_derivative(phi, 0.5) == pytest.approx(4 / 3)
    with pytest.raises(PoleError):
        phi.value(1.0)


def test_nevanlinna_single_atom_at_one_is_log():
    # t / (1 - t) integrates phi' = 1/(1-t)^2; phi(t) = t/(1-t)
    phi = Nevanlinna(0.0, 1.0, ((1.0, 1.0),))
    t = np.linspace(-0.9, 0.9, 7)
    np.testing.assert_allclose(phi.value(t), t / (1 - t))
    np.testing.assert_allclose(phi.derivative(t), 1 / (1 - t) ** 2)


@given(nevanlinnas(), open_unit)
@settings(max_examples=100, deadline=None)
def test_nevanlinna_derivative_matches_central_difference(phi, t):
    h = 1e-6
    if abs(t) + h >= 1:
        return
    fd = (phi.value(t + h) - phi.value(t - h)) / (2 * h)
    assert phi.derivative(t) == pytest.approx(fd, rel=1e-5, abs=1e-8)
    assert phi.value(0.0) == pytest.approx(phi.phi0)
    assert phi.derivative(0.0) == pytest.approx(phi.dphi0)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(phi0=0, dphi0=1, atoms=()),
        dict(phi0=0, dphi0=0, atoms=((0.0, 1.0),)),
        dict(phi0=0, dphi0=1, atoms=((1.5, 1.0),)),
        dict(phi0=0, dphi0=1, atoms=((0.0, 0.5),)),
        dict(phi0=0, dphi0=1, atoms=((0.0, 1.2), (0.1, -0.2))),
    ],
)
def test_nevanlinna_validation(kwargs):
    with pytest.raises(ValueError):
        Nevanlinna(**kwargs)


@given(nevanlinnas())
@settings(max_examples=50, deadline=None)
def test_spec_round_trip(phi):
    again = parse_om_spec(str(phi))
    assert again == phi


def test_parse_errors():
    assert isinstance(parse_om_spec(" artanh "), Artanh)
    with pytest.raises(ValueError):
        parse_om_spec("tanh")
    with pytest.raises(ValueError):
        parse_om_spec("nev:phi0=0,dphi0=1,atoms=(0.5)")


@given(nevanlinnas() | st.just(Artanh()), open_unit, open_unit)
@settings(max_examples=300, deadline=None)
def test_sqrt_mean_slack_is_nonnegative(phi, a, b):
    if a == b:
        return
    s, t = min(a, b), max(a, b)
    assert check_sqrt_mean_inequality(phi, s, t) >= -1e-12


def test_sqrt_mean_requires_order():
    with pytest.raises(ValueError):
        check_sqrt_mean_inequality(Artanh(), 0.5, 0.1)


def test_sqrt_mean_fails_for_a_function_that_is_not_operator_monotone():
    """t - t^3/3 increases on (-1, 1) but its derivative peaks inside; the slack goes negative."""

    class Flattening:
        def value(self, t):
            t = np.asarray(t)
            return t - t**3 / 3

        def derivative(self, t):
            return 1 - np.asarray(t) ** 2

    # phi(0.9) - phi(-0.9) = 1.314 against sqrt(0.19 * 0.19) * 1.8 = 0.342
    assert check_sqrt_mean_inequality(Flattening(), -0.9, 0.9) == pytest.approx(0.342 - 1.314)


def test_derivative_monotonicity():
    assert is_derivative_increasing(Artanh()).increasing
    rep = is_derivative_increasing(Nevanlinna(0, 1, ((-1.0, 1.0),)))
    assert not rep.increasing and rep.witness[0] < rep.witness[1]
    assert rep.atoms_nonnegative is False
    rep = is_derivative_increasing(Nevanlinna(0, 1, ((0.3, 0.5), (0.9, 0.5))), hi=0.99)
    assert rep.increasing and rep.atoms_nonnegative
    with pytest.raises(ValueError):
        is_derivative_increasing(Artanh(), hi=1.5)


def test_random_nevanlinna_is_seeded():
    a = random_nevanlinna(np.random.default_rng(3))
    b = random_nevanlinna(np.random.default_rng(3))
    assert a == b
    assert abs(a.weights.sum() - 1) < 1e-12
