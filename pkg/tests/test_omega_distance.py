import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blochlip.errors import DomainError
from blochlip.geometry import Box, p_norm, UnitBall
from blochlip.omega_distance import (
    GeodesicConfig,
    lim_ratio_check,
    omega_distance,
    omega_distance_grid_oracle,
    omega_length,
    unit_directions,
)
from blochlip.paths import Polyline, segment
from blochlip.weights import Weight, constant_one, hyperbolic, hyperbolic_distance, spherical, spherical_geodesic_distance


@st.composite
def disk_pairs(draw, rmax=0.85):
    pts = []
    for _ in range(2):
        r = draw(st.floats(0, rmax))
        a = draw(st.floats(0, 2 * np.pi))
        pts.append(np.array([r * np.cos(a), r * np.sin(a)]))
    if np.linalg.norm(pts[0] - pts[1]) < 1e-3:
        pts[1] = pts[1] + np.array([1e-3, 0.0])
    return pts


def test_config_validation():
    for bad in (dict(control_points=1), dict(step=0), dict(shrink=1.0), dict(margin=-1), dict(confine=1.0)):
        with pytest.raises(ValueError):
            GeodesicConfig(**bad)


def test_constant_weight_gives_euclidean_distance():
    d = omega_distance([0.0, 0.0, 0.0], [1.0, 2.0, 2.0], constant_one())
    assert d.value == pytest.approx(3.0, rel=1e-12)
    assert d.bound == "upper"


@given(disk_pairs())
@settings(max_examples=15, deadline=None)
def test_distance_is_an_upper_bound_close_to_rho(pair):
    x, y = pair
    rho = hyperbolic_distance(x, y)
    d = omega_distance(x, y, hyperbolic())
    assert d.value >= rho - 1e-9
    assert d.value <= rho * (1 + 1e-3)


def test_history_never_increases():
    d = omega_distance([0.6, 0.1], [-0.2, 0.7], hyperbolic())
    h = np.array(d.history)
    assert len(h) > 1
    # within each level the total only falls; levels restart on a refined path
    drops = np.diff(h)
    assert np.sum(drops > 1e-12) <= 5


def test_deterministic():
    a = omega_distance([0.5, -0.3], [-0.4, 0.6], hyperbolic())
    b = omega_distance([0.5, -0.3], [-0.4, 0.6], hyperbolic())
    assert a.value == b.value
    np.testing.assert_array_equal(a.path.points, b.path.points)


def test_geodesic_bends_toward_the_origin():
    """Off-centre hyperbolic geodesics are circular arcs bulging toward 0."""
    x, y = np.array([0.6, 0.6]), np.array([0.6, -0.6])
    d = omega_distance(x, y, hyperbolic())
    mid = d.path(0.5)
    assert mid[0] < 0.6 - 0.05
    assert d.value < omega_length(segment(x, y), hyperbolic())


def test_domain_errors():
    with pytest.raises(DomainError):
        omega_distance([0, 0], [1.2, 0], hyperbolic())
    with pytest.raises(ValueError):
        omega_distance([0.1, 0.1], [0.1, 0.1], hyperbolic())
    with pytest.raises(DomainError):
        omega_length(Polyline([[0, 0], [1.5, 0]]), hyperbolic())


def test_spherical_upper_bound_on_the_plane():
    rng = np.random.default_rng(5)
    for _ in range(4):
        x, y = rng.normal(size=2) * 2, rng.normal(size=2) * 2
        exact = spherical_geodesic_distance(x, y)
        d = omega_distance(x, y, spherical()).value
        assert exact - 1e-9 <= d <= exact * (1 + 2e-3)


def test_far_points_do_not_collapse():
    """Long spherical paths keep a finite length instead of escaping to infinity."""
    x, y = np.array([40.0, -48.0]), np.array([0.56, 0.1])
    d = omega_distance(x, y, spherical()).value
    assert d >= spherical_geodesic_distance(x, y) - 1e-9


def test_max_norm_domain_weight():
    box_weight = Weight(lambda x: 1.0 + np.sum(x * x, axis=-1), domain=Box((-1, -1), (1, 1)), label="bowl")
    d = omega_distance([-0.8, 0.0], [0.8, 0.0], box_weight)
    # straight line through the minimum of the bowl is optimal: 1.6 + 2 * 0.8^3 / 3
    assert d.value == pytest.approx(1.6 + 2 * 0.8**3 / 3, rel=1e-6)


def test_p_norm_ball_distance_is_bounded_by_chord():
    w = Weight(lambda x: np.ones(x.shape[:-1]), domain=UnitBall(p_norm(1)), label="flat_l1")
    d = omega_distance([0.3, 0.1], [-0.2, 0.4], w)
    assert d.value == pytest.approx(0.8, rel=1e-9)


@pytest.mark.parametrize("stencil,bound", [(8, 0.09), (16, 0.03), (32, 0.01)])
def test_grid_oracle_error_shrinks_with_stencil(stencil, bound):
    x, y = np.array([0.2, -0.3]), np.array([-0.5, 0.4])
    rho = hyperbolic_distance(x, y)
    g = omega_distance_grid_oracle(x, y, hyperbolic(), resolution=200, stencil=stencil)
    assert abs(g - rho) / rho < bound


def test_grid_oracle_rejects_bad_inputs():
    with pytest.raises(ValueError):
        omega_distance_grid_oracle([0, 0], [0.5, 0], hyperbolic(), stencil=12)
    with pytest.raises(ValueError):
        omega_distance_grid_oracle([0, 0], [0.5, 0], spherical())
    with pytest.raises(DomainError):
        omega_distance_grid_oracle([0, 0], [1.5, 0], hyperbolic())


@pytest.mark.parametrize("dim,count", [(1, 2), (2, 16), (3, 40), (5, 20)])
def test_unit_directions(dim, count):
    u = unit_directions(dim, count)
    assert u.shape == (count, dim)
    np.testing.assert_allclose(np.linalg.norm(u, axis=-1), 1.0)
    np.testing.assert_array_equal(u, unit_directions(dim, count))


def test_lim_ratio_table():
    table = lim_ratio_check([0.0, 0.5], hyperbolic(), [1e-1, 1e-2], directions=8)
    assert table.weight_at_point == pytest.approx(4 / 3)
    assert table.shrinking
    assert table.rows[-1].max_deviation < table.rows[0].max_deviation
    assert set(table.to_dict()) == {"point", "weight_at_point", "rows", "shrinking"}
    with pytest.raises(ValueError):
        lim_ratio_check([0.0, 0.0], hyperbolic(), [1e-2, 1e-1])
    with pytest.raises(DomainError):
        lim_ratio_check([0.95, 0.0], hyperbolic(), [1e-1])
