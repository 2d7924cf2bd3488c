import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from blochlip.errors import NonConvergenceError
from blochlip.geometry import MAX_NORM
from blochlip.paths import (
    Partition,
    Polyline,
    integrate,
    integrate_segment,
    length,
    read_polyline_csv,
    restrict,
    riemann_sum,
    segment,
    uniform_partition,
    write_polyline_csv,
)

coords = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def polylines(min_points=2, max_points=6, dim=2):
    return (
        arrays(float, st.tuples(st.integers(min_points, max_points), st.just(dim)), elements=coords)
        .filter(lambda a: np.all(np.linalg.norm(np.diff(a, axis=0), axis=-1) > 1e-3))
        .map(Polyline)
    )


def test_polyline_basics():
    p = Polyline([[0, 0], [1, 0], [1, 1]])
    assert p.length == length(p) == 2.0
    np.testing.assert_allclose(p(0.25), [0.5, 0.0])
    np.testing.assert_allclose(p(0.75), [1.0, 0.5])
    np.testing.assert_allclose(p.knot_fractions(), [0, 0.5, 1])
    assert p.dim == 2 and len(p) == 3
    with pytest.raises(ValueError):
        p.points[0, 0] = 5.0


def test_polyline_rejects_bad_input():
    with pytest.raises(ValueError):
        Polyline([[0, 0]])
    with pytest.raises(ValueError):
        Polyline([[0, 0], [0, 0], [1, 1]])
    with pytest.raises(ValueError):
        segment([1, 2], [1, 2])


def test_max_norm_length():
    assert Polyline([[0, 0], [1, 2]], MAX_NORM).length == 2.0


@given(polylines(), st.floats(0.01, 0.49), st.floats(0.51, 0.99))
@settings(max_examples=60, deadline=None)
def test_restrict_lengths_are_additive(p, c, d):
    parts = [restrict(p, 0.0, c), restrict(p, c, d), restrict(p, d, 1.0)]
    assert sum(q.length for q in parts) == pytest.approx(p.length, rel=1e-12)
    assert restrict(p, c, d).length == pytest.approx((d - c) * p.length, rel=1e-9)
    np.testing.assert_allclose(parts[1].points[0], p(c), atol=1e-12)


def test_restrict_validates():
    p = segment([0, 0], [1, 0])
    with pytest.raises(ValueError):
        restrict(p, 0.5, 0.5)
    assert restrict(p, 0.0, 1.0) is p


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition([0, 0.5, 0.9], [0.1, 0.6])
    with pytest.raises(ValueError):
        Partition([0, 0.5, 1], [0.6, 0.7])
    part = uniform_partition(4, "right")
    np.testing.assert_allclose(part.tags, [0.25, 0.5, 0.75, 1.0])


def test_riemann_sums_bracket_the_integral():
    p = segment([0, 0], [1, 0])

    def f(x):
        return x[..., 0]

    assert riemann_sum(f, p, uniform_partition(2, "left")) == pytest.approx(0.25)
    assert riemann_sum(f, p, uniform_partition(2, "right")) == pytest.approx(0.75)
    assert riemann_sum(f, p, uniform_partition(7, "mid")) == pytest.approx(0.5)


@given(polylines(dim=3))
@settings(max_examples=40, deadline=None)
def test_integrate_constant_field_gives_length(p):
    assert integrate(lambda x: np.full(x.shape[:-1], 2.0), p) == pytest.approx(2 * p.length, rel=1e-12)


def test_integrate_matches_segment_quadrature():
    w = lambda x: 1.0 / (1.0 - np.sum(x * x, axis=-1))  # noqa: E731
    x, y = np.array([0.1, -0.2]), np.array([0.6, 0.3])
    a = integrate(w, segment(x, y), tol=1e-10)
    b = integrate_segment(w, x, y, tol=1e-10)
    assert a == pytest.approx(b, abs=1e-8)
    assert integrate_segment(w, [0, 0], [0.5, 0]) == pytest.approx(np.arctanh(0.5), abs=1e-10)
    assert integrate_segment(w, x, x) == 0.0


def test_integrate_reports_nonconvergence():
    def rough(x):
        return np.abs(np.sin(1e7 * x[..., 0]))

    with pytest.raises(NonConvergenceError):
        integrate(rough, segment([0, 0], [1, 0]), tol=1e-14)


def test_integrate_rejects_bad_tol():
    with pytest.raises(ValueError):
        integrate(lambda x: x[..., 0], segment([0], [1]), tol=0)


def test_csv_round_trip(tmp_path):
    p = Polyline([[0.1, 0.2, 0.3], [1 / 3, 2 / 3, 1.0], [2.0, -1.0, 0.0]], MAX_NORM)
    path = tmp_path / "p.csv"
    write_polyline_csv(p, path)
    assert path.read_text().startswith("# dim=3 norm=max_norm")
    q = read_polyline_csv(path)
    np.testing.assert_array_equal(q.points, p.points)
    assert q.norm == p.norm
