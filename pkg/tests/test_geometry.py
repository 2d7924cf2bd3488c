import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from blochlip.geometry import (
    EUCLIDEAN,
    MAX_NORM,
    Ball,
    Box,
    NormSpec,
    UnitBall,
    as_vector,
    boundary_distance,
    bounding_box,
    contains,
    domain_norm,
    inradius,
    norm,
    p_norm,
    project,
)

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
vec2 = arrays(float, 2, elements=finite)
vec3 = arrays(float, 3, elements=finite)

DOMAINS = [
    UnitBall(),
    UnitBall(MAX_NORM),
    UnitBall(p_norm(1)),
    UnitBall(p_norm(3)),
    Ball((0.5, -0.5, 0.0), 2.0),
    Box((-1, 0, 2), (1, 3, 2.5)),
]


@pytest.mark.parametrize("text", ["euclidean", "max_norm", "p_norm(1.5)", "p_norm(4)"])
def test_normspec_round_trip(text):
    assert str(NormSpec.parse(text)) == text


def test_normspec_rejects_bad_input():
    with pytest.raises(ValueError):
        NormSpec("taxicab")
    with pytest.raises(ValueError):
        p_norm(0.5)
    with pytest.raises(ValueError):
        NormSpec.parse("p_norm(x")


def test_as_vector_checks():
    assert as_vector(3.0).shape == (1,)
    with pytest.raises(ValueError):
        as_vector([1.0, np.nan])
    with pytest.raises(ValueError):
        as_vector([1.0, 2.0], dim=3)


def test_norm_values():
    v = np.array([3.0, -4.0])
    assert norm(v) == 5.0
    assert norm(v, MAX_NORM) == 4.0
    assert norm(v, p_norm(1)) == 7.0
    np.testing.assert_allclose(norm(np.stack([v, 2 * v])), [5.0, 10.0])


def test_contains_is_strict_and_respects_margin():
    d = UnitBall()
    assert contains(d, [0.5, 0.0])
    assert not contains(d, [1.0, 0.0])
    assert not contains(d, [0.95, 0.0], margin=0.1)
    assert contains(None, [1e9, -1e9])
    with pytest.raises(ValueError):
        contains(d, [0.0, 0.0], margin=1.0)
    np.testing.assert_array_equal(contains(d, [[0.1, 0.1], [2.0, 0.0]]), [True, False])


def test_inradius_and_bounding_box():
    assert inradius(Box((0, 0), (2, 1))) == 0.5
    assert inradius(Ball((1, 1), 3.0)) == 3.0
    lo, hi = bounding_box(Ball((1, 2), 0.5), 2)
    np.testing.assert_allclose(lo, [0.5, 1.5])
    np.testing.assert_allclose(hi, [1.5, 2.5])
    assert domain_norm(UnitBall(MAX_NORM)) == MAX_NORM
    assert domain_norm(Box((0,), (1,))) == EUCLIDEAN


@pytest.mark.parametrize("dom", DOMAINS, ids=str)
@given(x=vec3)
@settings(max_examples=60, deadline=None)
def test_projection_lands_in_closed_domain_and_is_idempotent(dom, x):
    p = project(dom, x, 0.1)
    # closed shrunk domain: inside the open domain, on or inside the shrunk one
    assert contains(dom, p)
    assert contains(dom, p, 0.1 - 1e-9) or np.allclose(project(dom, p, 0.1), p, atol=1e-9)
    np.testing.assert_allclose(project(dom, p, 0.1), p, atol=1e-9)


@pytest.mark.parametrize("dom", DOMAINS, ids=str)
@given(x=vec3, seed=st.integers(0, 2**16))
@settings(max_examples=30, deadline=None)
def test_projection_is_nearest_point(dom, x, seed):
    """No sampled point of the closed domain is closer to x than its projection."""
    p = project(dom, x)
    rng = np.random.default_rng(seed)
    z = project(dom, p + rng.normal(scale=0.3, size=(200, 3)))
    gap = np.linalg.norm(z - x, axis=-1) - np.linalg.norm(p - x)
    assert gap.min() >= -1e-7


@given(x=vec2)
@settings(max_examples=100, deadline=None)
def test_boundary_distance_is_a_lower_bound(x):
    for dom in (UnitBall(), UnitBall(p_norm(1)), UnitBall(MAX_NORM), Box((-1, -2), (1, 2))):
        d = boundary_distance(dom, x)
        if d > 1e-9:
            # stepping slightly less than d in any direction stays inside
            for ang in np.linspace(0, 2 * np.pi, 16, endpoint=False):
                step = 0.999 * d * np.array([np.cos(ang), np.sin(ang)])
                assert contains(dom, x + step)


def test_boundary_distance_exact_cases():
    assert boundary_distance(UnitBall(), [0.6, 0.0]) == pytest.approx(0.4)
    assert boundary_distance(Box((0, 0), (1, 1)), [0.2, 0.7]) == pytest.approx(0.2)
    assert boundary_distance(UnitBall(), [2.0, 0.0]) < 0
    assert boundary_distance(None, [5.0]) == np.inf
