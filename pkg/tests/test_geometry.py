import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latentprogress import DomainError, MetricSpace, euclidean, poincare_disk


def test_euclidean_matches_norm(rng):
    for q in (1, 2, 3, 4):
        space = euclidean(q)
        x = rng.normal(size=(50, q))
        y = rng.normal(size=(50, q))
        got = space.distance(x, y)
        want = np.linalg.norm(x - y, axis=1)
        assert np.allclose(got, want, atol=1e-14)


def test_distance_broadcasting(rng):
    space = euclidean(3)
    x = rng.normal(size=(6, 1, 3))
    y = rng.normal(size=(1, 4, 3))
    d = space.distance(x, y)
    assert d.shape == (6, 4)
    assert np.isclose(d[2, 1], np.linalg.norm(x[2, 0] - y[0, 1]))


def test_poincare_radial_closed_form(rng):
    # distance from the origin to a point at radius r is log((rho+r)/(rho-r))
    for rho in (1.0, 1.5, 2.0):
        space = poincare_disk(rho)
        for _ in range(200):
            r = rng.uniform(0.01, 0.95) * rho
            ang = rng.uniform(0, 2 * np.pi)
            x = np.array([r * np.cos(ang), r * np.sin(ang)])
            want = np.log((rho + r) / (rho - r))
            assert abs(float(space.distance(np.zeros(2), x)) - want) < 1e-10


def test_poincare_symmetry_identity(rng):
    space = poincare_disk(1.0)
    x = 0.7 * rng.uniform(-0.7, 0.7, size=(30, 2))
    y = 0.7 * rng.uniform(-0.7, 0.7, size=(30, 2))
    assert np.allclose(space.distance(x, y), space.distance(y, x), atol=1e-13)
    assert np.allclose(space.distance(x, x), 0.0, atol=1e-7)


def test_poincare_rotation_invariance(rng):
    space = poincare_disk(1.3)
    theta = rng.uniform(0, 2 * np.pi)
    R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    x = rng.uniform(-0.6, 0.6, size=(40, 2))
    y = rng.uniform(-0.6, 0.6, size=(40, 2))
    assert np.allclose(space.distance(x @ R.T, y @ R.T), space.distance(x, y),
                       atol=1e-12)


def test_poincare_local_metric_scale(rng):
    # infinitesimally, lengths scale by 2*rho / (rho^2 - |x|^2)
    for rho in (1.0, 2.0):
        space = poincare_disk(rho)
        for _ in range(20):
            x = rng.uniform(-0.5, 0.5, size=2) * rho * 0.8
            u = rng.normal(size=2)
            u /= np.linalg.norm(u)
            # Richardson step kills the O(h) term; h small enough for that,
            # large enough that arcosh near 1 keeps its digits
            h = 1e-4
            d1 = float(space.distance(x, x + h * u)) / h
            d2 = float(space.distance(x, x + (h / 2) * u)) / (h / 2)
            est = 2 * d2 - d1
            scale = 2.0 * rho / (rho**2 - float(x @ x))
            assert abs(est - scale) / scale < 1e-4


def test_triangle_inequality_sampled(rng):
    for space in (euclidean(2), poincare_disk(1.0)):
        lim = 0.7 if space.kind == "poincare" else 3.0
        pts = rng.uniform(-lim, lim, size=(25, 3, 2))
        for x, y, z in pts:
            dxy = float(space.distance(x, y))
            dyz = float(space.distance(y, z))
            dxz = float(space.distance(x, z))
            assert dxz <= dxy + dyz + 1e-9


def test_admissibility():
    space = poincare_disk(1.0)
    assert space.admissible(np.array([0.3, 0.4]))
    assert not space.admissible(np.array([1.0, 0.0]))  # boundary excluded
    assert not space.admissible(np.array([2.0, 0.0]))
    with pytest.raises(DomainError):
        space.check_admissible(np.array([1.5, 0.0]))
    assert euclidean(2).admissible(np.array([1e8, -1e8]))
    assert not euclidean(2).admissible(np.array([np.inf, 0.0]))


def test_space_validation():
    with pytest.raises(DomainError):
        MetricSpace(kind="poincare", q=3, rho=1.0)
    with pytest.raises(DomainError):
        poincare_disk(0.0)
    with pytest.raises(DomainError):
        poincare_disk(-1.0)
    with pytest.raises(DomainError):
        euclidean(0)
    with pytest.raises(DomainError):
        MetricSpace(kind="spherical", q=2)


@settings(deadline=None, max_examples=50)
@given(
    shift=st.lists(st.floats(-50, 50), min_size=2, max_size=2),
    x=st.lists(st.floats(-50, 50), min_size=2, max_size=2),
    y=st.lists(st.floats(-50, 50), min_size=2, max_size=2),
)
def test_euclidean_translation_invariance(shift, x, y):
    space = euclidean(2)
    x, y, s = np.array(x), np.array(y), np.array(shift)
    assert np.isclose(
        float(space.distance(x + s, y + s)), float(space.distance(x, y)),
        rtol=1e-9, atol=1e-9,
    )
