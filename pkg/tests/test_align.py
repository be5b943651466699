import numpy as np
import pytest

from latentprogress import (
    Configuration,
    DegenerateConfigurationError,
    DomainError,
    LatentState,
    ModelParams,
    enforce_scale,
    eta_tensor,
    euclidean,
    poincare_disk,
    procrustes_align,
    procrustes_points,
    rotation_align_points,
    scale_factor,
)
from conftest import random_state


def random_rotation(rng, q):
    M = rng.normal(size=(q, q))
    Q, R = np.linalg.qr(M)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def test_scale_factor_basics():
    B = np.array([[3.0, 0.0], [0.0, 4.0]])
    assert np.isclose(scale_factor(B), np.sqrt((9 + 16) / 2), atol=1e-14)
    assert scale_factor(np.ones((5, 1))) == pytest.approx(1.0, abs=1e-14)


def test_enforce_scale_normalizes_and_preserves_eta(rng):
    space = euclidean(2)
    for _ in range(20):
        params, state = random_state(rng, space, n=4, p=3, T=3)
        state = LatentState(a1=state.a1 * 3.7, B=state.B * 3.7, lam=state.lam,
                            r=state.r, pi=state.pi)
        eta_before = eta_tensor(params, state, space)
        new_state, new_params = enforce_scale(state, params, space)
        assert np.isclose(scale_factor(new_state.B), 1.0, atol=1e-12)
        eta_after = eta_tensor(new_params, new_state, space)
        assert np.max(np.abs(eta_after - eta_before)) < 1e-10


def test_enforce_scale_degenerate():
    space = euclidean(2)
    params = ModelParams(alpha=np.zeros(2), beta=np.zeros(2), gamma=1.0,
                         sigma_alpha2=1.0)
    state = LatentState(
        a1=np.ones((2, 2)), B=np.zeros((2, 2)),
        lam=np.full((2, 1), 0.5), r=np.zeros((2, 1), dtype=np.int8),
        pi=np.full((2, 1), 0.5),
    )
    with pytest.raises(DegenerateConfigurationError):
        enforce_scale(state, params, space)


def test_enforce_scale_poincare_noop(rng):
    space = poincare_disk(1.5)
    params, state = random_state(rng, space, n=3, p=3, T=2)
    new_state, new_params = enforce_scale(state, params, space)
    assert new_state is state and new_params is params


def test_procrustes_recovers_rigid_motion(rng):
    for q in (1, 2, 3):
        X0 = rng.normal(size=(12, q))
        R = random_rotation(rng, q)
        if q >= 2:
            # throw in a reflection; the alignment allows improper rotations
            F = np.eye(q)
            F[0, 0] = -1.0
            R = R @ F
        shift = rng.normal(size=q) * 3
        Y = X0 @ R.T + shift
        aligned = procrustes_points(Y, X0)[0]
        assert np.max(np.abs(aligned - X0)) < 1e-10


def test_rotation_align_origin_fixed(rng):
    X0 = rng.normal(size=(8, 2)) * 0.4
    R = random_rotation(rng, 2)
    Y = X0 @ R.T
    aligned = rotation_align_points(Y, X0)[0]
    assert np.max(np.abs(aligned - X0)) < 1e-10
    # a translated copy cannot be recovered by rotation alone
    Yt = X0 + np.array([5.0, 0.0])
    aligned_t = rotation_align_points(Yt, X0)[0]
    assert np.max(np.abs(aligned_t - X0)) > 1.0


def test_procrustes_align_label_check(rng):
    pts = rng.normal(size=(3, 2))
    a = Configuration(("x", "y", "z"), pts)
    b = Configuration(("x", "y", "w"), pts)
    with pytest.raises(DomainError):
        procrustes_align(a, b)
    out = procrustes_align(a, Configuration(("x", "y", "z"), pts + 2.0))
    assert out.labels == ("x", "y", "z")
    assert np.max(np.abs(out.points - (pts + 2.0))) < 1e-10


def test_configuration_validation(rng):
    with pytest.raises(DomainError):
        Configuration(("a", "a"), rng.normal(size=(2, 2)))
    with pytest.raises(DomainError):
        Configuration(("a",), rng.normal(size=(2, 2)))
    with pytest.raises(DomainError):
        Configuration(("a", "b"), rng.normal(size=4))
