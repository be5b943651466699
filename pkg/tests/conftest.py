import numpy as np
import pytest

from latentprogress import (
    ChainConfig,
    LatentState,
    ModelParams,
    ResponseTensor,
    euclidean,
)
from latentprogress.geometry import POINCARE


def random_tensor(rng, n=5, p=4, T=2, prob=0.5, hole_prob=0.0) -> ResponseTensor:
    values = (rng.uniform(size=(n, p, T)) < prob).astype(float)
    observed = rng.uniform(size=(n, p, T)) >= hole_prob
    # keep at least one observed item per (i, t) so the panel stays loadable
    for i in range(n):
        for t in range(T):
            if not observed[i, :, t].any():
                observed[i, rng.integers(p), t] = True
    return ResponseTensor(values=values, observed=observed)


def random_state(rng, space, n=5, p=4, T=2, gamma=1.0):
    q = space.q
    if space.kind == POINCARE:
        def pts(m):
            rad = 0.8 * space.rho * np.sqrt(rng.uniform(size=m))
            ang = rng.uniform(0, 2 * np.pi, size=m)
            return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        a1, B = pts(n), pts(p)
    else:
        a1 = rng.normal(0, 1, (n, q))
        B = rng.normal(0, 1, (p, q))
    params = ModelParams(
        alpha=rng.normal(0, 1, n),
        beta=rng.normal(0, 1, p),
        gamma=gamma,
        sigma_alpha2=1.0,
    )
    state = LatentState(
        a1=a1,
        B=B,
        lam=rng.uniform(0.05, 0.95, (n, T - 1)),
        r=rng.integers(0, 2, (n, T - 1)).astype(np.int8),
        pi=rng.uniform(0.2, 0.8, (n, T - 1)),
    )
    return params, state


@pytest.fixture
def rng():
    return np.random.default_rng(20260818)


def tiny_chain_config(**kw) -> ChainConfig:
    base = dict(iterations=120, burnin=40, thin=1, seed=3, space=euclidean(2))
    base.update(kw)
    return ChainConfig(**base)
