import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from latentprogress import (
    ResponseTensor,
    UndefinedRateError,
    andersen_progress,
    fit_andersen,
)
from latentprogress.engine import ChainConfig
from conftest import random_tensor


def andersen_cfg(**kw):
    base = dict(iterations=120, burnin=40, thin=1, seed=7)
    base.update(kw)
    return ChainConfig(**base)


def test_progress_identities():
    r = andersen_progress(-2.0, -1.0)
    assert r.in_regime
    assert r.value == pytest.approx(0.5, abs=1e-15)
    assert r.ratio == pytest.approx(0.5, abs=1e-15)
    full = andersen_progress(-3.0, 0.0)
    assert full.value == pytest.approx(1.0, abs=1e-15)
    none = andersen_progress(-3.0, -3.0)
    assert none.value == pytest.approx(0.0, abs=1e-15)


def test_progress_undefined_at_zero():
    with pytest.raises(UndefinedRateError):
        andersen_progress(0.0, -1.0)


def test_progress_out_of_regime():
    # regression past the start or a positive start falls outside the regime
    for a1, a2 in [(-2.0, -2.5), (-2.0, 0.5), (1.0, 0.5), (2.0, 1.0)]:
        r = andersen_progress(a1, a2)
        assert not r.in_regime
        assert r.value is None
        assert r.ratio == pytest.approx(a2 / a1)


@settings(deadline=None, max_examples=80)
@given(
    a1=st.floats(-50.0, -1e-3),
    frac=st.floats(0.0, 1.0),
    c=st.floats(1e-3, 100.0),
)
def test_progress_scale_invariance(a1, frac, c):
    a2 = a1 * (1.0 - frac)  # between a1 and 0
    r1 = andersen_progress(a1, a2)
    r2 = andersen_progress(c * a1, c * a2)
    assert r1.in_regime and r2.in_regime
    assert abs(r1.value - r2.value) < 1e-9


def test_fit_shapes_and_determinism(rng):
    data = random_tensor(rng, n=5, p=4, T=3)
    s1 = fit_andersen(data, andersen_cfg())
    s2 = fit_andersen(data, andersen_cfg())
    assert s1.alpha.shape == (80, 5, 3)
    assert s1.beta.shape == (80, 4)
    assert s1.model == "andersen"
    assert np.array_equal(s1.alpha, s2.alpha)
    assert np.array_equal(s1.log_post, s2.log_post)
    s3 = fit_andersen(data, andersen_cfg(seed=8))
    assert not np.array_equal(s1.alpha, s3.alpha)


def test_symmetric_data_centered(rng):
    # checkerboard responses: every row and column is half ones, so no
    # individual or item separates and everything should hover near zero
    n, p, T = 12, 6, 2
    i_, j_, t_ = np.meshgrid(np.arange(n), np.arange(p), np.arange(T),
                             indexing="ij")
    values = ((i_ + j_ + t_) % 2).astype(float)
    data = ResponseTensor(values=values, observed=np.ones((n, p, T), bool))
    s = fit_andersen(data, andersen_cfg(iterations=600, burnin=200))
    assert abs(s.beta.mean()) < 0.3
    assert abs(s.alpha.mean()) < 0.3


def test_loglik_rows_match_recompute(rng):
    data = random_tensor(rng, n=4, p=3, T=2)
    s = fit_andersen(data, andersen_cfg(iterations=60, burnin=20))
    from scipy.special import expit

    k = s.n_retained - 1
    cells = []
    for i, j, t in s.obs_index:
        eta = s.alpha[k, i, t] + s.beta[k, j]
        y = data.values[i, j, t]
        cells.append(y * eta - np.logaddexp(0.0, eta))
    assert np.allclose(s.loglik[k], cells, atol=1e-10)


@pytest.mark.slow
def test_prior_recovery_no_data():
    n, p, T = 3, 2, 2
    data = ResponseTensor(values=np.zeros((n, p, T)),
                          observed=np.zeros((n, p, T), bool))
    cfg = andersen_cfg(iterations=1000 + 4000 * 2, burnin=1000, thin=2,
                       seed=31)
    s = fit_andersen(data, cfg)
    assert s.n_retained == 4000
    # sigma_alpha2 ~ IG(1,1)
    ks = stats.kstest(s.sigma_alpha2, stats.invgamma(1.0, scale=1.0).cdf)
    assert ks.pvalue > 1e-3
    # beta pooled ~ N(0,5)
    ks = stats.kstest(s.beta.ravel(), stats.norm(0, 5).cdf)
    assert ks.pvalue > 1e-3
    # alpha / sigma ~ N(0,1) given sigma, hence pooled standardized normal
    z = s.alpha / np.sqrt(s.sigma_alpha2)[:, None, None]
    ks = stats.kstest(z.ravel(), stats.norm(0, 1).cdf)
    assert ks.pvalue > 1e-3
