"""Longitudinal Rasch baseline: logit P(Y_{ijt}=1) = alpha_{i,t} + beta_j.

Abilities vary freely over occasions with an iid normal prior, so the fit is
a plain Polya-Gamma Gibbs sampler (no Metropolis steps). The reparameterized
progress rate 1 - alpha_{i,2}/alpha_{i,1} is only meaningful on part of the
ability space; out-of-regime pairs are reported as such, never coerced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .engine import ChainConfig, norm_logpdf
from .errors import DomainError, NonFiniteLikelihoodError, UndefinedRateError
from .model import Hyperparams, ResponseTensor, bernoulli_loglik
from .pg import sample_pg1


@dataclass(frozen=True)
class AndersenParams:
    alpha: np.ndarray  # (n, T)
    beta: np.ndarray  # (p,)
    sigma_alpha2: float

    def __post_init__(self):
        if not self.sigma_alpha2 > 0:
            raise DomainError("sigma_alpha2 must be positive")


@dataclass
class AndersenSamples:
    model: str
    seed: int
    alpha: np.ndarray  # (S, n, T)
    beta: np.ndarray  # (S, p)
    sigma_alpha2: np.ndarray  # (S,)
    loglik: np.ndarray  # (S, N_obs)
    obs_index: np.ndarray
    log_post: np.ndarray
    acceptance: dict
    n: int
    p: int
    T: int
    config: dict = field(default_factory=dict)

    @property
    def n_retained(self) -> int:
        return self.alpha.shape[0]


def fit_andersen(data: ResponseTensor, cfg: ChainConfig) -> AndersenSamples:
    """Gibbs sampler for the baseline model. Only the iteration controls,
    seed and hyperparameters of cfg are used; the geometry and proposal
    scales have no role here."""
    cfg.validate()
    hy: Hyperparams = cfg.hyper
    rng = np.random.default_rng(cfg.seed)
    n, p, T = data.n, data.p, data.T
    M = np.asarray(data.observed, dtype=bool)
    Mf = M.astype(float)
    Y = np.where(M, np.asarray(data.values, dtype=float), 0.0)
    K = (Y - 0.5) * Mf
    obs_index = np.argwhere(M)
    n_obs = obs_index.shape[0]

    alpha = np.zeros((n, T))
    beta = np.zeros(p)
    s2a = 1.0

    S = (cfg.iterations - cfg.burnin) // cfg.thin
    out = AndersenSamples(
        model="andersen",
        seed=cfg.seed,
        alpha=np.empty((S, n, T)),
        beta=np.empty((S, p)),
        sigma_alpha2=np.empty(S),
        loglik=np.empty((S, n_obs)),
        obs_index=obs_index,
        log_post=np.empty(S),
        acceptance={},
        n=n,
        p=p,
        T=T,
        config={
            "iterations": cfg.iterations,
            "burnin": cfg.burnin,
            "thin": cfg.thin,
            "seed": cfg.seed,
        },
    )

    def eta():
        return alpha[:, None, :] + beta[None, :, None]

    s = 0
    for sweep in range(1, cfg.iterations + 1):
        e = eta()
        omega = np.zeros_like(e)
        if n_obs:
            omega[M] = sample_pg1(e[M], rng)

        # item easiness, conjugate over all (i, t) cells
        om_j = omega.sum(axis=(0, 2))
        v = 1.0 / (1.0 / hy.sigma_beta**2 + om_j)
        m = v * (K.sum(axis=(0, 2)) - (omega * alpha[:, None, :]).sum(axis=(0, 2)))
        beta = m + np.sqrt(v) * rng.standard_normal(p)

        # per-occasion abilities, conjugate over items
        om_it = omega.sum(axis=1)
        v = 1.0 / (1.0 / s2a + om_it)
        m = v * (K.sum(axis=1) - (omega * beta[None, :, None]).sum(axis=1))
        alpha = m + np.sqrt(v) * rng.standard_normal((n, T))

        shape = hy.a_sigma_alpha + 0.5 * n * T
        rate = hy.b_sigma_alpha + 0.5 * float(np.sum(alpha**2))
        s2a = rate / rng.gamma(shape)

        if not (
            np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta)) and np.isfinite(s2a)
        ):
            raise NonFiniteLikelihoodError("non-finite chain state in baseline sampler")

        if sweep > cfg.burnin and (sweep - cfg.burnin) % cfg.thin == 0:
            out.alpha[s] = alpha
            out.beta[s] = beta
            out.sigma_alpha2[s] = s2a
            cells = bernoulli_loglik(Y, eta()) * Mf
            out.loglik[s] = cells[M]
            lp = float(cells.sum())
            lp += float(np.sum(norm_logpdf(alpha, 0.0, np.sqrt(s2a))))
            lp += float(np.sum(norm_logpdf(beta, 0.0, hy.sigma_beta)))
            a, b = hy.a_sigma_alpha, hy.b_sigma_alpha
            lp += float(
                a * np.log(b) - gammaln(a) - (a + 1.0) * np.log(s2a) - b / s2a
            )
            out.log_post[s] = lp
            s += 1
    return out


@dataclass(frozen=True)
class AndersenRate:
    """Progress rate implied by a pair of abilities. value is the rate when
    the pair lies in the regime mapping to [0, 1]; otherwise in_regime is
    False and only the raw ratio is meaningful."""

    value: float | None
    ratio: float
    in_regime: bool


def andersen_progress(alpha_i1: float, alpha_i2: float) -> AndersenRate:
    """1 - alpha_{i,2}/alpha_{i,1}, defined as a rate of progress only when
    alpha_{i,1} < 0 and alpha_{i,1} <= alpha_{i,2} <= 0."""
    a1 = float(alpha_i1)
    a2 = float(alpha_i2)
    if a1 == 0.0:
        raise UndefinedRateError(
            "progress rate undefined at alpha_{i,1} = 0 (zero starting distance)"
        )
    ratio = a2 / a1
    if a1 < 0.0 and a1 <= a2 <= 0.0:
        return AndersenRate(value=1.0 - ratio, ratio=ratio, in_regime=True)
    return AndersenRate(value=None, ratio=ratio, in_regime=False)
