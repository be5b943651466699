"""Posterior sampler for the latent process model.

One sweep cycles, in fixed order: Polya-Gamma auxiliaries, conjugate draws for
beta, alpha, sigma_alpha^2 and gamma, random-walk Metropolis for the rates of
progress (on the logit scale), the initial positions and the item positions,
then the mixture indicators and mixing proportions, and finally the scale
constraint. The auxiliaries are drawn fresh at the top of each sweep and used
only by the conjugate blocks within that sweep; the Metropolis blocks target
the exact Bernoulli likelihood, so the composed kernel leaves the posterior of
the model parameters invariant.

Chains are single-threaded and a pure function of (data, config): one PCG64
generator per chain, consumed in sweep order.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import betaln, expit, gammaln, logit, ndtr, ndtri

from .align import enforce_scale, scale_factor
from .errors import DomainError, NonFiniteLikelihoodError, SamplerOverflowError
from .geometry import EUCLIDEAN, POINCARE, MetricSpace, euclidean
from .model import (
    Hyperparams,
    LatentState,
    ModelParams,
    ResponseTensor,
    bernoulli_loglik,
    cell_distances,
    propagate_positions,
    target,
)
from .pg import sample_pg1

ALL_BLOCKS = frozenset(
    {"omega", "beta", "alpha", "sigma_alpha2", "gamma", "lambda", "a1", "b", "pi_r"}
)


def config_echo(cfg) -> dict:
    """Flat JSON-ready picture of a chain configuration, enough to rerun it."""
    return {
        "iterations": cfg.iterations,
        "burnin": cfg.burnin,
        "thin": cfg.thin,
        "seed": cfg.seed,
        "space_kind": cfg.space.kind,
        "q": cfg.space.q,
        "rho": cfg.space.rho,
        "proposal_sd_a": cfg.proposal_sd_a,
        "proposal_sd_b": cfg.proposal_sd_b,
        "proposal_sd_lambda": cfg.proposal_sd_lambda,
        "adapt": cfg.adapt,
        "constrain_scale": cfg.constrain_scale,
        "update_blocks": sorted(cfg.update_blocks),
    }

# logit rates beyond this fold to 0/1 in double precision; proposals outside
# are rejected, which truncates a tail of prior mass below 1e-70
_ELL_BOUND = 36.0

_ADAPT_BATCH = 50
_ADAPT_TARGET = 0.35


@dataclass
class ChainConfig:
    """Single-chain settings.

    constrain_scale pins sqrt(mean ||b_j||^2) = 1 at the end of every sweep
    (Euclidean space only), with gamma compensated so no linear predictor
    moves. The projection keeps long chains from drifting along the scale
    ridge, but it is a deterministic move the posterior is not invariant
    under: the likelihood is scale-free while the priors on gamma and the
    positions are not, so marginals of scale-carrying quantities are
    perturbed. Disable it to sample the exact posterior (calibration
    studies, sensitivity analysis) and rescale at reporting time instead.
    """

    iterations: int
    burnin: int
    thin: int = 1
    seed: int = 0
    space: MetricSpace = field(default_factory=lambda: euclidean(2))
    hyper: Hyperparams = field(default_factory=Hyperparams)
    proposal_sd_a: float = 1.4
    proposal_sd_b: float = 0.8
    proposal_sd_lambda: float = 5.0
    adapt: bool = False
    constrain_scale: bool = True
    update_blocks: frozenset = ALL_BLOCKS
    init_params: ModelParams | None = None
    init_state: LatentState | None = None

    def validate(self):
        if self.iterations < 1 or self.burnin < 0 or self.burnin >= self.iterations:
            raise DomainError("need 0 <= burnin < iterations")
        if self.thin < 1:
            raise DomainError("thin must be >= 1")
        for name in ("proposal_sd_a", "proposal_sd_b", "proposal_sd_lambda"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        unknown = set(self.update_blocks) - ALL_BLOCKS
        if unknown:
            raise DomainError(f"unknown update blocks: {sorted(unknown)}")


@dataclass
class PosteriorSamples:
    """Thinned chain output. Arrays are sample-major; loglik holds one column
    per observed cell, ordered like obs_index rows (i, j, t indices)."""

    model: str
    space: MetricSpace
    seed: int
    alpha: np.ndarray  # (S, n)
    beta: np.ndarray  # (S, p)
    gamma: np.ndarray  # (S,)
    sigma_alpha2: np.ndarray  # (S,)
    a1: np.ndarray  # (S, n, q)
    B: np.ndarray  # (S, p, q)
    lam: np.ndarray  # (S, n, T-1)
    r: np.ndarray  # (S, n, T-1)
    pi: np.ndarray  # (S, n, T-1)
    loglik: np.ndarray  # (S, N_obs)
    obs_index: np.ndarray  # (N_obs, 3)
    log_post: np.ndarray  # (S,)
    acceptance: dict
    n: int
    p: int
    T: int
    config: dict = field(default_factory=dict)

    @property
    def n_retained(self) -> int:
        return self.alpha.shape[0]

    @property
    def q(self) -> int:
        return self.a1.shape[2]


def norm_logpdf(x, mu, sd):
    z = (x - mu) / sd
    return -0.5 * z * z - np.log(sd) - 0.5 * np.log(2.0 * np.pi)


def mh_accept(delta_log, rng):
    """Vectorized Metropolis acceptance for log ratio(s) delta_log."""
    delta_log = np.asarray(delta_log, dtype=float)
    u = rng.uniform(size=delta_log.shape)
    with np.errstate(divide="ignore"):
        return np.log(u) < delta_log


def truncated_normal_nonneg(mean, sd, rng):
    """One draw from N(mean, sd^2) conditioned on [0, inf)."""
    lo = (0.0 - mean) / sd
    if lo < 5.0:
        u = rng.uniform(ndtr(lo), 1.0)
        return mean + sd * ndtri(min(u, 1.0 - 1e-16))
    # deep tail: exponential rejection on the standardized scale
    lam = 0.5 * (lo + np.sqrt(lo * lo + 4.0))
    for _ in range(10_000):
        x = lo + rng.exponential(1.0 / lam)
        if np.log(rng.uniform()) <= -0.5 * (x - lam) ** 2:
            return mean + sd * x
    raise SamplerOverflowError("truncated-normal sampler exceeded its iteration cap")


def _default_init(data: ResponseTensor, cfg: ChainConfig, rng):
    n, p, T = data.n, data.p, data.T
    space = cfg.space
    q = space.q
    if space.kind == POINCARE:
        # uniform on the disk, kept off the rim by a 0.9 rho margin
        def disk(m):
            radius = 0.9 * space.rho * np.sqrt(rng.uniform(size=m))
            angle = rng.uniform(0.0, 2.0 * np.pi, size=m)
            return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])

        a1 = disk(n)
        B = disk(p)
    else:
        a1 = rng.normal(0.0, 0.1, size=(n, q))
        B = rng.normal(0.0, 0.1, size=(p, q))
    params = ModelParams(
        alpha=np.zeros(n), beta=np.zeros(p), gamma=1.0, sigma_alpha2=1.0
    )
    state = LatentState(
        a1=a1,
        B=B,
        lam=np.full((n, T - 1), 0.1),
        r=(rng.uniform(size=(n, T - 1)) < 0.5).astype(np.int8),
        pi=np.full((n, T - 1), 0.5),
    )
    return params, state


class _Chain:
    """Mutable sampler state plus the distance caches one sweep maintains."""

    def __init__(self, data: ResponseTensor, cfg: ChainConfig, rng):
        self.cfg = cfg
        self.space = cfg.space
        self.hyper = cfg.hyper
        self.rng = rng
        self.n, self.p, self.T = data.n, data.p, data.T
        self.q = cfg.space.q

        self.M = np.asarray(data.observed, dtype=bool)
        self.Mf = self.M.astype(float)
        # zero masked cells so masked sums need no where= (values there may be NaN)
        self.Y = np.where(self.M, np.asarray(data.values, dtype=float), 0.0)
        self.K = (self.Y - 0.5) * self.Mf
        self.obs_index = np.argwhere(self.M)
        self.n_obs = self.obs_index.shape[0]

        params, state = _default_init(data, cfg, rng)
        if cfg.init_params is not None:
            params = replace(cfg.init_params)
        if cfg.init_state is not None:
            state = replace(cfg.init_state)
        state.validate(cfg.space)
        self.alpha = np.array(params.alpha, dtype=float)
        self.beta = np.array(params.beta, dtype=float)
        self.gamma = float(params.gamma)
        self.s2a = float(params.sigma_alpha2)
        self.a1 = np.array(state.a1, dtype=float)
        self.B = np.array(state.B, dtype=float)
        self.ell = np.asarray(logit(state.lam), dtype=float)
        self.r = np.array(state.r, dtype=np.int8)
        self.pi = np.array(state.pi, dtype=float)
        if self.alpha.shape != (self.n,) or self.beta.shape != (self.p,):
            raise DomainError("initial parameter shapes do not match the data")
        if self.a1.shape != (self.n, self.q) or self.B.shape != (self.p, self.q):
            raise DomainError("initial position shapes do not match data and geometry")

        self.omega = np.zeros((self.n, self.p, self.T))
        self.sd_a = cfg.proposal_sd_a
        self.sd_b = cfg.proposal_sd_b
        self.sd_lambda = cfg.proposal_sd_lambda
        self.acc = {k: [0, 0] for k in ("lambda", "a1", "b")}
        self.batch_acc = {k: [0, 0] for k in ("lambda", "a1", "b")}
        self.adapt_step = 0
        self._refresh_geometry()

    # geometry caches -----------------------------------------------------

    @property
    def lam(self):
        return expit(self.ell)

    def _refresh_geometry(self):
        self.tpoint = target(self.B)
        self.D1 = self.space.distance(self.a1[:, None, :], self.B[None, :, :])
        self.pos = propagate_positions(self.a1, self.lam, self.tpoint)
        self.Dt = self.space.distance(self.pos[:, 1:, :], self.tpoint[None, None, :])

    def eta(self):
        d = cell_distances(self.D1, self.Dt)
        return (
            self.alpha[:, None, None]
            + self.beta[None, :, None]
            - self.gamma * d
        )

    def loglik_cells(self):
        cells = bernoulli_loglik(self.Y, self.eta()) * self.Mf
        return cells[self.M]

    def loglik_total(self):
        return float((bernoulli_loglik(self.Y, self.eta()) * self.Mf).sum())

    # conjugate blocks ----------------------------------------------------

    def update_omega(self):
        eta = self.eta()
        om = np.zeros_like(eta)
        if self.n_obs:
            om[self.M] = sample_pg1(eta[self.M], self.rng)
        self.omega = om

    def update_beta(self):
        hy = self.hyper
        d = cell_distances(self.D1, self.Dt)
        om_sum = self.omega.sum(axis=(0, 2))
        v = 1.0 / (1.0 / hy.sigma_beta**2 + om_sum)
        m = v * (
            self.K.sum(axis=(0, 2))
            - (self.omega * self.alpha[:, None, None]).sum(axis=(0, 2))
            + self.gamma * (self.omega * d).sum(axis=(0, 2))
        )
        self.beta = m + np.sqrt(v) * self.rng.standard_normal(self.p)

    def update_alpha(self):
        d = cell_distances(self.D1, self.Dt)
        om_sum = self.omega.sum(axis=(1, 2))
        v = 1.0 / (1.0 / self.s2a + om_sum)
        m = v * (
            self.K.sum(axis=(1, 2))
            - (self.omega * self.beta[None, :, None]).sum(axis=(1, 2))
            + self.gamma * (self.omega * d).sum(axis=(1, 2))
        )
        self.alpha = m + np.sqrt(v) * self.rng.standard_normal(self.n)

    def update_sigma_alpha2(self):
        hy = self.hyper
        shape = hy.a_sigma_alpha + 0.5 * self.n
        rate = hy.b_sigma_alpha + 0.5 * float(np.sum(self.alpha**2))
        self.s2a = rate / self.rng.gamma(shape)

    def update_gamma(self):
        hy = self.hyper
        d = cell_distances(self.D1, self.Dt)
        prec = 1.0 / hy.sigma_gamma**2 + float(np.sum(self.omega * d * d))
        v = 1.0 / prec
        resid = self.omega * (self.alpha[:, None, None] + self.beta[None, :, None]) - self.K
        m = v * float(np.sum(d * resid))
        self.gamma = truncated_normal_nonneg(m, np.sqrt(v), self.rng)

    # Metropolis blocks ---------------------------------------------------

    def _delta_loglik_tail(self, Dt_new, k):
        """Log-likelihood change over occasions >= k+2 (all items), per
        individual, when the target distances change from Dt to Dt_new."""
        ab = self.alpha[:, None, None] + self.beta[None, :, None]
        eta_old = ab - self.gamma * self.Dt[:, None, k:]
        eta_new = ab - self.gamma * Dt_new[:, None, k:]
        y = self.Y[:, :, k + 1 :]
        m = self.Mf[:, :, k + 1 :]
        d = (
            y * (eta_new - eta_old)
            - np.logaddexp(0.0, eta_new)
            + np.logaddexp(0.0, eta_old)
        ) * m
        return d.sum(axis=(1, 2))

    def update_lambda(self):
        hy = self.hyper
        n, Tm1 = self.ell.shape
        for k in range(Tm1):
            cur = self.ell[:, k]
            prop = cur + self.sd_lambda * self.rng.standard_normal(n)
            inside = np.abs(prop) <= _ELL_BOUND
            lam_prop = self.lam
            lam_prop[:, k] = expit(np.where(inside, prop, cur))
            pos_new = propagate_positions(self.a1, lam_prop, self.tpoint)
            Dt_new = self.space.distance(pos_new[:, 1:, :], self.tpoint[None, None, :])
            dll = self._delta_loglik_tail(Dt_new, k)
            mu_r = np.where(self.r[:, k] == 1, hy.mu1, hy.mu0)
            sd_r = np.where(self.r[:, k] == 1, hy.sigma1, hy.sigma0)
            dprior = norm_logpdf(prop, mu_r, sd_r) - norm_logpdf(cur, mu_r, sd_r)
            delta = np.where(inside, dll + dprior, -np.inf)
            acc = mh_accept(delta, self.rng)
            self.ell[acc, k] = prop[acc]
            self.Dt[acc, k:] = Dt_new[acc, k:]
            self.pos[acc, k + 1 :] = pos_new[acc, k + 1 :]
            self._count("lambda", int(acc.sum()), n)

    def update_a1(self):
        hy = self.hyper
        n, q = self.a1.shape
        prop = self.a1 + self.sd_a * self.rng.standard_normal((n, q))
        adm = np.asarray(self.space.admissible(prop))
        idx = np.flatnonzero(adm)
        acc_mask = np.zeros(n, dtype=bool)
        if idx.size:
            sub = prop[idx]
            D1_new = self.space.distance(sub[:, None, :], self.B[None, :, :])
            pos_new = propagate_positions(sub, self.lam[idx], self.tpoint)
            Dt_new = self.space.distance(pos_new[:, 1:, :], self.tpoint[None, None, :])
            ab1 = self.alpha[idx, None] + self.beta[None, :]
            eta1_old = ab1 - self.gamma * self.D1[idx]
            eta1_new = ab1 - self.gamma * D1_new
            y1 = self.Y[idx, :, 0]
            m1 = self.Mf[idx, :, 0]
            dll = (
                (
                    y1 * (eta1_new - eta1_old)
                    - np.logaddexp(0.0, eta1_new)
                    + np.logaddexp(0.0, eta1_old)
                )
                * m1
            ).sum(axis=1)
            ab = self.alpha[idx, None, None] + self.beta[None, :, None]
            eta_old = ab - self.gamma * self.Dt[idx][:, None, :]
            eta_new = ab - self.gamma * Dt_new[:, None, :]
            yt = self.Y[idx, :, 1:]
            mt = self.Mf[idx, :, 1:]
            dll += (
                (
                    yt * (eta_new - eta_old)
                    - np.logaddexp(0.0, eta_new)
                    + np.logaddexp(0.0, eta_old)
                )
                * mt
            ).sum(axis=(1, 2))
            if self.space.kind == EUCLIDEAN:
                dprior = (np.sum(self.a1[idx] ** 2, axis=1) - np.sum(sub**2, axis=1)) / (
                    2.0 * hy.sigma_a**2
                )
            else:
                dprior = 0.0  # uniform on the disk
            acc = mh_accept(dll + dprior, self.rng)
            took = idx[acc]
            self.a1[took] = sub[acc]
            self.D1[took] = D1_new[acc]
            self.Dt[took] = Dt_new[acc]
            self.pos[took] = pos_new[acc]
            acc_mask[took] = True
        self._count("a1", int(acc_mask.sum()), n)

    def update_b(self):
        hy = self.hyper
        p = self.p
        lam = self.lam
        for j in range(p):
            prop = self.B[j] + self.sd_b * self.rng.standard_normal(self.q)
            self._count("b", 0, 1)
            if not np.all(self.space.admissible(prop)):
                continue
            tp_new = self.tpoint + (prop - self.B[j]) / p
            d1j_new = self.space.distance(self.a1, prop[None, :])
            pos_new = propagate_positions(self.a1, lam, tp_new)
            Dt_new = self.space.distance(pos_new[:, 1:, :], tp_new[None, None, :])
            # first-occasion terms involve only item j
            e_old = self.alpha + self.beta[j] - self.gamma * self.D1[:, j]
            e_new = self.alpha + self.beta[j] - self.gamma * d1j_new
            y1 = self.Y[:, j, 0]
            m1 = self.Mf[:, j, 0]
            delta = float(
                (
                    (
                        y1 * (e_new - e_old)
                        - np.logaddexp(0.0, e_new)
                        + np.logaddexp(0.0, e_old)
                    )
                    * m1
                ).sum()
            )
            # later occasions all shift because the target moves
            delta += float(self._delta_loglik_tail(Dt_new, 0).sum())
            if self.space.kind == EUCLIDEAN:
                delta += (np.sum(self.B[j] ** 2) - np.sum(prop**2)) / (2.0 * hy.sigma_b**2)
            if mh_accept(delta, self.rng):
                self.B[j] = prop
                self.tpoint = tp_new
                self.D1[:, j] = d1j_new
                self.Dt = Dt_new
                self.pos = pos_new
                self._count("b", 1, 0)

    def update_pi_r(self):
        hy = self.hyper
        lf1 = norm_logpdf(self.ell, hy.mu1, hy.sigma1)
        lf0 = norm_logpdf(self.ell, hy.mu0, hy.sigma0)
        log_odds = np.log(self.pi) - np.log1p(-self.pi) + lf1 - lf0
        p1 = expit(log_odds)
        self.r = (self.rng.uniform(size=self.r.shape) < p1).astype(np.int8)
        self.pi = self.rng.beta(hy.a_pi + self.r, hy.b_pi + 1 - self.r)

    # sweep orchestration -------------------------------------------------

    def _count(self, block, accepted, proposed):
        self.acc[block][0] += accepted
        self.acc[block][1] += proposed
        self.batch_acc[block][0] += accepted
        self.batch_acc[block][1] += proposed

    def _adapt(self):
        self.adapt_step += 1
        step = min(1.0, 3.0 * self.adapt_step**-0.6)
        for block, attr in (("lambda", "sd_lambda"), ("a1", "sd_a"), ("b", "sd_b")):
            a, m = self.batch_acc[block]
            if m:
                rate = a / m
                setattr(
                    self,
                    attr,
                    float(getattr(self, attr) * np.exp(step * (rate - _ADAPT_TARGET))),
                )
            self.batch_acc[block] = [0, 0]

    def _check_finite(self, block, *arrays):
        for a in arrays:
            if not np.all(np.isfinite(a)):
                raise NonFiniteLikelihoodError(
                    f"non-finite chain state after update block '{block}'"
                )

    def sweep(self, sweep_index=0, adapting=False):
        blocks = self.cfg.update_blocks
        if "omega" in blocks:
            self.update_omega()
            self._check_finite("omega", self.omega)
        if "beta" in blocks:
            self.update_beta()
            self._check_finite("beta", self.beta)
        if "alpha" in blocks:
            self.update_alpha()
            self._check_finite("alpha", self.alpha)
        if "sigma_alpha2" in blocks:
            self.update_sigma_alpha2()
            self._check_finite("sigma_alpha2", self.s2a)
        if "gamma" in blocks:
            self.update_gamma()
            self._check_finite("gamma", self.gamma)
        if "lambda" in blocks:
            self.update_lambda()
            self._check_finite("lambda", self.ell)
        if "a1" in blocks:
            self.update_a1()
            self._check_finite("a1", self.a1, self.D1, self.Dt)
        if "b" in blocks:
            self.update_b()
            self._check_finite("b", self.B, self.D1, self.Dt)
        if "pi_r" in blocks:
            self.update_pi_r()
            self._check_finite("pi_r", self.pi)
        if self.cfg.constrain_scale and self.space.kind == EUCLIDEAN:
            self._enforce_scale_inplace()
        if adapting and sweep_index % _ADAPT_BATCH == 0:
            self._adapt()

    def _enforce_scale_inplace(self):
        c = scale_factor(self.B)
        state, params = self.snapshot_state(), self.snapshot_params()
        new_state, new_params = enforce_scale(state, params, self.space)
        self.a1 = new_state.a1
        self.B = new_state.B
        self.gamma = new_params.gamma
        # positions shrank by c, so every cached distance does too
        self.tpoint = self.tpoint / c
        self.D1 = self.D1 / c
        self.Dt = self.Dt / c
        self.pos = self.pos / c

    # snapshots -----------------------------------------------------------

    def snapshot_params(self) -> ModelParams:
        return ModelParams(
            alpha=self.alpha.copy(),
            beta=self.beta.copy(),
            gamma=self.gamma,
            sigma_alpha2=self.s2a,
        )

    def snapshot_state(self) -> LatentState:
        return LatentState(
            a1=self.a1.copy(),
            B=self.B.copy(),
            lam=self.lam,
            r=self.r.copy(),
            pi=self.pi.copy(),
        )

    def log_posterior(self):
        hy = self.hyper
        lp = self.loglik_total()
        lp += float(np.sum(norm_logpdf(self.alpha, 0.0, np.sqrt(self.s2a))))
        lp += float(np.sum(norm_logpdf(self.beta, 0.0, hy.sigma_beta)))
        lp += float(np.log(2.0) + norm_logpdf(self.gamma, 0.0, hy.sigma_gamma))
        a, b = hy.a_sigma_alpha, hy.b_sigma_alpha
        lp += float(a * np.log(b) - gammaln(a) - (a + 1.0) * np.log(self.s2a) - b / self.s2a)
        if self.space.kind == EUCLIDEAN:
            lp += float(np.sum(norm_logpdf(self.a1, 0.0, hy.sigma_a)))
            lp += float(np.sum(norm_logpdf(self.B, 0.0, hy.sigma_b)))
        else:
            area = np.pi * self.space.rho**2
            lp += -(self.n + self.p) * float(np.log(area))
        mu_r = np.where(self.r == 1, hy.mu1, hy.mu0)
        sd_r = np.where(self.r == 1, hy.sigma1, hy.sigma0)
        lp += float(np.sum(norm_logpdf(self.ell, mu_r, sd_r)))
        lp += float(np.sum(self.r * np.log(self.pi) + (1 - self.r) * np.log1p(-self.pi)))
        lp += float(
            np.sum(
                (hy.a_pi - 1.0) * np.log(self.pi)
                + (hy.b_pi - 1.0) * np.log1p(-self.pi)
            )
            - self.pi.size * betaln(hy.a_pi, hy.b_pi)
        )
        return lp


def run_chain(data: ResponseTensor, cfg: ChainConfig) -> PosteriorSamples:
    """Run one chain and return the thinned samples.

    Retains floor((iterations - burnin) / thin) states: every thin-th sweep
    after burn-in. Acceptance counters cover the whole run; proposal scales
    adapt only during burn-in when cfg.adapt is set.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    chain = _Chain(data, cfg, rng)
    n, p, T, q = chain.n, chain.p, chain.T, chain.q
    S = (cfg.iterations - cfg.burnin) // cfg.thin
    out = PosteriorSamples(
        model="latent-process",
        space=cfg.space,
        seed=cfg.seed,
        alpha=np.empty((S, n)),
        beta=np.empty((S, p)),
        gamma=np.empty(S),
        sigma_alpha2=np.empty(S),
        a1=np.empty((S, n, q)),
        B=np.empty((S, p, q)),
        lam=np.empty((S, n, T - 1)),
        r=np.empty((S, n, T - 1), dtype=np.int8),
        pi=np.empty((S, n, T - 1)),
        loglik=np.empty((S, chain.n_obs)),
        obs_index=chain.obs_index.copy(),
        log_post=np.empty(S),
        acceptance={},
        n=n,
        p=p,
        T=T,
        config=config_echo(cfg),
    )
    s = 0
    for sweep in range(1, cfg.iterations + 1):
        chain.sweep(sweep_index=sweep, adapting=cfg.adapt and sweep <= cfg.burnin)
        if sweep > cfg.burnin and (sweep - cfg.burnin) % cfg.thin == 0:
            out.alpha[s] = chain.alpha
            out.beta[s] = chain.beta
            out.gamma[s] = chain.gamma
            out.sigma_alpha2[s] = chain.s2a
            out.a1[s] = chain.a1
            out.B[s] = chain.B
            out.lam[s] = chain.lam
            out.r[s] = chain.r
            out.pi[s] = chain.pi
            out.loglik[s] = chain.loglik_cells()
            out.log_post[s] = chain.log_posterior()
            s += 1
    out.acceptance = {k: tuple(v) for k, v in chain.acc.items()}
    return out


def run_chains(data: ResponseTensor, cfg: ChainConfig, n_chains: int):
    """Independent chains over the same data, seeded by spawning from
    cfg.seed. Returns a list of PosteriorSamples."""
    if n_chains < 1:
        raise DomainError("need at least one chain")
    seeds = np.random.SeedSequence(cfg.seed).spawn(n_chains)
    runs = []
    for k in range(n_chains):
        child = int(seeds[k].generate_state(1, dtype=np.uint64)[0])
        runs.append(run_chain(data, replace(cfg, seed=child)))
    return runs
