"""Model comparison and convergence diagnostics.

waic() scores a fit from its per-sample per-observation log-likelihood matrix.
psrf_multivariate() is the stable multivariate potential scale reduction
factor: a determinant ratio of the pooled posterior covariance to a replicated
batch means estimate of the asymptotic covariance, gated by the cutoff implied
by a minimum effective sample size for an (epsilon, alpha) confidence volume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln, logit, logsumexp
from scipy.stats import chi2

from .errors import DegenerateConfigurationError, DomainError, InsufficientSamplesError
from .model import ResponseTensor, bernoulli_loglik

_EPSILON = 0.05
_ALPHA = 0.05


@dataclass(frozen=True)
class WaicResult:
    lppd: float
    p_waic: float
    elpd_waic: float
    waic: float


@dataclass(frozen=True)
class PsrfResult:
    psrf: float
    cutoff: float
    n_params: int
    n_chains: int

    @property
    def converged(self) -> bool:
        return self.psrf < self.cutoff


def waic(loglik) -> WaicResult:
    """WAIC from an S x N matrix of log-likelihoods (sample s, observation n).

    lppd sums log of column means of exp(loglik), stabilized; the effective
    parameter count is the summed per-column sample variance (divisor S-1).
    """
    ll = np.asarray(loglik, dtype=float)
    if ll.ndim == 1:
        ll = ll[:, None]
    if ll.ndim != 2:
        raise DomainError("loglik must be a 2-d array (samples x observations)")
    S = ll.shape[0]
    if S < 2:
        raise InsufficientSamplesError("waic needs at least 2 retained samples")
    if not np.all(np.isfinite(ll)):
        raise DomainError("loglik contains non-finite entries")
    lppd = float(np.sum(logsumexp(ll, axis=0) - np.log(S)))
    p_waic = float(np.sum(np.var(ll, axis=0, ddof=1)))
    elpd = lppd - p_waic
    return WaicResult(lppd=lppd, p_waic=p_waic, elpd_waic=elpd, waic=-2.0 * elpd)


def min_ess(d: int, epsilon: float = _EPSILON, alpha: float = _ALPHA) -> float:
    """Minimum effective sample size so that an (1-alpha) confidence region
    has relative volume epsilon^d; evaluated in log space since Gamma(d/2)
    overflows for d in the hundreds."""
    if d < 1:
        raise DomainError("dimension must be positive")
    log_m = (
        (2.0 / d) * np.log(2.0)
        + np.log(np.pi)
        - (2.0 / d) * (np.log(d) + gammaln(d / 2.0))
        + np.log(chi2.ppf(1.0 - alpha, d))
        - 2.0 * np.log(epsilon)
    )
    return float(np.exp(log_m))


def psrf_cutoff(d: int, n_chains: int, epsilon: float = _EPSILON, alpha: float = _ALPHA) -> float:
    return float(np.sqrt(1.0 + n_chains / min_ess(d, epsilon, alpha)))


def psrf_multivariate(chains, epsilon: float = _EPSILON, alpha: float = _ALPHA) -> PsrfResult:
    """Stable multivariate PSRF over an (R, S, d) stack of chains.

    Within-chain covariance S_w pools the per-chain sample covariances; the
    asymptotic covariance T_hat replicates nonoverlapping batch means of size
    floor(sqrt(S)) across chains. psrf^2 = (n-1)/n + (det T_hat / det S_w)^(1/d) / n
    with n the per-chain draws actually used (a*b). Requires R >= 2 chains and
    at least two batches.
    """
    x = np.asarray(chains, dtype=float)
    if x.ndim == 2:
        x = x[:, :, None]
    if x.ndim != 3:
        raise DomainError("chains must be (n_chains, n_samples, n_params)")
    m, S, d = x.shape
    if m < 2:
        raise InsufficientSamplesError("psrf needs at least 2 chains")
    b = int(np.floor(np.sqrt(S)))
    a = S // b if b else 0
    if b < 1 or a < 2:
        raise InsufficientSamplesError(
            "psrf needs enough samples for at least two sqrt-size batches"
        )
    if a * m - 1 < d:
        # dev rows below sum to zero, so rank(T_hat) <= a*m - 1 and the
        # determinant is identically zero whenever that falls short of d
        raise InsufficientSamplesError(
            f"psrf over d={d} params needs a*m-1 >= d batch means; "
            f"got a={a} batches x m={m} chains (run longer chains)"
        )
    n = a * b
    x = x[:, :n, :]

    mean_c = x.mean(axis=1)
    centered = x - mean_c[:, None, :]
    # pooled within-chain covariance, ddof=1 per chain
    s_w = np.einsum("csi,csj->ij", centered, centered) / (m * (n - 1))

    bm = x.reshape(m, a, b, d).mean(axis=2)
    grand = x.mean(axis=(0, 1))
    dev = bm - grand
    t_hat = b * np.einsum("cki,ckj->ij", dev, dev) / (a * m - 1)

    sign_w, logdet_w = np.linalg.slogdet(s_w)
    sign_t, logdet_t = np.linalg.slogdet(t_hat)
    if sign_w <= 0 or not np.isfinite(logdet_w):
        raise DegenerateConfigurationError(
            "within-chain covariance is rank deficient; chains look degenerate"
        )
    if sign_t <= 0 or not np.isfinite(logdet_t):
        raise DegenerateConfigurationError(
            "batch-means covariance is rank deficient; chains look degenerate"
        )
    ratio = np.exp((logdet_t - logdet_w) / d)
    psrf = float(np.sqrt((n - 1.0) / n + ratio / n))
    return PsrfResult(
        psrf=psrf, cutoff=psrf_cutoff(d, m, epsilon, alpha), n_params=d, n_chains=m
    )


def psrf_matrix_from_samples(runs) -> np.ndarray:
    """Stack the convergence-gated parameter vector from a list of
    PosteriorSamples into an (R, S, d) array: alpha, beta, gamma,
    sigma_alpha2 and logit lambda. Positions are excluded; they are only
    identified up to rigid motion."""
    if not runs:
        raise DomainError("no chains given")
    S = min(r.n_retained for r in runs)
    rows = []
    for r in runs:
        parts = [
            r.alpha[:S],
            r.beta[:S],
            r.gamma[:S, None],
            r.sigma_alpha2[:S, None],
            logit(np.clip(r.lam[:S].reshape(S, -1), 1e-12, 1.0 - 1e-12)),
        ]
        rows.append(np.concatenate(parts, axis=1))
    return np.stack(rows, axis=0)


def acceptance_report(samples) -> dict:
    """Per-block Metropolis acceptance rates with a flag when the rate strays
    from the (0.3, 0.4) target band by more than 0.1. Blocks that never
    proposed are left out."""
    report = {}
    for block, (accepted, proposed) in samples.acceptance.items():
        if proposed == 0:
            continue
        rate = accepted / proposed
        flagged = rate < 0.3 - 0.1 or rate > 0.4 + 0.1
        report[block] = {"rate": rate, "accepted": accepted, "proposed": proposed,
                         "flagged": bool(flagged)}
    return report


@dataclass(frozen=True)
class PpcResult:
    """Posterior predictive per-individual proportion-correct checks.

    observed, lo, med, hi are (n, T); cells with no observed responses hold
    NaN. draws is (n_draws, n, T)."""

    observed: np.ndarray
    lo: np.ndarray
    med: np.ndarray
    hi: np.ndarray
    draws: np.ndarray

    def coverage(self, t: int) -> float:
        """Share of individuals whose observed proportion at occasion t
        (1-based) falls inside [lo, hi]."""
        k = t - 1
        obs = self.observed[:, k]
        ok = np.isfinite(obs)
        if not np.any(ok):
            raise DomainError(f"no observed cells at occasion {t}")
        inside = (obs[ok] >= self.lo[ok, k]) & (obs[ok] <= self.hi[ok, k])
        return float(inside.mean())

    def rows(self):
        n, T = self.observed.shape
        for i in range(n):
            for t in range(T):
                yield {
                    "individual": i,
                    "time": t + 1,
                    "observed": self.observed[i, t],
                    "lo": self.lo[i, t],
                    "mid": self.med[i, t],
                    "hi": self.hi[i, t],
                }


def posterior_predictive(data: ResponseTensor, samples, n_draws: int, rng) -> PpcResult:
    """Simulate responses at the observed cells from n_draws retained samples
    (cycled when n_draws exceeds the retained count) and summarize the
    per-individual proportion correct at each occasion against the data."""
    if samples.n_retained < 1:
        raise InsufficientSamplesError("no retained samples")
    if n_draws < 1:
        raise DomainError("n_draws must be positive")
    from .model import cell_distances  # local import avoids cycle-prone top level
    from .geometry import MetricSpace
    from .model import propagate_positions, target

    M = np.asarray(data.observed, dtype=bool)
    Y = np.where(M, np.asarray(data.values, dtype=float), np.nan)
    n, p, T = data.n, data.p, data.T
    space: MetricSpace = samples.space
    counts = M.sum(axis=1).astype(float)  # (n, T)
    with np.errstate(invalid="ignore", divide="ignore"):
        observed = np.where(counts > 0, np.nansum(Y, axis=1) / counts, np.nan)

    draws = np.empty((n_draws, n, T))
    S = samples.n_retained
    for k in range(n_draws):
        s = k % S
        tpoint = target(samples.B[s])
        D1 = space.distance(samples.a1[s][:, None, :], samples.B[s][None, :, :])
        pos = propagate_positions(samples.a1[s], samples.lam[s], tpoint)
        Dt = space.distance(pos[:, 1:, :], tpoint[None, None, :])
        eta = (
            samples.alpha[s][:, None, None]
            + samples.beta[s][None, :, None]
            - samples.gamma[s] * cell_distances(D1, Dt)
        )
        sim = (rng.uniform(size=eta.shape) < expit(eta)) & M
        simprop = np.where(counts > 0, sim.sum(axis=1) / counts, np.nan)
        draws[k] = simprop

    lo, med, hi = np.nanpercentile(draws, [2.5, 50.0, 97.5], axis=0)
    return PpcResult(observed=observed, lo=lo, med=med, hi=hi, draws=draws)
