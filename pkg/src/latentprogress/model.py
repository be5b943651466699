"""Domain types and the deterministic model math.

The data are binary responses Y[i, j, t] of n individuals to p items at T
occasions. Individual i sits at latent position a[i, t]; items sit at fixed
positions b[j]; the target is the item-position average. The linear predictor
is alpha_i + beta_j - gamma * d, where d is the distance to item j at the first
occasion and the distance to the target afterwards. Positions after the first
occasion are never stored: they are the convex combinations implied by the
rates of progress, recomputed on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DomainError, UndefinedRateError
from .geometry import MetricSpace

__all__ = [
    "ResponseTensor",
    "Hyperparams",
    "ModelParams",
    "LatentState",
    "target",
    "propagate_positions",
    "rate_from_distances",
    "distance_tables",
    "cell_distances",
    "eta_tensor",
    "linear_predictor",
    "bernoulli_loglik",
    "log_likelihood",
]


@dataclass
class ResponseTensor:
    """Binary response panel with an observation mask.

    values[i, j, t] must be 0 or 1 wherever observed[i, j, t] is True; masked
    entries are ignored by every likelihood sum. The CSV loader additionally
    requires at least one observed response per individual per occasion;
    tensors built directly (e.g. fully masked ones for prior studies) skip
    that check.
    """

    values: np.ndarray
    observed: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        self.observed = np.asarray(self.observed, dtype=bool)
        if self.values.ndim != 3:
            raise DataError("responses must be a 3-d array (individuals, items, occasions)")
        if self.values.shape != self.observed.shape:
            raise DataError("values and observed mask must have the same shape")
        n, p, T = self.values.shape
        if n < 1 or p < 1:
            raise DataError("need at least one individual and one item")
        if T < 2:
            raise DataError("need at least two occasions")
        vals = self.values[self.observed]
        if vals.size and not np.isin(vals, (0, 1)).all():
            raise DataError("observed responses must be 0 or 1")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def T(self) -> int:
        return self.values.shape[2]

    def require_full_coverage(self):
        """Every (individual, occasion) pair must have an observed response."""
        cover = self.observed.any(axis=1)
        if not cover.all():
            i, t = np.argwhere(~cover)[0]
            raise DataError(
                f"individual {i + 1} has no observed response at occasion {t + 1}"
            )


@dataclass(frozen=True)
class Hyperparams:
    """Prior settings. Defaults are the reference configuration used by every
    study in this package (they are identical across latent dimensions)."""

    sigma_beta: float = 5.0
    a_sigma_alpha: float = 1.0
    b_sigma_alpha: float = 1.0
    sigma_gamma: float = 2.0
    sigma_a: float = 1.0
    sigma_b: float = 1.0
    mu0: float = -2.0
    sigma0: float = 1.0
    mu1: float = 0.0
    sigma1: float = 2.0
    a_pi: float = 1.0
    b_pi: float = 1.0

    def __post_init__(self):
        for name in (
            "sigma_beta",
            "a_sigma_alpha",
            "b_sigma_alpha",
            "sigma_gamma",
            "sigma_a",
            "sigma_b",
            "sigma0",
            "sigma1",
            "a_pi",
            "b_pi",
        ):
            if not getattr(self, name) > 0:
                raise DomainError(f"hyperparameter {name} must be positive")


@dataclass
class ModelParams:
    alpha: np.ndarray  # (n,)
    beta: np.ndarray  # (p,)
    gamma: float
    sigma_alpha2: float

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float)
        self.beta = np.asarray(self.beta, dtype=float)
        if self.gamma < 0:
            raise DomainError("gamma must be nonnegative")
        if not self.sigma_alpha2 > 0:
            raise DomainError("sigma_alpha2 must be positive")


@dataclass
class LatentState:
    """Positions at the first occasion, item positions, and the progress
    process (rates, mixture indicators, mixing proportions) for t = 2..T.
    Column k of lam/r/pi refers to occasion k + 2."""

    a1: np.ndarray  # (n, q)
    B: np.ndarray  # (p, q)
    lam: np.ndarray  # (n, T-1) in (0, 1)
    r: np.ndarray  # (n, T-1) in {0, 1}
    pi: np.ndarray  # (n, T-1) in (0, 1)

    def __post_init__(self):
        self.a1 = np.asarray(self.a1, dtype=float)
        self.B = np.asarray(self.B, dtype=float)
        self.lam = np.asarray(self.lam, dtype=float)
        self.r = np.asarray(self.r)
        self.pi = np.asarray(self.pi, dtype=float)

    def validate(self, space: MetricSpace):
        space.check_admissible(self.a1)
        space.check_admissible(self.B)
        if np.any((self.lam <= 0) | (self.lam >= 1)):
            raise DomainError("rates of progress must lie strictly inside (0, 1)")
        if not np.isin(self.r, (0, 1)).all():
            raise DomainError("mixture indicators must be 0 or 1")
        if np.any((self.pi <= 0) | (self.pi >= 1)):
            raise DomainError("mixing proportions must lie strictly inside (0, 1)")


def target(B: np.ndarray) -> np.ndarray:
    """Target point: the average of the item positions. Lies in the disk for
    the hyperbolic geometry because the disk is convex."""
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] < 1:
        raise DomainError("item positions must be a nonempty (p, q) array")
    return B.mean(axis=0)


def propagate_positions(a1, lambdas, target_point) -> np.ndarray:
    """Positions at occasions 1..T implied by the rates of progress.

    a1: (..., q) starting positions; lambdas: (..., T-1) rates in [0, 1];
    target_point: (q,). Returns (..., T, q): each step moves the fraction
    lambda of the remaining way toward the target, a_t = (1-l) a_{t-1} + l T.
    """
    a1 = np.asarray(a1, dtype=float)
    lam = np.asarray(lambdas, dtype=float)
    tp = np.asarray(target_point, dtype=float)
    if np.any((lam < 0) | (lam > 1)) or not np.isfinite(lam).all():
        raise DomainError("rates of progress must lie in [0, 1]")
    single = a1.ndim == 1
    A = a1[None, :] if single else a1
    L = lam[None, :] if single else lam
    m, q = A.shape
    steps = L.shape[-1]
    out = np.empty((m, steps + 1, q))
    out[:, 0] = A
    cur = A
    for k in range(steps):
        w = L[:, k][:, None]
        cur = (1.0 - w) * cur + w * tp
        out[:, k + 1] = cur
    return out[0] if single else out


def rate_from_distances(d_prev: float, d_curr: float, tol: float = 1e-9) -> float:
    """Rate of progress implied by two successive distances to the target:
    1 - d_curr / d_prev. Defined only for d_prev > 0 and no regress."""
    if not d_prev > 0:
        raise UndefinedRateError("rate undefined: previous distance to the target is zero")
    if d_curr < -tol or d_curr > d_prev * (1.0 + tol) + tol:
        raise DomainError("distances must satisfy 0 <= d_curr <= d_prev (regress is not modeled)")
    lam = 1.0 - d_curr / d_prev
    return float(min(1.0, max(0.0, lam)))


def distance_tables(state: LatentState, space: MetricSpace):
    """(D1, Dt, tpoint): D1[i, j] = d(a_{i,1}, b_j) used at the first occasion;
    Dt[i, k] = d(a_{i,k+2}, target) used at occasion k + 2."""
    tpoint = target(state.B)
    D1 = space.distance(state.a1[:, None, :], state.B[None, :, :])
    pos = propagate_positions(state.a1, state.lam, tpoint)
    Dt = space.distance(pos[:, 1:, :], tpoint[None, None, :])
    return D1, Dt, tpoint


def cell_distances(D1: np.ndarray, Dt: np.ndarray) -> np.ndarray:
    """Per-cell distance tensor (n, p, T). At occasions past the first the
    distance is to the target and does not depend on the item."""
    n, p = D1.shape
    T = Dt.shape[1] + 1
    d = np.empty((n, p, T))
    d[:, :, 0] = D1
    d[:, :, 1:] = Dt[:, None, :]
    return d


def eta_tensor(params: ModelParams, state: LatentState, space: MetricSpace) -> np.ndarray:
    """Linear predictor for every cell, (n, p, T)."""
    D1, Dt, _ = distance_tables(state, space)
    d = cell_distances(D1, Dt)
    return (
        params.alpha[:, None, None]
        + params.beta[None, :, None]
        - params.gamma * d
    )


def linear_predictor(
    i: int, j: int, t: int, params: ModelParams, state: LatentState, space: MetricSpace
) -> float:
    """Single-cell linear predictor; t is the 1-based occasion index."""
    n, q = state.a1.shape
    p = state.B.shape[0]
    T = state.lam.shape[1] + 1
    if not (0 <= i < n and 0 <= j < p and 1 <= t <= T):
        raise DomainError("index out of range")
    if t == 1:
        d = float(space.distance(state.a1[i], state.B[j]))
    else:
        tpoint = target(state.B)
        pos = propagate_positions(state.a1[i], state.lam[i], tpoint)
        d = float(space.distance(pos[t - 1], tpoint))
    return float(params.alpha[i] + params.beta[j] - params.gamma * d)


def bernoulli_loglik(y: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Elementwise Bernoulli log-likelihood y*eta - log(1 + exp(eta))."""
    return y * eta - np.logaddexp(0.0, eta)


def log_likelihood(
    data: ResponseTensor, params: ModelParams, state: LatentState, space: MetricSpace
) -> float:
    """Sum of the Bernoulli log-likelihood over observed cells."""
    eta = eta_tensor(params, state, space)
    cells = bernoulli_loglik(np.asarray(data.values, dtype=float), eta)
    return float(cells.sum(where=data.observed))
