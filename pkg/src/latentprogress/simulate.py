"""Group-probability simulation scenarios and replication studies.

The scenario data are deliberately not generated from the latent process
model: every response is an independent Bernoulli draw whose success
probability depends only on occasion and group. The study then asks whether
the fitted model still orders the groups by rate of progress and which latent
dimension WAIC picks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .diagnostics import waic
from .engine import ChainConfig, run_chain
from .errors import DomainError
from .geometry import euclidean
from .model import ResponseTensor
from .progress import classify_progress, summarize_progress


@dataclass(frozen=True)
class GroupScenario:
    group_sizes: tuple
    p: int
    t1_prob: float
    t2_probs: tuple
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "group_sizes", tuple(int(g) for g in self.group_sizes))
        object.__setattr__(self, "t2_probs", tuple(float(x) for x in self.t2_probs))
        if not self.group_sizes or any(g < 1 for g in self.group_sizes):
            raise DomainError("group sizes must be positive")
        if len(self.t2_probs) != len(self.group_sizes):
            raise DomainError("need one t2 probability per group")
        if self.p < 1:
            raise DomainError("need at least one item")
        for prob in (self.t1_prob, *self.t2_probs):
            if not 0.0 < prob < 1.0:
                raise DomainError("success probabilities must lie in (0, 1)")

    @property
    def n(self) -> int:
        return sum(self.group_sizes)

    @property
    def n_groups(self) -> int:
        return len(self.group_sizes)


def generate_group_scenario(sc: GroupScenario, seed=None):
    """Draw the two-occasion panel: P(Y=1) = t1_prob for everyone at t=1 and
    t2_probs[g] for group g at t=2, all cells observed. Returns the tensor and
    the per-individual group labels ("G1", "G2", ...)."""
    rng = np.random.default_rng(sc.seed if seed is None else seed)
    n, p = sc.n, sc.p
    labels = np.repeat(
        [f"G{k+1}" for k in range(sc.n_groups)], sc.group_sizes
    )
    p2 = np.repeat(sc.t2_probs, sc.group_sizes)
    values = np.empty((n, p, 2), dtype=float)
    values[:, :, 0] = rng.uniform(size=(n, p)) < sc.t1_prob
    values[:, :, 1] = rng.uniform(size=(n, p)) < p2[:, None]
    data = ResponseTensor(values=values, observed=np.ones((n, p, 2), dtype=bool))
    return data, labels


# Reference chain settings for the two study sizes, per latent dimension:
# (iterations, burnin, proposal sds for a1 / b / logit-lambda).
STUDY_CHAINS_N300 = {
    1: (45_000, 30_000, 1.7, 0.6, 5.0),
    2: (65_000, 50_000, 1.4, 0.8, 5.0),
    3: (85_000, 70_000, 1.0, 0.6, 5.0),
    4: (85_000, 70_000, 0.9, 0.3, 5.0),
}
STUDY_CHAINS_N600 = {
    1: (45_000, 30_000, 1.8, 0.1, 5.0),
    2: (65_000, 50_000, 1.4, 0.3, 5.0),
    3: (85_000, 70_000, 0.8, 0.15, 5.0),
    4: (85_000, 70_000, 0.7, 0.08, 5.0),
}


def default_study_config(q: int, n: int = 300, shorten: float = 1.0, thin: int = 1) -> ChainConfig:
    """Per-dimension chain settings used by the replication studies; chains
    shrink proportionally when shorten > 1 (proposal scales stay put)."""
    table = STUDY_CHAINS_N600 if n >= 600 else STUDY_CHAINS_N300
    if q not in table:
        raise DomainError(f"no default chain settings for q={q}")
    iters, burn, sd_a, sd_b, sd_l = table[q]
    if shorten <= 0:
        raise DomainError("shorten must be positive")
    return ChainConfig(
        iterations=int(round(iters / shorten)),
        burnin=int(round(burn / shorten)),
        thin=thin,
        space=euclidean(q),
        proposal_sd_a=sd_a,
        proposal_sd_b=sd_b,
        proposal_sd_lambda=sd_l,
    )


@dataclass
class StudyReport:
    q_list: list
    n_reps: int
    group_names: list
    waic: dict  # q -> list of floats (nan for failed fits)
    waic_percentiles: dict  # q -> (p10, p50, p90)
    minimizer_counts: dict  # q -> count over complete replicates
    minimizer_freq: dict  # q -> share over complete replicates
    lambda_group_means: dict  # q -> per-rep {group: mean of per-individual median lambda}
    negligible_share: dict  # q -> per-rep {group: share classified negligible}
    failures: list  # (rep, q, message)
    first_fit: tuple | None = None  # (data, labels, samples) when requested

    def to_dict(self) -> dict:
        return {
            "q_list": list(self.q_list),
            "n_reps": self.n_reps,
            "group_names": list(self.group_names),
            "waic": {str(q): list(v) for q, v in self.waic.items()},
            "waic_percentiles": {
                str(q): list(v) for q, v in self.waic_percentiles.items()
            },
            "minimizer_counts": {str(q): v for q, v in self.minimizer_counts.items()},
            "minimizer_freq": {str(q): v for q, v in self.minimizer_freq.items()},
            "lambda_group_means": {
                str(q): v for q, v in self.lambda_group_means.items()
            },
            "negligible_share": {
                str(q): v for q, v in self.negligible_share.items()
            },
            "failures": [
                {"rep": r, "q": q, "message": m} for r, q, m in self.failures
            ],
        }


def _group_lambda_means(samples, labels) -> dict:
    """Mean over each group of the per-individual posterior-median lambda at
    the final occasion."""
    med = np.median(samples.lam[:, :, -1], axis=0)
    return {
        g: float(med[labels == g].mean()) for g in dict.fromkeys(labels.tolist())
    }


def _group_negligible_share(samples, labels, threshold=0.5) -> dict:
    rows = [r for r in summarize_progress(samples, threshold) if r.time == samples.T]
    cls = classify_progress(rows, threshold=threshold, groups=labels)
    return {
        g: c["negligible"] / c["total"] for g, c in cls.group_counts.items()
    }


def run_replications(
    sc: GroupScenario,
    q_list,
    cfg_per_q=None,
    n_reps: int = 10,
    shorten: float = 10.0,
    thin: int = 5,
    keep_first_fit_q=None,
    progress_hook=None,
) -> StudyReport:
    """Replicate the scenario n_reps times, fitting one chain per latent
    dimension, and aggregate WAIC and progress-separation results. A failed
    fit is recorded in the report, not dropped silently."""
    q_list = [int(q) for q in q_list]
    if not q_list:
        raise DomainError("need at least one latent dimension")
    if n_reps < 1:
        raise DomainError("need at least one replicate")
    if cfg_per_q is None:
        cfg_per_q = {
            q: default_study_config(q, n=sc.n, shorten=shorten, thin=thin)
            for q in q_list
        }
    missing = [q for q in q_list if q not in cfg_per_q]
    if missing:
        raise DomainError(f"no chain config for q in {missing}")

    root = np.random.SeedSequence(sc.seed)
    data_seeds, fit_seeds = root.spawn(2)
    data_children = data_seeds.spawn(n_reps)
    fit_children = fit_seeds.spawn(n_reps * len(q_list))

    waics = {q: [float("nan")] * n_reps for q in q_list}
    lam_means = {q: [None] * n_reps for q in q_list}
    negligible = {q: [None] * n_reps for q in q_list}
    failures = []
    first_fit = None
    group_names = [f"G{k+1}" for k in range(sc.n_groups)]

    for rep in range(n_reps):
        data, labels = generate_group_scenario(sc, seed=data_children[rep])
        for kq, q in enumerate(q_list):
            seed_val = int(
                fit_children[rep * len(q_list) + kq].generate_state(1, dtype=np.uint64)[0]
            )
            cfg = replace(cfg_per_q[q], seed=seed_val)
            try:
                samples = run_chain(data, cfg)
                waics[q][rep] = waic(samples.loglik).waic
                lam_means[q][rep] = _group_lambda_means(samples, labels)
                negligible[q][rep] = _group_negligible_share(samples, labels)
                if keep_first_fit_q == q and first_fit is None:
                    first_fit = (data, labels, samples)
            except Exception as exc:  # record and move on; study must finish
                failures.append((rep, q, f"{type(exc).__name__}: {exc}"))
            if progress_hook is not None:
                progress_hook(rep, q)

    percentiles = {}
    for q in q_list:
        vals = np.asarray(waics[q], dtype=float)
        ok = vals[np.isfinite(vals)]
        percentiles[q] = (
            tuple(np.percentile(ok, [10.0, 50.0, 90.0])) if ok.size else
            (float("nan"),) * 3
        )

    counts = {q: 0 for q in q_list}
    complete = 0
    for rep in range(n_reps):
        row = {q: waics[q][rep] for q in q_list}
        if all(np.isfinite(v) for v in row.values()):
            complete += 1
            counts[min(row, key=row.get)] += 1
    freq = {q: (counts[q] / complete if complete else float("nan")) for q in q_list}

    return StudyReport(
        q_list=q_list,
        n_reps=n_reps,
        group_names=group_names,
        waic=waics,
        waic_percentiles=percentiles,
        minimizer_counts=counts,
        minimizer_freq=freq,
        lambda_group_means=lam_means,
        negligible_share=negligible,
        failures=failures,
        first_fit=first_fit,
    )
