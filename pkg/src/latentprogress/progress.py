"""Headline outputs: rate-of-progress summaries, progress classification,
aligned interaction-map export, and plot-ready density grids."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .align import Configuration, procrustes_align, rotation_align_points
from .errors import DomainError, InsufficientSamplesError, UnsupportedExportError
from .geometry import EUCLIDEAN
from .model import propagate_positions, target

DENSITY_GRID = 512


@dataclass(frozen=True)
class ProgressSummary:
    individual: int
    time: int  # occasion t >= 2
    median: float
    p10: float
    p90: float
    p2_5: float
    p97_5: float
    prob_progress: float
    classified: bool


def lambda_summary(samples, i: int, t: int, threshold: float = 0.5) -> ProgressSummary:
    """Empirical quantile summary of the retained lambda_{i,t} chain; the
    progress probability is the retained-sample mean of r_{i,t}."""
    if samples.n_retained < 1:
        raise InsufficientSamplesError("no retained samples")
    if not (0 <= i < samples.n):
        raise DomainError(f"individual index {i} out of range")
    if not (2 <= t <= samples.T):
        raise DomainError(f"occasion {t} out of range 2..{samples.T}")
    chain = samples.lam[:, i, t - 2]
    p2_5, p10, med, p90, p97_5 = np.percentile(chain, [2.5, 10.0, 50.0, 90.0, 97.5])
    prob = float(np.mean(samples.r[:, i, t - 2]))
    return ProgressSummary(
        individual=i,
        time=t,
        median=float(med),
        p10=float(p10),
        p90=float(p90),
        p2_5=float(p2_5),
        p97_5=float(p97_5),
        prob_progress=prob,
        classified=prob >= threshold,
    )


def summarize_progress(samples, threshold: float = 0.5) -> list:
    """lambda_summary rows for every individual and occasion t >= 2."""
    return [
        lambda_summary(samples, i, t, threshold)
        for i in range(samples.n)
        for t in range(2, samples.T + 1)
    ]


@dataclass(frozen=True)
class ProgressClassification:
    progress: list
    no_progress: list
    group_counts: dict
    threshold: float


def classify_progress(summaries, threshold: float = 0.5, groups=None) -> ProgressClassification:
    """Partition individuals by prob_progress >= threshold (the boundary
    counts as progress). With per-individual group labels, also tabulate
    progress / negligible counts per group."""
    progress, negligible = [], []
    for row in summaries:
        (progress if row.prob_progress >= threshold else negligible).append(row.individual)
    counts = {}
    if groups is not None:
        groups = np.asarray(groups)
        for row in summaries:
            g = groups[row.individual]
            slot = counts.setdefault(str(g), {"progress": 0, "negligible": 0, "total": 0})
            slot["total"] += 1
            if row.prob_progress >= threshold:
                slot["progress"] += 1
            else:
                slot["negligible"] += 1
    return ProgressClassification(
        progress=progress, no_progress=negligible, group_counts=counts,
        threshold=threshold,
    )


def _sample_configuration(samples, s: int) -> Configuration:
    tpoint = target(samples.B[s])
    pos = propagate_positions(samples.a1[s], samples.lam[s], tpoint)
    n, T, q = pos.shape
    labels = [f"individual:{i+1}:t{t+1}" for i in range(n) for t in range(T)]
    labels += [f"item:{j+1}" for j in range(samples.p)]
    labels += ["target"]
    points = np.vstack([pos.reshape(n * T, q), samples.B[s], tpoint[None, :]])
    return Configuration(labels=tuple(labels), points=points)


def export_interaction_map(samples, alignment: Configuration | None = None):
    """Coordinate-wise posterior medians of the aligned latent configuration.

    Every retained sample's configuration (each individual at each occasion,
    each item, and the target) is matched to a reference by rotation,
    reflection and translation; the reference defaults to the retained sample
    with the highest log posterior. Exports require q <= 3.
    """
    if samples.n_retained < 1:
        raise InsufficientSamplesError("no retained samples")
    if samples.q > 3:
        raise UnsupportedExportError(
            f"interaction maps are limited to q <= 3 (fit has q={samples.q})"
        )
    if alignment is None:
        ref_idx = int(np.argmax(samples.log_post))
        alignment = _sample_configuration(samples, ref_idx)
    euclidean = samples.space.kind == EUCLIDEAN
    S = samples.n_retained
    stack = np.empty((S, len(alignment.labels), samples.q))
    for s in range(S):
        conf = _sample_configuration(samples, s)
        if euclidean:
            aligned = procrustes_align(conf, alignment)
            stack[s] = aligned.points
        else:
            # disk isometries that fix the origin: rotations / reflections only
            stack[s] = rotation_align_points(conf.points, alignment.points)[0]
    medians = np.median(stack, axis=0)
    return Configuration(labels=alignment.labels, points=medians)


def map_rows(config: Configuration):
    """Flatten an exported map into plot-ready records."""
    for label, point in zip(config.labels, config.points):
        parts = label.split(":")
        if parts[0] == "individual":
            kind, ident, time = "individual", int(parts[1]), int(parts[2][1:])
        elif parts[0] == "item":
            kind, ident, time = "item", int(parts[1]), ""
        else:
            kind, ident, time = "target", "", ""
        row = {"label": label, "kind": kind, "id": ident, "time": time}
        for k, v in enumerate(point):
            row[f"x{k+1}"] = float(v)
        yield row


def _gaussian_kde_grid(values, grid, bw_floor):
    values = np.asarray(values, dtype=float)
    S = values.size
    sd = float(np.std(values, ddof=1)) if S > 1 else 0.0
    q75, q25 = np.percentile(values, [75.0, 25.0])
    iqr = float(q75 - q25)
    spread = min(x for x in (sd, iqr / 1.34) if x > 0) if max(sd, iqr) > 0 else 0.0
    bw = 0.9 * spread * S ** (-0.2) if spread > 0 else 0.0
    bw = max(bw, bw_floor)
    z = (grid[:, None] - values[None, :]) / bw
    dens = np.exp(-0.5 * z * z).mean(axis=1) / (bw * np.sqrt(2.0 * np.pi))
    area = np.trapezoid(dens, grid)
    if area <= 0:
        raise DomainError("degenerate density: zero mass on [0, 1]")
    return dens / area


def lambda_density_export(samples, ids=None, times=None):
    """Gaussian kernel densities of retained lambda chains on a 512-point
    grid over [0, 1], Silverman bandwidth floored at one grid cell, truncated
    to the unit interval and renormalized (trapezoid rule).

    Returns (grid, columns) where columns maps "individual:t" keys to density
    arrays. Individual ids are 0-based; occasions are 1-based (t >= 2).
    """
    if samples.n_retained < 1:
        raise InsufficientSamplesError("no retained samples")
    if ids is None:
        ids = range(samples.n)
    if times is None:
        times = range(2, samples.T + 1)
    grid = np.linspace(0.0, 1.0, DENSITY_GRID)
    bw_floor = 2.0 / DENSITY_GRID
    columns = {}
    for i in ids:
        if not (0 <= i < samples.n):
            raise DomainError(f"individual index {i} out of range")
        for t in times:
            if not (2 <= t <= samples.T):
                raise DomainError(f"occasion {t} out of range 2..{samples.T}")
            chain = samples.lam[:, i, t - 2]
            columns[f"{i}:{t}"] = _gaussian_kde_grid(chain, grid, bw_floor)
    return grid, columns
