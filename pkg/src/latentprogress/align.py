"""Identifiability handling for latent configurations.

The likelihood is unchanged by a joint rescale (b/c, a/c, gamma*c) and, in
Euclidean space, by any rigid motion of all positions. enforce_scale pins one
representative of the scale equivalence class; Procrustes matching removes the
rigid-motion freedom when samples are combined into a single map.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateConfigurationError, DomainError
from .geometry import EUCLIDEAN, MetricSpace
from .model import LatentState, ModelParams


@dataclass
class Configuration:
    """Labeled point set in R^q (individuals at each occasion, items, target)."""

    labels: tuple
    points: np.ndarray  # (m, q)

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise DomainError("configuration points must be an (m, q) array")
        if len(self.labels) != self.points.shape[0]:
            raise DomainError("one label per point required")
        if len(set(self.labels)) != len(self.labels):
            raise DomainError("configuration labels must be unique")


def scale_factor(B: np.ndarray) -> float:
    """Root mean square item-position norm, the quantity pinned to 1."""
    B = np.asarray(B, dtype=float)
    return float(np.sqrt(np.mean(np.sum(B * B, axis=1))))


def enforce_scale(state: LatentState, params: ModelParams, space: MetricSpace):
    """Rescale so that sqrt(mean ||b_j||^2) = 1, compensating through gamma.

    Every linear predictor is unchanged because gamma multiplies a distance
    that shrinks by exactly the factor gamma grows. No-op on the Poincare
    disk, whose radius already fixes the scale.
    """
    if space.kind != EUCLIDEAN:
        return state, params
    c = scale_factor(state.B)
    if not np.isfinite(c) or c == 0.0:
        raise DegenerateConfigurationError("all item positions at the origin; scale undefined")
    new_state = replace(state, a1=state.a1 / c, B=state.B / c)
    new_params = replace(params, gamma=params.gamma * c)
    return new_state, new_params


def procrustes_points(X: np.ndarray, Y: np.ndarray):
    """Rigid motion (rotation, optional reflection, translation; no scaling)
    of X minimizing ||X' - Y||_F. Returns (aligned X, rotation, translation)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise DomainError("configurations must share shape for alignment")
    xc = X.mean(axis=0)
    yc = Y.mean(axis=0)
    M = (X - xc).T @ (Y - yc)
    U, _, Vt = np.linalg.svd(M)
    R = U @ Vt
    shift = yc - xc @ R
    return X @ R + shift, R, shift


def rotation_align_points(X: np.ndarray, Y: np.ndarray):
    """Best orthogonal map about the origin (for the disk: no translation)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise DomainError("configurations must share shape for alignment")
    U, _, Vt = np.linalg.svd(X.T @ Y)
    R = U @ Vt
    return X @ R, R


def procrustes_align(sample: Configuration, reference: Configuration) -> Configuration:
    """Align a sampled configuration to the reference by the optimal rigid
    motion. Labels must match exactly (same points, same order)."""
    if sample.labels != reference.labels:
        raise DomainError("configurations must carry identical labels")
    if sample.points.shape[1] != reference.points.shape[1]:
        raise DomainError("configurations must share dimension")
    aligned, _, _ = procrustes_points(sample.points, reference.points)
    return Configuration(sample.labels, aligned)
