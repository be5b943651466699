"""Metric spaces the latent positions live in.

Two geometries: Euclidean R^q, and the Poincare disk of radius rho (two
dimensions only). Points are float arrays whose last axis holds coordinates,
and everything broadcasts over leading axes, so the same calls serve a single
point or an (n, p)-shaped grid of pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

EUCLIDEAN = "euclidean"
POINCARE = "poincare"


@dataclass(frozen=True)
class MetricSpace:
    kind: str
    q: int
    rho: float | None = None

    def __post_init__(self):
        if self.kind not in (EUCLIDEAN, POINCARE):
            raise DomainError(f"unknown geometry kind {self.kind!r}")
        if int(self.q) != self.q or self.q < 1:
            raise DomainError("latent dimension must be a positive integer")
        if self.kind == POINCARE:
            if self.q != 2:
                raise DomainError("the Poincare disk is two-dimensional; q must be 2")
            if self.rho is None or not np.isfinite(self.rho) or self.rho <= 0:
                raise DomainError("disk radius must be a positive finite number")

    def _coerce(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.q:
            raise DomainError(f"point has dimension {x.shape[-1]}, expected {self.q}")
        return x

    def admissible(self, x):
        """Boolean mask (broadcast shape) of points that lie in the space."""
        x = self._coerce(x)
        finite = np.isfinite(x).all(axis=-1)
        if self.kind == EUCLIDEAN:
            return finite
        return finite & (np.einsum("...k,...k->...", x, x) < self.rho**2)

    def check_admissible(self, x):
        if not np.all(self.admissible(x)):
            if self.kind == POINCARE:
                raise DomainError("point outside the Poincare disk")
            raise DomainError("point has non-finite coordinates")

    def distance(self, x, y):
        """Geodesic distance, broadcasting over leading axes."""
        x = self._coerce(x)
        y = self._coerce(y)
        if self.kind == EUCLIDEAN:
            return np.linalg.norm(x - y, axis=-1)
        self.check_admissible(x)
        self.check_admissible(y)
        rho2 = self.rho**2
        diff2 = np.einsum("...k,...k->...", x - y, x - y)
        denom = (rho2 - np.einsum("...k,...k->...", x, x)) * (
            rho2 - np.einsum("...k,...k->...", y, y)
        )
        arg = 1.0 + 2.0 * rho2 * diff2 / denom
        # rounding can push the argument a hair under 1 when x == y
        return np.arccosh(np.maximum(arg, 1.0))


def euclidean(q: int) -> MetricSpace:
    return MetricSpace(EUCLIDEAN, q)


def poincare_disk(rho: float) -> MetricSpace:
    return MetricSpace(POINCARE, 2, rho)
