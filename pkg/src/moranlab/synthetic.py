"""Seeded random instances: points in the unit square and positive sizes."""

from __future__ import annotations

import numpy as np

from .ingest import AttributeTable, DistanceMatrix


def random_points(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.random((n, 2))


def euclidean_distances(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    r = np.sqrt((diff ** 2).sum(axis=-1))
    # exact symmetry regardless of rounding in the subtraction
    r = np.triu(r, 1)
    return r + r.T


def random_instance(n: int, seed: int | np.random.Generator = 42, column: str = "x"):
    """Return ``(AttributeTable, DistanceMatrix)`` for ``n`` random cities.

    Sizes are log-normal, so they are positive and usable with the log
    transform and the Getis-Ord index.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    pts = random_points(n, rng)
    ids = tuple(f"c{i + 1:02d}" for i in range(n))
    sizes = rng.lognormal(mean=3.0, sigma=1.0, size=n)
    return AttributeTable(ids, {column: sizes}), DistanceMatrix(ids, euclidean_distances(pts))
