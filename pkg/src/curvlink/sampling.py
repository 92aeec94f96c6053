"""Random test objects shared by the check suite and the tests."""

from __future__ import annotations

import numpy as np

from .forms import Kind, SpaceTag
from .polygons import Polygon, gram, invariants, regular_polygon, validate


def random_polygon(model: SpaceTag, k: int, rng: np.random.Generator,
                   noise: float = 0.08, min_turn: float = 0.0,
                   convex: bool | None = None, max_tries: int = 1000) -> Polygon:
    """Perturb a regular polygon until it validates.

    ``min_turn`` rejects polygons with a nearly aligned corner
    (|theta| < min_turn); ``convex`` optionally forces the sign pattern.
    """
    G = gram(model)
    for _ in range(max_tries):
        if model.kind is Kind.SPHERE2:
            alpha = rng.uniform(-0.6, 0.6)
        else:
            alpha = rng.uniform(0.0, 0.5)
        V = regular_polygon(model, k, alpha).vertices.copy()
        V += noise * rng.standard_normal(V.shape)
        q = np.einsum("ij,jk,ik->i", V, G, V)
        if np.any(q <= 0.05):
            continue
        V /= np.sqrt(q)[:, None]
        p = Polygon(model, V)
        if validate(p):
            continue
        th = invariants(p).angles
        if np.min(np.abs(th)) < min_turn:
            continue
        if convex is True and np.any(th < 0):
            continue
        if convex is False and np.all(th >= 0):
            continue
        return p
    raise RuntimeError("could not sample a valid polygon")


def random_hyperbolic_point(m: int, rng: np.random.Generator, spread: float = 1.0) -> np.ndarray:
    v = rng.normal(scale=spread, size=m)
    return np.concatenate([v, [np.sqrt(1 + v @ v)]])
