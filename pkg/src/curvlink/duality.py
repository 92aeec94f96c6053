"""Point/hyperplane dualities: H <-> dS and AdS <-> AdS."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .forms import (AmbientVector, Kind, ModelPoint, SpaceTag, de_sitter,
                    exp_geodesic, form_eval, geodesic_distance, hyperbolic,
                    inner)
from .hipped import HippedData, convexity, face_normal, recover_angles


@dataclass(frozen=True)
class HyperplaneRec:
    """Totally geodesic hyperplane {<., normal> = 0} of the space ``tag``."""

    normal: AmbientVector
    tag: SpaceTag

    def __post_init__(self):
        if self.normal.tag.dim != self.tag.dim:
            raise ValueError("normal has the wrong dimension")
        q = inner(self.tag.signs, self.normal.coords, self.normal.coords)
        want = 1.0 if self.tag.kind is Kind.HYPERBOLIC else -1.0
        if abs(q - want) > 1e-9:
            raise ValueError(f"normal of a hyperplane in {self.tag} must have q = {want:+g}")

    def contains(self, x, tol: float = 1e-10) -> bool:
        return abs(inner(self.tag.signs, self.normal.coords, np.asarray(x, float))) <= tol


def _companion(tag: SpaceTag) -> SpaceTag:
    if tag.kind is Kind.HYPERBOLIC:
        return de_sitter(tag.m)
    if tag.kind is Kind.DESITTER:
        return hyperbolic(tag.m)
    if tag.kind is Kind.ANTI_DE_SITTER:
        return tag
    raise ValueError(f"no duality for {tag}")


def dual(obj):
    """Point -> dual hyperplane, hyperplane -> dual point.

    H^m points give spacelike hyperplanes of dS^m and dS^m points give
    hyperplanes of H^m; AdS is self-dual.  The dS -> H direction returns the
    future-pointing unit normal.
    """
    if isinstance(obj, HyperplaneRec):
        tag = _companion(obj.tag)
        c = obj.normal.coords
        if tag.kind is Kind.HYPERBOLIC and c[-1] < 0:
            c = -c
        return ModelPoint(c, tag)
    if isinstance(obj, ModelPoint):
        return HyperplaneRec(AmbientVector(obj.coords, obj.tag), _companion(obj.tag))
    raise TypeError(f"cannot dualise {type(obj).__name__}")


def ads_half_turn_check(x: ModelPoint, T, s: float = np.pi / 2) -> bool:
    """Does the timelike geodesic from x in direction T reach dual(x) at time s?"""
    if x.tag.kind is not Kind.ANTI_DE_SITTER:
        raise ValueError("half-turn check is for AdS points")
    T = AmbientVector(np.asarray(getattr(T, "coords", T), float), x.tag)
    if abs(T.q() + 1) > 1e-9:
        raise ValueError("T must be a unit timelike vector")
    y = exp_geodesic(x, T, s)
    return dual(x).contains(y.coords)


def angle_equals_distance(y1: ModelPoint, y2: ModelPoint) -> tuple[float, float]:
    """(angle between dual hyperplanes, distance between the points)."""
    if y1.tag.kind is not Kind.HYPERBOLIC or y1.tag != y2.tag:
        raise ValueError("both points must lie in the same hyperbolic space")
    _, dist = geodesic_distance(y1, y2)
    h1, h2 = dual(y1), dual(y2)
    sg = h1.tag.signs
    n1, n2 = h1.normal.coords, h2.normal.coords
    # boost parameter between the two timelike normals
    c = inner(sg, n1, n2)
    r = n2 + c * n1
    angle = float(np.arcsinh(np.sqrt(abs(inner(sg, r, r)))))
    return angle, float(dist)


@dataclass
class DualComplex:
    vertices: list
    edge_lengths: np.ndarray
    face_span: np.ndarray
    face_signature: tuple[int, int]
    degenerate: bool

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.vertices), len(self.edge_lengths), 1


def dual_complex(hd: HippedData) -> DualComplex:
    if not convexity(hd):
        raise ValueError("dual complex needs a convex hipped hypersurface")
    tag = hd.tag if hd.space == "ads" else de_sitter(hd.d + 1)
    verts = [ModelPoint(face_normal(hd, i), tag) for i in range(hd.k)]
    k = len(verts)
    lengths = np.empty(k)
    for i in range(k):
        a, b = verts[i - 1], verts[i]
        if np.abs(a.coords - b.coords).max() <= 1e-12:
            lengths[i] = 0.0
            continue
        if hd.space == "hyp":
            c = form_eval(a, b)
            r = b.coords - c * a.coords
            lengths[i] = np.arctan2(np.sqrt(abs(inner(tag.signs, r, r))), c)
        else:
            lengths[i] = geodesic_distance(a, b)[1]
    P = np.array([v.coords for v in verts])
    degenerate = bool(np.abs(P - P[0]).max() <= 1e-12)
    sig = (2, 1) if hd.space == "ads" else (3, 0)
    return DualComplex(verts, lengths, hd.link.copy(), sig, degenerate)
