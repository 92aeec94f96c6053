"""Labelled polygons on S^2 and dS^2.

Frames at a vertex are stored as columns ``(v, u+, w)``.  On the sphere
``w = v x u+``; on de Sitter space ``w = v [x] u+`` with the Lorentzian cross
product characterised by ``<a [x] b, c> = det(a, b, c)``.  That ``w`` is
past-pointing whenever the outgoing edge is positive, so the future normal
of an edge is ``-w``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .forms import (DESITTER2, SPHERE2, QUADRIC_TOL, AmbientVector, Kind,
                    ModelPoint, SpaceTag, exp_geodesic, inner)

ARC_TOL = 1e-9
RANK_CUTOFF = 1e-7
ETA = np.diag([1.0, 1.0, -1.0])


def _check_model(model: SpaceTag):
    if model.kind not in (Kind.SPHERE2, Kind.DESITTER2):
        raise ValueError(f"polygons live on sphere or desitter, not {model}")


def gram(model: SpaceTag) -> np.ndarray:
    return np.eye(3) if model.kind is Kind.SPHERE2 else ETA


def _cross3(a, b) -> np.ndarray:
    # np.cross carries a lot of overhead for single 3-vectors
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]])


def cross(model: SpaceTag, a, b) -> np.ndarray:
    c = _cross3(a, b)
    return c if model.kind is Kind.SPHERE2 else ETA @ c


@dataclass(frozen=True, eq=False)
class Polygon:
    model: SpaceTag
    vertices: np.ndarray

    def __post_init__(self):
        _check_model(self.model)
        V = np.array(self.vertices, dtype=float)
        if V.ndim != 2 or V.shape[1] != 3:
            raise ValueError("vertices must be a k x 3 array")
        if V.shape[0] < 3:
            raise ValueError("a polygon needs at least 3 vertices")
        q = np.einsum("ij,jk,ik->i", V, gram(self.model), V)
        bad = np.flatnonzero(np.abs(q - 1.0) > QUADRIC_TOL)
        if bad.size:
            raise ValueError(f"vertex {bad[0]} is off the model (q = {q[bad[0]]:.3e})")
        V.setflags(write=False)
        object.__setattr__(self, "vertices", V)

    @property
    def k(self) -> int:
        return self.vertices.shape[0]

    def points(self) -> list[ModelPoint]:
        return [ModelPoint(v, self.model) for v in self.vertices]

    def ip(self, a, b) -> float:
        return float(a @ gram(self.model) @ b)


@dataclass(frozen=True)
class VertexFrame:
    v: np.ndarray
    u_plus: np.ndarray
    u_minus: np.ndarray
    w: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.column_stack([self.v, self.u_plus, self.w])


@dataclass(frozen=True)
class PolygonInvariants:
    """Side lengths, turning angles and frames of a polygon.

    ``angles`` are the definitional turning angles (zero when the corner
    is aligned).  For the sphere ``interior_angles`` reports ``pi - |theta|``,
    the convention in which the regular family runs over ((1-2/k)pi, pi].
    """

    model: SpaceTag
    lengths: np.ndarray
    angles: np.ndarray
    frames: list[VertexFrame] = field(repr=False)

    @property
    def interior_angles(self) -> np.ndarray:
        if self.model.kind is not Kind.SPHERE2:
            raise ValueError("interior angles are only defined on the sphere")
        return np.pi - np.abs(self.angles)


def _tangent(model, a, b):
    """Unit tangent at ``a`` towards ``b`` and the distance between them."""
    c = float(a @ gram(model) @ b)
    l = float(np.arccos(np.clip(c, -1.0, 1.0)))
    return (b - c * a) / np.sin(l), l


def _crossing_candidates(model, a, b, c, d):
    n = _cross3(_cross3(a, b), _cross3(c, d))
    nn = np.linalg.norm(n)
    scale = np.linalg.norm(a) * np.linalg.norm(b) * np.linalg.norm(c) * np.linalg.norm(d)
    if nn <= 1e-12 * scale:
        return None
    q = float(n @ gram(model) @ n)
    if q <= 0:
        return []
    n = n / np.sqrt(q)
    return [n, -n]


def _arc_coeffs(x, a, b):
    """Coefficients of x in span(a, b) by Cramer's rule, or None off the span."""
    n = _cross3(a, b)
    nn = n @ n
    if nn == 0:
        return None
    coef = np.array([_cross3(x, b) @ n, _cross3(a, x) @ n]) / nn
    if np.linalg.norm(coef[0] * a + coef[1] * b - x) > 1e-8 * max(1.0, np.linalg.norm(x)):
        return None
    return coef


def _in_arc(x, a, b, closed: bool, tol: float = ARC_TOL) -> bool:
    coef = _arc_coeffs(x, a, b)
    if coef is None:
        return False
    if closed:
        return bool(np.all(coef >= -tol))
    return bool(np.all(coef > tol))


def _midpoint(model, a, b):
    m = a + b
    return m / np.sqrt(float(m @ gram(model) @ m))


def edges_cross(model: SpaceTag, a, b, c, d) -> bool:
    """True when the open arc [a,b] meets the closed arc [c,d]."""
    cands = _crossing_candidates(model, a, b, c, d)
    if cands is None:
        if _in_arc(_midpoint(model, a, b), c, d, closed=True):
            return True
        return any(_in_arc(x, a, b, closed=False) for x in (c, d))
    return any(_in_arc(x, a, b, closed=False) and _in_arc(x, c, d, closed=True)
               for x in cands)


def validate(p: Polygon) -> list[str]:
    model, V, k = p.model, p.vertices, p.k
    G = gram(model)
    out: list[str] = []
    for i in range(k):
        for j in range(i):
            if np.linalg.norm(V[i] - V[j]) <= 1e-9:
                out.append(f"duplicate vertices {j} and {i}")
    edge_ok = []
    for i in range(k):
        a, b = V[i], V[(i + 1) % k]
        c = float(a @ G @ b)
        ok = -1 + QUADRIC_TOL < c < 1 - QUADRIC_TOL
        edge_ok.append(ok)
        if not ok:
            out.append(f"edge {i}: length out of (0,pi)")
            continue
        if model.kind is Kind.DESITTER2:
            u, _ = _tangent(model, a, b)
            if cross(model, a, u)[2] >= 0:
                out.append(f"edge {i}: not positive")
    for i in range(k):
        for j in range(k):
            if i == j or not (edge_ok[i] and edge_ok[j]):
                continue
            if edges_cross(model, V[i], V[(i + 1) % k], V[j], V[(j + 1) % k]):
                out.append(f"crossing between edges {i} and {j}")
    return out


def invariants(p: Polygon) -> PolygonInvariants:
    errs = validate(p)
    if errs:
        raise ValueError("invalid polygon: " + "; ".join(errs))
    model, V, k = p.model, p.vertices, p.k
    G = gram(model)
    lengths = np.empty(k)
    uplus = np.empty((k, 3))
    uminus = np.empty((k, 3))
    for i in range(k):
        uplus[i], lengths[i] = _tangent(model, V[i], V[(i + 1) % k])
        uminus[i], _ = _tangent(model, V[i], V[i - 1])
    frames = []
    angles = np.empty(k)
    for i in range(k):
        w = cross(model, V[i], uplus[i])
        frames.append(VertexFrame(V[i], uplus[i], uminus[i], w))
        back = -uminus[i]
        if model.kind is Kind.SPHERE2:
            angles[i] = np.arctan2(back @ w, back @ uplus[i])
        else:
            if back @ G @ uplus[i] < 1 - 1e-12:
                raise ValueError(f"vertex {i}: not a spacelike corner")
            angles[i] = np.arcsinh(uminus[i] @ G @ w)
    return PolygonInvariants(model, lengths, angles, frames)


def is_convex(inv: PolygonInvariants) -> bool:
    return bool(np.all(np.asarray(inv.angles) >= -1e-10))


def rot(l: float) -> np.ndarray:
    c, s = np.cos(l), np.sin(l)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def bend(model: SpaceTag, theta: float) -> np.ndarray:
    """Corner matrix: turns the arrival frame into the departure frame."""
    if model.kind is Kind.SPHERE2:
        c, s = np.cos(theta), np.sin(theta)
        return np.array([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, -s, c]])
    c, s = np.cosh(theta), np.sinh(theta)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, -s, c]])


def _check_lengths(lengths):
    l = np.asarray(lengths, float)
    if np.any(l <= 0) or np.any(l >= np.pi):
        raise ValueError("lengths must lie in (0, pi)")
    return l


def canonical_frame(model: SpaceTag) -> np.ndarray:
    """Frame (e1, e2, e1 x e2) at e1; in de Sitter space this w is -e3."""
    _check_model(model)
    return gram(model).copy()


def develop_frames(model: SpaceTag, lengths, angles, F0=None) -> list[np.ndarray]:
    """Frames F_0..F_k of the discrete development."""
    _check_model(model)
    l = _check_lengths(lengths)
    th = np.asarray(angles, float)
    if l.shape != th.shape:
        raise ValueError("lengths and angles must have the same length")
    k = l.shape[0]
    F = canonical_frame(model) if F0 is None else np.asarray(F0, float)
    frames = [F]
    for i in range(k):
        F = F @ rot(l[i]) @ bend(model, th[(i + 1) % k])
        frames.append(F)
    return frames


def develop(model: SpaceTag, lengths, angles, F0=None):
    """Return (vertices, closure, residual) of the discrete development."""
    frames = develop_frames(model, lengths, angles, F0)
    F0 = frames[0]
    closure = np.linalg.solve(F0, frames[-1])
    verts = np.array([F[:, 0] for F in frames[:-1]])
    return verts, closure, float(np.linalg.norm(closure - np.eye(3)))


def frame_of(inv: PolygonInvariants, i: int = 0) -> np.ndarray:
    return inv.frames[i].matrix()


def moduli_tangent(p: Polygon):
    """Constraint matrix A (3 x 2k), kernel basis and kernel dimension.

    Unknowns are ordered (theta_dot_1..theta_dot_k, l_dot_1..l_dot_k).
    """
    inv = invariants(p)
    A = constraint_matrix(inv)
    basis = null_space(A)
    return A, basis, basis.shape[1]


def constraint_matrix(inv: PolygonInvariants) -> np.ndarray:
    sgn = -1.0 if inv.model.kind is Kind.SPHERE2 else 1.0
    V = np.array([f.v for f in inv.frames]).T
    W = np.array([f.w for f in inv.frames]).T
    return np.hstack([V, sgn * W])


def null_space(A: np.ndarray, cutoff: float = RANK_CUTOFF) -> np.ndarray:
    _, s, vt = np.linalg.svd(A)
    if s.size == 0 or s[0] == 0:
        return np.eye(A.shape[1])
    rank = int(np.sum(s > cutoff * s[0]))
    return vt[rank:].T.copy()


def regular_polygon(model: SpaceTag, k: int, alpha: float) -> Polygon:
    """Rotation-symmetric k-gon at height ``alpha``.

    The sphere accepts alpha in (-pi/2, pi/2); negative heights give the
    mirror polygon with positive turning angles.
    """
    _check_model(model)
    if k < 3:
        raise ValueError("k must be at least 3")
    t = 2 * np.pi * np.arange(k) / k
    if model.kind is Kind.SPHERE2:
        if not -np.pi / 2 < alpha < np.pi / 2:
            raise ValueError("sphere height must lie in (-pi/2, pi/2)")
        r, z = np.cos(alpha), np.sin(alpha)
    else:
        if alpha < 0:
            raise ValueError("de Sitter height must be non-negative")
        r, z = np.cosh(alpha), np.sinh(alpha)
        c = r * r * np.cos(2 * np.pi / k) - z * z
        if c <= -1 + 1e-9:
            raise ValueError(f"alpha = {alpha}: consecutive vertices are not space related")
    V = np.column_stack([r * np.cos(t), r * np.sin(t), np.full(k, z)])
    return Polygon(model, V)


def regular_length(model: SpaceTag, k: int, alpha: float) -> float:
    c2 = np.cos(2 * np.pi / k)
    if model.kind is Kind.SPHERE2:
        c = np.cos(alpha) ** 2 * c2 + np.sin(alpha) ** 2
    else:
        c = np.cosh(alpha) ** 2 * c2 - np.sinh(alpha) ** 2
    if not -1 < c < 1:
        raise ValueError(f"alpha = {alpha}: no regular {k}-gon at this height")
    return float(np.arccos(c))


def central_symmetry_defect(p: Polygon) -> float:
    if p.k % 2:
        raise ValueError("central symmetry needs an even number of vertices")
    inv = invariants(p)
    h = p.k // 2
    dl = np.abs(inv.lengths[:h] - inv.lengths[h:])
    dt = np.abs(inv.angles[:h] - inv.angles[h:])
    return float(max(dl.max(), dt.max()))


def perturb_vertex(p: Polygon, i: int, xi, h: float) -> Polygon:
    xi = np.asarray(xi, float)
    v = p.vertices[i]
    if abs(p.ip(v, xi)) > 1e-9:
        raise ValueError("perturbation must be tangent at the vertex")
    V = p.vertices.copy()
    q = p.ip(xi, xi)
    if h != 0 and np.any(xi):
        base = ModelPoint(v, p.model)
        if abs(q) <= QUADRIC_TOL:
            V[i] = exp_geodesic(base, AmbientVector(xi, p.model), h).coords
        else:
            n = np.sqrt(abs(q))
            V[i] = exp_geodesic(base, AmbientVector(xi / n, p.model), h * n).coords
    out = Polygon(p.model, V)
    errs = validate(out)
    if errs:
        raise ValueError("perturbed polygon is invalid: " + "; ".join(errs))
    return out


def polygon_from_invariants(model: SpaceTag, lengths, angles, F0=None) -> Polygon:
    verts, _, _ = develop(model, lengths, angles, F0)
    return Polygon(model, verts)


__all__ = [
    "Polygon", "VertexFrame", "PolygonInvariants", "validate", "invariants",
    "is_convex", "develop", "develop_frames", "moduli_tangent", "regular_polygon",
    "regular_length", "central_symmetry_defect", "perturb_vertex", "cross", "gram",
    "rot", "bend", "null_space", "constraint_matrix", "SPHERE2", "DESITTER2",
    "polygon_from_invariants", "canonical_frame", "edges_cross", "frame_of",
]
