"""Form-preserving matrices: link embeddings, folds, loop holonomy, bending."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .forms import DESITTER2, Kind
from .hipped import HippedData
from .polygons import (Polygon, bend, canonical_frame, gram, invariants, rot,
                       regular_polygon)

FORM_TOL = 1e-9


def form_matrix(signature: tuple[int, int]) -> np.ndarray:
    p, q = signature
    return np.diag([1.0] * p + [-1.0] * q)


@dataclass(frozen=True, eq=False)
class IsometryMatrix:
    entries: np.ndarray
    signature: tuple[int, int]
    orientation_preserving: bool = False

    def __post_init__(self):
        M = np.array(self.entries, dtype=float)
        n = sum(self.signature)
        if M.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got {M.shape}")
        Q = form_matrix(self.signature)
        err = np.abs(M.T @ Q @ M - Q).max()
        if err > FORM_TOL * max(1.0, np.abs(M).max() ** 2):
            raise ValueError(f"matrix does not preserve the form (error {err:.2e})")
        if self.orientation_preserving and np.linalg.det(M) < 0:
            raise ValueError("matrix reverses orientation")
        M.setflags(write=False)
        object.__setattr__(self, "entries", M)

    def __matmul__(self, other: IsometryMatrix) -> IsometryMatrix:
        if self.signature != other.signature:
            raise ValueError("signature mismatch")
        return IsometryMatrix(self.entries @ other.entries, self.signature)

    @property
    def Q(self) -> np.ndarray:
        return form_matrix(self.signature)

    def inverse(self) -> IsometryMatrix:
        Q = self.Q
        return IsometryMatrix(Q @ self.entries.T @ Q, self.signature)


def _big_signature(hd: HippedData) -> tuple[int, int]:
    return (hd.d, 2) if hd.space == "ads" else (hd.d + 1, 1)


def link_embed(hd: HippedData, m) -> IsometryMatrix:
    """Extend a link isometry by the identity on the complement of the link."""
    m = np.asarray(m, float)
    eta = gram(hd.polygon.model)
    if m.shape != (3, 3) or np.abs(m.T @ eta @ m - eta).max() > FORM_TOL * max(1.0, np.abs(m).max() ** 2):
        raise ValueError("link matrix does not preserve the link form")
    L = hd.link
    Q = np.diag(hd.signs)
    big = np.eye(L.shape[0]) + L @ (m - np.eye(3)) @ eta @ L.T @ Q
    return IsometryMatrix(big, _big_signature(hd))


def _frames(hd: HippedData, angles=None):
    """Departure frames F_0..F_k and arrival frames A_1..A_k (link coords).

    ``angles`` overrides the turning angles; the development then starts
    from the actual frame at v_0 and follows the modified data.
    """
    inv = invariants(hd.polygon)
    th = inv.angles if angles is None else np.asarray(angles, float)
    k = hd.k
    F = [inv.frames[0].matrix()]
    A = []
    for i in range(k):
        a = F[-1] @ rot(inv.lengths[i])
        A.append(a)
        F.append(a @ bend(hd.polygon.model, th[(i + 1) % k]))
    return inv, F, A


def fold_link(hd: HippedData, i: int, theta: float | None = None) -> np.ndarray:
    """Link isometry fixing v_i that turns the arrival frame into the departure one."""
    inv = invariants(hd.polygon)
    k = hd.k
    fr, prev = inv.frames[i], inv.frames[i - 1]
    G = np.column_stack([fr.v, -fr.u_minus, prev.w])
    if theta is None:
        D = fr.matrix()
    else:
        D = G @ bend(hd.polygon.model, theta)
    return D @ np.linalg.inv(G)


def fold_at(hd: HippedData, i: int, theta: float | None = None) -> IsometryMatrix:
    return link_embed(hd, fold_link(hd, i % hd.k, theta))


def edge_transport(hd: HippedData, i: int) -> IsometryMatrix:
    inv = invariants(hd.polygon)
    F = inv.frames[i].matrix()
    return link_embed(hd, F @ rot(inv.lengths[i]) @ np.linalg.inv(F))


def loop_factors(hd: HippedData, angles=None) -> list[IsometryMatrix]:
    """Transports and folds around the stem, in the order they are applied."""
    _, F, A = _frames(hd, angles)
    out = []
    for i in range(hd.k):
        out.append(link_embed(hd, A[i] @ np.linalg.inv(F[i])))
        out.append(link_embed(hd, F[i + 1] @ np.linalg.inv(A[i])))
    return out


def loop_holonomy(hd: HippedData, angles=None) -> tuple[IsometryMatrix, float]:
    _, F, _ = _frames(hd, angles)
    H = link_embed(hd, F[-1] @ np.linalg.inv(F[0]))
    return H, float(np.linalg.norm(H.entries - np.eye(H.entries.shape[0])))


def product(mats: Sequence[IsometryMatrix]) -> IsometryMatrix:
    """Composition mats[-1] @ ... @ mats[0] (first element applied first)."""
    out = mats[0]
    for m in mats[1:]:
        out = m @ out
    return out


# --- toy dihedral model -----------------------------------------------------

def _reflection(n_vec: np.ndarray, Q: np.ndarray) -> np.ndarray:
    qn = n_vec @ Q @ n_vec
    return np.eye(len(n_vec)) - 2 * np.outer(n_vec, n_vec @ Q) / qn


def dihedral_model(d: int, n: int) -> tuple[IsometryMatrix, IsometryMatrix]:
    """Reflections in O(d,1) whose mirrors meet at angle pi/n."""
    if n < 2 or d < 2:
        raise ValueError("need n >= 2 and d >= 2")
    sig = (d, 1)
    Q = form_matrix(sig)
    e = np.eye(d + 1)
    s1 = _reflection(e[d - 1], Q)
    s2 = _reflection(np.cos(np.pi / n) * e[d - 1] + np.sin(np.pi / n) * e[d - 2], Q)
    return IsometryMatrix(s1, sig), IsometryMatrix(s2, sig)


@dataclass(frozen=True)
class GluingSchema:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 2 or self.k < 2:
            raise ValueError("need n >= 2 and k >= 2")

    @property
    def wedge_angle(self) -> float:
        return np.pi / self.n

    @property
    def wedges(self) -> int:
        return 2 * self.k

    @property
    def a(self) -> float:
        return self.k / self.n

    def polygon(self) -> Polygon:
        """Regular de Sitter 2k-gon whose sides all have length pi/n."""
        c = np.cos(np.pi / self.k)
        cl = np.cos(self.wedge_angle)
        ch2 = (1 - cl) / (1 - c)
        if ch2 < 1 - 1e-15:
            raise ValueError("wedge angle pi/n is shorter than the geodesic polygon side")
        return regular_polygon(DESITTER2, self.wedges, float(np.arccosh(np.sqrt(max(ch2, 1.0)))))


# --- bending ----------------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    label: str
    matrix: IsometryMatrix
    mask: bool = False
    hypersurface: bool = False


@dataclass(frozen=True)
class Representation:
    signature: tuple[int, int]
    generators: tuple

    def __post_init__(self):
        for g in self.generators:
            if g.matrix.signature != self.signature:
                raise ValueError(f"generator {g.label} has the wrong signature")

    def matrices(self) -> list[np.ndarray]:
        return [g.matrix.entries for g in self.generators]


TARGETS = ("hyp", "ads")


def _extra_index(d: int, target: str) -> int:
    return d if target == "hyp" else d + 1


def embed_representation(rep: Representation, target: str) -> Representation:
    """Block-embed an SO(d,1) representation into SO(d+1,1) or SO(d,2).

    The extra coordinate is spacelike e_{d+1} (hyperbolic target) or the
    second timelike e_{d+2} (AdS target, after the original timelike one).
    """
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}")
    p, q = rep.signature
    if q != 1:
        raise ValueError("source representation must live in O(d,1)")
    d = p
    sig = (d + 1, 1) if target == "hyp" else (d, 2)
    x = _extra_index(d, target)
    old = [i for i in range(d + 2) if i != x]
    gens = []
    for g in rep.generators:
        M = np.eye(d + 2)
        M[np.ix_(old, old)] = g.matrix.entries
        gens.append(replace(g, matrix=IsometryMatrix(M, sig)))
    return Representation(sig, tuple(gens))


def bending_matrix(d: int, t: float, target: str) -> np.ndarray:
    """r_t: rotation in (e_d, e_{d+1}) or boost in (e_d, e_{d+2})."""
    r = np.eye(d + 2)
    a, b = d - 1, _extra_index(d, target)
    if target == "hyp":
        c, s = np.cos(t), np.sin(t)
        r[a, a], r[a, b], r[b, a], r[b, b] = c, -s, s, c
    elif target == "ads":
        c, s = np.cosh(t), np.sinh(t)
        r[a, a], r[a, b], r[b, a], r[b, b] = c, s, s, c
    else:
        raise ValueError(f"target must be one of {TARGETS}")
    return r


def _target_of(signature) -> tuple[int, str]:
    p, q = signature
    if q == 1:
        return p - 1, "hyp"
    if q == 2:
        return p, "ads"
    raise ValueError(f"unsupported signature {signature}")


def bend_representation(rep: Representation, t: float, target: str | None = None) -> Representation:
    """Conjugate the masked generators by r_t, leave the others alone."""
    d, tgt = _target_of(rep.signature)
    if target is not None and target != tgt:
        raise ValueError(f"representation signature {rep.signature} does not match {target}")
    x = _extra_index(d, tgt)
    ex, ed = np.eye(d + 2)[x], np.eye(d + 2)[d - 1]
    for g in rep.generators:
        M = g.matrix.entries
        if np.abs(M @ ex - ex).max() > FORM_TOL or np.abs(ex @ M - ex).max() > FORM_TOL:
            raise ValueError(f"generator {g.label} moves the extra coordinate")
        if g.hypersurface and np.abs(M @ ed - ed).max() > FORM_TOL:
            raise ValueError(f"hypersurface generator {g.label} does not fix e_d")
    r = bending_matrix(d, t, tgt)
    rinv = bending_matrix(d, -t, tgt)
    gens = tuple(replace(g, matrix=IsometryMatrix(r @ g.matrix.entries @ rinv, rep.signature))
                 if g.mask else g for g in rep.generators)
    return Representation(rep.signature, gens)
