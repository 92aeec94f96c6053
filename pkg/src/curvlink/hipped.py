"""Hipped hypersurfaces in AdS^{d+1} and H^{d+1}.

A hipped hypersurface is the cone, taken from a codimension-two stem, over
a link polygon.  The canonical placement used here is

* AdS^{d+1}: z = e_{d+1}, stem = e_1..e_{d-2}, link = (e_{d-1}, e_d, e_{d+2});
* H^{d+1}:   z = e_{d+2}, stem = e_1..e_{d-2}, link = (e_{d-1}, e_d, e_{d+1}).

Link coordinates are therefore literally the coordinates of the polygon
model (dS^2 for AdS, S^2 for H), which makes round trips exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .forms import (Kind, ModelPoint, NullRay, SpaceTag, anti_de_sitter,
                    hyperbolic, spacelike_margin)
from .polygons import (Polygon, cross, gram, invariants, is_convex,
                       validate)

SPACES = ("ads", "hyp")


@dataclass(frozen=True, eq=False)
class HippedData:
    space: str
    d: int
    polygon: Polygon
    z: np.ndarray = field(repr=False)
    stem: np.ndarray = field(repr=False)   # (d-2) x (d+2)
    link: np.ndarray = field(repr=False)   # (d+2) x 3, columns are link basis

    @property
    def tag(self) -> SpaceTag:
        return anti_de_sitter(self.d + 1) if self.space == "ads" else hyperbolic(self.d + 1)

    @property
    def signs(self) -> np.ndarray:
        return self.tag.signs

    @property
    def k(self) -> int:
        return self.polygon.k

    def ip(self, a, b) -> float:
        return float(np.sum(self.signs * a * b))

    def embedded_vertices(self) -> np.ndarray:
        return self.polygon.vertices @ self.link.T

    def embed(self, x) -> np.ndarray:
        """Map link coordinates into the ambient space."""
        return self.link @ np.asarray(x, float)


def build(space: str, d: int, polygon: Polygon) -> HippedData:
    if space not in SPACES:
        raise ValueError(f"space must be one of {SPACES}")
    if d < 2:
        raise ValueError("d must be at least 2")
    want = Kind.DESITTER2 if space == "ads" else Kind.SPHERE2
    if polygon.model.kind is not want:
        raise ValueError(f"{space} needs a {'desitter' if space == 'ads' else 'sphere'} polygon")
    errs = validate(polygon)
    if errs:
        raise ValueError("invalid polygon: " + "; ".join(errs))
    n = d + 2
    I = np.eye(n)
    if space == "ads":
        z = I[d]
        link = I[:, [d - 2, d - 1, d + 1]]
    else:
        z = I[d + 1]
        link = I[:, [d - 2, d - 1, d]]
    stem = I[: d - 2].copy()
    return HippedData(space, d, polygon, z, stem, link)


def _edge_range(hd: HippedData, i: int):
    k = hd.k
    if not 0 <= i < k:
        raise ValueError(f"wedge index {i} out of range")
    V = hd.polygon.vertices
    a, b = V[i], V[(i + 1) % k]
    G = gram(hd.polygon.model)
    c = float(a @ G @ b)
    l = float(np.arccos(np.clip(c, -1, 1)))
    u = (b - c * a) / np.sin(l)
    return a, u, l


def tangent_vector(hd: HippedData, i: int, s: float, u_coords, t: float) -> np.ndarray:
    a, u, l = _edge_range(hd, i)
    if not -1e-12 <= s <= l + 1e-12:
        raise ValueError(f"s = {s} outside [0, {l}]")
    if t < 0:
        raise ValueError("t must be non-negative")
    uc = np.asarray(u_coords, float).reshape(-1)
    if uc.shape[0] != hd.d - 2:
        raise ValueError(f"need {hd.d - 2} stem coordinates")
    w = np.cos(s) * a + np.sin(s) * u
    return uc @ hd.stem + t * hd.embed(w)


def _exp_z(hd: HippedData, xi: np.ndarray) -> np.ndarray:
    r = np.sqrt(max(hd.ip(xi, xi), 0.0))
    if r == 0:
        return hd.z.copy()
    return np.cosh(r) * hd.z + np.sinh(r) / r * xi


def eval_point(hd: HippedData, i: int, s: float, u_coords=(), t: float = 0.0) -> ModelPoint:
    return ModelPoint(_exp_z(hd, tangent_vector(hd, i, s, u_coords, t)), hd.tag)


def _link_normal(hd: HippedData, i: int) -> np.ndarray:
    model = hd.polygon.model
    a, u, _ = _edge_range(hd, i)
    w = cross(model, a, u)
    return -w if hd.space == "ads" else w


def face_normal(hd: HippedData, i: int) -> np.ndarray:
    """Unit normal of the totally geodesic hyperplane supporting face i.

    AdS normals are future-pointing timelike (q = -1); hyperbolic ones are
    spacelike (q = +1) with the orientation that makes convex corners have
    positive dihedral angle.
    """
    V = hd.polygon.vertices
    k = hd.k
    if np.linalg.norm(np.cross(V[i], V[(i + 1) % k])) < 1e-12:
        raise ValueError(f"edge {i} is degenerate")
    return hd.embed(_link_normal(hd, i))


@dataclass(frozen=True)
class AngleData:
    wedge: np.ndarray
    dihedral: np.ndarray


def recover_angles(hd: HippedData) -> AngleData:
    k = hd.k
    V = hd.embedded_vertices()
    N = np.array([face_normal(hd, i) for i in range(k)])
    wedge = np.array([np.arccos(np.clip(hd.ip(V[i], V[(i + 1) % k]), -1, 1))
                      for i in range(k)])
    dihedral = np.empty(k)
    for i in range(k):
        sn = -hd.ip(N[i], V[i - 1]) / np.sin(wedge[i - 1])
        if hd.space == "ads":
            dihedral[i] = np.arcsinh(sn)
        else:
            dihedral[i] = np.arctan2(sn, hd.ip(N[i - 1], N[i]))
    return AngleData(wedge, dihedral)


def cone_angle(hd: HippedData) -> float:
    """Total angle around the stem: the perimeter of the link polygon."""
    return float(np.sum(invariants(hd.polygon).lengths))


def convexity(hd: HippedData) -> bool:
    return bool(np.all(recover_angles(hd).dihedral >= -1e-10))


# --- second fundamental form ------------------------------------------------

@dataclass
class ParamSurface:
    """Parametrised hypersurface with an optional unit normal field."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    signs: np.ndarray
    normal: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def ip(self, a, b) -> float:
        return float(np.sum(self.signs * a * b))


def second_fundamental_form_fd(surface: ParamSurface, params, T1, T2, h: float = 1e-4) -> float:
    """Central-difference value of g(D_{T1} N, T2)."""
    if surface.normal is None:
        raise ValueError("surface has no normal evaluator")
    if not 1e-6 <= h <= 1e-3:
        raise ValueError("step must lie in [1e-6, 1e-3]")
    p = np.asarray(params, float)
    T1 = np.asarray(T1, float)
    T2 = np.asarray(T2, float)
    dN = (surface.normal(p + h * T1) - surface.normal(p - h * T1)) / (2 * h)
    dX = (surface.evaluator(p + h * T2) - surface.evaluator(p - h * T2)) / (2 * h)
    return surface.ip(dN, dX)


def face_surface(hd: HippedData, i: int) -> ParamSurface:
    """Face i parametrised by (s, t, u_1..u_{d-2})."""
    n = face_normal(hd, i)

    def ev(p):
        return _exp_z(hd, tangent_vector(hd, i, p[0], p[2:], p[1]))

    return ParamSurface(ev, hd.signs, lambda p: n)


# --- spacelike check ------------------------------------------------------

def _unfolded(hd: HippedData, phi: float, u, t: float) -> np.ndarray:
    return np.concatenate([u, [t * np.cos(phi), t * np.sin(phi)]])


def _hyp_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Distance in H^d between exp_o(a) and exp_o(b) for tangent vectors at o."""
    ra, rb = np.linalg.norm(a), np.linalg.norm(b)
    pa = np.concatenate([np.sinh(ra) * (a / ra if ra else a), [np.cosh(ra)]])
    pb = np.concatenate([np.sinh(rb) * (b / rb if rb else b), [np.cosh(rb)]])
    c = pa[-1] * pb[-1] - pa[:-1] @ pb[:-1]
    r = pb - c * pa
    rr = abs(r[:-1] @ r[:-1] - r[-1] ** 2)
    return float(np.arcsinh(np.sqrt(rr)))


@dataclass
class SpacelikeReport:
    margin: float
    n_points: int
    wedges: tuple


def spacelike_check(hd: HippedData, n_samples: int = 40, seed: int = 0,
                    radius: float = 0.3, wedges: Sequence[int] | None = None) -> SpacelikeReport:
    """Sampled spacelike margin near the stem.

    Points are drawn on both sides of one seam Y_i (or from the wedges
    given explicitly) and intrinsic distances come from unfolding those
    faces into a single copy of H^d.
    """
    if hd.space != "ads":
        raise ValueError("spacelike check only applies to AdS")
    if n_samples < 2:
        raise ValueError("need at least two samples")
    ang = recover_angles(hd)
    k = hd.k
    rng = np.random.default_rng(seed)
    if wedges is None:
        # a window of half-width < pi/2 around one seam, so the unfolded
        # sector stays below pi whatever the wedge angles are
        i0 = int(rng.integers(k))
        wedges = (i0, (i0 + 1) % k)
        a = np.pi / 2 - 0.05
        windows = [(max(0.0, ang.wedge[i0] - a), ang.wedge[i0]), (0.0, min(a, ang.wedge[wedges[1]]))]
    else:
        wedges = tuple(int(w) for w in wedges)
        windows = [(0.0, ang.wedge[w]) for w in wedges]
    offsets = np.concatenate([[0.0], np.cumsum([ang.wedge[w] for w in wedges])])
    if windows[-1][1] + offsets[-2] - windows[0][0] >= np.pi and len(wedges) > 1:
        raise ValueError("selected wedges span an angle of at least pi")
    pts, tangents = [], []
    for _ in range(n_samples):
        j = int(rng.integers(len(wedges)))
        w = wedges[j]
        s = float(rng.uniform(*windows[j]))
        t = float(rng.uniform(0.05, 1.0)) * radius
        u = rng.uniform(-radius, radius, hd.d - 2)
        pts.append(((w, s, t, *u), eval_point(hd, w, s, u, t)))
        tangents.append(_unfolded(hd, offsets[j] + s, u, t))
    n = len(pts)
    D = np.zeros((n, n))
    for a in range(n):
        for b in range(a):
            D[a, b] = D[b, a] = _hyp_distance(tangents[a], tangents[b])
    return SpacelikeReport(spacelike_margin(pts, D), n, wedges)


# --- meshing ----------------------------------------------------------------

@dataclass
class Mesh:
    vertices: np.ndarray
    faces: list
    wedge: list
    keys: list = field(repr=False, default_factory=list)


def sample_mesh(hd: HippedData, t_max: float, stem_box: float = 0.5, res: int = 8) -> Mesh:
    """Sample every wedge on a (s, t, u) grid.

    Quads live on (s, t) slices; the row t = 0 collapses onto the stem
    and produces triangles.  Vertices on the stem and on the seams Y_i are
    keyed by grid indices so that neighbouring wedges share them.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if res < 2:
        raise ValueError("res must be at least 2")
    k, m = hd.k, hd.d - 2
    ang = recover_angles(hd)
    ts = np.linspace(0, t_max, res)
    ugrid = np.linspace(-stem_box, stem_box, res) if m else np.zeros(0)
    ucombos = list(np.ndindex(*([res] * m))) if m else [()]
    index: dict = {}
    verts: list = []
    keys: list = []

    def vid(i, si, ti, uidx):
        if ti == 0:
            key = ("Z", uidx)
        elif si == 0:
            key = ("Y", i, ti, uidx)
        elif si == res - 1:
            key = ("Y", (i + 1) % k, ti, uidx)
        else:
            key = ("X", i, si, ti, uidx)
        if key not in index:
            s = ang.wedge[i] * si / (res - 1)
            u = ugrid[list(uidx)] if m else np.zeros(0)
            index[key] = len(verts)
            verts.append(_exp_z(hd, tangent_vector(hd, i, min(s, ang.wedge[i]), u, ts[ti])))
            keys.append(key)
        return index[key]

    faces, wedge = [], []
    for i in range(k):
        for uidx in ucombos:
            for ti in range(res - 1):
                for si in range(res - 1):
                    a = vid(i, si, ti, uidx)
                    b = vid(i, si + 1, ti, uidx)
                    c = vid(i, si + 1, ti + 1, uidx)
                    e = vid(i, si, ti + 1, uidx)
                    face = (a, c, e) if a == b else (a, b, c, e)
                    faces.append(face)
                    wedge.append(i)
    return Mesh(np.array(verts), faces, wedge, keys)


def concave_development_ideal(hd: HippedData, i: int, samples) -> list[NullRay]:
    if hd.space != "hyp":
        raise ValueError("ideal development is defined for hyperbolic builds")
    if not is_convex(invariants(hd.polygon)):
        raise ValueError("hipped hypersurface is not convex")
    n = face_normal(hd, i)
    out = []
    for p in samples:
        x = np.asarray(getattr(p, "coords", p), float)
        if abs(hd.ip(x, n)) > 1e-9:
            raise ValueError("sample is not on the face")
        out.append(NullRay(x + n, hd.tag))
    return out
