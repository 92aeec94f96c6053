"""Signed bilinear forms, model quadrics and causality.

Every model space lives in a real vector space with a diagonal quadratic
form.  Coordinate conventions (1-based, as in the docstrings below):

* ``Sphere2``: R^3, all signs +, target +1.
* ``DeSitter2``: R^{2,1}, signs (+, +, -), target +1; future is +x_3.
* ``Hyperbolic(m)``: R^{m,1}, last sign -, target -1, last coordinate > 0.
* ``DeSitter(m)``: same form as ``Hyperbolic(m)``, target +1.
* ``AntiDeSitter(m)``: R^{m-1,2}, last two signs -, target -1; time
  orientation is the positive rotation in the last coordinate plane.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

QUADRIC_TOL = 1e-9
LIGHT_TOL = 1e-12


class Kind(enum.Enum):
    SPHERE2 = "sphere"
    DESITTER2 = "desitter"
    HYPERBOLIC = "hyperbolic"
    DESITTER = "desitter_m"
    ANTI_DE_SITTER = "ads"


@dataclass(frozen=True)
class SpaceTag:
    """Model space identifier; fixes the ambient form and target norm."""

    kind: Kind
    m: int = 2

    def __post_init__(self):
        if self.kind in (Kind.SPHERE2, Kind.DESITTER2) and self.m != 2:
            raise ValueError(f"{self.kind.value} is two-dimensional")
        if self.m < 1 or (self.kind is Kind.ANTI_DE_SITTER and self.m < 2):
            raise ValueError(f"invalid dimension {self.m} for {self.kind.value}")

    @property
    def dim(self) -> int:
        """Ambient dimension."""
        return 3 if self.kind in (Kind.SPHERE2, Kind.DESITTER2) else self.m + 1

    @property
    def signs(self) -> np.ndarray:
        n = self.dim
        s = np.ones(n)
        if self.kind is Kind.SPHERE2:
            return s
        s[-1] = -1.0
        if self.kind is Kind.ANTI_DE_SITTER:
            s[-2] = -1.0
        return s

    @property
    def target(self) -> float:
        if self.kind in (Kind.HYPERBOLIC, Kind.ANTI_DE_SITTER):
            return -1.0
        return 1.0

    @property
    def gram(self) -> np.ndarray:
        return np.diag(self.signs)

    def __str__(self):
        if self.kind in (Kind.SPHERE2, Kind.DESITTER2):
            return self.kind.value
        return f"{self.kind.value}({self.m})"


SPHERE2 = SpaceTag(Kind.SPHERE2)
DESITTER2 = SpaceTag(Kind.DESITTER2)


def hyperbolic(m: int) -> SpaceTag:
    return SpaceTag(Kind.HYPERBOLIC, m)


def de_sitter(m: int) -> SpaceTag:
    return SpaceTag(Kind.DESITTER, m)


def anti_de_sitter(m: int) -> SpaceTag:
    return SpaceTag(Kind.ANTI_DE_SITTER, m)


def quadric_tol(x) -> float:
    """Membership tolerance; scaled by |x|^2 since q itself is rounded at that scale."""
    x = np.asarray(x, float)
    return QUADRIC_TOL * max(1.0, float(x @ x))


def inner(signs: np.ndarray, a, b) -> float:
    """Raw bilinear form on coordinate arrays."""
    return float(np.sum(signs * np.asarray(a, float) * np.asarray(b, float)))


class TagMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AmbientVector:
    coords: np.ndarray
    tag: SpaceTag

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.ndim != 1 or c.shape[0] != self.tag.dim:
            raise ValueError(
                f"{self.tag} expects {self.tag.dim} coordinates, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def q(self) -> float:
        return inner(self.tag.signs, self.coords, self.coords)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)

    def __repr__(self):
        return f"{type(self).__name__}({list(self.coords)}, {self.tag})"


class ModelPoint(AmbientVector):
    """Ambient vector constrained to the model quadric of its tag."""

    def __post_init__(self):
        super().__post_init__()
        if abs(self.q() - self.tag.target) > quadric_tol(self.coords):
            raise ValueError(
                f"point not on {self.tag}: q = {self.q():.3e}, target {self.tag.target}")
        if self.tag.kind is Kind.HYPERBOLIC and self.coords[-1] <= 0:
            raise ValueError("hyperbolic point must have positive last coordinate")


class NullRay(AmbientVector):
    """Class of a null vector modulo positive scaling.

    The representative is rescaled so that its largest-magnitude
    coordinate equals +1, which makes ray equality a coordinate test.
    """

    def __post_init__(self):
        c = np.array(self.coords, dtype=float)
        if c.ndim != 1 or not np.any(c):
            raise ValueError("null ray needs a nonzero representative")
        c = c / np.abs(c).max()
        object.__setattr__(self, "coords", c)
        super().__post_init__()
        if abs(self.q()) > QUADRIC_TOL:
            raise ValueError(f"representative is not null: q = {self.q():.3e}")

    def same_ray(self, other: NullRay, tol: float = 1e-12) -> bool:
        return self.tag == other.tag and bool(
            np.max(np.abs(self.coords - other.coords)) <= tol)


class PairRelation(enum.Enum):
    SPACE = "space"
    LIGHT = "light"
    TIME = "time"
    UNRELATED = "unrelated"


class CausalType(enum.Enum):
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"
    TIMELIKE = "timelike"


def _check_same(a: AmbientVector, b: AmbientVector):
    if a.tag != b.tag:
        raise TagMismatch(f"{a.tag} vs {b.tag}")


def form_eval(a: AmbientVector, b: AmbientVector) -> float:
    _check_same(a, b)
    return inner(a.tag.signs, a.coords, b.coords)


def classify_vector(v: AmbientVector) -> CausalType:
    if not np.any(v.coords):
        raise ValueError("zero vector has no causal type")
    q = v.q()
    if abs(q) <= LIGHT_TOL:
        return CausalType.LIGHTLIKE
    return CausalType.SPACELIKE if q > 0 else CausalType.TIMELIKE


def _require(tag: SpaceTag, kind: Kind):
    if tag.kind is not kind:
        raise TagMismatch(f"expected {kind.value}, got {tag}")


def pair_relation_ads(x: ModelPoint, y: ModelPoint) -> PairRelation:
    _check_same(x, y)
    _require(x.tag, Kind.ANTI_DE_SITTER)
    c = form_eval(x, y)
    if abs(c + 1) <= QUADRIC_TOL:
        return PairRelation.LIGHT
    if c < -1:
        return PairRelation.SPACE
    if c < 1 - QUADRIC_TOL:
        return PairRelation.TIME
    return PairRelation.UNRELATED


def boundary_relation(xi: NullRay, eta: NullRay) -> str:
    """Causal relation of two points of the Einstein boundary.

    A positive product means the chosen lifts are not related at all;
    this raises instead of silently negating a representative.
    """
    _check_same(xi, eta)
    _require(xi.tag, Kind.ANTI_DE_SITTER)
    c = form_eval(xi, eta)
    if abs(c) <= QUADRIC_TOL:
        return "light"
    if c < 0:
        return "space"
    raise ValueError(
        f"<xi, eta> = {c:.3e} > 0: lifts not related, negate one representative")


def acausal_signs(x: NullRay, y: NullRay, z: NullRay) -> tuple[int, int]:
    _check_same(x, y)
    _check_same(x, z)
    M = np.vstack([x.coords, y.coords, z.coords])
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] <= 1e-10 * sv[0]:
        raise ValueError("rays span a subspace of rank < 3")
    G = M @ x.tag.gram @ M.T
    ev = np.linalg.eigvalsh(G)
    scale = np.abs(ev).max()
    npos = int(np.sum(ev > 1e-12 * scale))
    nneg = int(np.sum(ev < -1e-12 * scale))
    if (npos, nneg) != (2, 1):
        raise ValueError(f"restricted form has signature ({npos},{nneg}), not (2,1)")
    found = []
    for ey in (1, -1):
        for ez in (1, -1):
            if G[0, 1] * ey < 0 and G[0, 2] * ez < 0 and G[1, 2] * ey * ez < 0:
                found.append((ey, ez))
    if len(found) != 1:
        raise ValueError("no acausal choice of signs (some pair is light related)")
    return found[0]


def _trig_pair(tag: SpaceTag, eps: float):
    """Return (c, s) functions for a geodesic with q(direction) = eps."""
    if tag.target * eps > 0:
        return np.cos, np.sin
    return np.cosh, np.sinh


def exp_geodesic(p: ModelPoint, xi: AmbientVector, s: float) -> ModelPoint:
    _check_same(p, xi)
    if abs(form_eval(p, xi)) > QUADRIC_TOL:
        raise ValueError("direction is not tangent at p")
    q = xi.q()
    if abs(q) <= QUADRIC_TOL:
        out = p.coords + s * xi.coords
    else:
        if abs(abs(q) - 1) > QUADRIC_TOL:
            raise ValueError(f"direction must be unit or null, q = {q:.3e}")
        c, sn = _trig_pair(p.tag, np.sign(q))
        out = c(s) * p.coords + sn(s) * xi.coords
    return ModelPoint(out, p.tag)


def _acosh_safe(c: float) -> float:
    return float(np.arccosh(max(c, 1.0)))


def _orth_norm(a: np.ndarray, b: np.ndarray, signs: np.ndarray, target: float) -> tuple[float, float]:
    """Inner product c and |q| of the component of ``b`` orthogonal to ``a``.

    Distances computed from this norm keep full relative accuracy for
    nearby points, where arccos/arccosh of ``c`` would lose half the digits.
    """
    c = inner(signs, a, b)
    r = b - (c / target) * a
    return c, float(np.sqrt(abs(inner(signs, r, r))))


def geodesic_distance(x: ModelPoint, y: ModelPoint) -> tuple[PairRelation, float]:
    _check_same(x, y)
    tag = x.tag
    c, r = _orth_norm(x.coords, y.coords, tag.signs, tag.target)
    kind = tag.kind
    if kind is Kind.HYPERBOLIC:
        return PairRelation.SPACE, float(np.arcsinh(r))
    if kind is Kind.SPHERE2:
        return PairRelation.SPACE, float(np.arctan2(r, c))
    if kind in (Kind.DESITTER2, Kind.DESITTER):
        if np.allclose(x.coords, y.coords, rtol=0, atol=1e-12):
            return PairRelation.SPACE, 0.0
        if abs(c) >= 1:
            raise ValueError(f"de Sitter points are not space related (<x,y> = {c:.6g})")
        return PairRelation.SPACE, float(np.arctan2(r, c))
    rel = pair_relation_ads(x, y)
    if rel is PairRelation.UNRELATED:
        raise ValueError(f"AdS points are not related (<x,y> = {c:.6g})")
    if rel is PairRelation.LIGHT:
        return rel, 0.0
    if rel is PairRelation.SPACE:
        return rel, float(np.arcsinh(r))
    return rel, float(np.arctan2(r, -c))


def conformal_chart(theta: float, x: Sequence[float]) -> ModelPoint:
    """Map (theta, x) in S^1 x S^d_+ to AdS^{d+1}."""
    x = np.asarray(x, float)
    if abs(x @ x - 1) > 1e-9:
        raise ValueError("x must lie on the unit sphere")
    if x[0] <= 0:
        raise ValueError("x must lie in the open hemisphere x_0 > 0")
    d = x.shape[0] - 1
    coords = np.concatenate([x[1:], [np.cos(theta), np.sin(theta)]]) / x[0]
    return ModelPoint(coords, anti_de_sitter(d + 1))


def conformal_chart_inverse(p: ModelPoint) -> tuple[float, np.ndarray]:
    _require(p.tag, Kind.ANTI_DE_SITTER)
    c = p.coords
    a, b = c[-2], c[-1]
    rho = np.hypot(a, b)  # = 1/x_0
    theta = float(np.mod(np.arctan2(b, a), 2 * np.pi))
    x = np.concatenate([[1.0], c[:-2]]) / rho
    return theta, x


def spacelike_margin(points, dist) -> float:
    """Smallest ratio (-1 - <p, p'>) / d(p, p')^2 over sampled pairs.

    ``points`` holds ``(param, ModelPoint)`` pairs or bare points; ``dist``
    is the symmetric table of intrinsic distances.  A positive value
    certifies the sampled spacelike inequality with that constant.
    """
    pts = [p[1] if isinstance(p, tuple) else p for p in points]
    n = len(pts)
    if n < 2:
        raise ValueError("need at least two points")
    for p in pts:
        _require(p.tag, Kind.ANTI_DE_SITTER)
    params = [np.atleast_1d(np.asarray(p[0], float)) for p in points if isinstance(p, tuple)]
    for i in range(len(params)):
        for j in range(i):
            if params[i].shape == params[j].shape and np.array_equal(params[i], params[j]):
                raise ValueError("sample parameters must be distinct")
    D = np.asarray(dist, float)
    if D.shape != (n, n):
        raise ValueError(f"distance table must be {n}x{n}")
    P = np.vstack([p.coords for p in pts])
    G = P @ pts[0].tag.gram @ P.T
    iu = np.triu_indices(n, 1)
    d = D[iu]
    if np.any(d <= 0):
        raise ValueError("pairwise distances must be positive")
    return float(np.min((-1.0 - G[iu]) / d ** 2))


def in_domain_of_dependence(x: ModelPoint, rays: Sequence[NullRay]) -> bool:
    if not rays:
        raise ValueError("empty limit set")
    return all(form_eval(x, y) < -LIGHT_TOL for y in rays)
