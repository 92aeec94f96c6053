"""Timelike unitary Killing fields on AdS^{2d+1} and their foot points.

A generator is a matrix u of size 2d+2, antisymmetric for the form of
signature (2d, 2), with u^2 = -Id.  The field x -> u x is then timelike
of unit length everywhere.  The test hypersurfaces are the umbilic
slices P_t = {cos t h + sin t e_last : h in H^{2d}}, whose future normal
N = -sin t h + cos t e_last has shape operator -tan t Id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .forms import anti_de_sitter
from .hipped import ParamSurface


def ads_form(d: int) -> np.ndarray:
    return np.diag([1.0] * (2 * d) + [-1.0, -1.0])


@dataclass(frozen=True, eq=False)
class KillingGenerator:
    u: np.ndarray
    d: int

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        n = 2 * self.d + 2
        if self.d < 1 or u.shape != (n, n):
            raise ValueError(f"generator for d = {self.d} must be {n}x{n}")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def Q(self) -> np.ndarray:
        return ads_form(self.d)

    def __neg__(self):
        return KillingGenerator(-self.u, self.d)


def standard_J(d: int) -> KillingGenerator:
    if d < 1:
        raise ValueError("d must be at least 1")
    n = 2 * d + 2
    J = np.zeros((n, n))
    for i in range(0, n, 2):
        J[i + 1, i] = 1.0
        J[i, i + 1] = -1.0
    return KillingGenerator(J, d)


def random_killing(d: int, seed: int = 0, scale: float = 0.5) -> KillingGenerator:
    """Conjugate of the standard generator by exp(A), A a random form-antisymmetric matrix."""
    rng = np.random.default_rng(seed)
    n = 2 * d + 2
    R = rng.uniform(-scale, scale, (n, n))
    A = ads_form(d) @ (R - R.T) / 2
    g = expm(A)
    J = standard_J(d).u
    return KillingGenerator(g @ J @ np.linalg.inv(g), d)


def random_ads_points(d: int, n: int, rng: np.random.Generator, spread: float = 2.0) -> np.ndarray:
    v = rng.normal(scale=spread, size=(n, 2 * d))
    r = np.sqrt(1 + np.sum(v * v, axis=1))
    th = rng.uniform(0, 2 * np.pi, n)
    return np.column_stack([v, r * np.cos(th), r * np.sin(th)])


@dataclass(frozen=True)
class KillingReport:
    antisymmetry: float
    square: float
    unit_norm: float

    def ok(self, tol: float = 1e-8) -> bool:
        return max(self.antisymmetry, self.square, self.unit_norm) <= tol


def verify_killing(u: KillingGenerator, n_samples: int = 100, seed: int = 0) -> KillingReport:
    Q = u.Q
    M = u.u
    anti = float(np.abs(M.T @ Q + Q @ M).max())
    sq = float(np.abs(M @ M + np.eye(M.shape[0])).max())
    X = random_ads_points(u.d, n_samples, np.random.default_rng(seed))
    UX = X @ M.T
    unit = float(np.abs(np.einsum("ij,j,ij->i", UX, np.diag(Q), UX) + 1).max())
    return KillingReport(anti, sq, unit)


# --- umbilic slices -----------------------------------------------------------

@dataclass(frozen=True)
class UmbilicSurface:
    t: float
    d: int

    def __post_init__(self):
        if not 0 < self.t < np.pi / 2:
            raise ValueError("t must lie in (0, pi/2)")
        if self.d < 1:
            raise ValueError("d must be at least 1")

    @property
    def n(self) -> int:
        return 2 * self.d + 2

    @property
    def tag(self):
        return anti_de_sitter(2 * self.d + 1)

    def h(self, y) -> np.ndarray:
        y = np.asarray(y, float)
        return np.concatenate([y, [np.sqrt(1 + y @ y), 0.0]])

    def dh(self, y) -> np.ndarray:
        """Columns dh/dy_j."""
        y = np.asarray(y, float)
        r = np.sqrt(1 + y @ y)
        m = 2 * self.d
        D = np.zeros((self.n, m))
        D[:m] = np.eye(m)
        D[m] = y / r
        return D

    def d2h_last(self, y) -> np.ndarray:
        """Hessian of the only non-linear coordinate sqrt(1 + |y|^2)."""
        y = np.asarray(y, float)
        r = np.sqrt(1 + y @ y)
        return np.eye(len(y)) / r - np.outer(y, y) / r ** 3

    def param_surface(self) -> ParamSurface:
        return ParamSurface(lambda y: umbilic_point_normal(self, y)[0],
                            np.diag(ads_form(self.d)),
                            lambda y: umbilic_point_normal(self, y)[1])


def umbilic_point_normal(surface: UmbilicSurface, y) -> tuple[np.ndarray, np.ndarray]:
    h = surface.h(y)
    e = np.zeros(surface.n)
    e[-1] = 1.0
    c, s = np.cos(surface.t), np.sin(surface.t)
    return c * h + s * e, -s * h + c * e


def _foot_function(u: KillingGenerator, surface: UmbilicSurface, y):
    """f = -<u p, N> with its chart gradient and Hessian."""
    Q = u.Q
    c, s = np.cos(surface.t), np.sin(surface.t)
    p, N = umbilic_point_normal(surface, y)
    up = u.u @ p
    f = -float(up @ Q @ N)
    D = surface.dh(y)
    # dp = c dh, dN = -s dh
    uQN = u.u.T @ Q @ N          # <u a, N> = a . uQN
    Qup = Q @ up                 # <u p, b> = b . Qup
    g = -(c * D.T @ uQN - s * D.T @ Qup)
    # second derivatives only hit the coordinate sqrt(1 + |y|^2); the
    # first-order cross terms cancel by antisymmetry of u
    m = 2 * surface.d
    H = -(c * uQN[m] - s * Qup[m]) * surface.d2h_last(y)
    return f, g, (H + H.T) / 2


@dataclass
class FootResult:
    y: np.ndarray
    p: np.ndarray
    f: float
    iterations: int
    tangential: float
    flipped: bool = False


class FootError(RuntimeError):
    pass


def killing_foot(u: KillingGenerator, surface: UmbilicSurface, y0=None,
                 tol: float = 1e-10, max_iter: int = 200) -> FootResult:
    """Point of P_t where the Killing field is orthogonal to the surface.

    Damped Newton on the global chart y in R^{2d}, with Armijo
    backtracking and a gradient step whenever the Newton direction is not
    a descent direction.
    """
    if u.d != surface.d:
        raise ValueError("generator and surface dimensions differ")
    y = np.zeros(2 * surface.d) if y0 is None else np.array(y0, float)
    f, g, H = _foot_function(u, surface, y)
    flipped = False
    if f <= -1:
        u, flipped = -u, True
        f, g, H = _foot_function(u, surface, y)
    for it in range(max_iter + 1):
        if f < 1 - 1e-8:
            raise FootError(f"f = {f:.6g} < 1: field is not timelike unitary")
        if np.linalg.norm(g) <= tol:
            p, N = umbilic_point_normal(surface, y)
            X = u.u @ p - f * N
            tang = float(np.sqrt(abs(X @ u.Q @ X)))
            return FootResult(y, p, f, it, tang, flipped)
        if it == max_iter:
            break
        try:
            w = np.linalg.eigvalsh(H)
            step = -np.linalg.solve(H, g) if w[0] > 1e-12 else None
        except np.linalg.LinAlgError:
            step = None
        if step is None or step @ g >= 0:
            step = -g / max(1.0, np.linalg.norm(g))
        a = 1.0
        while a > 1e-12:
            y1 = y + a * step
            f1, g1, H1 = _foot_function(u, surface, y1)
            if f1 <= f + 1e-4 * a * (g @ step) or (abs(f1 - f) <= 1e-15 * abs(f) and np.linalg.norm(g1) < np.linalg.norm(g)):
                break
            a /= 2
        else:
            raise FootError(f"line search stalled at |grad| = {np.linalg.norm(g):.3e}")
        y, f, g, H = y1, f1, g1, H1
    raise FootError(f"no convergence in {max_iter} iterations (|grad| = {np.linalg.norm(g):.3e})")


def foot_function(u: KillingGenerator, surface: UmbilicSurface, y) -> float:
    return _foot_function(u, surface, y)[0]


def hyperbolic_distance(h1: np.ndarray, h2: np.ndarray) -> float:
    """Distance in H^{2d} between points given in the first 2d+1 coordinates."""
    sg = np.ones(len(h1))
    sg[-1] = -1
    c = float(np.sum(sg * h1 * h2))
    r = h2 + c * h1
    return float(np.arcsinh(np.sqrt(abs(np.sum(sg * r * r)))))


@dataclass
class ProperReport:
    c: float
    c_prime: float
    min_slack: float
    slacks: np.ndarray


def properness_bound(u: KillingGenerator, surface: UmbilicSurface, y0, samples) -> ProperReport:
    """Check f(y) >= cosh(max(c T - c', 0)) on samples.

    c = tan t, c' = arcsinh(sqrt(f(y0)^2 - 1)), T = intrinsic distance on
    P_t between p(y0) and p(y).  The clamp at zero keeps the bound valid
    for samples closer to the foot than y0 (where c T < c').
    """
    y0 = np.asarray(y0, float)
    f0 = foot_function(u, surface, y0)
    if f0 <= -1:
        u = -u
        f0 = -f0
    c = np.tan(surface.t)
    cp = float(np.arcsinh(np.sqrt(max(f0 * f0 - 1, 0.0))))
    m = 2 * surface.d
    h0 = surface.h(y0)[: m + 1]
    slacks = []
    for y in samples:
        T = np.cos(surface.t) * hyperbolic_distance(h0, surface.h(y)[: m + 1])
        slacks.append(foot_function(u, surface, y) - np.cosh(max(c * T - cp, 0.0)))
    s = np.array(slacks)
    return ProperReport(float(c), cp, float(s.min()) if s.size else np.inf, s)


def fiber_sample(d: int, seed: int = 0) -> KillingGenerator:
    """k J k^{-1} for a random k in O(2d) x O(2)."""
    rng = np.random.default_rng(seed)
    a, _ = np.linalg.qr(rng.normal(size=(2 * d, 2 * d)))
    b, _ = np.linalg.qr(rng.normal(size=(2, 2)))
    k = np.zeros((2 * d + 2, 2 * d + 2))
    k[: 2 * d, : 2 * d] = a
    k[2 * d:, 2 * d:] = b
    return KillingGenerator(k @ standard_J(d).u @ k.T, d)
