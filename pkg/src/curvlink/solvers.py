"""Newton-type solvers on the closure constraint of polygon developments."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy.linalg import logm

from .forms import Kind, SpaceTag
from .polygons import (Polygon, bend, canonical_frame, constraint_matrix, gram,
                       invariants, is_convex, null_space, regular_length,
                       regular_polygon, rot, validate)

TOL = 1e-10
MAX_ITER = 50
MAX_HALVINGS = 30
FAR_ANGLE = np.pi - 1e-6
THETA_BASIN = 0.2


class SolverError(RuntimeError):
    """Raised on non-convergence; ``best`` holds the best parameters found."""

    def __init__(self, msg, best=None, residual=np.inf, iterations=0):
        super().__init__(msg)
        self.best = best
        self.residual = residual
        self.iterations = iterations


class FarFromClosed(ValueError):
    pass


# --- Lie algebra plumbing -------------------------------------------------

def _basis(model: SpaceTag) -> list[np.ndarray]:
    s = 1.0 if model.kind is Kind.DESITTER2 else -1.0
    E = []
    for (i, j), sign in (((1, 0), -1.0), ((2, 0), s), ((2, 1), s)):
        X = np.zeros((3, 3))
        X[i, j] = 1.0
        X[j, i] = sign
        E.append(X)
    return E


def vee(X: np.ndarray) -> np.ndarray:
    return np.array([X[1, 0], X[2, 0], X[2, 1]])


def hat(model: SpaceTag, x) -> np.ndarray:
    return sum(c * E for c, E in zip(x, _basis(model)))


def _ad(model: SpaceTag, X: np.ndarray) -> np.ndarray:
    return np.column_stack([vee(X @ E - E @ X) for E in _basis(model)])


def _inv_dexp(A: np.ndarray) -> np.ndarray:
    """z / (1 - exp(-z)) at A = ad_X, using A^3 = s A for 3-dim algebras.

    The function equals z/2 + (z/2) coth(z/2), whose even part is a
    power series in z^2, so it collapses to I + A/2 + c A^2.
    """
    s = float(np.trace(A @ A)) / 2
    if abs(s) < 1e-4:
        c = 1 / 12 - s / 720 + s * s / 30240
    elif s > 0:
        h = np.sqrt(s) / 2
        c = (h / np.tanh(h) - 1) / s
    else:
        h = np.sqrt(-s) / 2
        c = (h / np.tan(h) - 1) / s
    return np.eye(3) + A / 2 + c * A @ A


def _elliptic_angle(C: np.ndarray) -> float:
    c = (np.trace(C) - 1) / 2
    return float(np.arccos(c)) if c < 1 else 0.0


def log_coords(model: SpaceTag, C: np.ndarray) -> np.ndarray:
    if _elliptic_angle(C) >= FAR_ANGLE:
        raise FarFromClosed("closure is far from closed (rotation angle near pi)")
    X = logm(C)
    if np.iscomplexobj(X):
        if np.abs(X.imag).max() > 1e-8:
            raise FarFromClosed("closure has no real logarithm")
        X = X.real
    return vee(X)


# --- developments ---------------------------------------------------------

def _factors(model, lengths, angles):
    k = len(lengths)
    return [rot(lengths[i]) @ bend(model, angles[(i + 1) % k]) for i in range(k)]


def _product_and_derivatives(model, lengths, angles, half: bool = False):
    """Product P of the development factors and dP/d(lengths, angles).

    With ``half`` the product stops after the first half of the factors;
    the data are then assumed centrally symmetric and derivatives are
    taken with respect to the half-data (length n/2 arrays).
    """
    l = np.asarray(lengths, float)
    th = np.asarray(angles, float)
    k = len(l)
    if np.any(l <= 0) or np.any(l >= np.pi):
        raise ValueError("lengths must lie in (0, pi)")
    if half:
        l_full, th_full = np.tile(l, 2), np.tile(th, 2)
        n = k
    else:
        l_full, th_full = l, th
        n = k
    kk = len(l_full)
    Rs = [rot(l_full[i]) for i in range(n)]
    Bs = [bend(model, th_full[(i + 1) % kk]) for i in range(n)]
    factors = [R @ B for R, B in zip(Rs, Bs)]
    prefix = [np.eye(3)]
    for f in factors:
        prefix.append(prefix[-1] @ f)
    suffix = [np.eye(3)] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = factors[i] @ suffix[i + 1]
    P = prefix[-1]
    Er = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
    if model.kind is Kind.SPHERE2:
        Eb = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]])
    else:
        Eb = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, -1.0, 0.0]])
    dl = [np.zeros((3, 3)) for _ in range(k)]
    dt = [np.zeros((3, 3)) for _ in range(k)]
    for i in range(n):
        dl[i % k] += prefix[i] @ Rs[i] @ Er @ Bs[i] @ suffix[i + 1]
        j = (i + 1) % kk
        dt[j % k] += prefix[i] @ Rs[i] @ Bs[i] @ Eb @ suffix[i + 1]
    return P, dl, dt


def closure_residual(model: SpaceTag, lengths, angles) -> np.ndarray:
    """Log coordinates (X10, X20, X21) of the development closure."""
    P, _, _ = _product_and_derivatives(model, lengths, angles)
    return log_coords(model, P)


def closure_jacobian(model: SpaceTag, lengths, angles) -> np.ndarray:
    """d closure_residual / d(lengths, angles), a 3 x 2k matrix."""
    P, dl, dt = _product_and_derivatives(model, lengths, angles)
    x = log_coords(model, P)
    Pinv = np.linalg.inv(P)
    raw = np.column_stack([vee(Pinv @ D) for D in dl + dt])
    return _inv_dexp(_ad(model, hat(model, x))) @ raw


def involution_residual(model, lengths, angles):
    """Residual and Jacobian of the half-closure involution condition.

    The half product M closes the full symmetric polygon iff M^2 = I,
    i.e. M equals its inverse.
    """
    M, dl, dt = _product_and_derivatives(model, lengths, angles, half=True)
    G = gram(model)
    Minv = G @ M.T @ G
    r = vee(M - Minv) / 2
    J = np.column_stack([vee(D + Minv @ D @ Minv) / 2 for D in dl + dt])
    return r, J


# --- patterns -------------------------------------------------------------

@dataclass(frozen=True)
class Fixed:
    value: float


@dataclass(frozen=True)
class Shared:
    group: str


@dataclass(frozen=True)
class Free:
    pass


FREE = Free()
Entry = Union[Fixed, Shared, Free]


@dataclass(frozen=True)
class PatternSpec:
    """Constraint pattern on side lengths and turning angles.

    With ``symmetry`` the polygon has ``k`` vertices (k even) and each
    pattern describes the first ``k // 2`` entries; the second half repeats
    the first.
    """

    model: SpaceTag
    k: int
    lengths: tuple
    angles: tuple
    symmetry: bool = False

    def __post_init__(self):
        n = self.k // 2 if self.symmetry else self.k
        if self.symmetry and self.k % 2:
            raise ValueError("symmetric patterns need an even vertex count")
        if self.k < 3:
            raise ValueError("k must be at least 3")
        if len(self.lengths) != n or len(self.angles) != n:
            raise ValueError(f"patterns must have {n} entries")
        for e in self.lengths:
            if isinstance(e, Fixed) and not 0 < e.value < np.pi:
                raise ValueError(f"fixed length {e.value} outside (0, pi)")
        for e in tuple(self.lengths) + tuple(self.angles):
            if not isinstance(e, (Fixed, Shared, Free)):
                raise TypeError(f"bad pattern entry {e!r}")

    @property
    def n(self) -> int:
        return self.k // 2 if self.symmetry else self.k

    def layout(self):
        """Affine map x -> base + E x from free variables to (lengths, angles)."""
        entries = list(self.lengths) + list(self.angles)
        n = self.n
        base = np.zeros(2 * n)
        cols: dict = {}
        for idx, e in enumerate(entries):
            kind = "l" if idx < n else "t"
            if isinstance(e, Fixed):
                base[idx] = e.value
            elif isinstance(e, Shared):
                cols.setdefault((kind, e.group), []).append(idx)
            else:
                cols[(kind, "#", idx)] = [idx]
        E = np.zeros((2 * n, len(cols)))
        for j, idxs in enumerate(cols.values()):
            E[idxs, j] = 1.0
        return base, E

    def full(self, params: np.ndarray):
        n = self.n
        l, t = params[:n], params[n:]
        if self.symmetry:
            l, t = np.tile(l, 2), np.tile(t, 2)
        return l, t


def equilateral_spec(model: SpaceTag, k: int, length: float | None = None,
                     shared_angles: bool = True) -> PatternSpec:
    le = Fixed(length) if length is not None else Shared("l")
    ae = Shared("t") if shared_angles else FREE
    return PatternSpec(model, k, (le,) * k, (ae,) * k)


@dataclass
class SolveResult:
    polygon: Polygon
    lengths: np.ndarray
    angles: np.ndarray
    residual: float
    iterations: int


def gauss_newton(fun, x0, tol=TOL, max_iter=MAX_ITER):
    """Minimise |r(x)| with pseudo-inverse steps and halving line search.

    ``fun`` returns (residual, jacobian) and may raise ValueError for
    inadmissible points, which the line search treats as rejections.
    """
    x = np.asarray(x0, float).copy()
    r, J = fun(x)
    nr = np.linalg.norm(r)
    for it in range(max_iter + 1):
        if nr <= tol:
            return x, nr, it
        if it == max_iter:
            break
        step = -np.linalg.pinv(J) @ r
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            try:
                r1, J1 = fun(x + t * step)
                n1 = np.linalg.norm(r1)
            except ValueError:
                n1 = np.inf
            if n1 < nr:
                x, r, J, nr = x + t * step, r1, J1, n1
                break
            t /= 2
        else:
            raise SolverError(f"line search failed at |r| = {nr:.3e}", x, nr, it)
    raise SolverError(f"no convergence in {max_iter} iterations (|r| = {nr:.3e})",
                      x, nr, max_iter)


def solve_params(spec: PatternSpec, guess_lengths, guess_angles):
    base, E = spec.layout()
    g = np.concatenate([np.asarray(guess_lengths, float)[:spec.n],
                        np.asarray(guess_angles, float)[:spec.n]])
    if g.shape != (2 * spec.n,):
        raise ValueError("guess has the wrong length")
    x0, *_ = np.linalg.lstsq(E, g - base, rcond=None) if E.shape[1] else (np.zeros(0),)

    def fun(x):
        p = base + E @ x
        n = spec.n
        if spec.symmetry:
            r, J = involution_residual(spec.model, p[:n], p[n:])
        else:
            l, t = p[:n], p[n:]
            r = closure_residual(spec.model, l, t)
            J = closure_jacobian(spec.model, l, t)
        return r, J @ E

    x, nr, it = gauss_newton(fun, x0)
    return base + E @ x, nr, it


def solve_polygon(spec: PatternSpec, guess, F0=None) -> SolveResult:
    """Reconstruct a polygon satisfying ``spec`` starting from ``guess``.

    ``guess`` is a pair (lengths, angles) covering at least the pattern
    entries.  The output polygon is developed from ``F0`` (default: the
    canonical frame at e1).
    """
    from .polygons import develop

    gl, ga = guess
    params, nr, it = solve_params(spec, gl, ga)
    l, t = spec.full(params)
    verts, _, _ = develop(spec.model, l, t, canonical_frame(spec.model) if F0 is None else F0)
    poly = Polygon(spec.model, verts)
    errs = validate(poly)
    if errs:
        raise SolverError("solution is not a valid polygon: " + "; ".join(errs),
                          params, nr, it)
    return SolveResult(poly, l, t, float(nr), it)


def theta_inverse(model: SpaceTag, k: int, targets: Sequence[float]) -> SolveResult:
    """Equilateral centrally symmetric 2k-gon with angles (targets, targets).

    Convergence is guaranteed only for max |target| <= 0.2.
    """
    t = np.asarray(targets, float)
    if t.shape != (k,):
        raise ValueError(f"need {k} target angles")
    spec = PatternSpec(model, 2 * k, (Shared("l"),) * k,
                       tuple(Fixed(float(a)) for a in t), symmetry=True)
    return solve_polygon(spec, (np.full(k, np.pi / k), t))


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    length: float
    angle: float


@dataclass
class Sweep:
    rows: list[SweepRow]
    truncated: bool = False
    reason: str = ""


def family_sweep(model: SpaceTag, k: int, alpha_min: float, alpha_max: float,
                 steps: int) -> Sweep:
    if steps < 1:
        raise ValueError("steps must be positive")
    if alpha_max < alpha_min:
        raise ValueError("alpha range is reversed")
    alphas = np.linspace(alpha_min, alpha_max, steps) if steps > 1 else np.array([alpha_min])
    rows = []
    for a in alphas:
        try:
            inv = invariants(regular_polygon(model, k, float(a)))
        except ValueError as exc:
            return Sweep(rows, True, f"alpha = {a:.6g}: {exc}")
        rows.append(SweepRow(float(a), float(inv.lengths[0]), float(inv.angles[0])))
    return Sweep(rows)


CONSTRAINTS = ("none", "equilateral", "equilateral_fixed_length", "symmetric")


def tangent_dimension(p: Polygon, constraints: str = "none") -> int:
    if constraints not in CONSTRAINTS:
        raise ValueError(f"unknown constraint set {constraints!r}")
    inv = invariants(p)
    k = p.k
    rows = [constraint_matrix(inv)]
    if constraints != "none":
        E = np.zeros((k - 1, 2 * k))
        for i in range(k - 1):
            E[i, k + i + 1], E[i, k + i] = 1.0, -1.0
        rows.append(E)
    if constraints == "equilateral_fixed_length":
        row = np.zeros((1, 2 * k))
        row[0, k] = 1.0
        rows.append(row)
    if constraints == "symmetric":
        if k % 2:
            raise ValueError("symmetric constraint needs an even vertex count")
        h = k // 2
        S = np.zeros((h, 2 * k))
        for i in range(h):
            S[i, i], S[i, i + h] = 1.0, -1.0
        rows.append(S)
    return null_space(np.vstack(rows)).shape[1]


__all__ = [
    "SolverError", "FarFromClosed", "closure_residual", "closure_jacobian",
    "involution_residual", "Fixed", "Shared", "Free", "FREE", "PatternSpec",
    "equilateral_spec", "SolveResult", "gauss_newton", "solve_params",
    "solve_polygon", "theta_inverse", "SweepRow", "Sweep", "family_sweep",
    "tangent_dimension", "CONSTRAINTS", "THETA_BASIN", "vee", "hat", "log_coords",
]
