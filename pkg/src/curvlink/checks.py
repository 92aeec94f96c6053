"""Self-check suite: property runs over every module, seeded and deterministic."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import duality as D
from . import hipped as Hp
from . import holonomy as Ho
from . import killing as K
from . import polygons as P
from . import solvers as S
from .forms import DESITTER2, SPHERE2, ModelPoint, hyperbolic, anti_de_sitter
from .sampling import random_hyperbolic_point, random_polygon

SUITES = ("polygons", "hipped", "killing", "duality")


@dataclass
class CheckResult:
    suite: str
    name: str
    passed: bool
    value: float
    threshold: float


_REGISTRY: dict[str, list[tuple[str, Callable]]] = {s: [] for s in SUITES}


def check(suite: str, name: str):
    def deco(fn):
        _REGISTRY[suite].append((name, fn))
        return fn
    return deco


MODELS = (SPHERE2, DESITTER2)


# --- polygons -----------------------------------------------------------------

@check("polygons", "develop_closure")
def _develop_closure(rng):
    worst = 0.0
    for model in MODELS:
        for _ in range(10):
            p = random_polygon(model, int(rng.integers(3, 8)), rng)
            inv = P.invariants(p)
            verts, _, res = P.develop(model, inv.lengths, inv.angles, P.frame_of(inv, 0))
            worst = max(worst, res, float(np.abs(verts - p.vertices).max()))
    return worst, 1e-9


@check("polygons", "variation_formulas")
def _variation(rng):
    worst = 0.0
    h = 1e-5
    for model in MODELS:
        sph = model is SPHERE2
        for _ in range(5):
            p = random_polygon(model, int(rng.integers(4, 8)), rng, min_turn=0.05)
            inv = P.invariants(p)
            u = inv.frames[1].u_plus
            a = P.invariants(P.perturb_vertex(p, 1, u, h))
            b = P.invariants(P.perturb_vertex(p, 1, u, -h))
            dl = (a.lengths - b.lengths) / (2 * h)
            dt = (a.angles - b.angles) / (2 * h)
            l1, t2 = inv.lengths[0], inv.angles[1]
            sn, cs = (np.sin(t2), np.cos(t2)) if sph else (np.sinh(t2), np.cosh(t2))
            want = [sn / np.sin(l1), -sn / np.tan(l1), cs, -1.0]
            got = [dt[0], dt[1], dl[0], dl[1]]
            worst = max(worst, float(np.abs(np.subtract(got, want)).max()))
            A = P.constraint_matrix(inv)
            worst = max(worst, float(np.abs(A @ np.concatenate([dt, dl])).max()))
    return worst, 1e-6


@check("polygons", "dimension_counts")
def _dims(rng):
    bad = 0
    for model in MODELS:
        for k in (3, 5, 6):
            p = random_polygon(model, k, rng)
            bad += S.tangent_dimension(p) != 2 * k - 3
            alpha = 0.4 if model is DESITTER2 else -0.4
            r = P.regular_polygon(model, k, alpha)
            bad += S.tangent_dimension(r, "equilateral") != k - 2
            bad += S.tangent_dimension(r, "equilateral_fixed_length") != k - 3
            r2 = P.regular_polygon(model, 2 * k, alpha)
            bad += S.tangent_dimension(r2, "symmetric") != k
    return float(bad), 0.0


@check("polygons", "regular_family_convex")
def _family(rng):
    sw = S.family_sweep(DESITTER2, 6, 0.0, 0.8, 9)
    bad = 0
    prev = None
    for row in sw.rows:
        p = P.regular_polygon(DESITTER2, 6, row.alpha)
        bad += not P.is_convex(P.invariants(p))
        bad += 6 * row.length < 2 * np.pi - 1e-12
        if prev is not None:
            bad += not (row.length > prev.length and row.angle > prev.angle)
        prev = row
    return float(bad), 0.0


@check("polygons", "theta_inverse")
def _theta(rng):
    worst = 0.0
    for model in MODELS:
        for k in (2, 3, 4):
            t = rng.uniform(-0.1, 0.1, k)
            res = S.theta_inverse(model, k, t)
            inv = P.invariants(res.polygon)
            worst = max(worst, float(np.abs(inv.angles - np.tile(t, 2)).max()),
                        float(np.ptp(inv.lengths)))
    return worst, 1e-8


# --- hipped ---------------------------------------------------------------------

def _build_pair(rng, convex=None):
    model = DESITTER2 if rng.integers(2) else SPHERE2
    space = "ads" if model is DESITTER2 else "hyp"
    p = random_polygon(model, int(rng.integers(4, 8)), rng, convex=convex)
    return Hp.build(space, int(rng.integers(2, 5)), p), p


@check("hipped", "angle_round_trip")
def _roundtrip(rng):
    worst = 0.0
    for _ in range(10):
        hd, p = _build_pair(rng)
        inv = P.invariants(p)
        ang = Hp.recover_angles(hd)
        worst = max(worst, float(np.abs(ang.wedge - inv.lengths).max()),
                    float(np.abs(ang.dihedral - inv.angles).max()))
    return worst, 1e-9


@check("hipped", "convexity_equivalence")
def _convexity(rng):
    bad = 0
    for convex in (True, False) * 4:
        hd, p = _build_pair(rng, convex=convex)
        bad += Hp.convexity(hd) != P.is_convex(P.invariants(p))
    return float(bad), 0.0


@check("hipped", "loop_holonomy")
def _holonomy(rng):
    worst = 0.0
    for _ in range(8):
        hd, _ = _build_pair(rng)
        worst = max(worst, Ho.loop_holonomy(hd)[1])
    return worst, 1e-9


@check("hipped", "faces_totally_geodesic")
def _ii(rng):
    worst = 0.0
    for _ in range(4):
        hd, _ = _build_pair(rng)
        fs = Hp.face_surface(hd, 0)
        l = Hp.recover_angles(hd).wedge[0]
        m = hd.d - 2
        x = np.concatenate([[l / 2, 0.5], np.zeros(m)])
        e = np.eye(2 + m)
        for i in range(2 + m):
            for j in range(2 + m):
                worst = max(worst, abs(Hp.second_fundamental_form_fd(fs, x, e[i], e[j], 1e-4)))
    return worst, 1e-5


@check("hipped", "spacelike_margin")
def _spacelike(rng):
    worst = np.inf
    for _ in range(3):
        p = random_polygon(DESITTER2, 6, rng, convex=True)
        hd = Hp.build("ads", int(rng.integers(2, 4)), p)
        worst = min(worst, Hp.spacelike_check(hd, 20, int(rng.integers(1 << 30))).margin)
    return -worst, 0.0


@check("hipped", "mesh_on_quadric")
def _mesh(rng):
    hd = Hp.build("ads", 2, P.regular_polygon(DESITTER2, 6, 0.3))
    m = Hp.sample_mesh(hd, 1.0, 0.5, 6)
    q = np.einsum("ij,j,ij->i", m.vertices, hd.signs, m.vertices)
    return float(np.abs(q + 1).max()), 1e-8


# --- killing -------------------------------------------------------------------

@check("killing", "generators_valid")
def _gens(rng):
    worst = 0.0
    for d in (1, 2):
        for _ in range(5):
            r = K.verify_killing(K.random_killing(d, int(rng.integers(1 << 30))), 50, 0)
            worst = max(worst, r.antisymmetry, r.square, r.unit_norm)
    return worst, 1e-9


@check("killing", "foot_unique")
def _foot(rng):
    worst = 0.0
    for d in (1, 2):
        u = K.random_killing(d, int(rng.integers(1 << 30)))
        surf = K.UmbilicSurface(0.6, d)
        feet = [K.killing_foot(u, surf, rng.uniform(-2, 2, 2 * d)) for _ in range(4)]
        Y = np.array([f.y for f in feet])
        # normalised: spread against 1e-6, f - 1 against 1e-8
        worst = max(worst, float(np.ptp(Y, axis=0).max()) / 1e-6,
                    max(abs(f.f - 1) for f in feet) / 1e-8)
    return worst, 1.0


@check("killing", "standard_foot")
def _jfoot(rng):
    worst = 0.0
    for d in (1, 2):
        f = K.killing_foot(K.standard_J(d), K.UmbilicSurface(0.4, d), rng.uniform(-5, 5, 2 * d))
        worst = max(worst, float(np.abs(f.y).max()))
    return worst, 1e-10


@check("killing", "properness_bound")
def _proper(rng):
    worst = np.inf
    for d in (1, 2):
        u = K.random_killing(d, int(rng.integers(1 << 30)))
        surf = K.UmbilicSurface(0.5, d)
        foot = K.killing_foot(u, surf)
        samples = [rng.uniform(-3, 3, 2 * d) for _ in range(30)]
        worst = min(worst, K.properness_bound(u, surf, foot.y, samples).min_slack)
    return -worst, 1e-9


@check("killing", "umbilic_shape_operator")
def _umbilic(rng):
    worst = 0.0
    for d in (1, 2):
        for t in (0.3, 0.6, 1.0):
            surf = K.UmbilicSurface(t, d)
            ps = surf.param_surface()
            y = rng.normal(size=2 * d)
            T = np.eye(2 * d)[0]
            ii = Hp.second_fundamental_form_fd(ps, y, T, T, 1e-4)
            dp = (ps.evaluator(y + 1e-6 * T) - ps.evaluator(y - 1e-6 * T)) / 2e-6
            g = ps.ip(dp, dp)
            worst = max(worst, abs(ii / g + np.tan(t)) / np.tan(t))
    return worst, 1e-4


# --- duality ---------------------------------------------------------------------

@check("duality", "involution")
def _involution(rng):
    worst = 0.0
    for _ in range(10):
        y = ModelPoint(random_hyperbolic_point(3, rng), hyperbolic(3))
        worst = max(worst, float(np.abs(D.dual(D.dual(y)).coords - y.coords).max()))
        x = K.random_ads_points(1, 1, rng)[0]
        xa = ModelPoint(x, anti_de_sitter(3))
        worst = max(worst, float(np.abs(D.dual(D.dual(xa)).coords - x).max()))
    return worst, 1e-12


@check("duality", "angle_equals_distance")
def _angle(rng):
    worst = 0.0
    for _ in range(20):
        y1 = ModelPoint(random_hyperbolic_point(3, rng), hyperbolic(3))
        y2 = ModelPoint(random_hyperbolic_point(3, rng), hyperbolic(3))
        a, d = D.angle_equals_distance(y1, y2)
        worst = max(worst, abs(a - d))
    return worst, 1e-10


@check("duality", "dual_complex_edges")
def _complex(rng):
    worst = 0.0
    for _ in range(6):
        model = MODELS[int(rng.integers(2))]
        space = "ads" if model is DESITTER2 else "hyp"
        p = random_polygon(model, int(rng.integers(4, 8)), rng, convex=True)
        hd = Hp.build(space, int(rng.integers(2, 5)), p)
        dc = D.dual_complex(hd)
        worst = max(worst, float(np.abs(dc.edge_lengths - Hp.recover_angles(hd).dihedral).max()))
        if dc.counts != (hd.k, hd.k, 1):
            worst = np.inf
    return worst, 1e-9


def run_suite(suite: str = "all", seed: int = 0) -> list[CheckResult]:
    if suite != "all" and suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}")
    names = SUITES if suite == "all" else (suite,)
    out = []
    for s in names:
        for name, fn in _REGISTRY[s]:
            rng = np.random.default_rng([seed, len(out)])
            try:
                value, thr = fn(rng)
                passed = bool(value <= thr)
            except Exception as exc:  # a crash is a failure, report and continue
                value, thr, passed = None, 0.0, False
                name = f"{name} ({type(exc).__name__}: {exc})"
            out.append(CheckResult(s, name, passed, None if value is None else float(value), float(thr)))
    return out


def report(results: list[CheckResult], suite: str, seed: int) -> dict:
    return {
        "suite": suite,
        "seed": seed,
        "passed": all(r.passed for r in results),
        "results": [asdict(r) for r in results],
        "failures": [f"{r.suite}.{r.name}" for r in results if not r.passed],
    }
