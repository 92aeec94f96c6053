import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm, logm
from scipy.optimize import brentq

from curvlink import polygons as P
from curvlink import solvers as S
from curvlink.forms import DESITTER2, SPHERE2
from curvlink.sampling import random_polygon

MODELS = [SPHERE2, DESITTER2]


def _regular_angle(model, k, alpha):
    return P.invariants(P.regular_polygon(model, k, alpha)).angles[0]


class TestClosureResidual:
    @pytest.mark.parametrize("model", MODELS)
    def test_valid_polygon_closes(self, model):
        inv = P.invariants(random_polygon(model, 6, np.random.default_rng(1)))
        assert np.linalg.norm(S.closure_residual(model, inv.lengths, inv.angles)) <= 1e-10

    def test_geodesic(self):
        assert np.linalg.norm(S.closure_residual(DESITTER2, [np.pi / 3] * 6, [0] * 6)) <= 1e-14

    def test_bumped(self):
        r = S.closure_residual(DESITTER2, [np.pi / 3] * 6, [0.1, 0, 0, 0, 0, 0])
        assert 1e-3 < np.linalg.norm(r) < 1

    def test_matches_scipy_logm(self):
        # independent oracle: principal matrix logarithm of the closure
        l, t = [0.9] * 5, [0.3, 0.1, 0.2, 0.0, 0.4]
        _, C, _ = P.develop(SPHERE2, l, t)
        L = np.real(logm(C))
        assert np.allclose(S.closure_residual(SPHERE2, l, t), [L[1, 0], L[2, 0], L[2, 1]], atol=1e-10)

    def test_far_from_closed(self):
        with pytest.raises(S.FarFromClosed):
            # straight path of total length just below pi: a near half-turn
            S.closure_residual(SPHERE2, [1.0, 1.0, np.pi - 2 - 1e-8], [0, 0, 0])

    @pytest.mark.parametrize("model", MODELS)
    def test_jacobian_matches_fd(self, model):
        rng = np.random.default_rng(2)
        inv = P.invariants(random_polygon(model, 5, rng))
        l = inv.lengths + rng.uniform(-0.05, 0.05, 5)
        t = inv.angles + rng.uniform(-0.05, 0.05, 5)
        J = S.closure_jacobian(model, l, t)
        h = 1e-6
        x = np.r_[l, t]
        for j in range(10):
            e = np.zeros(10)
            e[j] = h
            fd = (S.closure_residual(model, *np.split(x + e, 2))
                  - S.closure_residual(model, *np.split(x - e, 2))) / (2 * h)
            assert np.allclose(J[:, j], fd, atol=1e-7)

    def test_hat_exp_round_trip(self):
        x = np.array([0.2, -0.1, 0.3])
        for model in MODELS:
            assert np.allclose(S.log_coords(model, expm(S.hat(model, x))), x)


class TestSolvePolygon:
    def test_ds_equilateral_fixed_length(self):
        spec = S.equilateral_spec(DESITTER2, 8, length=0.9)
        res = S.solve_polygon(spec, ([0.9] * 8, [0.5] * 8))
        assert res.residual <= 1e-10
        assert np.ptp(res.angles) == 0
        inv = P.invariants(res.polygon)
        assert np.allclose(inv.lengths, 0.9, atol=1e-9)
        # oracle: the regular family member with the same side length
        a = brentq(lambda a: P.regular_length(DESITTER2, 8, a) - 0.9, 1e-6, 1.0)
        assert inv.angles[0] == pytest.approx(_regular_angle(DESITTER2, 8, a), abs=1e-8)

    def test_sphere_geodesic(self):
        spec = S.equilateral_spec(SPHERE2, 6, length=2 * np.pi / 6)
        res = S.solve_polygon(spec, ([np.pi / 3] * 6, [0.0] * 6))
        assert np.allclose(res.angles, 0, atol=1e-12)
        assert res.iterations == 0

    def test_ds_too_short_fails(self):
        spec = S.equilateral_spec(DESITTER2, 8, length=2 * np.pi / 8 - 0.3)
        with pytest.raises(S.SolverError) as info:
            S.solve_polygon(spec, ([2 * np.pi / 8 - 0.3] * 8, [0.5] * 8))
        assert info.value.residual > 1e-10
        assert info.value.best is not None

    @pytest.mark.parametrize("model", MODELS)
    def test_projection(self, model):
        rng = np.random.default_rng(4)
        p = random_polygon(model, 6, rng)
        inv = P.invariants(p)
        spec = S.PatternSpec(model, 6, tuple(S.Fixed(float(v)) for v in inv.lengths[:3]) + (S.FREE,) * 3,
                             (S.FREE,) * 6)
        res = S.solve_polygon(spec, (inv.lengths, inv.angles))
        assert np.abs(res.lengths - inv.lengths).max() <= 1e-10
        assert np.abs(res.angles - inv.angles).max() <= 1e-10

    def test_fixed_and_shared_respected(self):
        spec = S.PatternSpec(DESITTER2, 6, (S.Fixed(1.2), S.Shared("a"), S.Shared("a"), S.FREE, S.FREE, S.FREE),
                             (S.Shared("t"),) * 3 + (S.FREE,) * 3)
        inv = P.invariants(P.regular_polygon(DESITTER2, 6, 0.4))
        res = S.solve_polygon(spec, (inv.lengths, inv.angles))
        assert res.lengths[0] == 1.2
        assert res.lengths[1] == res.lengths[2]
        assert res.angles[0] == res.angles[1] == res.angles[2]
        assert res.residual <= 1e-10

    def test_continuation(self):
        sw = S.family_sweep(DESITTER2, 6, 0.1, 0.6, 6)
        for prev, nxt in zip(sw.rows, sw.rows[1:]):
            spec = S.equilateral_spec(DESITTER2, 6, length=nxt.length)
            res = S.solve_polygon(spec, ([prev.length] * 6, [prev.angle] * 6))
            assert res.angles[0] == pytest.approx(nxt.angle, abs=1e-8)
            want = P.regular_polygon(DESITTER2, 6, nxt.alpha)
            # same polygon up to isometry: compare Gram matrices of the vertices
            G = P.gram(DESITTER2)
            A, B = res.polygon.vertices, want.vertices
            assert np.abs(A @ G @ A.T - B @ G @ B.T).max() <= 1e-8

    def test_bad_specs(self):
        with pytest.raises(ValueError):
            S.PatternSpec(SPHERE2, 4, (S.FREE,) * 3, (S.FREE,) * 4)
        with pytest.raises(ValueError):
            S.PatternSpec(SPHERE2, 3, (S.Fixed(4.0),) * 3, (S.FREE,) * 3)
        with pytest.raises(ValueError):
            S.PatternSpec(SPHERE2, 5, (S.FREE,) * 2, (S.FREE,) * 2, symmetry=True)


class TestThetaInverse:
    @pytest.mark.parametrize("model", MODELS)
    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    def test_zero_targets(self, model, k):
        res = S.theta_inverse(model, k, np.zeros(k))
        assert np.allclose(res.lengths, np.pi / k, atol=1e-10)

    @pytest.mark.parametrize("model", MODELS)
    def test_single_bend(self, model):
        res = S.theta_inverse(model, 4, [0.07, 0, 0, 0])
        inv = P.invariants(res.polygon)
        assert inv.angles[0] == pytest.approx(0.07, abs=1e-8)
        assert inv.angles[4] == pytest.approx(0.07, abs=1e-8)
        assert np.abs(inv.angles[[1, 2, 3, 5, 6, 7]]).max() <= 1e-8

    @pytest.mark.parametrize("model", MODELS)
    def test_constant_targets_hit_regular_family(self, model):
        k = 3
        res = S.theta_inverse(model, k, [0.05] * k)
        sign = 1 if model is DESITTER2 else -1
        lo, hi = (1e-9, 1.0)
        a = brentq(lambda a: _regular_angle(model, 2 * k, sign * a) - 0.05, lo, hi)
        want = P.regular_length(model, 2 * k, sign * a)
        assert np.allclose(res.lengths, want, atol=1e-8)

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from(MODELS), st.integers(2, 5), st.integers(0, 2**31))
    def test_inverse_identity(self, model, k, seed):
        t = np.random.default_rng(seed).uniform(-0.1, 0.1, k)
        res = S.theta_inverse(model, k, t)
        inv = P.invariants(res.polygon)
        assert np.abs(inv.angles - np.tile(t, 2)).max() <= 1e-8
        assert np.ptp(inv.lengths) <= 1e-8
        assert P.central_symmetry_defect(res.polygon) <= 1e-8

    def test_distinct_targets_symmetric(self):
        res = S.theta_inverse(DESITTER2, 3, [0.1, -0.05, 0.02])
        assert P.central_symmetry_defect(res.polygon) <= 1e-8

    def test_wrong_target_count(self):
        with pytest.raises(ValueError):
            S.theta_inverse(SPHERE2, 3, [0.1, 0.1])


class TestSweep:
    def test_ds_first_row(self):
        sw = S.family_sweep(DESITTER2, 6, 0, 1, 11)
        r = sw.rows[0]
        assert (r.alpha, r.angle) == (0, 0) and r.length == pytest.approx(np.pi / 3)
        ls = [r.length for r in sw.rows]
        ts = [r.angle for r in sw.rows]
        assert np.all(np.diff(ls) > 0) and np.all(np.diff(ts) > 0)
        assert all(P.is_convex(P.invariants(P.regular_polygon(DESITTER2, 6, r.alpha))) for r in sw.rows)

    def test_sphere_decreasing(self):
        sw = S.family_sweep(SPHERE2, 4, 0, 1.2, 13)
        assert sw.rows[0].length == pytest.approx(np.pi / 2)
        ls = np.array([r.length for r in sw.rows])
        assert np.all(np.diff(ls) < 0)
        a = np.array([r.alpha for r in sw.rows])
        assert np.allclose(np.cos(ls), np.sin(a) ** 2 + np.cos(a) ** 2 * np.cos(np.pi / 2))
        assert not sw.truncated

    def test_ds_truncation(self):
        sw = S.family_sweep(DESITTER2, 4, 0, 1.2, 25)
        assert sw.truncated and sw.reason
        c = np.cos(2 * np.pi / 4)
        barrier = np.arcsinh(np.sqrt((1 + c) / (1 - c)))
        assert sw.rows[-1].alpha < barrier < sw.rows[-1].alpha + 1.2 / 24 + 1e-12

    def test_bad_args(self):
        with pytest.raises(ValueError):
            S.family_sweep(SPHERE2, 4, 1, 0, 3)


class TestTangentDimension:
    @pytest.mark.parametrize("model", MODELS)
    @pytest.mark.parametrize("k", [3, 4, 5, 6, 7, 8])
    def test_counts(self, model, k):
        rng = np.random.default_rng(k)
        assert S.tangent_dimension(random_polygon(model, k, rng)) == 2 * k - 3
        alpha = 0.4 if model is DESITTER2 else -0.4
        r = P.regular_polygon(model, k, alpha)
        assert S.tangent_dimension(r, "equilateral") == k - 2
        assert S.tangent_dimension(r, "equilateral_fixed_length") == k - 3
        assert S.tangent_dimension(P.regular_polygon(model, 2 * k, alpha), "symmetric") == k

    def test_unknown(self):
        with pytest.raises(ValueError):
            S.tangent_dimension(P.regular_polygon(SPHERE2, 4, 0.1), "nope")
