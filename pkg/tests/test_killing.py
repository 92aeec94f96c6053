import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvlink import killing as K
from curvlink.hipped import second_fundamental_form_fd


def _closed_form_foot(u, d):
    """Independent oracle for the foot on P_t.

    On P_t, f(y) = <h(y), u e_last> after the cos/sin terms cancel, so f is
    minimised where h(y) is the H^{2d} point proportional to -(u e_last)
    restricted to the first 2d+1 coordinates.
    """
    a = -u.u[:, -1][: 2 * d + 1]
    if a[-1] < 0:
        a = -a
    h = a / np.sqrt(a[-1] ** 2 - a[:-1] @ a[:-1])
    return h[:-1]


class TestGenerators:
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_standard(self, d):
        J = K.standard_J(d)
        n = 2 * d + 2
        assert np.array_equal(J.u @ J.u, -np.eye(n))
        e = np.eye(n)
        assert np.array_equal(J.u @ e[0], e[1]) and np.array_equal(J.u @ e[2], e[3])
        r = K.verify_killing(J, 100, 0)
        assert max(r.antisymmetry, r.square, r.unit_norm) <= 1e-12

    def test_standard_timelike_unit(self):
        J = K.standard_J(2)
        Q = K.ads_form(2)
        for x in K.random_ads_points(2, 100, np.random.default_rng(0)):
            X = J.u @ x
            assert X @ Q @ X == pytest.approx(-1, abs=1e-9)

    def test_seed_reproducible(self):
        assert np.array_equal(K.random_killing(2, 5).u, K.random_killing(2, 5).u)
        assert not np.array_equal(K.random_killing(2, 5).u, K.random_killing(2, 6).u)

    @pytest.mark.parametrize("d", [1, 2])
    def test_random_valid(self, d):
        for seed in range(20):
            r = K.verify_killing(K.random_killing(d, seed), 50, seed)
            assert r.ok(1e-9)

    def test_zero_scale_is_standard(self):
        assert np.allclose(K.random_killing(2, 3, scale=0.0).u, K.standard_J(2).u)

    def test_noise_detected(self):
        u = K.standard_J(1).u.copy()
        u[0, 0] += 5e-4       # not antisymmetric: (E^T Q + Q E)_00 = 1e-3
        r = K.verify_killing(K.KillingGenerator(u, 1))
        assert r.antisymmetry == pytest.approx(1e-3, rel=1e-6)
        assert not r.ok()

    def test_shape_check(self):
        with pytest.raises(ValueError):
            K.KillingGenerator(np.eye(3), 1)

    def test_fiber_sample_preserves_orthogonality(self):
        for d in (1, 2):
            surf = K.UmbilicSurface(0.5, d)
            p0, N0 = K.umbilic_point_normal(surf, np.zeros(2 * d))
            for seed in range(10):
                u = K.fiber_sample(d, seed)
                assert K.verify_killing(u).ok()
                X = u.u @ p0
                # X is +-N0: no tangential part at p0
                assert min(np.abs(X - N0).max(), np.abs(X + N0).max()) <= 1e-12
                assert np.allclose(K.killing_foot(u, surf, np.ones(2 * d)).y, 0, atol=1e-10)


class TestUmbilic:
    def test_origin(self):
        p, N = K.umbilic_point_normal(K.UmbilicSurface(0.5, 1), [0, 0])
        assert np.allclose(p, [0, 0, np.cos(.5), np.sin(.5)])
        assert np.allclose(N, [0, 0, -np.sin(.5), np.cos(.5)])

    def test_normal_orthogonal(self):
        surf = K.UmbilicSurface(0.7, 2)
        Q = K.ads_form(2)
        y = np.array([0.3, -0.5, 1.1, 0.2])
        p, N = K.umbilic_point_normal(surf, y)
        assert p @ Q @ p == pytest.approx(-1) and N @ Q @ N == pytest.approx(-1)
        assert abs(N @ Q @ p) <= 1e-14
        dp = np.cos(surf.t) * surf.dh(y)
        assert np.abs(N @ Q @ dp).max() <= 1e-14
        # future pointing: positive rotation in the last plane at p
        future = np.zeros(6)
        future[4], future[5] = -p[5], p[4]
        assert N @ Q @ future < 0

    @pytest.mark.parametrize("d", [1, 2])
    @pytest.mark.parametrize("t", [0.3, 0.5, 0.6, 1.0])
    def test_shape_operator(self, d, t):
        surf = K.UmbilicSurface(t, d)
        ps = surf.param_surface()
        rng = np.random.default_rng(int(10 * t) + d)
        for _ in range(3):
            y = rng.normal(size=2 * d)
            T1, T2 = rng.normal(size=2 * d), rng.normal(size=2 * d)
            ii = second_fundamental_form_fd(ps, y, T1, T2, 1e-4)
            dp1 = np.cos(t) * surf.dh(y) @ T1
            dp2 = np.cos(t) * surf.dh(y) @ T2
            g = ps.ip(dp1, dp2)
            assert ii == pytest.approx(-np.tan(t) * g, rel=1e-4, abs=1e-7)

    def test_bad_t(self):
        for t in (0.0, np.pi / 2, -0.1):
            with pytest.raises(ValueError):
                K.UmbilicSurface(t, 1)


class TestFoot:
    @pytest.mark.parametrize("d", [1, 2])
    def test_standard_J(self, d):
        rng = np.random.default_rng(d)
        for t in (0.2, 0.6, 1.2):
            surf = K.UmbilicSurface(t, d)
            for _ in range(5):
                y0 = rng.uniform(-5, 5, 2 * d)
                y0 *= min(1.0, 5 / np.linalg.norm(y0))
                f = K.killing_foot(K.standard_J(d), surf, y0)
                assert np.abs(f.y).max() <= 1e-10
                assert f.f == pytest.approx(1, abs=1e-8)

    @pytest.mark.parametrize("d", [1, 2])
    def test_multistart_agree(self, d):
        rng = np.random.default_rng(10 + d)
        for _ in range(4):
            u = K.random_killing(d, int(rng.integers(1 << 30)))
            surf = K.UmbilicSurface(0.6, d)
            feet = [K.killing_foot(u, surf, rng.uniform(-3, 3, 2 * d)) for _ in range(10)]
            Y = np.array([f.y for f in feet])
            assert np.ptp(Y, axis=0).max() <= 1e-6
            for f in feet:
                assert f.f == pytest.approx(1, abs=1e-8)
                assert f.tangential <= 1e-6
            assert np.allclose(feet[0].y, _closed_form_foot(u, d), atol=1e-8)

    def test_grid_oracle(self):
        # coarse grid minimum of f lands in the Newton foot's basin
        u = K.random_killing(1, 4)
        surf = K.UmbilicSurface(0.6, 1)
        foot = K.killing_foot(u, surf)
        g = np.linspace(-4, 4, 81)
        F = np.array([[K.foot_function(u, surf, [a, b]) for b in g] for a in g])
        i, j = np.unravel_index(np.argmin(F), F.shape)
        assert np.linalg.norm(np.array([g[i], g[j]]) - foot.y) <= 0.15

    def test_distinct_generators(self):
        surf = K.UmbilicSurface(0.6, 2)
        a = K.killing_foot(K.random_killing(2, 1), surf).y
        b = K.killing_foot(K.random_killing(2, 2), surf).y
        assert np.linalg.norm(a - b) > 1e-3

    def test_negated_field(self):
        u = K.random_killing(1, 8)
        surf = K.UmbilicSurface(0.4, 1)
        a = K.killing_foot(u, surf)
        b = K.killing_foot(-u, surf)
        assert b.flipped and not a.flipped
        assert np.allclose(a.y, b.y, atol=1e-9)

    @pytest.mark.parametrize("d", [1, 2])
    def test_hessian_positive_definite(self, d):
        u = K.random_killing(d, 3)
        surf = K.UmbilicSurface(0.6, d)
        foot = K.killing_foot(u, surf)
        _, g, Hm = K._foot_function(u, surf, foot.y)
        assert np.linalg.eigvalsh(Hm).min() > 0
        # chart Hessian against finite differences of the gradient
        h = 1e-6
        fd = np.column_stack([(K._foot_function(u, surf, foot.y + h * e)[1]
                               - K._foot_function(u, surf, foot.y - h * e)[1]) / (2 * h)
                              for e in np.eye(2 * d)])
        assert np.allclose(Hm, fd, atol=1e-6)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 2), st.floats(0.2, 1.2), st.integers(0, 2**31))
    def test_gradient_identity(self, d, t, seed):
        # away from the foot, df(Xbar) = -II(Xbar, Xbar) = tan t g(Xbar, Xbar) > 0
        rng = np.random.default_rng(seed)
        u = K.random_killing(d, seed)
        surf = K.UmbilicSurface(t, d)
        y = rng.uniform(-1.5, 1.5, 2 * d)
        p, N = K.umbilic_point_normal(surf, y)
        f = K.foot_function(u, surf, y)
        if f <= -1:
            u = -u
            f = -f
        Q = u.Q
        Xbar = u.u @ p - f * N
        dp = np.cos(t) * surf.dh(y)
        v, *_ = np.linalg.lstsq(dp, Xbar, rcond=None)
        gXX = Xbar @ Q @ Xbar
        if gXX < 1e-4:
            return
        h = 1e-5
        df = (K.foot_function(u, surf, y + h * v) - K.foot_function(u, surf, y - h * v)) / (2 * h)
        assert df == pytest.approx(np.tan(t) * gXX, rel=1e-5)
        assert df > 0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            K.killing_foot(K.standard_J(1), K.UmbilicSurface(0.5, 2))


class TestProperness:
    @pytest.mark.parametrize("d", [1, 2])
    def test_from_foot(self, d):
        rng = np.random.default_rng(30 + d)
        for _ in range(3):
            u = K.random_killing(d, int(rng.integers(1 << 30)))
            surf = K.UmbilicSurface(0.5, d)
            foot = K.killing_foot(u, surf)
            rep = K.properness_bound(u, surf, foot.y, [rng.uniform(-3, 3, 2 * d) for _ in range(100)])
            assert rep.c_prime == pytest.approx(0, abs=1e-7)
            assert rep.min_slack >= -1e-9

    def test_equality_at_base(self):
        u = K.random_killing(1, 2)
        surf = K.UmbilicSurface(0.5, 1)
        y0 = np.array([0.4, -0.2])
        rep = K.properness_bound(u, surf, y0, [y0])
        f0 = K.foot_function(u, surf, y0)
        # both sides equal f(y0) when the clamp is inactive: cosh(c') = f(y0)
        assert np.cosh(rep.c_prime) == pytest.approx(abs(f0))
        assert rep.slacks[0] == pytest.approx(abs(f0) - 1.0)

    def test_general_base(self):
        rng = np.random.default_rng(9)
        u = K.random_killing(2, 9)
        surf = K.UmbilicSurface(0.7, 2)
        rep = K.properness_bound(u, surf, rng.uniform(-1, 1, 4),
                                 [rng.uniform(-3, 3, 4) for _ in range(100)])
        assert rep.min_slack >= -1e-9

    def test_t_zero_rejected(self):
        with pytest.raises(ValueError):
            K.UmbilicSurface(0.0, 1)
