import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from curvlink import hipped as H
from curvlink import holonomy as Ho
from curvlink import polygons as P
from curvlink.forms import DESITTER2, SPHERE2
from curvlink.sampling import random_polygon


def _hd(space="ads", d=3, seed=0, k=6):
    model = DESITTER2 if space == "ads" else SPHERE2
    return H.build(space, d, random_polygon(model, k, np.random.default_rng(seed)))


def _link_iso(model, rng):
    eta = P.gram(model)
    A = rng.uniform(-0.5, 0.5, (3, 3))
    return expm(eta @ (A - A.T) / 2)


class TestIsometryMatrix:
    def test_rejects_non_isometry(self):
        with pytest.raises(ValueError):
            Ho.IsometryMatrix(np.diag([2.0, 1, 1]), (2, 1))

    def test_inverse(self):
        hd = _hd()
        m = Ho.fold_at(hd, 2)
        assert np.allclose((m @ m.inverse()).entries, np.eye(5))


class TestLinkEmbed:
    @pytest.mark.parametrize("space", ["ads", "hyp"])
    def test_identity(self, space):
        hd = _hd(space)
        assert np.array_equal(Ho.link_embed(hd, np.eye(3)).entries, np.eye(hd.d + 2))

    @pytest.mark.parametrize("space", ["ads", "hyp"])
    def test_homomorphism(self, space):
        hd = _hd(space)
        rng = np.random.default_rng(1)
        for _ in range(10):
            a, b = _link_iso(hd.polygon.model, rng), _link_iso(hd.polygon.model, rng)
            lhs = Ho.link_embed(hd, a @ b).entries
            rhs = (Ho.link_embed(hd, a) @ Ho.link_embed(hd, b)).entries
            assert np.abs(lhs - rhs).max() <= 1e-10

    def test_boost_fixes_stem(self):
        hd = _hd("ads", 4)
        M = Ho.link_embed(hd, _link_iso(DESITTER2, np.random.default_rng(2))).entries
        assert np.allclose(M @ hd.z, hd.z)
        for s in hd.stem:
            assert np.allclose(M @ s, s)
        Q = np.diag(hd.signs)
        assert np.abs(M.T @ Q @ M - Q).max() <= 1e-12

    def test_rejects_non_isometry(self):
        with pytest.raises(ValueError):
            Ho.link_embed(_hd(), np.diag([1.0, 2, 1]))


class TestFold:
    def test_zero_angle(self):
        hd = H.build("ads", 3, P.regular_polygon(DESITTER2, 6, 0.0))
        for i in range(6):
            assert np.allclose(Ho.fold_at(hd, i).entries, np.eye(5), atol=1e-12)

    @pytest.mark.parametrize("space", ["ads", "hyp"])
    def test_maps_normals(self, space):
        hd = _hd(space, 3, 4)
        for i in range(hd.k):
            F = Ho.fold_at(hd, i).entries
            assert np.abs(F @ H.face_normal(hd, (i - 1) % hd.k) - H.face_normal(hd, i)).max() <= 1e-9

    def test_fixes_vertex_and_base(self):
        hd = _hd("ads", 3, 5)
        V = hd.embedded_vertices()
        for i in range(hd.k):
            F = Ho.fold_at(hd, i).entries
            assert np.allclose(F @ V[i], V[i])
            assert np.allclose(F @ hd.z, hd.z)


class TestLoop:
    @pytest.mark.parametrize("space", ["ads", "hyp"])
    def test_valid_builds_close(self, space):
        rng = np.random.default_rng(6)
        for _ in range(15):
            model = DESITTER2 if space == "ads" else SPHERE2
            hd = H.build(space, int(rng.integers(2, 5)), random_polygon(model, int(rng.integers(3, 8)), rng))
            assert Ho.loop_holonomy(hd)[1] <= 1e-9

    def test_edited_angle(self):
        hd = _hd("ads", 3, 7)
        th = P.invariants(hd.polygon).angles.copy()
        th[2] += 0.2
        assert Ho.loop_holonomy(hd, th)[1] > 1e-3

    def test_geodesic_exact(self):
        hd = H.build("ads", 2, P.regular_polygon(DESITTER2, 6, 0.0))
        assert Ho.loop_holonomy(hd)[1] <= 1e-14

    @pytest.mark.parametrize("space", ["ads", "hyp"])
    def test_factorisation(self, space):
        hd = _hd(space, 3, 8)
        th = P.invariants(hd.polygon).angles + 0.05
        prod = Ho.product(Ho.loop_factors(hd, th)).entries
        assert np.abs(prod - Ho.loop_holonomy(hd, th)[0].entries).max() <= 1e-12


class TestDihedral:
    @pytest.mark.parametrize("d,n", [(2, 2), (3, 5), (4, 3)])
    def test_relations(self, d, n):
        s1, s2 = Ho.dihedral_model(d, n)
        I = np.eye(d + 1)
        assert np.allclose(s1.entries @ s1.entries, I) and np.allclose(s2.entries @ s2.entries, I)
        r = s1.entries @ s2.entries
        assert np.abs(np.linalg.matrix_power(r, n) - I).max() <= 1e-10
        plane = [d - 2, d - 1]
        assert np.trace(r[np.ix_(plane, plane)]) == pytest.approx(2 * np.cos(2 * np.pi / n), abs=1e-12)

    def test_n2_commute(self):
        s1, s2 = Ho.dihedral_model(3, 2)
        assert np.allclose(s1.entries @ s2.entries, s2.entries @ s1.entries)

    def test_bad(self):
        with pytest.raises(ValueError):
            Ho.dihedral_model(3, 1)


class TestGluing:
    def test_schema(self):
        g = Ho.GluingSchema(3, 4)
        assert g.wedge_angle == np.pi / 3 and g.wedges == 8 and g.a == pytest.approx(4 / 3)
        inv = P.invariants(g.polygon())
        assert np.allclose(inv.lengths, np.pi / 3)

    def test_k_not_above_n(self):
        with pytest.raises(ValueError):
            Ho.GluingSchema(4, 2).polygon()


def _source_rep(d, rng, n_gens=4):
    """Generators of O(d,1) fixing e_{d-1} where required: block rotations and boosts."""
    sig = (d, 1)
    Q = Ho.form_matrix(sig)
    gens = []
    for j in range(n_gens):
        A = rng.uniform(-0.5, 0.5, (d + 1, d + 1))
        M = expm(Q @ (A - A.T) / 2)
        gens.append(Ho.Generator(f"g{j}", Ho.IsometryMatrix(M, sig), mask=bool(j % 2)))
    # a hypersurface generator fixing e_{d-1} (0-based d-1)
    keep = [i for i in range(d + 1) if i != d - 1]
    A = np.zeros((d + 1, d + 1))
    B = rng.uniform(-0.5, 0.5, (d, d))
    A[np.ix_(keep, keep)] = B - B.T
    A = Q @ A
    gens.append(Ho.Generator("h", Ho.IsometryMatrix(expm(A), sig), hypersurface=True))
    return Ho.Representation(sig, tuple(gens))


class TestBending:
    @pytest.mark.parametrize("target", ["hyp", "ads"])
    def test_t_zero(self, target):
        rep = Ho.embed_representation(_source_rep(3, np.random.default_rng(0)), target)
        out = Ho.bend_representation(rep, 0.0, target)
        for a, b in zip(rep.matrices(), out.matrices()):
            assert np.allclose(a, b, atol=1e-15)

    @pytest.mark.parametrize("target", ["hyp", "ads"])
    def test_centraliser_unchanged(self, target):
        d = 3
        sig = (d, 1)
        # rotation in (e_1, e_2) commutes with r_t, which acts on (e_3, extra)
        c, s = np.cos(0.4), np.sin(0.4)
        M = np.eye(d + 1)
        M[:2, :2] = [[c, -s], [s, c]]
        rep = Ho.Representation(sig, (Ho.Generator("c", Ho.IsometryMatrix(M, sig), mask=True),))
        big = Ho.embed_representation(rep, target)
        out = Ho.bend_representation(big, 1.3)
        assert np.allclose(out.matrices()[0], big.matrices()[0])

    @pytest.mark.parametrize("target", ["hyp", "ads"])
    def test_one_parameter_group(self, target):
        for s_, t_ in [(0.3, -1.1), (2.0, 0.5)]:
            a = Ho.bending_matrix(3, s_, target) @ Ho.bending_matrix(3, t_, target)
            assert np.allclose(a, Ho.bending_matrix(3, s_ + t_, target))

    @settings(max_examples=30, deadline=None)
    @given(st.sampled_from(["hyp", "ads"]), st.integers(2, 4), st.floats(-5, 5), st.integers(0, 2**31))
    def test_preserves_form(self, target, d, t, seed):
        rep = Ho.embed_representation(_source_rep(d, np.random.default_rng(seed)), target)
        out = Ho.bend_representation(rep, t, target)
        Q = Ho.form_matrix(out.signature)
        for g_in, g_out, M in zip(rep.generators, out.generators, out.matrices()):
            scale = max(1.0, np.abs(M).max() ** 2)
            assert np.abs(M.T @ Q @ M - Q).max() <= 1e-9 * scale
            if not g_in.mask:
                assert np.array_equal(g_in.matrix.entries, M)

    def test_precondition_extra_coordinate(self):
        d = 3
        sig = (d + 1, 1)
        A = np.zeros((d + 2, d + 2))
        A[d - 1, d], A[d, d - 1] = -0.3, 0.3      # rotation into the extra coordinate
        rep = Ho.Representation(sig, (Ho.Generator("x", Ho.IsometryMatrix(expm(A), sig), mask=True),))
        with pytest.raises(ValueError):
            Ho.bend_representation(rep, 0.5)

    def test_target_mismatch(self):
        rep = Ho.embed_representation(_source_rep(3, np.random.default_rng(1)), "hyp")
        with pytest.raises(ValueError):
            Ho.bend_representation(rep, 0.5, "ads")
