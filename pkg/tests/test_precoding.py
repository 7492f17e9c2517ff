import numpy as np
import pytest

from onebit.channel import draw_channel
from onebit.lp import LpStatus, solve
from onebit.precoding import (
    assemble_msm_lp,
    brute_force_msm,
    build_modified_channel,
    build_real_matrices,
    msm_precode,
    quantize,
    wf_matrix,
    wf_precode,
)
from onebit.pskmod import PskConstellation, detect, min_margin

INV_SQRT2 = 1 / np.sqrt(2)
O4 = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) * INV_SQRT2


def random_instance(rng, M, N, D):
    const = PskConstellation(D)
    H = draw_channel(M, N, rng)
    s = const.points[rng.integers(0, D, M)]
    return H, s, const


class TestModifiedChannel:
    def test_identity_rotation(self):
        H = draw_channel(3, 5, 0)
        assert np.array_equal(build_modified_channel(H, np.ones(3)), H)

    def test_conjugate_of_j(self):
        H = draw_channel(1, 4, 1)
        assert np.allclose(build_modified_channel(H, [1j]), -1j * H)

    def test_rotated_coordinates(self):
        rng = np.random.default_rng(2)
        H, s, _ = random_instance(rng, 4, 6, 8)
        Ht = build_modified_channel(H, s)
        x = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        assert np.allclose(Ht @ x, (H @ x) * np.conj(s))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            build_modified_channel(np.ones((2, 3)), [1, 1, 1])

    def test_non_unit_symbols(self):
        with pytest.raises(ValueError):
            build_modified_channel(np.ones((2, 3)), [1, 2])


class TestRealMatrices:
    def test_real_channel(self):
        Ht = np.array([[1.0, 2.0], [3.0, 4.0]])
        g = build_real_matrices(Ht)
        assert np.array_equal(g.B, np.hstack([np.zeros((2, 2)), Ht]))
        assert np.array_equal(g.A, np.hstack([Ht, np.zeros((2, 2))]))

    def test_pure_imaginary(self):
        g = build_real_matrices(1j * np.eye(3))
        assert np.array_equal(g.A, np.hstack([np.zeros((3, 3)), -np.eye(3)]))
        assert np.array_equal(g.B, np.hstack([np.eye(3), np.zeros((3, 3))]))

    def test_reconstruction(self):
        rng = np.random.default_rng(3)
        Ht = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
        g = build_real_matrices(Ht)
        for _ in range(100):
            x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            xp = np.concatenate([x.real, x.imag])
            assert np.allclose(g.A @ xp + 1j * (g.B @ xp), Ht @ x)


class TestAssemble:
    def test_full_size_dimensions(self):
        H, s, const = random_instance(np.random.default_rng(0), 16, 128, 4)
        p = assemble_msm_lp(build_real_matrices(build_modified_channel(H, s), const.theta), 128, 16)
        assert p.G.shape == (544, 257)
        assert p.c.shape == (257,) and p.h.shape == (544,)
        assert p.c[-1] == 1 and not np.any(p.c[:-1])
        assert np.all(p.h[:32] == 0) and np.allclose(p.h[32:], INV_SQRT2)

    def test_origin_feasible(self):
        H, s, const = random_instance(np.random.default_rng(1), 4, 8, 8)
        p = assemble_msm_lp(build_real_matrices(build_modified_channel(H, s), const.theta))
        assert np.all(p.G @ np.zeros(17) <= p.h)

    def test_hand_expanded_rows(self):
        # Ht = [1+2j, 3-1j]: A = [1, 3, -2, 1], B = [2, -1, 1, 3], tan(pi/4) = 1
        g = build_real_matrices(np.array([[1 + 2j, 3 - 1j]]), np.pi / 4)
        p = assemble_msm_lp(g, 2, 1)
        r2 = np.sqrt(2)
        assert np.allclose(p.G[0], [1, -4, 3, 2, r2])
        assert np.allclose(p.G[1], [-3, -2, 1, -4, r2])
        assert np.array_equal(p.G[2:6, :4], np.eye(4)) and np.array_equal(p.G[6:, :4], -np.eye(4))
        assert not np.any(p.G[2:, 4])

    def test_dimension_check(self):
        g = build_real_matrices(np.ones((2, 3)))
        with pytest.raises(ValueError):
            assemble_msm_lp(g, 4, 2)


class TestMsm:
    def test_scalar_corner(self):
        const = PskConstellation(4)
        s = np.array([(1 + 1j) * INV_SQRT2])
        tv = msm_precode(np.array([[1.0 + 0j]]), s, const)
        assert tv.lp.optimal
        assert np.allclose(tv.x, s, atol=1e-7)
        assert tv.delta_star == pytest.approx(np.sin(np.pi / 4), abs=1e-7)
        xq, d = brute_force_msm(np.array([[1.0 + 0j]]), s, const)
        assert np.allclose(xq, s) and d == pytest.approx(np.sin(np.pi / 4))

    @pytest.mark.parametrize("D", [4, 8, 16])
    def test_properties(self, D):
        rng = np.random.default_rng(D)
        for _ in range(20):
            H, s, const = random_instance(rng, 4, 16, D)
            tv = msm_precode(H, s, const)
            assert tv.lp.status is LpStatus.OPTIMAL
            assert tv.delta_star >= -1e-8
            assert np.all(np.abs(tv.x.real) <= INV_SQRT2 + 1e-8)
            assert np.all(np.abs(tv.x.imag) <= INV_SQRT2 + 1e-8)
            # tightness: the LP optimum is the worst-user margin
            assert min_margin(H @ tv.x, s, const) == pytest.approx(tv.delta_star, abs=1e-6)
            if tv.delta_star > 0:
                assert np.array_equal(detect(H @ tv.x, const), const.index_of(s))

    def test_relaxation_bounds_discrete_optimum(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            H, s, const = random_instance(rng, 2, 4, 4)
            assert msm_precode(H, s, const).delta_star >= brute_force_msm(H, s, const)[1] - 1e-6

    def test_simplex_backend_agrees(self):
        from onebit.lp import LpOptions

        rng = np.random.default_rng(12)
        H, s, const = random_instance(rng, 4, 16, 8)
        a = msm_precode(H, s, const)
        b = msm_precode(H, s, const, LpOptions(method="simplex"))
        assert a.delta_star == pytest.approx(b.delta_star, abs=1e-6)

    def test_matches_direct_solve(self):
        rng = np.random.default_rng(13)
        H, s, const = random_instance(rng, 3, 6, 8)
        p = assemble_msm_lp(build_real_matrices(build_modified_channel(H, s), const.theta))
        assert msm_precode(H, s, const).delta_star == pytest.approx(solve(p).objective)


class TestQuantize:
    def test_componentwise_sign(self):
        assert quantize(0.3 - 0.9j) == pytest.approx((1 - 1j) * INV_SQRT2)

    def test_alphabet_fixed_points(self):
        assert np.array_equal(quantize(O4), O4)

    def test_sign_zero(self):
        assert quantize(0j) == pytest.approx((1 + 1j) * INV_SQRT2)
        assert quantize(-0.0 + 0j) == pytest.approx((1 + 1j) * INV_SQRT2)

    def test_idempotent_and_unit_modulus(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
        q = quantize(x)
        assert np.array_equal(quantize(q), q)
        assert np.allclose(np.abs(q), 1.0)
        assert np.all(np.isin(np.round(q, 12), np.round(O4, 12)))

    @pytest.mark.parametrize("Ptx", [0.1, 1.0, 128.0, 1e4])
    def test_power_conservation(self, Ptx):
        N = 128
        x = np.random.default_rng(1).standard_normal(N) + 0j
        tx = np.sqrt(Ptx / N) * quantize(x)
        assert np.sum(np.abs(tx) ** 2) == pytest.approx(Ptx, rel=1e-12)


class TestWienerFilter:
    def test_scalar_limit(self):
        s = np.array([(1 - 1j) * INV_SQRT2])
        x = wf_precode(np.array([[2.0 + 0j]]), s, Ptx=1e12).x
        assert np.allclose(x / np.abs(x), s)
        # normalized to E||x||^2 = N = 1
        assert np.abs(x[0]) == pytest.approx(1.0)

    def test_matched_filter_limit(self):
        rng = np.random.default_rng(2)
        H, s, _ = random_instance(rng, 4, 16, 4)
        x = wf_precode(H, s, Ptx=1.0, noise_var=1e9).x
        mf = H.conj().T @ s
        cos = np.abs(np.vdot(x, mf)) / (np.linalg.norm(x) * np.linalg.norm(mf))
        assert cos == pytest.approx(1.0, abs=1e-6)

    def test_normalization(self):
        H = draw_channel(8, 64, 3)
        P = wf_matrix(H, Ptx=10.0)
        assert np.linalg.norm(P) ** 2 == pytest.approx(64.0)

    def test_zero_noise_detection(self):
        rng = np.random.default_rng(4)
        N, M = 64, 4
        const = PskConstellation(4)
        failures = 0
        for _ in range(100):
            H, s, _ = random_instance(rng, M, N, 4)
            x = wf_precode(H, s, Ptx=N).x
            y = np.sqrt(N / N) * (H @ x)
            failures += not np.array_equal(detect(y, const), const.index_of(s))
        assert failures <= 1

    def test_rank_deficient(self):
        H = np.ones((2, 2), dtype=complex)
        with pytest.raises(np.linalg.LinAlgError):
            wf_precode(H, O4[:2], Ptx=1e20)


class TestBruteForce:
    def test_refuses_large_n(self):
        with pytest.raises(ValueError):
            brute_force_msm(np.ones((1, 9)), [1.0 + 0j], PskConstellation(4))

    def test_exhaustive_value(self):
        # oracle: direct loop over all 4^N candidates
        rng = np.random.default_rng(5)
        H, s, const = random_instance(rng, 2, 3, 8)
        best = -np.inf
        for a in O4:
            for b in O4:
                for c in O4:
                    best = max(best, min_margin(H @ np.array([a, b, c]), s, const))
        xq, d = brute_force_msm(H, s, const)
        assert d == pytest.approx(best)
        assert min_margin(H @ xq, s, const) == pytest.approx(best)

    def test_rotational_symmetry(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            H, s, const = random_instance(rng, 2, 3, 4)
            d0 = brute_force_msm(H, s, const)[1]
            d1 = brute_force_msm(H, 1j * s, const)[1]
            assert d1 == pytest.approx(d0, abs=1e-12)
