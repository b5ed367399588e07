import math

import numpy as np
import pytest

from matlevy.covariation import (
    JumpPath,
    adjoint,
    bilinearity_check,
    quadratic_variation,
    realized_covariation,
    sample_on_grid,
    structural_covariation,
    with_drift,
)
from matlevy.hermitian import as_hermitian, frobenius_norm
from matlevy.paths import (
    KroneckerGaussianPart,
    MatrixLevyPath,
    RankOneJumps,
    ScalarIdentityGaussianPart,
    VectorJumps,
    VectorLevyPath,
    brownian_grid,
    evaluate_path,
    sample_bgcd_compound_poisson,
    sample_bgcd_gaussian_part,
    sample_matrix_driver,
    sample_scalar_driver,
    sample_uniform_sphere,
    sample_vector_driver,
)
from matlevy.representations import sample_signed_path
from matlevy.scalar_laws import PoissonLaw


def vector_brownian(d, rng, grid=None, loading=None):
    grid = brownian_grid(1.0) if grid is None else grid
    driver = sample_vector_driver(d, grid, rng)
    loading = np.eye(d) if loading is None else loading
    return VectorLevyPath(d, float(grid[-1]), np.zeros(d), loading, driver,
                          VectorJumps.empty(d))


def random_jump_path(rng, rows, cols, horizon=1.0, n_max=8, times=None):
    if times is None:
        n = int(rng.integers(1, n_max))
        times = np.sort(rng.uniform(0.05, horizon, size=n))
        while np.unique(times).size != n:
            times = np.sort(rng.uniform(0.05, horizon, size=n))
    jumps = rng.normal(size=(len(times), rows, cols)) + 1j * rng.normal(
        size=(len(times), rows, cols)
    )
    return JumpPath(rows, cols, horizon, np.asarray(times), jumps)


def dense_jump_covariation(x: JumpPath, y: JumpPath, t: float) -> np.ndarray:
    """Direct-expansion oracle: sum of jump products over common times."""
    out = np.zeros((x.rows, y.cols), dtype=complex)
    for i, ti in enumerate(x.times):
        if ti > t:
            continue
        for j, tj in enumerate(y.times):
            if tj == ti:
                out += x.jumps[i] @ y.jumps[j]
    return out


class TestSharedBrownian:
    def test_vector_bm_qv_is_t_identity(self):
        rng = np.random.default_rng(80)
        b = vector_brownian(3, rng)
        for t in (0.25, 1.0):
            res = structural_covariation(b, adjoint(b), t)
            assert np.allclose(res.value, t * np.eye(3), atol=1e-14)
            assert np.allclose(res.continuous, res.value)
            assert np.allclose(res.jump, 0.0)

    def test_shared_vs_independent_drivers(self):
        rng = np.random.default_rng(81)
        grid = brownian_grid(1.0)
        driver = sample_vector_driver(2, grid, rng)
        a = np.array([[2.0, 0.0], [0.0, 1.0]])
        c = np.array([[1.0, 1.0], [0.0, 1.0]])
        x = VectorLevyPath(2, 1.0, np.zeros(2), a, driver, VectorJumps.empty(2))
        y_shared = VectorLevyPath(2, 1.0, np.zeros(2), c, driver, VectorJumps.empty(2))
        y_indep = VectorLevyPath(
            2, 1.0, np.zeros(2), c, sample_vector_driver(2, grid, rng),
            VectorJumps.empty(2),
        )
        shared = structural_covariation(x, adjoint(y_shared), 1.0).value
        assert np.allclose(shared, a @ c.conj().T, atol=1e-14)
        indep = structural_covariation(x, adjoint(y_indep), 1.0).value
        assert np.allclose(indep, 0.0)

    def test_matrix_bm_realized_qv(self):
        # standard d x q matrix Brownian motion has [B, B*](t) = q t I_d
        rng = np.random.default_rng(82)
        d = q = 2
        m = 4000
        grid = np.linspace(0.0, 1.0, m + 1)
        dt = 1.0 / m
        incr = (rng.normal(size=(m, d, q)) + 1j * rng.normal(size=(m, d, q))) * math.sqrt(dt / 2)
        values = np.concatenate([np.zeros((1, d, q), dtype=complex), np.cumsum(incr, axis=0)])
        realized = realized_covariation(values, values.conj().transpose(0, 2, 1))
        assert frobenius_norm(realized - q * np.eye(d)) <= 0.12


class TestKronecker:
    def test_structural_qv_closed_form(self):
        rng = np.random.default_rng(83)
        s1 = np.array([[2.0, 0.5], [0.5, 1.0]])
        s2 = np.array([[1.0, 0.0], [0.0, 3.0]])
        grid = brownian_grid(1.0, 0.5)
        gauss = KroneckerGaussianPart(s1, s2, sample_matrix_driver(2, 2, grid, rng))
        p = MatrixLevyPath(2, 1.0, np.zeros((2, 2)), gauss, RankOneJumps.empty(2))
        res = quadratic_variation(p, 0.7)
        assert np.allclose(res.continuous, 0.7 * np.trace(s2) * s1)

    def test_realized_matches_closed_form(self):
        rng = np.random.default_rng(84)
        s1 = np.array([[2.0, 0.5], [0.5, 1.0]])
        s2 = np.array([[1.0, 0.0], [0.0, 3.0]])
        grid = np.linspace(0.0, 1.0, 20_001)
        gauss = KroneckerGaussianPart(s1, s2, sample_matrix_driver(2, 2, grid, rng))
        path_vals = np.einsum(
            "ij,kjl,lm->kim", gauss.sqrt_left, gauss.driver.values, gauss.sqrt_right
        )
        realized = realized_covariation(path_vals, path_vals.conj().transpose(0, 2, 1))
        assert frobenius_norm(realized - np.trace(s2) * s1) <= 0.25


class TestRealized:
    def test_pure_jump_grid_interior_exact(self):
        rng = np.random.default_rng(85)
        grid = np.linspace(0.0, 1.0, 11)
        # one jump strictly inside distinct cells
        times = np.array([0.05, 0.25, 0.55, 0.95])
        x = random_jump_path(rng, 2, 3, times=times)
        y = random_jump_path(rng, 3, 2, times=times)
        xs = np.stack([
            x.jumps[x.times <= t].sum(axis=0) if np.any(x.times <= t)
            else np.zeros((2, 3), dtype=complex)
            for t in grid
        ])
        ys = np.stack([
            y.jumps[y.times <= t].sum(axis=0) if np.any(y.times <= t)
            else np.zeros((3, 2), dtype=complex)
            for t in grid
        ])
        realized = realized_covariation(xs, ys)
        structural = structural_covariation(x, y, 1.0)
        # telescoping makes the two sums equal term by term; the only
        # difference left is (S + jump) - S rounding in the samples
        assert np.allclose(realized, structural.jump, rtol=1e-12, atol=1e-12)

    def test_scalar_bm_qv(self):
        rng = np.random.default_rng(86)
        m = 10_000
        incr = rng.normal(size=m) * math.sqrt(1.0 / m)
        vals = np.concatenate([[0.0], np.cumsum(incr)])[:, None, None]
        realized = realized_covariation(vals, vals)
        # realized QV of BM has variance 2 dt t, so sd ~ 0.014 here
        assert abs(realized[0, 0].real - 1.0) <= 0.05

    def test_constant_paths(self):
        vals = np.ones((5, 2, 2), dtype=complex)
        assert np.allclose(realized_covariation(vals, vals), 0.0)

    def test_grid_mismatch(self):
        vals = np.zeros((5, 1, 1))
        with pytest.raises(ValueError, match="grid"):
            realized_covariation(vals, vals, np.arange(5.0), np.arange(5.0) * 2)
        with pytest.raises(ValueError, match="grid"):
            realized_covariation(vals, np.zeros((6, 1, 1)))

    def test_convergence_rate(self):
        # realized QV error shrinks with the grid step (rate sqrt(dt))
        rng = np.random.default_rng(87)
        wins = 0
        for _ in range(50):
            coarse_err = abs(
                np.sum(rng.normal(size=1000, scale=math.sqrt(1e-3)) ** 2) - 1.0
            )
            fine_err = abs(
                np.sum(rng.normal(size=100_000, scale=math.sqrt(1e-5)) ** 2) - 1.0
            )
            wins += coarse_err > fine_err
        assert wins >= 45


class TestQuadraticVariation:
    def test_bgcd_gaussian_closed_form(self):
        rng = np.random.default_rng(88)
        p = sample_bgcd_gaussian_part(3, 1.0, brownian_grid(1.0, 0.25), rng)
        res = quadratic_variation(p, 0.8)
        assert np.allclose(res.value, 0.8 * np.eye(3), atol=1e-14)

    def test_scalar_identity_closed_form(self):
        rng = np.random.default_rng(89)
        gauss = ScalarIdentityGaussianPart(sample_scalar_driver(brownian_grid(1.0), rng))
        p = MatrixLevyPath(2, 1.0, np.zeros((2, 2)), gauss, RankOneJumps.empty(2))
        assert np.allclose(quadratic_variation(p, 0.5).value, 0.5 * np.eye(2))

    def test_single_negative_jump(self):
        jumps = RankOneJumps(np.array([0.4]), np.array([-2.0]),
                             np.array([[1.0 + 0j, 0.0]]))
        p = MatrixLevyPath(2, 1.0, np.zeros((2, 2)), None, jumps)
        res = quadratic_variation(p, 1.0)
        expected = 4.0 * np.outer([1.0, 0.0], [1.0, 0.0])
        assert np.allclose(res.value, expected)

    def test_drift_only_is_zero(self):
        p = MatrixLevyPath(2, 1.0, np.eye(2), None, RankOneJumps.empty(2))
        assert np.allclose(quadratic_variation(p, 1.0).value, 0.0)

    def test_drift_invariance_bitwise(self):
        rng = np.random.default_rng(90)
        p = sample_bgcd_compound_poisson(3, PoissonLaw(2.0), 0.5, 1.0, rng=rng)
        q = with_drift(p, as_hermitian(np.diag([5.0, -1.0, 0.0])))
        a = quadratic_variation(p, 1.0)
        b = quadratic_variation(q, 1.0)
        assert np.array_equal(a.value, b.value)

    def test_psd(self):
        rng = np.random.default_rng(91)
        for _ in range(100):
            d = int(rng.integers(1, 5))
            p = sample_signed_path(d, 1.0, rng, jump_rate=8.0)
            val = quadratic_variation(p, 1.0).value
            assert np.linalg.eigvalsh(as_hermitian(val)).min() >= -1e-10

    def test_value_splits(self):
        rng = np.random.default_rng(92)
        p = sample_bgcd_compound_poisson(2, PoissonLaw(3.0), 0.1, 1.0, rng=rng)
        res = quadratic_variation(p, 1.0)
        assert np.linalg.norm(res.value - res.continuous - res.jump) <= 1e-12

    def test_result_json_has_both_parts(self):
        rng = np.random.default_rng(107)
        p = sample_bgcd_compound_poisson(2, PoissonLaw(3.0), 0.1, 1.0, rng=rng)
        data = quadratic_variation(p, 1.0).to_json()
        assert data["method"] == "structural"
        for key in ("value", "continuous", "jump"):
            arr = np.asarray(data[key])
            assert arr.shape == (2, 2, 2)  # (rows, cols, re/im)

    def test_vector_qv_loading(self):
        rng = np.random.default_rng(93)
        a = np.array([[1.0, 0.5], [0.0, 2.0]])
        x = vector_brownian(2, rng, loading=a)
        assert np.allclose(quadratic_variation(x, 1.0).value, a @ a.conj().T)


class TestJumpCalculus:
    def test_transpose_identity(self):
        rng = np.random.default_rng(94)
        for _ in range(100):
            rows, k, cols = (int(rng.integers(1, 4)) for _ in range(3))
            share = np.sort(rng.uniform(0.05, 1.0, size=3))
            x = random_jump_path(rng, rows, k, times=share)
            y = random_jump_path(rng, k, cols, times=share)
            lhs = structural_covariation(x, y, 1.0).value.T
            rhs = structural_covariation(y.transpose(), x.transpose(), 1.0).value
            assert frobenius_norm(lhs - rhs) <= 1e-10

    def test_dense_expansion_oracle(self):
        rng = np.random.default_rng(95)
        for _ in range(25):
            share = np.sort(rng.uniform(0.05, 1.0, size=4))
            x = random_jump_path(rng, 3, 2, times=share)
            # y jumps at two shared times and two private ones
            y_times = np.sort(np.concatenate([share[:2], rng.uniform(0.05, 1.0, 2)]))
            y = random_jump_path(rng, 2, 3, times=y_times)
            got = structural_covariation(x, y, 0.9).value
            want = dense_jump_covariation(x, y, 0.9)
            assert frobenius_norm(got - want) <= 1e-12

    def test_matrix_rank_one_pair_matches_dense(self):
        rng = np.random.default_rng(96)
        times = np.sort(rng.uniform(0.05, 1.0, size=5))
        d = 3
        lam_x = rng.normal(size=5)
        lam_y = rng.normal(size=5)
        ux = sample_uniform_sphere(d, rng, size=5)
        uy = sample_uniform_sphere(d, rng, size=5)
        px = MatrixLevyPath(d, 1.0, np.zeros((d, d)), None,
                            RankOneJumps(times, lam_x, ux))
        py = MatrixLevyPath(d, 1.0, np.zeros((d, d)), None,
                            RankOneJumps(times, lam_y, uy))
        got = structural_covariation(px, py, 1.0).value
        want = dense_jump_covariation(
            JumpPath.from_matrix_path(px), JumpPath.from_matrix_path(py), 1.0
        )
        assert frobenius_norm(got - want) <= 1e-12


class TestBilinearity:
    def test_identity_matrices(self):
        rng = np.random.default_rng(97)
        share = np.sort(rng.uniform(0.05, 1.0, size=3))
        x = random_jump_path(rng, 2, 2, times=share)
        y = random_jump_path(rng, 2, 2, times=share)
        rep = bilinearity_check(np.eye(2), x, y, np.eye(2), 1.0)
        assert rep.discrepancy <= 1e-12

    def test_zero_matrix(self):
        rng = np.random.default_rng(98)
        x = random_jump_path(rng, 2, 2)
        y = random_jump_path(rng, 2, 2)
        rep = bilinearity_check(np.zeros((2, 2)), x, y, np.eye(2), 1.0)
        assert np.allclose(rep.lhs, 0.0) and np.allclose(rep.rhs, 0.0)

    def test_random_transforms(self):
        rng = np.random.default_rng(99)
        for _ in range(100):
            share = np.sort(rng.uniform(0.05, 1.0, size=int(rng.integers(1, 6))))
            x = random_jump_path(rng, 3, 2, times=share)
            y = random_jump_path(rng, 2, 3, times=share)
            a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
            c = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
            rep = bilinearity_check(a, x, y, c, 1.0)
            assert rep.discrepancy <= 1e-10

    def test_matrix_path_inputs(self):
        rng = np.random.default_rng(100)
        p = sample_bgcd_compound_poisson(2, PoissonLaw(3.0), 0.0, 1.0, rng=rng)
        rep = bilinearity_check(np.eye(2), p, p, np.eye(2), 1.0)
        assert rep.discrepancy <= 1e-12


class TestDispatchErrors:
    def test_vector_pair_requires_adjoint(self):
        rng = np.random.default_rng(101)
        x = vector_brownian(2, rng)
        with pytest.raises(TypeError, match="adjoint"):
            structural_covariation(x, x, 1.0)

    def test_distinct_gaussian_matrix_paths_rejected(self):
        rng = np.random.default_rng(102)
        a = sample_bgcd_gaussian_part(2, 1.0, brownian_grid(1.0), rng)
        b = sample_bgcd_gaussian_part(2, 1.0, brownian_grid(1.0), rng)
        with pytest.raises(ValueError, match="declared driver relationship"):
            structural_covariation(a, b, 1.0)

    def test_jump_shape_mismatch(self):
        rng = np.random.default_rng(103)
        x = random_jump_path(rng, 2, 2)
        y = random_jump_path(rng, 3, 2)
        with pytest.raises(ValueError, match="shape"):
            structural_covariation(x, y, 1.0)


class TestSampleOnGrid:
    def test_matrix_and_adjoint(self):
        rng = np.random.default_rng(104)
        p = sample_bgcd_compound_poisson(2, PoissonLaw(2.0), 0.3, 1.0, rng=rng)
        grid = np.linspace(0.0, 1.0, 5)
        vals = sample_on_grid(p, grid)
        adj = sample_on_grid(p, grid, as_adjoint=True)
        assert vals.shape == (5, 2, 2)
        assert np.allclose(adj, vals.conj().transpose(0, 2, 1))

    def test_vector_shapes(self):
        rng = np.random.default_rng(105)
        x = vector_brownian(3, rng, grid=np.linspace(0.0, 1.0, 4))
        cols = sample_on_grid(x, np.linspace(0.0, 1.0, 4))
        rows = sample_on_grid(x, np.linspace(0.0, 1.0, 4), as_adjoint=True)
        assert cols.shape == (4, 3, 1)
        assert rows.shape == (4, 1, 3)

    def test_realized_matches_structural_for_mixed_path(self):
        # vector path with Brownian part + jumps: realized [X, X*] over a
        # fine grid approximates the structural value
        rng = np.random.default_rng(106)
        grid = np.linspace(0.0, 1.0, 2001)
        x = vector_brownian(2, rng, grid=grid)
        jumps = VectorJumps(np.array([0.30001, 0.70002]),
                            np.array([[1.0, 0.5j], [0.25, -0.5]], dtype=complex))
        x = VectorLevyPath(2, 1.0, np.zeros(2), x.loading, x.driver, jumps)
        xs = sample_on_grid(x, grid)
        realized = realized_covariation(xs, sample_on_grid(x, grid, as_adjoint=True))
        structural = structural_covariation(x, adjoint(x), 1.0).value
        assert frobenius_norm(realized - structural) <= 0.2
