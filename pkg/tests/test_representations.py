import numpy as np
import pytest

from matlevy.covariation import adjoint, quadratic_variation, structural_covariation
from matlevy.hermitian import frobenius_norm
from matlevy.paths import (
    MatrixLevyPath,
    RankOneJumps,
    evaluate_path,
    sample_bgcd_gaussian_part,
    brownian_grid,
)
from matlevy.representations import (
    bgcd_covariation_pair,
    default_checkpoints,
    independence_probe,
    sample_signed_path,
    sample_subordinator_path,
    subordinator_to_vector_process,
    verify_representation,
    wiener_hopf_split,
)
from matlevy.scalar_laws import (
    CompoundPoissonLaw,
    ConstantJumps,
    GaussianLaw,
    NormalJumps,
    PoissonLaw,
)


class TestSubordinatorRepresentation:
    def test_pure_drift_identity(self):
        rng = np.random.default_rng(110)
        p = MatrixLevyPath(3, 1.0, np.eye(3), None, RankOneJumps.empty(3))
        x = subordinator_to_vector_process(p, rng)
        assert np.allclose(x.loading, np.eye(3))
        for t in (0.2, 1.0):
            assert np.allclose(quadratic_variation(x, t).value, t * np.eye(3))

    def test_single_projector_jump(self):
        rng = np.random.default_rng(111)
        u = np.array([0.6, 0.8j])
        jumps = RankOneJumps(np.array([0.5]), np.array([1.0]), u[None, :])
        p = MatrixLevyPath(2, 1.0, np.zeros((2, 2)), None, jumps)
        x = subordinator_to_vector_process(p, rng)
        val = quadratic_variation(x, 1.0).value
        assert np.allclose(val, np.outer(u, u.conj()), atol=1e-12)
        assert np.allclose(quadratic_variation(x, 0.4).value, 0.0)

    def test_random_paths_exact(self):
        rng = np.random.default_rng(112)
        for _ in range(25):
            d = int(rng.integers(1, 7))
            p = sample_subordinator_path(d, 1.0, rng)
            x = subordinator_to_vector_process(p, rng)
            rep = verify_representation(p, x, mode="quadratic")
            assert rep.max_discrepancy <= 1e-10

    def test_rejects_gaussian_component(self):
        rng = np.random.default_rng(113)
        p = sample_bgcd_gaussian_part(2, 1.0, brownian_grid(1.0), rng)
        with pytest.raises(ValueError, match="Gaussian"):
            subordinator_to_vector_process(p, rng)

    def test_rejects_negative_jumps(self):
        rng = np.random.default_rng(114)
        jumps = RankOneJumps(np.array([0.5]), np.array([-1.0]),
                             np.array([[1.0 + 0j, 0.0]]))
        p = MatrixLevyPath(2, 1.0, np.zeros((2, 2)), None, jumps)
        with pytest.raises(ValueError, match="positive"):
            subordinator_to_vector_process(p, rng)

    def test_rejects_indefinite_drift(self):
        rng = np.random.default_rng(115)
        p = MatrixLevyPath(2, 1.0, np.diag([1.0, -1.0]), None, RankOneJumps.empty(2))
        with pytest.raises(ValueError, match="PSD"):
            subordinator_to_vector_process(p, rng)


class TestWienerHopfSplit:
    def test_positive_path_gives_trivial_negative_part(self):
        rng = np.random.default_rng(116)
        p = sample_subordinator_path(3, 1.0, rng, jump_rate=5.0)
        x, y = wiener_hopf_split(p, rng)
        assert y.jumps.count == 0
        assert np.allclose(y.loading, 0.0)
        for t in (0.5, 1.0):
            assert np.allclose(quadratic_variation(y, t).value, 0.0)

    def test_diagonal_drift_split(self):
        rng = np.random.default_rng(117)
        p = MatrixLevyPath(2, 1.0, np.diag([1.0, -1.0]), None, RankOneJumps.empty(2))
        x, y = wiener_hopf_split(p, rng)
        for t in (0.3, 1.0):
            assert np.allclose(quadratic_variation(x, t).value, t * np.diag([1.0, 0.0]))
            assert np.allclose(quadratic_variation(y, t).value, t * np.diag([0.0, 1.0]))

    def test_random_signed_paths_exact(self):
        rng = np.random.default_rng(118)
        for _ in range(25):
            d = int(rng.integers(1, 7))
            p = sample_signed_path(d, 1.0, rng)
            x, y = wiener_hopf_split(p, rng)
            rep = verify_representation(p, x, y, mode="difference")
            assert rep.max_discrepancy <= 1e-10
            assert np.intersect1d(x.jumps.times, y.jumps.times).size == 0

    def test_shared_driver(self):
        rng = np.random.default_rng(119)
        p = sample_signed_path(2, 1.0, rng)
        x, y = wiener_hopf_split(p, rng)
        assert x.driver is y.driver

    def test_rejects_gaussian_component(self):
        rng = np.random.default_rng(120)
        p = sample_bgcd_gaussian_part(2, 1.0, brownian_grid(1.0), rng)
        with pytest.raises(ValueError, match="Gaussian"):
            wiener_hopf_split(p, rng)


class TestCovariationPair:
    def test_pure_drift_positive(self):
        rng = np.random.default_rng(121)
        x, y, m = bgcd_covariation_pair(3, GaussianLaw(0.0, 0.0), 1.0, 1.0, rng=rng)
        for t in (0.4, 1.0):
            val = structural_covariation(x, adjoint(y), t).value
            assert np.allclose(val, t * np.eye(3), atol=1e-14)
            assert np.allclose(val, evaluate_path(m, t))

    def test_pure_drift_negative(self):
        rng = np.random.default_rng(122)
        x, y, m = bgcd_covariation_pair(3, GaussianLaw(0.0, 0.0), -1.0, 1.0, rng=rng)
        val = structural_covariation(x, adjoint(y), 1.0).value
        assert np.allclose(val, -np.eye(3), atol=1e-14)

    def test_poisson_exact(self):
        rng = np.random.default_rng(123)
        x, y, m = bgcd_covariation_pair(5, PoissonLaw(1.0), 0.5, 1.0, rng=rng)
        rep = verify_representation(
            m, x, y, checkpoints=np.linspace(0.0, 1.0, 20), mode="pair"
        )
        assert rep.max_discrepancy <= 1e-10

    def test_signed_jumps_exact(self):
        rng = np.random.default_rng(124)
        law = CompoundPoissonLaw(2.0, NormalJumps(0.0, 1.0))
        for _ in range(10):
            x, y, m = bgcd_covariation_pair(4, law, -0.7, 1.0, rng=rng)
            rep = verify_representation(m, x, y, mode="pair")
            assert rep.max_discrepancy <= 1e-10


class TestVerifyRepresentation:
    def test_detects_injected_defect(self):
        rng = np.random.default_rng(125)
        p = sample_subordinator_path(2, 1.0, rng, jump_rate=3.0)
        x = subordinator_to_vector_process(p, rng)
        from matlevy.experiments import _inject_extra_jump

        bad = _inject_extra_jump(x, 0.9)
        rep = verify_representation(p, bad, checkpoints=np.array([1.0]),
                                    mode="quadratic")
        assert rep.max_discrepancy == pytest.approx(1.0, abs=1e-10)

    def test_checkpoint_validation(self):
        rng = np.random.default_rng(126)
        p = sample_subordinator_path(2, 1.0, rng)
        x = subordinator_to_vector_process(p, rng)
        with pytest.raises(ValueError, match="checkpoint"):
            verify_representation(p, x, checkpoints=np.array([1.5]), mode="quadratic")

    def test_mode_validation(self):
        rng = np.random.default_rng(127)
        p = sample_subordinator_path(2, 1.0, rng)
        x = subordinator_to_vector_process(p, rng)
        with pytest.raises(ValueError, match="mode"):
            verify_representation(p, x, mode="other")
        with pytest.raises(ValueError, match="second path"):
            verify_representation(p, x, mode="difference")

    def test_report_json(self):
        rng = np.random.default_rng(128)
        p = sample_subordinator_path(2, 1.0, rng)
        x = subordinator_to_vector_process(p, rng)
        rep = verify_representation(p, x, mode="quadratic")
        data = rep.to_json()
        assert data["mode"] == "quadratic"
        assert len(data["per_checkpoint"]) == len(data["checkpoints"])

    def test_default_checkpoints_cover_events(self):
        pts = default_checkpoints(1.0, np.array([0.25, 0.5]))
        for needed in (0.0, 0.125, 0.25, 0.375, 0.5, 0.75, 1.0):
            assert needed in pts


class TestIndependenceProbe:
    def test_deterministic_paths(self):
        rng = np.random.default_rng(129)
        splits = []
        for _ in range(120):
            p = MatrixLevyPath(2, 1.0, np.diag([1.0, -1.0]), None,
                               RankOneJumps.empty(2))
            splits.append(wiener_hopf_split(p, rng))
        probe = independence_probe(splits)
        assert probe.jump_times_disjoint
        assert probe.all_within_ci  # no finite correlations to flag
        assert np.all(np.isnan(probe.correlations))

    def test_symmetric_jump_law(self):
        # replicas of one fixed process law: drift and rate held constant
        rng = np.random.default_rng(130)
        drift = np.diag([0.5, -0.25])
        splits = []
        for _ in range(300):
            p = sample_signed_path(2, 1.0, rng, jump_rate=5.0, drift=drift)
            splits.append(wiener_hopf_split(p, rng))
        probe = independence_probe(splits)
        assert probe.jump_times_disjoint
        assert probe.all_within_ci
        assert probe.n_replicas == 300

    def test_requires_enough_replicas(self):
        with pytest.raises(ValueError, match="100"):
            independence_probe([])


class TestRandomPathGenerators:
    def test_subordinator_shape(self):
        rng = np.random.default_rng(131)
        p = sample_subordinator_path(4, 2.0, rng, jump_rate=3.0)
        assert p.horizon == 2.0
        assert np.linalg.eigvalsh(p.drift).min() >= -1e-12
        assert np.all(p.jumps.eigenvalues > 0)

    def test_signed_path_has_both_signs_eventually(self):
        rng = np.random.default_rng(132)
        signs = set()
        for _ in range(10):
            p = sample_signed_path(3, 1.0, rng, jump_rate=10.0)
            signs.update(np.sign(p.jumps.eigenvalues).astype(int))
        assert signs == {-1, 1}
