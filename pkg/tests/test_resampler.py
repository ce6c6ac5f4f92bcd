import numpy as np
import pytest

from latent_shift_lab.core.errors import ConfigError, MissingClassError, NonConvergenceError, ResampleError
from latent_shift_lab.eval import empirical_label_distribution, label_kl
from latent_shift_lab.models import Dataset, MarginalSet, ResampleSpec, ScmConfig
from latent_shift_lab.resampler import (
    as_classification,
    class_counts,
    domain_scale,
    resample_spec_from_dataset,
    save_marginals,
    solve_marginals,
    subsample,
)
from latent_shift_lab.scm import generate


def _spec(K=4, C=7, target=0.3, seed=0, count=500):
    return ResampleSpec(K=K, C=C, target_kl=target, available_counts=[[count] * C] * K, seed=seed)


def _manifest(counts: list[list[int]]) -> Dataset:
    """Labeled rows with the given per-domain class counts; every domain is a source domain."""
    domains, labels = [], []
    for u, row in enumerate(counts):
        for c, n in enumerate(row):
            domains += [u] * n
            labels += [c] * n
    n = len(labels)
    return Dataset(
        task="classification", n_classes=len(counts[0]),
        x=np.arange(2.0 * n).reshape(n, 2), y=np.array(labels, dtype=float), domains=np.array(domains),
    )


class TestSolveMarginals:
    def test_zero_target_gives_uniform(self):
        marginals = solve_marginals(_spec(target=0.0))
        np.testing.assert_allclose(marginals.distributions, np.full((4, 7), 1 / 7), atol=1e-15)
        assert marginals.max_residual(0.0) == 0.0

    def test_single_class_cannot_shift(self):
        with pytest.raises(ResampleError):
            solve_marginals(_spec(C=1))

    def test_hits_target_kl(self):
        marginals = solve_marginals(_spec(target=0.3))
        assert marginals.max_residual(0.3) <= 0.05
        for i in range(4):
            for j in range(4):
                if i != j:
                    assert 0.25 <= label_kl(marginals.distributions[i], marginals.distributions[j]) <= 0.35

    def test_simplex_and_floor(self):
        marginals = solve_marginals(_spec(target=0.5, seed=3))
        for p in marginals.distributions:
            assert abs(sum(p) - 1.0) <= 1e-12
            assert min(p) >= 1e-6 * (1 - 1e-9)

    def test_deterministic_per_seed(self):
        assert solve_marginals(_spec(seed=4)) == solve_marginals(_spec(seed=4))

    def test_iteration_budget_exhausted(self):
        with pytest.raises(NonConvergenceError) as info:
            solve_marginals(_spec(target=0.7), max_iterations=1)
        assert info.value.best_residual > 0.05

    @pytest.mark.slow
    @pytest.mark.parametrize("target", [0.3, 0.5, 0.7])
    def test_converges_for_most_seeds(self, target):
        hits = 0
        for seed in range(10):
            try:
                hits += solve_marginals(_spec(target=target, seed=seed)).max_residual(target) <= 0.05
            except NonConvergenceError:
                pass
        assert hits >= 9


class TestDomainScale:
    def test_largest_feasible_scale(self):
        p = np.array([0.5, 0.5])
        assert domain_scale(p, np.array([10, 100])) == 21

    def test_floor_respects_availability(self, rng):
        for _ in range(20):
            p = rng.dirichlet(np.ones(5))
            available = rng.integers(1, 200, size=5)
            n = domain_scale(p, available)
            assert np.all(np.floor(n * p) <= available)
            assert np.any(np.floor((n + 1) * p) > available)


class TestSubsample:
    def test_counts_are_exact_and_indices_are_a_subset(self):
        dataset = _manifest([[300, 200, 100], [100, 200, 300]])
        marginals = MarginalSet(distributions=[[0.5, 0.3, 0.2], [0.2, 0.3, 0.5]], kl_matrix=[[0, 0], [0, 0]])
        result = subsample(dataset, marginals, seed=1)
        for u, (p, n_u) in enumerate(zip(marginals.distributions, result.scales)):
            expected = np.floor(n_u * np.array(p)).astype(int).tolist()
            assert result.class_counts[u] == expected
            assert class_counts(result.dataset)[u] == expected
        assert set(result.indices.tolist()) <= set(range(dataset.n_samples))
        np.testing.assert_array_equal(result.dataset.x, dataset.x[result.indices])

    def test_empirical_marginals_keep_nearly_everything(self):
        dataset = _manifest([[250, 250, 500]])
        marginals = MarginalSet(distributions=[[0.25, 0.25, 0.5]], kl_matrix=[[0.0]])
        result = subsample(dataset, marginals, seed=0)
        assert result.indices.size >= 999

    def test_same_seed_same_indices(self):
        dataset = _manifest([[300, 300], [300, 300]])
        marginals = MarginalSet(distributions=[[0.7, 0.3], [0.3, 0.7]], kl_matrix=[[0, 0], [0, 0]])
        assert np.array_equal(subsample(dataset, marginals, 5).indices, subsample(dataset, marginals, 5).indices)

    def test_missing_required_class_names_domain_and_class(self):
        dataset = _manifest([[100, 100], [200, 0]])
        marginals = MarginalSet(distributions=[[0.5, 0.5], [0.5, 0.5]], kl_matrix=[[0, 0], [0, 0]])
        with pytest.raises(MissingClassError) as info:
            subsample(dataset, marginals, seed=0)
        assert (info.value.domain_id, info.value.class_id) == (1, 1)

    def test_resampled_synthetic_data_tracks_target_marginals(self):
        dataset = as_classification(generate(ScmConfig.benchmark(seed=1, samples_per_domain=2000)), 7)
        marginals = solve_marginals(resample_spec_from_dataset(dataset, 0.3, seed=1))
        result = subsample(dataset, marginals, seed=1)
        for u, n_u in enumerate(result.scales):
            if n_u >= 500:
                rows = result.dataset.domains == u
                labels = result.dataset.evaluation_labels()[rows].astype(int)
                achieved = empirical_label_distribution(labels, 7)
                assert label_kl(achieved, marginals.distributions[u]) < 0.05


class TestSpecFromDataset:
    def test_counts_per_domain_and_class(self):
        spec = resample_spec_from_dataset(_manifest([[1, 2], [3, 4]]), 0.3, seed=2)
        assert (spec.K, spec.C, spec.seed) == (2, 2, 2)
        assert spec.available_counts == [[1, 2], [3, 4]]

    def test_regression_needs_class_count(self, small_dataset):
        with pytest.raises(ConfigError):
            as_classification(small_dataset)

    def test_marginals_export(self, tmp_path):
        marginals = solve_marginals(_spec(target=0.0))
        path = save_marginals(tmp_path / "marginals.json", marginals)
        assert MarginalSet.model_validate_json(path.read_text()) == marginals
