import math

import numpy as np
import pytest
from pydantic import ValidationError

from latent_shift_lab.core.errors import DataIOError, ScmError
from latent_shift_lab.models import DomainSpec, ScmConfig
from latent_shift_lab.scm import (
    build_generator,
    counterexample_report,
    derive_seed,
    discretize_labels,
    generate,
    latents_path,
    load_dataset,
    sample_domain_specs,
    sample_noise,
    save_dataset,
    variability_matrix,
)
from latent_shift_lab.scm.functions import MixingMlp, MonotoneMap


class TestSeeds:
    def test_derive_seed_is_stable_and_separates_streams(self):
        assert derive_seed(5, "noise", 1) == derive_seed(5, "noise", 1)
        assert derive_seed(5, "noise", 1) != derive_seed(5, "noise", 2)
        assert derive_seed(5, "noise", 1) != derive_seed(5, "mixing", 1)
        assert 0 <= derive_seed(2**64 - 1, "init") < 2**64


class TestDomainSpecs:
    def test_parameters_in_documented_ranges(self, small_scm):
        specs = sample_domain_specs(small_scm)
        assert [s.domain_id for s in specs] == list(range(5))
        for s in specs:
            assert all(1.0 <= m <= 2.0 for m in s.means)
            assert all(0.3 <= v <= 1.0 for v in s.variances)

    def test_sampled_means_average_to_the_range_midpoint(self):
        config = ScmConfig(d_c=2, d_s=2, d_x=4, n_domains=100_000, samples_per_domain=1, seed=4)
        specs = sample_domain_specs(config)
        means = np.array([s.means for s in specs])
        variances = np.array([s.variances for s in specs])
        assert abs(means.mean() - 1.5) < 3 * (1.0 / math.sqrt(12)) / math.sqrt(1e5)
        assert abs(variances.mean() - 0.65) < 3 * (0.7 / math.sqrt(12)) / math.sqrt(1e5)

    def test_zero_variance_rejected(self):
        with pytest.raises(ValidationError):
            DomainSpec(domain_id=0, means=[0.0], variances=[0.0])

    def test_noise_moments(self):
        spec = DomainSpec(domain_id=0, means=[1.5, 1.0], variances=[0.5, 0.3])
        noise = sample_noise(spec, 20000, seed=1)
        np.testing.assert_allclose(noise.mean(axis=0), [1.5, 1.0], atol=0.03)
        np.testing.assert_allclose(noise.var(axis=0), [0.5, 0.3], rtol=0.05)


class TestConfig:
    def test_observation_dim_too_small(self):
        with pytest.raises(ValidationError):
            ScmConfig(d_c=2, d_s=2, d_x=3, n_domains=5, samples_per_domain=10, family="post_nonlinear")

    def test_target_defaults_to_last_domain(self):
        assert ScmConfig(d_c=1, d_s=1, d_x=2, n_domains=3, samples_per_domain=5).target_domain == 2

    def test_unknown_key_rejected(self):
        with pytest.raises(ValidationError):
            ScmConfig.benchmark(flavour="cubic")


class TestGenerate:
    def test_benchmark_layout(self):
        dataset = generate(ScmConfig.benchmark(seed=0))
        assert dataset.n_samples == 5000
        assert dataset.per_domain_counts() == {u: 1000 for u in range(5)}
        target = dataset.domains == 4
        assert np.all(np.isnan(dataset.y[target]))
        assert not np.any(np.isnan(dataset.y[~target]))
        assert not np.any(np.isnan(dataset.y_true))

    def test_paper_cubic_structure(self, small_dataset):
        lt = small_dataset.latents
        np.testing.assert_array_equal(lt.z_c, lt.n_c)
        np.testing.assert_allclose(lt.z_s, lt.z_c ** 3 + lt.n_s, rtol=1e-14)
        np.testing.assert_allclose(small_dataset.y_true, np.sum(lt.z_c ** 3, axis=1), rtol=1e-14)

    def test_same_seed_same_data(self, small_scm):
        a, b = generate(small_scm), generate(small_scm)
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.y_true, b.y_true)

    def test_different_seed_different_data(self, small_scm):
        other = generate(small_scm.model_copy(update={"seed": 8}))
        assert not np.array_equal(generate(small_scm).x, other.x)

    def test_post_nonlinear_latents_invert(self):
        config = ScmConfig(d_c=2, d_s=2, d_x=5, n_domains=5, samples_per_domain=50, family="post_nonlinear", seed=3)
        dataset = generate(config)
        n_c, n_s = build_generator(config).invert_latents(dataset.latents.z_c, dataset.latents.z_s)
        np.testing.assert_allclose(n_c, dataset.latents.n_c, atol=1e-9)
        np.testing.assert_allclose(n_s, dataset.latents.n_s, atol=1e-9)

    def test_post_nonlinear_map_is_injective_on_sampled_pairs(self, rng):
        config = ScmConfig(d_c=1, d_s=1, d_x=2, n_domains=5, samples_per_domain=400, family="post_nonlinear", seed=6)
        dataset = generate(config)
        noise = np.concatenate([dataset.latents.n_c, dataset.latents.n_s], axis=1)
        checked = 0
        for i, j in rng.integers(0, dataset.n_samples, size=(1000, 2)):
            if np.linalg.norm(noise[i] - noise[j]) > 1e-3:
                assert np.linalg.norm(dataset.x[i] - dataset.x[j]) > 1e-9, (i, j)
                checked += 1
        assert checked > 990

    def test_record_views_hide_target_labels(self, small_dataset):
        samples = small_dataset.samples()
        latents = small_dataset.latent_samples()
        assert len(samples) == len(latents) == small_dataset.n_samples
        for i in (0, small_dataset.n_samples - 1):
            assert samples[i].domain_id == latents[i].domain_id == int(small_dataset.domains[i])
            assert samples[i].x == small_dataset.x[i].tolist()
            assert latents[i].n_c == small_dataset.latents.n_c[i].tolist()
        target = small_dataset.target_domain
        assert all((s.y is None) == (s.domain_id == target) for s in samples)

    def test_classification_labels(self, classification_dataset):
        assert classification_dataset.task == "classification"
        assert set(np.unique(classification_dataset.y_true)) == {0.0, 1.0, 2.0}

    def test_discretize_labels_is_balanced(self, rng):
        classes = discretize_labels(rng.normal(size=900), 3)
        assert np.bincount(classes.astype(int)).tolist() == [300, 300, 300]


class TestFunctions:
    def test_monotone_inverse(self, rng):
        g = MonotoneMap.random(rng, 3)
        n = rng.normal(size=(100, 3)) * 3
        np.testing.assert_allclose(g.inverse(g(n)), n, atol=1e-12)
        assert np.all(g.derivative(n) > 0)

    def test_mixing_layers_are_well_conditioned(self, rng):
        mixing = MixingMlp.random(rng, 4, 6, depth=3)
        assert [w.shape for w in mixing.weights] == [(4, 6), (6, 6), (6, 6)]
        assert all(np.linalg.cond(w) < 1e3 for w in mixing.weights)

    def test_mixing_is_square_when_latent_and_observed_sizes_agree(self, rng):
        mixing = MixingMlp.random(rng, 3, 3, depth=2)
        assert [w.shape for w in mixing.weights] == [(3, 3), (3, 3)]

    def test_lifting_layer_keeps_full_rank(self, rng):
        mixing = MixingMlp.random(rng, 2, 5, depth=2)
        assert np.linalg.matrix_rank(mixing.weights[0]) == 2


class TestCounterexample:
    def test_alternative_model_is_observationally_equivalent(self):
        config = ScmConfig.benchmark(seed=2, family="post_nonlinear", samples_per_domain=400)
        report = counterexample_report(config)
        assert report.equivalent
        assert report.max_abs_difference <= 1e-9
        assert report.original_correlation > 0.5
        assert report.alternative_correlation < 0.2

    def test_ten_thousand_samples_decorrelate_the_alternative_latents(self):
        config = ScmConfig.benchmark(seed=5, family="post_nonlinear", samples_per_domain=2000)
        report = counterexample_report(config)
        assert report.n_samples == 10000
        assert report.max_abs_difference <= 1e-9
        assert report.alternative_correlation < 0.1
        assert report.original_correlation > 0.5

    def test_paper_cubic_is_rejected(self, small_scm):
        with pytest.raises(ScmError):
            counterexample_report(small_scm)


class TestVariability:
    def test_sampled_specs_are_full_rank(self, small_scm):
        report = variability_matrix(sample_domain_specs(small_scm))
        assert report.matrix.shape == (4, 4)
        assert not report.singular
        assert math.isfinite(report.condition_number)

    def test_random_seeds_are_almost_always_full_rank(self):
        finite = sum(
            math.isfinite(variability_matrix(sample_domain_specs(ScmConfig.benchmark(seed=s))).condition_number)
            for s in range(100)
        )
        assert finite >= 99

    def test_identical_domains_are_singular(self):
        specs = [DomainSpec(domain_id=u, means=[1.0, 1.0], variances=[0.5, 0.5]) for u in range(5)]
        report = variability_matrix(specs)
        assert report.singular
        assert report.condition_number == math.inf

    def test_wrong_domain_count(self, small_scm):
        with pytest.raises(ScmError):
            variability_matrix(sample_domain_specs(small_scm)[:4])


class TestCsv:
    def test_save_load_preserves_values(self, small_dataset, tmp_path):
        path = tmp_path / "data.csv"
        files = save_dataset(small_dataset, path)
        assert files == [path, latents_path(path)]

        loaded = load_dataset(path)
        assert np.array_equal(loaded.x, small_dataset.x)
        assert np.array_equal(loaded.y_true, small_dataset.y_true)
        assert np.array_equal(loaded.latents.n_c, small_dataset.latents.n_c)
        assert loaded.target_domain == 4

    def test_rewrite_is_byte_identical(self, small_dataset, tmp_path):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        save_dataset(small_dataset, first)
        save_dataset(load_dataset(first), second)
        assert first.read_bytes() == second.read_bytes()
        assert latents_path(first).read_bytes() == latents_path(second).read_bytes()

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x0,label\n1.0,2\n")
        with pytest.raises(DataIOError) as info:
            load_dataset(path)
        assert "domain" in str(info.value)
