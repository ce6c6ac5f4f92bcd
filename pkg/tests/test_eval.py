import math

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from latent_shift_lab.core.errors import ConfigError, NumericError
from latent_shift_lab.eval import (
    empirical_label_distribution,
    evaluate,
    label_kl,
    label_kl_matrix,
    match_components,
    mcc,
    mcc_matching,
    pearson,
    target_metrics,
)
from latent_shift_lab.lcsvae import LcsVae
from latent_shift_lab.models import ScmConfig
from latent_shift_lab.scm import generate
from latent_shift_lab.trainer import build_model_config


class TestPearson:
    def test_perfect_and_anti_correlation(self, rng):
        a = rng.normal(size=50)
        assert pearson(a, 3 * a + 1) == pytest.approx(1.0, abs=1e-12)
        assert pearson(a, -a) == pytest.approx(-1.0, abs=1e-12)

    def test_zero_variance(self):
        with pytest.raises(NumericError):
            pearson(np.ones(5), np.arange(5.0))

    def test_length_mismatch(self):
        with pytest.raises(ConfigError):
            pearson(np.arange(3.0), np.arange(4.0))


class TestMatching:
    def test_recovers_permutation(self):
        corr = np.array([[0.1, 0.9, 0.2], [0.8, 0.1, 0.1], [0.2, 0.3, 0.7]])
        perm, total = match_components(corr)
        assert perm == [1, 0, 2]
        assert total == pytest.approx(2.4)

    def test_ties_take_first_permutation_in_lexicographic_order(self):
        perm, _ = match_components(np.ones((3, 3)))
        assert perm == [0, 1, 2]

    def test_assignment_algorithm_beyond_eight(self, rng):
        corr = np.abs(rng.normal(size=(10, 10)))
        perm, total = match_components(corr)
        rows, cols = linear_sum_assignment(corr, maximize=True)
        assert sorted(perm) == list(range(10))
        assert total == pytest.approx(corr[rows, cols].sum())

    def test_non_square(self):
        with pytest.raises(ConfigError):
            match_components(np.ones((2, 3)))


class TestMcc:
    def test_invariant_to_permutation_and_scaling(self, rng):
        true = rng.normal(size=(200, 4))
        est = true[:, [2, 0, 3, 1]] * np.array([2.0, -1.0, 0.5, 3.0]) + 7.0
        assert mcc(true, est) == pytest.approx(1.0, abs=1e-12)

    def test_independent_estimate_is_low(self, rng):
        assert mcc(rng.normal(size=(2000, 2)), rng.normal(size=(2000, 2))) < 0.1

    def test_matching_pairs_are_reported(self, rng):
        true = rng.normal(size=(100, 2))
        value, pairs = mcc_matching(true, true[:, ::-1])
        assert [(p.true_index, p.est_index) for p in pairs] == [(0, 1), (1, 0)]
        assert value == pytest.approx(1.0)

    def test_too_few_samples(self):
        with pytest.raises(ConfigError):
            mcc(np.ones((2, 1)), np.ones((2, 1)))


class TestLabelKl:
    def test_identical_distributions(self):
        assert label_kl([0.2, 0.8], [0.2, 0.8]) == 0.0

    def test_known_value(self):
        assert label_kl([0.5, 0.5], [0.25, 0.75]) == pytest.approx(
            0.5 * math.log(2.0) + 0.5 * math.log(0.5 / 0.75)
        )

    def test_unsupported_mass_is_infinite(self):
        assert label_kl([0.5, 0.5], [1.0, 0.0]) == math.inf

    def test_zero_mass_terms_vanish(self):
        assert label_kl([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2.0))

    def test_empirical_distribution(self):
        np.testing.assert_array_equal(empirical_label_distribution(np.array([0, 2, 2, 2]), 4), [0.25, 0, 0.75, 0])

    def test_matrix_is_square_with_zero_diagonal(self, classification_dataset):
        matrix = np.array(label_kl_matrix(classification_dataset))
        assert matrix.shape == (5, 5)
        np.testing.assert_array_equal(np.diag(matrix), 0.0)


class TestEvaluate:
    def test_untrained_model_report(self, small_dataset):
        model = LcsVae.initialize(build_model_config(small_dataset), seed=0)
        report = evaluate(model, small_dataset)
        assert 0.0 <= report.mcc <= 1.0
        assert len(report.matching) == 1
        assert report.target_r2 is not None
        assert report.target_accuracy is None
        assert len(report.label_kl_matrix) == 5

    def test_untrained_model_is_at_chance_against_unrelated_latents(self):
        dataset = generate(ScmConfig.benchmark(seed=0))
        model = LcsVae.initialize(build_model_config(dataset), seed=0)
        order = np.random.default_rng(0).permutation(dataset.n_samples)
        unrelated = dataset.model_copy(update={"latents": dataset.latents.take(order)})
        assert evaluate(model, unrelated).mcc < 0.1

    def test_target_metrics_need_withheld_labels(self, small_dataset):
        model = LcsVae.initialize(build_model_config(small_dataset), seed=0)
        with pytest.raises(ConfigError):
            target_metrics(model, small_dataset.model_copy(update={"y_true": None}))

    def test_classification_accuracy(self, classification_dataset):
        model = LcsVae.initialize(build_model_config(classification_dataset), seed=0)
        name, value = target_metrics(model, classification_dataset)
        assert name == "target_accuracy"
        assert 0.0 <= value <= 1.0
