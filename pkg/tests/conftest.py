import numpy as np
import pytest

from latent_shift_lab.models import ModelConfig, ScmConfig, TrainConfig
from latent_shift_lab.scm import generate


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_scm() -> ScmConfig:
    return ScmConfig.benchmark(seed=7, samples_per_domain=120)


@pytest.fixture
def small_dataset(small_scm):
    return generate(small_scm)


@pytest.fixture
def classification_dataset():
    return generate(ScmConfig.benchmark(seed=3, samples_per_domain=150, n_classes=3))


@pytest.fixture
def tiny_model_config(small_dataset) -> ModelConfig:
    return ModelConfig.synthetic(
        d_x=small_dataset.d_x, d_c=1, d_s=1, n_domains=small_dataset.n_domains, hidden_units=8,
    )


@pytest.fixture
def quick_train_config() -> TrainConfig:
    return TrainConfig(epochs=2, batch_size=64, learning_rate=1e-2, seed=11, eval_every=1)
