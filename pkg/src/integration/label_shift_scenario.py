# latent-shift-lab/src/integration/label_shift_scenario.py
# How to run:
# cd src
# PYTHONPATH=. poetry run python3 integration/label_shift_scenario.py

"""
Resampled Label Shift
---------------------
Discretizes the synthetic benchmark into 7 classes and, for each target label
KL, solves per-domain marginals, subsamples the data and recomputes the
empirical pairwise KL on what was kept.
"""

import numpy as np

from latent_shift_lab.core.constants import RESAMPLE_KL_TARGETS
from latent_shift_lab.core.log import configure_logging
from latent_shift_lab.eval import label_kl_matrix
from latent_shift_lab.models import ScmConfig
from latent_shift_lab.resampler import resample_spec_from_dataset, solve_marginals, subsample
from latent_shift_lab.scm import generate


if __name__ == "__main__":
    configure_logging("WARNING")
    dataset = generate(ScmConfig.benchmark(seed=0, n_classes=7, samples_per_domain=4000))
    for target in RESAMPLE_KL_TARGETS:
        marginals = solve_marginals(resample_spec_from_dataset(dataset, target, seed=0))
        result = subsample(dataset, marginals, seed=0)
        achieved = np.array(label_kl_matrix(result.dataset))
        off_diagonal = achieved[~np.eye(len(achieved), dtype=bool)]
        print(f"\n--- target KL {target} ---")
        print(f"  solver residual  {marginals.max_residual(target):.4f}")
        print(f"  kept samples     {result.indices.size} of {dataset.n_samples} (scales {result.scales})")
        print(f"  empirical KL     min {off_diagonal.min():.3f}  max {off_diagonal.max():.3f}")
