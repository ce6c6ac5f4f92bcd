from .counterexample import AlternativeGenerator, CounterexampleReport, build_counterexample, counterexample_report
from .csv_io import latents_path, load_dataset, save_dataset
from .generator import LatentGenerator, build_generator, discretize_labels, generate
from .noise import sample_domain_specs, sample_noise
from .seeds import derive_seed
from .variability import VariabilityReport, variability_matrix

__all__ = [
    "AlternativeGenerator",
    "CounterexampleReport",
    "LatentGenerator",
    "VariabilityReport",
    "build_counterexample",
    "build_generator",
    "counterexample_report",
    "derive_seed",
    "discretize_labels",
    "generate",
    "latents_path",
    "load_dataset",
    "sample_domain_specs",
    "sample_noise",
    "save_dataset",
    "variability_matrix",
]
