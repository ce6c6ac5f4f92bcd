# latent-shift-lab/src/latent_shift_lab/core/errors.py

from .constants import EXIT_CONFIG_ERROR, EXIT_IO_ERROR, EXIT_NUMERIC_ERROR


class LabError(Exception):
    """Base class for every error raised by the laboratory."""

    exit_code = 1


class ConfigError(LabError):
    exit_code = EXIT_CONFIG_ERROR


class DataIOError(LabError):
    exit_code = EXIT_IO_ERROR


class NumericError(LabError):
    """Non-finite values, failed gradient checks, solver non-convergence."""

    exit_code = EXIT_NUMERIC_ERROR


class ShapeError(NumericError):
    def __init__(self, op: str, *shapes):
        self.op = op
        self.shapes = shapes
        rendered = " vs ".join(str(tuple(s)) for s in shapes)
        super().__init__(f"{op}: incompatible shapes {rendered}")


class DomainError(NumericError):
    def __init__(self, op: str, detail: str):
        self.op = op
        super().__init__(f"{op}: {detail}")


class ScmError(ConfigError):
    pass


class ModelError(ConfigError):
    pass


class ResampleError(ConfigError):
    pass


class MissingClassError(ResampleError):
    def __init__(self, domain_id: int, class_id: int):
        self.domain_id = domain_id
        self.class_id = class_id
        super().__init__(f"domain {domain_id} has no samples of required class {class_id}")


class NonConvergenceError(ResampleError, NumericError):
    exit_code = EXIT_NUMERIC_ERROR

    def __init__(self, message: str, best_residual: float):
        self.best_residual = best_residual
        super().__init__(f"{message} (best residual {best_residual:.4g})")


class NanLossError(NumericError):
    def __init__(self, term: str, epoch: int, step: int):
        self.term = term
        self.epoch = epoch
        self.step = step
        super().__init__(f"non-finite value in loss term '{term}' at epoch {epoch}, step {step}")
