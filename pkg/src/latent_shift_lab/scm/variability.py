# latent-shift-lab/src/latent_shift_lab/scm/variability.py

import math

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..core.constants import SINGULAR_RATIO
from ..core.errors import ScmError
from ..models import DomainSpec


class VariabilityReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, ser_json_inf_nan="strings")

    matrix: np.ndarray
    singular_values: np.ndarray
    condition_number: float
    singular: bool


def variability_matrix(specs: list[DomainSpec]) -> VariabilityReport:
    """
    Columns are eta(u_k) - eta(u_0) for k = 1..2l, with Gaussian natural
    parameters eta = (mu / sigma^2, -1 / (2 sigma^2)) per noise dimension.
    """
    if not specs:
        raise ScmError("variability check needs domain specs")
    dim = specs[0].dim
    if any(s.dim != dim for s in specs):
        raise ScmError("all domain specs must share the noise dimension")
    if len(specs) != 2 * dim + 1:
        raise ScmError(f"variability check needs exactly 2l+1 = {2 * dim + 1} specs, got {len(specs)}")

    base = specs[0].natural_parameters()
    matrix = np.column_stack([s.natural_parameters() - base for s in specs[1:]])
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    largest, smallest = float(singular_values[0]), float(singular_values[-1])
    singular = largest == 0.0 or smallest < SINGULAR_RATIO * largest
    return VariabilityReport(
        matrix=matrix,
        singular_values=singular_values,
        condition_number=math.inf if singular else largest / smallest,
        singular=singular,
    )
