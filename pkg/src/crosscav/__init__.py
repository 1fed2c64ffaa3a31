"""Steady-state observables for driven two-level ensembles in leaky
broadband cavities with cross-correlated decay channels."""

from ._kernels import backend_name
from .analytic import (
    Branch,
    Observables,
    appendix_a_observables,
    linear_limit_observables,
    observables_auto,
    steady_observables,
)
from .model import (
    EffectiveModel,
    ModelError,
    PhysicalParams,
    build_effective_model,
    collective_decay_rate,
    dipole_shift,
    displacement_alpha,
    effective_drive,
    effective_drive_sq,
    single_emitter_rate,
)

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "EffectiveModel",
    "ModelError",
    "Observables",
    "PhysicalParams",
    "appendix_a_observables",
    "backend_name",
    "build_effective_model",
    "collective_decay_rate",
    "dipole_shift",
    "displacement_alpha",
    "effective_drive",
    "effective_drive_sq",
    "linear_limit_observables",
    "observables_auto",
    "single_emitter_rate",
    "steady_observables",
    "__version__",
]
