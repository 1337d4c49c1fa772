"""Stress-state dependent plasticity coupled with continuum damage.

Modules: :mod:`tensors` (6-vector tensor algebra and stress invariants),
:mod:`material_model` (parameters and constitutive functions),
:mod:`integrator` (implicit material-point update and tangent),
:mod:`drivers` (load paths, sweeps, calibration) and :mod:`cli`.
"""

from . import _backend
from .errors import (
    ConvergenceError,
    DegenerateStressError,
    InsufficientDataError,
    LodeSingularityError,
    NegativeStrainError,
    SaturatedDamageError,
    TriaxDamageError,
)
from .integrator import MaterialState, StepResult, return_map
from .material_model import LODE_DEMO, PRESETS, REFERENCE, VON_MISES, MaterialParams

__version__ = "0.1.0"
KERNEL = _backend.NAME

__all__ = [
    "ConvergenceError", "DegenerateStressError", "InsufficientDataError",
    "LodeSingularityError", "NegativeStrainError", "SaturatedDamageError",
    "TriaxDamageError", "MaterialState", "StepResult", "return_map", "LODE_DEMO",
    "PRESETS", "REFERENCE", "VON_MISES", "MaterialParams", "KERNEL",
]
