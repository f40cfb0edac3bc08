"""Parametric representation with environmental coherent states for a qubit in a bosonic mode."""

from .bosonic import FockSpace, PhaseSpaceGrid, coherent_vector, displacement, make_grid, overlap
from .errors import ConfigError, ContractError, CoverageError, NumericError, SignatureError, TruncationError
from .models import JaynesCummingsModel, PureDephasingModel
from .parametric import JointState, ParametricField, decompose, reconstruct

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ContractError",
    "CoverageError",
    "FockSpace",
    "JaynesCummingsModel",
    "JointState",
    "NumericError",
    "ParametricField",
    "PhaseSpaceGrid",
    "PureDephasingModel",
    "SignatureError",
    "TruncationError",
    "coherent_vector",
    "decompose",
    "displacement",
    "make_grid",
    "overlap",
    "reconstruct",
]
