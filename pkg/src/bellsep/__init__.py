"""Measurement-dependent local deterministic models of quantum correlations,
the measurement-dependence capacity, and Bell-separability tools."""

from .bell_polytope import (
    ChshSettings,
    DeterministicStrategy,
    chsh_value,
    chsh_variants,
    correlator,
    detect_signalling,
    fine_joint,
    separability_feasible,
)
from .general_model import (
    CorrelationTable,
    FiniteLhvModel,
    MuModel,
    build_general_brans,
    build_signalling_model,
    causal_decomposition,
    check_properties,
    verify_reproduction,
)
from .info_measures import (
    CmdReport,
    binary_correlation_entropy,
    brans_conditional_entropy,
    cmd_report,
    general_dimension_bound,
    mutual_information,
    shannon_entropy,
    sphere_conditional_entropy,
)
from .montecarlo import Estimate, RngSpec, estimate_chsh, estimate_joint
from .quantum_core import (
    DensityOperator,
    Effect,
    PovmFamily,
    UnitVector3,
    ValidationError,
    born_probability,
    hermitian_eig,
    singlet_state,
    spin_projector,
    tensor_product,
)
from .singlet_models import ModelKind, SingletModel, singlet_joint

__version__ = "0.1.0"

__all__ = [
    "binary_correlation_entropy",
    "born_probability",
    "brans_conditional_entropy",
    "build_general_brans",
    "build_signalling_model",
    "causal_decomposition",
    "check_properties",
    "chsh_value",
    "chsh_variants",
    "ChshSettings",
    "cmd_report",
    "CmdReport",
    "CorrelationTable",
    "correlator",
    "DensityOperator",
    "detect_signalling",
    "DeterministicStrategy",
    "Effect",
    "Estimate",
    "estimate_chsh",
    "estimate_joint",
    "fine_joint",
    "FiniteLhvModel",
    "general_dimension_bound",
    "hermitian_eig",
    "ModelKind",
    "MuModel",
    "mutual_information",
    "PovmFamily",
    "RngSpec",
    "separability_feasible",
    "shannon_entropy",
    "singlet_joint",
    "singlet_state",
    "SingletModel",
    "sphere_conditional_entropy",
    "spin_projector",
    "tensor_product",
    "UnitVector3",
    "ValidationError",
    "verify_reproduction",
]
