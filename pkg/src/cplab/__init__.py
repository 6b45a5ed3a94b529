"""Complete-positivity lab: semigroup generators, CP certification and
entangled witness construction for the doubled dynamics."""

from .basis import BasisReport, OperatorBasis, standard_basis, validate_basis
from .dynamics import (
    CPVerdict,
    ChoiMatrix,
    DensityMatrix,
    PositivitySampleReport,
    choi_matrix,
    evolution_map,
    haar_state_vector,
    is_completely_positive,
    positivity_preserving_sampled,
    tensor_extension,
)
from .generator import (
    GKSGenerator,
    LindbladGenerator,
    Superoperator,
    apply_generator,
    gks_to_lindblad,
    lindblad_to_gks,
    superoperator_of,
)
from .linalg import (
    EigenDecomposition,
    hermitian_eig,
    matrix_exp,
    min_eigenvalue,
    similarity_to_transpose,
)
from .witness import (
    NegativityScan,
    NoNegativeDirection,
    NotApplicable,
    WitnessCandidate,
    bell_phi_matrix,
    construct_witness,
    direction_operator,
    negativity_scan,
    overlap_rate,
    overlap_rate_trace_form,
    symmetric_case_witness,
)

__version__ = "0.1.0"

__all__ = [
    "BasisReport",
    "CPVerdict",
    "ChoiMatrix",
    "DensityMatrix",
    "EigenDecomposition",
    "GKSGenerator",
    "LindbladGenerator",
    "NegativityScan",
    "NoNegativeDirection",
    "NotApplicable",
    "OperatorBasis",
    "PositivitySampleReport",
    "Superoperator",
    "WitnessCandidate",
    "apply_generator",
    "bell_phi_matrix",
    "choi_matrix",
    "construct_witness",
    "direction_operator",
    "evolution_map",
    "gks_to_lindblad",
    "haar_state_vector",
    "hermitian_eig",
    "is_completely_positive",
    "lindblad_to_gks",
    "matrix_exp",
    "min_eigenvalue",
    "negativity_scan",
    "overlap_rate",
    "overlap_rate_trace_form",
    "positivity_preserving_sampled",
    "similarity_to_transpose",
    "standard_basis",
    "superoperator_of",
    "symmetric_case_witness",
    "tensor_extension",
    "validate_basis",
    "__version__",
]
