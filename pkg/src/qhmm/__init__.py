"""Quantum hidden Markov models built from transition operation matrices.

The package models finite hidden-state machines whose transitions carry
quantum operations instead of probabilities: a grid of completely
positive maps whose columns sum to channels moves a column of
sub-normalised density operators one observation at a time. Classical
hidden Markov models embed as the one-dimensional special case.
"""

from .errors import (
    DomainError,
    EligibilityError,
    InputError,
    ModelFormatError,
    QhmmError,
    ResourceLimitError,
    ShapeError,
    ValidationError,
    ValidationReport,
)
from .quantum import (
    DensityOperator,
    KrausOperation,
    Measurement,
    apply,
    is_trace_preserving,
    ket,
    ketbra,
    measure_probabilities,
    op_add,
    op_compose,
    op_scale,
    proportional_channel_factor,
)
from .tom import (
    SubTOM,
    SubVectorState,
    TOM,
    VectorState,
    apply_tom,
    tom_product,
    validate_sub_tom,
    validate_tom,
)
from .models import (
    ClassicalMealyHMM,
    GraphEdge,
    LabelledGraph,
    MealyQHMM,
    embed_classical,
    graph_view,
    random_eligible_qhmm,
    random_qhmm,
    random_sub_tom,
    random_tom,
    random_vector_state,
    summed_transition,
    validate_hmm,
    validate_qhmm,
)
from .inference import (
    EligibilityReport,
    ForwardResult,
    MAX_SEQUENCE_LENGTH,
    TrellisCell,
    ViterbiResult,
    brute_force_viterbi,
    classical_forward,
    enumerate_distribution,
    forward,
    marginalization_check,
    measured_probabilities,
    next_symbol_distribution,
    sample,
    sample_many,
    viterbi,
    viterbi_eligibility,
)
from .single_register import (
    SingleRegisterHQMM,
    equivalence_check,
    hqmm_forward,
    label_block,
    to_hqmm,
)
from .spectral import StringBasis, hankel, hankel_rank, hankel_tsv
from .model_io import (
    BUILTIN_NAMES,
    builtin,
    example_measurement,
    load,
    load_measurement,
    save,
    save_measurement,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_NAMES",
    "ClassicalMealyHMM",
    "DensityOperator",
    "DomainError",
    "EligibilityError",
    "EligibilityReport",
    "ForwardResult",
    "GraphEdge",
    "InputError",
    "KrausOperation",
    "LabelledGraph",
    "MAX_SEQUENCE_LENGTH",
    "MealyQHMM",
    "Measurement",
    "ModelFormatError",
    "QhmmError",
    "ResourceLimitError",
    "ShapeError",
    "SingleRegisterHQMM",
    "StringBasis",
    "SubTOM",
    "SubVectorState",
    "TOM",
    "TrellisCell",
    "ValidationError",
    "ValidationReport",
    "VectorState",
    "ViterbiResult",
    "apply",
    "apply_tom",
    "brute_force_viterbi",
    "builtin",
    "classical_forward",
    "embed_classical",
    "enumerate_distribution",
    "equivalence_check",
    "example_measurement",
    "forward",
    "graph_view",
    "hankel",
    "hankel_rank",
    "hankel_tsv",
    "hqmm_forward",
    "is_trace_preserving",
    "ket",
    "ketbra",
    "label_block",
    "load",
    "load_measurement",
    "marginalization_check",
    "measure_probabilities",
    "measured_probabilities",
    "next_symbol_distribution",
    "op_add",
    "op_compose",
    "op_scale",
    "proportional_channel_factor",
    "random_eligible_qhmm",
    "random_qhmm",
    "random_sub_tom",
    "random_tom",
    "random_vector_state",
    "sample",
    "sample_many",
    "save",
    "save_measurement",
    "summed_transition",
    "to_hqmm",
    "tom_product",
    "validate_hmm",
    "validate_qhmm",
    "validate_sub_tom",
    "validate_tom",
    "viterbi",
    "viterbi_eligibility",
]
