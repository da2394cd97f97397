"""Exact toolkit for higher additive energies and Sidon-type subsets.

Public surface: ambient group arithmetic and canonical sets, exact
representation histograms and energies, verification and extraction of
bounded-multiplicity subsets, explicit extremal constructions, structure
certificates with an end-to-end additive-vs-multiplicative extraction
pipeline, and closed-form bound audits.
"""

__version__ = "0.1.0"

from .ambient import (
    DIFFERENCE,
    PRODUCT,
    RATIO,
    SUM,
    AmbientSpec,
    compose,
    compose_value,
    is_prime,
)
from .bounds import (
    BoundReport,
    bfamily_size_upper,
    co_sidon_check,
    diffset_bounds,
    heritability_slice,
    plunnecke_audit,
    sidon_slice_audit,
    sumset_sidon_upper,
)
from .constructions import (
    ConstructionReport,
    fp_mult_example,
    geometric_sumproduct_example,
    hyperbola_family,
    linstrom_like,
    sidon_base,
)
from .counting import (
    EnergyReport,
    RepHistogram,
    common_energy,
    difference_histogram,
    dyadic_best_level,
    energy_k,
    energy_prime_k,
    intersection_size,
    popular_level_set,
    rep_histogram,
)
from .errors import (
    AmbientMismatch,
    BadOrder,
    BadShift,
    CapExceeded,
    DivisionByZero,
    DuplicateElement,
    EmptyCore,
    MalformedInput,
    NonCanonicalElement,
    OverflowBudgetExceeded,
    PreconditionFailed,
    SidonkitError,
    UnsupportedMode,
    VerificationFailed,
)
from .groundset import (
    GroundSet,
    affine_image,
    integer_range,
    integer_set,
    parse_set,
    serialize_set,
    set_compose,
    shift_set,
)
from .sidon import (
    BFamilyParams,
    ExtractionResult,
    ViolationWitness,
    dense_core_extract,
    extract_random,
    sid_k_exact,
    sid_k_greedy,
    verify_bfamily,
    verify_multiplicity,
)
from .structure import (
    PipelineReport,
    StructureCertificate,
    energy_gap_decompose,
    popular_symmetry_set,
    rigid_structure,
    rigid_core_set,
    sum_product_pipeline,
    verify_certificate,
    verify_pipeline_report,
)
