"""Exact Weil indices, Wall invariants and local epsilon factors.

The package computes two-torsion invariants of quadratic forms over local
fields, Weil indices of characters of second degree, local epsilon factors of
quadratic characters, and the matching of the two along Galois descent of
root-datum lattices.
"""

from .errors import (
    DegenerateForm,
    DescentError,
    EllNotPrime,
    EllZeroInField,
    FieldMismatch,
    InsufficientPrecision,
    NonIntegralGram,
    NotStabilized,
    Obstructed,
    PrecisionLoss,
    SnapFailure,
    UnsupportedField,
    UnsupportedType,
    WeilGammaError,
    WrongCharacteristic,
)
from .localfield import (
    DEFAULT_PRECISION,
    MIN_PRECISION,
    AdditiveCharacter,
    FieldElem,
    GroundField,
    SquareClass,
    chi_eval,
    hilbert,
    hilbert_bit,
    parse_field,
    psi_eval,
    square_class,
    square_class_basis,
    square_class_coords,
    square_class_group,
    square_class_one,
)
from .br2s import BrauerPair, all_pairs, pair_from_class, pair_sum, pair_zero
from .quadform import (
    diagonalize,
    disc_class,
    hw_rel,
    hyperbolic_diag,
    reflection_factorization,
    scale_diag,
    spinor_norm,
    sw_pair,
    wall_of_gram,
    wall_pair,
)
from .clifford import (
    CliffordAlgebra,
    even_center_class,
    spinor_norm_oracle,
    wall_via_clifford,
)
from .epsweil import (
    FourthRoot,
    eps_quadratic,
    eps_virtual,
    gamma_of_diag,
    gamma_oracle,
    weil_index,
)
from .rootdata import (
    HARNESS_TYPES,
    ChevalleyAction,
    LatticeTriple,
    ModularForm,
    PinnedRootDatum,
    VinbergLattice,
    build_root_datum,
    chevalley_action,
    perp_lattice,
    q1,
    reduced_forms,
    spinor_character,
    spinor_character_modular,
    vinberg_lattice,
    weyl_characters,
)
from .torus import (
    BLOCKS,
    DescendedSpace,
    GaloisFrame,
    TorusDatum,
    descend_quadspace,
    det_character,
    epsilon_pp_characters,
    galois_frame,
    hw_torus_binary_check,
    inner_form_defect,
    lie_form_diag,
    pattern_variants,
    reflection_pullback_pair,
    resolve_cocycle,
    select_inner_form,
    split_form,
    standard_frames,
    sw_bar,
    sw_bar_from_characters,
    sw_virtual,
    xi_bit,
)
from .harness import (
    MATRIX_TYPES,
    REPORT_SCHEMA,
    SUITES,
    InstanceSpec,
    VerificationReport,
    matrix_instances,
    run_suite,
    verify_main_theorem,
)

__version__ = "0.1.0"
