"""Finite linear spaces, predimension calculus, bounded generic growth,
and quasigroup coordinatization of Steiner systems."""

from .spaces import (
    LinearSpace,
    Line,
    TripleNotSetLike,
    TwoLinesThroughPair,
    build_eta,
    fano,
    induced,
    is_steiner_k,
    lines_based_in,
    lines_of,
    new_linear_space,
    single_line,
    sts9,
    sts13,
)
from .predim import (
    PredimensionReport,
    delta,
    delta_rel,
    dim,
    dim_value,
    in_K0,
    is_strong,
    min_delta,
)
from .classify import (
    ExtensionPair,
    MuFunction,
    NotGood,
    NotPrimitive,
    alpha_pair,
    canonical_code,
    check_flags,
    chi,
    classify,
    determined_points,
    find_bases,
    in_K_mu,
    is_good,
    mu_eval,
    pair_of,
)
from .amalgam import (
    AmalgamInput,
    GrowthTrace,
    NotCompatible,
    SeedNotInClass,
    amalgam,
    amalgam_over,
    generic_grow,
    serialize_trace,
    smoothness_check,
)
from .quasigroups import (
    EquationSet,
    FiniteMagma,
    GaloisField,
    NotPrime,
    NotPrimitiveElement,
    Reducible,
    STEIN_EQUATIONS,
    STEINER_EQUATIONS,
    automorphisms,
    block_algebra,
    check_2q_variety_witness,
    gf,
    is_quasigroup,
    is_sharply_2_transitive,
    primitive_elements,
    satisfies,
    two_generated,
)
from .bridge import (
    BadWitness,
    CoordinatizedAlgebra,
    LineTooLong,
    NotSteiner,
    NotSteiner3,
    TauPrimeStructure,
    UnevenBlocks,
    UnevenLines,
    complete_lines,
    coordinatize,
    derive_mu_prime,
    derive_steiner_mult,
    enumerate_expansions,
    gamma_extract,
    invariance_orbit_check,
    random_expansion,
    reduct_R_from_H,
    tau_pair,
    tau_prime_of,
)
from .errors import DeskScaleExceeded, SteinerqError

__all__ = [name for name in dir() if not name.startswith("_")]
