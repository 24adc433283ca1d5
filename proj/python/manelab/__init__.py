"""Deformed toral automorphisms: construction, factor map, and ergodic checks."""

from ._core import (
    Error,
    BirkhoffResult,
    CenterExpansionReport,
    EntropyEstimate,
    FiberEstimate,
    FiberReport,
    ManeMap,
    ManeParams,
    MeasureStats,
    SemiconjugacyEvaluator,
    ShadowingConstants,
    SpectralData,
    ToralMatrix,
    ball_measure_and_inequality,
    birkhoff_deformed,
    birkhoff_exact,
    birkhoff_lattice,
    build_mane_map,
    center_expansion_exponent,
    center_profile_fixed_points,
    default_params,
    entropy_deformed,
    entropy_linear,
    fiber_iterate_lengths,
    fiber_segment,
    fixed_points,
    invert_pi,
    ks_uniform,
    make_system,
    sample_mme,
    search_polynomials,
    semiconjugacy_defect,
    shadowing_constants,
    spectral_data,
)

CANONICAL_COEFFS = [-1, 6, -5, 1]


def canonical_system(power: int = 2) -> ToralMatrix:
    """The default 3-torus system: companion of x^3 - 5x^2 + 6x - 1, squared."""
    return make_system(CANONICAL_COEFFS, power)


__all__ = [n for n in dir() if not n.startswith("_")]
