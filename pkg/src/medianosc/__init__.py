"""Biased maximal medians, median-based sharp maximal functions, dyadic
decompositions and median oscillation spaces for sampled functions."""

from .bmo import (Modulus, ModulusKind, TailCurve, bmo_phi_norm, jn_tail, normalize,
                  psi_integral, psi_inverse, vmo_embeds_in_VMO_check, vmo_modulus)
from .decompose import (CascadeReport, DecompositionForest, DecompositionParams, jn_cascade,
                        stromberg_decompose, two_threshold_decompose)
from .errors import (BetaTooSmall, DegenerateModulus, DomainError, FamilyTooLarge,
                     HypothesisViolated, IndivisibleCube, InvalidParameter, MedianOscError,
                     NonInvertible, OverlappingPair)
from .grid import (CubeFamily, CubeRegion, DyadicCube, GridFrame, SampledFunction,
                   enumerate_cubes, measure, subdivide)
from .median import (OscillationValue, WeightedSamples, best_constant_oscillation,
                     maximal_median, median_convergence_profile, median_rearrangement_identity,
                     oscillation_about_median, rearrangement_value)
from .oscillation import (CubePair, OscillationReport, best_constant_pair, continuity_verdict,
                          essential_modulus, omega_estimate, psi_s)
from .sharp import SharpField, local_sharp_maximal, sharp_infimum

__version__ = "0.1.0"

__all__ = [
    "BetaTooSmall",
    "CascadeReport",
    "CubeFamily",
    "CubePair",
    "CubeRegion",
    "DecompositionForest",
    "DecompositionParams",
    "DegenerateModulus",
    "DomainError",
    "DyadicCube",
    "FamilyTooLarge",
    "GridFrame",
    "HypothesisViolated",
    "IndivisibleCube",
    "InvalidParameter",
    "MedianOscError",
    "Modulus",
    "ModulusKind",
    "NonInvertible",
    "OscillationReport",
    "OscillationValue",
    "OverlappingPair",
    "SampledFunction",
    "SharpField",
    "TailCurve",
    "WeightedSamples",
    "best_constant_oscillation",
    "best_constant_pair",
    "bmo_phi_norm",
    "continuity_verdict",
    "enumerate_cubes",
    "essential_modulus",
    "jn_cascade",
    "jn_tail",
    "local_sharp_maximal",
    "maximal_median",
    "measure",
    "median_convergence_profile",
    "median_rearrangement_identity",
    "normalize",
    "omega_estimate",
    "oscillation_about_median",
    "psi_integral",
    "psi_inverse",
    "psi_s",
    "rearrangement_value",
    "sharp_infimum",
    "stromberg_decompose",
    "subdivide",
    "two_threshold_decompose",
    "vmo_embeds_in_VMO_check",
    "vmo_modulus",
]
