"""Potentials, chart changes, the involutive transform and the scaling symmetry."""

from .bianchi import (
    bianchi_transform,
    involution_check,
    lightcone_density,
    product_identity,
    pulled_back_derivatives,
)
from .charts import ChartInverse, image_rectangle, invert_chart, jacobian_determinant
from .conjugate import compose_conjugate, pair_residuals
from .fields import ConjugatePair, LightconeTriple, PhysicalPair, ScalingParams, TransformDiagnostics
from .potentials import (
    compatibility_defect,
    compute_kappa,
    compute_v,
    compute_zeta,
    integrate_gradient,
    lightcone_chart,
    triple_from_R,
)
from .scaling import ScaledSolution, physical_map, scale, to_physical

__all__ = [
    "ChartInverse", "ConjugatePair", "LightconeTriple", "PhysicalPair", "ScaledSolution",
    "ScalingParams", "TransformDiagnostics", "bianchi_transform", "compatibility_defect",
    "compose_conjugate", "compute_kappa", "compute_v", "compute_zeta", "image_rectangle",
    "integrate_gradient", "invert_chart", "involution_check", "jacobian_determinant",
    "lightcone_chart", "lightcone_density", "pair_residuals", "physical_map",
    "product_identity", "pulled_back_derivatives", "scale", "to_physical", "triple_from_R",
]
