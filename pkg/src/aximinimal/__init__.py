"""Axially symmetric minimal hypersurfaces in 4-d Minkowski space: closed-form
families, the involutive transform with the scaling symmetry, and numerical
verification of the field equations."""

from .catalog import (
    AnalyticSolution,
    Derivs,
    EllipticF,
    elliptic_F,
    eval_solution,
    family_spec,
    get_solution,
    hyperboloid_physical,
    list_catalog,
)
from .errors import (
    AxiMinimalError,
    CompatibilityError,
    DomainError,
    InversionError,
    ProfileError,
    SingularLocusError,
    TransformError,
    UnknownFamilyError,
)
from .grid import GridDomain, ResidualReport, ScalarField, convergence_order, make_grid
from .pipeline import Step, run_pipeline, scaling_fit
from .residuals import level_set_check, residual_lightcone, residual_physical
from .selfsim import SelfSimilarProfile, check47, poly48_roots, reconstruct_Rtilde, residual_odes, solve_profile
from .transform import (
    ConjugatePair,
    LightconeTriple,
    PhysicalPair,
    ScalingParams,
    bianchi_transform,
    compose_conjugate,
    compute_kappa,
    compute_v,
    compute_zeta,
    involution_check,
    lightcone_chart,
    product_identity,
    scale,
    to_physical,
)

__version__ = "0.1.0"
