"""Exact-arithmetic toolkit for higher-weight rigid analytic cocycles on
SL2(Z[1/p]): form enumeration and intersection numbers, cocycle evaluation
with certified truncation, Heegner period polynomials, annular residues, the
Schneider-Teitelbaum lift and its left inverse, and the archimedean period
side, with machine-checkable verification of the central identities.
"""

from .errors import (
    BadDiscriminant,
    CocycleError,
    ConfigInvalid,
    DiscDivisibleByP,
    EndpointIsRoot,
    EqualEndpoints,
    EvaluationOutsideDomain,
    LevelTooShallow,
    NonResidue,
    NotAUnit,
    NotHeegner,
    NotSplit,
    OddOrientation,
    OnBoundary,
    PoleHit,
    SquareDiscriminant,
)
from .exact_arith import (
    PadicElem,
    QuadExtElem,
    QuadFieldElem,
    Rat,
    canonical_sqrt_D,
    hensel_sqrt,
)
from .quadforms import BinaryQF, Cusp, Mat2, enumerate_simple, intersection, padic_intersection
from .modsym import check_relations, extend_symbol, manin_decompose
from .bruhat_tits import Ball, TreeEdge, depth, edge_to_matrix, level_partition, tree_distance
from .padic_cocycles import (
    KappaPoly,
    PSeriesValue,
    annular_residue,
    binomial_identity_check,
    eval_J,
    eval_phi_tau,
    kappa,
    res0_J,
    varpi,
)
from .st_lift import EichlerSymbol, MomentTable, bound_check, harmonic_extend, st_eval
from .archimedean import (
    ComplexVal,
    closed_geodesic_integral,
    omega_bar_coeffs,
    partial_fraction,
    period_polynomial,
    two_path_report,
)

__version__ = "0.1.0"
