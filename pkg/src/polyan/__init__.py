"""polyan: calculus of generalized-analytic fields over commutative
hypercomplex number systems, with the quartic H4 geometry built in."""

from .algebra import (
    AxiomReport,
    BasisChange,
    PolyNumber,
    QTensor,
    StructureConstants,
    algebra_from_dict,
    builtin_algebra,
    builtin_names,
    change_basis,
    h4_basis_change,
    invert,
    is_zero_divisor,
    load_algebra,
    mult_operator,
    multiply,
    poly_eval,
    q_tensor,
    transform_constants,
    verify_structure,
)
from .errors import (
    ConeError,
    ContractError,
    DomainError,
    IntegrationError,
    PolyanError,
    SingularQError,
    ZeroDivisorError,
)
from .fields import (
    Box,
    ConnectionSlice,
    DiffConfig,
    Diffeo,
    GAPair,
    GammaField,
    Path,
    VectorField,
    chain_conditions,
    connection_residual,
    covariant_derivative,
    cr_residual,
    derivative,
    derivative_chain,
    gamma_from_prescribed,
    gamma_transform,
    line_integral,
    pair_change_basis,
    pair_combine,
    pair_compose,
    pair_product,
    pair_quotient,
    path_independence_residual,
    polyline_path,
    rectangle_loop,
    straight_path,
    transform_pair,
)
from .geodesics import (
    ConnectionField,
    ExtremalState,
    ExtremalTrajectory,
    GeodesicState,
    GeodesicTrajectory,
    IntegratorConfig,
    cross_check_forms,
    geodesic_rhs,
    integrate_extremal,
    integrate_geodesic,
)
from .h4 import (
    FinslerConfig,
    H4Constants,
    H4FamilySpec,
    ScalarField,
    ScalarFunc1D,
    compatibility_residual,
    family_kappa,
    family_pair,
    family_phi,
    family_residual,
    finsler_length,
    gamma_matrices,
    h4_constants,
    indicatrix,
    momenta,
)

__version__ = "0.1.0"
