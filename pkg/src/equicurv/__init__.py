"""Exact realization of prescribed curvature operators by polynomial connections.

Everything is computed over the rationals: curvature-operator algebra
(validation, Ricci trace, trace-free decomposition), torsion-free
polynomial connections with their exact curvature/Ricci/trace-form fields,
the four class constructions realizing an operator at the origin, and the
layered Ricci-flat recursion with its convergence diagnostics.
"""

from equicurv._rational import Q
from equicurv.connections import (
    CurvatureField,
    OneForm,
    PolyConnection,
    curvature_at,
    curvature_field,
    d_omega,
    lemma2_report,
    omega,
    projective_shift,
    ricci_field,
    trace_curvature_field,
    volume_potential,
    weyl_projective_field,
)
from equicurv.constructions import (
    ConvergenceParams,
    RicciFlatSeries,
    choose_k_indices,
    construct_connection,
    convergence_params,
    convergence_report,
    equivariance_probe,
    remark6_demo,
    remark6_operator,
    represent_equiaffine,
    represent_generic,
    represent_proj_flat,
    represent_ricci_flat,
    ricci_flat_series,
    theta_from_ricci,
    transform_connection,
    transform_operator,
)
from equicurv.errors import ClassViolationError, PotentialError
from equicurv.operators import (
    CurvatureOperator,
    OperatorClass,
    RicciTensor,
    decompose_equiaffine,
    is_equiaffine,
    is_ricci_flat,
    project_to_curvature_space,
    random_operator,
    ricci,
    ricci_block,
    space_dimension,
    trace_two_form,
    weyl_projective,
)
from equicurv.poly import Poly
from equicurv.report import Check, VerificationReport

__version__ = "0.1.0"
