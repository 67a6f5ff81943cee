"""Complex Baskakov-Szasz-Durrmeyer operators on compact disks.

Exact moment polynomials, operator application to analytic functions of
exponential growth, and sup-norm experiments verifying the quantitative
first- and second-order error bounds and the exact 1/n convergence order.
"""

from .analytic import (
    AnalyticFunction,
    EnvelopeReport,
    GrowthEnvelope,
    derivative,
    exponential,
    operator_tail_bound,
    operator_truncation_index,
    parse_function_spec,
    polynomial,
    validate_envelope,
)
from .engine import (
    ConvergenceRow,
    ConvergenceTable,
    OperatorResult,
    OrderFit,
    StudyOptions,
    apply_operator,
    approximation_error,
    asymptotic_ratio,
    convergence_study,
    derivative_approximation_error,
    derivative_study,
    estimate_order,
    upper_bound_constant,
    voronovskaja_bound_constant,
    voronovskaja_residual,
    voronovskaja_study,
)
from .errors import (
    BsdopError,
    ConditioningError,
    DegenerateFunctionError,
    DomainError,
    EvaluationError,
    HypothesisError,
    TruncationError,
)
from .moments import (
    BasisFunction,
    MomentTable,
    OracleConfig,
    OracleResult,
    VoronovskajaRemainder,
    basis_identity_holds,
    moment_error_bound,
    moment_integral,
    moment_poly,
    moment_poly_from_series,
    moment_table,
    remainder_bound_coefficient,
    remainder_recurrence_defect,
    remainder_sup_bound,
    tail_decay_inequality_holds,
    voronovskaja_remainder,
)
from .ratpoly import (
    CirclePoint,
    RationalPoly,
    SamplingConfig,
    SupNormResult,
    as_fraction,
    sup_norm_on_circle,
)

__version__ = "0.1.0"
