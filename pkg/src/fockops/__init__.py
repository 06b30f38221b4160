"""Truncated-matrix toolkit for weighted composition operators on the Fock space."""

from .core import (
    AffineSymbol,
    EntireWeight,
    FockVector,
    eval_weight,
    fixed_point,
    fock_inner,
    iterate,
    kernel_norm,
    kernel_vector,
    weight_taylor,
)
from .errors import (
    FockOverflowError,
    InvalidWeight,
    NoFiniteFixedPoint,
    NonConvergenceError,
    PrecisionWarning,
    UnboundedOperator,
    UnsupportedWeight,
)
from .classifier import ClassificationReport, classify, classify_spec, critical_c, eigenvalue_bound, exact_norm
from .matrixizer import (
    OperatorSpec,
    TruncatedOperator,
    adjoint_spec,
    build_matrix,
    compose_specs,
    resolve_outer,
    weyl_conjugate,
    weyl_matrix,
)


__version__ = "0.1.0"
