"""Closed-form verdicts for ``C_{gamma K_c, az+b}``.

Every predicate here is decided from the four parameters alone. The numerics
module checks them against truncated matrices.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from .core import LOG_MAX
from .errors import FockOverflowError, UnboundedOperator, UnsupportedWeight
from .matrixizer import UNIT_CIRCLE_EPS, OperatorSpec, on_unit_circle

C_EQ_TOL = 1e-12


@dataclass
class ClassificationReport:
    bounded: bool
    compact: bool
    unitary_multiple: bool
    normal: bool
    hyponormal: bool
    cohyponormal: bool
    normaloid: bool
    closed_range: bool
    exact_norm: Optional[float] = None
    fixed_point: Optional[complex] = None
    eigenvalue_bound: Optional[float] = None
    critical_c: Optional[complex] = None
    degenerate: bool = False
    warnings: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return asdict(self)


def critical_c(a: complex, b: complex) -> complex:
    """Kernel parameter making ``C_{K_c, az+b}`` normal.

    ``b (conj(a) - 1) / (a - 1)`` for ``a != 1`` and ``-b`` for ``a == 1``.
    On the unit circle this equals ``-conj(a) b``.
    """
    a, b = complex(a), complex(b)
    if a == 1:
        return 0j - b
    return b * (a.conjugate() - 1) / (a - 1)


def _same(x: complex, y: complex, exact: bool, tol: float = C_EQ_TOL) -> bool:
    return x == y if exact else abs(x - y) <= tol


def _exp_real(x: float) -> float:
    if x > LOG_MAX:
        raise FockOverflowError(f"norm overflows: exponent {x:.6g}")
    return math.exp(x)


def _is_bounded(c, a, b, unit_eps, exact) -> bool:
    if on_unit_circle(a, unit_eps):
        return _same(complex(c), -complex(a).conjugate() * complex(b), exact)
    return abs(a) < 1


def exact_norm(
    gamma: complex,
    c: complex,
    a: complex,
    b: complex,
    *,
    unit_eps: float = UNIT_CIRCLE_EPS,
    exact: bool = False,
) -> float:
    """Operator norm of ``C_{gamma K_c, az+b}``.

    For ``|a| < 1`` the operator is unitarily equivalent to
    ``psi(p) C_{az+s}`` with ``p = b/(1-a)`` and
    ``s = c(1-a)/(conj(a)-1) + b``, giving
    ``|gamma| |exp(conj(c) b/(1-a))| exp(|s|^2 / (2(1-|a|^2)))``.
    On the unit circle the operator is a multiple of a unitary with norm
    ``|gamma| |exp(|b|^2/(1-conj(a)))|`` (``a != 1``) or
    ``|gamma| exp(|b|^2/2)`` (``a == 1``).

    Raises
    ------
    UnboundedOperator
        If the parameters do not give a bounded operator.
    """
    gamma, c, a, b = map(complex, (gamma, c, a, b))
    if gamma == 0:
        return 0.0
    if not _is_bounded(c, a, b, unit_eps, exact):
        raise UnboundedOperator(f"C_(K_{c}, {a}z+{b}) is unbounded on F^2")
    g = abs(gamma)
    if on_unit_circle(a, unit_eps):
        if a == 1:
            return g * _exp_real(abs(b) ** 2 / 2.0)
        return g * _exp_real((abs(b) ** 2 / (1 - a.conjugate())).real)
    s = c * (1 - a) / (a.conjugate() - 1) + b
    log_norm = (c.conjugate() * b / (1 - a)).real + 0.5 * abs(s) ** 2 / (1 - abs(a) ** 2)
    return g * _exp_real(log_norm)


def printed_first_factor_norm(c: complex, a: complex, b: complex) -> float:
    """Variant of the ``|a| < 1`` norm with first factor ``|exp(c/(1-a))|``.

    The shift is taken as ``c(1-a)/(a-1) + b = b - c``. Kept only so reports
    can show that this variant disagrees with the singular-value estimate;
    :func:`exact_norm` is the correct formula.
    """
    c, a, b = map(complex, (c, a, b))
    s = b - c
    return _exp_real((c / (1 - a)).real + 0.5 * abs(s) ** 2 / (1 - abs(a) ** 2))


def eigenvalue_bound(gamma: complex, c: complex, a: complex, b: complex) -> float:
    """``|psi(b/(1-a))| = |gamma exp(conj(c) b/(1-a))|``, defined for ``|a| < 1``."""
    gamma, c, a, b = map(complex, (gamma, c, a, b))
    if abs(a) >= 1:
        raise ValueError("eigenvalue bound needs |a| < 1")
    if gamma == 0:
        return 0.0
    return abs(gamma) * _exp_real((c.conjugate() * b / (1 - a)).real)


def classify(
    gamma: complex,
    c: complex,
    a: complex,
    b: complex,
    *,
    unit_eps: float = UNIT_CIRCLE_EPS,
    exact: bool = False,
) -> ClassificationReport:
    """Full verdict for ``C_{gamma K_c, az+b}``.

    ``exact=True`` compares ``c`` with the critical/bounded values by exact
    equality instead of the default absolute tolerance 1e-12. ``gamma = 0``
    yields the zero-operator report (bounded, compact, normal, norm 0, not
    closed range) flagged ``degenerate``.
    """
    gamma, c, a, b = map(complex, (gamma, c, a, b))
    unit = on_unit_circle(a, unit_eps)
    crit = critical_c(a, b)
    fp = None if (a == 1 and b != 0) else (0j if a == 1 else b / (1 - a))
    interior = abs(a) < 1 and not unit

    if gamma == 0:
        return ClassificationReport(
            bounded=True,
            compact=True,
            unitary_multiple=False,
            normal=True,
            hyponormal=True,
            cohyponormal=True,
            normaloid=True,
            closed_range=False,
            exact_norm=0.0,
            fixed_point=fp,
            eigenvalue_bound=0.0 if interior else None,
            critical_c=crit,
            degenerate=True,
            warnings=["zero weight: degenerate zero operator"],
        )

    bounded = _is_bounded(c, a, b, unit_eps, exact)
    unitary_multiple = bounded and unit
    is_crit = _same(c, crit, exact)
    normal = bounded and is_crit
    notes = []
    if abs(a) > 1 and not unit:
        notes.append("|a| > 1: never bounded")
    norm = exact_norm(gamma, c, a, b, unit_eps=unit_eps, exact=exact) if bounded else None
    return ClassificationReport(
        bounded=bounded,
        compact=bounded and interior,
        unitary_multiple=unitary_multiple,
        normal=normal,
        hyponormal=normal,
        cohyponormal=normal,
        # on the circle bounded means a unitary multiple, and c is then critical
        normaloid=normal or unitary_multiple,
        closed_range=unitary_multiple,
        exact_norm=norm,
        fixed_point=fp,
        eigenvalue_bound=eigenvalue_bound(gamma, c, a, b) if interior else None,
        critical_c=crit,
        warnings=notes,
    )


def classify_spec(spec: OperatorSpec, **kwargs) -> ClassificationReport:
    """Classify an :class:`OperatorSpec`; only scaled-kernel weights are supported."""
    w = spec.weight
    if not w.is_scaled_kernel:
        raise UnsupportedWeight("closed-form classification covers weights gamma * K_c only")
    return classify(w.scale, w.kernel_param, spec.symbol.a, spec.symbol.b, **kwargs)


def spec_params(spec: OperatorSpec) -> tuple[complex, complex, complex, complex]:
    w = spec.weight
    if not w.is_scaled_kernel:
        raise UnsupportedWeight("weight is not of the form gamma * K_c")
    return w.scale, w.kernel_param, spec.symbol.a, spec.symbol.b
