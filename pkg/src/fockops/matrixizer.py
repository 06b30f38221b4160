"""Truncated matrices of weighted composition operators in the ``e_n`` basis.

A :class:`TruncatedOperator` holds the ``M x N`` block
``entries[m, n] = <C_{psi,phi} e_n, e_m>`` for ``m < M`` (outer, range side)
and ``n < N`` (inner, domain side). Products and adjoints of truncations are
only meaningful once the range is resolved, which is what
:func:`resolve_outer` does by growing ``M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import AffineSymbol, EntireWeight, as_weight, check_guardrails, weight_taylor
from .errors import NonConvergenceError

UNIT_CIRCLE_EPS = 1e-12
GRAM_TOL = 1e-10
MAX_OUTER = 2048


@dataclass(frozen=True)
class OperatorSpec:
    """``f -> weight * (f o symbol)``."""

    weight: EntireWeight
    symbol: AffineSymbol

    def __post_init__(self):
        object.__setattr__(self, "weight", as_weight(self.weight))

    @classmethod
    def composition(cls, a: complex, b: complex = 0.0) -> "OperatorSpec":
        return cls(EntireWeight.constant(1.0), AffineSymbol(a, b))

    @classmethod
    def weighted(cls, gamma: complex, c: complex, a: complex, b: complex) -> "OperatorSpec":
        return cls(EntireWeight.kernel(c, gamma), AffineSymbol(a, b))

    @classmethod
    def identity(cls) -> "OperatorSpec":
        return cls.composition(1.0, 0.0)

    def apply(self, f, z):
        """Evaluate ``(C f)(z)`` for a callable ``f``."""
        return self.weight(z) * f(self.symbol(z))


@dataclass(frozen=True)
class TruncatedOperator:
    entries: np.ndarray
    spec: OperatorSpec

    @property
    def outer_dim(self) -> int:
        return self.entries.shape[0]

    @property
    def inner_dim(self) -> int:
        return self.entries.shape[1]

    def block(self, rows: int, cols: int | None = None) -> np.ndarray:
        return self.entries[:rows, : rows if cols is None else cols]

    @property
    def H(self) -> np.ndarray:
        return self.entries.conj().T


def default_outer(inner: int) -> int:
    return inner + max(32, inner // 2)


def on_unit_circle(a: complex, eps: float = UNIT_CIRCLE_EPS) -> bool:
    return abs(abs(a) - 1.0) <= eps


def build_matrix(spec: OperatorSpec, outer: int, inner: int) -> TruncatedOperator:
    """Columns ``n < inner`` of the operator, resolved to ``outer`` rows.

    Column ``n`` is the coefficient vector of ``psi * (a z + b)^n / sqrt(n!)``.
    With ``v_n`` that vector, ``v_n = (a z v_{n-1} + b v_{n-1}) / sqrt(n)`` and
    multiplication by ``z`` acts as ``(z f)_m = sqrt(m) f_{m-1}``. Rows ``m``
    of every column depend only on rows ``<= m`` of ``psi``, so the block is
    exact up to rounding for any ``outer``.
    """
    if inner < 1 or outer < inner:
        raise ValueError(f"need outer >= inner >= 1, got outer={outer}, inner={inner}")
    a, b = spec.symbol.a, spec.symbol.b
    check_guardrails(a=a, b=b, c=spec.weight.kernel_param, dim=inner)
    psi = weight_taylor(spec.weight, outer).coeffs
    out = np.zeros((outer, inner), dtype=complex)

    if b == 0:
        # column n = a^n * z^n/sqrt(n!) * psi, entries a^n sqrt(C(m, n)) psi_{m-n}
        m = np.arange(outer)
        power = 1.0 + 0j
        for n in range(inner):
            if n:
                power *= a
            k = m[n:] - n
            sqrt_binom = np.exp(0.5 * (gammaln(m[n:] + 1) - gammaln(n + 1) - gammaln(k + 1)))
            out[n:, n] = power * sqrt_binom * psi[: outer - n]
        return TruncatedOperator(out, spec)

    sqrt_m = np.sqrt(np.arange(outer, dtype=float))
    v = psi.copy()
    out[:, 0] = v
    for n in range(1, inner):
        nxt = b * v
        nxt[1:] += a * sqrt_m[1:] * v[:-1]
        v = nxt / math.sqrt(n)
        out[:, n] = v
    return TruncatedOperator(out, spec)


def _gram_blocks(mat: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    cols = mat[:, :n]
    rows = mat[:n, :]
    return cols.conj().T @ cols, rows @ rows.conj().T


def resolve_outer(
    spec: OperatorSpec,
    inner: int,
    outer: int | None = None,
    tol: float = GRAM_TOL,
    max_outer: int = MAX_OUTER,
    strict: bool = False,
):
    """Grow the outer dimension until the range of the truncation is resolved.

    Starting from ``outer`` (default ``inner + max(32, inner // 2)``), ``M`` is
    doubled until the principal ``inner x inner`` blocks of ``A^H A`` and
    ``A A^H`` change by less than ``tol`` (relative to ``max(1, |block|)``).

    Returns
    -------
    (TruncatedOperator, ConvergenceRecord)
    """
    from .numerics import ConvergenceRecord

    m = default_outer(inner) if outer is None else max(outer, inner)
    mat = build_matrix(spec, m, inner)
    prev = _gram_blocks(mat.entries, inner)
    dims, values = [(inner, m)], [float(np.linalg.norm(prev[0], 2))]
    delta = math.inf
    while m < max_outer:
        m = min(2 * m, max_outer)
        mat = build_matrix(spec, m, inner)
        cur = _gram_blocks(mat.entries, inner)
        scale = max(1.0, float(np.abs(cur[0]).max()), float(np.abs(cur[1]).max()))
        delta = max(float(np.abs(cur[0] - prev[0]).max()), float(np.abs(cur[1] - prev[1]).max())) / scale
        dims.append((inner, m))
        values.append(float(np.linalg.norm(cur[0], 2)))
        prev = cur
        if delta < tol:
            break
    record = ConvergenceRecord(dims, values, delta < tol, delta, tol)
    if strict and not record.converged:
        raise NonConvergenceError(f"outer dimension did not resolve by M={m} (delta={delta:.3g})", record)
    return mat, record


def weyl_spec(u: complex) -> OperatorSpec:
    """The Weyl unitary ``f -> k_u * f(z - u)``."""
    return OperatorSpec(EntireWeight.normalized_kernel(u), AffineSymbol(1.0, -complex(u)))


def weyl_matrix(u: complex, dim: int, outer: int | None = None) -> TruncatedOperator:
    """Truncation of the Weyl unitary with ``dim`` columns.

    ``outer`` defaults to the automatic padding; a unitary needs rows past
    ``dim`` before its columns have unit norm.
    """
    return build_matrix(weyl_spec(u), default_outer(dim) if outer is None else outer, dim)


def adjoint_spec(phi: AffineSymbol) -> OperatorSpec:
    """Adjoint of the plain composition operator: ``C_{az+b}^* = C_{K_b, conj(a) z}``."""
    return OperatorSpec(EntireWeight.kernel(phi.b), AffineSymbol(np.conj(phi.a), 0.0))


def compose_specs(first: OperatorSpec, second: OperatorSpec) -> OperatorSpec:
    """Spec of the product ``first @ second`` (``second`` acts first).

    ``C_{p1,f1} C_{p2,f2} = C_{p1 * (p2 o f1), f2 o f1}``.
    """
    weight = first.weight * second.weight.compose_affine(first.symbol)
    return OperatorSpec(weight, second.symbol.compose(first.symbol))


def weyl_conjugate(spec: OperatorSpec, u: complex) -> OperatorSpec:
    """Spec of ``W_u C W_u^*`` with ``W_u`` the Weyl unitary and ``W_u^* = W_{-u}``.

    The new symbol is ``a z + u(1 - a) + b`` and the new weight is
    ``exp(-|u|^2) exp(conj(u) z) psi(z - u) exp(-conj(u)(a z - a u + b))``;
    for ``psi = g K_c`` the kernel parameter becomes ``c + u(1 - conj(a))``.
    """
    u = complex(u)
    if u == 0:
        return spec
    a, b = spec.symbol.a, spec.symbol.b
    ubar = np.conj(u)
    weight = spec.weight.shift(u).times_exp(ubar).times_exp(-ubar * a)
    weight = weight * complex(np.exp(-abs(u) ** 2 - ubar * (b - a * u)))
    return OperatorSpec(weight, AffineSymbol(a, u * (1 - a) + b))
