"""Numerical oracles that check the closed forms against truncated matrices.

Everything here runs dense SVD / eigendecompositions on outer-padded
truncations. Answers that depend on a truncation size carry a
:class:`ConvergenceRecord`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import AffineSymbol, EntireWeight, iterate, kernel_vector
from .errors import NonConvergenceError
from .matrixizer import (
    GRAM_TOL,
    OperatorSpec,
    build_matrix,
    compose_specs,
    adjoint_spec,
    default_outer,
    resolve_outer,
    weyl_conjugate,
    weyl_spec,
)

NORMAL_TOL = 1e-8
INDEFINITE_TOL = 1e-4
WITNESS_LEVEL = 1e-12


@dataclass
class ConvergenceRecord:
    """Values of a quantity over a sequence of ``(inner N, outer M)`` truncations."""

    dims: list
    values: list
    converged: bool
    final_delta: float
    tol: float = 1e-8

    def csv_rows(self) -> list[tuple[int, int, float]]:
        return [(n, m, v) for (n, m), v in zip(self.dims, self.values)]

    def as_dict(self) -> dict:
        return {
            "dims": [list(d) for d in self.dims],
            "values": list(self.values),
            "converged": self.converged,
            "final_delta": self.final_delta,
            "tol": self.tol,
        }


@dataclass
class CommutatorVerdict:
    defect_norm: float
    min_eig: float
    max_eig: float
    verdict: str
    record: ConvergenceRecord | None = None

    NORMAL = "NormalLike"
    INDEFINITE = "Indefinite"
    POSITIVE = "PositiveDefectLike"
    NEGATIVE = "NegativeDefectLike"


def _svd_max(mat: np.ndarray) -> float:
    return float(np.linalg.svd(mat, compute_uv=False)[0])


def op_norm_estimate(
    spec: OperatorSpec,
    tol: float = 1e-8,
    start_dim: int = 16,
    max_dim: int = 256,
    outer_pad: int | None = None,
) -> tuple[float, ConvergenceRecord]:
    """Largest singular value of outer-resolved truncations, ``N`` doubling.

    Stops when two successive estimates differ by at most ``tol``. If
    ``max_dim`` is reached first the record comes back with
    ``converged=False``; nothing is raised. ``outer_pad`` fixes the first
    outer dimension tried at ``N + outer_pad`` instead of the automatic rule.
    """
    dims, values = [], []
    n = start_dim
    delta = math.inf
    resolved = True
    while True:
        mat, rec = resolve_outer(spec, n, outer=None if outer_pad is None else n + outer_pad)
        resolved = resolved and rec.converged
        dims.append((n, mat.outer_dim))
        values.append(_svd_max(mat.entries))
        if len(values) > 1:
            delta = abs(values[-1] - values[-2])
            if delta <= tol:
                break
        if n >= max_dim:
            break
        n = min(2 * n, max_dim)
    return values[-1], ConvergenceRecord(dims, values, delta <= tol and resolved, delta, tol)


def _commutator_blocks(spec: OperatorSpec, n: int, k: int) -> tuple[np.ndarray, np.ndarray, int]:
    mat, _ = resolve_outer(spec, k)
    a = mat.entries
    cols, rows = a[:, :n], a[:n, :]
    return cols.conj().T @ cols, rows @ rows.conj().T, mat.outer_dim


def self_commutator(
    spec: OperatorSpec,
    inner: int = 48,
    outer: int | None = None,
    normal_tol: float = NORMAL_TOL,
    indefinite_tol: float = INDEFINITE_TOL,
    block_tol: float = GRAM_TOL,
    max_dim: int = 1024,
    strict: bool = False,
) -> CommutatorVerdict:
    """Spectrum of the principal ``inner x inner`` block of ``T^* T - T T^*``.

    ``T T^*`` needs every column of the rows ``< inner``, so the working
    matrix has ``k > inner`` columns (starting at ``outer``), and ``k`` is
    doubled until both blocks move by less than ``block_tol``.

    The verdict is ``NormalLike`` when the block norm is at most
    ``normal_tol``; ``Indefinite`` when eigenvalues below ``-indefinite_tol``
    and above ``indefinite_tol`` both occur; otherwise the sign of the
    dominant eigenvalue picks ``PositiveDefectLike`` (hyponormal-like) or
    ``NegativeDefectLike`` (cohyponormal-like).
    """
    k = default_outer(inner) if outer is None else max(outer, inner)
    tt, t_t, m = _commutator_blocks(spec, inner, k)
    dims, values = [(k, m)], [float(np.linalg.norm(tt - t_t, 2))]
    delta = math.inf
    while k < max_dim:
        k = min(2 * k, max_dim)
        tt2, t_t2, m = _commutator_blocks(spec, inner, k)
        scale = max(1.0, float(np.abs(tt2).max()), float(np.abs(t_t2).max()))
        delta = max(float(np.abs(tt2 - tt).max()), float(np.abs(t_t2 - t_t).max())) / scale
        tt, t_t = tt2, t_t2
        dims.append((k, m))
        values.append(float(np.linalg.norm(tt - t_t, 2)))
        if delta < block_tol:
            break
    record = ConvergenceRecord(dims, values, delta < block_tol, delta, block_tol)
    if strict and not record.converged:
        raise NonConvergenceError("self-commutator block did not converge", record)

    defect = tt - t_t
    defect = 0.5 * (defect + defect.conj().T)
    eig = np.linalg.eigvalsh(defect)
    lo, hi = float(eig[0]), float(eig[-1])
    norm = max(abs(lo), abs(hi))
    if norm <= normal_tol:
        verdict = CommutatorVerdict.NORMAL
    elif lo < -indefinite_tol and hi > indefinite_tol:
        verdict = CommutatorVerdict.INDEFINITE
    elif hi >= -lo:
        verdict = CommutatorVerdict.POSITIVE
    else:
        verdict = CommutatorVerdict.NEGATIVE
    return CommutatorVerdict(norm, lo, hi, verdict, record)


def _square_truncation(spec: OperatorSpec, n: int) -> np.ndarray:
    return build_matrix(spec, n, n).entries


def point_spectrum_estimate(spec: OperatorSpec, inner: int = 64, k: int | None = None) -> np.ndarray:
    """The ``k`` largest-modulus eigenvalues of the ``inner x inner`` compression."""
    ev = np.linalg.eigvals(_square_truncation(spec, inner))
    ev = ev[np.lexsort((ev.imag, ev.real, -np.abs(ev)))]
    return ev if k is None else ev[:k]


def spectral_radius_estimate(spec: OperatorSpec, inner: int = 64) -> float:
    return float(np.abs(point_spectrum_estimate(spec, inner, 1))[0])


def conjugation_residual(
    spec: OperatorSpec,
    u: complex,
    inner: int = 32,
    tol: float = GRAM_TOL,
    max_dim: int = 512,
) -> float:
    """``||W_u A W_u^* - B||_2`` on the leading ``inner x inner`` block.

    ``A`` truncates ``spec`` and ``B`` truncates ``weyl_conjugate(spec, u)``.
    The triple product is formed from padded truncations of size ``k`` and
    ``k`` is doubled until the leading block stops moving.

    Raises
    ------
    NonConvergenceError
        If the leading block has not settled by ``max_dim``.
    """
    target = _square_truncation(weyl_conjugate(spec, u), inner)
    k = default_outer(inner)
    prev = None
    dims, values = [], []
    while True:
        k2 = default_outer(k)
        w_minus = build_matrix(weyl_spec(-u), k, inner).entries  # = W_u^* on the first columns
        a = build_matrix(spec, k2, k).entries
        w_plus = build_matrix(weyl_spec(u), k2, k2).entries[:inner, :]
        block = w_plus @ (a @ w_minus)
        resid = float(np.linalg.norm(block - target, 2))
        dims.append((inner, k2))
        values.append(resid)
        if prev is not None:
            delta = float(np.abs(block - prev).max()) / max(1.0, float(np.abs(block).max()))
            if delta < tol:
                return resid
            if k2 >= max_dim:
                raise NonConvergenceError(
                    "conjugation block did not converge",
                    ConvergenceRecord(dims, values, False, delta, tol),
                )
        prev = block
        k = k2


def adjoint_residual(spec: OperatorSpec, w: complex, inner: int = 64) -> float:
    """Relative size of ``A^H K_w - conj(psi(w)) K_{phi(w)}`` over the first ``inner`` coefficients."""
    mat, _ = resolve_outer(spec, inner, outer=max(default_outer(inner), 96))
    kw = kernel_vector(w, mat.outer_dim).coeffs
    lhs = mat.H @ kw
    rhs = np.conj(spec.weight(w)) * kernel_vector(spec.symbol(w), inner).coeffs
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))


def gram_kernel_residual(phi: AffineSymbol, inner: int = 64) -> float:
    """Eigen-relation ``G^* K_v = exp(|b|^2/(1-|a|^2)) K_v`` for ``G = C_phi^* C_phi``.

    ``v = b/(1-|a|^2)``; the residual is relative to ``|K_v|`` on the first
    ``inner`` coefficients.
    """
    a, b = phi.a, phi.b
    gram = compose_specs(adjoint_spec(phi), OperatorSpec(EntireWeight.constant(1.0), phi))
    v = b / (1 - abs(a) ** 2)
    lam = math.exp(abs(b) ** 2 / (1 - abs(a) ** 2))
    mat, _ = resolve_outer(gram, inner)
    kv = kernel_vector(v, mat.outer_dim).coeffs
    lhs = mat.H @ kv
    return float(np.linalg.norm(lhs - lam * kv[:inner]) / np.linalg.norm(kv[:inner]))


def isometry_defect(
    spec: OperatorSpec,
    scale: float,
    inner: int = 32,
    samples: int = 10,
    seed: int = 0,
    tol: float = GRAM_TOL,
) -> float:
    """Max over random unit vectors ``x`` of ``| |A x| - scale |``.

    ``x`` lives in the span of the first ``inner`` basis vectors and ``A`` is
    outer-resolved, so for a multiple of a unitary the defect goes to 0.
    """
    mat, _ = resolve_outer(spec, inner, tol=tol)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((inner, samples)) + 1j * rng.standard_normal((inner, samples))
    x /= np.linalg.norm(x, axis=0)
    return float(np.max(np.abs(np.linalg.norm(mat.entries @ x, axis=0) - scale)))


def _witness_angle(a: complex) -> float:
    return 0.0 if a == 0 else float(np.angle(a))


def log_witness(gamma: complex, c: complex, a: complex, r: float) -> float:
    """``log g(r) = 2 log|gamma| + 2 Re(conj(c) r e^{-i theta}) + r^2 (|a|^2 - 1)``."""
    w = r * np.exp(-1j * _witness_angle(a))
    return 2 * math.log(abs(gamma)) + 2 * float((np.conj(c) * w).real) + r * r * (abs(a) ** 2 - 1)


def closed_range_witness(
    gamma: complex, c: complex, a: complex, b: complex, r_grid: Iterable[float]
) -> list[tuple[float, float]]:
    """``g(r) = |psi(r e^{-i theta})|^2 exp(r^2 (|a|^2 - 1))`` with ``theta = arg a``.

    Evaluated in log space, so large ``r`` underflows cleanly to 0. ``b``
    plays no role in ``g``; it is accepted for signature symmetry.
    """
    gamma, c, a = complex(gamma), complex(c), complex(a)
    if gamma == 0:
        raise ValueError("witness needs a nonzero weight")
    if abs(a) >= 1:
        raise ValueError("witness needs |a| < 1")
    return [(float(r), math.exp(log_witness(gamma, c, a, r))) for r in r_grid]


def witness_peak(gamma: complex, c: complex, a: complex) -> float:
    """Radius beyond which ``g`` is strictly decreasing (``g`` is log-concave in r)."""
    w_dir = np.exp(-1j * _witness_angle(complex(a)))
    alpha = 2 * (np.conj(complex(c)) * w_dir).real
    return max(0.0, alpha / (2 * (1 - abs(a) ** 2)))


def witness_threshold(gamma: complex, c: complex, a: complex, level: float = WITNESS_LEVEL) -> float:
    """Smallest ``r`` past the peak with ``g(r) <= level``; ``g`` stays below it afterwards."""
    a = complex(a)
    beta = 1 - abs(a) ** 2
    alpha = 2 * (np.conj(complex(c)) * np.exp(-1j * _witness_angle(a))).real
    const = 2 * math.log(abs(gamma)) - math.log(level)
    # beta r^2 - alpha r - const = 0
    disc = alpha * alpha + 4 * beta * const
    if disc < 0:
        return witness_peak(gamma, c, a)
    r = max(witness_peak(gamma, c, a), (alpha + math.sqrt(disc)) / (2 * beta))
    # the root is exact only up to rounding; step up until g(r) really is <= level
    while math.exp(log_witness(gamma, c, a, r)) > level:
        r = math.nextafter(r, math.inf)
    return r


def eigen_relation_check(
    spec: OperatorSpec,
    lam: complex,
    h: EntireWeight,
    n: int,
    z_samples: Sequence[complex],
) -> float:
    """Max over samples of ``|lam^n h(z) - prod_{j<n} psi(phi_j(z)) h(phi_n(z))|``."""
    worst = 0.0
    for z in z_samples:
        prod = 1.0 + 0j
        for j in range(n):
            prod *= spec.weight(iterate(spec.symbol, j)(z))
        rhs = prod * h(iterate(spec.symbol, n)(z))
        worst = max(worst, abs(lam**n * h(z) - rhs))
    return worst


def kernel_eigenpair(spec: OperatorSpec, k: int = 0) -> tuple[complex, EntireWeight]:
    """Eigenpair ``(psi(p) a^k, (z - p)^k K_d)`` of ``C_{g K_c, az+b}``, ``d = c/(1-conj(a))``.

    With ``p = b/(1-a)``: ``K_c(z) K_d(az+b) = psi(p)/g * K_d(z)`` and
    ``a z + b - p = a (z - p)``.
    """
    w = spec.weight
    a, b = spec.symbol.a, spec.symbol.b
    p = b / (1 - a)
    d = w.kernel_param / (1 - np.conj(a))
    poly = np.polynomial.polynomial.polypow([-p, 1.0], k) if k else [1.0]
    return complex(w(p) * a**k), EntireWeight(1.0, tuple(poly), d)
