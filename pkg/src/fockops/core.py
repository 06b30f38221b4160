"""Scalar and series layer: kernels, weights, affine symbols, Fock vectors.

Conventions used throughout the package:

* ``K_c(z) = exp(conj(c) * z)``; its norm is ``exp(|c|^2 / 2)``.
* Vectors are stored in the orthonormal basis ``e_n = z^n / sqrt(n!)``, so the
  coefficient of ``e_n`` is ``sqrt(n!)`` times the monomial coefficient of ``z^n``.
  The ``sqrt(n!)`` factors are always produced by ratio recurrences, never by
  forming factorials.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import FockOverflowError, InvalidWeight, NoFiniteFixedPoint, PrecisionWarning

# log of the largest finite double
LOG_MAX = math.log(np.finfo(float).max)

GUARD_B = 2.0
GUARD_C = 2.0
GUARD_DIM = 256


def check_guardrails(*, a=None, b=None, c=None, dim=None, stacklevel=3):
    """Emit a :class:`PrecisionWarning` for parameters outside the working range."""
    problems = []
    if a is not None and abs(a) > 1.0 + 1e-12:
        problems.append(f"|a|={abs(a):.6g} > 1")
    if b is not None and abs(b) > GUARD_B:
        problems.append(f"|b|={abs(b):.6g} > {GUARD_B}")
    if c is not None and abs(c) > GUARD_C:
        problems.append(f"|c|={abs(c):.6g} > {GUARD_C}")
    if dim is not None and dim > GUARD_DIM:
        problems.append(f"dim={dim} > {GUARD_DIM}")
    if problems:
        warnings.warn("outside working range: " + ", ".join(problems), PrecisionWarning, stacklevel=stacklevel)


def _safe_exp(x: complex | float):
    re = x.real if isinstance(x, complex) else x
    if re > LOG_MAX:
        raise FockOverflowError(f"exp overflow: real exponent {re:.6g} exceeds {LOG_MAX:.6g}")
    return np.exp(x)


def sqrt_factorials(n: int) -> np.ndarray:
    """``sqrt(k!)`` for ``k < n`` via ``sqrt(k!) = sqrt((k-1)!) * sqrt(k)``.

    Overflows to ``inf`` past k ~ 170; callers work with ratios instead.
    """
    out = np.ones(n)
    if n > 1:
        out[1:] = np.cumprod(np.sqrt(np.arange(1, n, dtype=float)))
    return out


def _kernel_coeffs(c: complex, dim: int) -> np.ndarray:
    # conj(c)^n / sqrt(n!) by the recurrence t_n = t_{n-1} * conj(c) / sqrt(n)
    out = np.empty(dim, dtype=complex)
    out[0] = 1.0
    cb = np.conj(complex(c))
    for n in range(1, dim):
        out[n] = out[n - 1] * cb / math.sqrt(n)
    return out


def kernel_tail_bound(w: complex, dim: int) -> float:
    """Crude majorant ``|w|^(2N)/N! * exp(|w|^2)`` for the discarded kernel mass."""
    r2 = abs(w) ** 2
    if r2 == 0.0:
        return 0.0
    log_t = dim * math.log(r2) - math.lgamma(dim + 1) + r2
    return math.exp(log_t) if log_t < LOG_MAX else math.inf


@dataclass(frozen=True)
class FockVector:
    """Coefficients of a function in the basis ``e_n``.

    ``tail_bound`` bounds the squared norm of what was cut off (0 when the
    vector is exact, e.g. a polynomial that fits).
    """

    coeffs: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex).ravel()
        if arr.size < 1:
            raise ValueError("FockVector needs dim >= 1")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def dim(self) -> int:
        return self.coeffs.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def padded(self, dim: int) -> np.ndarray:
        """Copy of the coefficients zero-padded (or cut) to ``dim``."""
        out = np.zeros(dim, dtype=complex)
        k = min(dim, self.dim)
        out[:k] = self.coeffs[:k]
        return out

    def evaluate(self, z: complex) -> complex:
        """Value of the truncated series at ``z``."""
        z = complex(z)
        total = 0j
        term = 1.0 + 0j  # z^n / sqrt(n!)
        for n, cf in enumerate(self.coeffs):
            if n:
                term = term * z / math.sqrt(n)
            total += cf * term
        return total

    @classmethod
    def basis(cls, n: int, dim: int) -> "FockVector":
        v = np.zeros(dim, dtype=complex)
        v[n] = 1.0
        return cls(v)


def kernel_norm(w: complex) -> float:
    """Norm of the reproducing kernel, ``exp(|w|^2 / 2)``."""
    return float(_safe_exp(abs(w) ** 2 / 2.0))


def kernel_vector(w: complex, dim: int) -> FockVector:
    """Coefficients ``conj(w)^n / sqrt(n!)`` of ``K_w`` for ``n < dim``."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return FockVector(_kernel_coeffs(w, dim), kernel_tail_bound(w, dim))


def fock_inner(f: FockVector, g: FockVector) -> complex:
    """``<f, g> = sum_n f_n conj(g_n)``; the shorter vector is zero-padded."""
    n = max(f.dim, g.dim)
    return complex(np.vdot(g.padded(n), f.padded(n)))


@dataclass(frozen=True)
class EntireWeight:
    """``psi(z) = gamma * (sum_k poly[k] z^k) * exp(conj(kernel_param) z)``.

    The class is closed under products, argument shifts, composition with an
    affine map and multiplication by ``exp(d z)``, which is all the operator
    algebra on affine symbols ever needs.
    """

    gamma: complex = 1.0
    poly: tuple = (1.0,)
    kernel_param: complex = 0.0

    def __post_init__(self):
        p = [complex(x) for x in self.poly]
        while len(p) > 1 and p[-1] == 0:
            p.pop()
        if not p:
            raise InvalidWeight("polynomial factor must have at least one coefficient")
        object.__setattr__(self, "poly", tuple(p))
        object.__setattr__(self, "gamma", complex(self.gamma))
        object.__setattr__(self, "kernel_param", complex(self.kernel_param))

    # constructors
    @classmethod
    def kernel(cls, c: complex, gamma: complex = 1.0) -> "EntireWeight":
        return cls(gamma, (1.0,), c)

    @classmethod
    def constant(cls, value: complex = 1.0) -> "EntireWeight":
        return cls(value, (1.0,), 0.0)

    @classmethod
    def normalized_kernel(cls, u: complex) -> "EntireWeight":
        """``k_u = K_u / ||K_u||``."""
        return cls(math.exp(-abs(u) ** 2 / 2.0), (1.0,), u)

    # structure
    @property
    def degree(self) -> int:
        return len(self.poly) - 1

    @property
    def is_scaled_kernel(self) -> bool:
        return self.degree == 0

    @property
    def scale(self) -> complex:
        """Overall constant when the weight is ``scale * K_c``."""
        if not self.is_scaled_kernel:
            raise InvalidWeight("weight has a non-constant polynomial factor")
        return self.gamma * self.poly[0]

    @property
    def is_zero(self) -> bool:
        return self.gamma == 0 or all(p == 0 for p in self.poly)

    def _polynomial(self) -> Polynomial:
        return Polynomial(np.array(self.poly, dtype=complex))

    # algebra
    def __mul__(self, other: "EntireWeight") -> "EntireWeight":
        if not isinstance(other, EntireWeight):
            return EntireWeight(self.gamma * complex(other), self.poly, self.kernel_param)
        poly = np.convolve(np.array(self.poly), np.array(other.poly))
        return EntireWeight(self.gamma * other.gamma, tuple(poly), self.kernel_param + other.kernel_param)

    __rmul__ = __mul__

    def times_exp(self, d: complex) -> "EntireWeight":
        """``exp(d z) * psi(z)``; since ``exp(d z) = K_conj(d)`` the kernel parameter gains ``conj(d)``."""
        return EntireWeight(self.gamma, self.poly, self.kernel_param + np.conj(complex(d)))

    def shift(self, u: complex) -> "EntireWeight":
        """``z -> psi(z - u)``."""
        return self.compose_affine(AffineSymbol(1.0, -complex(u)))

    def compose_affine(self, phi: "AffineSymbol") -> "EntireWeight":
        """``z -> psi(a z + b)``."""
        a, b = phi.a, phi.b
        cb = np.conj(self.kernel_param)
        poly = self._polynomial()(Polynomial([b, a])).coef
        gamma = self.gamma * _safe_exp(cb * b)
        # exp(conj(c) a z) = K_{c conj(a)}
        return EntireWeight(gamma, tuple(poly), self.kernel_param * np.conj(a))

    def __call__(self, z: complex) -> complex:
        return eval_weight(self, z)


def eval_weight(psi: EntireWeight, z: complex) -> complex:
    """Pointwise value ``gamma * poly(z) * exp(conj(c) z)``."""
    z = complex(z)
    pz = complex(np.polynomial.polynomial.polyval(z, np.array(psi.poly)))
    return complex(psi.gamma * pz * _safe_exp(np.conj(psi.kernel_param) * z))


def weight_taylor(psi: EntireWeight, dim: int) -> FockVector:
    """Coefficients of ``psi`` in the basis ``e_n``, ``n < dim``.

    The monomial coefficient of ``z^n`` is ``sum_k p_k conj(c)^(n-k) / (n-k)!``;
    in the ``e_n`` basis each term becomes
    ``p_k * sqrt(n!/(n-k)!) * [conj(c)^(n-k)/sqrt((n-k)!)]``.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    kc = _kernel_coeffs(psi.kernel_param, dim)
    out = np.zeros(dim, dtype=complex)
    n = np.arange(dim, dtype=float)
    rising = np.ones(dim)  # sqrt(n (n-1) ... (n-k+1))
    for k, p in enumerate(psi.poly):
        if k >= dim:
            break
        if k:
            rising = rising * np.sqrt(np.maximum(n - (k - 1), 0.0))
        if p != 0:
            out[k:] += p * rising[k:] * kc[: dim - k]
    out *= psi.gamma
    tail = 0.0 if psi.kernel_param == 0 and psi.degree < dim else _weight_tail(psi, dim)
    return FockVector(out, tail)


def _weight_tail(psi: EntireWeight, dim: int) -> float:
    # |gamma|^2 * (sum |p_k|)^2 * sup-style majorant of the kernel tail, shifted by the degree
    scale = abs(psi.gamma) ** 2 * sum(abs(p) for p in psi.poly) ** 2
    start = max(dim - psi.degree, 0)
    return scale * kernel_tail_bound(psi.kernel_param, start) * (dim + 1) ** psi.degree if start else math.inf


@dataclass(frozen=True)
class AffineSymbol:
    """The map ``z -> a z + b``."""

    a: complex = 1.0
    b: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))

    def __call__(self, z):
        return self.a * z + self.b

    def compose(self, inner: "AffineSymbol") -> "AffineSymbol":
        """``self o inner``."""
        return AffineSymbol(self.a * inner.a, self.a * inner.b + self.b)

    @property
    def is_identity(self) -> bool:
        return self.a == 1 and self.b == 0

    def fixed_point(self) -> complex:
        return fixed_point(self)

    def iterate(self, n: int) -> "AffineSymbol":
        return iterate(self, n)


def fixed_point(phi: AffineSymbol) -> complex:
    """``b / (1 - a)``; the identity map reports 0."""
    if phi.a == 1:
        if phi.b == 0:
            return 0j
        raise NoFiniteFixedPoint(f"translation z + {phi.b} has no fixed point")
    return phi.b / (1 - phi.a)


def iterate(phi: AffineSymbol, n: int) -> AffineSymbol:
    """n-th iterate in closed form: ``(a^n, b (1 - a^n) / (1 - a))``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return AffineSymbol(1.0, 0.0)
    if phi.a == 1:
        return AffineSymbol(1.0, n * phi.b)
    an = phi.a**n
    return AffineSymbol(an, phi.b * (1 - an) / (1 - phi.a))


def as_weight(value) -> EntireWeight:
    """Coerce a scalar to a constant weight; weights pass through."""
    if isinstance(value, EntireWeight):
        return value
    return EntireWeight.constant(complex(value))


def poly_weight(coeffs: Sequence[complex], c: complex = 0.0, gamma: complex = 1.0) -> EntireWeight:
    return EntireWeight(gamma, tuple(coeffs), c)
