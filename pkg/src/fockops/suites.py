"""Built-in verification suites driven by the ``verify`` command.

Each suite yields :class:`Check` records in a fixed order. The printed
metrics use two significant digits so repeated runs are byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .classifier import classify, critical_c, eigenvalue_bound, exact_norm, printed_first_factor_norm
from .core import AffineSymbol
from .errors import NonConvergenceError
from .matrixizer import OperatorSpec, weyl_matrix
from .numerics import (
    CommutatorVerdict,
    adjoint_residual,
    closed_range_witness,
    conjugation_residual,
    eigen_relation_check,
    gram_kernel_residual,
    isometry_defect,
    kernel_eigenpair,
    log_witness,
    op_norm_estimate,
    point_spectrum_estimate,
    self_commutator,
    spectral_radius_estimate,
    witness_peak,
    witness_threshold,
)

A_GRID = (0.3, -0.7, 0.5j)
B_GRID = (0.0, 0.4, 0.8j)
C_FIXED = (0.0, 0.5)
U_EXTRA = 0.3j
W_GRID = (0.0, 0.7, -1.0 + 1.0j, 1.5j, 1.5)
UNIT_CASES = ((1.0, 1j, 1j, 1.0), (1.0, -2.0, 1.0, 2.0))
CRIT_TOL = 1e-12


@dataclass(frozen=True)
class Check:
    name: str
    params: str
    metric: str
    value: float
    passed: bool | None  # None: informational only
    detail: str = ""

    @property
    def status(self) -> str:
        return "INFO" if self.passed is None else ("PASS" if self.passed else "FAIL")

    def line(self) -> str:
        line = f"{self.name} @ {self.params} : {self.status} {self.metric}={self.value:.1e}"
        return f"{line}\n    {self.detail}" if self.detail else line


@dataclass
class VerifyConfig:
    inner_dim: int = 64
    tol: float = 1e-8
    outer_pad: int | None = None

    def thr(self, criterion: float) -> float:
        """Criterion tolerance, relaxed to the run tolerance when that is looser."""
        return max(criterion, self.tol)


def fmt_c(z: complex) -> str:
    z = complex(z)
    re, im = z.real + 0.0, z.imag + 0.0
    if im == 0:
        return f"{re:.6g}"
    if re == 0:
        return f"{im:.6g}i"
    return f"{re:.6g}{im:+.6g}i"


def weighted_grid():
    """(a, b, c) over the test grid; c runs over 0, 0.5 and the critical value."""
    for a in A_GRID:
        for b in B_GRID:
            crit = critical_c(a, b)
            cs = list(C_FIXED)
            if all(abs(crit - c) > CRIT_TOL for c in cs):
                cs.append(crit)
            for c in cs:
                yield complex(a), complex(b), complex(c), abs(c - crit) <= CRIT_TOL


def _record_text(record) -> str:
    steps = " ".join(f"(N={n},M={m}):{v:.3e}" for (n, m), v in zip(record.dims, record.values))
    return f"convergence record: {steps} final_delta={record.final_delta:.3e} tol={record.tol:.1e}"


def _p(**kw) -> str:
    return ",".join(f"{k}={fmt_c(v)}" for k, v in kw.items())


def suite_norms(cfg: VerifyConfig) -> Iterator[Check]:
    n = cfg.inner_dim
    for a in A_GRID:
        for b in B_GRID:
            spec = OperatorSpec.composition(a, b)
            est, rec = op_norm_estimate(spec, tol=cfg.tol, start_dim=max(n // 2, 4), max_dim=n, outer_pad=cfg.outer_pad)
            closed = math.exp(0.5 * abs(b) ** 2 / (1 - abs(a) ** 2))
            err = abs(est / closed - 1)
            yield Check("norm.composition", _p(a=a, b=b), "rel_err", err, err <= cfg.thr(1e-6) and rec.converged)
    for a, b, c, _ in weighted_grid():
        spec = OperatorSpec.weighted(1, c, a, b)
        est, rec = op_norm_estimate(spec, tol=cfg.tol, start_dim=max(n // 2, 4), max_dim=n, outer_pad=cfg.outer_pad)
        err = abs(est / exact_norm(1, c, a, b) - 1)
        yield Check("norm.weighted", _p(a=a, b=b, c=c), "rel_err", err, err <= cfg.thr(1e-6) and rec.converged)
        alt = abs(est / printed_first_factor_norm(c, a, b) - 1)
        yield Check("norm.weighted.printed_variant", _p(a=a, b=b, c=c), "rel_err", alt, None)
    for g, c, a, b in UNIT_CASES:
        spec = OperatorSpec.weighted(g, c, a, b)
        defect = isometry_defect(spec, exact_norm(g, c, a, b), inner=min(32, n))
        yield Check("norm.unit_circle", _p(a=a, b=b, c=c), "isometry_err", defect, defect <= cfg.thr(1e-6))


def suite_commutator(cfg: VerifyConfig) -> Iterator[Check]:
    n = min(48, cfg.inner_dim)
    for a, b, c, crit in weighted_grid():
        v = self_commutator(OperatorSpec.weighted(1, c, a, b), inner=n)
        if crit:
            ok = v.verdict == CommutatorVerdict.NORMAL
            yield Check("commutator.normal", _p(a=a, b=b, c=c), "defect", v.defect_norm, ok and v.record.converged)
        else:
            ok = v.verdict == CommutatorVerdict.INDEFINITE
            margin = min(-v.min_eig, v.max_eig)
            yield Check("commutator.indefinite", _p(a=a, b=b, c=c), "min_abs_eig", margin, ok and v.record.converged)


def suite_spectrum(cfg: VerifyConfig) -> Iterator[Check]:
    n = cfg.inner_dim
    for a, b, c, crit in weighted_grid():
        spec = OperatorSpec.weighted(1, c, a, b)
        norm, _ = op_norm_estimate(spec, tol=cfg.tol, start_dim=max(n // 2, 4), max_dim=n, outer_pad=cfg.outer_pad)
        radius = spectral_radius_estimate(spec, n)
        if crit:
            gap = abs(norm - radius)
            yield Check("normaloid.equal", _p(a=a, b=b, c=c), "gap", gap, gap <= cfg.thr(1e-6))
        else:
            gap = norm - radius
            yield Check("normaloid.strict", _p(a=a, b=b, c=c), "gap", gap, gap >= 1e-3)
        bound = eigenvalue_bound(1, c, a, b)
        worst = float(np.max(np.abs(point_spectrum_estimate(spec, n)))) / bound - 1
        yield Check("eigen.bound", _p(a=a, b=b, c=c), "excess", max(worst, 0.0), worst <= 1e-6)
    spec = OperatorSpec.weighted(1, 0.3, 0.5, 0.3)
    top = point_spectrum_estimate(spec, n, 3)
    err = float(np.max(np.abs(top - math.exp(0.18) * np.array([1, 0.5, 0.25]))))
    yield Check("eigen.top3", _p(a=0.5, b=0.3, c=0.3), "abs_err", err, err <= cfg.thr(1e-6))
    for k in (0, 1):
        lam, h = kernel_eigenpair(spec, k)
        for steps in (1, 2, 4):
            r = eigen_relation_check(spec, lam, h, steps, (0, 1, 1j))
            yield Check(f"eigen.iterate.k{k}", _p(a=0.5, b=0.3, c=0.3, n=steps), "residual", r, r <= cfg.thr(1e-10))


def suite_conjugation(cfg: VerifyConfig) -> Iterator[Check]:
    n = min(32, cfg.inner_dim)
    for a, b, c, _ in weighted_grid():
        spec = OperatorSpec.weighted(1, c, a, b)
        p = b / (1 - a)
        for label, u in (("0", 0), ("-p", -p), ("b/(a-1)", b / (a - 1)), ("0.3i", U_EXTRA)):
            params = _p(a=a, b=b, c=c) + f",u={label}"
            try:
                r = conjugation_residual(spec, u, inner=n)
            except NonConvergenceError as exc:
                yield Check("conjugation", params, "nonconverged_delta", exc.record.final_delta, False, _record_text(exc.record))
                continue
            yield Check("conjugation", params, "residual", r, r <= cfg.thr(1e-8))
    lead = (3 * cfg.inner_dim) // 4
    for u in (0.5, 1.0, 1j, -0.6 + 0.8j):
        w = weyl_matrix(u, cfg.inner_dim).entries
        gram = w.conj().T @ w
        err = float(np.linalg.norm(gram[:lead, :lead] - np.eye(lead), 2))
        yield Check("weyl.unitary", _p(u=u), "residual", err, err <= cfg.thr(1e-10))


def suite_adjoint(cfg: VerifyConfig) -> Iterator[Check]:
    n = cfg.inner_dim
    for a, b, c, _ in weighted_grid():
        spec = OperatorSpec.weighted(1, c, a, b)
        worst = max(adjoint_residual(spec, w, n) for w in W_GRID)
        yield Check("adjoint.kernel", _p(a=a, b=b, c=c), "max_rel_residual", worst, worst <= cfg.thr(1e-8))
    for a in A_GRID:
        for b in B_GRID:
            r = gram_kernel_residual(AffineSymbol(a, b), n)
            yield Check("adjoint.gram_eigenvector", _p(a=a, b=b), "residual", r, r <= cfg.thr(1e-8))


def _sample_params(rng: np.random.Generator, count: int):
    """Random (gamma, c, a, b); a third land exactly on the circle with c = -conj(a) b."""
    for i in range(count):
        b = complex(*rng.uniform(-1.5, 1.5, 2))
        gamma = complex(*rng.uniform(0.2, 2.0, 2))
        kind = i % 3
        if kind == 0:
            a = complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))
            c = -a.conjugate() * b
        elif kind == 1:
            a = complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))
            c = -a.conjugate() * b + complex(*rng.uniform(-0.5, 0.5, 2))
        else:
            a = complex(rng.uniform(0, 0.95) * np.exp(1j * rng.uniform(0, 2 * np.pi)))
            c = complex(*rng.uniform(-1.5, 1.5, 2))
        yield gamma, c, a, b


def suite_witness(cfg: VerifyConfig, seed: int = 20181) -> Iterator[Check]:
    rng = np.random.default_rng(seed)
    wrong = 0
    for gamma, c, a, b in _sample_params(rng, 1000):
        rep = classify(gamma, c, a, b)
        expected = abs(abs(a) - 1) <= 1e-12 and abs(c + a.conjugate() * b) <= 1e-12
        wrong += rep.closed_range != expected
    yield Check("closed_range.classifier", "samples=1000", "mismatches", float(wrong), wrong == 0)

    interior = [p for p in _sample_params(rng, 60) if abs(p[2]) < 1][:10]
    for gamma, c, a, b in interior:
        peak = witness_peak(gamma, c, a)
        r_star = witness_threshold(gamma, c, a)
        grid = np.linspace(peak, r_star + 5.0, 200)
        rows = closed_range_witness(gamma, c, a, b, np.append(grid, r_star))
        g = np.array([row[1] for row in rows[:-1]])
        logs = np.array([log_witness(gamma, c, a, r) for r in grid])
        decreasing = bool(np.all(np.diff(logs) < 0))
        ok = decreasing and rows[-1][1] <= 1e-12 and bool(np.all(g[grid >= r_star] <= 1e-12))
        yield Check("closed_range.witness", _p(gamma=gamma, c=c, a=a), "r_star", r_star, ok)


SUITES: dict[str, Callable[[VerifyConfig], Iterator[Check]]] = {
    "norms": suite_norms,
    "commutator": suite_commutator,
    "conjugation": suite_conjugation,
    "adjoint": suite_adjoint,
    "spectrum": suite_spectrum,
    "witness": suite_witness,
}


def run_suite(name: str, cfg: VerifyConfig) -> list[Check]:
    names = list(SUITES) if name == "all" else [name]
    checks: list[Check] = []
    for nm in names:
        checks.extend(SUITES[nm](cfg))
    return checks
