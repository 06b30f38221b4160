"""The eleven acceptance criteria, each at its stated tolerance.

Every criterion prints one ``criterion N: PASS|FAIL ...`` line. Run directly
with ``python tests/test_acceptance.py`` or through pytest, where the lines
are repeated in the terminal summary.
"""

import contextlib
import io
import json
import math
import sys

import numpy as np
import pytest

from fockops import cli
from fockops.classifier import critical_c, exact_norm
from fockops.formats import fockmat_text, read_fockmat
from fockops.matrixizer import OperatorSpec, build_matrix
from fockops.numerics import (
    CommutatorVerdict,
    isometry_defect,
    op_norm_estimate,
    self_commutator,
)
from fockops.suites import A_GRID, B_GRID, VerifyConfig, suite_adjoint, suite_conjugation, suite_spectrum, suite_witness

INNER = 64
CFG = VerifyConfig(inner_dim=INNER, tol=1e-8)
LINES: list[str] = []


def grid_c():
    for a in A_GRID:
        for b in B_GRID:
            crit = critical_c(a, b)
            cs = [0.0, 0.5] + ([crit] if all(abs(crit - c) > 1e-12 for c in (0.0, 0.5)) else [])
            for c in cs:
                yield complex(a), complex(b), complex(c), abs(c - crit) <= 1e-12


def _checks(suite, *prefixes):
    return [ch for ch in suite(CFG) if ch.name.startswith(prefixes)]


def _summarize(checks):
    bad = [ch for ch in checks if ch.passed is False]
    worst = max(ch.value for ch in checks)
    return not bad, f"{len(checks)} checks, {len(bad)} failed, worst metric {worst:.2e}"


def criterion_1():
    worst, converged = 0.0, True
    for a in A_GRID:
        for b in B_GRID:
            est, rec = op_norm_estimate(OperatorSpec.composition(a, b), start_dim=INNER // 2, max_dim=INNER)
            worst = max(worst, abs(est / math.exp(0.5 * abs(b) ** 2 / (1 - abs(a) ** 2)) - 1))
            converged &= rec.converged
    return worst <= 1e-6 and converged, f"composition norm, max rel err {worst:.2e} (tol 1e-6)"


def criterion_2():
    worst = 0.0
    for a, b, c, _ in grid_c():
        est, _ = op_norm_estimate(OperatorSpec.weighted(1, c, a, b), start_dim=INNER // 2, max_dim=INNER)
        worst = max(worst, abs(est / exact_norm(1, c, a, b) - 1))
    doc = json.loads(_cli(["classify", "--c", "0.5", "--a", "0.3", "--b", "0.4"])[1])
    check = doc["norm"].get("first_factor_check")
    recorded = check is not None and check["used"].startswith("|exp(conj(c) b")
    alt_worst = check["alternative_rel_diff"] if check else math.nan
    ok = worst <= 1e-6 and recorded
    return ok, f"weighted norm, max rel err {worst:.2e} (tol 1e-6); report records first-factor check (alt rel diff {alt_worst:.2e})"


def criterion_3():
    cases = [((1, 1j, 1j, 1), math.exp(0.5)), ((1, -2, 1, 2), math.exp(2))]
    worst, closed = 0.0, 0.0
    for params, target in cases:
        closed = max(closed, abs(exact_norm(*params) / target - 1))
        spec = OperatorSpec.weighted(*params)
        worst = max(worst, isometry_defect(spec, exact_norm(*params), inner=32, samples=10) / target)
    return worst <= 1e-6 and closed <= 1e-14, f"unit-circle norms, closed-form err {closed:.1e}, max | |Ax| - norm | / norm {worst:.2e} (tol 1e-6)"


def criterion_4():
    worst_normal, weakest = 0.0, math.inf
    ok = True
    for a, b, c, crit in grid_c():
        v = self_commutator(OperatorSpec.weighted(1, c, a, b), inner=48)
        if crit:
            worst_normal = max(worst_normal, v.defect_norm)
            ok &= v.verdict == CommutatorVerdict.NORMAL and v.defect_norm <= 1e-8
        else:
            weakest = min(weakest, -v.min_eig, v.max_eig)
            ok &= v.verdict == CommutatorVerdict.INDEFINITE and -v.min_eig >= 1e-4 and v.max_eig >= 1e-4
    return ok, f"critical defect max {worst_normal:.2e} (<= 1e-8), off-critical smallest |eig| {weakest:.2e} (>= 1e-4)"


def criterion_5():
    checks = _checks(suite_spectrum, "normaloid")
    equal = [ch.value for ch in checks if ch.name == "normaloid.equal"]
    strict = [ch.value for ch in checks if ch.name == "normaloid.strict"]
    ok = all(ch.passed for ch in checks)
    return ok, f"critical |norm - radius| max {max(equal):.2e} (<= 1e-6), off-critical gap min {min(strict):.2e} (>= 1e-3)"


def criterion_6():
    return _summarize(_checks(suite_spectrum, "eigen.bound", "eigen.top3"))


def criterion_7():
    return _summarize(_checks(suite_conjugation, "conjugation", "weyl.unitary"))


def criterion_8():
    return _summarize(_checks(suite_adjoint, "adjoint"))


def criterion_9():
    checks = list(suite_witness(CFG))
    ok = all(ch.passed for ch in checks)
    mism = int(checks[0].value)
    return ok, f"{mism} classifier mismatches over 1000 samples; {len(checks) - 1} witness tables decay below 1e-12"


def criterion_10():
    return _summarize(_checks(suite_spectrum, "eigen.iterate"))


def _cli(argv):
    buf, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
        code = cli.main(argv)
    return code, buf.getvalue()


def criterion_11():
    first = _cli(["verify", "all"])
    second = _cli(["verify", "all"])
    same = first == second and first[0] == 0
    entries = build_matrix(OperatorSpec.weighted(0.7 - 0.3j, 0.5, 0.5j, 0.8j), 96, 64).entries
    back = read_fockmat(io.StringIO(fockmat_text(entries)))
    bit_exact = np.array_equal(back.view(np.uint64), entries.view(np.uint64))
    return same and bit_exact, f"verify all byte-identical={same} (exit {first[0]}), fockmat round-trip bit-exact={bit_exact}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def _report(i, fn):
    ok, detail = fn()
    line = f"criterion {i}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    LINES.append(line)
    return ok


@pytest.mark.parametrize("i", range(1, len(CRITERIA) + 1))
def test_criterion(i):
    assert _report(i, CRITERIA[i - 1])


if __name__ == "__main__":
    results = [_report(i, fn) for i, fn in enumerate(CRITERIA, 1)]
    sys.exit(0 if all(results) else 1)
