import sys

import mpmath


def mp_e_coeffs(func, dim, dps=40):
    """Independent oracle: e_n coefficients of ``func`` by high-precision Taylor expansion."""
    with mpmath.workdps(dps):
        mono = mpmath.taylor(func, 0, dim - 1)
        return [complex(c * mpmath.sqrt(mpmath.factorial(n))) for n, c in enumerate(mono)]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
