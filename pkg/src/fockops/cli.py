"""Command-line front end.

Usage:
    fockops classify --gamma 1 --c 0.3 --a 0.5 --b 0.3
    fockops verify all --inner-dim 32 --tol 1e-5
    fockops witness --gamma 1 --c 0 --a 0.5 --b 0 --r-max 4 --steps 9
    fockops matrix --gamma 1 --c 0 --a 0.5 --b 0 --N 4 --M 4 --out diag.fockmat

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 unsupported input.
"""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .classifier import classify, printed_first_factor_norm
from .core import EntireWeight, AffineSymbol
from .errors import FockError, UnsupportedWeight
from .formats import dump_json, fmt_float, fockmat_text, matrix_csv, witness_csv
from .matrixizer import OperatorSpec, build_matrix, default_outer, on_unit_circle
from .numerics import (
    WITNESS_LEVEL,
    closed_range_witness,
    op_norm_estimate,
    spectral_radius_estimate,
)
from .suites import VerifyConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNSUPPORTED = 0, 1, 2, 3

_COMPLEX_RE = re.compile(r"^[0-9eE.+\-]*i?$")


def parse_complex(text: str) -> complex:
    """Parse ``re``, ``imi`` or ``re+imi`` (no spaces), e.g. ``0.5``, ``1i``, ``0+1i``, ``-2-0.5i``."""
    token = text.strip()
    if not token or not _COMPLEX_RE.match(token):
        raise argparse.ArgumentTypeError(f"not a complex literal: {text!r}")
    try:
        return complex(token.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex literal: {text!r}") from None


def parse_poly(text: str) -> tuple:
    return tuple(parse_complex(t) for t in text.split(","))


@dataclass
class RunConfig:
    inner_dim: int = 64
    outer_pad: int | None = None
    tol: float = 1e-8
    unit_circle_eps: float = 1e-12
    output_format: str = "json"
    output_path: str | None = None


def _inner_dim(text: str) -> int:
    n = int(text)
    if not 4 <= n <= 256:
        raise argparse.ArgumentTypeError(f"--inner-dim must lie in [4, 256], got {n}")
    return n


def _positive(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return x


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--inner-dim", type=_inner_dim, default=64, help="domain truncation N (4..256)")
    g.add_argument("--outer-pad", type=int, default=None, help="initial outer padding M - N (default: automatic)")
    g.add_argument("--tol", type=_positive, default=1e-8, help="convergence / verification tolerance")
    g.add_argument("--unit-circle-eps", type=_positive, default=1e-12, help="treat |a| as 1 within this distance")
    g.add_argument("--format", dest="output_format", choices=("json", "text", "csv"), default=None)
    g.add_argument("--out", dest="output_path", default=None, help="write output to this file")
    return p


def _params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma", type=parse_complex, default=1 + 0j)
    p.add_argument("--c", type=parse_complex, required=True)
    p.add_argument("--a", type=parse_complex, required=True)
    p.add_argument("--b", type=parse_complex, required=True)


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="fockops", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="closed-form verdicts plus numeric norm check")
    _params(p)
    p.add_argument("--poly", type=parse_poly, default=None, help="extra polynomial factor p0,p1,... (unsupported)")
    p.add_argument("--exact", action="store_true", help="compare c with critical values exactly")

    p = sub.add_parser("verify", parents=[common], help="run a built-in verification suite")
    p.add_argument("suite", choices=("norms", "commutator", "conjugation", "adjoint", "spectrum", "witness", "all"))

    p = sub.add_parser("witness", parents=[common], help="closed-range witness table r,g")
    _params(p)
    p.add_argument("--r-max", type=_positive, required=True)
    p.add_argument("--steps", type=int, required=True)

    p = sub.add_parser("matrix", parents=[common], help="export a truncated matrix")
    _params(p)
    p.add_argument("--N", dest="n", type=int, default=None, help="inner dimension (default --inner-dim)")
    p.add_argument("--M", dest="m", type=int, default=None, help="outer dimension (default automatic)")
    return parser


def _config(ns: argparse.Namespace, default_format: str) -> RunConfig:
    return RunConfig(
        inner_dim=ns.inner_dim,
        outer_pad=ns.outer_pad,
        tol=ns.tol,
        unit_circle_eps=ns.unit_circle_eps,
        output_format=ns.output_format or default_format,
        output_path=ns.output_path,
    )


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _closed(value):
    return {"value": value, "source": "closed_form"}


def build_report(gamma, c, a, b, cfg: RunConfig, exact: bool = False) -> dict:
    """Report document for ``classify``; key order is part of the output contract."""
    rep = classify(gamma, c, a, b, unit_eps=cfg.unit_circle_eps, exact=exact)
    warnings = list(rep.warnings)
    spec = OperatorSpec.weighted(gamma, c, a, b)
    n = cfg.inner_dim

    norm = {"closed_form": rep.exact_norm, "numeric": None, "rel_diff": None, "convergence": None}
    if rep.bounded and not rep.degenerate:
        est, rec = op_norm_estimate(spec, tol=cfg.tol, start_dim=max(n // 2, 4), max_dim=n, outer_pad=cfg.outer_pad)
        norm["numeric"] = est
        norm["rel_diff"] = abs(est - rep.exact_norm) / rep.exact_norm
        norm["convergence"] = rec.as_dict()
        norm["numeric_method"] = "largest singular value of outer-resolved truncation"
        if not rec.converged:
            warnings.append("numeric norm did not converge; see norm.convergence")
        if norm["rel_diff"] > max(1e-6, cfg.tol):
            warnings.append(f"closed-form and numeric norm disagree: rel_diff={norm['rel_diff']:.3e}")
        if rep.compact:
            alt = printed_first_factor_norm(c, a, b) * abs(gamma)
            norm["first_factor_check"] = {
                "used": "|exp(conj(c) b / (1 - a))|",
                "alternative": "|exp(c / (1 - a))|",
                "alternative_value": alt,
                "alternative_rel_diff": abs(est - alt) / alt,
            }
    elif not rep.bounded:
        warnings.append("operator is unbounded; no norm")

    bound = {"value": rep.eigenvalue_bound, "source": "closed_form"}
    if rep.eigenvalue_bound is not None and not rep.degenerate:
        bound["numeric_spectral_radius"] = spectral_radius_estimate(spec, n)
        bound["numeric_dims"] = [n, n]
    return {
        "input": {"gamma": gamma, "c": c, "a": a, "b": b},
        "classification": {
            "bounded": rep.bounded,
            "compact": rep.compact,
            "unitary_multiple": rep.unitary_multiple,
            "normal": rep.normal,
            "hyponormal": rep.hyponormal,
            "cohyponormal": rep.cohyponormal,
            "normaloid": rep.normaloid,
            "closed_range": rep.closed_range,
            "degenerate": rep.degenerate,
        },
        "norm": norm,
        "fixed_point": _closed(rep.fixed_point),
        "eigenvalue_bound": bound,
        "critical_c": _closed(rep.critical_c),
        "warnings": warnings,
    }


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else k)
    elif isinstance(obj, list):
        if not obj:
            yield prefix, ""
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, complex):
        return f"{fmt_float(v.real)}{'+' if v.imag >= 0 else '-'}{fmt_float(abs(v.imag))}i"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def cmd_classify(ns, cfg: RunConfig) -> int:
    if ns.poly is not None:
        weight = EntireWeight(ns.gamma, ns.poly, ns.c)
        if not weight.is_scaled_kernel:
            print("unsupported weight: classification covers gamma * K_c only", file=sys.stderr)
            return EXIT_UNSUPPORTED
        ns.gamma = weight.scale
    report = build_report(ns.gamma, ns.c, ns.a, ns.b, cfg, exact=ns.exact)
    if cfg.output_format == "json":
        _emit(dump_json(report), cfg)
    elif cfg.output_format == "csv":
        _emit("key,value\n" + "".join(f"{k},{_scalar(v)}\n" for k, v in _flatten(report)), cfg)
    else:
        _emit("".join(f"{k}: {_scalar(v)}\n" for k, v in _flatten(report)), cfg)
    return EXIT_OK


def cmd_verify(ns, cfg: RunConfig) -> int:
    vcfg = VerifyConfig(inner_dim=cfg.inner_dim, tol=cfg.tol, outer_pad=cfg.outer_pad)
    checks = run_suite(ns.suite, vcfg)
    failed = sum(ch.passed is False for ch in checks)
    passed = sum(ch.passed is True for ch in checks)
    if cfg.output_format == "json":
        doc = {
            "suite": ns.suite,
            "inner_dim": cfg.inner_dim,
            "tol": cfg.tol,
            "checks": [
                {"name": ch.name, "params": ch.params, "metric": ch.metric, "value": float(f"{ch.value:.1e}"),
                 "status": ch.status}
                for ch in checks
            ],
            "passed": passed,
            "failed": failed,
        }
        _emit(dump_json(doc), cfg)
    elif cfg.output_format == "csv":
        rows = "".join(f'{ch.name},"{ch.params}",{ch.metric},{ch.value:.1e},{ch.status}\n' for ch in checks)
        _emit("name,params,metric,value,status\n" + rows, cfg)
    else:
        lines = [ch.line() for ch in checks]
        lines.append(f"summary: {passed} passed, {failed} failed")
        _emit("\n".join(lines) + "\n", cfg)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_witness(ns, cfg: RunConfig) -> int:
    if on_unit_circle(ns.a, cfg.unit_circle_eps) or abs(ns.a) >= 1:
        print(
            "witness needs |a| < 1; for |a| = 1 closed range is decided by the classifier "
            "(closed range iff c = -conj(a) b)",
            file=sys.stderr,
        )
        return EXIT_UNSUPPORTED
    if ns.gamma == 0:
        print("witness needs a nonzero weight (gamma != 0)", file=sys.stderr)
        return EXIT_UNSUPPORTED
    if ns.steps < 1:
        print("--steps must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    grid = np.linspace(0.0, ns.r_max, ns.steps) if ns.steps > 1 else np.array([ns.r_max])
    rows = closed_range_witness(ns.gamma, ns.c, ns.a, ns.b, grid)
    _emit(witness_csv(rows), cfg)
    first = next((r for r, g in rows if g <= WITNESS_LEVEL), None)
    msg = f"first r with g(r) <= 1e-12: {fmt_float(first)}" if first is not None else "g(r) stays above 1e-12 on this grid"
    print(msg, file=sys.stderr)
    return EXIT_OK


def cmd_matrix(ns, cfg: RunConfig) -> int:
    n = ns.n if ns.n is not None else cfg.inner_dim
    if ns.m is not None:
        m = ns.m
    elif cfg.outer_pad is not None:
        m = n + cfg.outer_pad
    else:
        m = default_outer(n)
    if n < 1 or m < n:
        print(f"dimension error: need M >= N >= 1, got N={n}, M={m}", file=sys.stderr)
        return EXIT_USAGE
    mat = build_matrix(OperatorSpec(EntireWeight.kernel(ns.c, ns.gamma), AffineSymbol(ns.a, ns.b)), m, n)
    fmt = ns.output_format or "text"
    _emit(matrix_csv(mat.entries) if fmt == "csv" else fockmat_text(mat.entries), cfg)
    return EXIT_OK


COMMANDS = {"classify": cmd_classify, "verify": cmd_verify, "witness": cmd_witness, "matrix": cmd_matrix}
DEFAULT_FORMAT = {"classify": "json", "verify": "text", "witness": "csv", "matrix": "text"}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = _config(ns, DEFAULT_FORMAT[ns.command])
    try:
        return COMMANDS[ns.command](ns, cfg)
    except UnsupportedWeight as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except FockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


def schema() -> dict:
    import json

    return json.loads(resources.files("fockops").joinpath("schema/report.schema.json").read_text())


if __name__ == "__main__":
    sys.exit(main())
