"""Command-line driver.

Commands: gen-moments, family, transform, grid, verify.  All payloads are
JSON with rationals as "num/den" strings; outputs are deterministic for a
fixed command line (elapsed_ms in verification reports is the only field
that varies between runs).

Exit codes: 0 all checks pass, 1 at least one check failed, 2 singular
configuration, 3 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import Any, Sequence

from . import lattice, transforms
from .algebra import rat, rat_str
from .errors import SkewflowError, SingularConfiguration, DegreeBudgetExceeded
from .lattice import LatticeConfig, TauGrid
from .moments import (
    DiscreteMeasure,
    SkewMoments,
    from_discrete_orthogonal,
    from_discrete_symplectic,
    from_random,
)
from .report import Report
from .sops import SOPFamily, build_family, verify_skew_orthogonality

SUITES = (
    "orthogonality",
    "christoffel",
    "geronimus",
    "dlax",
    "kernel",
    "dckp",
    "slax",
    "dpfl",
    "edckp",
    "edlax",
    "edpfl",
    "crosscheck",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="skewflow")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-moments", help="generate a skew-moment table")
    gen.add_argument("--kind", choices=("random", "symplectic", "orthogonal"),
                     required=True)
    gen.add_argument("--max-index", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--bound", type=int, default=10)
    gen.add_argument("--nodes", type=str, default=None,
                     help="comma-separated rational nodes (ensemble kinds)")
    gen.add_argument("--weights", type=str, default=None)
    gen.add_argument("-o", "--output", type=str, default=None)

    fam = sub.add_parser("family", help="build a skew orthogonal family")
    fam.add_argument("--moments", required=True)
    fam.add_argument("--pairs", type=int, required=True)
    fam.add_argument("-o", "--output", type=str, default=None)

    tr = sub.add_parser("transform", help="apply skew-Christoffel steps")
    tr.add_argument("--family", required=True)
    tr.add_argument("--moments", required=True)
    tr.add_argument("--lambda", dest="lam", action="append", required=True,
                    help="transformation parameter; repeat for a chain")
    tr.add_argument("-o", "--output", type=str, default=None,
                    help="transformed family")
    tr.add_argument("--moments-out", type=str, default=None)
    tr.add_argument("--data-out", type=str, default=None,
                    help="per-step coefficient tables")

    gr = sub.add_parser("grid", help="build a (n, s, t) tau/sigma grid")
    gr.add_argument("--moments", required=True)
    gr.add_argument("--mu", required=True)
    gr.add_argument("--lambda", dest="lam", required=True)
    gr.add_argument("--pairs", type=int, required=True)
    gr.add_argument("--steps-s", type=int, required=True)
    gr.add_argument("--steps-t", type=int, required=True)
    gr.add_argument("-o", "--output", type=str, default=None)

    ver = sub.add_parser("verify", help="run a verification suite")
    ver.add_argument("--suite", choices=SUITES, required=True)
    ver.add_argument("--family", default=None)
    ver.add_argument("--moments", default=None)
    ver.add_argument("--grid", default=None)
    ver.add_argument("--lambda", dest="lam", action="append", default=None)
    ver.add_argument("--y", action="append", default=None)
    ver.add_argument("--pairs", type=int, default=None)
    ver.add_argument("-o", "--output", type=str, default=None)
    return parser


# -- plumbing -----------------------------------------------------------


def _read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _emit(payload: Any, path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2)
    if path is None:
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")


def _rat_list(spec: str) -> list[Fraction]:
    try:
        return [rat(part) for part in spec.split(",") if part]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational list {spec!r}: {exc}") from exc


def _parse_rat(text: str) -> Fraction:
    try:
        return rat(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational {text!r}: {exc}") from exc


def _threads() -> int:
    raw = os.environ.get("SKEWFLOW_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise UsageError(f"SKEWFLOW_THREADS must be an integer, got {raw!r}") from exc
    if value < 1:
        raise UsageError("SKEWFLOW_THREADS must be at least 1")
    return value


def _load_family(args) -> SOPFamily:
    if args.family is None:
        raise UsageError("this suite needs --family")
    return SOPFamily.from_json(_read_json(args.family))


def _load_moments(args) -> SkewMoments:
    if args.moments is None:
        raise UsageError("this suite needs --moments")
    return SkewMoments.from_json(_read_json(args.moments))


def _load_grid(args) -> TauGrid:
    if args.grid is None:
        raise UsageError("this suite needs --grid")
    return TauGrid.from_json(_read_json(args.grid))


def _lam_values(args, minimum: int = 1) -> list[Fraction]:
    if not args.lam:
        raise UsageError("this suite needs --lambda")
    values = [_parse_rat(x) for x in args.lam]
    if len(values) < minimum:
        raise UsageError(f"this suite needs at least {minimum} --lambda values")
    return values


# -- commands -----------------------------------------------------------


def _cmd_gen_moments(args) -> int:
    if args.max_index < 1:
        raise UsageError("--max-index must be at least 1")
    if args.kind == "random":
        table = from_random(args.seed, args.max_index, args.bound)
    else:
        if args.nodes is None or args.weights is None:
            raise UsageError("ensemble kinds need --nodes and --weights")
        measure = DiscreteMeasure(_rat_list(args.nodes), _rat_list(args.weights))
        maker = (
            from_discrete_symplectic
            if args.kind == "symplectic"
            else from_discrete_orthogonal
        )
        table = maker(measure, args.max_index)
    _emit(table.to_json(), args.output)
    return 0


def _cmd_family(args) -> int:
    moments = SkewMoments.from_json(_read_json(args.moments))
    family = build_family(moments, args.pairs)
    _emit(family.to_json(), args.output)
    return 0


def _christoffel_data_json(data: transforms.ChristoffelData) -> dict[str, Any]:
    return {
        "lambda": rat_str(data.lam),
        "even_coeffs": [[rat_str(v) for v in row] for row in data.even_coeffs],
        "odd_coeffs": [[rat_str(v) for v in row] for row in data.odd_coeffs],
        "odd_shift": [rat_str(v) for v in data.odd_shift],
    }


def _cmd_transform(args) -> int:
    family = SOPFamily.from_json(_read_json(args.family))
    moments = SkewMoments.from_json(_read_json(args.moments))
    steps = []
    for lam in (_parse_rat(x) for x in args.lam):
        family, moments, data = transforms.christoffel(family, moments, lam)
        steps.append(_christoffel_data_json(data))
    _emit(family.to_json(), args.output)
    if args.moments_out is not None:
        _emit(moments.to_json(), args.moments_out)
    if args.data_out is not None:
        _emit({"steps": steps}, args.data_out)
    return 0


def _cmd_grid(args) -> int:
    moments = SkewMoments.from_json(_read_json(args.moments))
    config = LatticeConfig(
        _parse_rat(args.mu),
        _parse_rat(args.lam),
        args.pairs,
        args.steps_s,
        args.steps_t,
    )
    grid = lattice.build_grid(moments, config)
    _emit(grid.to_json(), args.output)
    return 0


def _suite_orthogonality(args) -> Report:
    return verify_skew_orthogonality(_load_family(args), _load_moments(args))


def _suite_christoffel(args) -> Report:
    family = _load_family(args)
    moments = _load_moments(args)
    lam = _lam_values(args)[0]
    transformed, shifted, _ = transforms.christoffel(family, moments, lam)
    report = Report(
        "christoffel",
        {"lambda": rat_str(lam), "provenance": moments.provenance},
    )
    inner = verify_skew_orthogonality(transformed, shifted)
    for check in inner.checks:
        report.checks.append(check)
    for n in range(transformed.pairs + 1):
        expected = (
            family.even(n + 1).eval(lam) / family.even(n).eval(lam)
        ) * family.norms[n]
        report.add(
            f"norm-ratio:r*_{n}",
            transformed.norms[n] == expected,
            f"lhs={rat_str(transformed.norms[n])} rhs={rat_str(expected)}",
        )
    return report


def _suite_geronimus(args) -> Report:
    family = _load_family(args)
    moments = _load_moments(args)
    lam = _lam_values(args)[0]
    transformed, _, _ = transforms.christoffel(family, moments, lam)
    report = Report(
        "geronimus",
        {"lambda": rat_str(lam), "provenance": moments.provenance},
    )
    data = transforms.geronimus_coeffs(transformed, family, moments, lam)
    for n in range(transformed.pairs + 1):
        even_sum = transformed.even(n)
        odd_sum = transformed.odd(n)
        for k in range(n):
            even_sum = even_sum + transformed.even(k).scale(data.alpha[n][k])
            even_sum = even_sum + transformed.odd(k).scale(data.beta[n][k])
            odd_sum = odd_sum + transformed.odd(k).scale(data.epsilon[n][k])
        for k in range(n + 1):
            odd_sum = odd_sum + transformed.even(k).scale(data.gamma[n][k])
        report.add(f"reconstruct-even:{n}", even_sum == family.even(n))
        report.add(f"reconstruct-odd:{n}", odd_sum == family.odd(n))
    return report


def _suite_dlax(args) -> Report:
    family = _load_family(args)
    moments = _load_moments(args)
    lams = _lam_values(args, minimum=2)
    if len(set(lams)) != 1:
        raise UsageError(
            "the discrete Lax chain evolves at a fixed lambda; "
            "pass the same value for every step"
        )
    families = [family]
    datas = []
    for lam in lams:
        nxt, shifted, cdata = transforms.christoffel(families[-1], moments, lam)
        gdata = transforms.geronimus_coeffs(nxt, families[-1], moments, lam)
        datas.append((cdata, gdata))
        families.append(nxt)
        moments = shifted
    size = 2 * families[-1].pairs + 2
    factors = transforms.build_lax_pair(families, datas, size)
    report = Report(
        "dlax",
        {"lambdas": [rat_str(x) for x in lams], "size": size},
    )
    for t in range(len(factors) - 1):
        step = transforms.verify_dlax(
            factors[t][0], factors[t][1], factors[t + 1][0], factors[t + 1][1]
        )
        for check in step.checks:
            report.checks.append(
                type(check)(f"step{t}:{check.id}", check.status, check.detail)
            )
    return report


def _suite_kernel(args) -> Report:
    family = _load_family(args)
    moments = _load_moments(args)
    if not args.y:
        raise UsageError("the kernel suite needs at least one --y value")
    pairs = args.pairs if args.pairs is not None else family.pairs
    report = Report("kernel", {"provenance": moments.provenance})
    for raw in args.y:
        y = _parse_rat(raw)
        inner = transforms.verify_factorization(family, moments, pairs, y)
        for check in inner.checks:
            report.checks.append(
                type(check)(f"y={rat_str(y)}:{check.id}", check.status, check.detail)
            )
    return report


def _suite_crosscheck(args) -> Report:
    grid = _load_grid(args)
    c = grid.config
    report = Report("crosscheck", {"provenance": grid.base.provenance})
    for n in range(c.pairs + 1):
        for s in range(c.steps_s):
            for t in range(c.steps_t):
                inner = lattice.crosscheck_single_step(grid, n, s, t)
                for check in inner.checks:
                    report.checks.append(
                        type(check)(
                            f"n={n},s={s},t={t}:{check.id}",
                            check.status,
                            check.detail,
                        )
                    )
    return report


def _grid_samples(grid: TauGrid) -> list[Fraction]:
    c = grid.config
    return lattice.sample_points(2 * c.pairs + 3, [c.mu, c.lam])


def run_suite(args) -> Report:
    suite = args.suite
    if suite == "orthogonality":
        return _suite_orthogonality(args)
    if suite == "christoffel":
        return _suite_christoffel(args)
    if suite == "geronimus":
        return _suite_geronimus(args)
    if suite == "dlax":
        return _suite_dlax(args)
    if suite == "kernel":
        return _suite_kernel(args)
    if suite == "crosscheck":
        return _suite_crosscheck(args)
    grid = _load_grid(args)
    if suite == "dckp":
        return lattice.verify_dckp(grid)
    if suite == "slax":
        return lattice.verify_slax(grid, _grid_samples(grid))
    if suite == "dpfl":
        return lattice.verify_dpfl(lattice.coefficient_field(grid))
    if suite == "edckp":
        return lattice.verify_edckp(grid)
    if suite == "edlax":
        return lattice.verify_edlax(grid, _grid_samples(grid))
    if suite == "edpfl":
        return lattice.verify_edpfl(lattice.matrix_coefficient_field(grid))
    raise UsageError(f"unknown suite {suite}")  # pragma: no cover


def _cmd_verify(args) -> int:
    started = time.monotonic()
    report = run_suite(args)
    report.elapsed_ms = (time.monotonic() - started) * 1000.0
    report.instance.setdefault("threads", _threads())
    _emit(report.to_json(), args.output)
    failures = len(report.failures)
    status = "pass" if report.passed else "fail"
    print(
        f"suite={report.suite} checks={len(report.checks)} "
        f"failures={failures} status={status}",
        file=sys.stderr,
    )
    return 0 if report.passed else 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        _threads()
        args = parser.parse_args(argv)
        if args.command == "gen-moments":
            return _cmd_gen_moments(args)
        if args.command == "family":
            return _cmd_family(args)
        if args.command == "transform":
            return _cmd_transform(args)
        if args.command == "grid":
            return _cmd_grid(args)
        return _cmd_verify(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SingularConfiguration,) as exc:
        print(f"singular configuration: {exc}", file=sys.stderr)
        return 2
    except DegreeBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SkewflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (KeyError, ValueError, TypeError) as exc:
        print(f"error: bad input ({exc})", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
