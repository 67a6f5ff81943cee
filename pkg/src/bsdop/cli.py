"""Command line front end.

Commands: moments, verify, converge, voronovskaja, derivative.
Exit codes: 0 success, 1 verification or runtime failure, 2 usage or
hypothesis error.  Flags override config-file values (simple ``key=value``
lines) which override defaults; the effective configuration is echoed into
JSON output for reproducibility.  The BSDOP_THREADS environment variable
overrides the default row-level thread count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .analytic import parse_function_spec
from .engine import (
    StudyOptions,
    asymptotic_ratio,
    convergence_study,
    derivative_study,
    estimate_order,
    voronovskaja_study,
)
from .errors import BsdopError, DegenerateFunctionError, HypothesisError
from .moments import moment_table
from .ratpoly import SamplingConfig
from .verify import SUITE_NAMES, run_suite

BOUND_SLACK = 1.0 + 1e-6


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def parse_n_grid(spec: str) -> list[int]:
    """Parse ``8,16,32`` (list), ``8:64:+8`` (arithmetic) or ``8:2048:x2``
    (geometric) grid notation."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must look like start:stop:step; got {spec!r}")
        start, stop = int(parts[0]), int(parts[1])
        step = parts[2]
        values = []
        current = start
        if step.startswith("x"):
            factor = int(step[1:])
            if factor < 2:
                raise ValueError("geometric step must be >= 2")
            while current <= stop:
                values.append(current)
                current *= factor
        elif step.startswith("+"):
            increment = int(step[1:])
            if increment < 1:
                raise ValueError("arithmetic step must be >= 1")
            while current <= stop:
                values.append(current)
                current += increment
        else:
            raise ValueError(f"step must start with 'x' or '+'; got {step!r}")
        if not values:
            raise ValueError(f"empty grid from {spec!r}")
        return values
    return [int(part) for part in spec.split(",") if part.strip()]


def parse_int_range(spec: str) -> tuple[int, int]:
    """Parse ``3..10`` into an inclusive integer range."""
    if ".." in spec:
        lo, hi = spec.split("..")
        return int(lo), int(hi)
    value = int(spec)
    return value, value


def read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line must be key=value; got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip().strip('"')
    return values


def _merged(args: argparse.Namespace, config: dict[str, str], key: str, default, cast):
    """Flag value if given, else config-file value, else default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return cast(config[key])
    return default


def _thread_default() -> int:
    raw = os.environ.get("BSDOP_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return 1


def _write_output(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def _rows_to_csv(header: list[str], rows: list[list], summary: list[str]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(v) if isinstance(v, int) else _fmt(v) for v in row))
    lines.extend(f"# {item}" for item in summary)
    return "\n".join(lines) + "\n"


def _rows_to_json(meta: dict, header: list[str], rows: list[list], summary: dict) -> str:
    payload = {"meta": meta, "columns": header, "rows": rows, "summary": summary}
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _rows_to_plot(header: list[str], rows: list[list]) -> str:
    """Gnuplot-ready blocks: one ``n value`` block per float series."""
    blocks = []
    for col, name in enumerate(header):
        if col == 0 or name == "K":
            continue
        lines = [f"# series: {name}"]
        for row in rows:
            lines.append(f"{row[0]} {_fmt(row[col])}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def _emit_table(fmt: str, meta: dict, header: list[str], rows: list[list], summary: dict, out):
    if fmt == "csv":
        summary_lines = [f"{key}={value}" for key, value in summary.items()]
        _write_output(_rows_to_csv(header, rows, summary_lines), out)
    elif fmt == "json":
        _write_output(_rows_to_json(meta, header, rows, summary), out)
    elif fmt == "plot":
        _write_output(_rows_to_plot(header, rows), out)
    else:
        raise ValueError(f"unknown format {fmt!r} (expected csv, json or plot)")


# -- commands ---------------------------------------------------------------


def cmd_moments(args: argparse.Namespace) -> int:
    if args.n < 1 or args.K < 0:
        print("moments requires n >= 1 and K >= 0", file=sys.stderr)
        return 2
    table = moment_table(args.n, args.K, max_k=max(args.K, 64))
    if args.format == "json":
        print(table.to_json())
        return 0
    for k in range(args.K + 1):
        poly = table.poly(k)
        if args.format == "exact":
            print(f"{k}: {poly}")
        elif args.format == "dec":
            terms = " + ".join(
                f"{_fmt(float(c))} z^{power}" for power, c in enumerate(poly.coeffs) if c != 0
            )
            print(f"{k}: {terms or '0'}")
        else:
            print(f"unknown moments format {args.format!r}", file=sys.stderr)
            return 2
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    overrides = {}
    if args.suite == "oracle":
        if args.n:
            overrides["n_range"] = parse_int_range(args.n)
        if args.k:
            overrides["k_range"] = parse_int_range(args.k)
    elif args.suite == "lemma-bound":
        if args.n:
            overrides["n_max"] = parse_int_range(args.n)[1]
        if args.k:
            overrides["k_range"] = parse_int_range(args.k)
    elif args.suite == "remainder":
        if args.n:
            overrides["n_range"] = parse_int_range(args.n)
        if args.k:
            overrides["k_max"] = parse_int_range(args.k)[1]
    elif args.suite == "basis-identity":
        if args.n:
            overrides["n_max"] = parse_int_range(args.n)[1]
        if args.v:
            overrides["v_max"] = parse_int_range(args.v)[1]
    try:
        results = run_suite(args.suite, **overrides)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return 2
    failures = 0
    for case in results:
        status = "PASS" if case.passed else "FAIL"
        line = f"{status} {case.suite} {case.case}"
        if not case.passed:
            line += f"  lhs={case.lhs}  rhs={case.rhs}"
            failures += 1
        print(line)
    print(f"{args.suite}: {len(results) - failures}/{len(results)} cases passed")
    return 0 if failures == 0 else 1


def _study_options(args: argparse.Namespace, config: dict[str, str]) -> StudyOptions:
    tol = _merged(args, config, "tol", None, float)
    threads = _merged(args, config, "threads", _thread_default(), int)
    samples = int(config.get("sampling_initial", 1024))
    rel_tol = float(config.get("sampling_rel_tol", 1e-9))
    return StudyOptions(
        truncation_tol=tol,
        sampling=SamplingConfig(initial_samples=samples, rel_tol=rel_tol),
        threads=threads,
    )


def _common_experiment(args: argparse.Namespace):
    config = read_config_file(args.config) if args.config else {}
    fn_spec = _merged(args, config, "fn", None, str)
    if fn_spec is None:
        raise ValueError("missing --fn")
    f = parse_function_spec(fn_spec)
    r = _merged(args, config, "r", 1.0, float)
    n_spec = _merged(args, config, "n", None, str)
    if n_spec is None:
        raise ValueError("missing --n")
    n_list = parse_n_grid(n_spec)
    fmt = _merged(args, config, "format", "csv", str)
    out = _merged(args, config, "out", None, str)
    options = _study_options(args, config)
    meta = {
        "fn": fn_spec,
        "r": r,
        "n": n_spec,
        "format": fmt,
        "tol": options.truncation_tol,
        "threads": options.threads,
        "sampling_initial": options.sampling.initial_samples,
        "sampling_rel_tol": options.sampling.rel_tol,
        "residual_rho": "A*r",
    }
    return f, r, n_list, fmt, out, options, meta


def cmd_converge(args: argparse.Namespace) -> int:
    f, r, n_list, fmt, out, options, meta = _common_experiment(args)
    table = convergence_study(f, r, n_list, options)
    summary: dict = {}
    try:
        fit = estimate_order(table, drop_preasymptotic=args.drop_preasymptotic)
    except ValueError:
        fit = None
        summary["note"] = "slope unavailable (fewer than 3 rows with positive errors)"
    if fit is not None and fit.exact_reproduction:
        summary["note"] = "exact-reproduction (all errors zero; slope undefined)"
    elif fit is not None:
        summary["slope"] = _fmt(fit.slope)
        summary["r_squared"] = _fmt(fit.r_squared)
    if fit is None or not fit.exact_reproduction:
        try:
            ratio = asymptotic_ratio(f, r, max(n_list), options.truncation_tol, options.sampling)
            summary["limit_ratio_at_max_n"] = _fmt(ratio)
        except DegenerateFunctionError:
            summary["limit_ratio_at_max_n"] = "undefined (degree <= 1)"
    bound_ok = all(
        row.sup_error <= row.bound_thm1 * BOUND_SLACK for row in table.rows
    )
    summary["bound_thm1"] = "PASS" if bound_ok else "FAIL"
    rows = [
        [row.n, row.sup_error, row.n_error, row.resid, row.n2_resid,
         row.bound_thm1, row.bound_thm2, row.K]
        for row in table.rows
    ]
    _emit_table(fmt, meta, table.CSV_HEADER.split(","), rows, summary, out)
    return 0


def cmd_voronovskaja(args: argparse.Namespace) -> int:
    f, r, n_list, fmt, out, options, meta = _common_experiment(args)
    _, rows = voronovskaja_study(f, r, n_list, options)
    verdict = all(row.n2_resid <= row.bound_thm2 * BOUND_SLACK for row in rows)
    summary = {"bound_thm2": "PASS" if verdict else "FAIL"}
    data = [[row.n, row.resid, row.n2_resid, row.bound_thm2, row.K] for row in rows]
    _emit_table(fmt, meta, ["n", "resid", "n2_resid", "bound_thm2", "K"], data, summary, out)
    return 0


def cmd_derivative(args: argparse.Namespace) -> int:
    f, r, n_list, fmt, out, options, meta = _common_experiment(args)
    config = read_config_file(args.config) if args.config else {}
    p = _merged(args, config, "p", 1, int)
    r1 = _merged(args, config, "r1", 1.5, float)
    meta.update({"p": p, "r1": r1})
    _, rows = derivative_study(f, p, r, r1, n_list, options)
    verdict = all(row.deriv_error <= row.bound_deriv * BOUND_SLACK for row in rows)
    summary = {"bound_deriv": "PASS" if verdict else "FAIL"}
    data = [[row.n, row.deriv_error, row.bound_deriv, row.K] for row in rows]
    _emit_table(fmt, meta, ["n", "deriv_error", "bound_deriv", "K"], data, summary, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bsdop",
        description="Moment polynomials, bound verification and convergence "
        "studies for the complex Baskakov-Szasz-Durrmeyer operator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_moments = sub.add_parser("moments", help="print moment polynomials")
    p_moments.add_argument("--n", type=int, required=True)
    p_moments.add_argument("--K", type=int, required=True)
    p_moments.add_argument("--format", default="exact", choices=("exact", "dec", "json"))
    p_moments.set_defaults(func=cmd_moments)

    p_verify = sub.add_parser("verify", help="run a named verification suite")
    p_verify.add_argument("--suite", required=True, choices=SUITE_NAMES + ("all",))
    p_verify.add_argument("--n", help="override, e.g. 3..10")
    p_verify.add_argument("--k", help="override, e.g. 0..8")
    p_verify.add_argument("--v", help="override, e.g. 1..10")
    p_verify.set_defaults(func=cmd_verify)

    for name, fn in (
        ("converge", cmd_converge),
        ("voronovskaja", cmd_voronovskaja),
        ("derivative", cmd_derivative),
    ):
        p = sub.add_parser(name)
        p.add_argument("--fn", help="function spec, e.g. exp:a=1/2")
        p.add_argument("--r", type=float)
        p.add_argument("--n", help="grid: 8,16,32 or 8:2048:x2 or 8:64:+8")
        p.add_argument("--tol", type=float, help="operator truncation tolerance")
        p.add_argument("--format", choices=("csv", "json", "plot"))
        p.add_argument("--out", help="output path (stdout if omitted)")
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--threads", type=int)
        if name == "converge":
            p.add_argument(
                "--drop-preasymptotic",
                action="store_true",
                help="exclude rows with n < 8(r+2) from the slope fit",
            )
        if name == "derivative":
            p.add_argument("--p", type=int)
            p.add_argument("--r1", type=float)
        p.set_defaults(func=fn)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HypothesisError as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"invalid arguments: {exc}", file=sys.stderr)
        return 2
    except BsdopError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
