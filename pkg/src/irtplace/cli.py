"""Operator command line.

    irtplace validate <repo-dir>          check a repository, exit 1 on errors
    irtplace estimate --responses FILE    offline ability estimation from a CSV
    irtplace demo-paper                   replay the bundled reference run, PASS/FAIL
    irtplace simulate ...                 estimator recovery study
    irtplace serve --repo DIR             run the HTTP service

Exit codes: 0 success, 1 domain failure (validation findings, failed
reference checks), 2 usage or I/O problems.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Sequence

from . import reference
from .kernel import EstimationConfig, ItemParameters, IterationRow, Response, estimate_ability
from .repository import Repository
from .simulate import SimulationSpec, run_recovery
from .xml_io import XmlParseError, XmlValidationError


class ResponseFileError(Exception):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def format_trace_table(row: IterationRow, responses: Sequence[Response]) -> str:
    """One iteration as a table with columns i U_i b P_i Q_i Num Denom."""
    lines = [
        f"iteration {row.s + 1}  (theta_s = {row.theta_s:.10f})",
        f"{'i':>3} {'U_i':>3} {'b':>6} {'P_i':>7} {'Q_i':>7} {'Num':>8} {'Denom':>7}",
    ]
    for i, r in enumerate(responses):
        lines.append(
            f"{i + 1:>3} {r.u:>3} {r.item.b:>6.2f} {row.p[i]:>7.4f} {row.q[i]:>7.4f} "
            f"{row.numerator[i]:>+8.4f} {row.denominator[i]:>7.4f}"
        )
    lines.append(
        f"{'SUM':>3} {'':>3} {'':>6} {'':>7} {'':>7} "
        f"{row.numerator_sum:>+8.5f} {row.denominator_sum:>7.5f}"
    )
    return "\n".join(lines)


def read_response_file(path: str | Path) -> list[Response]:
    """Read a CSV of item_id,a,b,u lines (header optional).

    The 2PL parameters travel inline so estimation needs no repository.
    """
    responses = []
    with open(path, newline="", encoding="utf-8") as handle:
        for lineno, row in enumerate(csv.reader(handle), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if lineno == 1 and _looks_like_header(row):
                continue
            if len(row) != 4:
                raise ResponseFileError(lineno, f"expected item_id,a,b,u, got {len(row)} fields")
            try:
                a, b, u = float(row[1]), float(row[2]), int(row[3])
            except ValueError as e:
                raise ResponseFileError(lineno, str(e))
            try:
                responses.append(Response(item=ItemParameters(a=a, b=b), u=u))
            except ValueError as e:
                raise ResponseFileError(lineno, str(e))
    return responses


def _looks_like_header(row: list[str]) -> bool:
    if len(row) < 2:
        return True
    try:
        float(row[1])
        return False
    except ValueError:
        return True


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        repo = Repository.load(args.repo_dir)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (XmlParseError, XmlValidationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    report = repo.validate()
    print(report.render(), end="")
    return 1 if report.has_errors() else 0


def cmd_estimate(args: argparse.Namespace) -> int:
    try:
        responses = read_response_file(args.responses)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ResponseFileError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if not responses:
        print("error: response file holds no responses", file=sys.stderr)
        return 2
    config = EstimationConfig(
        theta_initial=args.theta0,
        tolerance=args.tolerance,
        max_iterations=args.max_iterations,
    )
    estimate = estimate_ability(responses, config)
    if args.trace:
        for row in estimate.trace:
            print(format_trace_table(row, responses))
            print()
    if args.format == "json":
        print(
            json.dumps(
                {
                    "theta": estimate.theta,
                    "standardError": estimate.standard_error,
                    "status": estimate.status.value,
                    "items": len(responses),
                    "iterations": len(estimate.trace),
                }
            )
        )
    else:
        print(
            f"theta={estimate.theta:.10g}  se={estimate.standard_error:.10g}  "
            f"status={estimate.status.value}  items={len(responses)}"
        )
    return 0


def cmd_demo_paper(args: argparse.Namespace) -> int:
    responses = reference.reference_responses()
    wrong = ", ".join(str(i) for i in sorted(reference.WRONG_QUESTIONS))
    print(
        f"reference run: {reference.QUESTION_COUNT} questions, a=1.0, b=0.1..2.0, "
        f"wrong answers at {wrong}, theta_0 = {args.theta0:g}"
    )
    print()
    estimate = reference.run_reference(theta_initial=args.theta0)
    for row in estimate.trace:
        print(format_trace_table(row, responses))
        print()
    print(f"final theta     = {estimate.theta:.10f} ({estimate.status.value})")
    print(f"standard error  = {estimate.standard_error:.10f}")
    print()
    all_ok = True
    for label, ok, got, expected in reference.reference_checks(estimate, args.theta0):
        verdict = "PASS" if ok else "FAIL"
        all_ok &= ok
        print(
            f"{verdict}: {label} = {got:.10f} "
            f"(expected {expected} +/- {reference.THETA_TOLERANCE:g})"
        )
    print("PASS" if all_ok else "FAIL")
    return 0 if all_ok else 1


def cmd_simulate(args: argparse.Namespace) -> int:
    import numpy as np

    seed_sequence = np.random.SeedSequence(args.seed)
    bank_rng = np.random.default_rng(seed_sequence.spawn(1)[0])
    bank = tuple(
        ItemParameters(a=1.0, b=float(b)) for b in bank_rng.uniform(-2.5, 2.5, args.items)
    )
    spec = SimulationSpec(
        true_thetas=tuple(args.thetas),
        replications=args.reps,
        bank=bank,
        seed=args.seed,
    )
    report = run_recovery(spec)
    if args.format == "csv":
        print(report.to_csv(), end="")
    else:
        print(report.to_text(), end="")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    host, _, port_text = args.listen.rpartition(":")
    if not host or not port_text:
        print(f"error: --listen must be host:port, got {args.listen!r}", file=sys.stderr)
        return 2
    try:
        port = int(port_text)
        if not 0 < port < 65536:
            raise ValueError
    except ValueError:
        print(f"error: invalid port {port_text!r}", file=sys.stderr)
        return 2
    config = EstimationConfig(
        theta_initial=args.theta0,
        tolerance=args.tolerance,
        max_iterations=args.max_iterations,
    )
    try:
        app = create_app(
            args.repo,
            config=config,
            event_dir=args.events,
            static_dir=args.assets,
        )
    except (FileNotFoundError, ValueError, XmlParseError, XmlValidationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _add_estimation_flags(parser: argparse.ArgumentParser, theta0_default: float) -> None:
    parser.add_argument("--theta0", type=float, default=theta0_default,
                        help="starting ability for the Newton search")
    parser.add_argument("--tolerance", type=float, default=1e-5,
                        help="stop once the update falls below this")
    parser.add_argument("--max-iterations", type=_positive_int, default=50)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irtplace",
        description="Placement-test toolkit: validate repositories, estimate "
        "abilities, run recovery studies, serve the test API.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate an XML repository directory")
    p.add_argument("repo_dir", help="directory with competences/, banks/, learners/")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("estimate", help="estimate ability from a response CSV")
    p.add_argument("--responses", required=True, help="CSV file of item_id,a,b,u lines")
    p.add_argument("--trace", action="store_true", help="print the per-iteration tables")
    p.add_argument("--format", choices=("text", "json"), default="text")
    _add_estimation_flags(p, theta0_default=0.0)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser(
        "demo-paper",
        help="replay the bundled 20-question reference run and check its expected values",
    )
    p.add_argument("--theta0", type=float, default=reference.REFERENCE_THETA_INITIAL)
    p.set_defaults(func=cmd_demo_paper)

    p = sub.add_parser("simulate", help="estimator recovery study over a synthetic bank")
    p.add_argument("--thetas", type=float, nargs="+", default=[-2.0, -1.0, 0.0, 1.0, 2.0])
    p.add_argument("--items", type=_positive_int, default=50, help="synthetic bank size")
    p.add_argument("--reps", type=_positive_int, default=200, help="replications per theta")
    p.add_argument("--seed", type=int, default=20260810)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="serve the placement-test HTTP API")
    p.add_argument("--listen", default="127.0.0.1:8080", help="host:port to bind")
    p.add_argument("--repo", required=True, help="repository directory")
    p.add_argument("--events", default=None, help="directory for session event logs")
    p.add_argument("--assets", default=None, help="static directory for the web UI bundle")
    _add_estimation_flags(p, theta0_default=0.0)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
