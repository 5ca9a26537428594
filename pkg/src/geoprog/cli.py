"""Command-line front door: parse, exec, solve, verify, stats, eval.

Exit codes: 0 success, 1 domain-level failure (parse errors, strict verify
failures), 2 usage errors. With --json the only thing on stdout is a single
JSON document; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .dataset import (
    DatasetError,
    dataset_stats,
    load_problems,
    verify_annotations,
)
from .executor import MatchPolicy, execute_program
from .harness import (
    ExternalFileGenerator,
    SynthesizerGenerator,
    evaluate_detailed,
    export_report,
    format_metrics_table,
    worker_threads,
)
from .program import ParseError, parse_program, serialize_program
from .synthesizer import SolveConfig, solve


def _parse_numbers(raw: str, flag: str) -> list[float]:
    raw = raw.strip()
    if not raw:
        return []
    try:
        return [float(part) for part in raw.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{flag} expects comma-separated decimals")


def _parse_counts(raw: str, flag: str) -> list[int]:
    try:
        return [int(part) for part in raw.strip().split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{flag} expects comma-separated integers")


def _emit(data: dict) -> None:
    print(json.dumps(data))


def _policy(args) -> MatchPolicy:
    return MatchPolicy(abs_tol=args.abs_tol, rel_tol=args.rel_tol)


def _add_policy_flags(sub) -> None:
    sub.add_argument("--abs-tol", type=float, default=1e-2)
    sub.add_argument("--rel-tol", type=float, default=1e-4)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoprog",
        description="Geometry program language tools",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p_parse = subs.add_parser("parse", help="echo the canonical program text")
    p_parse.add_argument("--program", required=True)
    p_parse.add_argument("--json", action="store_true")

    p_exec = subs.add_parser("exec", help="execute one program")
    p_exec.add_argument("--program", required=True)
    p_exec.add_argument("--vars", default="")
    p_exec.add_argument("--max-steps", type=int, default=4)
    p_exec.add_argument("--json", action="store_true")

    p_solve = subs.add_parser("solve", help="brute-force search for an answer")
    p_solve.add_argument("--vars", default="")
    p_solve.add_argument("--options", required=True)
    p_solve.add_argument("--answer", type=int, default=None)
    p_solve.add_argument("--max-steps", type=int, default=2)
    p_solve.add_argument("--beam", type=int, default=10)
    p_solve.add_argument("--budget", type=int, default=10_000_000)
    _add_policy_flags(p_solve)
    p_solve.add_argument("--json", action="store_true")

    p_verify = subs.add_parser("verify", help="check gold annotations")
    p_verify.add_argument("dataset")
    p_verify.add_argument("--strict", action="store_true")
    _add_policy_flags(p_verify)
    p_verify.add_argument("--json", action="store_true")

    p_stats = subs.add_parser("stats", help="corpus statistics")
    p_stats.add_argument("dataset")
    p_stats.add_argument("--strict", action="store_true")
    p_stats.add_argument("--json", action="store_true")

    p_eval = subs.add_parser("eval", help="accuracy / no-result metrics")
    p_eval.add_argument("dataset")
    p_eval.add_argument("--candidates", default=None,
                        help="JSON file mapping problem id to program texts")
    p_eval.add_argument("--beam", default="1,10,100")
    p_eval.add_argument("--max-steps", type=int, default=2)
    p_eval.add_argument("--budget", type=int, default=10_000_000)
    _add_policy_flags(p_eval)
    p_eval.add_argument("--out", default=None)
    p_eval.add_argument("--strict", action="store_true")
    p_eval.add_argument("--json", action="store_true")
    return parser


def _cmd_parse(args) -> int:
    try:
        program = parse_program(args.program)
    except ParseError as exc:
        if args.json:
            _emit({
                "ok": False,
                "error": {"message": exc.message, "step": exc.step, "offset": exc.offset},
            })
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    canonical = serialize_program(program)
    if args.json:
        _emit({"ok": True, "canonical": canonical})
    else:
        print(canonical)
    return 0


def _cmd_exec(args) -> int:
    problem_vars = _parse_numbers(args.vars, "--vars")
    try:
        program = parse_program(args.program)
    except ParseError as exc:
        if args.json:
            _emit({
                "status": "ParseError",
                "error": {"message": exc.message, "step": exc.step, "offset": exc.offset},
            })
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    outcome = execute_program(program, problem_vars, max_steps=args.max_steps)
    _emit(outcome.to_dict())
    return 0


def _cmd_solve(args) -> int:
    problem_vars = _parse_numbers(args.vars, "--vars")
    options = _parse_numbers(args.options, "--options")
    if len(options) != 4:
        print("--options expects exactly 4 numbers", file=sys.stderr)
        return 2
    config = SolveConfig(
        max_steps=args.max_steps,
        max_candidates=args.budget,
        beam_size=args.beam,
        policy=_policy(args),
    )

    class _Adhoc:
        pass

    problem = _Adhoc()
    problem.problem_vars = problem_vars
    problem.options = options
    result = solve(problem, config)
    data = result.to_dict(include_elapsed=False)
    if args.answer is not None:
        data["correct"] = (
            result.outcome.status == "Answered"
            and result.outcome.chosen_option == args.answer
        )
    print(f"solved in {result.elapsed * 1000.0:.2f} ms", file=sys.stderr)
    _emit(data)
    return 0


def _cmd_verify(args) -> int:
    problems = load_problems(args.dataset, strict=args.strict)
    report = verify_annotations(problems, _policy(args), strict=args.strict)
    if args.json:
        _emit(report.to_dict())
    else:
        print(f"checked {report.total_checked}, passed {report.passed}, "
              f"failed {len(report.failures)}")
        for failure in report.failures:
            print(f"  {failure.problem_id}: {failure.reason} {failure.detail}")
    if args.strict and report.failures:
        return 1
    return 0


def _cmd_stats(args) -> int:
    problems = load_problems(args.dataset, strict=args.strict)
    stats = dataset_stats(problems)
    if args.json:
        _emit(stats.to_dict())
    else:
        print(f"total     {stats.total}")
        for name, count in stats.per_type.items():
            print(f"  {name:<7} {count}")
        for name, count in stats.per_split.items():
            print(f"  {name:<7} {count}")
        print(f"annotated {stats.annotated}")
        print(f"avg OP    {stats.avg_op:.2f}")
        print(f"avg PL    {stats.avg_pl:.2f}")
        print(f"avg tags  {stats.avg_knowledge_tags:.2f}")
    return 0


def _cmd_eval(args) -> int:
    problems = load_problems(args.dataset, strict=args.strict)
    beam_sizes = _parse_counts(args.beam, "--beam")
    policy = _policy(args)
    if args.candidates:
        gen = ExternalFileGenerator(args.candidates)
    else:
        gen = SynthesizerGenerator(
            SolveConfig(max_steps=args.max_steps, max_candidates=args.budget,
                        policy=policy)
        )
    metrics, details = evaluate_detailed(
        gen, problems, beam_sizes, policy, threads=worker_threads()
    )
    if args.out:
        export_report(metrics, args.out, generator_name=gen.name, policy=policy,
                      details=details)
        print(f"report written to {args.out}", file=sys.stderr)
    if args.json:
        _emit({
            "schema_version": 1,
            "generator": gen.name,
            "policy": {"abs_tol": policy.abs_tol, "rel_tol": policy.rel_tol},
            "metrics": metrics.to_dict(),
        })
    else:
        print(format_metrics_table(metrics))
    return 0


_COMMANDS = {
    "parse": _cmd_parse,
    "exec": _cmd_exec,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "stats": _cmd_stats,
    "eval": _cmd_eval,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except argparse.ArgumentTypeError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args)
    except (DatasetError, ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
