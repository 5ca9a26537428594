"""Step semantics, program execution, option matching and beam selection.

Angles are degrees throughout; every value is a double. This module is the
reference semantics that the search backends must reproduce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .ops import CONSTANTS, OperationDef
from .program import (
    MAX_PROGRAM_STEPS,
    ParseError,
    Program,
    Token,
    TokenKind,
    parse_program,
    serialize_program,
    validate,
)

DIVISION_EPSILON = 1e-12
TAN_POLE_EPSILON_DEGREES = 1e-9

VALUE = "Value"
GRAMMAR_ERROR = "GrammarError"
DOMAIN_ERROR = "DomainError"
NO_MATCH = "NoMatch"
ANSWERED = "Answered"
NO_RESULT = "NoResult"


class DomainError(Exception):
    """A step's inputs left its mathematical domain."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class MatchPolicy:
    """Combined tolerance for option matching: |value - c| <= max(abs, rel*|c|)."""

    abs_tol: float = 1e-2
    rel_tol: float = 1e-4

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")


@dataclass(frozen=True)
class StepError:
    step: int
    reason: str


@dataclass(frozen=True)
class ExecutionOutcome:
    """Trace of process-variable values plus a terminal status."""

    status: str
    trace: tuple[float, ...]
    final: float | None = None
    error: StepError | None = None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "trace": list(self.trace),
            "final": self.final,
            "error": None
            if self.error is None
            else {"step": self.error.step, "reason": self.error.reason},
        }


def execute_step(op: OperationDef, args: Sequence[float]) -> float:
    """Apply one operation to numeric arguments; raises DomainError."""
    if len(args) != op.arity:
        raise ValueError(f"{op.name} expects {op.arity} argument(s)")
    name = op.name
    if name == "Equal":
        result = args[0]
    elif name == "Double":
        result = 2.0 * args[0]
    elif name == "Half":
        result = args[0] / 2.0
    elif name == "Add":
        result = args[0] + args[1]
    elif name == "Minus":
        result = args[0] - args[1]
    elif name == "Multiply":
        result = args[0] * args[1]
    elif name == "Divide":
        if abs(args[1]) < DIVISION_EPSILON:
            raise DomainError("Divide: |denominator| < 1e-12")
        result = args[0] / args[1]
    elif name == "Sin":
        result = math.sin(math.radians(args[0]))
    elif name == "Cos":
        result = math.cos(math.radians(args[0]))
    elif name == "Tan":
        m = (args[0] - 90.0) % 180.0
        if min(m, 180.0 - m) <= TAN_POLE_EPSILON_DEGREES:
            raise DomainError("Tan: argument within 1e-9 degrees of a pole")
        result = math.tan(math.radians(args[0]))
    elif name == "ArcSin":
        if abs(args[0]) > 1.0:
            raise DomainError("ArcSin: |x| > 1")
        result = math.degrees(math.asin(args[0]))
    elif name == "ArcCos":
        if abs(args[0]) > 1.0:
            raise DomainError("ArcCos: |x| > 1")
        result = math.degrees(math.acos(args[0]))
    elif name == "PythagoreanAdd":
        result = math.hypot(args[0], args[1])
    elif name == "PythagoreanMinus":
        if abs(args[0]) < abs(args[1]):
            raise DomainError("PythagoreanMinus: a^2 < b^2")
        # (a-b)(a+b) avoids the cancellation in a*a - b*b
        result = math.sqrt((args[0] - args[1]) * (args[0] + args[1]))
    elif name == "Proportion":
        if abs(args[2]) < DIVISION_EPSILON:
            raise DomainError("Proportion: |denominator| < 1e-12")
        result = args[0] * args[1] / args[2]
    elif name == "CircleArea":
        result = math.pi * args[0] * args[0]
    elif name == "CirclePerimeter":
        result = 2.0 * math.pi * args[0]
    elif name == "ConeArea":
        result = math.pi * args[0] * args[1]
    else:
        raise ValueError(f"unknown operation '{name}'")
    if not math.isfinite(result):
        raise DomainError("non-finite result")
    return float(result)


def _token_value(token: Token, problem_vars: Sequence[float], trace: list) -> float:
    if token.kind is TokenKind.CONSTANT:
        return CONSTANTS[token.payload]
    if token.kind is TokenKind.PROBLEM_VAR:
        return float(problem_vars[int(token.payload)])
    return trace[int(token.payload)]


def execute_program(
    program: Program,
    problem_vars: Sequence[float],
    *,
    max_steps: int = MAX_PROGRAM_STEPS,
) -> ExecutionOutcome:
    """Validate, then run steps in order binding each value to V_j.

    Grammar problems surface as a GrammarError outcome with an empty trace;
    the first domain failure aborts with the partial trace.
    """
    report = validate(program, len(problem_vars), max_steps=max_steps)
    if not report.ok:
        first = report.issues[0]
        return ExecutionOutcome(
            GRAMMAR_ERROR, (), error=StepError(first.step, first.message)
        )
    trace: list[float] = []
    for i, step in enumerate(program.steps):
        args = [_token_value(t, problem_vars, trace) for t in step.args]
        try:
            value = execute_step(step.op, args)
        except DomainError as exc:
            return ExecutionOutcome(
                DOMAIN_ERROR, tuple(trace), error=StepError(i, exc.reason)
            )
        trace.append(value)
    return ExecutionOutcome(VALUE, tuple(trace), final=trace[-1])


def match_option(
    value: float,
    options: Sequence[float],
    policy: MatchPolicy = MatchPolicy(),
) -> int | None:
    """Index of the closest option within tolerance, or None.

    Ties are broken by the lowest index.
    """
    if len(options) != 4:
        raise ValueError("expected exactly 4 options")
    best = None
    best_delta = math.inf
    for i, c in enumerate(options):
        tol = max(policy.abs_tol, policy.rel_tol * abs(c))
        delta = abs(value - c)
        if delta <= tol and delta < best_delta:
            best, best_delta = i, delta
    return best


@dataclass(frozen=True)
class BeamAttempt:
    rank: int
    kind: str
    detail: str = ""

    def to_dict(self) -> dict:
        return {"rank": self.rank, "kind": self.kind, "detail": self.detail}


@dataclass(frozen=True)
class BeamOutcome:
    """Result of running a ranked candidate list against one problem."""

    status: str
    chosen_option: int | None = None
    chosen_program: Program | None = None
    chosen_rank: int | None = None
    attempts: tuple[BeamAttempt, ...] = ()

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "chosen_option": self.chosen_option,
            "chosen_program": None
            if self.chosen_program is None
            else serialize_program(self.chosen_program),
            "chosen_rank": self.chosen_rank,
            "attempts": [a.to_dict() for a in self.attempts],
        }


Candidate = Union[Program, str]


def execute_beam(
    candidates: Sequence[Candidate],
    problem_vars: Sequence[float],
    options: Sequence[float],
    policy: MatchPolicy = MatchPolicy(),
    *,
    max_steps: int = MAX_PROGRAM_STEPS,
) -> BeamOutcome:
    """First candidate that executes to a value matching an option wins.

    Candidates may be Programs or raw program text; text that fails to parse
    is a grammar failure, mirroring how a decoder's beam may contain
    ill-formed sequences. If nothing qualifies the answer is NoResult, never
    a guess.
    """
    attempts: list[BeamAttempt] = []
    for rank, cand in enumerate(candidates):
        if isinstance(cand, str):
            try:
                prog = parse_program(cand)
            except ParseError as exc:
                attempts.append(BeamAttempt(rank, GRAMMAR_ERROR, str(exc)))
                continue
        else:
            prog = cand
        outcome = execute_program(prog, problem_vars, max_steps=max_steps)
        if outcome.status != VALUE:
            attempts.append(
                BeamAttempt(rank, outcome.status, outcome.error.reason)
            )
            continue
        idx = match_option(outcome.final, options, policy)
        if idx is None:
            attempts.append(
                BeamAttempt(rank, NO_MATCH, f"value {outcome.final!r}")
            )
            continue
        return BeamOutcome(ANSWERED, idx, prog, rank, tuple(attempts))
    return BeamOutcome(NO_RESULT, attempts=tuple(attempts))
