"""Program data model: tokens, steps, parsing, serialization, validation."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .ops import (
    CONSTANT_INDEX,
    CONSTANTS,
    OPERATION_INDEX,
    OPERATIONS,
    OPERATIONS_BY_NAME,
    OperationDef,
)

# Annotation cap on the number of steps; validate() takes it as a parameter so
# longer synthetic programs stay usable.
MAX_PROGRAM_STEPS = 4


class TokenKind(Enum):
    OPERATION = "Operation"
    CONSTANT = "Constant"
    PROBLEM_VAR = "ProblemVar"
    PROCESS_VAR = "ProcessVar"


@dataclass(frozen=True)
class Token:
    """One program atom: an operation or constant name, or a variable index."""

    kind: TokenKind
    payload: str | int

    @staticmethod
    def operation(name: str) -> "Token":
        return Token(TokenKind.OPERATION, name)

    @staticmethod
    def constant(name: str) -> "Token":
        return Token(TokenKind.CONSTANT, name)

    @staticmethod
    def problem_var(index: int) -> "Token":
        return Token(TokenKind.PROBLEM_VAR, index)

    @staticmethod
    def process_var(index: int) -> "Token":
        return Token(TokenKind.PROCESS_VAR, index)

    def text(self) -> str:
        if self.kind is TokenKind.PROBLEM_VAR:
            return f"N_{self.payload}"
        if self.kind is TokenKind.PROCESS_VAR:
            return f"V_{self.payload}"
        return str(self.payload)


_KIND_RANK = {
    TokenKind.OPERATION: 0,
    TokenKind.CONSTANT: 1,
    TokenKind.PROBLEM_VAR: 2,
    TokenKind.PROCESS_VAR: 3,
}


def vocabulary_key(token: Token) -> tuple[int, int]:
    """Total order over tokens: operations, constants, N_i, V_j."""
    rank = _KIND_RANK[token.kind]
    if token.kind is TokenKind.OPERATION:
        return rank, OPERATION_INDEX.get(token.payload, len(OPERATIONS))
    if token.kind is TokenKind.CONSTANT:
        return rank, CONSTANT_INDEX.get(token.payload, len(CONSTANTS))
    return rank, int(token.payload)


@dataclass(frozen=True)
class Step:
    op: OperationDef
    args: tuple[Token, ...]


@dataclass(frozen=True)
class Program:
    steps: tuple[Step, ...]

    def __str__(self) -> str:
        return serialize_program(self)


class ParseError(ValueError):
    """Program text rejected; carries the step index and character offset."""

    def __init__(self, message: str, step: int, offset: int):
        super().__init__(f"step {step}, offset {offset}: {message}")
        self.message = message
        self.step = step
        self.offset = offset


class IssueKind(Enum):
    BAD_ARITY = "BadArity"
    UNKNOWN_OPERATION = "UnknownOperation"
    UNKNOWN_CONSTANT = "UnknownConstant"
    FORWARD_REFERENCE = "ForwardReference"
    PROBLEM_VAR_OUT_OF_RANGE = "ProblemVarOutOfRange"
    TOO_MANY_STEPS = "TooManySteps"


@dataclass(frozen=True)
class ValidationIssue:
    step: int
    kind: IssueKind
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[ValidationIssue, ...]

    @staticmethod
    def from_issues(issues) -> "ValidationReport":
        issues = tuple(issues)
        return ValidationReport(ok=not issues, issues=issues)


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PROBLEM_VAR_RE = re.compile(r"N_(\d+)$")
_PROCESS_VAR_RE = re.compile(r"V_(\d+)$")


def _split_steps(text: str) -> list[tuple[int, str]]:
    # ';' always separates steps; a newline separates only outside parentheses,
    # inside them it is plain whitespace.
    segments = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        elif ch == ";" or (ch == "\n" and depth == 0):
            segments.append((start, text[start:i]))
            start = i + 1
    segments.append((start, text[start:]))
    return [(off, seg) for off, seg in segments if seg.strip()]


def _skip_ws(seg: str, i: int) -> int:
    while i < len(seg) and seg[i].isspace():
        i += 1
    return i


def _classify_arg(name: str, step: int, offset: int) -> Token:
    m = _PROBLEM_VAR_RE.match(name)
    if m:
        return Token.problem_var(int(m.group(1)))
    m = _PROCESS_VAR_RE.match(name)
    if m:
        return Token.process_var(int(m.group(1)))
    if name in CONSTANTS:
        return Token.constant(name)
    if name in OPERATIONS_BY_NAME:
        raise ParseError(f"operation name '{name}' used as an argument", step, offset)
    raise ParseError(f"unknown token '{name}'", step, offset)


def _parse_step(step_index: int, base: int, seg: str) -> Step:
    i = _skip_ws(seg, 0)
    m = _NAME_RE.match(seg, i)
    if not m:
        raise ParseError("expected an operation name", step_index, base + i)
    name = m.group()
    if name not in OPERATIONS_BY_NAME:
        raise ParseError(f"unknown operation '{name}'", step_index, base + i)
    op = OPERATIONS_BY_NAME[name]
    i = _skip_ws(seg, m.end())
    if i >= len(seg) or seg[i] != "(":
        raise ParseError("expected '(' after operation name", step_index, base + i)
    paren_offset = base + i
    i += 1
    args: list[Token] = []
    while True:
        i = _skip_ws(seg, i)
        m = _NAME_RE.match(seg, i)
        if not m:
            raise ParseError("expected an argument", step_index, base + i)
        args.append(_classify_arg(m.group(), step_index, base + i))
        i = _skip_ws(seg, m.end())
        if i < len(seg) and seg[i] == ",":
            i += 1
            continue
        if i < len(seg) and seg[i] == ")":
            i += 1
            break
        raise ParseError("expected ',' or ')'", step_index, base + i)
    tail = _skip_ws(seg, i)
    if tail != len(seg):
        raise ParseError("unexpected text after ')'", step_index, base + tail)
    if len(args) != op.arity:
        raise ParseError(
            f"{name} expects {op.arity} argument(s), got {len(args)}",
            step_index,
            paren_offset,
        )
    return Step(op, tuple(args))


def parse_program(text: str) -> Program:
    """Parse program text into a Program.

    Grammar: steps separated by ';' or newline, each step OpName(arg, ...),
    arguments N_<i>, V_<j> or a constant name. Structural validity (known
    names, arity) is enforced here; range and forward-reference checks are
    validate()'s job.
    """
    segments = _split_steps(text)
    if not segments:
        raise ParseError("empty program", 0, 0)
    steps = tuple(
        _parse_step(idx, base, seg) for idx, (base, seg) in enumerate(segments)
    )
    return Program(steps)


def serialize_program(program: Program) -> str:
    """Canonical text: steps joined by '; ', arguments by ', '."""
    return "; ".join(
        f"{step.op.name}({', '.join(arg.text() for arg in step.args)})"
        for step in program.steps
    )


def validate(
    program: Program,
    num_problem_vars: int,
    max_steps: int = MAX_PROGRAM_STEPS,
) -> ValidationReport:
    """Static checks; every violation is reported, nothing is executed."""
    issues: list[ValidationIssue] = []
    steps = program.steps
    if not steps:
        issues.append(
            ValidationIssue(
                0,
                IssueKind.TOO_MANY_STEPS,
                f"expected between 1 and {max_steps} steps, got 0",
            )
        )
    elif len(steps) > max_steps:
        issues.append(
            ValidationIssue(
                max_steps,
                IssueKind.TOO_MANY_STEPS,
                f"expected at most {max_steps} steps, got {len(steps)}",
            )
        )
    for i, step in enumerate(steps):
        table_op = OPERATIONS_BY_NAME.get(step.op.name)
        if table_op is None:
            issues.append(
                ValidationIssue(
                    i,
                    IssueKind.UNKNOWN_OPERATION,
                    f"unknown operation '{step.op.name}'",
                )
            )
            continue
        if len(step.args) != table_op.arity:
            issues.append(
                ValidationIssue(
                    i,
                    IssueKind.BAD_ARITY,
                    f"{table_op.name} expects {table_op.arity} argument(s), "
                    f"got {len(step.args)}",
                )
            )
        for arg in step.args:
            if arg.kind is TokenKind.OPERATION:
                issues.append(
                    ValidationIssue(
                        i,
                        IssueKind.BAD_ARITY,
                        f"operation token '{arg.payload}' used as an argument",
                    )
                )
            elif arg.kind is TokenKind.CONSTANT:
                if arg.payload not in CONSTANTS:
                    issues.append(
                        ValidationIssue(
                            i,
                            IssueKind.UNKNOWN_CONSTANT,
                            f"unknown constant '{arg.payload}'",
                        )
                    )
            elif arg.kind is TokenKind.PROBLEM_VAR:
                index = int(arg.payload)
                if index < 0 or index >= num_problem_vars:
                    issues.append(
                        ValidationIssue(
                            i,
                            IssueKind.PROBLEM_VAR_OUT_OF_RANGE,
                            f"N_{index} out of range for {num_problem_vars} "
                            "problem variable(s)",
                        )
                    )
            else:
                index = int(arg.payload)
                if index < 0 or index >= i:
                    issues.append(
                        ValidationIssue(
                            i,
                            IssueKind.FORWARD_REFERENCE,
                            f"V_{index} is not bound before step {i}",
                        )
                    )
    return ValidationReport.from_issues(issues)


def token_vocabulary(num_problem_vars: int, max_steps: int) -> tuple[Token, ...]:
    """Deterministic token ordering: operations, constants, N_i, then V_j.

    V indices stop at max_steps - 2 because the final step's value is never
    referenced by a later step.
    """
    if num_problem_vars < 0 or max_steps < 0:
        raise ValueError("counts must be non-negative")
    tokens = [Token.operation(op.name) for op in OPERATIONS]
    tokens.extend(Token.constant(name) for name in CONSTANTS)
    tokens.extend(Token.problem_var(i) for i in range(num_problem_vars))
    tokens.extend(Token.process_var(j) for j in range(max(0, max_steps - 1)))
    return tuple(tokens)
