"""Brute-force program search: canonical enumeration plus beam-style solve.

Candidate ranking is deterministic shortest-first enumeration order, standing
in for a learned decoder's likelihood ranking behind the same beam contract.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator

import numpy as np

from . import _tables
from .backend import get_backend
from .executor import (
    ANSWERED,
    NO_RESULT,
    BeamOutcome,
    MatchPolicy,
    execute_program,
    match_option,
)
from .ops import COMMUTATIVE_OPERATIONS, CONSTANTS
from .program import MAX_PROGRAM_STEPS, Program, Step, vocabulary_key

STOP_ANSWERED = "answered"
STOP_EXHAUSTED = "exhausted"
STOP_BUDGET = "budget"
STOP_BEAM = "beam"

_STATUS_TO_STOP = {0: STOP_EXHAUSTED, 1: STOP_ANSWERED, 2: STOP_BUDGET, 3: STOP_BEAM}


@dataclass(frozen=True)
class SolveConfig:
    max_steps: int = 2
    max_candidates: int = 10_000_000
    beam_size: int = 10
    policy: MatchPolicy = field(default_factory=MatchPolicy)
    prune_dead_steps: bool = True

    def __post_init__(self):
        if not 1 <= self.max_steps <= MAX_PROGRAM_STEPS:
            raise ValueError(f"max_steps must be in 1..{MAX_PROGRAM_STEPS}")
        if self.max_candidates < 1 or self.beam_size < 1:
            raise ValueError("budgets must be positive")


@dataclass(frozen=True)
class SolveResult:
    outcome: BeamOutcome
    programs_tried: int
    depth_reached: int
    elapsed: float  # seconds
    domain_failures: int
    stop_reason: str
    matched_value: float | None = None

    def to_dict(self, include_elapsed: bool = True) -> dict:
        data = {
            "outcome": self.outcome.to_dict(),
            "programs_tried": self.programs_tried,
            "depth_reached": self.depth_reached,
            "domain_failures": self.domain_failures,
            "stop_reason": self.stop_reason,
            "matched_value": self.matched_value,
        }
        if include_elapsed:
            data["elapsed_ms"] = self.elapsed * 1000.0
        return data


def canonicalize(program: Program) -> Program:
    """Sort commutative steps' arguments into vocabulary order.

    Idempotent, and never changes the executed value (IEEE addition and
    multiplication are commutative).
    """
    steps = []
    for step in program.steps:
        if step.op.name in COMMUTATIVE_OPERATIONS:
            steps.append(Step(step.op, tuple(sorted(step.args, key=vocabulary_key))))
        else:
            steps.append(step)
    return Program(tuple(steps))


def _alive(rows, idx, d) -> bool:
    # every intermediate step's value must be consumed by a later step;
    # the final step's subtable already guarantees V_{d-2}
    for j in range(d - 2):
        if not any(rows[idx[k], 4] & (1 << j) for k in range(j + 1, d)):
            return False
    return True


def enumerate_programs(
    num_problem_vars: int,
    max_steps: int,
    *,
    prune_dead: bool = False,
) -> Iterator[Program]:
    """Yield every canonical valid program, shortest first then lexicographic.

    Step j draws arguments from constants, problem variables and V_0..V_{j-1};
    commutative duplicates are skipped at the source. With prune_dead=True,
    programs whose intermediate values are never consumed are dropped; an
    equivalent shorter program always precedes them in the stream, so the
    solvable set is unchanged.
    """
    if num_problem_vars < 0 or max_steps < 1:
        raise ValueError("need num_problem_vars >= 0 and max_steps >= 1")
    rows, ranges = _tables.search_layout(num_problem_vars, max_steps, prune_dead)
    for d in range(1, max_steps + 1):
        rng = ranges[d - 1]
        spans = [range(int(rng[j, 0]), int(rng[j, 1])) for j in range(d)]
        for idx in product(*spans):
            if prune_dead and d >= 3 and not _alive(rows, idx, d):
                continue
            yield Program(
                tuple(_tables.decode_step(rows[i], num_problem_vars) for i in idx)
            )


def solve(problem, config: SolveConfig | None = None, *, backend: str | None = None) -> SolveResult:
    """Search for the first enumerated program matching one of the options.

    `problem` needs `problem_vars` and `options` attributes (a dataset
    Problem works). The beam is the first `beam_size` candidates that execute
    to a value; the first of those matching an option answers, otherwise the
    result is NoResult.
    """
    if config is None:
        config = SolveConfig()
    problem_vars = tuple(float(v) for v in problem.problem_vars)
    options = tuple(float(c) for c in problem.options)
    if len(options) != 4:
        raise ValueError("expected exactly 4 options")
    n = len(problem_vars)
    rows, ranges = _tables.search_layout(n, config.max_steps, config.prune_dead_steps)
    base = _tables.NUM_CONSTANTS + n
    pool = np.empty(base + config.max_steps, dtype=np.float64)
    pool[: _tables.NUM_CONSTANTS] = list(CONSTANTS.values())
    if n:
        pool[_tables.NUM_CONSTANTS: base] = problem_vars
    pool[base:] = 0.0
    out_rows = np.full(config.max_steps, -1, dtype=np.int64)
    impl = get_backend(backend)
    start = time.perf_counter()
    status, depth, tried, executed, domain_fails, option, rank, value = impl.run_search(
        rows,
        ranges,
        config.max_steps,
        pool,
        base,
        np.asarray(options, dtype=np.float64),
        config.policy.abs_tol,
        config.policy.rel_tol,
        config.max_candidates,
        config.beam_size,
        config.prune_dead_steps,
        out_rows,
    )
    elapsed = time.perf_counter() - start
    stop_reason = _STATUS_TO_STOP[int(status)]
    if stop_reason == STOP_ANSWERED:
        chosen = Program(
            tuple(
                _tables.decode_step(rows[int(out_rows[k])], n) for k in range(int(depth))
            )
        )
        check = execute_program(chosen, problem_vars, max_steps=config.max_steps)
        if (
            check.status != "Value"
            or match_option(check.final, options, config.policy) != int(option)
        ):
            raise RuntimeError(
                "search backend and reference executor disagree on "
                f"{chosen!s}; please report this"
            )
        outcome = BeamOutcome(
            ANSWERED,
            chosen_option=int(option),
            chosen_program=chosen,
            chosen_rank=int(rank),
        )
        matched_value = float(value)
    else:
        outcome = BeamOutcome(NO_RESULT)
        matched_value = None
    return SolveResult(
        outcome=outcome,
        programs_tried=int(tried),
        depth_reached=int(depth),
        elapsed=elapsed,
        domain_failures=int(domain_fails),
        stop_reason=stop_reason,
        matched_value=matched_value,
    )
