"""Shared test utilities: random program generators and independent oracles.

The oracles here deliberately avoid the library's enumeration tables and
search backends; they lean only on the operation table, the token data model
and the reference step semantics.
"""

from __future__ import annotations

import itertools

from geoprog.executor import DomainError, MatchPolicy, execute_step, match_option
from geoprog.ops import (
    COMMUTATIVE_OPERATIONS,
    CONSTANT_NAMES,
    CONSTANTS,
    OPERATIONS,
)
from geoprog.program import Program, Step, Token

# The search space drops the identity op and the pi*a*b product formula;
# both only duplicate reachable values. Kept in sync with the synthesizer by
# the enumeration-census tests.
SEARCH_EXCLUDED = frozenset({"Equal", "ConeArea"})
SEARCH_OPS = tuple(op for op in OPERATIONS if op.name not in SEARCH_EXCLUDED)


def count_depth1_programs(num_vars: int) -> int:
    """Closed-form census of canonical one-step programs."""
    pool = len(CONSTANT_NAMES) + num_vars
    total = 0
    for op in SEARCH_OPS:
        if op.arity == 1:
            total += pool
        elif op.arity == 2 and op.name in COMMUTATIVE_OPERATIONS:
            total += pool * (pool + 1) // 2
        elif op.arity == 2:
            total += pool * pool
        else:
            total += pool**3
    return total


def count_programs(num_vars: int, max_steps: int) -> int:
    """Census of the unpruned stream: dead steps included."""
    total = 0
    per_step = []
    for j in range(max_steps):
        pool = len(CONSTANT_NAMES) + num_vars + j
        count = 0
        for op in SEARCH_OPS:
            if op.arity == 1:
                count += pool
            elif op.arity == 2 and op.name in COMMUTATIVE_OPERATIONS:
                count += pool * (pool + 1) // 2
            elif op.arity == 2:
                count += pool * pool
            else:
                count += pool**3
        per_step.append(count)
    prod = 1
    for d in range(1, max_steps + 1):
        prod = 1
        for j in range(d):
            prod *= per_step[j]
        total += prod
    return total


def pool_tokens(num_vars: int, step_index: int) -> list[Token]:
    tokens = [Token.constant(name) for name in CONSTANT_NAMES]
    tokens.extend(Token.problem_var(i) for i in range(num_vars))
    tokens.extend(Token.process_var(j) for j in range(step_index))
    return tokens


def token_value(token, problem_vars, trace):
    if token.payload in CONSTANTS and token.kind.value == "Constant":
        return CONSTANTS[token.payload]
    if token.kind.value == "ProblemVar":
        return float(problem_vars[int(token.payload)])
    return trace[int(token.payload)]


def iter_depth1_oracle(num_vars: int):
    """All canonical one-step programs in specified order, independently built."""
    pool = pool_tokens(num_vars, 0)
    for op in SEARCH_OPS:
        if op.arity == 1:
            combos = ((a,) for a in pool)
        elif op.arity == 2 and op.name in COMMUTATIVE_OPERATIONS:
            combos = itertools.combinations_with_replacement(pool, 2)
        elif op.arity == 2:
            combos = itertools.product(pool, repeat=2)
        else:
            combos = itertools.product(pool, repeat=3)
        for args in combos:
            yield Program((Step(op, tuple(args)),))


def first_match_oracle(problem_vars, options, policy=MatchPolicy()):
    """First one-step program whose value matches an option, or None."""
    for program in iter_depth1_oracle(len(problem_vars)):
        step = program.steps[0]
        args = [token_value(t, problem_vars, []) for t in step.args]
        try:
            value = execute_step(step.op, args)
        except DomainError:
            continue
        idx = match_option(value, options, policy)
        if idx is not None:
            return program, idx, value
    return None


def depth1_values(problem_vars):
    values = []
    for program in iter_depth1_oracle(len(problem_vars)):
        step = program.steps[0]
        args = [token_value(t, problem_vars, []) for t in step.args]
        try:
            values.append(execute_step(step.op, args))
        except DomainError:
            pass
    return values


def random_structural_program(rng, max_steps: int = 5) -> Program:
    """Random parseable program; validity (ranges, references) not required."""
    steps = []
    for _ in range(rng.randint(1, max_steps)):
        op = rng.choice(OPERATIONS)
        args = []
        for _ in range(op.arity):
            kind = rng.randrange(3)
            if kind == 0:
                args.append(Token.constant(rng.choice(CONSTANT_NAMES)))
            elif kind == 1:
                args.append(Token.problem_var(rng.randrange(10)))
            else:
                args.append(Token.process_var(rng.randrange(4)))
        steps.append(Step(op, tuple(args)))
    return Program(tuple(steps))


def random_search_program(rng, num_vars: int, depth: int) -> Program:
    """Random valid program over the searched op set."""
    steps = []
    for j in range(depth):
        op = SEARCH_OPS[rng.randrange(len(SEARCH_OPS))]
        pool = pool_tokens(num_vars, j)
        args = tuple(pool[rng.randrange(len(pool))] for _ in range(op.arity))
        steps.append(Step(op, args))
    return Program(tuple(steps))
