"""Integer-coded enumeration tables shared by the search backends.

Programs are encoded as rows (op_id, a0, a1, a2) where arguments index the
value pool [constants..., problem vars..., process vars...]; unused argument
slots hold -1. Row order inside a step table follows the token vocabulary, so
iterating tables row-major reproduces the canonical enumeration order.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .ops import COMMUTATIVE_OPERATIONS, CONSTANT_NAMES, OPERATIONS
from .program import Program, Step, Token, TokenKind

NUM_CONSTANTS = len(CONSTANT_NAMES)

# The search space drops Equal (forwards its argument unchanged) and ConeArea
# (pi*a*b, a constant multiple of Multiply): both only duplicate values
# reachable without them. The depth-1 census for one problem variable is
# pinned at 884 over this set.
EXCLUDED_FROM_SEARCH = frozenset({"Equal", "ConeArea"})
SEARCH_OPERATION_IDS: tuple[int, ...] = tuple(
    i for i, op in enumerate(OPERATIONS) if op.name not in EXCLUDED_FROM_SEARCH
)


def pool_size(num_vars: int, step_index: int) -> int:
    return NUM_CONSTANTS + num_vars + step_index


def _vmask(num_vars: int, arg_indices) -> int:
    mask = 0
    for a in arg_indices:
        if a >= NUM_CONSTANTS + num_vars:
            mask |= 1 << (a - NUM_CONSTANTS - num_vars)
    return mask


@lru_cache(maxsize=None)
def step_table(num_vars: int, step_index: int) -> np.ndarray:
    """All candidate rows for one step position, in canonical order."""
    pool = pool_size(num_vars, step_index)
    rows = []
    for op_id in SEARCH_OPERATION_IDS:
        op = OPERATIONS[op_id]
        if op.arity == 1:
            for a in range(pool):
                rows.append((op_id, a, -1, -1, _vmask(num_vars, (a,))))
        elif op.arity == 2 and op.name in COMMUTATIVE_OPERATIONS:
            for a in range(pool):
                for b in range(a, pool):
                    rows.append((op_id, a, b, -1, _vmask(num_vars, (a, b))))
        elif op.arity == 2:
            for a in range(pool):
                for b in range(pool):
                    rows.append((op_id, a, b, -1, _vmask(num_vars, (a, b))))
        else:
            for a in range(pool):
                for b in range(pool):
                    for c in range(pool):
                        rows.append((op_id, a, b, c, _vmask(num_vars, (a, b, c))))
    table = np.asarray(rows, dtype=np.int32)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def search_layout(
    num_vars: int, max_steps: int, prune_dead: bool
) -> tuple[np.ndarray, np.ndarray]:
    """Stacked row array plus per-(depth, position) index ranges.

    For depth d with pruning, the final step draws from the subtable whose
    rows consume V_{d-2}; every other position uses the full table. Deeper
    cross-step liveness (d >= 3) is checked at enumeration time.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    parts = []
    offsets = []
    pos = 0
    for j in range(max_steps):
        t = step_table(num_vars, j)
        parts.append(t)
        offsets.append((pos, pos + len(t)))
        pos += len(t)
    sub_offsets: dict[int, tuple[int, int]] = {}
    if prune_dead:
        for d in range(2, max_steps + 1):
            t = step_table(num_vars, d - 1)
            sub = t[(t[:, 4] & (1 << (d - 2))) != 0]
            parts.append(sub)
            sub_offsets[d] = (pos, pos + len(sub))
            pos += len(sub)
    rows = np.concatenate(parts, axis=0).astype(np.int32)
    rows.setflags(write=False)
    ranges = np.zeros((max_steps, max_steps, 2), dtype=np.int64)
    for d in range(1, max_steps + 1):
        for j in range(d):
            if prune_dead and d >= 2 and j == d - 1:
                ranges[d - 1, j] = sub_offsets[d]
            else:
                ranges[d - 1, j] = offsets[j]
    ranges.setflags(write=False)
    return rows, ranges


def pool_index(token: Token, num_vars: int) -> int:
    if token.kind is TokenKind.CONSTANT:
        return CONSTANT_NAMES.index(token.payload)
    if token.kind is TokenKind.PROBLEM_VAR:
        return NUM_CONSTANTS + int(token.payload)
    if token.kind is TokenKind.PROCESS_VAR:
        return NUM_CONSTANTS + num_vars + int(token.payload)
    raise ValueError("operation tokens have no pool slot")


def decode_step(row, num_vars: int) -> Step:
    op = OPERATIONS[int(row[0])]
    args = []
    for k in range(op.arity):
        idx = int(row[1 + k])
        if idx < NUM_CONSTANTS:
            args.append(Token.constant(CONSTANT_NAMES[idx]))
        elif idx < NUM_CONSTANTS + num_vars:
            args.append(Token.problem_var(idx - NUM_CONSTANTS))
        else:
            args.append(Token.process_var(idx - NUM_CONSTANTS - num_vars))
    return Step(op, tuple(args))


def encode_program(program: Program, num_vars: int) -> np.ndarray:
    """Row encoding of an arbitrary (table-conformant) program."""
    rows = np.full((len(program.steps), 4), -1, dtype=np.int32)
    for i, step in enumerate(program.steps):
        rows[i, 0] = OPERATIONS.index(step.op)
        for k, arg in enumerate(step.args):
            rows[i, 1 + k] = pool_index(arg, num_vars)
    return rows
