"""JIT search kernel: enumerate, execute and match candidate programs.

Mirrors executor.execute_step formula for formula; the tables module defines
candidate order. Status codes: 0 stream exhausted, 1 answered, 2 budget
exhausted, 3 beam filled without a match.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .executor import DIVISION_EPSILON, TAN_POLE_EPSILON_DEGREES
from .ops import OPERATION_INDEX

OP_EQUAL = OPERATION_INDEX["Equal"]
OP_DOUBLE = OPERATION_INDEX["Double"]
OP_HALF = OPERATION_INDEX["Half"]
OP_ADD = OPERATION_INDEX["Add"]
OP_MINUS = OPERATION_INDEX["Minus"]
OP_MULTIPLY = OPERATION_INDEX["Multiply"]
OP_DIVIDE = OPERATION_INDEX["Divide"]
OP_SIN = OPERATION_INDEX["Sin"]
OP_COS = OPERATION_INDEX["Cos"]
OP_TAN = OPERATION_INDEX["Tan"]
OP_ARCSIN = OPERATION_INDEX["ArcSin"]
OP_ARCCOS = OPERATION_INDEX["ArcCos"]
OP_PYTH_ADD = OPERATION_INDEX["PythagoreanAdd"]
OP_PYTH_MINUS = OPERATION_INDEX["PythagoreanMinus"]
OP_PROPORTION = OPERATION_INDEX["Proportion"]
OP_CIRCLE_AREA = OPERATION_INDEX["CircleArea"]
OP_CIRCLE_PERIM = OPERATION_INDEX["CirclePerimeter"]
OP_CONE_AREA = OPERATION_INDEX["ConeArea"]

STATUS_EXHAUSTED = 0
STATUS_ANSWERED = 1
STATUS_BUDGET = 2
STATUS_BEAM = 3


@njit(cache=True)
def _eval_op(op, a, b, c):
    # Domain violations return nan; the caller treats any non-finite result
    # as a domain failure.
    if op == OP_EQUAL:
        return a
    if op == OP_DOUBLE:
        return 2.0 * a
    if op == OP_HALF:
        return a / 2.0
    if op == OP_ADD:
        return a + b
    if op == OP_MINUS:
        return a - b
    if op == OP_MULTIPLY:
        return a * b
    if op == OP_DIVIDE:
        if abs(b) < DIVISION_EPSILON:
            return np.nan
        return a / b
    if op == OP_SIN:
        return math.sin(math.radians(a))
    if op == OP_COS:
        return math.cos(math.radians(a))
    if op == OP_TAN:
        m = (a - 90.0) % 180.0
        if min(m, 180.0 - m) <= TAN_POLE_EPSILON_DEGREES:
            return np.nan
        return math.tan(math.radians(a))
    if op == OP_ARCSIN:
        if abs(a) > 1.0:
            return np.nan
        return math.degrees(math.asin(a))
    if op == OP_ARCCOS:
        if abs(a) > 1.0:
            return np.nan
        return math.degrees(math.acos(a))
    if op == OP_PYTH_ADD:
        return math.hypot(a, b)
    if op == OP_PYTH_MINUS:
        if abs(a) < abs(b):
            return np.nan
        return math.sqrt((a - b) * (a + b))
    if op == OP_PROPORTION:
        if abs(c) < DIVISION_EPSILON:
            return np.nan
        return a * b / c
    if op == OP_CIRCLE_AREA:
        return math.pi * a * a
    if op == OP_CIRCLE_PERIM:
        return 2.0 * math.pi * a
    return math.pi * a * b  # ConeArea


@njit(cache=True)
def eval_encoded(prog, pool, base):
    """Execute one encoded program in-place; returns (ok, value)."""
    d = prog.shape[0]
    value = np.nan
    for k in range(d):
        a = pool[prog[k, 1]]
        b = pool[prog[k, 2]]
        c = pool[prog[k, 3]]
        value = _eval_op(prog[k, 0], a, b, c)
        if not math.isfinite(value):
            return False, np.nan
        pool[base + k] = value
    return True, value


@njit(cache=True)
def run_search(
    rows,
    ranges,
    depths,
    pool,
    base,
    options,
    abs_tol,
    rel_tol,
    budget,
    beam_cap,
    cross_check,
    out_rows,
):
    """Scan depths 1..depths in canonical order.

    Returns (status, depth, tried, executed, domain_fails, option, rank,
    value); on success out_rows[:depth] holds the winning row indices.
    """
    tried = 0
    executed = 0
    domain_fails = 0
    idx = np.empty(4, dtype=np.int64)
    for d in range(1, depths + 1):
        rng = ranges[d - 1]
        empty = False
        for j in range(d):
            if rng[j, 1] <= rng[j, 0]:
                empty = True
        if empty:
            continue
        for j in range(d):
            idx[j] = rng[j, 0]
        good = 0  # leading steps with valid cached values for current prefix
        bad = False  # step `good` is known to fail
        while True:
            alive = True
            if cross_check and d >= 3:
                # every intermediate step's value must be consumed later;
                # the final step's table already guarantees V_{d-2}
                for j in range(d - 2):
                    used = False
                    for k in range(j + 1, d):
                        if rows[idx[k], 4] & (1 << j) != 0:
                            used = True
                            break
                    if not used:
                        alive = False
                        break
            if alive:
                if tried >= budget:
                    return (STATUS_BUDGET, d, tried, executed, domain_fails, -1, -1, np.nan)
                tried += 1
                if bad:
                    domain_fails += 1
                else:
                    while good < d:
                        r = idx[good]
                        value = _eval_op(
                            rows[r, 0],
                            pool[rows[r, 1]],
                            pool[rows[r, 2]],
                            pool[rows[r, 3]],
                        )
                        if not math.isfinite(value):
                            bad = True
                            break
                        pool[base + good] = value
                        good += 1
                    if bad:
                        domain_fails += 1
                    else:
                        value = pool[base + d - 1]
                        executed += 1
                        best = -1
                        best_delta = np.inf
                        for copt in range(4):
                            tol = rel_tol * abs(options[copt])
                            if abs_tol > tol:
                                tol = abs_tol
                            delta = abs(value - options[copt])
                            if delta <= tol and delta < best_delta:
                                best = copt
                                best_delta = delta
                        if best >= 0:
                            for k in range(d):
                                out_rows[k] = idx[k]
                            return (
                                STATUS_ANSWERED,
                                d,
                                tried,
                                executed,
                                domain_fails,
                                best,
                                executed - 1,
                                value,
                            )
                        if executed >= beam_cap:
                            return (STATUS_BEAM, d, tried, executed, domain_fails, -1, -1, np.nan)
            # advance the odometer; the last position moves fastest
            pos = d - 1
            while pos >= 0:
                idx[pos] += 1
                if idx[pos] < rng[pos, 1]:
                    break
                idx[pos] = rng[pos, 0]
                pos -= 1
            if pos < 0:
                break
            if pos < good:
                good = pos
                bad = False
            elif pos == good:
                bad = False
    return (STATUS_EXHAUSTED, depths, tried, executed, domain_fails, -1, -1, np.nan)
