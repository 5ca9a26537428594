"""Pure-numpy fallback search, selected with GEOPROG_BACKEND=numpy.

Must stay candidate-for-candidate equivalent to the JIT kernel: same
enumeration order, same domain rules, and identical tried/executed counters,
including budget cuts that land inside a failing prefix's subtree.
"""

from __future__ import annotations

import numpy as np

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


def _eval_block(rows, pool):
    """Vectorized step evaluation over rows sharing one pool state.

    Returns (values, valid); domain violations are nan/invalid. Rows need not
    be sorted, only grouped in runs of equal op ids (tables guarantee that).
    """
    m = rows.shape[0]
    vals = np.empty(m, dtype=np.float64)
    a = pool[rows[:, 1]]
    b = pool[rows[:, 2]]
    c = pool[rows[:, 3]]
    ops = rows[:, 0]
    starts = np.flatnonzero(np.r_[True, np.diff(ops) != 0])
    ends = np.r_[starts[1:], m]
    with np.errstate(all="ignore"):
        for s, e in zip(starts, ends):
            op = int(ops[s])
            sl = slice(s, e)
            aa = a[sl]
            bb = b[sl]
            cc = c[sl]
            if op == OP_EQUAL:
                v = aa.copy()
            elif op == OP_DOUBLE:
                v = 2.0 * aa
            elif op == OP_HALF:
                v = aa / 2.0
            elif op == OP_ADD:
                v = aa + bb
            elif op == OP_MINUS:
                v = aa - bb
            elif op == OP_MULTIPLY:
                v = aa * bb
            elif op == OP_DIVIDE:
                v = aa / np.where(np.abs(bb) < DIVISION_EPSILON, np.nan, bb)
            elif op == OP_SIN:
                v = np.sin(np.radians(aa))
            elif op == OP_COS:
                v = np.cos(np.radians(aa))
            elif op == OP_TAN:
                mm = np.mod(aa - 90.0, 180.0)
                pole = np.minimum(mm, 180.0 - mm) <= TAN_POLE_EPSILON_DEGREES
                v = np.tan(np.radians(np.where(pole, np.nan, aa)))
            elif op == OP_ARCSIN:
                v = np.degrees(np.arcsin(np.where(np.abs(aa) > 1.0, np.nan, aa)))
            elif op == OP_ARCCOS:
                v = np.degrees(np.arccos(np.where(np.abs(aa) > 1.0, np.nan, aa)))
            elif op == OP_PYTH_ADD:
                v = np.hypot(aa, bb)
            elif op == OP_PYTH_MINUS:
                v = np.sqrt(
                    np.where(np.abs(aa) < np.abs(bb), np.nan, (aa - bb) * (aa + bb))
                )
            elif op == OP_PROPORTION:
                v = aa * bb / np.where(np.abs(cc) < DIVISION_EPSILON, np.nan, cc)
            elif op == OP_CIRCLE_AREA:
                v = np.pi * aa * aa
            elif op == OP_CIRCLE_PERIM:
                v = 2.0 * np.pi * aa
            else:
                v = np.pi * aa * bb  # ConeArea
            vals[sl] = v
    valid = np.isfinite(vals)
    return vals, valid


def eval_encoded(prog, pool, base):
    """Execute one encoded program in-place; returns (ok, value)."""
    value = np.nan
    for k in range(prog.shape[0]):
        row = np.empty((1, 5), dtype=np.int32)
        row[0, :4] = prog[k]
        row[0, 4] = 0
        vals, valid = _eval_block(row, pool)
        if not valid[0]:
            return False, np.nan
        value = float(vals[0])
        pool[base + k] = value
    return True, value


class _Budget(Exception):
    pass


class _Beam(Exception):
    pass


class _Answered(Exception):
    def __init__(self, option, rank, value):
        self.option = option
        self.rank = rank
        self.value = value


class _DepthScan:
    """One depth of the search; mirrors the sequential kernel's counters."""

    def __init__(self, d, rows, rng, pool, base, options, tols, budget, beam_cap,
                 cross_check, out_rows, state):
        self.d = d
        self.rows = rows
        self.rng = rng
        self.pool = pool
        self.base = base
        self.options = options
        self.tols = tols
        self.budget = budget
        self.beam_cap = beam_cap
        self.out_rows = out_rows
        self.st = state
        self.full_mask = (1 << max(0, d - 2)) - 1
        if not cross_check:
            self.full_mask = 0
        self.levels = [rows[rng[j, 0]: rng[j, 1]] for j in range(d)]
        final = self.levels[d - 1]
        self.variants = {}
        for req in range(self.full_mask + 1):
            self.variants[req] = np.flatnonzero(
                (final[:, 4] & req) == req
            ).astype(np.int64)
        self._size_cache: dict[tuple[int, int], int] = {}

    def subtree_size(self, pos, have):
        """Eligible candidate count for levels pos..d-1 given consumed V bits."""
        key = (pos, have & self.full_mask)
        cached = self._size_cache.get(key)
        if cached is not None:
            return cached
        req = self.full_mask & ~have
        if pos == self.d - 1:
            size = int(len(self.variants[req & self.full_mask]))
        else:
            classes = self.levels[pos][:, 4] & self.full_mask
            counts = np.bincount(classes, minlength=self.full_mask + 1)
            size = 0
            for cls in range(self.full_mask + 1):
                n = int(counts[cls])
                if n:
                    size += n * self.subtree_size(pos + 1, have | cls)
        self._size_cache[key] = size
        return size

    def consume_failed(self, pos, have):
        """Count a failing prefix's whole subtree as tried domain failures."""
        st = self.st
        size = self.subtree_size(pos, have)
        remaining = self.budget - st["tried"]
        if remaining >= size:
            st["tried"] += size
            st["dom"] += size
            return
        # the budget boundary lands inside this subtree
        if pos == self.d - 1:
            st["tried"] += remaining
            st["dom"] += remaining
            raise _Budget()
        level = self.levels[pos]
        for li in range(len(level)):
            nhave = have | int(level[li, 4]) & self.full_mask
            s = self.subtree_size(pos + 1, nhave)
            if self.budget - st["tried"] >= s:
                st["tried"] += s
                st["dom"] += s
            else:
                self.consume_failed(pos + 1, nhave)
        raise _Budget()  # unreachable: the cut is inside some child

    def scan_final(self, have):
        st = self.st
        d = self.d
        req = self.full_mask & ~have
        variant = self.variants[req & self.full_mask]
        n = len(variant)
        if n == 0:
            return
        remaining = self.budget - st["tried"]
        cut = remaining < n
        if cut:
            if remaining == 0:
                raise _Budget()
            variant = variant[:remaining]
            n = remaining
        block = self.levels[d - 1][variant]
        vals, valid = _eval_block(block, self.pool)
        cum = st["executed"] + np.cumsum(valid)
        within = (
            np.abs(vals[:, None] - self.options[None, :]) <= self.tols[None, :]
        ) & valid[:, None]
        midx = np.flatnonzero(within.any(axis=1))
        beam_hits = np.flatnonzero(valid & (cum >= self.beam_cap))
        stop = int(beam_hits[0]) if len(beam_hits) else -1
        if len(midx) and (stop < 0 or midx[0] <= stop):
            i = int(midx[0])
            st["tried"] += i + 1
            st["dom"] += int(np.count_nonzero(~valid[:i]))
            st["executed"] = int(cum[i])
            deltas = np.abs(float(vals[i]) - self.options)
            cand = np.flatnonzero(within[i])
            best = int(cand[np.argmin(deltas[cand])])
            self.out_rows[d - 1] = int(self.rng[d - 1, 0]) + int(variant[i])
            raise _Answered(best, st["executed"] - 1, float(vals[i]))
        if stop >= 0:
            st["tried"] += stop + 1
            st["dom"] += int(np.count_nonzero(~valid[: stop + 1]))
            st["executed"] = int(cum[stop])
            raise _Beam()
        st["tried"] += n
        st["dom"] += int(np.count_nonzero(~valid))
        st["executed"] = int(cum[-1]) if n else st["executed"]
        if cut:
            raise _Budget()

    def descend(self, pos, have):
        d = self.d
        level = self.levels[pos]
        lv_base = int(self.rng[pos, 0])
        for li in range(len(level)):
            row = level[li]
            nhave = have | (int(row[4]) & self.full_mask)
            vals, valid = _eval_block(row.reshape(1, -1), self.pool)
            if not valid[0]:
                self.consume_failed(pos + 1, nhave)
                continue
            self.pool[self.base + pos] = float(vals[0])
            try:
                if pos == d - 2:
                    self.scan_final(nhave)
                else:
                    self.descend(pos + 1, nhave)
            except _Answered:
                self.out_rows[pos] = lv_base + li
                raise

    def run(self):
        if self.d == 1:
            self.scan_final(0)
        else:
            self.descend(0, 0)


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
    """Same contract and status codes as the JIT kernel."""
    options = np.asarray(options, dtype=np.float64)
    tols = np.maximum(abs_tol, rel_tol * np.abs(options))
    st = {"tried": 0, "executed": 0, "dom": 0}
    for d in range(1, depths + 1):
        rng = ranges[d - 1]
        if any(rng[j, 1] <= rng[j, 0] for j in range(d)):
            continue
        scan = _DepthScan(
            d, rows, rng, pool, base, options, tols, budget, beam_cap,
            bool(cross_check), out_rows, st,
        )
        try:
            scan.run()
        except _Answered as ans:
            return (
                STATUS_ANSWERED, d, st["tried"], st["executed"], st["dom"],
                ans.option, ans.rank, ans.value,
            )
        except _Beam:
            return (STATUS_BEAM, d, st["tried"], st["executed"], st["dom"], -1, -1, np.nan)
        except _Budget:
            return (STATUS_BUDGET, d, st["tried"], st["executed"], st["dom"], -1, -1, np.nan)
    return (STATUS_EXHAUSTED, depths, st["tried"], st["executed"], st["dom"], -1, -1, np.nan)
