#!/usr/bin/env python3
"""Benchmark the JIT search kernel against the pure-numpy fallback.

Runs the same batch of randomly generated problems through both backends,
checks that they return identical answers, and prints a timing table.

    python benchmarks/bench_backends.py [--problems 40] [--max-steps 2]
"""

from __future__ import annotations

import argparse
import random
import sys
import time

from geoprog.executor import execute_program
from geoprog.synthesizer import SolveConfig, solve

sys.path.insert(0, "tests")
from helpers import random_search_program  # noqa: E402


class Prob:
    def __init__(self, problem_vars, options):
        self.problem_vars = problem_vars
        self.options = options


def build_workload(count, seed=2024):
    """Planted-program problems: three far distractors plus the true value."""
    rng = random.Random(seed)
    problems = []
    for _ in range(count):
        while True:
            pvars = [round(rng.uniform(1.0, 60.0), 2) for _ in range(2)]
            program = random_search_program(rng, 2, rng.choice([1, 2]))
            out = execute_program(program, pvars)
            if out.status == "Value" and abs(out.final) < 1e9:
                break
        value = out.final
        sep = max(1.0, 0.05 * abs(value))
        opts = [value]
        while len(opts) < 4:
            d = value + rng.choice([-1, 1]) * rng.uniform(1.0, 4.0) * sep
            if all(abs(d - o) > sep for o in opts):
                opts.append(d)
        order = list(range(4))
        rng.shuffle(order)
        options = [0.0] * 4
        for i, o in enumerate(order):
            options[o] = opts[i]
        problems.append(Prob(pvars, options))
    return problems


def build_hard(count, seed=7):
    """Unreachable options: every problem exhausts the whole search space."""
    rng = random.Random(seed)
    return [
        Prob(
            [round(rng.uniform(1.0, 60.0), 2) for _ in range(2)],
            [1.1e12, 2.2e12, 3.3e12, 4.4e12],
        )
        for _ in range(count)
    ]


def run_backend(backend, problems, config):
    # warm-up excluded from the timing: the JIT backend compiles on first use
    solve(problems[0], config, backend=backend)
    results = []
    start = time.perf_counter()
    tried = 0
    for p in problems:
        res = solve(p, config, backend=backend)
        tried += res.programs_tried
        results.append(
            (res.stop_reason, res.outcome.chosen_option, str(res.outcome.chosen_program))
        )
    elapsed = time.perf_counter() - start
    return elapsed, tried, results


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--problems", type=int, default=40)
    parser.add_argument("--hard", type=int, default=4,
                        help="problems with unreachable options (full exhaustion)")
    parser.add_argument("--max-steps", type=int, default=2)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    problems = build_workload(args.problems, args.seed) + build_hard(args.hard)
    config = SolveConfig(max_steps=args.max_steps, beam_size=10**9)

    rows = []
    outputs = {}
    for backend in ("numba", "numpy"):
        try:
            elapsed, tried, results = run_backend(backend, problems, config)
        except ImportError as exc:
            print(f"{backend}: unavailable ({exc})", file=sys.stderr)
            continue
        outputs[backend] = results
        rows.append((backend, elapsed, tried))

    print(f"{'backend':>8} {'total s':>10} {'candidates':>12} {'cand/s':>12}")
    for backend, elapsed, tried in rows:
        rate = tried / elapsed if elapsed else float("inf")
        print(f"{backend:>8} {elapsed:>10.3f} {tried:>12} {rate:>12.0f}")
    if len(rows) == 2:
        speedup = rows[1][1] / rows[0][1]
        print(f"speedup: numba is {speedup:.1f}x faster on this workload")

    if len(outputs) == 2 and outputs["numba"] != outputs["numpy"]:
        print("BACKENDS DISAGREE", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
