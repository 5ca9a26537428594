"""Evaluation harness: run a candidate generator over problems and report
answer accuracy and no-result rate per beam size and problem type."""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import islice
from pathlib import Path
from typing import Iterable, Sequence

from .dataset import PROBLEM_TYPES, Problem
from .executor import ANSWERED, MatchPolicy, execute_beam
from .program import Program
from .synthesizer import SolveConfig, enumerate_programs

log = logging.getLogger(__name__)

REPORT_SCHEMA_VERSION = 1
CELL_KEYS = ("total",) + PROBLEM_TYPES


def worker_threads() -> int:
    """Worker cap from GEOPROG_THREADS; defaults to 1 (fully sequential)."""
    raw = os.environ.get("GEOPROG_THREADS", "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        log.warning("ignoring invalid GEOPROG_THREADS=%r", raw)
        return 1


@dataclass(frozen=True)
class CellMetrics:
    count: int
    accuracy: float
    no_result: float
    wrong: float

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "accuracy": self.accuracy,
            "no_result": self.no_result,
            "wrong": self.wrong,
        }

    @staticmethod
    def from_dict(data: dict) -> "CellMetrics":
        return CellMetrics(
            data["count"], data["accuracy"], data["no_result"], data["wrong"]
        )


@dataclass(frozen=True)
class Metrics:
    beam_sizes: tuple[int, ...]
    cells: dict  # beam size -> cell key -> CellMetrics

    def cell(self, beam_size: int, key: str = "total") -> CellMetrics:
        return self.cells[beam_size][key]

    def to_dict(self) -> dict:
        return {
            "beam_sizes": list(self.beam_sizes),
            "cells": {
                str(bs): {k: c.to_dict() for k, c in row.items()}
                for bs, row in self.cells.items()
            },
        }

    @staticmethod
    def from_dict(data: dict) -> "Metrics":
        return Metrics(
            beam_sizes=tuple(data["beam_sizes"]),
            cells={
                int(bs): {k: CellMetrics.from_dict(c) for k, c in row.items()}
                for bs, row in data["cells"].items()
            },
        )


class SynthesizerGenerator:
    """Candidates in raw enumeration order, like a decoder's top-N beam."""

    name = "synthesizer"

    def __init__(self, config: SolveConfig | None = None):
        self.config = config or SolveConfig()

    def candidates(self, problem: Problem, limit: int) -> list[Program]:
        stream = enumerate_programs(len(problem.problem_vars), self.config.max_steps)
        return list(islice(stream, limit))


class ExternalFileGenerator:
    """Pre-generated candidate lists: JSON mapping problem id -> program texts.

    This is the seam where an external decoder plugs in; candidate strings
    that fail to parse count as grammar failures during beam execution.
    """

    name = "external"

    def __init__(self, source):
        if isinstance(source, (str, Path)):
            with open(source, "r", encoding="utf-8") as fh:
                mapping = json.load(fh)
        else:
            mapping = dict(source)
        if not isinstance(mapping, dict):
            raise ValueError("candidate file must map problem ids to lists")
        for key, value in mapping.items():
            if not isinstance(value, list) or any(
                not isinstance(t, str) for t in value
            ):
                raise ValueError(f"candidates for {key!r} must be a list of strings")
        self.mapping = mapping

    def candidates(self, problem: Problem, limit: int) -> list[str]:
        cands = self.mapping.get(problem.id)
        if cands is None:
            log.warning("no candidates for problem %r; scoring NoResult", problem.id)
            return []
        return cands[:limit]


@dataclass(frozen=True)
class ProblemEvaluation:
    problem_id: str
    problem_type: str
    answer_index: int
    outcomes: dict  # beam size -> BeamOutcome

    def to_dict(self) -> dict:
        return {
            "id": self.problem_id,
            "type": self.problem_type,
            "answer": self.answer_index,
            "outcomes": {
                str(bs): out.to_dict() for bs, out in self.outcomes.items()
            },
        }


def _evaluate_problem(problem, gen, beam_sizes, policy) -> ProblemEvaluation:
    cands = list(gen.candidates(problem, max(beam_sizes)))
    outcomes = {}
    for bs in beam_sizes:
        outcomes[bs] = execute_beam(
            cands[:bs], problem.problem_vars, problem.options, policy
        )
    return ProblemEvaluation(problem.id, problem.problem_type, problem.answer_index, outcomes)


def evaluate_detailed(
    gen,
    problems: Sequence[Problem],
    beam_sizes: Sequence[int],
    policy: MatchPolicy = MatchPolicy(),
    *,
    threads: int | None = None,
) -> tuple[Metrics, list[ProblemEvaluation]]:
    """Metrics plus per-problem outcomes.

    Each problem's candidate list is produced once and re-used as a prefix
    for every beam size, which makes no-result monotone in beam size by
    construction.
    """
    beam_sizes = list(beam_sizes)
    if not beam_sizes or any(b < 1 for b in beam_sizes):
        raise ValueError("beam_sizes must be non-empty positive counts")
    if sorted(beam_sizes) != beam_sizes:
        raise ValueError("beam_sizes must be ascending")
    threads = worker_threads() if threads is None else max(1, threads)
    if threads > 1 and len(problems) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            evaluations = list(
                pool.map(
                    lambda p: _evaluate_problem(p, gen, beam_sizes, policy), problems
                )
            )
    else:
        evaluations = [
            _evaluate_problem(p, gen, beam_sizes, policy) for p in problems
        ]
    cells = {}
    for bs in beam_sizes:
        row = {}
        for key in CELL_KEYS:
            subset = [
                e for e in evaluations if key == "total" or e.problem_type == key
            ]
            n = len(subset)
            correct = wrong = no_result = 0
            for e in subset:
                out = e.outcomes[bs]
                if out.status != ANSWERED:
                    no_result += 1
                elif out.chosen_option == e.answer_index:
                    correct += 1
                else:
                    wrong += 1
            row[key] = CellMetrics(
                count=n,
                accuracy=correct / n if n else 0.0,
                no_result=no_result / n if n else 0.0,
                wrong=wrong / n if n else 0.0,
            )
        cells[bs] = row
    return Metrics(tuple(beam_sizes), cells), evaluations


def evaluate(
    gen,
    problems: Sequence[Problem],
    beam_sizes: Sequence[int],
    policy: MatchPolicy = MatchPolicy(),
    *,
    threads: int | None = None,
) -> Metrics:
    metrics, _ = evaluate_detailed(gen, problems, beam_sizes, policy, threads=threads)
    return metrics


def format_metrics_table(metrics: Metrics) -> str:
    """Fixed-width table: one row per beam size, Acc/NR per problem type."""
    header = f"{'BS':>6} " + " ".join(
        f"{key + ' Acc%':>12} {key + ' NR%':>12}" for key in CELL_KEYS
    )
    lines = [header, "-" * len(header)]
    for bs in metrics.beam_sizes:
        parts = [f"{bs:>6}"]
        for key in CELL_KEYS:
            cell = metrics.cells[bs][key]
            parts.append(f"{cell.accuracy * 100:>12.2f} {cell.no_result * 100:>12.2f}")
        lines.append(" ".join(parts))
    return "\n".join(lines)


def export_report(
    metrics: Metrics,
    path: str | Path,
    *,
    generator_name: str = "",
    policy: MatchPolicy | None = None,
    details: Iterable[ProblemEvaluation] | None = None,
) -> dict:
    """Write the versioned JSON report; returns the report dict."""
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "generator": generator_name,
        "policy": None
        if policy is None
        else {"abs_tol": policy.abs_tol, "rel_tol": policy.rel_tol},
        "metrics": metrics.to_dict(),
    }
    if details is not None:
        report["problems"] = [e.to_dict() for e in details]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return report


def metrics_from_report(report: dict) -> Metrics:
    return Metrics.from_dict(report["metrics"])
