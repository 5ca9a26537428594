"""Problem file loading, corpus statistics and gold-annotation verification."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .executor import (
    DOMAIN_ERROR,
    GRAMMAR_ERROR,
    MatchPolicy,
    execute_program,
    match_option,
)
from .program import ParseError, Program, parse_program, serialize_program, validate

log = logging.getLogger(__name__)

PROBLEM_TYPES = ("angle", "length", "other")
SPLITS = ("train", "val", "test")

_REQUIRED_FIELDS = ("id", "text", "vars", "options", "answer", "type", "split")
_KNOWN_FIELDS = _REQUIRED_FIELDS + ("diagram", "program", "knowledge", "explanation")


class DatasetError(ValueError):
    """A problem record violated the schema."""

    def __init__(self, message: str, problem_id: str | None = None, fieldname: str | None = None):
        prefix = f"problem {problem_id!r}" if problem_id else "record"
        where = f"{prefix}, field {fieldname!r}" if fieldname else prefix
        super().__init__(f"{where}: {message}")
        self.problem_id = problem_id
        self.fieldname = fieldname


@dataclass(frozen=True)
class Problem:
    """One multiple-choice problem; the diagram stays an opaque path."""

    id: str
    text: str
    problem_vars: tuple[float, ...]
    options: tuple[float, float, float, float]
    answer_index: int
    problem_type: str
    split: str
    diagram_path: str | None = None
    gold_program: Program | None = None
    knowledge_tags: tuple[str, ...] = ()
    explanation: str | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        data = {
            "id": self.id,
            "text": self.text,
            "diagram": self.diagram_path,
            "vars": list(self.problem_vars),
            "options": list(self.options),
            "answer": self.answer_index,
            "program": None
            if self.gold_program is None
            else serialize_program(self.gold_program),
            "type": self.problem_type,
            "knowledge": list(self.knowledge_tags),
            "explanation": self.explanation,
            "split": self.split,
        }
        data.update(self.extra)
        return data


@dataclass(frozen=True)
class Stats:
    total: int
    per_type: dict
    per_split: dict
    annotated: int
    avg_op: float
    avg_pl: float
    avg_knowledge_tags: float

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "per_type": dict(self.per_type),
            "per_split": dict(self.per_split),
            "annotated": self.annotated,
            "avg_op": self.avg_op,
            "avg_pl": self.avg_pl,
            "avg_knowledge_tags": self.avg_knowledge_tags,
        }


@dataclass(frozen=True)
class AnnotationFailure:
    problem_id: str
    reason: str  # GrammarError | DomainError | ValueMismatch | MissingProgram
    detail: str = ""

    def to_dict(self) -> dict:
        return {"id": self.problem_id, "reason": self.reason, "detail": self.detail}


@dataclass(frozen=True)
class AnnotationReport:
    total_checked: int
    passed: int
    failures: tuple[AnnotationFailure, ...]

    def to_dict(self) -> dict:
        return {
            "total_checked": self.total_checked,
            "passed": self.passed,
            "failures": [f.to_dict() for f in self.failures],
        }


def _require_number(value, problem_id, fieldname):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DatasetError("expected a number", problem_id, fieldname)
    out = float(value)
    if out != out or out in (float("inf"), float("-inf")):
        raise DatasetError("expected a finite number", problem_id, fieldname)
    return out


def _parse_record(record, index) -> Problem:
    if not isinstance(record, dict):
        raise DatasetError(f"record #{index} is not an object")
    problem_id = record.get("id")
    if not isinstance(problem_id, str) or not problem_id:
        raise DatasetError(f"record #{index} needs a string id", fieldname="id")
    for name in _REQUIRED_FIELDS:
        if name not in record:
            raise DatasetError("missing required field", problem_id, name)
    text = record["text"]
    if not isinstance(text, str):
        raise DatasetError("expected a string", problem_id, "text")
    raw_vars = record["vars"]
    if not isinstance(raw_vars, list):
        raise DatasetError("expected a list of numbers", problem_id, "vars")
    problem_vars = tuple(_require_number(v, problem_id, "vars") for v in raw_vars)
    raw_options = record["options"]
    if not isinstance(raw_options, list) or len(raw_options) != 4:
        raise DatasetError("expected exactly 4 numbers", problem_id, "options")
    options = tuple(_require_number(v, problem_id, "options") for v in raw_options)
    answer = record["answer"]
    if isinstance(answer, bool) or not isinstance(answer, int) or not 0 <= answer <= 3:
        raise DatasetError("expected an integer in 0..3", problem_id, "answer")
    problem_type = record["type"]
    if problem_type not in PROBLEM_TYPES:
        raise DatasetError(f"expected one of {PROBLEM_TYPES}", problem_id, "type")
    split = record["split"]
    if split not in SPLITS:
        raise DatasetError(f"expected one of {SPLITS}", problem_id, "split")
    diagram = record.get("diagram")
    if diagram is not None and not isinstance(diagram, str):
        raise DatasetError("expected a string or null", problem_id, "diagram")
    knowledge = record.get("knowledge", [])
    if not isinstance(knowledge, list) or any(not isinstance(k, str) for k in knowledge):
        raise DatasetError("expected a list of strings", problem_id, "knowledge")
    explanation = record.get("explanation")
    if explanation is not None and not isinstance(explanation, str):
        raise DatasetError("expected a string or null", problem_id, "explanation")
    gold = None
    raw_program = record.get("program")
    if raw_program is not None:
        if not isinstance(raw_program, str):
            raise DatasetError("expected a string or null", problem_id, "program")
        try:
            gold = parse_program(raw_program)
        except ParseError as exc:
            raise DatasetError(f"unparseable program: {exc}", problem_id, "program")
        report = validate(gold, len(problem_vars))
        if not report.ok:
            raise DatasetError(
                f"invalid program: {report.issues[0].message}", problem_id, "program"
            )
    extra = {k: v for k, v in record.items() if k not in _KNOWN_FIELDS}
    return Problem(
        id=problem_id,
        text=text,
        problem_vars=problem_vars,
        options=options,  # type: ignore[arg-type]
        answer_index=answer,
        problem_type=problem_type,
        split=split,
        diagram_path=diagram,
        gold_program=gold,
        knowledge_tags=tuple(knowledge),
        explanation=explanation,
        extra=extra,
    )


def _iter_records(path: Path):
    blob = path.read_text(encoding="utf-8")
    stripped = blob.lstrip()
    if not stripped:
        return []
    if stripped.startswith("["):
        data = json.loads(blob)
        if not isinstance(data, list):
            raise DatasetError("top-level JSON value must be an array")
        return data
    # otherwise one JSON object per line
    records = []
    for lineno, line in enumerate(blob.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise DatasetError(f"line {lineno}: invalid JSON ({exc.msg})")
    return records


def load_problems(
    path: str | Path,
    *,
    strict: bool = False,
    errors: list | None = None,
) -> list[Problem]:
    """Load a problem file (JSON array or JSON-lines, auto-detected).

    Strict mode raises on the first bad record. Lenient mode skips bad
    records (a bad optional `program` field only clears that field), logs
    a warning, and appends DatasetError instances to `errors` if given.
    """
    path = Path(path)
    records = _iter_records(path)
    problems: list[Problem] = []
    for index, record in enumerate(records):
        try:
            problems.append(_parse_record(record, index))
        except DatasetError as exc:
            if strict:
                raise
            if exc.fieldname == "program" and isinstance(record, dict):
                salvaged = dict(record)
                salvaged["program"] = None
                try:
                    problems.append(_parse_record(salvaged, index))
                except DatasetError:
                    pass
            log.warning("skipping bad record: %s", exc)
            if errors is not None:
                errors.append(exc)
    return problems


def program_op_count(program: Program) -> int:
    return len(program.steps)


def program_token_count(program: Program) -> int:
    """Program length as token count: one operator plus arity per step."""
    return sum(1 + len(step.args) for step in program.steps)


def dataset_stats(problems: Sequence[Problem]) -> Stats:
    """Counts over all problems; program means over annotated problems only."""
    per_type = {t: 0 for t in PROBLEM_TYPES}
    per_split = {s: 0 for s in SPLITS}
    op_total = 0
    pl_total = 0
    tags_total = 0
    annotated = 0
    for p in problems:
        per_type[p.problem_type] += 1
        per_split[p.split] += 1
        tags_total += len(p.knowledge_tags)
        if p.gold_program is not None:
            annotated += 1
            op_total += program_op_count(p.gold_program)
            pl_total += program_token_count(p.gold_program)
    total = len(problems)
    return Stats(
        total=total,
        per_type=per_type,
        per_split=per_split,
        annotated=annotated,
        avg_op=op_total / annotated if annotated else 0.0,
        avg_pl=pl_total / annotated if annotated else 0.0,
        avg_knowledge_tags=tags_total / total if total else 0.0,
    )


def verify_annotations(
    problems: Iterable[Problem],
    policy: MatchPolicy = MatchPolicy(),
    *,
    strict: bool = False,
) -> AnnotationReport:
    """Execute each gold program and check it selects the gold option.

    Problems without a program are failures only in strict mode; otherwise
    they are not checked at all.
    """
    checked = 0
    passed = 0
    failures: list[AnnotationFailure] = []
    for p in problems:
        if p.gold_program is None:
            if strict:
                checked += 1
                failures.append(AnnotationFailure(p.id, "MissingProgram"))
            continue
        checked += 1
        outcome = execute_program(p.gold_program, p.problem_vars)
        if outcome.status == GRAMMAR_ERROR:
            failures.append(AnnotationFailure(p.id, GRAMMAR_ERROR, outcome.error.reason))
        elif outcome.status == DOMAIN_ERROR:
            failures.append(AnnotationFailure(p.id, DOMAIN_ERROR, outcome.error.reason))
        else:
            idx = match_option(outcome.final, p.options, policy)
            if idx == p.answer_index:
                passed += 1
            else:
                failures.append(
                    AnnotationFailure(
                        p.id,
                        "ValueMismatch",
                        f"value {outcome.final!r} matched option {idx}",
                    )
                )
    return AnnotationReport(checked, passed, tuple(failures))


def fixture_corpus_path() -> Path:
    """Path of the bundled hand-written fixture corpus."""
    return Path(resources.files("geoprog").joinpath("data/fixture_corpus.json"))


def load_fixture_corpus() -> list[Problem]:
    return load_problems(fixture_corpus_path(), strict=True)
