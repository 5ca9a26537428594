"""geoprog: an executable program language for multiple-choice geometry
problems, with a validated executor, beam answer selection, a brute-force
solver, dataset tooling and an evaluation harness."""

from .ops import (
    CONSTANT_NAMES,
    CONSTANTS,
    OPERATIONS,
    OPERATIONS_BY_NAME,
    OperationDef,
)
from .program import (
    MAX_PROGRAM_STEPS,
    IssueKind,
    ParseError,
    Program,
    Step,
    Token,
    TokenKind,
    ValidationIssue,
    ValidationReport,
    parse_program,
    serialize_program,
    token_vocabulary,
    validate,
    vocabulary_key,
)
from .executor import (
    BeamAttempt,
    BeamOutcome,
    DomainError,
    ExecutionOutcome,
    MatchPolicy,
    StepError,
    execute_beam,
    execute_program,
    execute_step,
    match_option,
)
from .synthesizer import (
    SolveConfig,
    SolveResult,
    canonicalize,
    enumerate_programs,
    solve,
)
from .dataset import (
    AnnotationFailure,
    AnnotationReport,
    DatasetError,
    Problem,
    Stats,
    dataset_stats,
    fixture_corpus_path,
    load_fixture_corpus,
    load_problems,
    verify_annotations,
)
from .harness import (
    CellMetrics,
    ExternalFileGenerator,
    Metrics,
    SynthesizerGenerator,
    evaluate,
    evaluate_detailed,
    export_report,
    format_metrics_table,
    metrics_from_report,
)
from .backend import backend_name, get_backend

__version__ = "0.1.0"

__all__ = [
    "AnnotationFailure",
    "AnnotationReport",
    "BeamAttempt",
    "BeamOutcome",
    "CellMetrics",
    "CONSTANT_NAMES",
    "CONSTANTS",
    "DatasetError",
    "DomainError",
    "ExecutionOutcome",
    "ExternalFileGenerator",
    "IssueKind",
    "MatchPolicy",
    "MAX_PROGRAM_STEPS",
    "Metrics",
    "OPERATIONS",
    "OPERATIONS_BY_NAME",
    "OperationDef",
    "ParseError",
    "Problem",
    "Program",
    "SolveConfig",
    "SolveResult",
    "Stats",
    "Step",
    "StepError",
    "SynthesizerGenerator",
    "Token",
    "TokenKind",
    "ValidationIssue",
    "ValidationReport",
    "backend_name",
    "canonicalize",
    "dataset_stats",
    "enumerate_programs",
    "evaluate",
    "evaluate_detailed",
    "execute_beam",
    "execute_program",
    "execute_step",
    "export_report",
    "fixture_corpus_path",
    "format_metrics_table",
    "get_backend",
    "load_fixture_corpus",
    "load_problems",
    "match_option",
    "metrics_from_report",
    "parse_program",
    "serialize_program",
    "solve",
    "token_vocabulary",
    "validate",
    "verify_annotations",
    "vocabulary_key",
]
