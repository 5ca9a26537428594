"""Operation and constant tables for the geometry program language.

This table is the single source of truth: the parser, the executor and the
search backends all key off the order and arities defined here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

BASIC = "Basic"
ARITHMETIC = "Arithmetic"
TRIGONOMETRIC = "Trigonometric"
THEOREM_FORMULA = "TheoremFormula"


@dataclass(frozen=True)
class OperationDef:
    """One entry of the fixed operation table."""

    name: str
    arity: int
    category: str


OPERATIONS: tuple[OperationDef, ...] = (
    OperationDef("Equal", 1, BASIC),
    OperationDef("Double", 1, BASIC),
    OperationDef("Half", 1, BASIC),
    OperationDef("Add", 2, ARITHMETIC),
    OperationDef("Minus", 2, ARITHMETIC),
    OperationDef("Multiply", 2, ARITHMETIC),
    OperationDef("Divide", 2, ARITHMETIC),
    OperationDef("Sin", 1, TRIGONOMETRIC),
    OperationDef("Cos", 1, TRIGONOMETRIC),
    OperationDef("Tan", 1, TRIGONOMETRIC),
    OperationDef("ArcSin", 1, TRIGONOMETRIC),
    OperationDef("ArcCos", 1, TRIGONOMETRIC),
    OperationDef("PythagoreanAdd", 2, THEOREM_FORMULA),
    OperationDef("PythagoreanMinus", 2, THEOREM_FORMULA),
    OperationDef("Proportion", 3, THEOREM_FORMULA),
    OperationDef("CircleArea", 1, THEOREM_FORMULA),
    OperationDef("CirclePerimeter", 1, THEOREM_FORMULA),
    OperationDef("ConeArea", 2, THEOREM_FORMULA),
)

OPERATIONS_BY_NAME: dict[str, OperationDef] = {op.name: op for op in OPERATIONS}
OPERATION_INDEX: dict[str, int] = {op.name: i for i, op in enumerate(OPERATIONS)}

# Angle-flavoured degree constants plus pi and the golden-section ratio.
CONSTANTS: dict[str, float] = {
    "C_30": 30.0,
    "C_60": 60.0,
    "C_90": 90.0,
    "C_180": 180.0,
    "C_360": 360.0,
    "C_PI": math.pi,
    "C_0618": 0.618,
}

CONSTANT_NAMES: tuple[str, ...] = tuple(CONSTANTS)
CONSTANT_INDEX: dict[str, int] = {name: i for i, name in enumerate(CONSTANT_NAMES)}

# Argument order is irrelevant for these; canonical form sorts their arguments.
COMMUTATIVE_OPERATIONS = frozenset({"Add", "Multiply", "PythagoreanAdd"})
