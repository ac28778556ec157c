"""Exact computations of THH, TP, TC^- and TC mod p for p-adic integer rings."""

from .arith import FieldCtx, Fq, WittCtx, WittElement, h90_solve, make_field, make_witt
from .errors import (
    BadConstant,
    ConsistencyViolation,
    ContextMismatch,
    DomainViolation,
    NonPrime,
    NonUnitLeading,
    NotDivisible,
    NotEisenstein,
    PrecisionTooLow,
    ReducibleModulus,
    SpecFormatError,
    TcssError,
    WcapTooSmall,
    ZeroCoefficient,
)
from .localfield import LocalField, compute_d, cyclotomic_spec, grid_fields, parse_field, simple_field

__version__ = "0.1.0"

__all__ = [
    "BadConstant", "ConsistencyViolation", "ContextMismatch", "DomainViolation", "FieldCtx", "Fq",
    "LocalField", "NonPrime", "NonUnitLeading", "NotDivisible", "NotEisenstein", "PrecisionTooLow",
    "ReducibleModulus", "SpecFormatError", "TcssError", "WcapTooSmall", "WittCtx", "WittElement",
    "ZeroCoefficient", "compute_d", "cyclotomic_spec", "grid_fields", "h90_solve", "make_field",
    "make_witt", "parse_field", "simple_field",
]
