"""Deterministic autopoietic automata: simulator, codec and compilers."""

from .model import (
    Automaton,
    BadDirection,
    CodeError,
    DecodeError,
    DuplicateKey,
    EMPTY_AUTOMATON,
    Rule,
    RuleFromSplitState,
    TruncatedCode,
    TrailingBits,
    ValidationError,
    complexity_index,
    decode,
    encode,
    validate,
)
from .streams import ALL_ZEROS, Stream, literal, parse_stream, periodic
from .machine import (
    LineageTrace,
    MachineConfig,
    OffspringInvalid,
    initial_config,
    run_lineage,
    run_tree,
    split,
    step,
)

__all__ = [
    "Automaton",
    "Rule",
    "validate",
    "encode",
    "decode",
    "complexity_index",
    "EMPTY_AUTOMATON",
    "CodeError",
    "DecodeError",
    "TruncatedCode",
    "TrailingBits",
    "ValidationError",
    "DuplicateKey",
    "BadDirection",
    "RuleFromSplitState",
    "Stream",
    "ALL_ZEROS",
    "literal",
    "periodic",
    "parse_stream",
    "MachineConfig",
    "OffspringInvalid",
    "LineageTrace",
    "initial_config",
    "step",
    "split",
    "run_lineage",
    "run_tree",
]
