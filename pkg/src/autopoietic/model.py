"""Core model: rules, automata, and the binary code-tape format.

An autopoietic automaton is a finite-state machine whose read-only input
tape holds a binary description of its own transition function.  It runs
in one of two modes, determined by the mode of its current control state:

* transducer mode (``T`` states): one input-stream symbol is consumed per
  step and at most one symbol is emitted to the output stream; the tapes
  are untouched.
* reproducing mode (``R`` states): the machine reads its input tape like
  a Turing machine head and appends symbols to a one-way output tape; the
  streams are untouched.

Entering state ``R0`` splits the machine into a replica and an offspring
whose input tape is the output tape written so far (see ``machine``).

Code tape format
----------------
``unary(n)`` is ``'1' * n + '0'``.  A code is a sequence of rules, each a
concatenation of seven self-delimiting fields::

    mode(current) unary(current.index) unary(observed)
    mode(target)  unary(target.index)  written  direction

* ``mode``: ``unary(0)`` for T, ``unary(1)`` for R.
* ``written``: ``unary(0)`` for "write nothing", ``unary(j + 1)`` for
  symbol ``j``.
* ``direction``: ``unary(0)`` stay, ``unary(1)`` left, ``unary(2)`` right.

End of code is end of bits; a code ending mid-field is malformed.  The
format has no header, so rules may appear in any order and an empty bit
string is the valid empty automaton.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional

TRANSDUCER = "T"
REPRODUCING = "R"

#: The start state: every machine begins here after birth.
START = (TRANSDUCER, 0)
#: Entering this state triggers the split.
SPLIT = (REPRODUCING, 0)

#: Symbol index observed at the one readable cell past the end of the tape.
BLANK = 2

STAY = "S"
LEFT = "L"
RIGHT = "R"

_DIR_CODE = {STAY: 0, LEFT: 1, RIGHT: 2}
_DIR_FROM_CODE = {0: STAY, 1: LEFT, 2: RIGHT}
_MOVE = {STAY: 0, LEFT: -1, RIGHT: 1}


class CodeError(ValueError):
    """Base for all model-level failures."""


class DecodeError(CodeError):
    """The bit string is not a proper encoding."""


class TruncatedCode(DecodeError):
    """Bits ran out in the middle of a field."""


class TrailingBits(DecodeError):
    """A container announced more bits than the payload holds.

    The rule grammar itself consumes every bit, so plain ``decode`` never
    raises this; it guards the packed file format (see ``cli``).
    """


class ValidationError(CodeError):
    """A parsed rule set violates an automaton invariant."""


class DuplicateKey(ValidationError):
    def __init__(self, index: int, key):
        super().__init__(f"rule {index}: second action for key {key}")
        self.index = index
        self.key = key


class BadDirection(ValidationError):
    def __init__(self, index: int):
        super().__init__(f"rule {index}: transducer rules must stay")
        self.index = index


class RuleFromSplitState(ValidationError):
    def __init__(self, index: int):
        super().__init__(f"rule {index}: R0 has no outgoing behaviour")
        self.index = index


@dataclass(frozen=True)
class Rule:
    """One transition: the atom of the code format.

    ``written is None`` means "emit/write nothing" and is legal in both
    modes.  ``direction`` is meaningful in reproducing mode only;
    transducer rules must carry ``'S'``.
    """

    current: tuple[str, int]
    observed: int
    target: tuple[str, int]
    written: Optional[int]
    direction: str

    def key(self) -> tuple[tuple[str, int], int]:
        return (self.current, self.observed)


def unary(n: int) -> str:
    return "1" * n + "0"


def _mode_field(mode: str) -> str:
    return unary(0) if mode == TRANSDUCER else unary(1)


def encode_rule(rule: Rule) -> str:
    written = unary(0) if rule.written is None else unary(rule.written + 1)
    return "".join(
        (
            _mode_field(rule.current[0]),
            unary(rule.current[1]),
            unary(rule.observed),
            _mode_field(rule.target[0]),
            unary(rule.target[1]),
            written,
            unary(_DIR_CODE[rule.direction]),
        )
    )


def encode(automaton: "Automaton") -> str:
    """Serialize, preserving rule order bit for bit."""
    return "".join(encode_rule(r) for r in automaton.rules)


class _BitReader:
    __slots__ = ("bits", "pos")

    def __init__(self, bits: str):
        self.bits = bits
        self.pos = 0

    def eof(self) -> bool:
        return self.pos >= len(self.bits)

    def take_unary(self) -> int:
        bits = self.bits
        pos = self.pos
        n = 0
        while True:
            if pos >= len(bits):
                raise TruncatedCode(f"bit string ends inside a field at {self.pos}")
            if bits[pos] == "0":
                self.pos = pos + 1
                return n
            n += 1
            pos += 1


def _read_mode(reader: _BitReader) -> str:
    m = reader.take_unary()
    if m > 1:
        raise DecodeError(f"mode field out of range: {m}")
    return TRANSDUCER if m == 0 else REPRODUCING


def _read_rule(reader: _BitReader) -> Rule:
    cur_mode = _read_mode(reader)
    cur_idx = reader.take_unary()
    observed = reader.take_unary()
    tgt_mode = _read_mode(reader)
    tgt_idx = reader.take_unary()
    wfield = reader.take_unary()
    dfield = reader.take_unary()
    if dfield not in _DIR_FROM_CODE:
        raise DecodeError(f"direction field out of range: {dfield}")
    return Rule(
        current=(cur_mode, cur_idx),
        observed=observed,
        target=(tgt_mode, tgt_idx),
        written=None if wfield == 0 else wfield - 1,
        direction=_DIR_FROM_CODE[dfield],
    )


def parse_rules(bits: str) -> tuple[Rule, ...]:
    """Parse a code tape into rules without validating the rule set."""
    if set(bits) - {"0", "1"}:
        raise DecodeError("code tapes are binary")
    reader = _BitReader(bits)
    rules = []
    while not reader.eof():
        rules.append(_read_rule(reader))
    return tuple(rules)


def decode(bits: str) -> "Automaton":
    """Parse and validate; inverse of ``encode`` on its image."""
    return validate(parse_rules(bits))


def validate(rules: Iterable[Rule]) -> "Automaton":
    """Check the three automaton invariants and compute the bounds.

    Determinism is functional: a repeated rule that is identical in all
    five components is kept as a distinct sequence entry, only a second
    *action* for the same (current, observed) key is rejected.
    """
    rules = tuple(rules)
    seen: dict[tuple, Rule] = {}
    max_state = -1
    max_symbol = -1
    for i, rule in enumerate(rules):
        if rule.current == SPLIT:
            raise RuleFromSplitState(i)
        if rule.current[0] == TRANSDUCER and rule.direction != STAY:
            raise BadDirection(i)
        k = rule.key()
        prior = seen.get(k)
        if prior is not None and prior != rule:
            raise DuplicateKey(i, k)
        seen[k] = rule
        max_state = max(max_state, rule.current[1], rule.target[1])
        max_symbol = max(max_symbol, rule.observed)
        if rule.written is not None:
            max_symbol = max(max_symbol, rule.written)
    return Automaton(
        rules=rules,
        state_bound=max_state + 1,
        alphabet_bound=max_symbol + 1,
    )


@dataclass(frozen=True)
class Automaton:
    """A validated rule set.  Construct through ``validate`` or ``decode``."""

    rules: tuple[Rule, ...]
    state_bound: int
    alphabet_bound: int

    @cached_property
    def table(self) -> dict[int, tuple[int, int, int, int]]:
        """Packed transition table for the interpreter.

        Key ``(index * 2 + mode) * span + observed`` with mode T=0, R=1;
        value ``(target_mode, target_index, written, move)`` with
        ``written == -1`` for "nothing" and move in ``{-1, 0, 1}``.
        """
        span = self.obs_span
        table = {}
        for rule in self.rules:
            cm = 0 if rule.current[0] == TRANSDUCER else 1
            tm = 0 if rule.target[0] == TRANSDUCER else 1
            key = (rule.current[1] * 2 + cm) * span + rule.observed
            table[key] = (
                tm,
                rule.target[1],
                -1 if rule.written is None else rule.written,
                _MOVE[rule.direction],
            )
        return table

    @cached_property
    def obs_span(self) -> int:
        # Blank (2) must always be addressable in reproducing mode.
        return max(self.alphabet_bound, BLANK + 1)

    @cached_property
    def dense_table(self):
        """``table`` as a flat list when small enough, else the dict.

        List indexing beats dict lookup in the interpreter loop; fall
        back to the dict for automata with huge sparse index spaces.
        """
        size = (self.state_bound * 2 + 2) * self.obs_span
        if size > 1 << 20:
            return None
        flat = [None] * size
        for key, value in self.table.items():
            flat[key] = value
        return flat

    def code(self) -> str:
        return encode(self)


EMPTY_AUTOMATON = validate(())


def complexity_index(automaton: Automaton) -> int:
    """Smallest i bounding the rule count and every state/symbol index."""
    i = len(automaton.rules)
    for rule in automaton.rules:
        i = max(i, rule.current[1], rule.target[1], rule.observed)
        if rule.written is not None:
            i = max(i, rule.written)
    return i


def random_automaton(
    rng: random.Random,
    max_rules: int = 16,
    max_state: int = 8,
    max_symbol: int = 8,
) -> Automaton:
    """Uniform-ish valid automaton, for fuzzing and round-trip checks."""
    n = rng.randint(0, max_rules)
    rules = []
    used = {}
    for _ in range(n):
        for _attempt in range(8):
            mode = rng.choice((TRANSDUCER, REPRODUCING))
            idx = rng.randint(0 if mode == TRANSDUCER else 1, max_state)
            observed = rng.randint(0, max_symbol)
            key = ((mode, idx), observed)
            if key not in used:
                break
        else:
            continue
        direction = STAY if mode == TRANSDUCER else rng.choice((STAY, LEFT, RIGHT))
        rule = Rule(
            current=(mode, idx),
            observed=observed,
            target=(
                rng.choice((TRANSDUCER, REPRODUCING)),
                rng.randint(0, max_state),
            ),
            written=rng.choice((None, rng.randint(0, max_symbol))),
            direction=direction,
        )
        used[key] = rule
        rules.append(rule)
    return validate(rules)
