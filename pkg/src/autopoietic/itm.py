"""Interactive Turing machines and the stream-transducer view of lineages.

An interactive TM consumes one stream symbol per step (lock step) and may
emit one symbol per step, while working on a single tape that is
unbounded to the right and blank-initialized.  The transition is a
partial function of (state, stream symbol, tape symbol); an undefined
triple halts the machine.  A step whose move would take the head left of
square 0 applies its write and emission and then halts.

``simulate_lineage_as_tm`` runs a whole lineage the way a fixed-alphabet
stream transducer would: the only unbounded storage is the current code
tape and the output tape under construction, both plain symbol strings
over {0, 1, b}, plus a fixed set of scratch registers.  Every simulated
step is resolved by scanning the stored code for the matching rule, and
emissions leave as unary-encoded bit groups.  Decoding its output stream
must reproduce the plain lineage output exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .model import Automaton, encode
from .streams import Stream

MOVES = {"L": -1, "S": 0, "R": 1}
TM_BLANK = 2


@dataclass(frozen=True)
class InteractiveTM:
    """Single-tape deterministic interactive TM.

    ``transitions`` maps (state, stream_symbol, tape_symbol) to
    (target_state, tape_write, move, emit) with ``emit is None`` for a
    silent step.  States are 0-based ints and 0 is the start state.
    """

    transitions: dict[tuple[int, int, int], tuple[int, int, str, Optional[int]]]
    n_states: int

    def __post_init__(self):
        for (q, _x, t), (q2, t2, mv, _e) in self.transitions.items():
            if not (0 <= q < self.n_states and 0 <= q2 < self.n_states):
                raise ValueError("state index out of range")
            if t not in (0, 1, 2) or t2 not in (0, 1, 2):
                raise ValueError("tape alphabet is {0, 1, b}")
            if mv not in MOVES:
                raise ValueError(f"bad move {mv!r}")


@dataclass(frozen=True)
class ITMRun:
    emitted: tuple[int, ...]
    final_state: int
    tape: tuple[int, ...]
    head: int
    used_squares: int
    steps: int
    halted: bool


def run_itm(m: InteractiveTM, stream: Stream, fuel: int) -> ITMRun:
    """Run at most ``fuel`` lock-steps; halting is data, not an error."""
    tape: list[int] = [TM_BLANK]
    head = 0
    state = 0
    emitted: list[int] = []
    used = 0
    steps = 0
    halted = False
    trans = m.transitions
    while steps < fuel:
        used = max(used, head + 1)
        x = stream.at(steps)
        action = trans.get((state, x, tape[head]))
        if action is None:
            halted = True
            break
        state, write, move, emit = action
        tape[head] = write
        if emit is not None:
            emitted.append(emit)
        steps += 1
        head += MOVES[move]
        if head < 0:
            halted = True
            head = 0
            break
        if head == len(tape):
            tape.append(TM_BLANK)
    return ITMRun(
        emitted=tuple(emitted),
        final_state=state,
        tape=tuple(tape),
        head=head,
        used_squares=used,
        steps=steps,
        halted=halted,
    )


# --- the lineage as a fixed-alphabet stream transducer ----------------------


class _Registers:
    """Fixed-count scratch registers; the count never changes after birth."""

    __slots__ = ("_values",)
    NAMES = (
        "mode",
        "state_index",
        "observed",
        "head",
        "cursor",
        "scan",
        "field_value",
        "rule_mode",
        "rule_index",
        "rule_observed",
        "match",
        "tmp",
    )

    def __init__(self):
        self._values = {name: 0 for name in self.NAMES}

    def __getitem__(self, name: str) -> int:
        return self._values[name]

    def __setitem__(self, name: str, value: int) -> None:
        if name not in self._values:
            raise KeyError(f"unknown register {name}")
        self._values[name] = value

    def names(self) -> tuple[str, ...]:
        return tuple(self._values)


@dataclass
class TMSimResult:
    emitted_bits: str
    steps: int
    generations: int
    register_names: tuple[str, ...]
    stored_lengths: tuple[int, ...]
    stalled: bool


def encode_symbol(symbol: int) -> str:
    """Fixed-alphabet encoding of one symbol: '1' * i followed by '0'."""
    return "1" * symbol + "0"


def decode_symbol_stream(bits: str) -> tuple[int, ...]:
    out = []
    run = 0
    for b in bits:
        if b == "1":
            run += 1
        else:
            out.append(run)
            run = 0
    if run:
        raise ValueError("dangling symbol encoding")
    return tuple(out)


def _take_unary_str(code: str, pos: int) -> tuple[int, int]:
    n = 0
    size = len(code)
    while pos < size and code[pos] == "1":
        n += 1
        pos += 1
    if pos >= size:
        return -1, pos  # ran off the end mid-field
    return n, pos + 1


def simulate_lineage_as_tm(seed: Automaton, stream: Stream, fuel: int) -> TMSimResult:
    """Mirror a lineage with code-on-tape storage and bounded registers.

    Storage discipline: ``code`` (the current automaton's tape) and
    ``out`` (the output tape being written) are symbol strings over
    {'0','1'}; everything else lives in the fixed register file.  Each
    simulated step scans ``code`` rule by rule for the matching 5-tuple,
    so one step costs one pass over the stored code, exactly like the
    single-tape transducer it stands in for.
    """
    regs = _Registers()
    code = encode(seed)
    out: list[str] = []
    emitted: list[str] = []
    stored_lengths = [len(code)]
    generations = 1
    steps = 0
    stalled = False

    def parse_rule(pos: int):
        """Parse one rule at pos; returns (fields, new_pos) or None."""
        fields = []
        for _ in range(7):
            value, pos = _take_unary_str(code, pos)
            if value < 0:
                return None
            fields.append(value)
        return fields, pos

    def code_is_proper() -> bool:
        # Grammar pass with bounded registers: scan rule by rule.
        pos = 0
        while pos < len(code):
            parsed = parse_rule(pos)
            if parsed is None:
                return False
            fields, pos = parsed
            if fields[0] > 1 or fields[3] > 1 or fields[6] > 2:
                return False
            if fields[0] == 1 and fields[1] == 0:
                return False
            if fields[0] == 0 and fields[6] != 0:
                return False
        # Pairwise key check using two positions and no extra storage.
        pos_a = 0
        while pos_a < len(code):
            fields_a, next_a = parse_rule(pos_a)[0], parse_rule(pos_a)[1]
            pos_b = next_a
            while pos_b < len(code):
                fields_b, next_b = parse_rule(pos_b)[0], parse_rule(pos_b)[1]
                if fields_a[:3] == fields_b[:3] and fields_a[3:] != fields_b[3:]:
                    return False
                pos_b = next_b
            pos_a = next_a
        return True

    while steps < fuel:
        # Resolve the current (mode, state, observed) by scanning the code.
        if regs["mode"] == 0:
            regs["observed"] = stream.at(regs["cursor"])
        else:
            regs["observed"] = int(code[regs["head"]]) if regs["head"] < len(code) else TM_BLANK
        regs["match"] = 0
        regs["scan"] = 0
        action = None
        while regs["scan"] < len(code):
            parsed = parse_rule(regs["scan"])
            fields, nxt = parsed
            if (
                fields[0] == regs["mode"]
                and fields[1] == regs["state_index"]
                and fields[2] == regs["observed"]
            ):
                regs["match"] = 1
                action = fields
                break
            regs["scan"] = nxt
        if action is None:
            stalled = True
            break
        steps += 1
        if regs["mode"] == 0:
            regs["cursor"] += 1
            if action[5] > 0:
                emitted.append(encode_symbol(action[5] - 1))
        else:
            if action[5] > 0:
                out.append("1" if action[5] - 1 == 1 else "0" if action[5] - 1 == 0 else "x")
            move = (0, -1, 1)[action[6]]
            regs["head"] += move
        regs["mode"] = action[3]
        regs["state_index"] = action[4]
        if regs["mode"] == 1 and regs["state_index"] == 0:
            # Split: adopt the output tape as the new stored code.
            if "x" in out:
                stalled = True
                break
            code = "".join(out)
            out = []
            regs["mode"] = 0
            regs["state_index"] = 0
            regs["head"] = 0
            generations += 1
            stored_lengths.append(len(code))
            if not code_is_proper():
                stalled = True
                break
            continue
        if regs["mode"] == 1 and (regs["head"] < 0 or regs["head"] > len(code)):
            stalled = True
            break
    return TMSimResult(
        emitted_bits="".join(emitted),
        steps=steps,
        generations=generations,
        register_names=regs.names(),
        stored_lengths=tuple(stored_lengths),
        stalled=stalled,
    )
