"""Operational semantics: steps, splits, lineage runs and descendant trees.

Semantics pinned here (the tests rely on the exact order of effects):

* Transducer step: look up (state, stream symbol).  No rule means death
  without consuming.  Otherwise the cursor advances by exactly one, the
  written symbol (if any) goes to the output *stream*, and control moves
  to the target state.
* Reproducing step: the head observes the tape, or the blank sentinel at
  the single position one past the last bit.  The written symbol (if
  any) is appended to the output *tape*, then the head moves, then
  control moves.  Moving left of 0 or right past the sentinel kills the
  machine, except that a step entering R0 splits regardless of where the
  move would have put the head.
* Split: the replica keeps the parent's tape, the offspring's tape is
  the parent's output tape.  Both start at T0 with head 0 and an empty
  output tape.  An output tape holding anything but bits, or one that
  does not decode, makes the offspring dead on arrival; the replica is
  unaffected.

``run_generation`` is the interpreter loop; ``step`` exposes the same
transition relation one step at a time for tests and tooling (the two
are cross-checked property-style in the test suite).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .model import (
    Automaton,
    DecodeError,
    START,
    TRANSDUCER,
    ValidationError,
    decode,
    encode,
)
from .streams import Stream

TERM_SPLIT = "split"
TERM_NO_RULE = "died:no_rule"
TERM_OOB = "died:head_out_of_bounds"
TERM_BAD_OFFSPRING = "died:bad_offspring"
TERM_FUEL = "fuel_exhausted"
TERM_GEN_CAP = "generation_cap"


@dataclass(frozen=True)
class MachineConfig:
    """Live execution state of one automaton."""

    automaton: Automaton
    tape: str
    head: int
    state: tuple[str, int]
    out_tape: tuple[int, ...]
    stream_cursor: int
    emitted: tuple[int, ...]


@dataclass(frozen=True)
class OffspringInvalid:
    reason: str
    detail: str = ""


@dataclass(frozen=True)
class Continued:
    config: MachineConfig


@dataclass(frozen=True)
class SplitNow:
    replica: MachineConfig
    offspring: Union[MachineConfig, OffspringInvalid]


@dataclass(frozen=True)
class Died:
    reason: str


StepOutcome = Union[Continued, SplitNow, Died]


def initial_config(automaton: Automaton, stream_cursor: int = 0) -> MachineConfig:
    return MachineConfig(
        automaton=automaton,
        tape=encode(automaton),
        head=0,
        state=START,
        out_tape=(),
        stream_cursor=stream_cursor,
        emitted=(),
    )


def _offspring_from_out(out: tuple[int, ...], stream_cursor: int):
    if any(s > 1 for s in out):
        return OffspringInvalid("non_binary_output")
    bits = "".join("01"[s] for s in out)
    try:
        child = decode(bits)
    except (DecodeError, ValidationError) as err:
        return OffspringInvalid("bad_code", str(err))
    return MachineConfig(
        automaton=child,
        tape=bits,
        head=0,
        state=START,
        out_tape=(),
        stream_cursor=stream_cursor,
        emitted=(),
    )


def split(config: MachineConfig) -> tuple[MachineConfig, Union[MachineConfig, OffspringInvalid]]:
    """The split: replica plus offspring, both reset to T0/head 0."""
    replica = MachineConfig(
        automaton=config.automaton,
        tape=config.tape,
        head=0,
        state=START,
        out_tape=(),
        stream_cursor=config.stream_cursor,
        emitted=(),
    )
    offspring = _offspring_from_out(config.out_tape, config.stream_cursor)
    return replica, offspring


def step(config: MachineConfig, stream: Stream) -> StepOutcome:
    """One small step.  Pure; returns a fresh outcome object."""
    auto = config.automaton
    span = auto.obs_span
    table = auto.table
    mode, idx = config.state
    if mode == TRANSDUCER:
        obs = stream.at(config.stream_cursor)
        rule = table.get((idx * 2) * span + obs) if obs < span else None
        if rule is None:
            return Died(TERM_NO_RULE)
        tmode, tidx, written, _move = rule
        emitted = config.emitted if written < 0 else config.emitted + (written,)
        nxt = MachineConfig(
            automaton=auto,
            tape=config.tape,
            head=config.head,
            state=("TR"[tmode], tidx),
            out_tape=config.out_tape,
            stream_cursor=config.stream_cursor + 1,
            emitted=emitted,
        )
    else:
        n = len(config.tape)
        obs = int(config.tape[config.head]) if config.head < n else 2
        rule = table.get((idx * 2 + 1) * span + obs)
        if rule is None:
            return Died(TERM_NO_RULE)
        tmode, tidx, written, move = rule
        out = config.out_tape if written < 0 else config.out_tape + (written,)
        head = config.head + move
        if not (tmode == 1 and tidx == 0) and (head < 0 or head > n):
            return Died(TERM_OOB)
        nxt = MachineConfig(
            automaton=auto,
            tape=config.tape,
            head=head,
            state=("TR"[tmode], tidx),
            out_tape=out,
            stream_cursor=config.stream_cursor,
            emitted=config.emitted,
        )
    if tmode == 1 and tidx == 0:
        replica, offspring = split(nxt)
        return SplitNow(replica, offspring)
    return Continued(nxt)


def run_generation(
    automaton: Automaton,
    tape: str,
    stream: Stream,
    cursor: int,
    fuel: int,
    visited: Optional[set] = None,
):
    """Run one automaton until it splits, dies or runs out of fuel.

    Returns ``(terminal, steps, emitted, out_tape, cursor)`` where
    ``terminal`` is one of ``TERM_SPLIT``/``TERM_NO_RULE``/``TERM_OOB``/
    ``TERM_FUEL``.  ``out_tape`` is a list of symbol indices.

    Implements exactly the relation of ``step`` as a tight loop; the
    test suite asserts the equivalence on random machines.
    """
    span = automaton.obs_span
    flat = automaton.dense_table
    if flat is None:
        dget = automaton.table.get
        size = None
    else:
        size = len(flat)
    n = len(tape)
    tb = bytes(int(c) for c in tape)
    kind = stream.kind
    prefix = stream.prefix
    plen = len(prefix)
    pad = stream.pad
    pattern = stream.pattern
    patlen = len(pattern) or 1
    zeros = kind == "zeros"
    lit_kind = kind == "literal"

    mode = 0
    idx = 0
    head = 0
    out: list[int] = []
    out_append = out.append
    emitted: list[int] = []
    emit_append = emitted.append
    steps = 0
    track = visited is not None

    while steps < fuel:
        steps += 1
        if mode == 0:
            if zeros:
                obs = 0
            elif lit_kind:
                obs = prefix[cursor] if cursor < plen else pad
            else:
                obs = pattern[cursor % patlen]
            if obs >= span:
                return TERM_NO_RULE, steps - 1, emitted, out, cursor
            key = (idx * 2) * span + obs
            rule = flat[key] if size else dget(key)
            if rule is None:
                return TERM_NO_RULE, steps - 1, emitted, out, cursor
            cursor += 1
            mode, idx, written, _move = rule
            if written >= 0:
                emit_append(written)
            if mode == 1 and idx == 0:
                return TERM_SPLIT, steps, emitted, out, cursor
        else:
            key = (idx * 2 + 1) * span + (tb[head] if head < n else 2)
            rule = flat[key] if size else dget(key)
            if rule is None:
                return TERM_NO_RULE, steps - 1, emitted, out, cursor
            mode, idx, written, move = rule
            if written >= 0:
                out_append(written)
            if mode == 1 and idx == 0:
                return TERM_SPLIT, steps, emitted, out, cursor
            if move:
                head += move
                if head < 0 or head > n:
                    return TERM_OOB, steps, emitted, out, cursor
        if track:
            visited.add((mode, idx))
    return TERM_FUEL, steps, emitted, out, cursor


@dataclass(frozen=True)
class Generation:
    """One entry of a lineage trace."""

    code: str
    steps: int
    output_chunk: tuple[int, ...]
    terminal: str
    replica_abandoned: bool
    empty_offspring: bool


@dataclass(frozen=True)
class SplitAudit:
    """Snapshot of one split, for conservation checks."""

    parent_tape: str
    parent_out: tuple[int, ...]
    replica: MachineConfig
    offspring: Union[MachineConfig, OffspringInvalid]


@dataclass(frozen=True)
class LineageTrace:
    generations: tuple[Generation, ...]
    output: tuple[int, ...]
    consumed: int
    terminal: str
    stream_spec: str
    audits: tuple[SplitAudit, ...] = ()

    def codes(self) -> tuple[str, ...]:
        return tuple(g.code for g in self.generations)


def run_lineage(
    seed: Automaton,
    stream: Stream,
    fuel: int,
    max_generations: int,
    visited: Optional[set] = None,
    audit: bool = False,
) -> LineageTrace:
    """Follow the offspring at every split, carrying the stream cursor.

    The replica is recorded as abandoned, never executed.  Termination
    reasons are data: death, an invalid offspring, fuel exhaustion or
    the generation cap.
    """
    generations: list[Generation] = []
    audits: list[SplitAudit] = []
    output: list[int] = []
    automaton = seed
    tape = encode(seed)
    cursor = 0
    budget = fuel
    terminal = TERM_GEN_CAP
    while len(generations) < max_generations:
        term, steps, emitted, out, cursor = run_generation(
            automaton, tape, stream, cursor, budget, visited
        )
        budget -= steps
        output.extend(emitted)
        out_t = tuple(out)
        if term == TERM_SPLIT:
            parent_config = MachineConfig(
                automaton=automaton,
                tape=tape,
                head=0,
                state=START,
                out_tape=out_t,
                stream_cursor=cursor,
                emitted=tuple(emitted),
            )
            replica, offspring = split(parent_config)
            if audit:
                audits.append(SplitAudit(tape, out_t, replica, offspring))
            bad = isinstance(offspring, OffspringInvalid)
            generations.append(
                Generation(
                    code=tape,
                    steps=steps,
                    output_chunk=tuple(emitted),
                    terminal=TERM_BAD_OFFSPRING if bad else TERM_SPLIT,
                    replica_abandoned=True,
                    empty_offspring=not bad and len(out_t) == 0,
                )
            )
            if bad:
                terminal = TERM_BAD_OFFSPRING
                break
            automaton = offspring.automaton
            tape = offspring.tape
            continue
        generations.append(
            Generation(
                code=tape,
                steps=steps,
                output_chunk=tuple(emitted),
                terminal=term,
                replica_abandoned=False,
                empty_offspring=False,
            )
        )
        terminal = term
        break
    return LineageTrace(
        generations=tuple(generations),
        output=tuple(output),
        consumed=cursor,
        terminal=terminal,
        stream_spec=stream.spec(),
        audits=tuple(audits),
    )


@dataclass(frozen=True)
class TreeNode:
    path: str
    code: str
    stream_spec: str
    terminal: str
    output_chunk: tuple[int, ...]
    children: tuple[str, ...]


@dataclass(frozen=True)
class DescendantTree:
    nodes: dict[str, TreeNode]

    def root(self) -> TreeNode:
        return self.nodes[""]


def run_tree(
    seed: Automaton,
    stream_oracle: Callable[[str], Stream],
    depth: int,
    fuel: int,
) -> DescendantTree:
    """Explore both children of every split, breadth-first.

    Every node runs on a fresh stream chosen by the oracle from the node
    path ("o" = offspring edge, "r" = replica edge).  Deterministic for
    a deterministic oracle.
    """
    nodes: dict[str, TreeNode] = {}
    queue: list[tuple[str, Automaton, str, int]] = [("", seed, encode(seed), depth)]
    while queue:
        path, automaton, tape, budget = queue.pop(0)
        stream = stream_oracle(path)
        term, _steps, emitted, out, _cursor = run_generation(
            automaton, tape, stream, 0, fuel
        )
        children: tuple[str, ...] = ()
        if term == TERM_SPLIT:
            parent = MachineConfig(
                automaton=automaton,
                tape=tape,
                head=0,
                state=START,
                out_tape=tuple(out),
                stream_cursor=0,
                emitted=tuple(emitted),
            )
            replica, offspring = split(parent)
            if isinstance(offspring, OffspringInvalid):
                term = TERM_BAD_OFFSPRING
                if budget > 0:
                    children = (path + "r",)
                    queue.append((path + "r", replica.automaton, replica.tape, budget - 1))
            elif budget > 0:
                children = (path + "r", path + "o")
                queue.append((path + "r", replica.automaton, replica.tape, budget - 1))
                queue.append((path + "o", offspring.automaton, offspring.tape, budget - 1))
        nodes[path] = TreeNode(
            path=path,
            code=tape,
            stream_spec=stream.spec(),
            terminal=term,
            output_chunk=tuple(emitted),
            children=children,
        )
    return DescendantTree(nodes=nodes)
