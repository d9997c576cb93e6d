"""Halting reduction: a seed whose lineage is infinite iff its source runs
forever on the all-zeros stream.

Unlike the growth compiler, the reduction carries the simulated machine's
whole configuration as inert payload rules on the code tape and performs
exactly one simulated step per generation.  This supports arbitrary head
motion (left moves included): a step is a local edit of the payload
string, which a fixed reproducing program performs while re-writing the
tape.

Tape layout::

    [reproducing block][start rule][payload rule 0][payload rule 1]...

Payload rule ``j`` is the dead rule ``(T, 1+j) obs cell_j -> (T, 1+j)``,
one per tape cell of the simulated machine.  A cell holds either a plain
symbol (codes 0, 1, 2) or the head marker carrying the machine state
(code ``3 + 3q + t``).

Each generation the start rule consumes one stream zero and enters the
reproducing block, which echoes the block and the start rule, then
re-emits the payload in one left-to-right pass, lagging one rule behind
so that the step's local edit can depend on the cell after the edit
point.  The walk carries a small tag:

    FIRST  at the leftmost cell (nothing emitted yet)
    NONE   no marker in the last two cells
    M1(a)  the previous cell is the marker, resolved by action ``a``
    M2(a)  the marker sat two cells back and ``a`` moves right

A peeked marker looks up the simulated transition on the spot; an
undefined transition (or a left move at cell 0) routes to a rule-less
state, the automaton dies mid-split, and the lineage ends.  A right move
off the last cell appends a fresh marked blank cell before splitting, so
the payload grows exactly as the simulated tape does.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .itm import InteractiveTM
from .machine import TERM_FUEL, TERM_GEN_CAP, run_lineage
from .model import Automaton, REPRODUCING, Rule, STAY, TRANSDUCER, validate
from .program import (
    ProgBuilder,
    SPLIT_TARGET,
    copy_field,
    echo_fields,
    lit,
    skip_fields,
    walk_back,
)
from .streams import Stream

TM_BLANK = 2


@dataclass(frozen=True)
class DiedAt:
    generation: int
    step: int


@dataclass(frozen=True)
class AliveAfter:
    fuel: int
    generations: int


SustainabilityVerdict = Union[DiedAt, AliveAfter]


def classical_table(m: InteractiveTM) -> dict[tuple[int, int], tuple[int, int, str]]:
    """The all-zeros-stream view of an interactive machine."""
    return {
        (q, t): (q2, t2, mv)
        for (q, x, t), (q2, t2, mv, _emit) in m.transitions.items()
        if x == 0
    }


def _mark(q: int, t: int) -> int:
    return 3 + 3 * q + t


def _payload_rule(j: int, cell: int) -> Rule:
    return Rule((TRANSDUCER, 1 + j), cell, (TRANSDUCER, 1 + j), None, STAY)


def initial_payload() -> list[Rule]:
    return [_payload_rule(0, _mark(0, TM_BLANK))]


def halting_reduction(m: InteractiveTM) -> Automaton:
    """Compile the reduction seed for a deterministic source machine."""
    table = classical_table(m)
    r_rules, index = _build_stepper(table, m.n_states)
    t_rules = [
        Rule((TRANSDUCER, 0), 0, (REPRODUCING, index["begin"]), None, STAY),
    ] + initial_payload()
    return validate(r_rules + t_rules)


def _act_key(act) -> str:
    q2, t2, mv = act
    return f"q{q2}t{t2}{mv}"


def _build_stepper(table: dict, n_states: int):
    pb = ProgBuilder()
    pb.pin("begin", 1)
    pb.state("halted")          # rule-less: entering it kills the machine
    pb.state("impossible")      # structurally unreachable branches

    # Echo the reproducing block, then the start rule, then walk the
    # payload starting in the FIRST tag.
    echo_r = echo_fields(pb, "er", 7, "begin")
    pb.rule("begin", 1, echo_r, write=1, move="R")
    start_echo = echo_fields(pb, "et", 6, "loop.F")
    pb.rule("begin", 0, start_echo, write=0, move="R")

    actions = {}
    for key_qt in sorted(table):
        act = table[key_qt]
        actions.setdefault(_act_key(act), act)

    # Carry tags and their loop heads.
    tags = ["F", "N"]
    for k in sorted(actions):
        tags.append(f"M1.{k}")
        if actions[k][2] == "R":
            tags.append(f"M2.{k}")
    for tag in tags:
        pb.state(f"loop.{tag}")

    made_adv = set()

    def advance(tag: str) -> str:
        """Skip the current rule rightward and land on the next loop head."""
        name = f"adv.{tag}"
        if name not in made_adv:
            made_adv.add(name)
            pb.state(name)
            pb.rule(name, (0, 1, 2), skip_fields(pb, f"{name}.sk", 7, f"loop.{tag}"))
        return name

    def emit(transform: str, act, then: str) -> str:
        """Re-emit one payload rule; enter parked on its mode bit."""
        name = pb.fresh(f"emit.{transform}.{_act_key(act) if act else 'x'}")
        if transform == "echo":
            body = echo_fields(pb, f"{name}.b", 6, then)
            pb.rule(name, 0, body, write=0, move="R")
            return name
        q2, t2, mv = act
        rest = echo_fields(pb, f"{name}.rest", 4, then)
        if transform == "mark":
            obs = copy_field(pb, f"{name}.obs", rest, mult=1, bias=3 + 3 * q2)
        else:  # resolve: rewrite the marker cell in place
            value = _mark(q2, t2) if mv == "S" else t2
            obs = lit(
                pb,
                f"{name}.lit",
                "1" * value + "0",
                skip_fields(pb, f"{name}.sk", 1, rest),
                obs=(0, 1),
            )
        cur = echo_fields(pb, f"{name}.cur", 1, obs)
        pb.rule(name, 0, cur, write=0, move="R")
        return name

    def emit_prev(transform: str, act, tag: str) -> str:
        """Walk one rule back, re-emit it, skip forward to the next rule."""
        body = emit(transform, act, skip_fields(pb, pb.fresh("ep.sk"), 7, f"loop.{tag}"))
        return walk_back(pb, pb.fresh("ep.wb"), 7, body)

    # Peek machinery for the F and N loop heads: read the current cell's
    # code; plain cells keep walking, a marker looks up its action.
    for tag in ("F", "N"):
        loop = f"loop.{tag}"
        peek = f"peek.{tag}"
        pb.rule(loop, 0, skip_fields(pb, f"{loop}.in", 1, f"{peek}.c0"), move="R")
        max_code = 3 + 3 * n_states - 1
        for c in range(max_code + 1):
            state = f"{peek}.c{c}"
            pb.state(state)
            if c < max_code:
                pb.rule(state, 1, f"{peek}.c{c + 1}", move="R")
            if c < 3:
                target = f"seen.{tag}.plain"
                pb.rule(state, 0, walk_back(pb, f"{state}.bk", 3, target), move="R")
            else:
                act = table.get(divmod(c - 3, 3))
                if act is None:
                    pb.rule(state, 0, "halted")
                else:
                    target = f"seen.{tag}.{_act_key(act)}"
                    pb.state(target)
                    pb.rule(state, 0, walk_back(pb, f"{state}.bk", 3, target), move="R")

        # Dispatch on what was peeked, parked back on the rule's mode bit.
        plain = f"seen.{tag}.plain"
        pb.state(plain)
        if tag == "F":
            pb.rule(plain, 0, advance("N"))
        else:
            pb.rule(plain, 0, emit_prev("echo", None, "N"))
        for k, act in sorted(actions.items()):
            seen = f"seen.{tag}.{k}"
            pb.state(seen)
            q2, t2, mv = act
            if tag == "F":
                if mv == "L":
                    pb.rule(seen, 0, "halted")  # head falls off the left edge
                else:
                    pb.rule(seen, 0, advance(f"M1.{k}"))
            else:
                transform = "mark" if mv == "L" else "echo"
                pb.rule(seen, 0, emit_prev(transform, act, f"M1.{k}"))

    # M1/M2 loop heads never need a peek: the sole marker is behind them.
    for k, act in sorted(actions.items()):
        q2, t2, mv = act
        after_m1 = f"M2.{k}" if mv == "R" else "N"
        m1 = f"loop.M1.{k}"
        pb.rule(m1, 0, emit_prev("resolve", act, after_m1))
        if mv == "R":
            m2 = f"loop.M2.{k}"
            pb.rule(m2, 0, emit_prev("mark", act, "N"))

    # Blank: flush the lagging rule and split (growing if the head walked
    # off the right end).
    split = pb.state("split.now")
    pb.rule(split, (0, 1, 2), SPLIT_TARGET)
    pb.rule("loop.N", 2, walk_back(pb, "flush.N", 7, emit("echo", None, split)))
    for k, act in sorted(actions.items()):
        q2, t2, mv = act
        tail = _grow(pb, f"grow.{k}", q2) if mv == "R" else split
        pb.rule(
            f"loop.M1.{k}", 2, walk_back(pb, f"flush.M1.{k}", 7, emit("resolve", act, tail))
        )
        if mv == "R":
            pb.rule(
                f"loop.M2.{k}", 2,
                walk_back(pb, f"flush.M2.{k}", 7, emit("mark", act, split)),
            )
    return pb.build()


def _grow(pb: ProgBuilder, name: str, q2: int) -> str:
    """Append a payload rule for a fresh marked blank cell, then split.

    Entered parked at the blank after the old last rule was re-emitted.
    The new rule's index fields transcribe the old last index plus one.
    """
    code = _mark(q2, TM_BLANK)
    fin = pb.fresh(f"{name}.fin")
    pb.rule(fin, (0, 1, 2), SPLIT_TARGET)
    # second index copy, then "0" (eps) and "0" (stay)
    tail2 = lit(pb, f"{name}.t2", "00", fin, obs=(0, 1, 2))
    second = copy_field(pb, f"{name}.cur2", tail2, mult=1, bias=1)
    step2 = pb.fresh(f"{name}.s2")
    pb.rule(step2, 0, second, move="R")
    back2 = walk_back(pb, f"{name}.wb2", 2, step2)
    # cell code for the fresh square, then the target mode bit "0"
    mid = lit(pb, f"{name}.mid", "1" * code + "0" + "0", back2, obs=(0, 1))
    first = copy_field(pb, f"{name}.cur1", mid, mult=1, bias=1)
    head = pb.fresh(f"{name}.a")
    pb.rule(head, 0, first, write=0, move="R")
    entry = pb.fresh(f"{name}.entry")
    pb.rule(entry, (0, 1, 2), walk_back(pb, f"{name}.wb", 7, head))
    return entry


def check_sustainability(
    seed: Automaton,
    stream: Stream,
    fuel: int,
    gen_cap: int = 1 << 30,
) -> SustainabilityVerdict:
    """Bounded semi-decision: a death is definitive, survival is a bound."""
    trace = run_lineage(seed, stream, fuel=fuel, max_generations=gen_cap)
    if trace.terminal in (TERM_FUEL, TERM_GEN_CAP):
        return AliveAfter(fuel=fuel, generations=len(trace.generations))
    return DiedAt(
        generation=len(trace.generations) - 1,
        step=trace.generations[-1].steps,
    )
