"""Builder toolkit for reproducing-mode rule programs.

The reproducing half of a self-reproducing automaton is a finite-state
program over its own code tape: it walks the tape with the single head,
and every step may append one symbol to the output tape.  The compilers
in this package assemble such programs from a handful of primitives:

* ``lit``: write a fixed bit string while parked on a cell of known
  content.
* ``copy_field``: transcribe one self-delimiting unary field, mapping
  its value ``a`` to ``mult * a + bias`` (the workhorse: every index
  rewrite the compilers need is affine with small constants).
* ``walk_back`` / ``skip_fields``: bounded repositioning by counting
  field terminators; every field ends in a single ``0`` bit, so "seven
  zeros" is "one whole rule".
* ``echo_fields``: verbatim transcription.

States are named; ``build`` assigns dense reproducing-mode indices
(pinned names first, then a caller-supplied hot list, then creation
order) and returns concrete rules.  Index 0 is always the split state,
addressed by the reserved target ``SPLIT``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .model import REPRODUCING, Rule, STAY, LEFT, RIGHT

SPLIT_TARGET = "<split>"

ANY = (0, 1, 2)
ANY01 = (0, 1)


@dataclass
class _Action:
    target: str
    write: Optional[int]
    move: str


class ProgBuilder:
    def __init__(self):
        self._states: dict[str, dict[int, _Action]] = {}
        self._order: list[str] = []
        self._pins: dict[str, int] = {}

    def state(self, name: str) -> str:
        if name not in self._states:
            self._states[name] = {}
            self._order.append(name)
        return name

    def rule(
        self,
        state: str,
        obs: Union[int, Iterable[int]],
        target: str,
        write: Optional[int] = None,
        move: str = STAY,
    ) -> None:
        self.state(state)
        symbols = (obs,) if isinstance(obs, int) else tuple(obs)
        for s in symbols:
            if s in self._states[state]:
                raise ValueError(f"duplicate obs {s} in state {state}")
            self._states[state][s] = _Action(target, write, move)

    def pin(self, name: str, index: int) -> None:
        if index <= 0:
            raise ValueError("index 0 is the split state")
        self.state(name)
        self._pins[name] = index

    def fresh(self, prefix: str) -> str:
        n = 0
        while f"{prefix}#{n}" in self._states:
            n += 1
        return self.state(f"{prefix}#{n}")

    def build(self, hot: Iterable[str] = ()) -> tuple[list[Rule], dict[str, int]]:
        index: dict[str, int] = dict(self._pins)
        taken = set(index.values())
        if len(taken) != len(index):
            raise ValueError("pin collision")
        nxt = 1
        def place(name):
            nonlocal nxt
            if name in index:
                return
            while nxt in taken:
                nxt += 1
            index[name] = nxt
            taken.add(nxt)
        for name in hot:
            if name not in self._states:
                raise ValueError(f"unknown hot state {name}")
            place(name)
        for name in self._order:
            place(name)
        rules: list[Rule] = []
        for name in sorted(self._states, key=lambda n: index[n]):
            for obs in sorted(self._states[name]):
                act = self._states[name][obs]
                if act.target == SPLIT_TARGET:
                    tgt = (REPRODUCING, 0)
                elif act.target in index:
                    tgt = (REPRODUCING, index[act.target])
                else:
                    raise ValueError(f"undefined target {act.target!r} from {name}")
                rules.append(
                    Rule(
                        current=(REPRODUCING, index[name]),
                        observed=obs,
                        target=tgt,
                        written=act.write,
                        direction=act.move,
                    )
                )
        return rules, index


def lit(pb: ProgBuilder, prefix: str, bits: str, then: str, obs=ANY01) -> str:
    """Write ``bits`` one per step without moving, then continue.

    The head never moves, so the observed symbol stays whatever the
    caller parked on; pass the known cell value (or a tuple) as ``obs``.
    """
    if not bits:
        return then
    names = [pb.fresh(f"{prefix}.lit") for _ in bits]
    for i, b in enumerate(bits):
        nxt = names[i + 1] if i + 1 < len(bits) else then
        pb.rule(names[i], obs, nxt, write=int(b), move=STAY)
    return names[0]


def copy_field(pb: ProgBuilder, prefix: str, then: str, mult: int = 1, bias: int = 0) -> str:
    """Transcribe a unary field, mapping value ``a`` to ``mult*a + bias``.

    Enter with the head on the field's first bit; exits one cell past the
    field's terminating zero with the mapped field written (value ones
    plus a zero).  Values for which the output would be negative are
    treated as impossible inputs (no rule, so a loud death if they ever
    occur).
    """
    lag = 0
    while mult * lag + bias < 0:
        lag += 1
    readers = [pb.fresh(f"{prefix}.rd") for _ in range(lag + 1)]
    for c in range(lag):
        pb.rule(readers[c], 1, readers[c + 1], move=RIGHT)
    # At full lag: each further input one yields `mult` output ones.
    chain = [pb.fresh(f"{prefix}.x") for _ in range(max(0, mult - 1))]
    if mult == 1:
        pb.rule(readers[lag], 1, readers[lag], write=1, move=RIGHT)
    else:
        pb.rule(readers[lag], 1, chain[0], write=1, move=STAY)
        for j in range(mult - 1):
            last = j == mult - 2
            pb.rule(
                chain[j],
                1,
                readers[lag] if last else chain[j + 1],
                write=1,
                move=RIGHT if last else STAY,
            )
    # Terminator: flush the withheld ones and the bias, emit the zero.
    for c in range(lag + 1):
        tail = mult * c + bias
        if tail < 0:
            continue  # impossible input given the caller's value range
        end = pb.fresh(f"{prefix}.end")
        pb.rule(readers[c], 0, lit(pb, f"{prefix}.tail{c}", "1" * tail, end, obs=0), move=STAY) \
            if tail else pb.rule(readers[c], 0, end, move=STAY)
        pb.rule(end, 0, then, write=0, move=RIGHT)
    return readers[0]


def walk_back(pb: ProgBuilder, prefix: str, zeros: int, then: str) -> str:
    """Move left until the ``zeros``-th zero bit, parking on it."""
    entry = pb.fresh(f"{prefix}.wb")
    counters = [pb.fresh(f"{prefix}.wb{z}") for z in range(zeros)]
    pb.rule(entry, ANY, counters[0], move=LEFT)
    for z in range(zeros):
        pb.rule(counters[z], 1, counters[z], move=LEFT)
        if z + 1 < zeros:
            pb.rule(counters[z], 0, counters[z + 1], move=LEFT)
        else:
            pb.rule(counters[z], 0, then, move=STAY)
    return entry


def skip_fields(pb: ProgBuilder, prefix: str, zeros: int, then: str) -> str:
    """Move right past ``zeros`` field terminators without writing."""
    counters = [pb.fresh(f"{prefix}.sk{z}") for z in range(zeros)]
    for z in range(zeros):
        pb.rule(counters[z], 1, counters[z], move=RIGHT)
        nxt = counters[z + 1] if z + 1 < zeros else then
        pb.rule(counters[z], 0, nxt, move=RIGHT)
    return counters[0]


def echo_fields(pb: ProgBuilder, prefix: str, zeros: int, then: str) -> str:
    """Copy bits verbatim through ``zeros`` field terminators."""
    counters = [pb.fresh(f"{prefix}.ec{z}") for z in range(zeros)]
    for z in range(zeros):
        pb.rule(counters[z], 1, counters[z], write=1, move=RIGHT)
        nxt = counters[z + 1] if z + 1 < zeros else then
        pb.rule(counters[z], 0, nxt, write=0, move=RIGHT)
    return counters[0]
