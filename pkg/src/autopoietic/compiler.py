"""Compiler from one-way interactive TMs to self-reproducing lineage seeds.

The produced seed simulates its source machine while the source stays
within the tape squares allocated so far; when the source first moves
onto a fresh square, the automaton switches to reproducing mode, writes
the code of its own successor (one more square of capacity) onto the
output tape by executing its own rules, and splits.  The offspring
resumes the simulation at the stream position the parent reached.

State layout of generation ``k`` (capacity ``k`` tape squares):

* channels: transducer index ``i`` encodes the pair
  ``(val, ch) = divmod(i, Q + 1)``; channel 0 is wiring (the start alias
  and its dead descendants), channel ``q + 1`` is source state ``q``.
* ``val`` is the inscription read in base 3, most significant square
  first, under the digit map b->0, 0->1, 1->2, with the head always on
  the youngest (least significant) square.  The start alias T0 stands
  for the configuration whose inscription is blank left of the head; one
  way sources never look back, so only the head square's digit matters.
* Appending one square is therefore ``val -> 3 * val + digit``, i.e. an
  affine index rewrite with constants independent of the generation,
  which is exactly what a fixed reproducing program can perform while
  streaming over the parent's code.

Tape layout invariant: reproducing rules first, then the two start-alias
rules, then the table; the first tape bit of every generation is ``1``.

The reproducing program makes three passes over every transducer rule
(one per appended digit).  Each pass re-derives the rule's behaviour
from the source machine: the digit under the head is the pass's own
appended digit, so the parent's target field is discarded and rebuilt.
Channel-0 rules are instead copied as dead weight with both index fields
mapped affinely, except that the d=0 image of the old start alias is
dropped (its index would collide with the fresh alias).  Reproducing
rules are echoed verbatim, so the program reproduces itself literally.

Left-moving sources are rejected: a resumption that depends on tape
content left of the frontier would need the (exponentially large) left
inscription to cross the split inside the entry state identity, which no
fixed-size reproducing block can carry.  The acceptance fixtures and the
halting reduction never need it; the reduction uses a different
construction (see ``reduction``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .itm import InteractiveTM, run_itm
from .model import (
    Automaton,
    REPRODUCING,
    Rule,
    STAY,
    TRANSDUCER,
    encode,
    unary,
    validate,
)
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

#: inscription digit of a tape symbol (blank must be 0 so that a fresh
#: square leaves the value unchanged and the alias target is tiny)
DIG = {2: 0, 0: 1, 1: 2}
#: tape symbol of an inscription digit
SYM = {0: 2, 1: 0, 2: 1}


class CompileError(ValueError):
    pass


class UnsupportedAlphabet(CompileError):
    pass


class UnsupportedLeftMove(CompileError):
    pass


class NondeterministicSource(CompileError):
    """Reserved: table-backed sources are deterministic by construction."""


@dataclass(frozen=True)
class GrowthPlan:
    """How generation indices encode simulated configurations."""

    n_states: int
    channels: int           # Q + 1
    fam_index: tuple[int, ...]   # reproducing entry per birth state
    reproducing_rules: int

    def t_index(self, q: int, val: int) -> int:
        return val * self.channels + (q + 1)


@dataclass(frozen=True)
class CompiledSeed:
    seed: Automaton
    source: InteractiveTM
    plan: GrowthPlan


def _check_source(m: InteractiveTM) -> None:
    for (q, x, t), (q2, t2, mv, emit) in m.transitions.items():
        if x not in (0, 1):
            raise UnsupportedAlphabet(f"stream symbol {x} outside {{0,1}}")
        if t not in (0, 1, 2) or t2 not in (0, 1, 2):
            raise UnsupportedAlphabet("tape alphabet must be {0,1,b}")
        if mv == "L":
            raise UnsupportedLeftMove(
                "only one-way (S/R) sources compile to lineage seeds"
            )


def _written_bits(emit: Optional[int]) -> str:
    return unary(0) if emit is None else unary(emit + 1)


def _alias_bits(m: InteractiveTM, q_birth: int, qt: int) -> str:
    """Literal code of the start-alias rules for a generation born in
    source state ``q_birth`` (fresh square under the head)."""
    bits = []
    for x in (0, 1):
        act = m.transitions.get((q_birth, x, TM_BLANK))
        if act is None:
            continue
        q2, t2, mv, emit = act
        if mv == "S":
            target = unary(0) + unary(DIG[t2] * qt + q2 + 1)
        else:
            target = unary(1) + unary(1 + q2)
        bits.append(unary(0) + unary(0) + unary(x) + target + _written_bits(emit) + unary(0))
    return "".join(bits)


def alias_rules(m: InteractiveTM, q_birth: int, qt: int) -> list[Rule]:
    rules = []
    for x in (0, 1):
        act = m.transitions.get((q_birth, x, TM_BLANK))
        if act is None:
            continue
        q2, t2, mv, emit = act
        if mv == "S":
            target = (TRANSDUCER, DIG[t2] * qt + q2 + 1)
        else:
            target = (REPRODUCING, 1 + q2)
        rules.append(Rule((TRANSDUCER, 0), x, target, emit, STAY))
    return rules


def first_table(m: InteractiveTM, qt: int) -> list[Rule]:
    """Capacity-one table: one state per (source state, head symbol)."""
    rules = []
    for val in (0, 1, 2):
        t = SYM[val]
        for q in range(m.n_states):
            cur = val * qt + q + 1
            for x in (0, 1):
                act = m.transitions.get((q, x, t))
                if act is None:
                    continue
                q2, t2, mv, emit = act
                if mv == "S":
                    target = (TRANSDUCER, DIG[t2] * qt + q2 + 1)
                else:
                    target = (REPRODUCING, 1 + q2)
                rules.append(Rule((TRANSDUCER, cur), x, target, emit, STAY))
    return rules


def build_reproducer(m: InteractiveTM) -> tuple[list[Rule], dict[str, int]]:
    """The fixed reproducing program shared by every generation."""
    q_n = m.n_states
    qt = q_n + 1
    pb = ProgBuilder()

    # Entry families, one per possible birth state, at pinned indices so
    # transducer rules can name them as constants.
    for q in range(q_n):
        pb.pin(f"fam{q}", 1 + q)

    scan = pb.state("scanT")
    pb.rule(scan, 2, SPLIT_TARGET)          # end of code: split
    pb.rule(scan, 0, "pre0.r0n", move="R")  # transducer rule: start pass d=0
    pb.state("dead")                        # target of impossible branches

    # fam(q): echo the reproducing block, then write the fresh alias.
    for q in range(q_n):
        alias = lit(pb, f"fam{q}.alias", _alias_bits(m, q, qt), scan, obs=(0, 2))
        echo_body = echo_fields(pb, f"fam{q}.er", 7, f"fam{q}")
        pb.rule(f"fam{q}", 1, echo_body, write=1, move="R")
        pb.rule(f"fam{q}", 0, alias)        # first transducer rule reached
        pb.rule(f"fam{q}", 2, alias)        # no transducer rules at all

    # Pass machinery per appended digit d.
    for d in (0, 1, 2):
        # enterpre{d}: parked on the rule's mode bit after a walk back.
        if d > 0:
            pb.rule(f"enterpre{d}", 0, f"pre{d}.r0n", move="R")
        nextpass = (
            walk_back(pb, f"nextpass{d}", 7, f"enterpre{d + 1}") if d < 2 else scan
        )
        pb.state(f"pass_end{d}")
        pb.rule(f"pass_end{d}", (0, 1, 2), nextpass)

        # Silent pre-pass over [cur][obs], tracking cur mod qt and
        # whether cur had any ones at all.
        for r in range(qt):
            seen = f"pre{d}.r{r}y"
            pb.rule(seen, 1, f"pre{d}.r{(r + 1) % qt}y", move="R")
            pb.rule(seen, 0, f"pre{d}.obs.r{r}", move="R")
        entry = f"pre{d}.r0n"
        pb.rule(entry, 1, f"pre{d}.r1y", move="R")
        pb.rule(entry, 0, f"pre{d}.obs.zero", move="R")

        # Ghost chains: channel-0 rules are copied with affine fields.
        g_a = f"g{d}.A"
        g_cur = copy_field(pb, f"g{d}.cur", f"g{d}.obs.in", mult=3, bias=d * qt)
        pb.rule(g_a, 0, g_cur, write=0, move="R")
        g_obs = copy_field(pb, f"g{d}.obs", f"g{d}.mn", mult=1, bias=0)
        pb.rule(f"g{d}.obs.in", (0, 1), g_obs)
        g_tgt_t = copy_field(pb, f"g{d}.tT", f"g{d}.w.in", mult=3, bias=d * qt)
        g_tgt_r = copy_field(pb, f"g{d}.tR", f"g{d}.w.in", mult=1, bias=0)
        pb.rule(f"g{d}.mn", 0, g_tgt_t, write=0, move="R")
        pb.rule(f"g{d}.mn", 1, f"g{d}.mn2", write=1, move="R")
        pb.rule(f"g{d}.mn2", 0, g_tgt_r, write=0, move="R")
        g_w = copy_field(pb, f"g{d}.w", f"g{d}.dir.in", mult=1, bias=0)
        pb.rule(f"g{d}.w.in", (0, 1), g_w)
        g_dir = copy_field(pb, f"g{d}.dir", f"pass_end{d}", mult=1, bias=0)
        pb.rule(f"g{d}.dir.in", (0, 1), g_dir)
        ghost_in = walk_back(pb, f"g{d}.bk", 3, g_a)
        pb.state(f"g{d}.in")
        pb.rule(f"g{d}.in", (0, 1), ghost_in)

        # Dispatch from the pre-pass.
        # cur == 0 (the old start alias): drop the d=0 image.
        zero_obs = f"pre{d}.obs.zero"
        pb.rule(zero_obs, 1, zero_obs, move="R")
        if d == 0:
            skip_alias = walk_back(pb, f"alias.skip{d}", 3, "enterpre1")
            pb.rule(zero_obs, 0, skip_alias, move="R")
        else:
            pb.rule(zero_obs, 0, f"g{d}.in", move="R")

        for r in range(qt):
            obs_state = f"pre{d}.obs.r{r}"
            if r == 0:
                # channel 0 with ones: a ghost rule.
                pb.rule(obs_state, 1, obs_state, move="R")
                pb.rule(obs_state, 0, f"g{d}.in", move="R")
                continue
            q = r - 1
            # Read the stream symbol and dispatch on definedness.
            for x in (0, 1):
                act = m.transitions.get((q, x, SYM[d]))
                if act is None:
                    tgt = (
                        walk_back(pb, f"undef{d}.q{q}x{x}", 3, f"enterpre{d + 1}")
                        if d < 2
                        else skip_fields(pb, f"undef{d}.q{q}x{x}", 4, scan)
                    )
                else:
                    tgt = f"case{d}.q{q}"
                if x == 0:
                    pb.rule(obs_state, 0, tgt, move="R")
                else:
                    pb.rule(f"{obs_state}.1", 0, tgt, move="R")
            pb.rule(obs_state, 1, f"{obs_state}.1", move="R")

            # Shared emit head for (d, q): mode bit + affine cur + obs echo
            # with x re-dispatch into the per-action tail.
            case_a = f"case{d}.q{q}.A"
            obs_echo = f"case{d}.q{q}.obs"
            c_cur = copy_field(
                pb, f"case{d}.q{q}.cur", obs_echo, mult=3, bias=d * qt - 2 * (q + 1)
            )
            pb.rule(case_a, 0, c_cur, write=0, move="R")
            case_in = walk_back(pb, f"case{d}.q{q}.bk", 3, case_a)
            pb.state(f"case{d}.q{q}")
            pb.rule(f"case{d}.q{q}", (0, 1), case_in)
            for x in (0, 1):
                act = m.transitions.get((q, x, SYM[d]))
                tail = "dead" if act is None else _action_tail(pb, m, d, q, x, act, qt)
                if x == 0:
                    pb.rule(obs_echo, 0, tail, write=0, move="R")
                else:
                    pb.rule(obs_echo, 1, f"{obs_echo}.1", write=1, move="R")
                    pb.rule(f"{obs_echo}.1", 0, tail, write=0, move="R")

    rules, index = pb.build()
    return rules, index


def _action_tail(pb: ProgBuilder, m, d, q, x, act, qt) -> str:
    """States emitting [modeNext][target][written][dir] for one case.

    Entered with the head one past the obs field (on the parent's
    modeNext bit) and the copy's [modeCur][cur][obs] already written.
    """
    q2, t2, mv, emit = act
    name = f"tail{d}.q{q}x{x}"
    if mv == "R":
        # Constant target: the entry family of the offspring's successor.
        bits = unary(1) + unary(1 + q2) + _written_bits(emit) + unary(0)
        entry = lit(pb, name, bits, skip_fields(pb, f"{name}.sk", 4, f"pass_end{d}"), obs=(0, 1))
        return entry
    # Stay: target index = 3 * cur + bias, so re-read the cur field.
    bias = DIG[t2] * qt - 2 * (q + 1) + (q2 - q)
    fin = pb.fresh(f"{name}.fin")
    pb.rule(fin, 0, f"pass_end{d}", move="R")
    # written bits plus the stay direction bit, parked on the parent dir 0
    w_lit = lit(pb, f"{name}.w", _written_bits(emit) + "0", fin, obs=0)
    after_cur = skip_fields(pb, f"{name}.sk", 4, w_lit)
    t_cur = copy_field(pb, f"{name}.cur", after_cur, mult=3, bias=bias)
    a2 = pb.fresh(f"{name}.A2")
    pb.rule(a2, 0, t_cur, write=0, move="R")
    return walk_back(pb, f"{name}.bk", 3, a2)


def compile_itm(m: InteractiveTM) -> CompiledSeed:
    """Build the first-generation seed for a one-way source machine."""
    _check_source(m)
    qt = m.n_states + 1
    r_rules, index = build_reproducer(m)
    t_rules = alias_rules(m, 0, qt) + first_table(m, qt)
    seed = validate(r_rules + t_rules)
    plan = GrowthPlan(
        n_states=m.n_states,
        channels=qt,
        fam_index=tuple(index[f"fam{q}"] for q in range(m.n_states)),
        reproducing_rules=len(r_rules),
    )
    return CompiledSeed(seed=seed, source=m, plan=plan)


# --- host mirror of the reproducing program's transform ---------------------


def next_generation_rules(
    parent: list[Rule], m: InteractiveTM, q_birth: int
) -> list[Rule]:
    """What the reproducing program writes, computed directly.

    Used as the oracle for bit-exactness tests and to cross-check the
    growth plan; the executed offspring must match this rule for rule.
    """
    qt = m.n_states + 1
    out: list[Rule] = [r for r in parent if r.current[0] == REPRODUCING]
    out += alias_rules(m, q_birth, qt)
    for rule in parent:
        if rule.current[0] != TRANSDUCER:
            continue
        cur = rule.current[1]
        ch = cur % qt
        for d in (0, 1, 2):
            if ch == 0:
                if cur == 0 and d == 0:
                    continue
                if rule.target[0] == TRANSDUCER:
                    target = (TRANSDUCER, 3 * rule.target[1] + d * qt)
                else:
                    target = rule.target
                out.append(
                    Rule(
                        (TRANSDUCER, 3 * cur + d * qt),
                        rule.observed,
                        target,
                        rule.written,
                        STAY,
                    )
                )
                continue
            q = ch - 1
            act = m.transitions.get((q, rule.observed, SYM[d]))
            if act is None:
                continue
            q2, t2, mv, emit = act
            cur2 = 3 * cur + d * qt - 2 * (q + 1)
            if mv == "S":
                target = (TRANSDUCER, 3 * cur + DIG[t2] * qt - 2 * (q + 1) + (q2 - q))
            else:
                target = (REPRODUCING, 1 + q2)
            out.append(Rule((TRANSDUCER, cur2), rule.observed, target, emit, STAY))
    return out


def birth_states(m: InteractiveTM, stream: Stream, generations: int) -> list[int]:
    """Source states at each capacity growth, from a reference ITM run."""
    births = [0]
    tape = [TM_BLANK]
    head = 0
    state = 0
    step = 0
    while len(births) < generations:
        act = m.transitions.get((state, stream.at(step), tape[head]))
        if act is None:
            break
        state, write, mv, _emit = act
        tape[head] = write
        step += 1
        if mv == "R":
            head += 1
            if head == len(tape):
                tape.append(TM_BLANK)
                births.append(state)
    return births


def generation_tables(
    m: InteractiveTM, stream: Stream, generations: int
) -> list[list[Rule]]:
    """Host-built rule lists for generations 1..n along a stream."""
    compiled = compile_itm(m)
    tables = [list(compiled.seed.rules)]
    for q in birth_states(m, stream, generations)[1:]:
        tables.append(next_generation_rules(tables[-1], m, q))
    return tables


def transducer_state_count(rules) -> int:
    """Distinct transducer states with behaviour (current indices)."""
    return len({r.current[1] for r in rules if r.current[0] == TRANSDUCER})
