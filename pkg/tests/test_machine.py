import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from autopoietic.fixtures import COPIER, ECHO
from autopoietic.machine import (
    Continued,
    Died,
    MachineConfig,
    OffspringInvalid,
    SplitNow,
    TERM_FUEL,
    TERM_NO_RULE,
    TERM_SPLIT,
    initial_config,
    run_generation,
    run_lineage,
    run_tree,
    split,
    step,
)
from autopoietic.model import EMPTY_AUTOMATON, encode, validate, Rule
from autopoietic.streams import ALL_ZEROS, literal, periodic

from .strategies import automata


def drive(config, stream, n):
    outcomes = []
    for _ in range(n):
        out = step(config, stream)
        outcomes.append(out)
        if not isinstance(out, Continued):
            break
        config = out.config
    return outcomes


def test_echo_law():
    config = initial_config(ECHO)
    stream = periodic(0, 1)
    outs = drive(config, stream, 3)
    assert all(isinstance(o, Continued) for o in outs)
    final = outs[-1].config
    assert final.emitted == (0, 1, 0)
    assert final.state == ("T", 0)
    assert final.tape == encode(ECHO)
    assert final.out_tape == ()


def test_empty_dies_immediately():
    out = step(initial_config(EMPTY_AUTOMATON), ALL_ZEROS)
    assert isinstance(out, Died)
    assert out.reason == TERM_NO_RULE


def test_copier_split_copies_own_tape():
    config = initial_config(COPIER)
    outcomes = drive(config, ALL_ZEROS, 100)
    last = outcomes[-1]
    assert isinstance(last, SplitNow)
    # The oracle is a direct bit comparison with the fixture's encoding.
    child = last.offspring
    assert isinstance(child, MachineConfig)
    assert child.tape == encode(COPIER)
    assert last.replica.tape == encode(COPIER)
    assert last.replica.out_tape == () and child.out_tape == ()
    assert last.replica.state == ("T", 0) == child.state
    assert last.replica.head == 0 == child.head


def test_split_on_single_bit_output():
    auto = validate(
        [
            Rule(("T", 0), 0, ("R", 1), None, "S"),
            Rule(("R", 1), 0, ("R", 0), 1, "S"),
        ]
    )
    config = initial_config(auto)
    outcomes = drive(config, ALL_ZEROS, 10)
    last = outcomes[-1]
    assert isinstance(last, SplitNow)
    assert isinstance(last.offspring, OffspringInvalid)
    assert last.replica.tape == encode(auto)


def test_transducer_to_split_gives_empty_offspring():
    auto = validate([Rule(("T", 0), 0, ("R", 0), None, "S")])
    out = step(initial_config(auto), ALL_ZEROS)
    assert isinstance(out, SplitNow)
    child = out.offspring
    assert isinstance(child, MachineConfig)
    assert child.tape == ""
    assert child.automaton.rules == ()


def test_head_out_of_bounds():
    auto = validate(
        [
            Rule(("T", 0), 0, ("R", 1), None, "S"),
            Rule(("R", 1), 0, ("R", 1), None, "L"),
            Rule(("R", 1), 1, ("R", 1), None, "L"),
        ]
    )
    config = initial_config(auto)
    outcomes = drive(config, ALL_ZEROS, 10)
    assert isinstance(outcomes[-1], Died)
    assert outcomes[-1].reason == "died:head_out_of_bounds"


def test_reproducing_reads_sentinel_blank():
    # COPIER's final rule fires on the blank one past the last bit.
    term, steps, emitted, out, cursor = run_generation(
        COPIER, encode(COPIER), ALL_ZEROS, 0, 10_000
    )
    assert term == TERM_SPLIT
    assert "".join("01"[b] for b in out) == encode(COPIER)
    assert steps == len(encode(COPIER)) + 2
    assert cursor == 1


def test_lineage_copier_five_generations():
    trace = run_lineage(COPIER, ALL_ZEROS, fuel=100_000, max_generations=5)
    assert len(trace.generations) == 5
    assert trace.terminal == "generation_cap"
    assert len(set(trace.codes())) == 1


def test_lineage_echo_never_splits():
    trace = run_lineage(ECHO, ALL_ZEROS, fuel=100, max_generations=5)
    assert len(trace.generations) == 1
    assert trace.terminal == TERM_FUEL
    assert trace.output == tuple([0] * 100)


def test_lineage_empty():
    trace = run_lineage(EMPTY_AUTOMATON, ALL_ZEROS, fuel=100, max_generations=5)
    assert len(trace.generations) == 1
    assert trace.terminal == TERM_NO_RULE
    assert trace.output == ()


def test_lineage_cursor_carries_over():
    # Two COPIER generations consume one stream symbol each.
    trace = run_lineage(COPIER, ALL_ZEROS, fuel=100_000, max_generations=3)
    assert trace.consumed == 3
    transducer_steps = sum(
        1 for g in trace.generations for _ in range(1)
    )
    assert trace.consumed == transducer_steps


def test_lineage_determinism():
    a = run_lineage(COPIER, periodic(0, 1), fuel=50_000, max_generations=4)
    b = run_lineage(COPIER, periodic(0, 1), fuel=50_000, max_generations=4)
    assert a == b


def test_split_conservation_audit():
    trace = run_lineage(COPIER, ALL_ZEROS, fuel=100_000, max_generations=4, audit=True)
    assert trace.audits
    for audit in trace.audits:
        assert audit.replica.tape == audit.parent_tape
        assert audit.replica.out_tape == ()
        assert audit.replica.state == ("T", 0)
        assert audit.replica.head == 0
        child = audit.offspring
        assert isinstance(child, MachineConfig)
        assert child.tape == "".join("01"[b] for b in audit.parent_out)
        assert child.out_tape == ()
        assert child.state == ("T", 0)
        assert child.head == 0


def test_tree_copier_depth_three():
    tree = run_tree(COPIER, lambda path: ALL_ZEROS, depth=3, fuel=10_000)
    # Every node splits and has both children until the depth bound.
    assert len(tree.nodes) == 2 ** 4 - 1
    for node in tree.nodes.values():
        assert node.code == encode(COPIER)
        if len(node.path) < 3:
            assert node.children == (node.path + "r", node.path + "o")


def test_tree_echo_single_node():
    tree = run_tree(ECHO, lambda path: ALL_ZEROS, depth=3, fuel=100)
    assert len(tree.nodes) == 1
    assert tree.root().terminal == TERM_FUEL


@given(automata(max_rules=8, max_state=3, max_symbol=3), st.integers(0, 3))
@settings(max_examples=40)
def test_fast_loop_matches_step(auto, pick):
    # The tight interpreter loop and the one-step relation must agree.
    streams = [ALL_ZEROS, periodic(0, 1), literal(1, 0, 1, pad=0), periodic(1)]
    stream = streams[pick]
    fuel = 60
    term, steps, emitted, out, cursor = run_generation(
        auto, encode(auto), stream, 0, fuel
    )
    config = initial_config(auto)
    slow_steps = 0
    slow_emitted = []
    slow_out = None
    slow_term = TERM_FUEL
    for _ in range(fuel):
        outcome = step(config, stream)
        if isinstance(outcome, Died):
            slow_term = outcome.reason
            break
        slow_steps += 1
        if isinstance(outcome, SplitNow):
            slow_term = TERM_SPLIT
            slow_out = outcome.replica  # replica of the post-step config
            config = None
            slow_emitted = list(outcome.replica.emitted) or slow_emitted
            break
        config = outcome.config
        slow_emitted = list(config.emitted)
    if slow_term == TERM_SPLIT:
        assert term == TERM_SPLIT
        assert steps == slow_steps
    elif slow_term == TERM_FUEL:
        assert term == TERM_FUEL
        assert steps == fuel
        assert tuple(emitted) == config.emitted
        assert tuple(out) == config.out_tape
        assert cursor == config.stream_cursor
    else:
        assert term == slow_term
        assert steps == slow_steps


@given(automata(max_rules=8, max_state=3, max_symbol=3))
@settings(max_examples=40)
def test_transducer_frame_rule(auto):
    # Transducer steps never touch the tapes.
    config = initial_config(auto)
    stream = periodic(0, 1)
    for _ in range(40):
        outcome = step(config, stream)
        if isinstance(outcome, Died):
            break
        nxt = outcome.config if isinstance(outcome, Continued) else None
        if nxt is None:
            break
        if config.state[0] == "T":
            assert nxt.tape == config.tape
            assert nxt.out_tape == config.out_tape
            assert nxt.stream_cursor == config.stream_cursor + 1
        else:
            assert nxt.emitted == config.emitted
            assert nxt.stream_cursor == config.stream_cursor
            assert len(nxt.out_tape) >= len(config.out_tape)
            assert nxt.out_tape[: len(config.out_tape)] == config.out_tape
        config = nxt
