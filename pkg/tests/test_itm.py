import pytest

from autopoietic.fixtures import COPIER, ECHO, empty_itm, parity, rightwriter
from autopoietic.itm import (
    InteractiveTM,
    decode_symbol_stream,
    run_itm,
    simulate_lineage_as_tm,
)
from autopoietic.machine import run_lineage
from autopoietic.model import EMPTY_AUTOMATON
from autopoietic.streams import ALL_ZEROS, literal, periodic


def test_parity_oracle():
    # Hand-evaluated parity of 1,1,0,1 prefix sums: 1,0,0,1.
    run = run_itm(parity(), literal(1, 1, 0, 1, pad=0), fuel=4)
    assert run.emitted == (1, 0, 0, 1)
    assert run.steps == 4
    assert not run.halted


def test_empty_itm_halts_at_zero():
    run = run_itm(empty_itm(), ALL_ZEROS, fuel=10)
    assert run.halted
    assert run.steps == 0
    assert run.emitted == ()


def test_rightwriter_used_squares():
    run = run_itm(rightwriter(), ALL_ZEROS, fuel=10)
    assert run.used_squares == 10
    assert run.tape[:10] == tuple([0] * 10)


def test_lock_step_consumption():
    run = run_itm(parity(), periodic(1, 0), fuel=7)
    assert run.steps == 7
    run2 = run_itm(empty_itm(), periodic(1, 0), fuel=7)
    assert run2.steps == 0


def test_bad_alphabet_rejected():
    with pytest.raises(ValueError):
        InteractiveTM(transitions={(0, 0, 5): (0, 0, "S", None)}, n_states=1)


def equivalent(seed, stream, fuel):
    sim = simulate_lineage_as_tm(seed, stream, fuel)
    trace = run_lineage(seed, stream, fuel=fuel, max_generations=fuel + 1)
    assert decode_symbol_stream(sim.emitted_bits) == trace.output
    return sim, trace


def test_reference_sim_copier_zeros():
    sim, trace = equivalent(COPIER, ALL_ZEROS, 1000)
    assert sim.generations > 10
    assert len(set(sim.stored_lengths)) == 1


def test_reference_sim_echo_periodic():
    sim, trace = equivalent(ECHO, periodic(0, 1), 200)
    assert decode_symbol_stream(sim.emitted_bits) == periodic(0, 1).take(200)


def test_reference_sim_empty():
    sim, trace = equivalent(EMPTY_AUTOMATON, ALL_ZEROS, 50)
    assert sim.emitted_bits == ""
    assert sim.stalled


def test_reference_sim_registers_fixed():
    sims = [
        simulate_lineage_as_tm(COPIER, ALL_ZEROS, fuel)
        for fuel in (10, 100, 1000)
    ]
    names = {s.register_names for s in sims}
    assert len(names) == 1
    assert len(sims[0].register_names) == len(set(sims[0].register_names))
