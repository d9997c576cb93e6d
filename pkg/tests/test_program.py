from autopoietic.machine import run_generation, TERM_SPLIT
from autopoietic.model import REPRODUCING, Rule, TRANSDUCER, validate
from autopoietic.program import (
    ANY01,
    ProgBuilder,
    SPLIT_TARGET,
    copy_field,
    echo_fields,
    lit,
    skip_fields,
    walk_back,
)
from autopoietic.streams import ALL_ZEROS


def run_prog(pb, entry, tape, fuel=100_000):
    """Drive a reproducing program over an arbitrary tape."""
    rules, index = pb.build()
    driver = Rule((TRANSDUCER, 0), 0, (REPRODUCING, index[entry]), None, "S")
    auto = validate([driver] + rules)
    term, steps, emitted, out, cursor = run_generation(auto, tape, ALL_ZEROS, 0, fuel)
    return term, "".join(str(s) for s in out)


def test_lit_writer():
    pb = ProgBuilder()
    done = pb.state("done")
    pb.rule(done, ANY01 + (2,), SPLIT_TARGET)
    entry = lit(pb, "w", "10110", done, obs=(0, 1, 2))
    term, out = run_prog(pb, entry, "0")
    assert term == TERM_SPLIT
    assert out == "10110"


def test_copy_field_identity():
    pb = ProgBuilder()
    done = pb.state("done")
    pb.rule(done, (0, 1, 2), SPLIT_TARGET)
    entry = copy_field(pb, "c", done, mult=1, bias=0)
    term, out = run_prog(pb, entry, "1110" + "1")
    assert term == TERM_SPLIT
    assert out == "1110"


def test_copy_field_affine():
    pb = ProgBuilder()
    done = pb.state("done")
    pb.rule(done, (0, 1, 2), SPLIT_TARGET)
    entry = copy_field(pb, "c", done, mult=3, bias=2)
    term, out = run_prog(pb, entry, "110" )
    # 2 ones in, 3*2+2 = 8 ones out
    assert term == TERM_SPLIT
    assert out == "1" * 8 + "0"


def test_copy_field_negative_bias_lag():
    pb = ProgBuilder()
    done = pb.state("done")
    pb.rule(done, (0, 1, 2), SPLIT_TARGET)
    entry = copy_field(pb, "c", done, mult=3, bias=-4)
    term, out = run_prog(pb, entry, "1110")
    # 3 ones in, 3*3-4 = 5 ones out
    assert term == TERM_SPLIT
    assert out == "1" * 5 + "0"


def test_copy_field_zero_value():
    pb = ProgBuilder()
    done = pb.state("done")
    pb.rule(done, (0, 1, 2), SPLIT_TARGET)
    entry = copy_field(pb, "c", done, mult=3, bias=1)
    term, out = run_prog(pb, entry, "0")
    assert term == TERM_SPLIT
    assert out == "10"


def test_walk_back_parks_on_terminator():
    # walk_back parks ON the z-th zero; re-reading a field means parking
    # on the terminator before it and stepping right.
    pb = ProgBuilder()
    done = pb.state("done")
    pb.rule(done, (0, 1, 2), SPLIT_TARGET)
    echo = echo_fields(pb, "e", 1, done)
    step = pb.state("step")
    pb.rule(step, 0, echo, move="R")
    back = walk_back(pb, "b", 2, step)
    fwd = skip_fields(pb, "s", 2, back)
    # Two fields; after skipping both, walk back two zeros, step right,
    # and re-echo the second field.
    term, out = run_prog(pb, fwd, "10110")
    assert term == TERM_SPLIT
    assert out == "110"


def test_skip_fields_positions():
    pb = ProgBuilder()
    done = pb.state("done")
    pb.rule(done, (0, 1, 2), SPLIT_TARGET)
    tail = echo_fields(pb, "e", 1, done)
    entry = skip_fields(pb, "s", 2, tail)
    term, out = run_prog(pb, entry, "10" + "0" + "110")
    assert term == TERM_SPLIT
    assert out == "110"


def test_build_pins_and_order():
    pb = ProgBuilder()
    pb.rule("a", 0, SPLIT_TARGET)
    pb.rule("b", 0, "a")
    pb.pin("b", 5)
    rules, index = pb.build(hot=["a"])
    assert index["b"] == 5
    assert index["a"] == 1
    assert all(r.current[0] == "R" for r in rules)
