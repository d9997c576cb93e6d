import random

import pytest
from hypothesis import given

from autopoietic.model import (
    Automaton,
    BadDirection,
    DuplicateKey,
    EMPTY_AUTOMATON,
    Rule,
    RuleFromSplitState,
    TruncatedCode,
    complexity_index,
    decode,
    encode,
    parse_rules,
    random_automaton,
    unary,
    validate,
)
from autopoietic.fixtures import COPIER, ECHO

from .strategies import automata


def grammar_encode(rule):
    # Independent field-by-field rendering of the documented grammar,
    # kept separate from encode_rule on purpose.
    def mode(m):
        return unary(0) if m == "T" else unary(1)

    fields = [
        mode(rule.current[0]),
        unary(rule.current[1]),
        unary(rule.observed),
        mode(rule.target[0]),
        unary(rule.target[1]),
        unary(0) if rule.written is None else unary(rule.written + 1),
        unary({"S": 0, "L": 1, "R": 2}[rule.direction]),
    ]
    return "".join(fields)


def test_single_rule_golden():
    rule = Rule(("T", 0), 0, ("T", 0), 0, "S")
    assert grammar_encode(rule) == "00000100"
    assert encode(validate([rule])) == "00000100"


def test_echo_golden():
    assert encode(ECHO) == "000001000010001100"
    assert encode(ECHO) == "".join(grammar_encode(r) for r in ECHO.rules)


def test_copier_golden():
    code = encode(COPIER)
    assert code == "".join(grammar_encode(r) for r in COPIER.rules)
    assert len(code) == 51
    assert decode(code).rules == COPIER.rules


def test_empty_automaton():
    assert validate([]).rules == ()
    assert encode(EMPTY_AUTOMATON) == ""
    assert decode("").rules == ()
    assert complexity_index(EMPTY_AUTOMATON) == 0


def test_validate_bounds():
    assert ECHO.state_bound == 1
    assert ECHO.alphabet_bound == 2
    assert COPIER.state_bound == 2
    assert COPIER.alphabet_bound == 3


def test_duplicate_key_rejected():
    rules = [
        Rule(("T", 0), 0, ("T", 0), 0, "S"),
        Rule(("T", 0), 0, ("T", 0), 1, "S"),
    ]
    with pytest.raises(DuplicateKey):
        validate(rules)


def test_identical_repeat_is_kept():
    rule = Rule(("T", 0), 0, ("T", 0), 0, "S")
    auto = validate([rule, rule])
    assert len(auto.rules) == 2


def test_bad_direction_rejected():
    with pytest.raises(BadDirection):
        validate([Rule(("T", 0), 0, ("T", 0), 0, "R")])


def test_split_state_source_rejected():
    with pytest.raises(RuleFromSplitState):
        validate([Rule(("R", 0), 0, ("T", 0), 0, "S")])


def test_truncated():
    with pytest.raises(TruncatedCode):
        decode("1")


def test_two_rule_duplicate_key_tape():
    bits = encode(validate([Rule(("T", 0), 0, ("T", 0), 0, "S")]))
    tape = bits + "".join(
        [
            "0",  # mode T
            "0",  # index 0
            "0",  # observed 0
            "0",  # mode T
            "0",  # index 0
            "110",  # written sigma_1: action differs from rule one
            "0",
        ]
    )
    with pytest.raises(DuplicateKey):
        decode(tape)


def test_complexity_examples():
    assert complexity_index(ECHO) == 2
    # COPIER: evaluate the definition directly.
    direct = max(
        len(COPIER.rules),
        max(max(r.current[1], r.target[1]) for r in COPIER.rules),
        max(
            max(r.observed, -1 if r.written is None else r.written)
            for r in COPIER.rules
        ),
    )
    assert complexity_index(COPIER) == direct == 4


@given(automata())
def test_round_trip(auto):
    assert decode(encode(auto)).rules == auto.rules


def test_round_trip_bulk():
    rng = random.Random(1234)
    for _ in range(10_000):
        auto = random_automaton(rng)
        assert decode(encode(auto)).rules == auto.rules


@given(automata())
def test_parse_stability_under_extension(auto):
    # A valid prefix parses to the same rules inside any valid extension.
    extension = encode(auto) + encode(ECHO)
    parsed = parse_rules(extension)
    assert parsed[: len(auto.rules)] == auto.rules


@given(automata())
def test_validate_order_insensitive(auto):
    rng = random.Random(7)
    perm = list(auto.rules)
    rng.shuffle(perm)
    assert validate(perm).state_bound == auto.state_bound
    assert validate(perm).alphabet_bound == auto.alphabet_bound


def test_fuzzed_decode_never_misparses(rng):
    # Arbitrary bit strings either decode or raise a CodeError subclass;
    # whenever they decode, re-encoding reproduces the input bits.
    for _ in range(2000):
        bits = "".join(rng.choice("01") for _ in range(rng.randint(0, 64)))
        try:
            auto = decode(bits)
        except Exception as err:
            from autopoietic.model import CodeError

            assert isinstance(err, CodeError)
            continue
        assert encode(auto) == bits


def test_mode_consistency_rejections_are_transducer_moves(rng):
    # Every rule rejected by the direction check has a transducer current
    # and a non-stay direction.
    for _ in range(500):
        auto = random_automaton(rng, max_rules=6, max_state=3, max_symbol=3)
        for i, rule in enumerate(auto.rules):
            for d in ("L", "R"):
                broken = list(auto.rules)
                broken[i] = Rule(rule.current, rule.observed, rule.target, rule.written, d)
                if rule.current[0] == "T":
                    with pytest.raises(BadDirection):
                        validate(broken)
