"""Reference machines used across the test suite and the CLI.

ECHO copies its input stream to its output stream forever and never
reproduces.  COPIER consumes one stream symbol, then copies its own code
tape bit for bit and splits; its offspring is itself, so it is a fixed
point of reproduction.
"""

from __future__ import annotations

from .model import Automaton, LEFT, REPRODUCING, RIGHT, Rule, STAY, TRANSDUCER, validate

T = TRANSDUCER
R = REPRODUCING

ECHO = validate(
    [
        Rule((T, 0), 0, (T, 0), 0, STAY),
        Rule((T, 0), 1, (T, 0), 1, STAY),
    ]
)

COPIER = validate(
    [
        Rule((T, 0), 0, (R, 1), None, STAY),
        Rule((R, 1), 0, (R, 1), 0, RIGHT),
        Rule((R, 1), 1, (R, 1), 1, RIGHT),
        Rule((R, 1), 2, (R, 0), None, STAY),
    ]
)

BUILTIN_AUTOMATA: dict[str, Automaton] = {
    "echo": ECHO,
    "copier": COPIER,
}


def _itm(transitions, n_states):
    from .itm import InteractiveTM

    return InteractiveTM(transitions=transitions, n_states=n_states)


def rightwriter():
    """Writes the consumed bit at the head and moves right every step."""
    table = {}
    for x in (0, 1):
        for t in (0, 1, 2):
            table[(0, x, t)] = (0, x, "R", x)
    return _itm(table, 1)


def parity():
    """Emits the running parity of the consumed bits, writing as it goes."""
    table = {}
    for q in (0, 1):
        for x in (0, 1):
            for t in (0, 1, 2):
                q2 = q ^ x
                table[(q, x, t)] = (q2, x, "R", q2)
    return _itm(table, 2)


def stayer():
    """Overwrites square 0 with each consumed bit and echoes the previous one."""
    table = {}
    for q in (0,):
        for x in (0, 1):
            for t in (0, 1, 2):
                table[(q, x, t)] = (q, x, "S", t if t != 2 else 0)
    return _itm(table, 1)


def creeper():
    """Stays to emit, then steps right: exercises mixed S/R one-way moves."""
    table = {}
    for x in (0, 1):
        for t in (0, 1, 2):
            table[(0, x, t)] = (1, x, "S", None)
            table[(1, x, t)] = (0, t, "R", t)
    return _itm(table, 2)


def empty_itm():
    return _itm({}, 1)


def halt1():
    """Classical view: halts immediately (no transitions at all)."""
    return _itm({}, 1)


def looper():
    """Classical view: writes 1 and moves right forever."""
    table = {}
    for x in (0, 1):
        for t in (0, 1, 2):
            table[(0, x, t)] = (0, 1, "R", None)
    return _itm(table, 1)


def halts_after(k: int):
    """Classical view: k right-steps, then no transition."""
    table = {}
    for q in range(k):
        for x in (0, 1):
            for t in (0, 1, 2):
                table[(q, x, t)] = (q + 1, 1, "R", None)
    return _itm(table, max(k + 1, 1))


def zigzag(width: int):
    """Classical machine that sweeps right then left over ``width`` squares.

    Exercises left moves in the halting reduction: it walks right writing
    1s, turns around at ``width``, walks back to square 0 and halts there.
    """
    table = {}
    right = range(width)
    for q in right:
        for x in (0, 1):
            table[(q, x, 0)] = (q + 1, 1, "R", None)
            table[(q, x, 1)] = (q + 1, 1, "R", None)
            table[(q, x, 2)] = (q + 1, 1, "R", None)
    turn = width
    for x in (0, 1):
        for t in (0, 1, 2):
            table[(turn, x, t)] = (turn + 1, t if t != 2 else 0, "L", None)
    back = turn + 1
    for x in (0, 1):
        table[(back, x, 1)] = (back, 0, "L", None)
        # reaching a 0 means we are back at a cleared square: halt by
        # leaving (back, x, 0) undefined
    return _itm(table, width + 2)
