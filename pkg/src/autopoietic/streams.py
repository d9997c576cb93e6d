"""Input streams: conceptually infinite symbol sources.

Three kinds cover everything the suite needs: the all-zeros stream, a
periodic pattern, and a literal prefix continued by a constant pad.  A
stream is just a description; runs keep their own cursor.

Textual spec syntax (used by the CLI and trace files)::

    zeros                  all sigma_0
    periodic:0110          repeat the pattern
    literal:101+0          the prefix, then pad with sigma_0
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Stream:
    kind: str                      # "zeros" | "periodic" | "literal"
    prefix: tuple[int, ...] = ()
    pad: int = 0
    pattern: tuple[int, ...] = ()

    def at(self, i: int) -> int:
        if self.kind == "zeros":
            return 0
        if self.kind == "periodic":
            return self.pattern[i % len(self.pattern)]
        if i < len(self.prefix):
            return self.prefix[i]
        return self.pad

    def take(self, n: int) -> tuple[int, ...]:
        return tuple(self.at(i) for i in range(n))

    def spec(self) -> str:
        if self.kind == "zeros":
            return "zeros"
        if self.kind == "periodic":
            return "periodic:" + "".join(str(s) for s in self.pattern)
        body = "".join(str(s) for s in self.prefix)
        return f"literal:{body}+{self.pad}"

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.spec()


ALL_ZEROS = Stream(kind="zeros")


def periodic(*pattern: int) -> Stream:
    if not pattern:
        raise ValueError("periodic stream needs a nonempty pattern")
    return Stream(kind="periodic", pattern=tuple(pattern))


def literal(*prefix: int, pad: int = 0) -> Stream:
    return Stream(kind="literal", prefix=tuple(prefix), pad=pad)


def parse_stream(spec: str) -> Stream:
    """Parse the textual syntax; raises ValueError on malformed specs."""
    spec = spec.strip()
    if spec == "zeros":
        return ALL_ZEROS
    if spec.startswith("periodic:"):
        body = spec[len("periodic:"):]
        if not body or not body.isdigit():
            raise ValueError(f"bad periodic stream: {spec!r}")
        return periodic(*(int(c) for c in body))
    if spec.startswith("literal:"):
        body = spec[len("literal:"):]
        prefix, sep, pad = body.partition("+")
        if not sep or not pad.isdigit() or (prefix and not prefix.isdigit()):
            raise ValueError(f"bad literal stream: {spec!r}")
        return literal(*(int(c) for c in prefix), pad=int(pad))
    raise ValueError(f"unknown stream spec: {spec!r}")
