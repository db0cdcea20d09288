"""Round-synchronous CONGEST simulator.

A node program is a pure transition ``step(ctx, state, inbox)`` returning
``(state, outbox, halt)``.  Messages produced in round ``r`` are delivered at
the boundary and become readable in round ``r + 1``.  Sending along a
non-edge is a hard fault.

Round counting: a round counts when at least one non-halted node executes its
step in it.  Once every node has halted the run ends; messages still in
flight are counted as sent but never read.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Protocol, Sequence

from .graph import Graph, Incidence
from .rng import ENGINE, NodeStream


class CongestViolation(RuntimeError):
    """A node program broke the model contract."""


# --------------------------------------------------------------------------
# Wire encoding: length-prefixed unsigned LEB128 varints
# --------------------------------------------------------------------------

def encode_varint(x: int) -> bytes:
    if x < 0:
        raise ValueError("varints are unsigned")
    out = bytearray()
    while True:
        byte = x & 0x7F
        x >>= 7
        if x:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def decode_varint(buf: bytes, pos: int = 0) -> tuple[int, int]:
    result = 0
    shift = 0
    while True:
        if pos >= len(buf):
            raise ValueError("truncated varint")
        byte = buf[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, pos
        shift += 7


def encode_payload(values: Sequence[int]) -> bytes:
    return encode_varint(len(values)) + b"".join(encode_varint(v) for v in values)


def decode_payload(buf: bytes) -> list[int]:
    if buf and buf[0] == len(buf) - 1 and max(buf) < 0x80:
        # every varint is a single byte
        return list(buf[1:])
    count, pos = decode_varint(buf)
    out = []
    for _ in range(count):
        x, pos = decode_varint(buf, pos)
        out.append(x)
    if pos != len(buf):
        raise ValueError("trailing bytes in payload")
    return out


# --------------------------------------------------------------------------
# Simulator
# --------------------------------------------------------------------------

# Audit threshold for "O(log n) bits": c * ceil(log2 n) + c0.
AUDIT_C = 4
AUDIT_C0 = 64


def message_bit_budget(n: int, c: int = AUDIT_C, c0: int = AUDIT_C0) -> int:
    return c * math.ceil(math.log2(max(n, 1))) + c0


@dataclass(frozen=True, slots=True)
class Message:
    src: int
    dst: int
    payload: bytes

    @property
    def bits(self) -> int:
        return 8 * len(self.payload)


def message_bits(m: Message) -> int:
    return 8 * len(m.payload)


@dataclass
class RoundStats:
    rounds_used: int = 0
    max_message_bits: int = 0
    total_messages: int = 0
    halted: bool = True

    def __add__(self, other: RoundStats) -> RoundStats:
        """Statistics of two phases run back to back."""
        return RoundStats(
            self.rounds_used + other.rounds_used,
            max(self.max_message_bits, other.max_message_bits),
            self.total_messages + other.total_messages,
            self.halted and other.halted,
        )

    def to_dict(self) -> dict:
        return {
            "rounds_used": self.rounds_used,
            "max_message_bits": self.max_message_bits,
            "total_messages": self.total_messages,
            "halted": self.halted,
        }


@dataclass
class NodeContext:
    """Everything a node may read besides its state and inbox."""

    node: int
    round: int
    incidence: tuple[Incidence, ...]
    neighbors: frozenset[int]
    rng: NodeStream
    extra: Any = None  # node-local static knowledge, e.g. its clauses

    def broadcast(self, payload: bytes) -> list[tuple[int, bytes]]:
        return [(inc.neighbor, payload) for inc in self.incidence]


class NodeProgram(Protocol):
    def step(
        self, ctx: NodeContext, state: Any, inbox: list[Message]
    ) -> tuple[Any, list[tuple[int, bytes]], bool]: ...


@dataclass
class _Node:
    ctx: NodeContext
    state: Any
    inbox: list[Message] = field(default_factory=list)
    halted: bool = False


def run_rounds(
    g: Graph,
    program: NodeProgram,
    initial_states: Sequence[Any],
    max_rounds: int,
    seed: int = 0,
    *,
    purpose: int = ENGINE,
    extras: Sequence[Any] | None = None,
) -> tuple[list[Any], RoundStats]:
    """Execute synchronous rounds until every node halts or the budget runs out."""
    if max_rounds < 0:
        raise ValueError("max_rounds must be non-negative")
    n = g.node_count
    if len(initial_states) != n:
        raise ValueError("need one initial state per node")
    nodes = [
        _Node(
            NodeContext(
                v,
                0,
                g.incidence(v),
                frozenset(g.neighbors(v)),
                NodeStream(seed, v, purpose),
                None if extras is None else extras[v],
            ),
            initial_states[v],
        )
        for v in range(n)
    ]
    stats = RoundStats(halted=False)
    r = 0
    while r < max_rounds and not all(x.halted for x in nodes):
        r += 1
        outgoing: list[Message] = []
        # ascending id order; the round is synchronous so any order is equivalent
        for node in nodes:
            if node.halted:
                continue
            node.ctx.round = r
            inbox, node.inbox = node.inbox, []
            state, outbox, halt = program.step(node.ctx, node.state, inbox)
            node.state = state
            src = node.ctx.node
            nbrs = node.ctx.neighbors
            for dst, payload in outbox:
                if dst not in nbrs:
                    raise CongestViolation(
                        f"round {r}: node {src} sent to non-neighbor {dst}"
                    )
                outgoing.append(Message(src, dst, payload))
            node.halted = bool(halt)
        stats.rounds_used = r
        for m in outgoing:
            bits = 8 * len(m.payload)
            if bits > stats.max_message_bits:
                stats.max_message_bits = bits
            nodes[m.dst].inbox.append(m)
        stats.total_messages += len(outgoing)
    stats.halted = all(x.halted for x in nodes)
    return [x.state for x in nodes], stats
