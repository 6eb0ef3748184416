"""Instance model: clients, messages, holdings, and the dual hypergraph.

Clients and messages are numbered from 1 in files, reports and the public
API.  Internally each client's holdings live in a bitmask over message
positions 0..m-1, and `labels` remembers the original message numbers so
sub-instances can report witnesses in the caller's numbering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import InputFormatError

__all__ = [
    "MessageFamily",
    "Hypergraph",
    "parse_network",
    "network_to_json",
    "to_hypergraph",
    "restrict",
    "make_pin",
    "make_cyclic15",
    "make_gap",
]


@dataclass(frozen=True)
class MessageFamily:
    """n clients holding subsets of m independent messages."""

    n: int
    m: int
    masks: tuple[int, ...]
    labels: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputFormatError("need at least one client")
        if self.m < 1:
            raise InputFormatError("need at least one message")
        if len(self.masks) != self.n:
            raise InputFormatError("holdings count does not match client count")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(1, self.m + 1)))
        if len(self.labels) != self.m:
            raise InputFormatError("label count does not match message count")
        full = (1 << self.m) - 1
        union = 0
        for mask in self.masks:
            if mask < 0 or mask > full:
                raise InputFormatError("holding mask out of range")
            union |= mask
        if union != full:
            missing = [self.labels[i] for i in range(self.m) if not (union >> i) & 1]
            raise InputFormatError(f"messages held by nobody: {missing}")

    @classmethod
    def from_holdings(
        cls, n: int, m: int, holdings: Sequence[Iterable[int]]
    ) -> "MessageFamily":
        """Build from 1-based message lists, one per client."""
        if len(holdings) != n:
            raise InputFormatError(f"expected {n} holding lists, got {len(holdings)}")
        masks = []
        for j, hold in enumerate(holdings, start=1):
            mask = 0
            for msg in hold:
                if not isinstance(msg, int) or isinstance(msg, bool):
                    raise InputFormatError(f"client {j}: message index {msg!r} is not an integer")
                if not 1 <= msg <= m:
                    raise InputFormatError(f"client {j}: message {msg} out of range 1..{m}")
                bit = 1 << (msg - 1)
                if mask & bit:
                    raise InputFormatError(f"client {j}: duplicate message {msg}")
                mask |= bit
            masks.append(mask)
        return cls(n, m, tuple(masks))

    @property
    def holdings(self) -> tuple[frozenset[int], ...]:
        """Holdings as frozensets of (original) message labels."""
        return tuple(
            frozenset(self.labels[i] for i in range(self.m) if (mask >> i) & 1)
            for mask in self.masks
        )

    def holding_size(self, client: int) -> int:
        return self.masks[client - 1].bit_count()

    def label_positions(self, msgs: Iterable[int]) -> list[int]:
        """Map labels back to 0-based positions."""
        index = {lab: i for i, lab in enumerate(self.labels)}
        out = []
        for msg in msgs:
            if msg not in index:
                raise InputFormatError(f"unknown message label {msg}")
            out.append(index[msg])
        return out


def parse_network(text: str) -> MessageFamily:
    """Parse the network JSON format: clients, messages, holdings."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or set(data) != {"clients", "messages", "holdings"}:
        raise InputFormatError('expected an object with keys "clients", "messages", "holdings"')
    n, m, holdings = data["clients"], data["messages"], data["holdings"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InputFormatError("clients must be a positive integer")
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise InputFormatError("messages must be a positive integer")
    if not isinstance(holdings, list) or any(not isinstance(h, list) for h in holdings):
        raise InputFormatError("holdings must be a list of lists")
    return MessageFamily.from_holdings(n, m, holdings)


def network_to_json(fam: MessageFamily) -> str:
    """Canonical serialization; holdings sorted ascending, labels dropped."""
    obj = {
        "clients": fam.n,
        "messages": fam.m,
        "holdings": [sorted(i + 1 for i in range(fam.m) if (mask >> i) & 1) for mask in fam.masks],
    }
    return json.dumps(obj, indent=2) + "\n"


@dataclass(frozen=True)
class Hypergraph:
    """Dual view: one vertex per client, one hyperedge per message."""

    n: int
    edge_masks: tuple[int, ...]
    labels: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(1, len(self.edge_masks) + 1)))

    @property
    def m(self) -> int:
        return len(self.edge_masks)

    def edge_members(self, pos: int) -> tuple[int, ...]:
        """1-based clients on the hyperedge at 0-based position pos."""
        mask = self.edge_masks[pos]
        return tuple(j + 1 for j in range(self.n) if (mask >> j) & 1)

    def edge_size(self, pos: int) -> int:
        return self.edge_masks[pos].bit_count()


def to_hypergraph(fam: MessageFamily) -> Hypergraph:
    """Hyperedge e = set of clients holding message e; exact dual of the family."""
    edges = []
    for pos in range(fam.m):
        bit = 1 << pos
        edges.append(sum(1 << j for j in range(fam.n) if fam.masks[j] & bit))
    return Hypergraph(fam.n, tuple(edges), fam.labels)


def restrict(fam: MessageFamily, keep: Iterable[int]) -> MessageFamily:
    """Sub-instance with only the given message labels.

    All n clients stay (possibly with empty holdings); kept messages are
    renumbered to 1..|keep| while `labels` preserves the original numbers.
    """
    keep_sorted = sorted(set(keep))
    if not keep_sorted:
        raise InputFormatError("cannot restrict to an empty message set")
    positions = fam.label_positions(keep_sorted)
    new_masks = []
    for mask in fam.masks:
        sub = 0
        for newpos, oldpos in enumerate(positions):
            if (mask >> oldpos) & 1:
                sub |= 1 << newpos
        new_masks.append(sub)
    labels = tuple(fam.labels[p] for p in positions)
    return MessageFamily(fam.n, len(positions), tuple(new_masks), labels)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def make_pin(n: int) -> MessageFamily:
    """Pairwise-shared-message network: one message per client pair.

    Messages are the pairs of 1..n in lexicographic order, each held by
    exactly its two endpoints, so the dual hypergraph is the complete
    graph K_n.
    """
    if n < 2:
        raise InputFormatError("pairwise network needs at least two clients")
    pairs = list(combinations(range(1, n + 1), 2))
    holdings = [[k + 1 for k, (a, b) in enumerate(pairs) if j in (a, b)] for j in range(1, n + 1)]
    return MessageFamily.from_holdings(n, len(pairs), holdings)


def make_cyclic15() -> MessageFamily:
    """15-client benchmark family closed under the shift i -> (i mod 15)+1.

    Client 1 holds {5,7,10,11,13,14,15}; client j+1 holds the shift of
    client j's set, applied to both message and client numbering.
    """
    base = (5, 7, 10, 11, 13, 14, 15)
    holdings = []
    for j in range(15):
        holdings.append(sorted((i - 1 + j) % 15 + 1 for i in base))
    return MessageFamily.from_holdings(15, 15, holdings)


def make_gap(m: int) -> MessageFamily:
    """Family separating general protocols from scalar-linear ones.

    For even m >= 4: client 1 holds every message, and one client per
    unordered pair {i, j} (in lexicographic order) holds exactly that pair.
    """
    if m < 4 or m % 2:
        raise InputFormatError("gap construction needs an even message count >= 4")
    holdings: list[list[int]] = [list(range(1, m + 1))]
    for a, b in combinations(range(1, m + 1), 2):
        holdings.append([a, b])
    return MessageFamily.from_holdings(len(holdings), m, holdings)
