"""Shared brute-force reference implementations.

Everything in here recomputes answers the slow, obviously-correct way:
enumerate every allocation, every message subset, every partition.  The
real solvers are checked against these on families small enough that
exhaustion finishes quickly.
"""

from __future__ import annotations

import itertools
import random
from math import inf

from omnikey import MessageFamily


def union_size(fam: MessageFamily, clients) -> int:
    mask = 0
    for j in clients:
        mask |= fam.masks[j]
    return bin(mask).count("1")


def brute_feasible(fam: MessageFamily, alloc) -> bool:
    """Check every cut constraint by direct enumeration."""
    n = fam.n
    for bits in range(1, (1 << n) - 1):
        senders = [j for j in range(n) if bits >> j & 1]
        rest = [j for j in range(n) if not bits >> j & 1]
        if sum(alloc[j] for j in senders) < fam.m - union_size(fam, rest):
            return False
    return True


def brute_min_broadcasts(fam: MessageFamily):
    """Exhaust all allocations; return (total, lex-least optimal vector)."""
    if fam.n == 1:
        return 0, (0,)
    best_total = None
    best_vec = None
    for vec in itertools.product(range(fam.m + 1), repeat=fam.n):
        if not brute_feasible(fam, vec):
            continue
        total = sum(vec)
        if best_total is None or total < best_total:
            best_total = total
            best_vec = vec
    return best_total, best_vec


def brute_restrict_total(fam: MessageFamily, keep) -> int:
    """Minimum broadcast total for the subfamily on the kept messages."""
    kept = sorted(keep)
    if fam.n == 1:
        return 0
    positions = {msg: i for i, msg in enumerate(kept)}
    holdings = []
    for j in range(fam.n):
        holdings.append([positions[msg] + 1 for msg in kept if fam.masks[j] >> (msg - 1) & 1])
    sub = MessageFamily.from_holdings(fam.n, len(kept), holdings)
    total, _ = brute_min_broadcasts(sub)
    return total


def brute_sk_cost(fam: MessageFamily, tau: int):
    """Smallest support that leaves tau keys after exchange.

    Returns (cost, support) with the lexicographically first witness,
    or (inf, None) when no message subset works.
    """
    messages = range(1, fam.m + 1)
    for size in range(tau, fam.m + 1):
        for combo in itertools.combinations(messages, size):
            if brute_restrict_total(fam, combo) <= size - tau:
                return size - tau, combo
    return inf, None


def brute_max_keys(fam: MessageFamily) -> int:
    total, _ = brute_min_broadcasts(fam)
    return fam.m - total


def brute_set_cover(universe, sets):
    """First cover of minimum size in combination order, else None."""
    need = set(universe)
    indices = range(1, len(sets) + 1)
    for size in range(1, len(sets) + 1):
        for combo in itertools.combinations(indices, size):
            got = set()
            for i in combo:
                got.update(sets[i - 1])
            if need <= got:
                return combo
    return None


def brute_partitions(items):
    """Every partition of items, built by inserting one element at a time."""
    items = list(items)
    if not items:
        return [[]]
    head, rest = items[0], items[1:]
    out = []
    for smaller in brute_partitions(rest):
        for i in range(len(smaller)):
            out.append(smaller[:i] + [smaller[i] + [head]] + smaller[i + 1 :])
        out.append([[head]] + smaller)
    return out


def nash_williams_bound(n: int, edges) -> int:
    """Tree packing limit from the partition formula.

    For every partition of the vertices the packing cannot exceed
    crossing / (blocks - 1); the true maximum equals the minimum of
    that ratio over all partitions with at least two blocks.
    """
    best = None
    for part in brute_partitions(range(1, n + 1)):
        if len(part) < 2:
            continue
        block_of = {}
        for b, block in enumerate(part):
            for v in block:
                block_of[v] = b
        crossing = sum(1 for u, v in edges if block_of[u] != block_of[v])
        ratio = crossing // (len(part) - 1)
        if best is None or ratio < best:
            best = ratio
    return best if best is not None else 0


def spanning_tree_ok(n: int, tree_edges) -> bool:
    """True when the edges form a spanning tree on vertices 1..n."""
    if len(tree_edges) != n - 1:
        return False
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in tree_edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def random_family(rng: random.Random, n: int, m: int) -> MessageFamily:
    """Random holdings where every message has at least one holder."""
    while True:
        masks = [0] * n
        for msg in range(m):
            holders = rng.sample(range(n), rng.randint(1, n))
            for j in holders:
                if rng.random() < 0.6:
                    masks[j] |= 1 << msg
        for msg in range(m):
            if not any(masks[j] >> msg & 1 for j in range(n)):
                masks[rng.randrange(n)] |= 1 << msg
        if any(masks):
            holdings = [
                [msg + 1 for msg in range(m) if masks[j] >> msg & 1] for j in range(n)
            ]
            return MessageFamily.from_holdings(n, m, holdings)
