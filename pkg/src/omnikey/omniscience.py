"""Exact minimum broadcast counts for omniscience.

For every nonempty proper client subset S, omniscience requires at least
as many broadcasts from inside S as there are messages nobody outside S
holds.  The smallest integer allocation satisfying all 2^n - 2 subset
constraints is found by branch and bound over per-client counts with
lazily separated constraints; separation scans every subset against a
union table built once per family (n <= 24).

Ties between optimal allocations go to the lexicographically smallest
vector.  `separate` reports the most violated subset, smallest client
bitmask first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence
from weakref import WeakKeyDictionary

import numpy as np

from .errors import InputFormatError, SizeGuardError
from .network import MessageFamily

__all__ = [
    "OmniscienceResult",
    "demand",
    "separate",
    "min_broadcasts",
    "broadcasts_at_most",
    "allocation_feasible",
]

SUBSET_GUARD_N = 24
_NUMPY_MIN_N = 9
_BIG = 1 << 30


@dataclass(frozen=True)
class OmniscienceResult:
    """Optimal broadcast count with its allocation and binding subsets."""

    total: int
    allocation: tuple[int, ...]
    tight_sets: tuple[frozenset[int], ...]


def demand(fam: MessageFamily, subset: Iterable[int]) -> int:
    """Messages that no client outside `subset` (1-based ids) holds."""
    chosen = set(subset)
    if not chosen or not chosen.issubset(range(1, fam.n + 1)):
        raise InputFormatError("subset must contain valid client ids")
    if len(chosen) == fam.n:
        raise InputFormatError("subset must be a proper subset of the clients")
    outside = 0
    for j in range(fam.n):
        if (j + 1) not in chosen:
            outside |= fam.masks[j]
    return fam.m - outside.bit_count()


# ---------------------------------------------------------------------------
# per-family tables
# ---------------------------------------------------------------------------


class _Tables:
    """Subset-indexed unions of holdings, shared by all solves on a family."""

    def __init__(self, fam: MessageFamily):
        if fam.n > SUBSET_GUARD_N:
            raise SizeGuardError(
                f"subset separation supports at most {SUBSET_GUARD_N} clients, got {fam.n}"
            )
        self.n = fam.n
        self.m = fam.m
        self.masks = fam.masks
        self.full_vars = (1 << fam.n) - 1
        self.full_msgs = (1 << fam.m) - 1
        size = 1 << fam.n
        if fam.n >= _NUMPY_MIN_N and fam.m <= 63:
            arr = np.zeros(size, dtype=np.uint64)
            for j in range(fam.n):
                half = 1 << j
                arr[half : 2 * half] = arr[:half] | np.uint64(fam.masks[j])
            self.np_unions: np.ndarray | None = arr
            self.py_unions: list[int] | None = None
        else:
            lst = [0] * size
            for j in range(fam.n):
                half = 1 << j
                mj = fam.masks[j]
                for s in range(half):
                    lst[half + s] = lst[s] | mj
            self.py_unions = lst
            self.np_unions = None

    def union_of(self, subset_mask: int) -> int:
        if self.py_unions is not None:
            return self.py_unions[subset_mask]
        return int(self.np_unions[subset_mask])

    def need(self, keep: int, subset_mask: int) -> int:
        """Constraint right-hand side for one subset under a message filter."""
        outside = self.union_of(self.full_vars ^ subset_mask)
        return keep.bit_count() - (outside & keep).bit_count()

    def rhs_for(self, keep: int):
        """Right-hand sides for every subset index (numpy array or list)."""
        mk = keep.bit_count()
        if self.np_unions is not None:
            rev = self.np_unions[::-1]
            pc = _np_popcount(rev & np.uint64(keep))
            return mk - pc.astype(np.int64)
        full = self.full_vars
        u = self.py_unions
        return [mk - (u[full ^ s] & keep).bit_count() for s in range(full + 1)]

    def most_violated(self, alloc: Sequence[int], rhs) -> tuple[int, int] | None:
        """(subset_mask, need) with the largest shortfall, or None if feasible."""
        full = self.full_vars
        if self.np_unions is not None:
            asum = np.zeros(full + 1, dtype=np.int64)
            for j, aj in enumerate(alloc):
                half = 1 << j
                asum[half : 2 * half] = asum[:half] + aj
            diff = rhs - asum
            diff[0] = -1
            diff[full] = -1
            idx = int(np.argmax(diff))
            if diff[idx] <= 0:
                return None
            return idx, int(rhs[idx])
        asum = [0] * (full + 1)
        for j, aj in enumerate(alloc):
            half = 1 << j
            for s in range(half):
                asum[half + s] = asum[s] + aj
        best_mask, best_viol = -1, 0
        for s in range(1, full):
            v = rhs[s] - asum[s]
            if v > best_viol:
                best_viol, best_mask = v, s
        if best_mask < 0:
            return None
        return best_mask, rhs[best_mask]

    def tight_masks(self, alloc: Sequence[int], rhs) -> list[int]:
        full = self.full_vars
        if self.np_unions is not None:
            asum = np.zeros(full + 1, dtype=np.int64)
            for j, aj in enumerate(alloc):
                half = 1 << j
                asum[half : 2 * half] = asum[:half] + aj
            eq = np.nonzero(asum == rhs)[0]
            return [int(s) for s in eq if 0 < s < full]
        asum = [0] * (full + 1)
        for j, aj in enumerate(alloc):
            half = 1 << j
            for s in range(half):
                asum[half + s] = asum[s] + aj
        return [s for s in range(1, full) if asum[s] == rhs[s]]


def _np_popcount(arr: np.ndarray) -> np.ndarray:
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(arr)
    # SWAR fallback for older numpy
    x = arr.copy()
    m1 = np.uint64(0x5555555555555555)
    m2 = np.uint64(0x3333333333333333)
    m4 = np.uint64(0x0F0F0F0F0F0F0F0F)
    h01 = np.uint64(0x0101010101010101)
    x = x - ((x >> np.uint64(1)) & m1)
    x = (x & m2) + ((x >> np.uint64(2)) & m2)
    x = (x + (x >> np.uint64(4))) & m4
    return (x * h01) >> np.uint64(56)


_table_cache: "WeakKeyDictionary[MessageFamily, _Tables]" = WeakKeyDictionary()


def _family_tables(fam: MessageFamily) -> _Tables:
    tables = _table_cache.get(fam)
    if tables is None:
        tables = _Tables(fam)
        _table_cache[fam] = tables
    return tables


# ---------------------------------------------------------------------------
# covering solver over an explicit constraint list
# ---------------------------------------------------------------------------


def _disjoint_bound(res: list[int], masks: list[int], unassigned: int) -> int:
    """Admissible lower bound: residuals of constraints whose open supports
    are pairwise disjoint must be paid separately."""
    order = sorted(
        (i for i in range(len(res)) if res[i] > 0), key=lambda i: (-res[i], i)
    )
    lb = 0
    picked = 0
    for i in order:
        sup = masks[i] & unassigned
        if sup == 0:
            return _BIG
        if sup & picked == 0:
            lb += res[i]
            picked |= sup
    return lb


def _dfs_budget(
    masks: list[int], needs: list[int], cons_at: list[list[int]], n: int, budget: int
) -> list[int] | None:
    """First feasible allocation with total <= budget, values tried ascending
    per client, or None.  The first hit is the lexicographically smallest."""
    a = [0] * n
    res = list(needs)
    full = (1 << n) - 1

    def rec(j: int, left: int) -> bool:
        if max(res, default=0) <= 0:
            for t in range(j, n):
                a[t] = 0
            return True
        if j == n:
            return False
        unassigned = full & ~((1 << j) - 1)
        if _disjoint_bound(res, masks, unassigned) > left:
            return False
        cap = 0
        for i in cons_at[j]:
            if res[i] > cap:
                cap = res[i]
        if cap > left:
            cap = left
        sub = cons_at[j]
        a[j] = 0
        ok = rec(j + 1, left)
        val = 0
        while not ok and val < cap:
            val += 1
            for i in sub:
                res[i] -= 1
            a[j] = val
            ok = rec(j + 1, left - val)
        for i in sub:
            res[i] += val
        if not ok:
            a[j] = 0
        return ok

    if rec(0, budget):
        return list(a)
    return None


def _cover_optimize(masks: list[int], needs: list[int], n: int) -> list[int]:
    """Exact minimum-total solution of the explicit covering system,
    lexicographically smallest among the optima."""
    cons_at = [[i for i, mk in enumerate(masks) if (mk >> j) & 1] for j in range(n)]
    lb = _quick_lb(masks, needs, n)
    # greedy repair gives a finite upper bound
    a = [0] * n
    for i in sorted(range(len(needs)), key=lambda i: (-needs[i], i)):
        have = sum(a[j] for j in range(n) if (masks[i] >> j) & 1)
        deficit = needs[i] - have
        if deficit > 0:
            lowest = (masks[i] & -masks[i]).bit_length() - 1
            a[lowest] += deficit
    ub = sum(a)
    for total in range(lb, ub + 1):
        sol = _dfs_budget(masks, needs, cons_at, n, total)
        if sol is not None:
            return sol
    raise AssertionError("covering search missed its own upper bound")  # pragma: no cover


def _quick_lb(masks: list[int], needs: list[int], n: int) -> int:
    """Cheap lower bounds: disjoint supports, plus the averaging bound from
    summing all (n-1)-subset constraints."""
    lb = _disjoint_bound(list(needs), masks, (1 << n) - 1)
    if lb >= _BIG:
        return lb
    co_total = 0
    single_total = 0
    for mk, nd in zip(masks, needs):
        bits = mk.bit_count()
        if bits == n - 1:
            co_total += nd
        elif bits == 1:
            single_total += nd
    if n > 1:
        lb = max(lb, -(-co_total // (n - 1)))
    return max(lb, single_total)


# ---------------------------------------------------------------------------
# lazy-constraint wrappers
# ---------------------------------------------------------------------------


def _seed_constraints(tables: _Tables, keep: int) -> dict[int, int]:
    """Singleton and co-singleton constraints with positive need."""
    seeds: dict[int, int] = {}
    for j in range(tables.n):
        for mask in (1 << j, tables.full_vars ^ (1 << j)):
            if 0 < mask < tables.full_vars and mask not in seeds:
                nd = tables.need(keep, mask)
                if nd > 0:
                    seeds[mask] = nd
    return seeds


def _optimize_keep(tables: _Tables, keep: int):
    """Exact optimum for the family filtered to `keep` message positions.

    Returns (total, allocation, rhs_array_or_None)."""
    n = tables.n
    if n == 1:
        return 0, (0,), None
    seeds = _seed_constraints(tables, keep)
    masks = list(seeds)
    needs = [seeds[mk] for mk in masks]
    rhs = tables.rhs_for(keep)
    known = set(masks)
    while True:
        vec = _cover_optimize(masks, needs, n)
        viol = tables.most_violated(vec, rhs)
        if viol is None:
            return sum(vec), tuple(vec), rhs
        mask, nd = viol
        assert mask not in known
        known.add(mask)
        masks.append(mask)
        needs.append(nd)


def _decision_keep(tables: _Tables, keep: int, budget: int) -> bool:
    """True iff the filtered instance admits omniscience within `budget`."""
    if budget < 0:
        return False
    n = tables.n
    if n == 1:
        return True
    seeds = _seed_constraints(tables, keep)
    masks = list(seeds)
    needs = [seeds[mk] for mk in masks]
    if _quick_lb(masks, needs, n) > budget:
        return False
    cons_at = [[i for i, mk in enumerate(masks) if (mk >> j) & 1] for j in range(n)]
    rhs = None
    known = set(masks)
    while True:
        sol = _dfs_budget(masks, needs, cons_at, n, budget)
        if sol is None:
            return False
        if rhs is None:
            rhs = tables.rhs_for(keep)
        viol = tables.most_violated(sol, rhs)
        if viol is None:
            return True
        mask, nd = viol
        assert mask not in known
        known.add(mask)
        masks.append(mask)
        needs.append(nd)
        idx = len(masks) - 1
        for j in range(n):
            if (mask >> j) & 1:
                cons_at[j].append(idx)


# ---------------------------------------------------------------------------
# public surface
# ---------------------------------------------------------------------------


def min_broadcasts(fam: MessageFamily) -> OmniscienceResult:
    """Exact minimum number of broadcasts for every client to learn every
    message, with the lexicographically smallest optimal allocation."""
    if fam.n == 1:
        return OmniscienceResult(0, (0,), ())
    tables = _family_tables(fam)
    total, vec, rhs = _optimize_keep(tables, tables.full_msgs)
    tight = tables.tight_masks(vec, rhs)
    sets = tuple(
        frozenset(j + 1 for j in range(fam.n) if (mask >> j) & 1) for mask in tight
    )
    return OmniscienceResult(total, vec, sets)


def broadcasts_at_most(fam: MessageFamily, budget: int) -> bool:
    """Decision form of `min_broadcasts`, cheaper when only a bound matters."""
    if fam.n == 1:
        return budget >= 0
    tables = _family_tables(fam)
    return _decision_keep(tables, tables.full_msgs, budget)


def separate(fam: MessageFamily, allocation: Sequence[int]) -> frozenset[int] | None:
    """Most violated client subset for an allocation, or None if feasible.

    Ties go to the subset with the smallest client bitmask."""
    if len(allocation) != fam.n:
        raise InputFormatError("allocation length must equal the client count")
    if any(a < 0 for a in allocation):
        raise InputFormatError("allocation entries must be nonnegative")
    if fam.n == 1:
        return None
    tables = _family_tables(fam)
    rhs = tables.rhs_for(tables.full_msgs)
    viol = tables.most_violated(allocation, rhs)
    if viol is None:
        return None
    mask, _ = viol
    return frozenset(j + 1 for j in range(fam.n) if (mask >> j) & 1)


def allocation_feasible(fam: MessageFamily, allocation: Sequence[int]) -> bool:
    """True iff the allocation satisfies every subset constraint."""
    return separate(fam, allocation) is None
