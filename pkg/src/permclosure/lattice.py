"""Subgroup enumeration for small groups, for exhaustive test grids.

Elements are indexed into a multiplication table; subgroups are bitmasks
over element indices.  The lattice is built bottom-up by joining class
representatives with cyclic subgroups; join results are deduped against the
set of all conjugates of the classes found so far, so each class pays for
its conjugate orbit exactly once.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .budget import default_budget
from .perm import GroupHandle, Permutation, reduce_generators


class ElementTable:
    """All elements of a small group with its multiplication table."""

    def __init__(self, G: GroupHandle, cap: int = 5000):
        budget = default_budget()
        order = G.order()
        budget.check("lattice group order", order, cap)
        self.group = G
        self.elements = sorted(G.elements(limit=cap))
        n = len(self.elements)
        rows = np.array([e.images for e in self.elements], dtype=np.int32)
        self._rows = rows
        row_index = {e.images: i for i, e in enumerate(self.elements)}
        self.index = row_index
        table = np.empty((n, n), dtype=np.int32)
        for i in range(n):
            composed = rows[:, rows[i]]  # row b = images of (element i, then b)
            table[i] = [row_index[tuple(map(int, r))] for r in composed]
        self.table = table
        self.inverse = np.empty(n, dtype=np.int32)
        ident = tuple(range(G.degree))
        self.identity_index = row_index[ident]
        for i in range(n):
            self.inverse[i] = int(np.nonzero(table[i] == self.identity_index)[0][0])
        self._conj = None

    @property
    def conj_table(self) -> np.ndarray:
        """conj[g, x] = index of g^-1 * x * g."""
        if self._conj is None:
            n = len(self.elements)
            conj = np.empty((n, n), dtype=np.int32)
            for g in range(n):
                ginv = int(self.inverse[g])
                conj[g] = self.table[ginv][self.table[:, g]]
            self._conj = conj
        return self._conj

    def close(self, gens) -> np.ndarray:
        """Indices of the subgroup generated by the given element indices.

        BFS by right multiplication with the generators (positive words
        suffice in a finite group).
        """
        gens = np.unique(np.asarray(gens, dtype=np.int64))
        els = np.array([self.identity_index], dtype=np.int64)
        frontier = els
        while frontier.size:
            prods = np.unique(self.table[np.ix_(frontier, gens)].astype(np.int64))
            new = np.setdiff1d(prods, els, assume_unique=False)
            if new.size == 0:
                break
            els = np.union1d(els, new)
            frontier = new
        return els

    @staticmethod
    def mask_of(idx) -> int:
        m = 0
        for i in idx:
            m |= 1 << int(i)
        return m

    @staticmethod
    def idx_of(mask: int) -> np.ndarray:
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(i)
            mask >>= 1
            i += 1
        return np.array(out, dtype=np.int64)

    def conjugates_of(self, mask: int) -> set[int]:
        idx = self.idx_of(mask)
        all_conj = self.conj_table[:, idx]
        return {self.mask_of(row) for row in all_conj}

    def handle(self, mask: int) -> GroupHandle:
        members = [self.elements[int(i)] for i in self.idx_of(mask)]
        return reduce_generators(GroupHandle(self.group.degree, members))


def _cyclic_masks(tab: ElementTable) -> list[tuple[int, int]]:
    """(mask, generator index) per distinct cyclic subgroup."""
    seen = set()
    out = []
    for i in range(len(tab.elements)):
        m = tab.mask_of(tab.close([i]))
        if m not in seen:
            seen.add(m)
            out.append((m, i))
    return out


def subgroup_masks(tab: ElementTable) -> tuple[list[int], list[int]]:
    """(all subgroup masks, one representative mask per conjugacy class)."""
    cyclics = _cyclic_masks(tab)
    reps: list[int] = []
    known: set[int] = set()

    def register(mask: int) -> bool:
        if mask in known:
            return False
        reps.append(mask)
        known.update(tab.conjugates_of(mask))
        return True

    register(tab.mask_of([tab.identity_index]))
    queue: list[tuple[int, tuple[int, ...]]] = []
    for mask, gen in cyclics:
        if register(mask):
            queue.append((mask, (gen,)))
    while queue:
        nxt = []
        for s_mask, s_gens in queue:
            for c_mask, c_gen in cyclics:
                if c_mask & s_mask == c_mask:
                    continue
                gens = s_gens + (c_gen,)
                joined = tab.mask_of(tab.close(gens))
                if register(joined):
                    nxt.append((joined, gens))
        queue = nxt
    return sorted(known), sorted(reps)


@lru_cache(maxsize=16)
def _lattice_for_symmetric(n: int):
    from .perm import symmetric_group

    tab = ElementTable(symmetric_group(n))
    masks, reps = subgroup_masks(tab)
    return tab, masks, reps


def all_subgroups_of_symmetric(n: int) -> list[GroupHandle]:
    tab, masks, _ = _lattice_for_symmetric(n)
    return [tab.handle(m) for m in masks]


def symmetric_subgroups_up_to_conjugacy(n: int) -> list[GroupHandle]:
    tab, _, reps = _lattice_for_symmetric(n)
    return [tab.handle(m) for m in reps]


def subgroups_up_to_conjugacy(G: GroupHandle, cap: int = 5000) -> list[GroupHandle]:
    tab = ElementTable(G, cap)
    _, reps = subgroup_masks(tab)
    return [tab.handle(m) for m in reps]
