"""The k-closure operator, k-equivalence testing, and the partition closure.

The k-closure of G is the largest group on the same points whose orbits on
Omega^k coincide with those of G; equivalently, the full stabilizer of G's
canonical orbit coloring at arity k.  Three engines compute it:

* ``Exhaustive`` iterates all of Sym(Omega) (degree <= 9), filtering by
  coloring preservation with ascending-arity prefilters.  This is the oracle.
* ``Backtracking`` searches point images depth first, pruning with arity-1/2
  color tables and with minimal-in-orbit coset pruning against the group
  found so far; full arity-k checks happen only at leaves.
* ``TransitivityShortcut`` returns Sym(Omega) outright when the group is at
  least k-transitive (its orbits on Omega^k are exactly the equality
  patterns, which all of Sym(Omega) preserves).
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass
from enum import Enum
from itertools import islice, permutations
from math import factorial

import numpy as np

from .actions import OrbitColoring, orbit_coloring, preserves_coloring, transitivity_degree, witness_tuple
from .budget import Budget, default_budget
from .errors import DegreeMismatch
from .perm import GroupHandle, Permutation, equal_groups, reduce_generators, symmetric_group
from .tuplespace import all_permutations, decode_tuple, digit_matrix, partition_labels


class Engine(Enum):
    EXHAUSTIVE = "Exhaustive"
    BACKTRACKING = "Backtracking"
    TRANSITIVITY_SHORTCUT = "TransitivityShortcut"


@dataclass(frozen=True)
class ClosureResult:
    group: GroupHandle
    k: int
    engine: Engine


EquivalenceResult = namedtuple("EquivalenceResult", ["equivalent", "witness"])

_coloring_cache: dict = {}
_closure_cache: dict = {}


def _gen_key(G: GroupHandle):
    return (G.degree, frozenset(g.images for g in G.generators))


def cached_coloring(G: GroupHandle, k: int, budget: Budget | None = None) -> OrbitColoring:
    key = (_gen_key(G), k)
    hit = _coloring_cache.get(key)
    if hit is None:
        hit = orbit_coloring(G, k, budget)
        if len(_coloring_cache) > 20000:
            _coloring_cache.clear()
        _coloring_cache[key] = hit
    return hit


def _finish_group(degree: int, base_gens, extra_elements) -> GroupHandle:
    """Assemble a handle from known generators plus discovered elements."""
    gens = list(base_gens)
    K = GroupHandle(degree, gens)
    for p in extra_elements:
        if not K.contains(p):
            gens.append(p)
            K = GroupHandle(degree, gens)
    K = reduce_generators(K)
    return GroupHandle(degree, sorted(K.generators))


def _perm_blocks(n: int, chunk: int):
    """Blocks of all degree-n permutations as arrays, lex order."""
    if n <= 8:
        table = all_permutations(n)
        for lo in range(0, len(table), chunk):
            yield table[lo : lo + chunk]
        return
    it = permutations(range(n))
    while True:
        block = list(islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.int8)


def _filter_block(block: np.ndarray, coloring: OrbitColoring) -> np.ndarray:
    """Boolean mask of rows of ``block`` preserving the coloring."""
    n = coloring.degree
    k = coloring.k
    D = digit_matrix(n, k)
    w = [n ** (k - 1 - j) for j in range(k)]
    acc = np.zeros((block.shape[0], n**k), dtype=np.int64)
    for j in range(k):
        acc += block[:, D[:, j]].astype(np.int64) * w[j]
    colors = coloring.colors
    return (colors[acc] == colors[np.newaxis, :]).all(axis=1)


def _closure_exhaustive(G: GroupHandle, k: int, budget: Budget) -> GroupHandle:
    n = G.degree
    budget.check("exhaustive engine degree", n, budget.exhaustive_degree)
    budget.check(f"tuple space {n}^{k}", n**k, budget.tuple_space)
    colorings = [cached_coloring(G, j, budget) for j in range(1, k + 1)]
    survivors: list[np.ndarray] = []
    total = factorial(n)
    chunk = max(1, 4_000_000 // max(n**k, 1))
    for block in _perm_blocks(n, chunk):
        mask = np.ones(block.shape[0], dtype=bool)
        for coloring in colorings:
            if not mask.any():
                break
            mask[mask] = _filter_block(block[mask], coloring)
        if mask.any():
            survivors.append(block[mask])
    rows = np.concatenate(survivors) if survivors else np.empty((0, n), dtype=np.int8)
    if len(rows) == total:
        return symmetric_group(n)
    elements = (Permutation(tuple(int(x) for x in row)) for row in rows)
    return _finish_group(n, G.generators, elements)


def _closure_backtracking(G: GroupHandle, k: int, budget: Budget) -> GroupHandle:
    n = G.degree
    budget.check("backtracking engine degree", n, budget.backtracking_degree)
    budget.check(f"tuple space {n}^{k}", n**k, budget.tuple_space)
    ck = cached_coloring(G, k, budget)
    c1 = cached_coloring(G, 1, budget).colors
    c2 = cached_coloring(G, 2, budget).colors.reshape(n, n) if k >= 2 else None

    gens = list(G.generators)
    state = {"K": GroupHandle(n, gens), "added": False}

    def visit(level: int, img: list[int], used: list[bool], stab: GroupHandle) -> None:
        if level == n:
            p = Permutation(tuple(img))
            if preserves_coloring(ck, p) and not state["K"].contains(p):
                gens.append(p)
                state["K"] = GroupHandle(n, gens)
                state["added"] = True
            return
        claimed = set()
        for y in range(n):
            if used[y] or c1[y] != c1[level] or y in claimed:
                continue
            if c2 is not None and any(
                c2[img[i], y] != c2[i, level] or c2[y, img[i]] != c2[level, i]
                for i in range(level)
            ):
                continue
            orb = stab.orbit(y)
            claimed |= orb
            if y != min(orb):
                continue
            img.append(y)
            used[y] = True
            visit(level + 1, img, used, stab.point_stabilizer(y))
            used[y] = False
            img.pop()

    while True:
        state["added"] = False
        visit(0, [], [False] * n, state["K"])
        if not state["added"]:
            break
    K = reduce_generators(state["K"])
    return GroupHandle(n, sorted(K.generators))


def k_closure(
    G: GroupHandle,
    k: int,
    engine: str = "auto",
    budget: Budget | None = None,
) -> ClosureResult:
    """The k-closure of G, as a generated group plus the engine that ran."""
    if k < 1:
        raise ValueError("k must be positive")
    budget = budget or default_budget()
    key = (_gen_key(G), k, engine)
    hit = _closure_cache.get(key)
    if hit is not None:
        return hit

    chosen = engine
    if engine == "auto":
        chosen = "shortcut" if transitivity_degree(G) >= k else "backtracking"
    if chosen == "shortcut":
        if transitivity_degree(G) < k:
            raise ValueError("transitivity shortcut requires a k-transitive group")
        result = ClosureResult(symmetric_group(G.degree), k, Engine.TRANSITIVITY_SHORTCUT)
    elif chosen == "exhaustive":
        result = ClosureResult(_closure_exhaustive(G, k, budget), k, Engine.EXHAUSTIVE)
    elif chosen == "backtracking":
        result = ClosureResult(_closure_backtracking(G, k, budget), k, Engine.BACKTRACKING)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    if len(_closure_cache) > 20000:
        _closure_cache.clear()
    _closure_cache[key] = result
    return result


def are_k_equivalent(
    G: GroupHandle,
    H: GroupHandle,
    k: int,
    budget: Budget | None = None,
) -> EquivalenceResult:
    """Same orbit partition on Omega^k?  On failure carries a witness tuple."""
    if G.degree != H.degree:
        raise DegreeMismatch("groups act on different point sets")
    if equal_groups(G, H):
        return EquivalenceResult(True, None)
    ca = cached_coloring(G, k, budget)
    cb = cached_coloring(H, k, budget)
    if ca.same_partition(cb):
        return EquivalenceResult(True, None)
    return EquivalenceResult(False, witness_tuple(ca, cb))


def is_k_closed(G: GroupHandle, k: int, budget: Budget | None = None) -> bool:
    closure = k_closure(G, k, budget=budget)
    return equal_groups(closure.group, G)


def stabilization_index(G: GroupHandle, budget: Budget | None = None) -> int:
    """Least k with G equal to its own k-closure (at most base size + 1)."""
    bound = G.base_size() + 1
    for k in range(1, bound + 1):
        if is_k_closed(G, k, budget=budget):
            return k
    raise AssertionError("closure did not stabilize by base size + 1")


def partition_r_closure(
    K: GroupHandle,
    r: int,
    budget: Budget | None = None,
    surjective_only: bool = False,
) -> GroupHandle:
    """Largest group with the same orbits as K on ordered partitions into <= r parts.

    An ordered partition is modeled as a coloring of the points with labels
    1..r; empty labeled parts are allowed (set ``surjective_only`` to compare
    against the stricter reading).
    """
    if r < 1:
        raise ValueError("r must be positive")
    budget = budget or default_budget()
    n = K.degree
    budget.check("partition closure degree", n, budget.partition_degree)
    size = r**n
    budget.check(f"coloring space {r}^{n}", size, budget.tuple_space)

    D = digit_matrix(r, n)  # row = coloring, digit j = label of point j
    weights = np.array([r ** (n - 1 - j) for j in range(n)], dtype=np.int64)

    def induced(images: np.ndarray) -> np.ndarray:
        # point j of the image coloring receives the label of g^{-1}(j)
        return (D.astype(np.int64) * weights[images]).sum(axis=1)

    keep = None
    if surjective_only:
        keep = np.zeros(size, dtype=bool)
        for i in range(size):
            keep[i] = len(set(D[i])) == min(r, n)

    maps = [induced(np.array(g.images, dtype=np.int64)) for g in K.generators]
    labels, _ = partition_labels(size, maps)
    if keep is not None:
        masked = labels.copy()
        masked[~keep] = -1
    else:
        masked = labels

    survivors = []
    total = factorial(n)
    chunk = max(1, 4_000_000 // size)
    for block in _perm_blocks(n, chunk):
        acc = np.zeros((block.shape[0], size), dtype=np.int64)
        for j in range(n):
            acc += D[:, j].astype(np.int64)[np.newaxis, :] * weights[block[:, j].astype(np.int64)][
                :, np.newaxis
            ]
        if keep is None:
            mask = (labels[acc] == labels[np.newaxis, :]).all(axis=1)
        else:
            ok = (labels[acc] == labels[np.newaxis, :]) | ~keep[np.newaxis, :]
            mask = ok.all(axis=1)
        if mask.any():
            survivors.append(block[mask])
    rows = np.concatenate(survivors) if survivors else np.empty((0, n), dtype=np.int8)
    if len(rows) == total:
        return symmetric_group(n)
    elements = (Permutation(tuple(int(x) for x in row)) for row in rows)
    return _finish_group(n, K.generators, elements)
