"""Vectorized helpers for the tuple space Omega^k.

Tuples are encoded mixed-radix with the first coordinate most significant,
so tuple (t_0, ..., t_{k-1}) over degree n has index sum(t_j * n^(k-1-j)).
That fixed encoding is what makes colorings comparable across groups.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations

import numpy as np


@lru_cache(maxsize=64)
def digit_matrix(n: int, k: int) -> np.ndarray:
    """(n^k, k) array: row i holds the k digits of index i (big-endian)."""
    size = n**k
    out = np.empty((size, k), dtype=np.int32)
    idx = np.arange(size, dtype=np.int64)
    for j in range(k - 1, -1, -1):
        out[:, j] = idx % n
        idx //= n
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def radix_weights(n: int, k: int) -> np.ndarray:
    w = np.array([n ** (k - 1 - j) for j in range(k)], dtype=np.int64)
    w.setflags(write=False)
    return w


def encode_tuple(t, n: int) -> int:
    idx = 0
    for c in t:
        idx = idx * n + c
    return idx


def decode_tuple(idx: int, n: int, k: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        out.append(idx % n)
        idx //= n
    return tuple(reversed(out))


def induced_tuple_map(images: np.ndarray, n: int, k: int) -> np.ndarray:
    """Index map on Omega^k induced by a point permutation (array of images)."""
    D = digit_matrix(n, k)
    w = radix_weights(n, k)
    acc = np.zeros(n**k, dtype=np.int64)
    for j in range(k):
        acc += images[D[:, j]].astype(np.int64) * w[j]
    return acc


def induced_tuple_map_block(block: np.ndarray, n: int, k: int) -> np.ndarray:
    """Row-wise induced maps for a (b, n) block of permutations; returns (b, n^k)."""
    D = digit_matrix(n, k)
    w = radix_weights(n, k)
    acc = np.zeros((block.shape[0], n**k), dtype=np.int64)
    for j in range(k):
        acc += block[:, D[:, j]].astype(np.int64) * w[j]
    return acc


@lru_cache(maxsize=8)
def all_permutations(n: int) -> np.ndarray:
    """All n! permutations of degree n, lex ordered, as an (n!, n) array."""
    arr = np.array(list(permutations(range(n))), dtype=np.int8)
    arr.setflags(write=False)
    return arr


def canonical_labels(labels: np.ndarray) -> tuple[np.ndarray, int]:
    """Relabel so ids appear in increasing order of first occurrence."""
    ncomp = int(labels.max()) + 1 if labels.size else 0
    first = np.full(ncomp, labels.size, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(labels.size, dtype=np.int64))
    order = np.argsort(first, kind="stable")
    remap = np.empty(ncomp, dtype=np.int64)
    remap[order] = np.arange(ncomp, dtype=np.int64)
    return remap[labels], ncomp


def partition_labels(n_nodes: int, edge_maps) -> tuple[np.ndarray, int]:
    """Connected components of the graph with edges i -> m[i] for each map."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    maps = list(edge_maps)
    if not maps:
        return np.arange(n_nodes, dtype=np.int64), n_nodes
    src = np.tile(np.arange(n_nodes, dtype=np.int64), len(maps))
    dst = np.concatenate(maps)
    data = np.ones(len(src), dtype=np.int8)
    graph = coo_matrix((data, (src, dst)), shape=(n_nodes, n_nodes))
    ncomp, labels = connected_components(graph, directed=False)
    canon, _ = canonical_labels(labels.astype(np.int64))
    return canon, ncomp
