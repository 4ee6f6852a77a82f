"""Orbits on points and k-tuples, block systems, and induced actions.

The induced actions are the group on a block (via the block's stabilizer)
and the group permuting the blocks of an invariant partition.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .budget import Budget, default_budget
from .errors import FormatError
from .perm import GroupHandle, Permutation
from .tuplespace import (
    decode_tuple,
    encode_tuple,
    induced_tuple_map,
    partition_labels,
    radix_weights,
)

_COLORING_MAGIC = b"PCLR"


@dataclass(frozen=True)
class OrbitColoring:
    """The partition of Omega^k into group orbits, as a canonical coloring.

    Color ids are assigned in increasing order of the smallest tuple index in
    each orbit, so two colorings describe the same partition iff their arrays
    are equal.
    """

    degree: int
    k: int
    colors: np.ndarray
    num_colors: int

    def color_of(self, t) -> int:
        return int(self.colors[encode_tuple(t, self.degree)])

    def same_partition(self, other: "OrbitColoring") -> bool:
        if self.degree != other.degree or self.k != other.k:
            return False
        return np.array_equal(self.colors, other.colors)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(_COLORING_MAGIC)
            fh.write(struct.pack("<III", self.degree, self.k, self.num_colors))
            fh.write(self.colors.astype("<u4").tobytes())

    @classmethod
    def load(cls, path) -> "OrbitColoring":
        with open(path, "rb") as fh:
            magic = fh.read(4)
            if magic != _COLORING_MAGIC:
                raise FormatError("not a coloring file")
            degree, k, num_colors = struct.unpack("<III", fh.read(12))
            colors = np.frombuffer(fh.read(), dtype="<u4").astype(np.int64)
        if colors.size != degree**k:
            raise FormatError("coloring payload has the wrong length")
        return cls(degree=degree, k=k, colors=colors, num_colors=num_colors)


@dataclass(frozen=True)
class BlockSystem:
    """An invariant partition of the point set into equal-size cells."""

    cells: tuple[tuple[int, ...], ...]
    block_of: tuple[int, ...]

    @classmethod
    def from_cells(cls, cells) -> "BlockSystem":
        cells = tuple(sorted((tuple(sorted(c)) for c in cells), key=lambda c: c[0]))
        size = sum(len(c) for c in cells)
        block_of = [0] * size
        for i, cell in enumerate(cells):
            for p in cell:
                block_of[p] = i
        return cls(cells=cells, block_of=tuple(block_of))

    @property
    def num_blocks(self) -> int:
        return len(self.cells)

    @property
    def cell_size(self) -> int:
        return len(self.cells[0])

    def is_trivial(self) -> bool:
        return self.num_blocks == 1 or self.cell_size == 1

    def is_invariant_under(self, G: GroupHandle) -> bool:
        for g in G.generators:
            for cell in self.cells:
                image = sorted(g(p) for p in cell)
                if self.block_of[image[0]] != self.block_of[image[-1]] or tuple(image) != self.cells[
                    self.block_of[image[0]]
                ]:
                    return False
        return True


def orbits(G: GroupHandle) -> list[tuple[int, ...]]:
    """The orbits of G on points, sorted by minimum element."""
    seen = set()
    out = []
    for p in range(G.degree):
        if p in seen:
            continue
        orb = G.orbit(p)
        seen |= orb
        out.append(tuple(sorted(orb)))
    return out


def orbit_coloring(G: GroupHandle, k: int, budget: Budget | None = None) -> OrbitColoring:
    """Canonical coloring of Omega^k by G-orbit."""
    if k < 1:
        raise ValueError("k must be positive")
    budget = budget or default_budget()
    n = G.degree
    size = n**k
    budget.check(f"tuple space {n}^{k}", size, budget.tuple_space)
    maps = [induced_tuple_map(np.array(g.images, dtype=np.int32), n, k) for g in G.generators]
    labels, ncomp = partition_labels(size, maps)
    return OrbitColoring(degree=n, k=k, colors=labels, num_colors=ncomp)


def preserves_coloring(coloring: OrbitColoring, g: Permutation) -> bool:
    """Does g map every color class of the coloring to itself?"""
    imap = induced_tuple_map(np.array(g.images, dtype=np.int32), coloring.degree, coloring.k)
    return bool(np.array_equal(coloring.colors[imap], coloring.colors))


def tuple_orbit_size(G: GroupHandle, seed, budget: Budget | None = None) -> int:
    """Size of the G-orbit of one k-tuple, by BFS over encoded tuple indices."""
    budget = budget or default_budget()
    n = G.degree
    k = len(seed)
    size = n**k
    budget.check(f"tuple space {n}^{k}", size, budget.tuple_space)
    gen_arrays = [np.array(g.images, dtype=np.int64) for g in G.generators]
    w = radix_weights(n, k)
    seen = np.zeros(size, dtype=bool)
    start = encode_tuple(seed, n)
    seen[start] = True
    frontier = np.array([start], dtype=np.int64)
    count = 1
    while frontier.size:
        digits = np.empty((frontier.size, k), dtype=np.int64)
        idx = frontier.copy()
        for j in range(k - 1, -1, -1):
            digits[:, j] = idx % n
            idx //= n
        nxt = []
        for arr in gen_arrays:
            images = (arr[digits] * w).sum(axis=1)
            fresh = images[~seen[images]]
            if fresh.size:
                fresh = np.unique(fresh)
                seen[fresh] = True
                nxt.append(fresh)
        if nxt:
            frontier = np.concatenate(nxt)
            count += frontier.size
        else:
            frontier = np.empty(0, dtype=np.int64)
    return count


def transitivity_degree(G: GroupHandle) -> int:
    """Largest m with G transitive on distinct m-tuples (0 if intransitive)."""
    n = G.degree
    chain = G.chain(tuple(range(n)))
    m = 0
    for i, level in enumerate(chain.levels):
        if level.point != m or len(level.transversal) != n - i:
            break
        m += 1
    # a chain ends when the residual stabilizer is trivial; trailing points
    # are only "transitive" levels if nothing is left to move
    if m == n - 1:
        m = n
    return m


def minimal_block_system(G: GroupHandle, a: int, b: int) -> BlockSystem | None:
    """Minimal G-invariant partition merging a and b; None if it is trivial.

    Classical union-find block algorithm; G must be transitive.
    """
    if not G.is_transitive():
        raise ValueError("block systems are only defined for transitive groups")
    if a == b:
        raise ValueError("need two distinct points")
    n = G.degree
    parent = list(range(n))

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        parent[max(rx, ry)] = min(rx, ry)
        return True

    queue = [(a, b)]
    union(a, b)
    while queue:
        x, y = queue.pop()
        for g in G.generators:
            gx, gy = g(x), g(y)
            if union(gx, gy):
                queue.append((gx, gy))
    cells: dict[int, list[int]] = {}
    for p in range(n):
        cells.setdefault(find(p), []).append(p)
    if len(cells) == 1:
        return None
    return BlockSystem.from_cells(cells.values())


def is_primitive(G: GroupHandle) -> bool:
    """Transitive with no nontrivial block system."""
    if not G.is_transitive():
        return False
    return all(minimal_block_system(G, 0, b) is None for b in range(1, G.degree))


def block_system_generated_by(G: GroupHandle, cell) -> BlockSystem | None:
    """The minimal block system whose block contains the given cell."""
    cell = sorted(set(cell))
    if len(cell) < 2:
        raise ValueError("cell needs at least two points")
    system = None
    for b in cell[1:]:
        merged = minimal_block_system(G, cell[0], b)
        if merged is None:
            return None
        if system is None:
            system = merged
        else:
            system = _join_systems(G, system, merged)
            if system is None:
                return None
    return system


def _join_systems(G: GroupHandle, A: BlockSystem, B: BlockSystem) -> BlockSystem | None:
    n = G.degree
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for system in (A, B):
        for cellpts in system.cells:
            for p in cellpts[1:]:
                ra, rb = find(cellpts[0]), find(p)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    cells: dict[int, list[int]] = {}
    for p in range(n):
        cells.setdefault(find(p), []).append(p)
    if len(cells) == 1:
        return None
    return BlockSystem.from_cells(cells.values())


def stabilizer_in_action(G: GroupHandle, gen_images, m: int, point: int) -> list[Permutation]:
    """Generators of {g in G : phi(g) fixes point}, for the action phi on m points.

    ``gen_images[i]`` must be the image of ``G.generators[i]`` under phi, as a
    Permutation of degree m.  Returned as Schreier generators.
    """
    ident = Permutation.identity(G.degree)
    ident_m = Permutation.identity(m)
    reps = {point: (ident, ident_m)}
    frontier = [point]
    while frontier:
        nxt = []
        for beta in frontier:
            u, u_img = reps[beta]
            for g, g_img in zip(G.generators, gen_images):
                gamma = g_img(beta)
                if gamma not in reps:
                    reps[gamma] = (u * g, u_img * g_img)
                    nxt.append(gamma)
        frontier = nxt
    out = []
    seen = set()
    for beta in sorted(reps):
        u, u_img = reps[beta]
        for g, g_img in zip(G.generators, gen_images):
            gamma = g_img(beta)
            v, v_img = reps[gamma]
            schreier = u * g * v.inverse()
            if (u_img * g_img * v_img.inverse())(point) != point:
                raise AssertionError("Schreier generator does not fix the point")
            if not schreier.is_identity() and schreier.images not in seen:
                seen.add(schreier.images)
                out.append(schreier)
    return out


def induced_on_quotient(G: GroupHandle, system: BlockSystem) -> GroupHandle:
    """The action of G on the blocks of an invariant partition."""
    images = _quotient_images(G, system)
    return GroupHandle(system.num_blocks, images)


def _quotient_images(G: GroupHandle, system: BlockSystem) -> list[Permutation]:
    images = []
    for g in G.generators:
        img = [0] * system.num_blocks
        for i, cellpts in enumerate(system.cells):
            mapped = sorted(g(p) for p in cellpts)
            j = system.block_of[mapped[0]]
            if tuple(mapped) != system.cells[j]:
                raise ValueError("partition is not invariant under the group")
            img[i] = j
        images.append(Permutation(img))
    return images


def induced_on_block(G: GroupHandle, cell) -> GroupHandle:
    """The group induced on a cell by its setwise stabilizer.

    The cell must be a union of orbits or a block of some system of G.
    """
    cell = tuple(sorted(set(cell)))
    pos = {p: i for i, p in enumerate(cell)}
    cellset = set(cell)

    def restrict(perms):
        out = []
        for g in perms:
            out.append(Permutation([pos[g(p)] for p in cell]))
        return out

    if all(set(g(p) for p in cell) == cellset for g in G.generators):
        return GroupHandle(len(cell), restrict(G.generators))
    system = block_system_generated_by(G, cell)
    if system is None or cell not in system.cells:
        raise ValueError("cell is neither invariant nor a block of a system")
    images = _quotient_images(G, system)
    block_index = system.block_of[cell[0]]
    stab = stabilizer_in_action(G, images, system.num_blocks, block_index)
    return GroupHandle(len(cell), restrict(stab))


def same_minimal_block_systems(G: GroupHandle, H: GroupHandle) -> bool:
    """Compare the canonical family of minimal block systems of two groups."""
    if G.degree != H.degree:
        return False
    gt, ht = G.is_transitive(), H.is_transitive()
    if gt != ht:
        return False
    if not gt:
        return True
    for b in range(1, G.degree):
        sg = minimal_block_system(G, 0, b)
        sh = minimal_block_system(H, 0, b)
        if (sg is None) != (sh is None):
            return False
        if sg is not None and sg.cells != sh.cells:
            return False
    return True


def witness_tuple(coloring_a: OrbitColoring, coloring_b: OrbitColoring) -> tuple[int, ...] | None:
    """First tuple (by index) whose orbit differs between two colorings."""
    diff = np.nonzero(coloring_a.colors != coloring_b.colors)[0]
    if diff.size == 0:
        return None
    return decode_tuple(int(diff[0]), coloring_a.degree, coloring_a.k)
