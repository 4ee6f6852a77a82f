"""Permutations, finitely generated groups, and stabilizer chains.

Composition is left to right throughout: ``(p * q)(x) == q(p(x))``, matching
the exponent convention ``x^(pq) = (x^p)^q``.  Points are 0-based internally;
the text format speaks 1-based cycles.
"""

from __future__ import annotations

import json
import re
import threading
from math import factorial

from .budget import Budget, default_budget
from .errors import DegreeMismatch, FormatError


class Permutation:
    """A bijection of {0, ..., degree-1}, stored as the tuple of images."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(images)
        n = len(images)
        seen = [False] * n
        for i in images:
            if not isinstance(i, int) or not 0 <= i < n or seen[i]:
                raise ValueError(f"not a permutation of 0..{n - 1}: {images!r}")
            seen[i] = True
        self.images = images

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(range(degree))

    @classmethod
    def from_cycles(cls, degree: int, cycles, one_based: bool = False) -> "Permutation":
        """Build a permutation from disjoint cycles."""
        shift = 1 if one_based else 0
        images = list(range(degree))
        touched = set()
        for cycle in cycles:
            cycle = [c - shift for c in cycle]
            for c in cycle:
                if not 0 <= c < degree:
                    raise ValueError(f"cycle point {c + shift} out of range for degree {degree}")
                if c in touched:
                    raise ValueError(f"cycles are not disjoint at point {c + shift}")
                touched.add(c)
            for a, b in zip(cycle, cycle[1:]):
                images[a] = b
            if cycle:
                images[cycle[-1]] = cycle[0]
        return cls(images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, point: int) -> int:
        return self.images[point]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if len(self.images) != len(other.images):
            raise DegreeMismatch("cannot compose permutations of different degrees")
        oi = other.images
        return Permutation(tuple(oi[i] for i in self.images))

    def __pow__(self, n: int) -> "Permutation":
        if n < 0:
            return self.inverse() ** (-n)
        result = Permutation.identity(self.degree)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(inv)

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def moved_points(self):
        return [i for i, j in enumerate(self.images) if i != j]

    def cycles(self):
        """Nontrivial cycles, each rotated to start at its minimum, sorted."""
        seen = set()
        out = []
        for i in range(len(self.images)):
            if i in seen or self.images[i] == i:
                continue
            cycle = [i]
            j = self.images[i]
            while j != i:
                seen.add(j)
                cycle.append(j)
                j = self.images[j]
            out.append(tuple(cycle))
        return sorted(out)

    def cycle_string(self, one_based: bool = True) -> str:
        shift = 1 if one_based else 0
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + " ".join(str(c + shift) for c in cyc) + ")" for cyc in cycles)

    def order(self) -> int:
        from math import lcm

        return lcm(1, *(len(c) for c in self.cycles()))

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other: "Permutation") -> bool:
        return self.images < other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"Permutation({self.cycle_string(one_based=False)}, degree={self.degree})"


class _Level:
    __slots__ = ("point", "gens", "transversal", "inverses", "processed", "stale")

    def __init__(self, point: int, degree: int):
        self.point = point
        self.gens: list[Permutation] = []
        ident = Permutation.identity(degree)
        self.transversal: dict[int, Permutation] = {point: ident}
        self.inverses: dict[int, Permutation] = {point: ident}
        self.processed: set[tuple[int, tuple]] = set()
        self.stale = False


class StabChain:
    """A stabilizer chain: base points with transversals and strong generators.

    Built by a deterministic Schreier-Sims pass.  ``base_prefix`` forces the
    first base points (creating trivial levels where needed), after which new
    base points are chosen as the smallest moved point.
    """

    __slots__ = ("degree", "levels", "_prefix")

    def __init__(self, degree: int, gens, base_prefix=()):
        self.degree = degree
        self.levels: list[_Level] = []
        self._prefix = tuple(base_prefix)
        for p in self._prefix:
            if not 0 <= p < degree:
                raise ValueError(f"base point {p} out of range")
        for g in gens:
            if g.degree != degree:
                raise DegreeMismatch("generator degree does not match chain degree")
            self._incorporate(g)
        self._close()

    # -- construction -------------------------------------------------------

    def _strong_gens_at(self, i: int) -> list[Permutation]:
        return [g for lvl in self.levels[i:] for g in lvl.gens]

    def _new_level_point(self, depth: int, g: Permutation) -> int:
        if depth < len(self._prefix):
            return self._prefix[depth]
        return min(g.moved_points())

    def _incorporate(self, g: Permutation) -> bool:
        """Sift g; if it is genuinely new, record it as a strong generator."""
        residue, depth = self._sift(g)
        if residue.is_identity():
            return False
        while True:
            if depth == len(self.levels):
                self.levels.append(_Level(self._new_level_point(depth, residue), self.degree))
            if residue(self.levels[depth].point) != self.levels[depth].point:
                break
            depth += 1
        self.levels[depth].gens.append(residue)
        for lvl in self.levels[: depth + 1]:
            lvl.stale = True
        return True

    def _close(self) -> None:
        """Re-verify Schreier generators everywhere until nothing new appears."""
        changed = True
        while changed:
            changed = False
            for i in range(len(self.levels)):
                if self._close_level(i):
                    changed = True
                    break

    def _close_level(self, i: int) -> bool:
        level = self._current_level(i)
        gens = self._strong_gens_at(i)
        for beta in sorted(level.transversal):
            u = level.transversal[beta]
            for g in gens:
                key = (beta, g.images)
                if key in level.processed:
                    continue
                level.processed.add(key)
                gamma = g(beta)
                schreier = u * g * level.inverses[gamma]
                if self._incorporate(schreier):
                    return True
        return False

    def _current_level(self, i: int) -> _Level:
        """The level with its orbit brought up to date w.r.t. the strong gens."""
        level = self.levels[i]
        if level.stale:
            self._extend_orbit(level, self._strong_gens_at(i))
            level.stale = False
        return level

    @staticmethod
    def _extend_orbit(level: _Level, gens) -> None:
        frontier = sorted(level.transversal)
        while frontier:
            new_frontier = []
            for beta in frontier:
                u = level.transversal[beta]
                for g in gens:
                    gamma = g(beta)
                    if gamma not in level.transversal:
                        rep = u * g
                        level.transversal[gamma] = rep
                        level.inverses[gamma] = rep.inverse()
                        new_frontier.append(gamma)
            frontier = sorted(new_frontier)

    # -- queries -------------------------------------------------------------

    def _sift(self, p: Permutation):
        """Strip p through the chain; returns (residue, stuck level)."""
        for i in range(len(self.levels)):
            level = self._current_level(i)
            beta = p(level.point)
            if beta == level.point:
                continue
            if beta not in level.transversal:
                return p, i
            p = p * level.inverses[beta]
        return p, len(self.levels)

    def contains(self, p: Permutation) -> bool:
        residue, _ = self._sift(p)
        return residue.is_identity()

    def order(self) -> int:
        n = 1
        for level in self.levels:
            n *= len(level.transversal)
        return n

    def base(self):
        return tuple(level.point for level in self.levels)

    def orbit_sizes(self):
        return tuple(len(level.transversal) for level in self.levels)

    def stabilizer_gens(self, depth: int) -> list[Permutation]:
        """Strong generators of the pointwise stabilizer of base[:depth]."""
        return self._strong_gens_at(depth)


class GroupHandle:
    """A finitely generated permutation group with lazily built chains.

    Handles are immutable; chains (keyed by base prefix) are built on demand
    under a lock, so a handle is safe to share across threads.
    """

    __slots__ = ("degree", "generators", "_chains", "_lock")

    def __init__(self, degree: int, generators):
        if degree < 1:
            raise ValueError("degree must be positive")
        gens = []
        seen = set()
        for g in generators:
            if not isinstance(g, Permutation):
                g = Permutation(g)
            if g.degree != degree:
                raise DegreeMismatch(
                    f"generator degree {g.degree} does not match group degree {degree}"
                )
            if g.is_identity() or g.images in seen:
                continue
            seen.add(g.images)
            gens.append(g)
        self.degree = degree
        self.generators = tuple(gens)
        self._chains: dict[tuple, StabChain] = {}
        self._lock = threading.Lock()

    # -- chains ----------------------------------------------------------------

    def chain(self, base_prefix=()) -> StabChain:
        key = tuple(base_prefix)
        with self._lock:
            ch = self._chains.get(key)
            if ch is None:
                ch = StabChain(self.degree, self.generators, key)
                self._chains[key] = ch
            return ch

    def order(self) -> int:
        return self.chain().order()

    def contains(self, p: Permutation) -> bool:
        if p.degree != self.degree:
            raise DegreeMismatch("element degree does not match group degree")
        return self.chain().contains(p)

    def base(self):
        return self.chain().base()

    def base_size(self) -> int:
        return len(self.chain().levels)

    def is_trivial(self) -> bool:
        return not self.generators

    def point_stabilizer(self, point: int) -> "GroupHandle":
        return self.pointwise_stabilizer((point,))

    def pointwise_stabilizer(self, points) -> "GroupHandle":
        points = tuple(points)
        ch = self.chain(points)
        return GroupHandle(self.degree, ch.stabilizer_gens(len(points)))

    # -- orbits and elements ----------------------------------------------------

    def orbit(self, point: int) -> set[int]:
        orbit = {point}
        frontier = [point]
        while frontier:
            nxt = []
            for beta in frontier:
                for g in self.generators:
                    gamma = g(beta)
                    if gamma not in orbit:
                        orbit.add(gamma)
                        nxt.append(gamma)
            frontier = nxt
        return orbit

    def is_transitive(self) -> bool:
        return len(self.orbit(0)) == self.degree

    def elements(self, limit: int | None = None, budget: Budget | None = None):
        """All group elements, via transversal products (deterministic order)."""
        budget = budget or default_budget()
        cap = limit if limit is not None else budget.element_enumeration
        n = self.order()
        budget.check("group order for element enumeration", n, cap)
        chain = self.chain()
        elems = [Permutation.identity(self.degree)]
        for level in reversed(chain.levels):
            reps = [level.transversal[b] for b in sorted(level.transversal)]
            elems = [h * u for u in reps for h in elems]
        return elems

    def random_element(self, rng) -> Permutation:
        """A uniform random element drawn via the chain transversals."""
        chain = self.chain()
        g = Permutation.identity(self.degree)
        for level in chain.levels:
            beta = rng.choice(sorted(level.transversal))
            g = g * level.transversal[beta]
        return g

    def __repr__(self) -> str:
        return f"GroupHandle(degree={self.degree}, ngens={len(self.generators)})"


# -- module-level operations ----------------------------------------------------


def group_from_generators(degree: int, gens) -> GroupHandle:
    """The subgroup of Sym(degree) generated by ``gens``."""
    return GroupHandle(degree, gens)


def order(G: GroupHandle) -> int:
    return G.order()


def contains(G: GroupHandle, p: Permutation) -> bool:
    return G.contains(p)


def base_size(G: GroupHandle) -> int:
    return G.base_size()


def is_subgroup(A: GroupHandle, B: GroupHandle) -> bool:
    """True iff every generator of A lies in B."""
    if A.degree != B.degree:
        raise DegreeMismatch("groups act on different point sets")
    return all(B.contains(g) for g in A.generators)


def equal_groups(A: GroupHandle, B: GroupHandle) -> bool:
    return is_subgroup(A, B) and A.order() == B.order()


def reduce_generators(G: GroupHandle) -> GroupHandle:
    """Drop generators that are redundant, keeping the group unchanged."""
    gens = list(G.generators)
    kept = list(gens)
    for g in gens:
        trial = [h for h in kept if h is not g]
        if GroupHandle(G.degree, trial).order() == G.order():
            kept = trial
    return GroupHandle(G.degree, kept)


# -- standard families ------------------------------------------------------------


def trivial_group(degree: int) -> GroupHandle:
    return GroupHandle(degree, [])


def symmetric_group(degree: int) -> GroupHandle:
    if degree == 1:
        return trivial_group(1)
    gens = [Permutation.from_cycles(degree, [tuple(range(degree))])]
    if degree > 2:
        gens.append(Permutation.from_cycles(degree, [(0, 1)]))
    return GroupHandle(degree, gens)


def alternating_group(degree: int) -> GroupHandle:
    if degree < 3:
        return trivial_group(max(degree, 1))
    gens = [Permutation.from_cycles(degree, [(i, i + 1, i + 2)]) for i in range(degree - 2)]
    return GroupHandle(degree, gens)


def cyclic_group(degree: int) -> GroupHandle:
    if degree == 1:
        return trivial_group(1)
    return GroupHandle(degree, [Permutation.from_cycles(degree, [tuple(range(degree))])])


def dihedral_group(degree: int) -> GroupHandle:
    """Dihedral group of order 2*degree acting on degree points."""
    if degree < 3:
        return symmetric_group(degree)
    rot = Permutation.from_cycles(degree, [tuple(range(degree))])
    refl = Permutation([(-i) % degree for i in range(degree)])
    return GroupHandle(degree, [rot, refl])


def is_symmetric(G: GroupHandle) -> bool:
    return G.order() == factorial(G.degree)


# -- text and JSON formats --------------------------------------------------------

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def _parse_cycles(text: str):
    pos = 0
    cycles = []
    for m in _CYCLE_RE.finditer(text):
        if text[pos:m.start()].strip():
            raise FormatError(f"unexpected text in cycle list: {text!r}")
        pos = m.end()
        body = m.group(1).replace(",", " ").split()
        if body:
            cycles.append([int(t) for t in body])
    if text[pos:].strip():
        raise FormatError(f"unexpected text in cycle list: {text!r}")
    return cycles


def parse_group_text(text: str) -> GroupHandle:
    """Parse the group text format: ``degree N`` then ``gen <1-based cycles>``."""
    degree = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("degree"):
            if degree is not None:
                raise FormatError(f"line {lineno}: duplicate degree line")
            try:
                degree = int(line.split()[1])
            except (IndexError, ValueError) as exc:
                raise FormatError(f"line {lineno}: bad degree line {line!r}") from exc
        elif line.startswith("gen"):
            if degree is None:
                raise FormatError(f"line {lineno}: gen before degree")
            cycles = _parse_cycles(line[3:].strip())
            gens.append(Permutation.from_cycles(degree, cycles, one_based=True))
        else:
            raise FormatError(f"line {lineno}: unrecognized line {line!r}")
    if degree is None:
        raise FormatError("missing degree line")
    return GroupHandle(degree, gens)


def format_group_text(G: GroupHandle) -> str:
    lines = [f"degree {G.degree}"]
    for g in G.generators:
        lines.append(f"gen {g.cycle_string(one_based=True)}")
    return "\n".join(lines) + "\n"


def group_to_json(G: GroupHandle) -> str:
    obj = {"degree": G.degree, "generators": [list(g.images) for g in G.generators]}
    return json.dumps(obj, separators=(",", ":")) + "\n"


def group_from_json(text: str) -> GroupHandle:
    try:
        obj = json.loads(text)
        return GroupHandle(obj["degree"], [Permutation(im) for im in obj["generators"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad group JSON: {exc}") from exc


def load_group_file(path) -> GroupHandle:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if str(path).endswith(".json"):
        return group_from_json(text)
    return parse_group_text(text)
