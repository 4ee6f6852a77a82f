"""Products of permutation groups and the closure formulas they satisfy.

Point encodings are fixed so that both sides of a formula live on the same
point set: the imprimitive wreath product acts on Delta x Gamma encoded
block-major (point = gamma*|Delta| + delta), the product action on
Delta^Gamma encoded mixed-radix with the first coordinate most significant.
"""

from __future__ import annotations

from dataclasses import dataclass

from .actions import orbit_coloring, stabilizer_in_action
from .budget import Budget, default_budget
from .closures import k_closure, partition_r_closure
from .perm import GroupHandle, Permutation, equal_groups
from .tuplespace import decode_tuple, encode_tuple


@dataclass(frozen=True)
class ProductDecomposition:
    """An identification Omega = Delta^Gamma by mixed-radix encoding."""

    delta_size: int
    gamma_size: int

    def __post_init__(self):
        if self.delta_size < 2 or self.gamma_size < 2:
            raise ValueError("product decompositions need |Delta| >= 2 and |Gamma| >= 2")

    @property
    def degree(self) -> int:
        return self.delta_size**self.gamma_size

    def encode(self, coords) -> int:
        return encode_tuple(coords, self.delta_size)

    def decode(self, point: int) -> tuple[int, ...]:
        return decode_tuple(point, self.delta_size, self.gamma_size)


def direct_product_disjoint(A: GroupHandle, B: GroupHandle) -> GroupHandle:
    """A x B on the disjoint union of the two point sets (A's points first)."""
    n, m = A.degree, B.degree
    gens = []
    for g in A.generators:
        gens.append(Permutation(tuple(g.images) + tuple(range(n, n + m))))
    for g in B.generators:
        gens.append(Permutation(tuple(range(n)) + tuple(i + n for i in g.images)))
    return GroupHandle(n + m, gens)


def wreath_imprimitive(L: GroupHandle, K: GroupHandle) -> GroupHandle:
    """L wr K acting on Delta x Gamma: base group blockwise, top group on blocks."""
    d, m = L.degree, K.degree
    degree = d * m
    gens = []
    for gamma in range(m):
        for g in L.generators:
            images = list(range(degree))
            for delta in range(d):
                images[gamma * d + delta] = gamma * d + g(delta)
            gens.append(Permutation(images))
    for g in K.generators:
        images = [g(p // d) * d + (p % d) for p in range(degree)]
        gens.append(Permutation(images))
    return GroupHandle(degree, gens)


def wreath_product_action(L: GroupHandle, K: GroupHandle, budget: Budget | None = None) -> GroupHandle:
    """L up-arrow K on Delta^Gamma: base acts coordinatewise, K permutes coordinates."""
    budget = budget or default_budget()
    d, m = L.degree, K.degree
    degree = d**m
    budget.check(f"product action degree {d}^{m}", degree, budget.tuple_space)
    gens = []
    for gamma in range(m):
        for g in L.generators:
            images = []
            for p in range(degree):
                coords = list(decode_tuple(p, d, m))
                coords[gamma] = g(coords[gamma])
                images.append(encode_tuple(coords, d))
            gens.append(Permutation(images))
    for g in K.generators:
        images = []
        for p in range(degree):
            coords = decode_tuple(p, d, m)
            moved = [0] * m
            for j in range(m):
                moved[g(j)] = coords[j]
            images.append(encode_tuple(moved, d))
        gens.append(Permutation(images))
    return GroupHandle(degree, gens)


def _partition_image(g: Permutation, D: ProductDecomposition, gamma: int) -> int | None:
    """Which coordinate partition Delta_gamma is mapped to by g, if any."""
    d, m = D.delta_size, D.gamma_size
    # image of the part {x : x_gamma = 0}; find which coordinate is constant
    part = [p for p in range(D.degree) if D.decode(p)[gamma] == 0]
    image_coords = [D.decode(g(p)) for p in part]
    candidates = [
        j
        for j in range(m)
        if len({c[j] for c in image_coords}) == 1
    ]
    if not candidates:
        return None
    if len(candidates) == 1:
        return candidates[0]
    # constant in several coordinates can only happen for degenerate parts
    raise AssertionError("ambiguous partition image")


def coordinate_action(G: GroupHandle, D: ProductDecomposition) -> list[Permutation]:
    """Images of G's generators on the coordinate partitions Delta_gamma.

    Raises ValueError if some generator does not permute the partitions.
    """
    m = D.gamma_size
    images = []
    for g in G.generators:
        img = [None] * m
        for gamma in range(m):
            target = _partition_image(g, D, gamma)
            if target is None:
                raise ValueError("group does not preserve the product decomposition")
            img[gamma] = target
        # must also map every part to a full part, not just constant columns
        perm = Permutation(img)
        if not _maps_parts_to_parts(g, D, perm):
            raise ValueError("group does not preserve the product decomposition")
        images.append(perm)
    return images


def _maps_parts_to_parts(g: Permutation, D: ProductDecomposition, coord_img: Permutation) -> bool:
    d, m = D.delta_size, D.gamma_size
    for gamma in range(m):
        target = coord_img(gamma)
        seen = {}
        for p in range(D.degree):
            x = D.decode(p)[gamma]
            y = D.decode(g(p))[target]
            if x in seen:
                if seen[x] != y:
                    return False
            else:
                seen[x] = y
        if len(set(seen.values())) != d:
            return False
    return True


def components_of_product_decomposition(
    G: GroupHandle, D: ProductDecomposition
) -> tuple[GroupHandle, GroupHandle]:
    """(component on Delta at the first coordinate, induced group on Gamma)."""
    if G.degree != D.degree:
        raise ValueError("group degree does not match the decomposition")
    coord_images = coordinate_action(G, D)
    on_gamma = GroupHandle(D.gamma_size, coord_images)
    stab_gens = stabilizer_in_action(G, coord_images, D.gamma_size, 0)
    d = D.delta_size
    induced = []
    for s in stab_gens:
        img = [0] * d
        for x in range(d):
            coords = [0] * D.gamma_size
            coords[0] = x
            img[x] = D.decode(s(D.encode(coords)))[0]
        induced.append(Permutation(img))
    return GroupHandle(d, induced), on_gamma


def check_imprimitive_closure_formula(
    L: GroupHandle, K: GroupHandle, k: int, budget: Budget | None = None
) -> bool:
    """(L wr K)^(k) == L^(k) wr K^(k), computed independently on both sides."""
    if k < 2:
        raise ValueError("the imprimitive closure formula needs k >= 2")
    budget = budget or default_budget()
    lhs = k_closure(wreath_imprimitive(L, K), k, budget=budget).group
    rhs = wreath_imprimitive(
        k_closure(L, k, budget=budget).group, k_closure(K, k, budget=budget).group
    )
    if equal_groups(lhs, rhs):
        return True
    raise AssertionError(
        f"imprimitive closure formula fails: lhs order {lhs.order()}, rhs order {rhs.order()}"
    )


def check_product_action_closure_formula(
    L: GroupHandle, K: GroupHandle, k: int, budget: Budget | None = None
) -> bool:
    """(L ua K)^(k) == L^(k) ua K^[r] with r = min(|Orb_k(L)|, |Gamma|)."""
    if k < 2:
        raise ValueError("the product action closure formula needs k >= 2")
    budget = budget or default_budget()
    lhs = k_closure(wreath_product_action(L, K, budget), k, budget=budget).group
    r = min(orbit_coloring(L, k, budget).num_colors, K.degree)
    rhs = wreath_product_action(
        k_closure(L, k, budget=budget).group,
        partition_r_closure(K, r, budget=budget),
        budget,
    )
    if equal_groups(lhs, rhs):
        return True
    raise AssertionError(
        f"product action closure formula fails: lhs order {lhs.order()}, "
        f"rhs order {rhs.order()}, r = {r}"
    )
