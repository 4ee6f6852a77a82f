"""Tensor-decomposition stabilizers, semilinear decomposition, and projections.

A frame fixes bases identifying V with a tensor product of coordinate
spaces over F_q; the flat coordinate of a basis tensor puts the first
factor most significant.  Vectors of V are encoded as integers exactly as
in the linear-algebra module, so all groups here act on q^(dim V) points.

A ``pair`` frame (X tensor Y) carries no factor swaps; a ``power`` frame
(m equal factors) adds the coordinate-permuting maps.  Decomposing a
permutation recovers its factor-matrix cosets, Frobenius power, factor
permutation, and a global scalar, exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iproduct
from math import prod

import numpy as np

from .actions import orbit_coloring
from .budget import Budget, default_budget
from .closures import are_k_equivalent, partition_r_closure
from .errors import HypothesisNotMet, NotDecomposable
from .linalg import (
    FieldCtx,
    SemilinearMap,
    field_ctx,
    gl_generators,
    mat_identity,
    mat_scalar,
    matrix_to_permutation,
    permutation_is_semilinear,
)
from .perm import GroupHandle, Permutation, equal_groups, is_subgroup


@dataclass(frozen=True)
class TensorFrame:
    """A basis identification of V with a tensor product of coordinate spaces."""

    ctx: FieldCtx
    dims: tuple[int, ...]
    kind: str  # 'pair' | 'power'

    def __post_init__(self):
        if self.kind not in ("pair", "power"):
            raise ValueError("frame kind must be 'pair' or 'power'")
        if self.kind == "pair" and len(self.dims) != 2:
            raise ValueError("pair frames have exactly two factors")
        if self.kind == "power" and (len(self.dims) < 2 or len(set(self.dims)) != 1):
            raise ValueError("power frames need m >= 2 equal factors")
        if any(d < 1 for d in self.dims):
            raise ValueError("factor dimensions must be positive")

    @property
    def nfactors(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return prod(self.dims)

    @property
    def points(self) -> int:
        return self.ctx.q**self.dim

    def flat(self, multi) -> int:
        pos = 0
        for i, d in zip(multi, self.dims):
            pos = pos * d + i
        return pos

    def unflat(self, pos: int) -> tuple[int, ...]:
        out = []
        for d in reversed(self.dims):
            out.append(pos % d)
            pos //= d
        return tuple(reversed(out))

    def coeffs(self, index: int) -> np.ndarray:
        return self.ctx.decode_vectors(np.array([index]), self.dim)[0]

    def index(self, coeffs) -> int:
        return int(self.ctx.encode_vectors(np.array([list(coeffs)], dtype=np.int64))[0])

    def pure_tensor(self, factors) -> int:
        """Vector index of v_1 tensor ... tensor v_m (factor coefficient lists)."""
        ctx = self.ctx
        coeffs = [0] * self.dim
        for pos in range(self.dim):
            multi = self.unflat(pos)
            val = 1
            for t, i in enumerate(multi):
                val = ctx.mul(val, factors[t][i])
            coeffs[pos] = val
        return self.index(coeffs)

    def basis_tensor(self, multi) -> int:
        return self.index([1 if pos == self.flat(multi) else 0 for pos in range(self.dim)])


def pair_frame(ctx: FieldCtx, dim_x: int, dim_y: int) -> TensorFrame:
    return TensorFrame(ctx, (dim_x, dim_y), "pair")


def power_frame(ctx: FieldCtx, dim_x: int, m: int) -> TensorFrame:
    return TensorFrame(ctx, (dim_x,) * m, "power")


# -- stabilizer generators -----------------------------------------------------------


def kron_lift(frame: TensorFrame, t: int, M) -> tuple:
    """The dim V matrix acting as M on factor t and the identity elsewhere."""
    ctx = frame.ctx
    dim = frame.dim
    rows = []
    for i_flat in range(dim):
        mi = frame.unflat(i_flat)
        row = [0] * dim
        for j_flat in range(dim):
            mj = frame.unflat(j_flat)
            if any(mi[s] != mj[s] for s in range(frame.nfactors) if s != t):
                continue
            row[j_flat] = M[mi[t]][mj[t]]
        rows.append(tuple(row))
    return tuple(rows)


def factor_swap_permutation(frame: TensorFrame, tau: Permutation) -> Permutation:
    """The linear map permuting tensor factor positions by tau, as a permutation.

    Sends x_1 tensor ... tensor x_m to the tensor with x_t in position tau(t).
    """
    dim = frame.dim
    position_map = [0] * dim
    for pos in range(dim):
        mi = frame.unflat(pos)
        moved = [0] * frame.nfactors
        for t in range(frame.nfactors):
            moved[tau(t)] = mi[t]
        position_map[frame.flat(moved)] = pos
    # coefficient permutation: new_coeffs[p] = old_coeffs[position_map[p]]
    n = frame.points
    ctx = frame.ctx
    coords = ctx.decode_vectors(np.arange(n), dim)
    permuted = coords[:, position_map]
    images = ctx.encode_vectors(permuted)
    return Permutation(tuple(int(x) for x in images))


def scalar_permutation(frame: TensorFrame, lam: int) -> Permutation:
    return matrix_to_permutation(frame.ctx, frame.dim, mat_scalar(frame.ctx, frame.dim, lam))


def frobenius_frame_permutation(frame: TensorFrame) -> Permutation:
    return matrix_to_permutation(frame.ctx, frame.dim, SemilinearMap(mat_identity(frame.dim), 1))


def stabilizer_group(frame: TensorFrame, budget: Budget | None = None) -> GroupHandle:
    """The full stabilizer of the decomposition: central product of the factor
    general linear groups, extended by field automorphisms and (for power
    frames) the factor swaps."""
    budget = budget or default_budget()
    budget.check("frame points", frame.points, budget.frame_points)
    ctx = frame.ctx
    gens = []
    for t in range(frame.nfactors):
        for M in gl_generators(ctx, frame.dims[t]):
            gens.append(matrix_to_permutation(ctx, frame.dim, kron_lift(frame, t, M)))
    if ctx.q > 2:
        gens.append(scalar_permutation(frame, ctx.generator))
    if ctx.e > 1:
        gens.append(frobenius_frame_permutation(frame))
    if frame.kind == "power":
        m = frame.nfactors
        swaps = [Permutation.from_cycles(m, [(0, 1)])]
        if m > 2:
            swaps.append(Permutation.from_cycles(m, [tuple(range(m))]))
        for tau in swaps:
            gens.append(factor_swap_permutation(frame, tau))
    return GroupHandle(frame.points, gens)


# -- simple tensors and lines ---------------------------------------------------------


def simple_tensor_vectors(frame: TensorFrame) -> frozenset[int]:
    """Indices of all decomposable vectors (including zero)."""
    out = {0}
    ranges = [range(1, frame.ctx.q ** d) for d in frame.dims]
    for combo in iproduct(*ranges):
        factors = [
            frame.ctx.decode_vectors(np.array([v]), d)[0] for v, d in zip(combo, frame.dims)
        ]
        out.add(frame.pure_tensor([list(f) for f in factors]))
    return frozenset(out)


def _canonical_line_rep(ctx: FieldCtx, coeffs) -> tuple:
    lead = next(i for i in range(len(coeffs)) if coeffs[i])
    inv = ctx.inv(coeffs[lead])
    return tuple(ctx.mul(inv, c) for c in coeffs)


def simple_tensor_lines(frame: TensorFrame) -> frozenset[int]:
    """Indices of canonical representatives of lines spanned by simple tensors."""
    ctx = frame.ctx
    out = set()
    for v in simple_tensor_vectors(frame):
        if v == 0:
            continue
        coeffs = frame.coeffs(v)
        out.add(frame.index(_canonical_line_rep(ctx, [int(c) for c in coeffs])))
    return frozenset(out)


def preserves_simple_tensors(frame: TensorFrame, G: GroupHandle) -> bool:
    """The decomposability test: does G fix the set of simple tensors?"""
    simple = simple_tensor_vectors(frame)
    for g in G.generators:
        if any(g(v) not in simple for v in simple):
            return False
    return True


# -- decomposition ---------------------------------------------------------------------


@dataclass(frozen=True)
class TensorDecomposition:
    """g = scalar * (kron of factor matrices), then Frobenius^frob, then tau."""

    factors: tuple
    scalar: int
    frob: int
    tau: Permutation


def factorize_simple(ctx: FieldCtx, coeffs, dims):
    """Factor coefficients of a simple tensor, or None if it is not decomposable."""
    coeffs = [int(c) for c in coeffs]
    if not any(coeffs):
        return None
    if len(dims) == 1:
        return [coeffs]
    d0 = dims[0]
    rest = prod(dims[1:])
    rows = [coeffs[i * rest : (i + 1) * rest] for i in range(d0)]
    i0 = next(i for i in range(d0) if any(rows[i]))
    j0 = next(j for j in range(rest) if rows[i0][j])
    pivot_inv = ctx.inv(rows[i0][j0])
    x = [rows[i][j0] for i in range(d0)]
    w = [ctx.mul(pivot_inv, rows[i0][j]) for j in range(rest)]
    for i in range(d0):
        for j in range(rest):
            if rows[i][j] != ctx.mul(x[i], w[j]):
                return None
    tail = factorize_simple(ctx, w, dims[1:])
    if tail is None:
        return None
    return [x] + tail


def decompose_semilinear(
    frame: TensorFrame, g: Permutation, budget: Budget | None = None
) -> TensorDecomposition:
    """Recover (factor cosets, scalar, Frobenius power, factor permutation) from g.

    Raises NotDecomposable with a witness simple tensor when g does not
    preserve the decomposition.
    """
    ctx = frame.ctx
    m = frame.nfactors

    def factor_lines_of_image(index):
        target = g(index)
        fac = factorize_simple(ctx, frame.coeffs(target), frame.dims)
        if fac is None:
            raise NotDecomposable(
                f"image of simple tensor {index} is not a simple tensor", witness=index
            )
        return [_canonical_line_rep(ctx, f) for f in fac]

    base_multi = tuple(0 for _ in range(m))
    u0 = frame.basis_tensor(base_multi)
    lines0 = factor_lines_of_image(u0)

    if frame.kind == "power" and m >= 2:
        tau_images = [0] * m
        for t in range(m):
            multi = list(base_multi)
            multi[t] = 1
            lines_t = factor_lines_of_image(frame.basis_tensor(tuple(multi)))
            diff = [s for s in range(m) if lines_t[s] != lines0[s]]
            if len(diff) != 1:
                raise NotDecomposable("factor permutation is not well defined", witness=u0)
            tau_images[t] = diff[0]
        tau = Permutation(tau_images)
    else:
        tau = Permutation.identity(m)

    # Frobenius power from the action on a scalar multiple of a basis tensor
    omega = ctx.generator
    if ctx.e == 1:
        fpow = 0
    else:
        scaled = frame.index([omega if p == 0 else 0 for p in range(frame.dim)])
        img_base = frame.coeffs(g(u0))
        img_scaled = frame.coeffs(g(scaled))
        lead = next(i for i in range(frame.dim) if img_base[i])
        lam = ctx.mul(int(img_scaled[lead]), ctx.inv(int(img_base[lead])))
        fpow = next(
            (f for f in range(ctx.e) if ctx.frob(omega, f) == lam),
            None,
        )
        if fpow is None:
            raise NotDecomposable("no Frobenius power matches the scalar action", witness=u0)

    linear_part = g
    if frame.kind == "power" and not tau.is_identity():
        linear_part = linear_part * factor_swap_permutation(frame, tau).inverse()
    if fpow:
        inv_frob = matrix_to_permutation(
            frame.ctx, frame.dim, SemilinearMap(mat_identity(frame.dim), (ctx.e - fpow) % ctx.e)
        )
        linear_part = linear_part * inv_frob
    sl = permutation_is_semilinear(ctx, frame.dim, linear_part, require_linear=True)
    if sl is None:
        raise NotDecomposable("the twist-corrected map is not linear", witness=u0)
    A = sl.matrix

    # Kronecker factorization of A at a nonzero anchor entry
    dim = frame.dim
    anchor = None
    for i in range(dim):
        for j in range(dim):
            if A[i][j]:
                anchor = (i, j)
                break
        if anchor:
            break
    mi, mj = frame.unflat(anchor[0]), frame.unflat(anchor[1])
    scalar = A[anchor[0]][anchor[1]]
    scalar_inv = ctx.inv(scalar)
    factors = []
    for t in range(m):
        d = frame.dims[t]
        f = [[0] * d for _ in range(d)]
        for i in range(d):
            row_multi = list(mi)
            row_multi[t] = i
            for j in range(d):
                col_multi = list(mj)
                col_multi[t] = j
                f[i][j] = ctx.mul(scalar_inv, A[frame.flat(row_multi)][frame.flat(col_multi)])
        factors.append(tuple(tuple(r) for r in f))
    # exact verification of the rank-one structure
    for i in range(dim):
        multi_i = frame.unflat(i)
        for j in range(dim):
            multi_j = frame.unflat(j)
            val = scalar
            for t in range(m):
                val = ctx.mul(val, factors[t][multi_i[t]][multi_j[t]])
            if val != A[i][j]:
                raise NotDecomposable(
                    "the linear part is not a Kronecker product", witness=anchor[0]
                )
    # canonicalize cosets: first nonzero entry of each factor equals 1
    canon = []
    for t, f in enumerate(factors):
        flat_entries = [x for row in f for x in row]
        lead = next(x for x in flat_entries if x)
        inv = ctx.inv(lead)
        canon.append(tuple(tuple(ctx.mul(inv, x) for x in row) for row in f))
        scalar = ctx.mul(scalar, lead)
    return TensorDecomposition(tuple(canon), scalar, fpow, tau)


def recompose(frame: TensorFrame, dec: TensorDecomposition) -> Permutation:
    ctx = frame.ctx
    M = mat_scalar(ctx, frame.dim, dec.scalar)
    for t, f in enumerate(dec.factors):
        from .linalg import mat_mul

        M = mat_mul(ctx, M, kron_lift(frame, t, f))
    p = matrix_to_permutation(ctx, frame.dim, M)
    if dec.frob:
        p = p * matrix_to_permutation(
            ctx, frame.dim, SemilinearMap(mat_identity(frame.dim), dec.frob)
        )
    if not dec.tau.is_identity():
        p = p * factor_swap_permutation(frame, dec.tau)
    return p


# -- projections -----------------------------------------------------------------------


def _component_permutation(ctx: FieldCtx, d: int, matrix, fpow: int) -> Permutation:
    return matrix_to_permutation(ctx, d, SemilinearMap(matrix, fpow))


def _require_scalars(frame: TensorFrame, G: GroupHandle, name: str) -> None:
    if frame.ctx.q > 2 and not G.contains(scalar_permutation(frame, frame.ctx.generator)):
        raise HypothesisNotMet(f"{name} does not contain the scalar group")


def factor_permutation_images(frame: TensorFrame, G: GroupHandle) -> list[Permutation]:
    """tau-part of each generator (the action on factor positions)."""
    return [decompose_semilinear(frame, g).tau for g in G.generators]


def projection_groups(
    frame: TensorFrame, G: GroupHandle, budget: Budget | None = None
) -> tuple[GroupHandle, GroupHandle]:
    """(first-factor projection with scalars, second projection).

    For pair frames the second projection is the Y-factor group; for power
    frames it is the induced group on factor positions (which must be
    transitive).  G must contain the scalars and lie in the frame stabilizer.
    """
    budget = budget or default_budget()
    ctx = frame.ctx
    _require_scalars(frame, G, "the projected group")
    if frame.kind == "pair":
        gx, gy = [], []
        for g in G.generators:
            dec = decompose_semilinear(frame, g)
            gx.append(_component_permutation(ctx, frame.dims[0], dec.factors[0], dec.frob))
            gy.append(_component_permutation(ctx, frame.dims[1], dec.factors[1], dec.frob))
        if ctx.q > 2:
            gx.append(matrix_to_permutation(ctx, frame.dims[0], mat_scalar(ctx, frame.dims[0], ctx.generator)))
            gy.append(matrix_to_permutation(ctx, frame.dims[1], mat_scalar(ctx, frame.dims[1], ctx.generator)))
        return GroupHandle(ctx.q ** frame.dims[0], gx), GroupHandle(ctx.q ** frame.dims[1], gy)

    m = frame.nfactors
    tau_images = factor_permutation_images(frame, G)
    pi_group = GroupHandle(m, tau_images)
    if not pi_group.is_transitive():
        raise HypothesisNotMet("the factor-position action is not transitive")
    from .actions import stabilizer_in_action

    stab_gens = stabilizer_in_action(G, tau_images, m, 0)
    stab = GroupHandle(frame.points, stab_gens)
    gx = []
    seen = set()
    for s in stab.elements(budget=budget):
        dec = decompose_semilinear(frame, s)
        comp = _component_permutation(ctx, frame.dims[0], dec.factors[0], dec.frob)
        if comp.images not in seen:
            seen.add(comp.images)
            gx.append(comp)
    if ctx.q > 2:
        gx.append(
            matrix_to_permutation(ctx, frame.dims[0], mat_scalar(ctx, frame.dims[0], ctx.generator))
        )
    return GroupHandle(ctx.q ** frame.dims[0], gx), pi_group


# -- the two conditional projection checks ---------------------------------------------


def _check_common_hypotheses(frame, G, H, k, budget):
    stab = stabilizer_group(frame, budget)
    for name, grp in (("G", G), ("H", H)):
        _require_scalars(frame, grp, name)
        if not is_subgroup(grp, stab):
            raise HypothesisNotMet(f"{name} is not inside the frame stabilizer")
    eq = are_k_equivalent(G, H, k, budget)
    if not eq.equivalent:
        raise HypothesisNotMet(f"the groups are not {k}-equivalent (witness {eq.witness})")


def check_projection_equivalence(
    frame: TensorFrame, G: GroupHandle, H: GroupHandle, k: int, budget: Budget | None = None
) -> bool:
    """For k-equivalent scalar-containing subgroups of a pair-frame stabilizer,
    the X- and Y-projections are k-equivalent as well."""
    if frame.kind != "pair":
        raise ValueError("pair frames only")
    budget = budget or default_budget()
    _check_common_hypotheses(frame, G, H, k, budget)
    gx, gy = projection_groups(frame, G, budget)
    hx, hy = projection_groups(frame, H, budget)
    return (
        are_k_equivalent(gx, hx, k, budget).equivalent
        and are_k_equivalent(gy, hy, k, budget).equivalent
    )


def line_action(frame: TensorFrame, GX: GroupHandle) -> GroupHandle:
    """Action of a subgroup of GammaL(X) on the lines of X."""
    ctx = frame.ctx
    d = frame.dims[0]
    n = ctx.q**d
    reps = []
    rep_index = {}
    for v in range(1, n):
        coeffs = [int(c) for c in ctx.decode_vectors(np.array([v]), d)[0]]
        canon = _canonical_line_rep(ctx, coeffs)
        idx = int(ctx.encode_vectors(np.array([list(canon)], dtype=np.int64))[0])
        if idx not in rep_index:
            rep_index[idx] = len(reps)
            reps.append(idx)
    images = []
    for g in GX.generators:
        img = [0] * len(reps)
        for i, rep in enumerate(reps):
            target = g(rep)
            coeffs = [int(c) for c in ctx.decode_vectors(np.array([target]), d)[0]]
            canon = _canonical_line_rep(ctx, coeffs)
            img[i] = rep_index[int(ctx.encode_vectors(np.array([list(canon)], dtype=np.int64))[0])]
        images.append(Permutation(img))
    return GroupHandle(len(reps), images)


def check_power_projection_equivalence(
    frame: TensorFrame, G: GroupHandle, H: GroupHandle, k: int, budget: Budget | None = None
) -> bool:
    """For k-equivalent (k >= 3) scalar-containing subgroups of a power-frame
    stabilizer with transitive factor actions: the first-factor projections
    are k-equivalent and the factor actions have equal partition r-closures,
    r = min(orbits of the projective X-action on k-tuples, m)."""
    if frame.kind != "power":
        raise ValueError("power frames only")
    if k < 3:
        raise ValueError("this check needs k >= 3")
    if frame.dims[0] < 2:
        raise HypothesisNotMet("the factor space must have dimension >= 2")
    budget = budget or default_budget()
    _check_common_hypotheses(frame, G, H, k, budget)
    gx, pg = projection_groups(frame, G, budget)
    hx, ph = projection_groups(frame, H, budget)
    if not are_k_equivalent(gx, hx, k, budget).equivalent:
        return False
    lines = line_action(frame, gx)
    r = min(orbit_coloring(lines, k, budget).num_colors, frame.nfactors)
    return equal_groups(
        partition_r_closure(pg, r, budget), partition_r_closure(ph, r, budget)
    )


def projective_action_agrees_on_lines(
    frame: TensorFrame, g: Permutation, budget: Budget | None = None
) -> bool:
    """Do g and its decomposition act identically on the simple-tensor lines?

    The decomposition's component maps act on a line through v_1 tensor ...
    tensor v_m by moving each factor line and permuting positions; this must
    match the direct action of g on the line set.
    """
    ctx = frame.ctx
    dec = decompose_semilinear(frame, g, budget)
    m = frame.nfactors
    d = frame.dims[0]
    for combo in iproduct(*[range(1, ctx.q**dim) for dim in frame.dims]):
        factors = [
            [int(c) for c in ctx.decode_vectors(np.array([v]), dim)[0]]
            for v, dim in zip(combo, frame.dims)
        ]
        v = frame.pure_tensor(factors)
        direct_line = _canonical_line_rep(ctx, [int(c) for c in frame.coeffs(g(v))])
        moved = [None] * m
        for t in range(m):
            comp = _component_permutation(ctx, frame.dims[t], dec.factors[t], dec.frob)
            image_index = comp(
                int(ctx.encode_vectors(np.array([factors[t]], dtype=np.int64))[0])
            )
            moved[dec.tau(t)] = [int(c) for c in ctx.decode_vectors(np.array([image_index]), frame.dims[t])[0]]
        composed = frame.pure_tensor(moved)
        composed_line = _canonical_line_rep(ctx, [int(c) for c in frame.coeffs(composed)])
        if direct_line != composed_line:
            return False
    return True


# -- subfield frames -------------------------------------------------------------------


def subfield_embedding(small: FieldCtx, big: FieldCtx) -> list[int]:
    """The field embedding F_{q0} -> F_q as a lookup table, q0 = p^e0, e0 | e.

    The image of the small field's canonical generator is the smallest root
    of the small modulus inside the big field, so the table is deterministic.
    """
    if small.p != big.p or big.e % small.e:
        raise ValueError("not a subfield pair")
    if small.e == big.e:
        raise ValueError("the subfield must be proper")
    if small.e == 1:
        table = list(range(small.p))
        return table
    root = None
    for y in range(big.q):
        acc = 0
        power = 1
        for c in small.modulus:
            acc = big.add(acc, big.mul(c % big.p, power))
            power = big.mul(power, y)
        if acc == 0:
            root = y
            break
    if root is None:
        raise AssertionError("no root of the subfield modulus found")
    table = [0] * small.q
    for x in range(small.q):
        coeffs = []
        v = x
        for _ in range(small.e):
            coeffs.append(v % small.p)
            v //= small.p
        acc = 0
        power = 1
        for c in coeffs:
            acc = big.add(acc, big.mul(c, power))
            power = big.mul(power, root)
        table[x] = acc
    if len(set(table)) != small.q:
        raise AssertionError("subfield embedding is not injective")
    return table


@dataclass(frozen=True)
class SubfieldFrame:
    """V = F_q^a rewritten as V_0 tensor F_q over the subfield F_{q0}."""

    frame: TensorFrame
    big: FieldCtx
    a: int
    embedding: tuple[int, ...]
    iso: tuple[int, ...]  # F_q^a vector index -> frame vector index
    subfield_line_set: frozenset[int]  # iso images of F_q * V_0


def subfield_frame(q: int, q0: int, a: int) -> SubfieldFrame:
    """Identify F_q^a with F_{q0}^a tensor F_q over the proper subfield F_{q0}."""
    from .linalg import _factor_prime_power

    p, e = _factor_prime_power(q)
    p0, e0 = _factor_prime_power(q0)
    if p != p0 or e % e0 or e == e0:
        raise ValueError(f"F_{q0} is not a proper subfield of F_{q}")
    big = field_ctx(p, e)
    small = field_ctx(p, e0)
    emb = subfield_embedding(small, big)
    eprime = e // e0
    frame = TensorFrame(small, (a, eprime), "pair")

    # expansion of F_q in the basis 1, x, ..., x^(eprime-1) over the embedded F_{q0}
    x = None
    for cand in range(big.q):
        # the canonical generator of the big field is the class of the variable,
        # encoded as the integer p (coefficient vector (0, 1, 0, ...))
        x = p
        break
    expansion = {}
    for combo in iproduct(range(small.q), repeat=eprime):
        acc = 0
        power = 1
        for c in combo:
            acc = big.add(acc, big.mul(emb[c], power))
            power = big.mul(power, x)
        if acc in expansion:
            raise AssertionError("subfield basis expansion is not unique")
        expansion[acc] = combo

    n = big.q**a
    iso = [0] * n
    for v in range(n):
        coords = [int(c) for c in big.decode_vectors(np.array([v]), a)[0]]
        frame_coeffs = [0] * (a * eprime)
        for i, w in enumerate(coords):
            combo = expansion[w]
            for j, c in enumerate(combo):
                frame_coeffs[frame.flat((i, j))] = c
        iso[v] = frame.index(frame_coeffs)
    if len(set(iso)) != n:
        raise AssertionError("subfield identification is not bijective")

    subfield_vectors = set()
    for lam in range(big.q):
        for combo in iproduct(range(small.q), repeat=a):
            coords = [big.mul(lam, emb[c]) for c in combo]
            subfield_vectors.add(
                int(big.encode_vectors(np.array([coords], dtype=np.int64))[0])
            )
    line_set = frozenset(iso[v] for v in subfield_vectors)
    return SubfieldFrame(frame, big, a, tuple(emb), tuple(iso), line_set)
