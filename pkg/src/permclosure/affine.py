"""Affine groups V semidirect G0 as permutation groups, and their closure reduction.

An affine group here is always built from an explicit spec: a prime-field
vector space (extension-field stabilizers are viewed over the prime field,
which keeps the reduction's general linear group the prime-field one) plus
generators of the zero stabilizer.  The closure reduction recomputes the
zero stabilizer of the k-closure as the (k-1)-closure of G0 intersected
with GL(V); its hypothesis (the closure is still affine with the same
translation socle) is checked at runtime, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .actions import is_primitive
from .budget import Budget, default_budget
from .closures import k_closure
from .errors import LemmaInapplicable
from .linalg import (
    FieldCtx,
    SemilinearMap,
    all_invertible_matrices,
    field_ctx,
    mat_identity,
    mat_is_invertible,
    matrix_to_permutation,
    translation_permutation,
)
from .perm import GroupHandle, Permutation, equal_groups


@dataclass(frozen=True)
class AffineSpec:
    """A vector space F_p^a together with zero-stabilizer generators.

    ``zero_stabilizer_gens`` may contain matrices over F_p (tuples of row
    tuples) or SemilinearMaps over an extension field F_{p^e}; the latter are
    realized on the same points by viewing F_{p^e}^a as F_p^{a*e}.
    """

    p: int
    a: int
    zero_stabilizer_gens: tuple = ()
    extension_e: int = 1

    @property
    def ctx(self) -> FieldCtx:
        return field_ctx(self.p, 1)

    @property
    def prime_dimension(self) -> int:
        return self.a * self.extension_e

    @property
    def degree(self) -> int:
        return self.p**self.prime_dimension


def _zero_stabilizer_perms(spec: AffineSpec) -> list[Permutation]:
    out = []
    if spec.extension_e == 1:
        for M in spec.zero_stabilizer_gens:
            if isinstance(M, SemilinearMap):
                raise ValueError("semilinear generators need extension_e > 1")
            if not mat_is_invertible(spec.ctx, M):
                raise ValueError("singular zero-stabilizer generator")
            out.append(matrix_to_permutation(spec.ctx, spec.a, M))
        return out
    ext = field_ctx(spec.p, spec.extension_e)
    for M in spec.zero_stabilizer_gens:
        sl = M if isinstance(M, SemilinearMap) else SemilinearMap(M, 0)
        if not mat_is_invertible(ext, sl.matrix):
            raise ValueError("singular zero-stabilizer generator")
        # F_{p^e}^a and F_p^{ae} share the same little-endian integer encoding,
        # so the extension-field permutation is already the prime-field one
        out.append(matrix_to_permutation(ext, spec.a, sl))
    return out


def translation_subgroup(spec: AffineSpec) -> GroupHandle:
    ctx = spec.ctx
    s = spec.prime_dimension
    gens = [translation_permutation(ctx, s, ctx.q**i * 1) for i in range(s)]
    return GroupHandle(spec.degree, gens)


def translation_elements(spec: AffineSpec) -> set[tuple]:
    """All p^a translations, as image tuples."""
    ctx = spec.ctx
    s = spec.prime_dimension
    return {
        translation_permutation(ctx, s, v).images for v in range(spec.degree)
    }


def affine_group(spec: AffineSpec) -> GroupHandle:
    """V semidirect <zero-stabilizer gens>, generated by basis translations."""
    gens = list(translation_subgroup(spec).generators)
    gens.extend(_zero_stabilizer_perms(spec))
    return GroupHandle(spec.degree, gens)


def zero_stabilizer_group(spec: AffineSpec) -> GroupHandle:
    """The zero stabilizer as a permutation group on V."""
    return GroupHandle(spec.degree, _zero_stabilizer_perms(spec))


def reduced_zero_stabilizer(spec: AffineSpec, k: int, budget: Budget | None = None) -> GroupHandle:
    """(k-1)-closure of the zero stabilizer, intersected with GL over F_p.

    The intersection is by enumeration of GL_s(p) (s the prime-field
    dimension) filtered through membership in the closure.
    """
    if k < 2:
        raise ValueError("the reduction needs k >= 2")
    budget = budget or default_budget()
    G0 = zero_stabilizer_group(spec)
    closure = k_closure(G0, k - 1, budget=budget).group
    ctx = spec.ctx
    s = spec.prime_dimension
    matrices = all_invertible_matrices(ctx, s, limit=budget.gl_enumeration)
    kept = []
    for M in matrices:
        perm = matrix_to_permutation(ctx, s, M)
        if closure.contains(perm):
            kept.append(perm)
    return GroupHandle(spec.degree, kept)


def closure_is_affine_with_socle(
    closure: GroupHandle, spec: AffineSpec
) -> bool:
    """Is the translation subgroup still regular and normal in the closure?"""
    translations = translation_elements(spec)
    v_gens = translation_subgroup(spec).generators
    for c in closure.generators:
        c_inv = c.inverse()
        for t in v_gens:
            if (c_inv * t * c).images not in translations:
                return False
    return True


def check_affine_closure_reduction(
    spec: AffineSpec, k: int, budget: Budget | None = None
) -> bool:
    """Zero stabilizer of the k-closure == reduced zero stabilizer?

    Raises LemmaInapplicable when the k-closure is not an affine group with
    the same translation socle (the reduction's hypothesis).
    """
    if k < 2:
        raise ValueError("the reduction needs k >= 2")
    budget = budget or default_budget()
    G = affine_group(spec)
    closure = k_closure(G, k, budget=budget).group
    if not closure_is_affine_with_socle(closure, spec):
        raise LemmaInapplicable(
            f"the {k}-closure (order {closure.order()}) does not normalize the "
            f"translation subgroup; the zero-stabilizer reduction does not apply"
        )
    h0 = closure.point_stabilizer(0)
    rhs = reduced_zero_stabilizer(spec, k, budget)
    return equal_groups(h0, rhs)


def check_socle_preservation(spec: AffineSpec, k: int, budget: Budget | None = None) -> bool:
    """socle(G^(k)) equals the translation subgroup, for primitive affine G, k >= 4."""
    if k < 4:
        raise ValueError("socle preservation is only asserted for k >= 4")
    from .structure import socle

    budget = budget or default_budget()
    G = affine_group(spec)
    if not is_primitive(G):
        raise LemmaInapplicable("socle preservation needs a primitive affine group")
    closure = k_closure(G, k, budget=budget).group
    return equal_groups(socle(closure, budget=budget), translation_subgroup(spec))


def agl(a: int, p: int, e: int = 1) -> GroupHandle:
    """The full affine general linear group AGL_a(p^e) on p^(a*e) points."""
    from .linalg import gl_generators

    ctx = field_ctx(p, e)
    gens = gl_generators(ctx, a)
    if e == 1:
        spec = AffineSpec(p=p, a=a, zero_stabilizer_gens=tuple(gens))
    else:
        spec = AffineSpec(
            p=p, a=a, zero_stabilizer_gens=tuple(SemilinearMap(M, 0) for M in gens), extension_e=e
        )
    return affine_group(spec)
