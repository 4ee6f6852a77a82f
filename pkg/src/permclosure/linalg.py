"""Finite fields F_q, matrices, semilinear maps, and the matrix-to-permutation bridge.

Field elements are integers 0..q-1 encoding coefficient vectors of the
polynomial basis (little-endian base p).  One fixed irreducible modulus per
(p, e) is shipped as data so encodings are stable across runs.  Vectors in
F_q^a are encoded as integers little-endian base q; matrices act on row
vectors, so converting matrices to permutations is a homomorphism for the
left-to-right composition used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import prod

import numpy as np

from .perm import GroupHandle, Permutation

# Conway polynomials for the small fields used here, as coefficient tuples
# (constant term first, degree e monic).  Verified irreducible and primitive
# by the test suite.
_MODULI = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
    (11, 1): (9, 1),
    (13, 1): (11, 1),
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _poly_mul_mod(a, b, modulus, p):
    """Product of coefficient lists modulo (modulus, p)."""
    e = len(modulus) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    # reduce by the monic modulus
    for i in range(len(out) - 1, e - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(e):
                out[i - e + j] = (out[i - e + j] - c * modulus[j]) % p
    return out[:e] + [0] * (e - len(out))


class FieldCtx:
    """Arithmetic context for F_q, q = p^e, with dense lookup tables."""

    def __init__(self, p: int, e: int = 1):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        if e < 1:
            raise ValueError("extension degree must be positive")
        self.p = p
        self.e = e
        self.q = p**e
        if (p, e) in _MODULI:
            self.modulus = _MODULI[(p, e)]
        else:
            self.modulus = self._find_irreducible(p, e)
        self._build_tables()

    @staticmethod
    def _find_irreducible(p: int, e: int):
        """Lexicographically smallest monic irreducible of degree e over F_p."""
        if e == 1:
            return (0, 1)
        from itertools import product as iproduct

        for coeffs in iproduct(range(p), repeat=e):
            poly = list(coeffs) + [1]
            # irreducible iff no root chain shortcut; check by trial division
            if FieldCtx._poly_irreducible(poly, p):
                return tuple(poly)
        raise AssertionError("no irreducible polynomial found")

    @staticmethod
    def _poly_irreducible(poly, p):
        e = len(poly) - 1
        # test divisibility by every monic polynomial of degree <= e//2
        from itertools import product as iproduct

        for d in range(1, e // 2 + 1):
            for coeffs in iproduct(range(p), repeat=d):
                div = list(coeffs) + [1]
                if FieldCtx._poly_divides(div, poly, p):
                    return False
        return True

    @staticmethod
    def _poly_divides(div, poly, p):
        rem = list(poly)
        dd = len(div) - 1
        for i in range(len(rem) - 1, dd - 1, -1):
            c = rem[i]
            if c:
                for j in range(dd + 1):
                    rem[i - dd + j] = (rem[i - dd + j] - c * div[j]) % p
        return not any(rem)

    def _build_tables(self) -> None:
        p, e, q = self.p, self.e, self.q
        if e == 1:
            add = (np.arange(q)[:, None] + np.arange(q)[None, :]) % q
            mul = (np.arange(q)[:, None] * np.arange(q)[None, :]) % q
        else:
            def decode(x):
                out = []
                for _ in range(e):
                    out.append(x % p)
                    x //= p
                return out

            def encode(cs):
                v = 0
                for c in reversed(cs):
                    v = v * p + c
                return v

            add = np.zeros((q, q), dtype=np.int64)
            mul = np.zeros((q, q), dtype=np.int64)
            polys = [decode(x) for x in range(q)]
            for x in range(q):
                for y in range(q):
                    add[x, y] = encode([(a + b) % p for a, b in zip(polys[x], polys[y])])
                    mul[x, y] = encode(_poly_mul_mod(polys[x], polys[y], self.modulus, p))
        self.add_table = add
        self.mul_table = mul
        neg = np.zeros(q, dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for x in range(q):
            neg[x] = int(np.nonzero(add[x] == 0)[0][0])
            if x:
                hits = np.nonzero(mul[x] == 1)[0]
                if hits.size != 1:
                    raise ValueError(f"modulus {self.modulus} over F_{self.p} is not irreducible")
                inv[x] = int(hits[0])
        self.neg_table = neg
        self.inv_table = inv
        frob = np.zeros(q, dtype=np.int64)
        for x in range(q):
            frob[x] = self.pow(x, p)
        self.frob_table = frob
        self.generator = self._find_generator()

    # -- scalar ops -----------------------------------------------------------

    def add(self, x: int, y: int) -> int:
        return int(self.add_table[x, y])

    def sub(self, x: int, y: int) -> int:
        return int(self.add_table[x, self.neg_table[y]])

    def mul(self, x: int, y: int) -> int:
        return int(self.mul_table[x, y])

    def neg(self, x: int) -> int:
        return int(self.neg_table[x])

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of 0")
        return int(self.inv_table[x])

    def pow(self, x: int, n: int) -> int:
        result = 1
        base = x
        while n:
            if n & 1:
                result = int(self.mul_table[result, base])
            base = int(self.mul_table[base, base])
            n >>= 1
        return result

    def frob(self, x: int, power: int = 1) -> int:
        for _ in range(power % self.e):
            x = int(self.frob_table[x])
        return x

    def _find_generator(self) -> int:
        q = self.q
        if q == 2:
            return 1
        target = q - 1
        for g in range(2, q):
            seen = 1
            x = g
            order = 1
            while x != 1:
                x = int(self.mul_table[x, g])
                order += 1
            if order == target:
                return g
        raise AssertionError("no multiplicative generator found")

    def element_order(self, x: int) -> int:
        if x == 0:
            raise ValueError("0 has no multiplicative order")
        order = 1
        y = x
        while y != 1:
            y = self.mul(y, x)
            order += 1
        return order

    # -- vectors --------------------------------------------------------------

    def decode_vectors(self, indices: np.ndarray, a: int) -> np.ndarray:
        """(N, a) coordinate array for vector indices (little-endian base q)."""
        out = np.empty((len(indices), a), dtype=np.int64)
        idx = np.asarray(indices, dtype=np.int64).copy()
        for j in range(a):
            out[:, j] = idx % self.q
            idx //= self.q
        return out

    def encode_vectors(self, coords: np.ndarray) -> np.ndarray:
        a = coords.shape[1]
        weights = self.q ** np.arange(a, dtype=np.int64)
        return coords @ weights

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, e={self.e})"


@lru_cache(maxsize=32)
def field_ctx(p: int, e: int = 1) -> FieldCtx:
    return FieldCtx(p, e)


# -- matrices (tuples of row tuples, acting on row vectors) ---------------------


def mat_identity(a: int):
    return tuple(tuple(1 if i == j else 0 for j in range(a)) for i in range(a))


def mat_mul(ctx: FieldCtx, A, B):
    a = len(A)
    out = []
    for i in range(a):
        row = []
        for j in range(a):
            s = 0
            for t in range(a):
                s = ctx.add(s, ctx.mul(A[i][t], B[t][j]))
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def mat_frob(ctx: FieldCtx, A, power: int = 1):
    return tuple(tuple(ctx.frob(x, power) for x in row) for row in A)


def mat_scalar(ctx: FieldCtx, a: int, lam: int):
    return tuple(tuple(lam if i == j else 0 for j in range(a)) for i in range(a))


def mat_rank(ctx: FieldCtx, A) -> int:
    rows = [list(r) for r in A]
    a = len(rows)
    ncols = len(rows[0]) if rows else 0
    rank = 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, a):
            if rows[r][col]:
                pivot = r
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = ctx.inv(rows[rank][col])
        rows[rank] = [ctx.mul(inv, x) for x in rows[rank]]
        for r in range(a):
            if r != rank and rows[r][col]:
                c = rows[r][col]
                rows[r] = [ctx.sub(x, ctx.mul(c, y)) for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def mat_is_invertible(ctx: FieldCtx, A) -> bool:
    return mat_rank(ctx, A) == len(A)


def mat_inverse(ctx: FieldCtx, A):
    a = len(A)
    rows = [list(r) + [1 if i == j else 0 for j in range(a)] for i, r in enumerate(A)]
    rank = 0
    for col in range(a):
        pivot = None
        for r in range(rank, a):
            if rows[r][col]:
                pivot = r
                break
        if pivot is None:
            raise ValueError("matrix is singular")
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = ctx.inv(rows[rank][col])
        rows[rank] = [ctx.mul(inv, x) for x in rows[rank]]
        for r in range(a):
            if r != rank and rows[r][col]:
                c = rows[r][col]
                rows[r] = [ctx.sub(x, ctx.mul(c, y)) for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return tuple(tuple(row[a:]) for row in rows)


@dataclass(frozen=True)
class SemilinearMap:
    """x -> (coordinatewise Frobenius^frob_power of x) applied to the matrix.

    Composition matches permutation composition after conversion:
    (M1, f1) * (M2, f2) = (Frobenius^f2(M1) @ M2, f1 + f2).
    """

    matrix: tuple
    frob_power: int

    def compose(self, other: "SemilinearMap", ctx: FieldCtx) -> "SemilinearMap":
        twisted = mat_frob(ctx, self.matrix, other.frob_power)
        return SemilinearMap(
            mat_mul(ctx, twisted, other.matrix), (self.frob_power + other.frob_power) % ctx.e
        )


def matrix_to_permutation(ctx: FieldCtx, a: int, M) -> Permutation:
    """The permutation of F_q^a induced by a matrix or semilinear map."""
    if isinstance(M, SemilinearMap):
        matrix, fpow = M.matrix, M.frob_power % ctx.e
    else:
        matrix, fpow = M, 0
    if not mat_is_invertible(ctx, matrix):
        raise ValueError("singular matrix does not act as a permutation")
    n = ctx.q**a
    coords = ctx.decode_vectors(np.arange(n), a)
    if fpow:
        for _ in range(fpow):
            coords = ctx.frob_table[coords]
    mat = np.array(matrix, dtype=np.int64)
    out = np.zeros((n, a), dtype=np.int64)
    for j in range(a):
        col = np.zeros(n, dtype=np.int64)
        for i in range(a):
            col = ctx.add_table[col, ctx.mul_table[coords[:, i], mat[i, j]]]
        out[:, j] = col
    images = ctx.encode_vectors(out)
    return Permutation(tuple(int(x) for x in images))


def permutation_is_semilinear(
    ctx: FieldCtx, a: int, p: Permutation, require_linear: bool = False
) -> SemilinearMap | None:
    """Recover (matrix, Frobenius power) from a permutation of F_q^a, or None.

    The candidate matrix is read off the images of the basis vectors; each
    Frobenius power is then checked against the full action.
    """
    n = ctx.q**a
    if p.degree != n:
        raise ValueError(f"permutation degree {p.degree} is not q^a = {n}")
    if p(0) != 0:
        return None
    basis_images = []
    for i in range(a):
        e_i = ctx.q**i
        basis_images.append(p(e_i))
    coords = ctx.decode_vectors(np.array(basis_images), a)
    matrix = tuple(tuple(int(x) for x in row) for row in coords)
    if not mat_is_invertible(ctx, matrix):
        return None
    powers = [0] if require_linear else list(range(ctx.e))
    target = tuple(p.images)
    for fpow in powers:
        candidate = matrix_to_permutation(ctx, a, SemilinearMap(matrix, fpow))
        if candidate.images == target:
            return SemilinearMap(matrix, fpow)
    return None


def frobenius_permutation(ctx: FieldCtx, a: int) -> Permutation:
    return matrix_to_permutation(ctx, a, SemilinearMap(mat_identity(a), 1))


def translation_permutation(ctx: FieldCtx, a: int, vector_index: int) -> Permutation:
    """x -> x + v on F_q^a."""
    n = ctx.q**a
    coords = ctx.decode_vectors(np.arange(n), a)
    v = ctx.decode_vectors(np.array([vector_index]), a)[0]
    out = np.zeros_like(coords)
    for j in range(a):
        out[:, j] = ctx.add_table[coords[:, j], v[j]]
    return Permutation(tuple(int(x) for x in ctx.encode_vectors(out)))


def companion_matrix(ctx: FieldCtx, coeffs):
    """Companion matrix of a monic polynomial (constant term first)."""
    a = len(coeffs) - 1
    rows = []
    for i in range(a - 1):
        rows.append(tuple(1 if j == i + 1 else 0 for j in range(a)))
    rows.append(tuple(ctx.neg(c) for c in coeffs[:a]))
    return tuple(rows)


def gl_generators(ctx: FieldCtx, a: int):
    """A small generating set for GL_a(q): transvection, signed cycle, scalar.

    Validated by order checks in the test suite (and by every construction
    that relies on |GL| downstream).
    """
    if a == 1:
        return [mat_scalar(ctx, 1, ctx.generator)] if ctx.q > 2 else []
    gens = []
    transvection = [[1 if i == j else 0 for j in range(a)] for i in range(a)]
    transvection[0][1] = 1
    gens.append(tuple(tuple(r) for r in transvection))
    cycle = [[0] * a for _ in range(a)]
    for i in range(a - 1):
        cycle[i][i + 1] = 1
    cycle[a - 1][0] = ctx.neg(1) if a % 2 == 0 else 1
    gens.append(tuple(tuple(r) for r in cycle))
    if ctx.q > 2:
        gens.append(
            tuple(
                tuple(ctx.generator if i == j == 0 else (1 if i == j else 0) for j in range(a))
                for i in range(a)
            )
        )
    return gens


def gl_group(ctx: FieldCtx, a: int) -> GroupHandle:
    """GL_a(q) as a permutation group on the q^a vectors."""
    gens = [matrix_to_permutation(ctx, a, M) for M in gl_generators(ctx, a)]
    G = GroupHandle(ctx.q**a, gens)
    expected = gl_order(a, ctx.q)
    if G.order() != expected:
        raise AssertionError(
            f"GL_{a}({ctx.q}) generators give order {G.order()}, expected {expected}"
        )
    return G


def all_invertible_matrices(ctx: FieldCtx, a: int, limit: int | None = None):
    """All of GL_a(q), by filtering row tuples for full rank."""
    from itertools import product as iproduct

    total = gl_order(a, ctx.q)
    if limit is not None and total > limit:
        from .errors import BudgetExceeded

        raise BudgetExceeded(f"|GL_{a}({ctx.q})|", total, limit)
    vectors = list(iproduct(range(ctx.q), repeat=a))
    out = []

    def extend(rows):
        if len(rows) == a:
            out.append(tuple(rows))
            return
        for v in vectors:
            candidate = rows + [v]
            if mat_rank(ctx, candidate) == len(candidate):
                extend(candidate)

    extend([])
    return out


# -- classical group orders ------------------------------------------------------


def gl_order(a: int, q: int) -> int:
    """|GL_a(q)| as an exact integer."""
    if a < 1 or q < 2:
        raise ValueError("need a >= 1 and q >= 2")
    return prod(q**a - q**i for i in range(a))


def sp_order(dim: int, q: int) -> int:
    """|Sp_2m(q)| for dim = 2m."""
    if dim < 2 or dim % 2 or q < 2:
        raise ValueError("symplectic groups need even dimension >= 2")
    m = dim // 2
    return q ** (m * m) * prod(q ** (2 * i) - 1 for i in range(1, m + 1))


def go_order(epsilon: str, dim: int, q: int) -> int:
    """|O^eps_2m(q)| (full isometry group of a quadratic form of type eps)."""
    if epsilon not in ("+", "-"):
        raise ValueError("epsilon must be '+' or '-'")
    if dim < 2 or dim % 2 or q < 2:
        raise ValueError("these orthogonal groups need even dimension >= 2")
    m = dim // 2
    sign = 1 if epsilon == "+" else -1
    return 2 * q ** (m * (m - 1)) * (q**m - sign) * prod(q ** (2 * i) - 1 for i in range(1, m - 1 + 1))


# -- matrix text format -----------------------------------------------------------


def parse_matrix_file(text: str, ctx_lookup=field_ctx):
    """Parse the matrix text format: header ``a q``, then a rows of a entries.

    Several matrices may follow one another; returns (ctx, a, [matrices]).
    """
    from .errors import FormatError

    tokens = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            tokens.extend(line.split())
    if len(tokens) < 2:
        raise FormatError("matrix file needs an 'a q' header")
    a, q = int(tokens[0]), int(tokens[1])
    p, e = _factor_prime_power(q)
    ctx = ctx_lookup(p, e)
    body = [int(t) for t in tokens[2:]]
    if len(body) % (a * a):
        raise FormatError("matrix entries do not fill whole a x a matrices")
    matrices = []
    for off in range(0, len(body), a * a):
        rows = tuple(tuple(body[off + i * a + j] for j in range(a)) for i in range(a))
        for row in rows:
            for x in row:
                if not 0 <= x < q:
                    raise FormatError(f"entry {x} out of field range 0..{q - 1}")
        matrices.append(rows)
    return ctx, a, matrices


def format_matrix_file(ctx: FieldCtx, a: int, matrices) -> str:
    lines = [f"{a} {ctx.q}"]
    for M in matrices:
        for row in M:
            lines.append(" ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def _factor_prime_power(q: int) -> tuple[int, int]:
    for p in range(2, q + 1):
        if _is_prime(p) and q % p == 0:
            e = 0
            n = q
            while n % p == 0:
                n //= p
                e += 1
            if n != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, e
    raise ValueError(f"{q} is not a prime power")
