"""Exact arithmetic for the supported group backends.

Everything here is integer or rational: matrices are tuples of row tuples of
Python ints, rationals are ``fractions.Fraction``.  The module provides

* Smith normal form with unimodular transforms (and their inverses),
* solvers for linear Diophantine systems, optionally with per-row moduli,
* intertwiner lattices ``{X : X A = B X}``,
* the three group backends (trivial, finitely generated abelian, free) with
  elements and homomorphisms,
* quotient structure extraction for groups of the shape
  ``(A x R^N) / <relations>`` (mixed real/circle/free/torsion factors).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import (
    BackendMismatch,
    DimensionMismatch,
    MissingWitness,
    UnsupportedBackend,
    WrongParent,
)

Matrix = tuple  # tuple of row tuples of ints
Vector = tuple  # tuple of ints


# ---------------------------------------------------------------------------
# basic matrix helpers
# ---------------------------------------------------------------------------

def mat(rows) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity_matrix(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zero_matrix(rows: int, cols: int) -> Matrix:
    return tuple((0,) * cols for _ in range(rows))


def mat_shape(m: Matrix) -> tuple[int, int]:
    return (len(m), len(m[0]) if m else 0)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    ra, ca = mat_shape(a)
    rb, cb = mat_shape(b)
    if ca != rb:
        raise DimensionMismatch(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(ca)) for j in range(cb))
        for i in range(ra)
    )


def mat_vec(a: Matrix, v: Vector) -> Vector:
    ra, ca = mat_shape(a)
    if ca != len(v):
        raise DimensionMismatch(f"cannot apply {ra}x{ca} to vector of length {len(v)}")
    return tuple(sum(a[i][k] * v[k] for k in range(ca)) for i in range(ra))


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c: int, a: Matrix) -> Matrix:
    return tuple(tuple(c * x for x in row) for row in a)


def mat_transpose(a: Matrix) -> Matrix:
    rows, cols = mat_shape(a)
    return tuple(tuple(a[i][j] for i in range(rows)) for j in range(cols))


def det(a: Matrix) -> int:
    """Determinant via fraction-free Gaussian elimination (Bareiss)."""
    n, m = mat_shape(a)
    if n != m:
        raise DimensionMismatch("determinant needs a square matrix")
    if n == 0:
        return 1
    work = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if work[k][k] == 0:
            for i in range(k + 1, n):
                if work[i][k] != 0:
                    work[k], work[i] = work[i], work[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                work[i][j] = (work[i][j] * work[k][k] - work[i][k] * work[k][j]) // prev
            work[i][k] = 0
        prev = work[k][k]
    return sign * work[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def smith_normal_form(m) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with U*M*V = D, U and V unimodular, D a diagonal
    divisibility chain d1 | d2 | ... with nonnegative entries."""
    U, D, V, _, _ = smith_normal_form_full(m)
    return U, D, V


def smith_normal_form_full(m) -> tuple[Matrix, Matrix, Matrix, Matrix, Matrix]:
    """As :func:`smith_normal_form` but also returns (Uinv, Vinv)."""
    M = mat(m)
    rows, cols = mat_shape(M)
    d = [list(r) for r in M]
    u = [list(r) for r in identity_matrix(rows)]
    uinv = [list(r) for r in identity_matrix(rows)]
    v = [list(r) for r in identity_matrix(cols)]
    vinv = [list(r) for r in identity_matrix(cols)]

    def row_op(i, j, q):
        # row_i -= q * row_j
        for k in range(cols):
            d[i][k] -= q * d[j][k]
        for k in range(rows):
            u[i][k] -= q * u[j][k]
            uinv[k][j] += q * uinv[k][i]

    def col_op(i, j, q):
        # col_i -= q * col_j
        for k in range(rows):
            d[k][i] -= q * d[k][j]
        for k in range(cols):
            v[k][i] -= q * v[k][j]
            vinv[j][k] += q * vinv[i][k]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]
        for k in range(rows):
            uinv[k][i], uinv[k][j] = uinv[k][j], uinv[k][i]

    def swap_cols(i, j):
        for k in range(rows):
            d[k][i], d[k][j] = d[k][j], d[k][i]
        for k in range(cols):
            v[k][i], v[k][j] = v[k][j], v[k][i]
        vinv[i], vinv[j] = vinv[j], vinv[i]

    def negate_row(i):
        for k in range(cols):
            d[i][k] = -d[i][k]
        for k in range(rows):
            u[i][k] = -u[i][k]
            uinv[k][i] = -uinv[k][i]

    n = min(rows, cols)
    t = 0
    while t < n:
        # locate a pivot of minimal absolute value in the trailing block
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                val = d[i][j]
                if val != 0 and (best is None or abs(val) < best):
                    best = abs(val)
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        # clear row and column t
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                if d[i][t] != 0:
                    q = d[i][t] // d[t][t]
                    row_op(i, t, q)
                    if d[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, cols):
                if d[t][j] != 0:
                    q = d[t][j] // d[t][t]
                    col_op(j, t, q)
                    if d[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
        # enforce divisibility of the trailing block by the pivot
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if d[i][j] % d[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            row_op(t, offender, -1)  # add offender row to row t
            continue
        if d[t][t] < 0:
            negate_row(t)
        t += 1

    return (
        tuple(tuple(r) for r in u),
        tuple(tuple(r) for r in d),
        tuple(tuple(r) for r in v),
        tuple(tuple(r) for r in uinv),
        tuple(tuple(r) for r in vinv),
    )


def kernel_basis(m, ncols: int | None = None) -> list[Vector]:
    """Basis of the integer kernel {z : M z = 0}, as a list of vectors.

    ``ncols`` disambiguates the unknown count when M has no rows.
    """
    M = mat(m)
    rows, cols = mat_shape(M)
    if rows == 0:
        cols = ncols or 0
        return [tuple(1 if i == j else 0 for i in range(cols)) for j in range(cols)]
    if cols == 0:
        return []
    _, D, V = smith_normal_form(M)
    n = min(rows, cols)
    out = []
    for j in range(cols):
        if j >= n or D[j][j] == 0:
            out.append(tuple(V[i][j] for i in range(cols)))
    return out


def solve(m, b, ncols: int | None = None) -> Vector | None:
    """One integer solution of M z = b, or None if there is none."""
    M = mat(m)
    rows, cols = mat_shape(M)
    if rows == 0:
        return (0,) * (ncols or 0)
    if len(b) != rows:
        raise DimensionMismatch("right-hand side has wrong length")
    U, D, V = smith_normal_form(M)
    c = mat_vec(U, tuple(b))
    y = [0] * cols
    n = min(rows, cols)
    for i in range(rows):
        di = D[i][i] if i < n else 0
        if di == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % di != 0:
                return None
            y[i] = c[i] // di
    return mat_vec(V, tuple(y))


def column_lattice_basis(generators: list[Vector]) -> list[Vector]:
    """Reduce a generating set of a sublattice of Z^n to an actual basis."""
    gens = [g for g in generators if any(x != 0 for x in g)]
    if not gens:
        return []
    n = len(gens[0])
    W = tuple(tuple(g[i] for g in gens) for i in range(n))  # n x k
    _, D, _, Uinv, _ = smith_normal_form_full(W)
    basis = []
    for j in range(min(n, len(gens))):
        dj = D[j][j]
        if dj != 0:
            basis.append(tuple(dj * Uinv[i][j] for i in range(n)))
    return basis


def lattice_contains(basis: list[Vector], v: Vector) -> bool:
    """Whether v lies in the Z-span of the given basis vectors."""
    if all(x == 0 for x in v):
        return True
    if not basis:
        return False
    n = len(v)
    M = tuple(tuple(b[i] for b in basis) for i in range(n))
    return solve(M, v) is not None


def solve_with_moduli(m, b, moduli, ncols: int | None = None) -> tuple[Vector | None, list[Vector]]:
    """Solve M z = b where row i is a congruence mod moduli[i] (0 = exact).

    Returns (particular solution or None, basis of homogeneous solutions).
    The homogeneous basis spans {z : M z = 0 (mod moduli)} as a lattice.
    ``ncols`` disambiguates the unknown count when M has no rows.
    """
    M = mat(m)
    rows, cols = mat_shape(M)
    if rows == 0:
        cols = ncols or 0
        return (0,) * cols, [
            tuple(1 if i == j else 0 for i in range(cols)) for j in range(cols)
        ]
    aux = [i for i in range(rows) if moduli[i] != 0]
    ext = tuple(
        tuple(list(M[i]) + [moduli[i] if i == j else 0 for j in aux])
        for i in range(rows)
    )
    part = None
    sol = solve(ext, tuple(b))
    if sol is not None:
        part = sol[:cols]
    hom = [k[:cols] for k in kernel_basis(ext)]
    return part, column_lattice_basis(hom)


def solve_intertwiners(a, b) -> list[Matrix]:
    """Z-basis of the lattice {X integer m x n : X A = B X}.

    A is n x n, B is m x m; the basis is returned in a canonical
    (lexicographic) order.
    """
    A = mat(a)
    B = mat(b)
    n, n2 = mat_shape(A)
    m, m2 = mat_shape(B)
    if n != n2 or m != m2:
        raise DimensionMismatch("solve_intertwiners needs square matrices")
    if n == 0 or m == 0:
        return []
    # unknowns X[p][q] flattened row-major; equations indexed by (p, j)
    eqs = []
    for p in range(m):
        for j in range(n):
            row = [0] * (m * n)
            for q in range(n):
                row[p * n + q] += A[q][j]
            for r in range(m):
                row[r * n + j] -= B[p][r]
            eqs.append(tuple(row))
    basis = kernel_basis(tuple(eqs))
    mats = [tuple(tuple(z[p * n + q] for q in range(n)) for p in range(m)) for z in basis]
    return sorted(mats)


# ---------------------------------------------------------------------------
# group descriptors and elements
# ---------------------------------------------------------------------------

TRIVIAL = "trivial"
FG_ABELIAN = "fg_abelian"
FREE = "free"


@dataclass(frozen=True)
class GroupDescriptor:
    """A group in one of the supported backends.

    Use :func:`trivial_group`, :func:`fg_abelian` and :func:`free_group` to
    construct; they canonicalize (rank-0 groups collapse to the trivial
    backend, torsion must be a divisibility chain).
    """

    backend: str
    free_rank: int = 0
    torsion: tuple = ()
    rank: int = 0  # free backend only

    @property
    def is_abelian(self) -> bool:
        return self.backend in (TRIVIAL, FG_ABELIAN)

    @property
    def is_trivial(self) -> bool:
        return self.backend == TRIVIAL

    @property
    def dim(self) -> int:
        """Number of coordinates of an element (abelian backends)."""
        if self.backend == FREE:
            raise UnsupportedBackend("free groups have no coordinate dimension")
        return self.free_rank + len(self.torsion)

    @property
    def moduli(self) -> tuple:
        """Per-coordinate moduli; 0 marks a free coordinate."""
        return (0,) * self.free_rank + self.torsion

    @property
    def is_finite(self) -> bool:
        if self.backend == TRIVIAL:
            return True
        if self.backend == FG_ABELIAN:
            return self.free_rank == 0
        return False

    def order(self) -> int:
        if not self.is_finite:
            raise UnsupportedBackend("infinite group")
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def identity(self) -> "GroupElement":
        if self.backend == FREE:
            return GroupElement(self, ())
        return GroupElement(self, (0,) * self.dim)

    def element(self, data) -> "GroupElement":
        return GroupElement(self, tuple(int(x) for x in data))

    def elements(self):
        """Iterate over all elements (finite abelian backends only)."""
        if not self.is_finite:
            raise UnsupportedBackend("cannot enumerate an infinite group")
        for combo in itertools.product(*(range(d) for d in self.torsion)):
            yield GroupElement(self, combo)


def trivial_group() -> GroupDescriptor:
    return GroupDescriptor(TRIVIAL)


def fg_abelian(free_rank: int, torsion=()) -> GroupDescriptor:
    torsion = tuple(int(d) for d in torsion if int(d) != 1)
    if any(d < 2 for d in torsion):
        raise ValueError("torsion entries must be >= 2")
    for a, b in zip(torsion, torsion[1:]):
        if b % a != 0:
            raise ValueError(f"torsion {torsion} is not a divisibility chain")
    if free_rank == 0 and not torsion:
        return trivial_group()
    return GroupDescriptor(FG_ABELIAN, free_rank=int(free_rank), torsion=torsion)


def free_group(rank: int) -> GroupDescriptor:
    if rank == 0:
        return trivial_group()
    return GroupDescriptor(FREE, rank=int(rank))


def cyclic(d: int) -> GroupDescriptor:
    return fg_abelian(0, (d,))


def reduce_word(word) -> tuple:
    out = []
    for letter in word:
        letter = int(letter)
        if letter == 0:
            raise ValueError("free-group letters are nonzero signed indices")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


@dataclass(frozen=True)
class GroupElement:
    """An element of a group: coordinate vector (abelian) or reduced word."""

    group: GroupDescriptor
    data: tuple

    def __post_init__(self):
        if self.group.backend == FREE:
            object.__setattr__(self, "data", reduce_word(self.data))
            if self.data and max(abs(x) for x in self.data) > self.group.rank:
                raise WrongParent("word uses a generator outside the group rank")
        else:
            if len(self.data) != self.group.dim:
                raise WrongParent(
                    f"element of length {len(self.data)} in group of dim {self.group.dim}"
                )
            moduli = self.group.moduli
            object.__setattr__(
                self,
                "data",
                tuple(x % m if m else int(x) for x, m in zip(self.data, moduli)),
            )

    @property
    def coords(self) -> tuple:
        if self.group.backend == FREE:
            raise UnsupportedBackend("free-group elements have no coordinates")
        return self.data

    @property
    def word(self) -> tuple:
        if self.group.backend != FREE:
            raise UnsupportedBackend("only free-group elements are words")
        return self.data

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if self.group != other.group:
            raise WrongParent("elements of different groups")
        if self.group.backend == FREE:
            return GroupElement(self.group, self.data + other.data)
        return GroupElement(
            self.group, tuple(a + b for a, b in zip(self.data, other.data))
        )

    def inverse(self) -> "GroupElement":
        if self.group.backend == FREE:
            return GroupElement(self.group, tuple(-x for x in reversed(self.data)))
        return GroupElement(self.group, tuple(-x for x in self.data))

    def __pow__(self, n: int) -> "GroupElement":
        if n < 0:
            return self.inverse() ** (-n)
        out = self.group.identity()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_identity(self) -> bool:
        return self == self.group.identity()

    def conjugate_by(self, g: "GroupElement") -> "GroupElement":
        return g * self * g.inverse()

    def cyclic_reduction(self) -> tuple:
        if self.group.backend != FREE:
            raise UnsupportedBackend("cyclic reduction is a free-group operation")
        w = list(self.data)
        while len(w) >= 2 and w[0] == -w[-1]:
            w = w[1:-1]
        return tuple(w)

    def is_conjugate_to(self, other: "GroupElement") -> bool:
        if self.group != other.group:
            raise WrongParent("elements of different groups")
        if self.group.backend != FREE:
            return self == other
        a = self.cyclic_reduction()
        b = other.cyclic_reduction()
        if len(a) != len(b):
            return False
        if not a:
            return True
        return any(a[i:] + a[:i] == b for i in range(len(a)))


# ---------------------------------------------------------------------------
# homomorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Homomorphism:
    """A homomorphism between supported groups.

    Abelian source and target: integer ``matrix`` (target dim x source dim),
    entries stored reduced mod the target moduli.  Free or trivial source:
    ``images``, one target element per source generator.  Construction is
    permissive; call :meth:`defect` for a well-definedness diagnostic.
    """

    source: GroupDescriptor
    target: GroupDescriptor
    matrix: Matrix | None = None
    images: tuple | None = None

    def __post_init__(self):
        if self.source.is_trivial:
            if self.target.is_abelian:
                object.__setattr__(self, "matrix", zero_matrix(self.target.dim, 0))
                object.__setattr__(self, "images", None)
            else:
                object.__setattr__(self, "matrix", None)
                object.__setattr__(self, "images", ())
            return
        if self.source.backend == FREE:
            if self.images is None:
                raise MissingWitness("free-source homomorphism needs generator images")
            images = tuple(self.images)
            if len(images) != self.source.rank:
                raise DimensionMismatch("one image per free generator required")
            for im in images:
                if im.group != self.target:
                    raise WrongParent("image element lies in the wrong group")
            object.__setattr__(self, "images", images)
            object.__setattr__(self, "matrix", None)
            return
        # abelian, nontrivial source
        if not self.target.is_abelian:
            raise UnsupportedBackend(
                "homomorphisms from a nontrivial abelian group into a free group "
                "are not supported"
            )
        if self.matrix is None:
            raise DimensionMismatch("abelian homomorphism needs a matrix")
        M = mat(self.matrix)
        rows, cols = mat_shape(M)
        if rows != self.target.dim or cols != self.source.dim:
            raise DimensionMismatch(
                f"matrix is {rows}x{cols}, expected "
                f"{self.target.dim}x{self.source.dim}"
            )
        tm = self.target.moduli
        M = tuple(
            tuple(x % tm[i] if tm[i] else x for x in row) for i, row in enumerate(M)
        )
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "images", None)

    def defect(self) -> str | None:
        """None if well defined, else a short diagnostic."""
        if self.source.is_trivial or self.source.backend == FREE:
            return None
        sm = self.source.moduli
        tm = self.target.moduli
        for j, d in enumerate(sm):
            if d == 0:
                continue
            for i in range(self.target.dim):
                v = d * self.matrix[i][j]
                if (v % tm[i] if tm[i] else v) != 0:
                    return (
                        f"not well defined on torsion: {d} * column {j} has entry "
                        f"{self.matrix[i][j]} in coordinate {i} (modulus {tm[i]})"
                    )
        return None

    def apply(self, x: GroupElement) -> GroupElement:
        if x.group != self.source:
            raise WrongParent("element is not in the source group")
        if self.source.is_trivial:
            return self.target.identity()
        if self.source.backend == FREE:
            out = self.target.identity()
            for letter in x.word:
                img = self.images[abs(letter) - 1]
                out = out * (img if letter > 0 else img.inverse())
            return out
        return GroupElement(self.target, mat_vec(self.matrix, x.coords))

    def __call__(self, x: GroupElement) -> GroupElement:
        return self.apply(x)

    def compose(self, other: "Homomorphism") -> "Homomorphism":
        """self after other."""
        if other.target != self.source:
            raise BackendMismatch("homomorphisms are not chainable")
        if other.source.is_trivial or other.source.backend == FREE:
            if other.source.is_trivial:
                return Homomorphism(other.source, self.target)
            return Homomorphism(
                other.source,
                self.target,
                images=tuple(self.apply(im) for im in other.images),
            )
        return Homomorphism(
            other.source, self.target, matrix=mat_mul(self.matrix, other.matrix)
        )

    def is_identity(self) -> bool:
        if self.source != self.target:
            return False
        return self == identity_hom(self.source)


def identity_hom(g: GroupDescriptor) -> Homomorphism:
    if g.backend == FREE:
        return Homomorphism(
            g, g, images=tuple(GroupElement(g, (i + 1,)) for i in range(g.rank))
        )
    return Homomorphism(g, g, matrix=identity_matrix(g.dim))


def zero_hom(source: GroupDescriptor, target: GroupDescriptor) -> Homomorphism:
    if source.backend == FREE:
        return Homomorphism(source, target, images=(target.identity(),) * source.rank)
    return Homomorphism(source, target, matrix=zero_matrix(target.dim, source.dim))


def conjugation_hom(g: GroupDescriptor, alpha: GroupElement) -> Homomorphism:
    """Conjugation x -> alpha x alpha^{-1} (identity on abelian backends)."""
    if alpha.group != g:
        raise WrongParent("conjugator lies in the wrong group")
    if g.is_abelian:
        return identity_hom(g)
    inv = alpha.inverse()
    return Homomorphism(
        g,
        g,
        images=tuple(alpha * GroupElement(g, (i + 1,)) * inv for i in range(g.rank)),
    )


def hom_apply(f: Homomorphism, x: GroupElement) -> GroupElement:
    return f.apply(x)


def hom_compose(f: Homomorphism, g: Homomorphism) -> Homomorphism:
    return f.compose(g)


def hom_equal(f: Homomorphism, g: Homomorphism) -> bool:
    """Equality as maps (matrix entries reduced, or on free generators)."""
    if f.source != g.source or f.target != g.target:
        return False
    if f.source.is_trivial:
        return True
    if f.source.backend == FREE:
        return f.images == g.images
    return f.matrix == g.matrix


def hom_inverse(f: Homomorphism) -> Homomorphism | None:
    """Two-sided inverse of an abelian-backend homomorphism, or None.

    Solves N*M = I (mod source moduli) and M*N = I (mod target moduli)
    simultaneously for an integer matrix N.
    """
    if not (f.source.is_abelian and f.target.is_abelian):
        raise UnsupportedBackend("hom_inverse needs abelian backends")
    if f.defect() is not None:
        return None
    da, db = f.source.dim, f.target.dim
    if da == 0 and db == 0:
        return Homomorphism(f.target, f.source)
    # unknowns: N (da x db) flattened row-major
    eqs = []
    rhs = []
    mods = []
    M = f.matrix
    # N*M = I, row congruences mod source moduli
    for i in range(da):
        for j in range(da):
            row = [0] * (da * db)
            for k in range(db):
                row[i * db + k] = M[k][j]
            eqs.append(tuple(row))
            rhs.append(1 if i == j else 0)
            mods.append(f.source.moduli[i])
    # M*N = I, row congruences mod target moduli
    for i in range(db):
        for j in range(db):
            row = [0] * (da * db)
            for k in range(da):
                row[k * db + j] = M[i][k]
            eqs.append(tuple(row))
            rhs.append(1 if i == j else 0)
            mods.append(f.target.moduli[i])
    part, _ = solve_with_moduli(tuple(eqs), tuple(rhs), tuple(mods), ncols=da * db)
    if part is None:
        return None
    N = tuple(tuple(part[i * db + k] for k in range(db)) for i in range(da))
    return Homomorphism(f.target, f.source, matrix=N)


def hom_is_iso(f: Homomorphism, inverse_witness: Homomorphism | None = None) -> bool:
    """Whether f is an isomorphism.

    Abelian backends compute an inverse; free backends require a witness and
    check both composites on generators.
    """
    if f.source.is_abelian and f.target.is_abelian:
        if inverse_witness is not None:
            return _check_witness(f, inverse_witness)
        return hom_inverse(f) is not None
    if inverse_witness is None:
        raise MissingWitness("free-backend hom_is_iso needs an inverse witness")
    return _check_witness(f, inverse_witness)


def _check_witness(f: Homomorphism, w: Homomorphism) -> bool:
    if w.source != f.target or w.target != f.source:
        return False
    if f.defect() is not None or w.defect() is not None:
        return False
    return hom_equal(w.compose(f), identity_hom(f.source)) and hom_equal(
        f.compose(w), identity_hom(f.target)
    )


def hom_is_injective(f: Homomorphism) -> bool:
    """Kernel triviality for abelian-backend homomorphisms (via Smith)."""
    if not (f.source.is_abelian and f.target.is_abelian):
        raise UnsupportedBackend("injectivity test needs abelian backends")
    if f.source.is_trivial:
        return True
    _, hom_basis = solve_with_moduli(
        f.matrix, (0,) * f.target.dim, f.target.moduli
    )
    # kernel of the induced map is trivial iff every solution is a relation
    src = f.source.moduli
    for vec in hom_basis:
        for x, m in zip(vec, src):
            if (m == 0 and x != 0) or (m != 0 and x % m != 0):
                return False
    return True


# ---------------------------------------------------------------------------
# finitely generated abelian quotients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FgQuotient:
    """Z^dim modulo the lattice spanned by relation columns.

    Provides canonical coordinates: ``coords(v)`` returns the class of ``v``
    in the normal form Z^free x prod Z_{d_i}; coordinate i has modulus
    ``moduli[i]`` (0 marks a free coordinate).
    """

    dim: int
    transform: Matrix  # U: new coords = U * old
    moduli: tuple      # per-new-coordinate modulus, 0 = free

    @staticmethod
    def from_relations(dim: int, relations: list[Vector]) -> "FgQuotient":
        rels = [r for r in relations if any(x != 0 for x in r)]
        if dim == 0:
            return FgQuotient(0, (), ())
        if not rels:
            return FgQuotient(dim, identity_matrix(dim), (0,) * dim)
        R = tuple(tuple(r[i] for r in rels) for i in range(dim))
        U, D, _ = smith_normal_form(R)
        n = min(dim, len(rels))
        moduli = []
        for i in range(dim):
            d = D[i][i] if i < n else 0
            moduli.append(d)
        # order coordinates: torsion (>1) first in chain order, then free;
        # coordinates with modulus 1 vanish.
        keep = [i for i in range(dim) if moduli[i] != 1]
        transform = tuple(U[i] for i in keep)
        return FgQuotient(dim, transform, tuple(moduli[i] for i in keep))

    def coords(self, v: Vector) -> Vector:
        if len(v) != self.dim:
            raise DimensionMismatch("vector has wrong length for quotient")
        out = mat_vec(self.transform, v) if self.transform else ()
        return tuple(x % m if m else x for x, m in zip(out, self.moduli))

    def descriptor(self) -> GroupDescriptor:
        free = sum(1 for m in self.moduli if m == 0)
        torsion = sorted(m for m in self.moduli if m > 1)
        return fg_abelian(free, torsion)

    def element(self, v: Vector) -> GroupElement:
        """Class of an ambient vector as an element of descriptor()."""
        desc = self.descriptor()
        if desc.is_trivial:
            return desc.identity()
        c = self.coords(v)
        tor = [x for x, m in zip(c, self.moduli) if m > 1]
        fre = [x for x, m in zip(c, self.moduli) if m == 0]
        # descriptor orders free coordinates first, then the torsion chain
        return desc.element(tuple(fre) + tuple(tor))

    def is_zero(self, v: Vector) -> bool:
        return all(x == 0 for x in self.coords(v))


# ---------------------------------------------------------------------------
# mixed quotients (A x R^N) / <relations>
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixedQuotientStructure:
    """Closed-form factor list of a quotient (A x R^N) / <relations>.

    ``circle_periods`` are the canonical invariant-factor periods of the
    compact part of the flow lattice: they are invariant under permuting
    relations and under unimodular change of the R^N coordinates, so a torus
    may be reported in divisibility-chain form rather than in the raw input
    periods.  ``unresolved`` carries a textual presentation when no closed
    form was achieved.
    """

    real_rank: int = 0
    circle_periods: tuple = ()
    free_rank: int = 0
    torsion: tuple = ()
    unresolved: str | None = None

    def __post_init__(self):
        if self.unresolved is None:
            object.__setattr__(
                self,
                "circle_periods",
                tuple(sorted(Fraction(p) for p in self.circle_periods)),
            )
            object.__setattr__(self, "torsion", tuple(sorted(self.torsion)))

    @property
    def resolved(self) -> bool:
        return self.unresolved is None

    def factors(self) -> list[str]:
        if not self.resolved:
            return [f"unresolved: {self.unresolved}"]
        out = ["R"] * self.real_rank
        out += [f"circle({p})" for p in self.circle_periods]
        out += ["Z"] * self.free_rank
        out += [f"Z_{d}" for d in self.torsion]
        return out

    def __str__(self) -> str:
        fs = self.factors()
        return " x ".join(fs) if fs else "1"


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b) if a and b else max(abs(a), abs(b))


def _fraction_matrix_snf_periods(cols: list[tuple]) -> list[Fraction]:
    """Canonical periods of R^N / <lattice generated by rational columns>."""
    if not cols:
        return []
    n = len(cols[0])
    den = 1
    for c in cols:
        for x in c:
            den = _lcm(den, Fraction(x).denominator)
    int_cols = [tuple(int(Fraction(x) * den) for x in c) for c in cols]
    basis = column_lattice_basis(int_cols)
    if not basis:
        return []
    W = tuple(tuple(b[i] for b in basis) for i in range(n))
    _, D, _ = smith_normal_form(W)
    periods = []
    for j in range(min(n, len(basis))):
        if D[j][j] != 0:
            periods.append(Fraction(D[j][j], den))
    return periods


def mixed_quotient_structure(
    real_dims: int, abelian: GroupDescriptor, relations
) -> MixedQuotientStructure:
    """Structure of (A x R^N) / <(v_i, a_i)> for an fg abelian A.

    ``relations`` is an iterable of pairs (rational vector of length N,
    GroupElement of A).  The quotient always splits as (identity component) x
    (component group) because the identity component is divisible; both parts
    are computed exactly.
    """
    if not abelian.is_abelian:
        raise UnsupportedBackend("mixed_quotient_structure needs an abelian backend")
    N = int(real_dims)
    rels = [(tuple(Fraction(x) for x in v), a) for v, a in relations]
    for v, a in rels:
        if len(v) != N:
            raise DimensionMismatch("relation vector has wrong length")
        if a.group != abelian:
            raise WrongParent("relation element lies in the wrong group")
    dA = 0 if abelian.is_trivial else abelian.dim
    k = len(rels)

    # kernel combos: integer combinations of relations with zero R^N part
    den = 1
    for v, _ in rels:
        for x in v:
            den = _lcm(den, x.denominator)
    vmat = tuple(tuple(int(v[i] * den) for v, _ in rels) for i in range(N))
    combos = kernel_basis(vmat, ncols=k)
    extra = (
        [
            tuple(
                sum(n * rels[j][1].coords[i] for j, n in enumerate(combo))
                for i in range(dA)
            )
            for combo in combos
        ]
        if dA
        else []
    )

    moduli_cols = [
        tuple(m if i == j else 0 for i in range(dA))
        for j, m in enumerate(abelian.moduli)
        if m
    ]
    quot = FgQuotient.from_relations(dA, moduli_cols + extra)

    # lattice of R^N parts, with lifted A-parts
    if k and N:
        U, D, V = smith_normal_form(vmat)
        s = sum(1 for j in range(min(N, k)) if D[j][j] != 0)
        lift_combos = [tuple(V[i][j] for i in range(k)) for j in range(s)]
    else:
        s = 0
        lift_combos = []
    b_vectors = []
    lift_coords = []
    for combov in lift_combos:
        b = tuple(
            sum(Fraction(n) * rels[j][0][i] for j, n in enumerate(combov))
            for i in range(N)
        )
        b_vectors.append(b)
        if dA:
            a = tuple(
                sum(n * rels[j][1].coords[i] for j, n in enumerate(combov))
                for i in range(dA)
            )
        else:
            a = ()
        lift_coords.append(quot.coords(a) if dA else ())

    # identity component: R^N modulo combos whose component-group part is zero
    qm = quot.moduli
    if s:
        eqs = tuple(
            tuple(lift_coords[j][i] for j in range(s)) for i in range(len(qm))
        )
        _, gamma_combos = solve_with_moduli(eqs, (0,) * len(qm), qm, ncols=s)
    else:
        gamma_combos = []
    gamma_cols = [
        tuple(sum(Fraction(w[j]) * b_vectors[j][i] for j in range(s)) for i in range(N))
        for w in gamma_combos
    ]
    periods = _fraction_matrix_snf_periods(gamma_cols)
    real_rank = N - len(periods)

    # component group: quotient of A' by the projected lifts
    pi0 = FgQuotient.from_relations(
        len(qm),
        [tuple(m if i == j else 0 for i in range(len(qm))) for j, m in enumerate(qm) if m]
        + [tuple(c) for c in lift_coords],
    )
    desc = pi0.descriptor()
    return MixedQuotientStructure(
        real_rank=real_rank,
        circle_periods=tuple(periods),
        free_rank=desc.free_rank if not desc.is_trivial else 0,
        torsion=desc.torsion if not desc.is_trivial else (),
    )
