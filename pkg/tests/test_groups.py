"""Tests for the exact-arithmetic layer: normal forms, solvers, backends."""

import itertools
import random
from fractions import Fraction

import pytest

from picgraph.errors import MissingWitness, UnsupportedBackend
from picgraph.groups import (
    FgQuotient,
    GroupElement,
    Homomorphism,
    conjugation_hom,
    cyclic,
    det,
    fg_abelian,
    free_group,
    hom_compose,
    hom_inverse,
    hom_is_injective,
    hom_is_iso,
    identity_hom,
    identity_matrix,
    kernel_basis,
    lattice_contains,
    mat,
    mat_mul,
    mixed_quotient_structure,
    MixedQuotientStructure,
    smith_normal_form,
    solve,
    solve_intertwiners,
    solve_with_moduli,
    trivial_group,
    zero_matrix,
)


def random_matrix(rng, rows, cols, bound=9):
    return tuple(
        tuple(rng.randint(-bound, bound) for _ in range(cols)) for _ in range(rows)
    )


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def snf_contract(m):
    """Re-multiplication oracle: U*M*V == D, U, V unimodular, D a chain."""
    U, D, V = smith_normal_form(m)
    assert mat_mul(mat_mul(U, mat(m)), V) == D
    assert det(U) in (1, -1)
    assert det(V) in (1, -1)
    diag = [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]
    for i in range(len(D)):
        for j in range(len(D[0]) if D else 0):
            if i != j:
                assert D[i][j] == 0
    nz = [d for d in diag if d != 0]
    assert all(d > 0 for d in nz)
    for a, b in zip(nz, nz[1:]):
        assert b % a == 0
    assert all(d == 0 for d in diag[len(nz):])
    return D


def test_snf_identity():
    U, D, V = smith_normal_form(identity_matrix(2))
    assert D == identity_matrix(2)
    assert U == identity_matrix(2)
    assert V == identity_matrix(2)


def test_snf_zero():
    U, D, V = smith_normal_form(zero_matrix(3, 2))
    assert D == zero_matrix(3, 2)
    assert U == identity_matrix(3)
    assert V == identity_matrix(2)


def test_snf_chain_example():
    D = snf_contract([[2, 4], [6, 8]])
    assert D == ((2, 0), (0, 4))


def test_snf_random():
    rng = random.Random(7)
    for _ in range(400):
        rows = rng.randint(0, 5)
        cols = rng.randint(0, 5)
        snf_contract(random_matrix(rng, rows, cols))


def test_solve_and_kernel():
    rng = random.Random(11)
    for _ in range(200):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 4)
        M = random_matrix(rng, rows, cols, bound=5)
        x = tuple(rng.randint(-4, 4) for _ in range(cols))
        b = tuple(sum(M[i][j] * x[j] for j in range(cols)) for i in range(rows))
        got = solve(M, b)
        assert got is not None
        assert tuple(sum(M[i][j] * got[j] for j in range(cols)) for i in range(rows)) == b
        for v in kernel_basis(M):
            assert all(sum(M[i][j] * v[j] for j in range(cols)) == 0 for i in range(rows))


# ---------------------------------------------------------------------------
# intertwiner lattices
# ---------------------------------------------------------------------------

def brute_force_intertwiners(A, B, bound=3):
    """All X with entries in [-bound, bound] and X*A == B*X."""
    n = len(A)
    m = len(B)
    out = []
    for entries in itertools.product(range(-bound, bound + 1), repeat=n * m):
        X = tuple(tuple(entries[p * n + q] for q in range(n)) for p in range(m))
        if mat_mul(X, A) == mat_mul(B, X):
            out.append(X)
    return out


def flatten(X):
    return tuple(x for row in X for x in row)


def test_intertwiners_unipotent():
    A = ((1, 1), (0, 1))
    basis = solve_intertwiners(A, A)
    assert len(basis) == 2
    # solutions are exactly the matrices [[p, q], [0, p]]
    for X in brute_force_intertwiners(A, A):
        assert X[1][0] == 0 and X[0][0] == X[1][1]
        assert lattice_contains([flatten(b) for b in basis], flatten(X))


def test_intertwiners_identity_full_lattice():
    basis = solve_intertwiners(identity_matrix(2), identity_matrix(2))
    assert len(basis) == 4


def test_intertwiners_2_vs_3():
    assert solve_intertwiners([[2]], [[3]]) == []


def test_intertwiners_complete_vs_brute_force():
    rng = random.Random(3)
    for _ in range(25):
        n = rng.randint(1, 2)
        m = rng.randint(1, 2)
        A = random_matrix(rng, n, n, bound=2)
        B = random_matrix(rng, m, m, bound=2)
        basis = solve_intertwiners(A, B)
        flat = [flatten(b) for b in basis]
        for X in basis:
            assert mat_mul(X, A) == mat_mul(B, X)
        for X in brute_force_intertwiners(A, B):
            assert lattice_contains(flat, flatten(X))


# ---------------------------------------------------------------------------
# groups, elements, homomorphisms
# ---------------------------------------------------------------------------

def test_descriptor_canonicalization():
    assert fg_abelian(0, ()) == trivial_group()
    assert free_group(0) == trivial_group()
    assert fg_abelian(1).dim == 1
    with pytest.raises(ValueError):
        fg_abelian(0, (2, 3))  # not a chain
    assert fg_abelian(0, (2, 4)).torsion == (2, 4)


def test_element_reduction():
    Z6 = cyclic(6)
    assert Z6.element((8,)).coords == (2,)
    F = free_group(2)
    w = GroupElement(F, (1, 2, -2, -1, 2))
    assert w.word == (2,)
    assert (w * w.inverse()).is_identity()


def test_free_conjugacy():
    F = free_group(2)
    a = GroupElement(F, (1, 2))
    b = GroupElement(F, (2, 1))
    c = GroupElement(F, (1, -2))
    assert a.is_conjugate_to(b)
    assert not a.is_conjugate_to(c)


def test_projection_apply():
    Z2 = fg_abelian(2)
    pr2 = Homomorphism(Z2, fg_abelian(1), matrix=[[0, 1]])
    assert pr2.apply(Z2.element((3, 5))).coords == (5,)


def test_is_iso_with_witness():
    Z2 = fg_abelian(2)
    f = Homomorphism(Z2, Z2, matrix=[[1, 1], [0, 1]])
    w = Homomorphism(Z2, Z2, matrix=[[1, -1], [0, 1]])
    assert hom_is_iso(f, w)
    assert hom_is_iso(f)


def test_index_two_not_iso():
    Z = fg_abelian(1)
    assert not hom_is_iso(Homomorphism(Z, Z, matrix=[[2]]))


def test_torsion_iso():
    Z2 = cyclic(2)
    f = Homomorphism(Z2, Z2, matrix=[[3]])  # 3 = 1 mod 2
    assert hom_is_iso(f)
    Z4 = cyclic(4)
    g = Homomorphism(Z4, Z4, matrix=[[2]])
    assert not hom_is_iso(g)


def test_free_iso_needs_witness():
    F = free_group(1)
    f = identity_hom(F)
    with pytest.raises(MissingWitness):
        hom_is_iso(f)
    assert hom_is_iso(f, f)


def test_hom_compose_associative_sampled():
    rng = random.Random(5)
    Z2 = fg_abelian(2)
    for _ in range(50):
        f, g, h = (
            Homomorphism(Z2, Z2, matrix=random_matrix(rng, 2, 2, 3)) for _ in range(3)
        )
        assert hom_compose(hom_compose(f, g), h) == hom_compose(f, hom_compose(g, h))


def test_iso_closed_under_composition():
    rng = random.Random(9)
    Z2 = fg_abelian(2)
    found = 0
    while found < 20:
        f = Homomorphism(Z2, Z2, matrix=random_matrix(rng, 2, 2, 2))
        g = Homomorphism(Z2, Z2, matrix=random_matrix(rng, 2, 2, 2))
        if hom_is_iso(f) and hom_is_iso(g):
            assert hom_is_iso(hom_compose(f, g))
            found += 1


def test_hom_inverse_roundtrip():
    A = fg_abelian(1, (4,))
    f = Homomorphism(A, A, matrix=[[1, 1], [0, 3]])
    w = hom_inverse(f)
    assert w is not None
    assert hom_compose(w, f) == identity_hom(A)
    assert hom_compose(f, w) == identity_hom(A)


def test_injectivity():
    Z2 = fg_abelian(2)
    Z = fg_abelian(1)
    assert not hom_is_injective(Homomorphism(Z2, Z, matrix=[[0, 1]]))
    assert hom_is_injective(Homomorphism(Z, Z2, matrix=[[1], [0]]))
    assert hom_is_injective(Homomorphism(cyclic(2), cyclic(4), matrix=[[2]]))
    assert not hom_is_injective(Homomorphism(cyclic(4), cyclic(4), matrix=[[2]]))


def test_conjugation_hom_free():
    F = free_group(2)
    x = GroupElement(F, (1,))
    c = conjugation_hom(F, x)
    w = GroupElement(F, (2,))
    assert c.apply(w).word == (1, 2, -1)


def test_abelian_source_free_target_rejected():
    with pytest.raises(UnsupportedBackend):
        Homomorphism(fg_abelian(1), free_group(1), matrix=[[1]])


def test_trivial_source_free_target():
    f = Homomorphism(trivial_group(), free_group(2))
    assert f.apply(trivial_group().identity()).is_identity()


# ---------------------------------------------------------------------------
# mixed quotient structure
# ---------------------------------------------------------------------------

def test_mixed_quotient_trivial_circle():
    T = trivial_group()
    s = mixed_quotient_structure(1, T, [((Fraction(5, 2),), T.identity())])
    assert s == MixedQuotientStructure(circle_periods=(Fraction(5, 2),))


def test_mixed_quotient_unwinds_free_generator():
    Z = fg_abelian(1)
    s = mixed_quotient_structure(1, Z, [((Fraction(1),), Z.element((1,)))])
    assert s == MixedQuotientStructure(real_rank=1)


def coset_period_oracle(rho, k):
    """Enumerate cosets of <(rho, 1)> in (R x Z_k) via t - m*rho mod k*rho."""
    reps = set()
    for m in range(k):
        for t_num in range(0, k * rho.numerator * 2):
            t = Fraction(t_num, 2 * rho.denominator)
            reps.add((t - m * rho) % (k * rho))
    return k * rho


def test_mixed_quotient_torsion_generator():
    for k in (2, 3, 5):
        Zk = cyclic(k)
        rho = Fraction(3, 2)
        s = mixed_quotient_structure(1, Zk, [((rho,), Zk.element((1,)))])
        assert s == MixedQuotientStructure(circle_periods=(coset_period_oracle(rho, k),))


def test_mixed_quotient_untouched_factors():
    A = fg_abelian(1, (2,))  # Z x Z_2
    s = mixed_quotient_structure(1, A, [((Fraction(1),), A.element((1, 0)))])
    assert s == MixedQuotientStructure(real_rank=1, torsion=(2,))


def test_mixed_quotient_relation_permutation_invariance():
    rng = random.Random(21)
    A = fg_abelian(1, (4,))
    for _ in range(20):
        rels = [
            (
                (Fraction(rng.randint(0, 3), rng.randint(1, 3)), Fraction(rng.randint(0, 2))),
                A.element((rng.randint(-2, 2), rng.randint(0, 3))),
            )
            for _ in range(3)
        ]
        base = mixed_quotient_structure(2, A, rels)
        shuffled = rels[:]
        rng.shuffle(shuffled)
        assert mixed_quotient_structure(2, A, shuffled) == base


def test_mixed_quotient_unimodular_invariance():
    rng = random.Random(22)
    A = cyclic(3)
    U = ((1, 1), (0, 1))  # unimodular change of R^2 coordinates
    for _ in range(20):
        rels = [
            (
                (Fraction(rng.randint(-2, 2)), Fraction(rng.randint(-2, 2), 2)),
                A.element((rng.randint(0, 2),)),
            )
            for _ in range(2)
        ]
        moved = [
            (
                tuple(sum(Fraction(U[i][j]) * v[j] for j in range(2)) for i in range(2)),
                a,
            )
            for v, a in rels
        ]
        assert mixed_quotient_structure(2, A, moved) == mixed_quotient_structure(2, A, rels)


def test_mixed_quotient_rejects_free_backend():
    with pytest.raises(UnsupportedBackend):
        mixed_quotient_structure(1, free_group(1), [])


def test_fg_quotient_coords():
    # Z^2 / <(2, 0), (0, 3)> = Z_2 x Z_3 = Z_6
    q = FgQuotient.from_relations(2, [(2, 0), (0, 3)])
    assert q.descriptor() == cyclic(6)
    assert q.is_zero((2, 3))
    assert not q.is_zero((1, 0))


def test_solve_with_moduli():
    part, hom = solve_with_moduli(((2,),), (1,), (5,), ncols=1)
    assert part is not None and (2 * part[0] - 1) % 5 == 0
    assert hom and all((2 * h[0]) % 5 == 0 for h in hom)
