"""Exact linear algebra and subspace-universe tests.

Counting oracles are frozen from hand computation with the standard closed
forms: Gaussian binomials for subspace counts, and q^4 for the number of
lines skew to a fixed line in PG(3, q) (the 130 lines of PG(3, 3) split as
1 + 48 meeting + 81 skew).
"""

import numpy as np
import pytest

from addmds.gf import FieldError, make_field, make_tower
from addmds import linalg as la

F2 = make_field(2, 1)
F3 = make_field(3, 1)
F4 = make_field(2, 2)
F9 = make_field(3, 2)

RNG = np.random.default_rng(20240917)


def random_invertible(field, n, rng):
    while True:
        M = rng.integers(0, field.order, size=(n, n)).astype(np.uint8)
        if la.rank(field, M) == n:
            return M


# -- rref / rank / inverse / kernel -------------------------------------------

def test_rref_known_matrix():
    # over F_3: [[1,2,1],[2,1,1]] -> [[1,2,0],[0,0,1]] (hand reduction:
    # R2 -= 2 R1 gives (0,0,2) -> (0,0,1); then R1 -= R2)
    R, rk = la.rref(F3, [[1, 2, 1], [2, 1, 1]])
    assert rk == 2
    assert np.array_equal(R, np.array([[1, 2, 0], [0, 0, 1]], dtype=np.uint8))


def test_rref_batch_matches_single():
    for F in (F2, F3, F4, F9):
        mats = RNG.integers(0, F.order, size=(150, 3, 6)).astype(np.uint8)
        Rb, rks = la.rref_batch(F, mats)
        for i in range(len(mats)):
            R1, r1 = la.rref(F, mats[i])
            assert np.array_equal(Rb[i], R1)
            assert rks[i] == r1


def test_rref_idempotent_and_rank_invariant():
    for F in (F3, F4):
        for _ in range(25):
            M = RNG.integers(0, F.order, size=(4, 7)).astype(np.uint8)
            R, rk = la.rref(F, M)
            R2, rk2 = la.rref(F, R)
            assert np.array_equal(R, R2) and rk == rk2
            T = random_invertible(F, 4, RNG)
            assert la.rank(F, la.matmul(F, T, M)) == rk


def test_inverse_roundtrip_and_singular():
    for F in (F2, F3, F4, F9):
        M = random_invertible(F, 4, RNG)
        Minv = la.inverse(F, M)
        assert np.array_equal(la.matmul(F, M, Minv), np.eye(4, dtype=np.uint8))
        assert np.array_equal(la.matmul(F, Minv, M), np.eye(4, dtype=np.uint8))
    with pytest.raises(ValueError):
        la.inverse(F3, np.array([[1, 2], [2, 1]], dtype=np.uint8))  # det = 0


def test_kernel_annihilates_and_has_right_dim():
    for F in (F3, F4):
        for _ in range(20):
            M = RNG.integers(0, F.order, size=(3, 6)).astype(np.uint8)
            K = la.kernel(F, M)
            assert K.shape[0] == 6 - la.rank(F, M)
            if K.shape[0]:
                assert not la.matmul(F, M, K.T).any()
                assert la.rank(F, K) == K.shape[0]


# -- canonical subspaces ------------------------------------------------------

def test_canonical_form_is_basis_invariant():
    for F in (F3, F4):
        M = RNG.integers(0, F.order, size=(2, 5)).astype(np.uint8)
        while la.rank(F, M) != 2:
            M = RNG.integers(0, F.order, size=(2, 5)).astype(np.uint8)
        S = la.subspace_from_columns(F, M)
        for _ in range(10):
            T = random_invertible(F, 2, RNG)
            S2 = la.subspace_from_columns(F, la.matmul(F, T, M))
            assert S2 == S and S2.key == S.key


def test_zero_span_rejected():
    with pytest.raises(ValueError):
        la.subspace_from_columns(F3, np.zeros((2, 4), dtype=np.uint8))


def test_span_meet_dimension_law():
    # dim(A) + dim(B) = dim(A+B) + dim(A meet B), vector-space dims
    U = la.subspace_universe(F3, 4, 2)
    for _ in range(40):
        a = U.subspace(int(RNG.integers(U.count)))
        b = U.subspace(int(RNG.integers(U.count)))
        s = la.span(a, b)
        m = la.meet(a, b)
        mdim = 0 if m is None else m.vdim
        assert a.vdim + b.vdim == s.vdim + mdim
        assert la.contains(s, a) and la.contains(s, b)
        if m is not None:
            assert la.contains(a, m) and la.contains(b, m)


def test_contains_reflexive_and_antisymmetric():
    U = la.subspace_universe(F2, 4, 2)
    a = U.subspace(3)
    b = U.subspace(5)
    assert la.contains(a, a)
    if a != b:
        assert not (la.contains(a, b) and la.contains(b, a))


# -- counting oracles ---------------------------------------------------------

def test_gaussian_binomial_values():
    assert la.gaussian_binomial(3, 1, 2) == 7      # points of PG(2,2)
    assert la.gaussian_binomial(4, 2, 3) == 130    # lines of PG(3,3)
    assert la.gaussian_binomial(6, 2, 2) == 651    # lines of PG(5,2)
    assert la.gaussian_binomial(6, 2, 3) == 11011  # lines of PG(5,3)
    assert la.gaussian_binomial(6, 2, 4) == 93093  # lines of PG(5,4)
    assert la.gaussian_binomial(9, 3, 2) == 788035  # planes of PG(8,2)
    assert la.gaussian_binomial(9, 1, 2) == 511    # points of PG(8,2)
    assert la.gaussian_binomial(5, 2, 2) == 155
    assert la.gaussian_binomial(4, 2, 2) == 35


def test_universe_counts_match_gaussian_binomial():
    for F, n, r in [(F2, 6, 2), (F3, 4, 2), (F4, 3, 1), (F9, 3, 1), (F3, 6, 2)]:
        U = la.subspace_universe(F, n, r)
        assert U.count == la.gaussian_binomial(n, r, F.order)
        assert len(np.unique(U.keys)) == U.count
        assert np.array_equal(U.keys, np.sort(U.keys))


def test_skew_lines_count_in_pg33():
    # frozen oracle: q^4 = 81 lines skew to a fixed line in PG(3,3)
    U = la.subspace_universe(F3, 4, 2)
    L0 = U.subspace(U.id_of(np.array([[1, 0, 0, 0], [0, 1, 0, 0]], np.uint8)))
    skew = sum(
        1 for i in range(U.count)
        if (L := U.subspace(i)) != L0 and la.meet(L, L0) is None
    )
    assert skew == 81


def test_point_lists_and_masks():
    U = la.subspace_universe(F3, 4, 2)
    # each line of PG(3,3) carries q+1 = 4 distinct points
    assert U.pts.shape == (130, 4)
    for i in (0, 17, 129):
        S = U.subspace(i)
        ids = U.pts[i]
        assert len(set(ids.tolist())) == 4
        for pid in ids:
            P = U.points.subspace(int(pid))
            assert la.contains(S, P)
        popcnt = sum(bin(int(w)).count("1") for w in U.masks[i])
        assert popcnt == 4
        assert np.array_equal(U.point_mask_of_mat(S.mat), U.masks[i])


def test_ids_clear_of_filters_disjoint_lines():
    U = la.subspace_universe(F3, 4, 2)
    L0 = U.subspace(0)
    clear = U.ids_clear_of([U.masks[0]])
    assert len(clear) == 81  # the skew lines again, via bitmasks
    for i in clear[:10]:
        assert la.meet(U.subspace(int(i)), L0) is None


# -- induced permutations -----------------------------------------------------

def test_induced_point_perm_is_permutation_and_collinear():
    U = la.subspace_universe(F3, 4, 2)
    M = random_invertible(F3, 4, RNG)
    pp = U.induced_point_perm(M)
    assert sorted(pp.tolist()) == list(range(U.points.count))
    sp = U.induced_subspace_perm(M)
    assert sorted(sp.tolist()) == list(range(U.count))
    for i in (0, 40, 99):
        assert sorted(U.pts[sp[i]].tolist()) == sorted(pp[U.pts[i]].tolist())


def test_induced_perm_composition_law():
    U = la.subspace_universe(F2, 5, 2)
    A = random_invertible(F2, 5, RNG)
    B = random_invertible(F2, 5, RNG)
    pa, pb = U.induced_subspace_perm(A), U.induced_subspace_perm(B)
    pab = U.induced_subspace_perm(la.matmul(F2, A, B))
    # action x -> Mx composes contravariantly in the matrix product
    assert np.array_equal(pab, pa[pb])


def test_induced_frobenius_perm_has_order_two_over_f4():
    U = la.subspace_universe(F4, 3, 1)
    pf = U.induced_point_perm(np.eye(3, dtype=np.uint8), frob=1)
    assert not np.array_equal(pf, np.arange(U.count))
    assert np.array_equal(pf[pf], np.arange(U.count))


def test_fast_subspace_perm_matches_echelon_path():
    U = la.subspace_universe(F3, 4, 2)
    assert U._ptset_keys is not None
    M = random_invertible(F3, 4, RNG)
    fast = U.induced_subspace_perm(M)
    moved = la.apply_collineation_to_mats(F3, U.mats, M, 0)
    assert np.array_equal(fast, U.ids_of_mats(moved))


# -- field reduction ----------------------------------------------------------

def test_field_reduce_gives_spread_of_pg33():
    # the 10 points of PG(1,9) become 10 pairwise disjoint lines of PG(3,3)
    tw = make_tower(3, 1, 2)
    pts = la.subspace_universe(F9, 2, 1)
    lines = [la.field_reduce(tw, pts.mats[i, 0, :]) for i in range(pts.count)]
    assert len({l.key for l in lines}) == 10
    covered = set()
    for l in lines:
        assert l.vdim == 2 and l.ambient_vdim == 4
        for other in lines:
            if other is not l:
                assert la.meet(l, other) is None
        U = la.subspace_universe(F3, 4, 2)
        covered.update(U.pts[U.id_of(l)].tolist())
    assert len(covered) == 40  # spread partitions the point set


def test_field_reduce_scaling_invariance():
    # projectively equal points reduce to the same subspace
    tw = make_tower(2, 1, 2)
    w = np.array([1, 3, 2], dtype=np.uint8)
    for s in range(1, 4):
        sw = np.array([tw.top.mul(s, int(x)) for x in w], dtype=np.uint8)
        assert la.field_reduce(tw, sw) == la.field_reduce(tw, w)


def test_field_reduce_inverse_roundtrip_and_rejection():
    tw = make_tower(3, 1, 2)
    w = (1, 5)
    sub = la.field_reduce(tw, np.array(w, np.uint8))
    assert la.field_reduce_inverse(tw, sub) == w
    U = la.subspace_universe(F3, 4, 2)
    spread_keys = {
        la.field_reduce(tw, la.subspace_universe(F9, 2, 1).mats[i, 0, :]).key
        for i in range(10)
    }
    rejected = 0
    for i in range(U.count):
        if U.subspace(i).key not in spread_keys:
            with pytest.raises(FieldError):
                la.field_reduce_inverse(tw, U.subspace(i))
            rejected += 1
    assert rejected == 120


def test_expand_compress_roundtrip():
    tw = make_tower(2, 2, 2)  # F_4 inside F_16
    for _ in range(20):
        u = RNG.integers(0, 16, size=3).astype(np.uint8)
        v = la.expand_vector(tw, u)
        assert v.shape == (6,)
        assert np.array_equal(la.compress_vector(tw, v), u)
