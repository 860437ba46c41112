"""Arcs of (h-1)-subspaces: recognition, extension, projection, spread tests.

The reference objects are the standard line spread of PG(3,3) (the image of
the projective line over F_9 under field reduction) and a conic-with-nucleus
style arc in PG(5,3) reduced from PG(2,9).
"""

import numpy as np
import pytest

from addmds.gf import make_tower
from addmds import arcs as ar
from addmds import linalg as la


@pytest.fixture(scope="module")
def tower9():
    return make_tower(3, 1, 2)  # F_3 < F_3 < F_9


@pytest.fixture(scope="module")
def spread(tower9):
    """All 10 lines of PG(3,3) coming from the points of PG(1,9)."""
    uni = la.subspace_universe(tower9.mid, 4, 2)
    pts = la.subspace_universe(tower9.top, 2, 1)
    ids = []
    for i in range(pts.count):
        sub = la.field_reduce(tower9, pts.mats[i, 0])
        ids.append(uni.id_of(sub))
    return uni, tuple(sorted(ids))


def test_spread_is_a_ten_line_arc(spread):
    uni, ids = spread
    assert len(ids) == 10
    assert ar.is_arc(uni, ids)
    # lines partition the 40 points
    pts = uni.pts[list(ids)]
    assert len(set(pts.reshape(-1).tolist())) == 40


def test_spread_has_no_extensions_and_partial_has_missing_ones(spread):
    uni, ids = spread
    assert len(ar.arc_extensions(uni, ids)) == 0
    part = ids[:5]
    ext = ar.arc_extensions(uni, part)
    assert len(ext) == 9
    assert set(ids[5:]).issubset(set(int(x) for x in ext))


def test_spread_hyperplane_load_is_one(spread):
    uni, ids = spread
    assert ar.max_hyperplane_load(uni, ids) == 1
    # so the associated additive code has distance n - 1 = 9


def test_spread_lies_in_standard_desarguesian_spread(spread):
    uni, ids = spread
    params = ar.is_in_desarguesian_spread(uni, ids)
    assert params is not None
    assert params.subfield_degree == 2
    assert params.poly == (2, 2, 1)  # X^2 + 2X + 2, the pinned F_9 polynomial
    assert params.pair == (1, 1)  # t^2 = 1 + t


def test_frame_normalization_fixes_first_three(spread):
    uni, ids = spread
    T, mats = ar.normalize_frame(uni, ids)
    I = np.eye(2, dtype=np.uint8)
    Z = np.zeros((2, 2), dtype=np.uint8)
    assert np.array_equal(mats[0], np.hstack([I, Z]))
    assert np.array_equal(mats[1], np.hstack([Z, I]))
    assert np.array_equal(mats[2], np.hstack([I, I]))
    assert la.rank(uni.field, T) == 4


def test_spread_set_blocks_have_invertible_differences(spread):
    uni, ids = spread
    ss = ar.spread_set_of(uni, ids)
    assert ss.has_infinity
    blocks = [np.asarray(b) for b in ss.matrices]
    assert len(blocks) == 9
    assert np.array_equal(blocks[0], np.zeros((2, 2), dtype=np.uint8))
    assert any(np.array_equal(b, np.eye(2, dtype=np.uint8)) for b in blocks)
    f = uni.field
    for i in range(9):
        for j in range(i + 1, 9):
            assert la.rank(f, f.SUB[blocks[i], blocks[j]].astype(np.uint8)) == 2


@pytest.fixture(scope="module")
def conic_arc(tower9):
    """Six lines of PG(5,3): a conic plus nucleus of PG(2,9), reduced."""
    uni = la.subspace_universe(tower9.mid, 6, 2)
    top = tower9.top
    pts = [(1, t, top.mul(t, t)) for t in (0, 1, 2, 3, 5)] + [(0, 0, 1)]
    ids = tuple(sorted(uni.id_of(la.field_reduce(tower9, np.array(p, np.uint8)))
                       for p in pts))
    return uni, ids


def test_conic_reduction_is_an_arc_with_eight_extensions(conic_arc):
    uni, ids = conic_arc
    assert ar.is_arc(uni, ids)
    assert len(ar.arc_extensions(uni, ids)) == 8
    assert ar.max_hyperplane_load(uni, ids) == 2  # distance 6 - 2 = 4


def test_conic_reduction_projects_to_arcs_and_passes_spread_checks(conic_arc):
    uni, ids = conic_arc
    quot, qids = ar.project_arc(uni, ids, ids[0])
    assert quot.n_vec == 4
    assert len(qids) == 5 and len(set(qids)) == 5
    assert ar.is_arc(quot, qids)
    ok, failures = ar.desproj_check(uni, ids)
    assert ok, failures


def test_projection_keeps_column_order(conic_arc):
    uni, ids = conic_arc
    order = (ids[2], ids[0], ids[4], ids[1], ids[5], ids[3])
    _, qids = ar.project_arc(uni, order, ids[4])
    _, base = ar.project_arc(uni, ids, ids[4])
    lookup = {i: q for i, q in zip((x for x in ids if x != ids[4]), base)}
    assert qids == tuple(lookup[i] for i in order if i != ids[4])


def test_noncommuting_blocks_are_not_in_a_desarguesian_spread(tower9):
    uni = la.subspace_universe(tower9.mid, 4, 2)
    I = np.eye(2, dtype=np.uint8)
    Z = np.zeros((2, 2), dtype=np.uint8)
    A = np.array([[1, 1], [1, 2]], dtype=np.uint8)
    B = np.array([[2, 1], [1, 1]], dtype=np.uint8)
    mats = [np.hstack([I, Z]), np.hstack([Z, I]), np.hstack([I, I]),
            np.hstack([I, A]), np.hstack([I, B])]
    ids = tuple(int(i) for i in uni.ids_of_mats(np.array(mats)))
    assert ar.is_arc(uni, ids)
    assert ar.is_in_desarguesian_spread(uni, ids) is None
    # dropping B leaves blocks generating a field again
    sub = tuple(sorted(ids[:4]))
    params = ar.is_in_desarguesian_spread(uni, sub)
    assert params is not None and params.subfield_degree == 2


def test_small_sets_are_degenerately_in_a_spread(spread):
    uni, ids = spread
    params = ar.is_in_desarguesian_spread(uni, ids[:3])
    assert params is not None
    assert params.subfield_degree == 1


def test_duplicates_and_collinear_reductions_are_rejected(tower9, spread):
    uni, ids = spread
    assert not ar.is_arc(uni, (ids[0], ids[0], ids[1]))
    # reductions of collinear PG(2,9) points give lines failing the span rule
    uni6 = la.subspace_universe(tower9.mid, 6, 2)
    bad_pts = [(1, 0, 0), (0, 1, 0), (1, 1, 0), (1, 2, 0)]
    bad = [uni6.id_of(la.field_reduce(tower9, np.array(p, np.uint8)))
           for p in bad_pts]
    assert not ar.is_arc(uni6, bad)


def test_arc_wrapper_sorts_and_validates(spread):
    uni, ids = spread
    arc = ar.Arc(uni, ids[::-1])
    assert arc.ids == ids
    assert arc.k == 2 and arc.h == 2 and len(arc) == 10
    assert arc.max_hyperplane_load() == 1
    with pytest.raises(ValueError):
        ar.Arc(uni, (0, 1, 2))  # arbitrary line triples are not arcs
