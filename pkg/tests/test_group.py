"""Collineation-group machinery: certified chains, canonical images, stabilizers.

Orders come from the closed formulas; class counts and stabilizer orders are
cross-checked with orbit-stabilizer products so the randomized chain builds
cannot silently produce a proper subgroup.
"""

import numpy as np
import pytest

from addmds.gf import make_field, make_tower
from addmds import linalg as la
from addmds.group import (GroupContext, collineation, identity_element,
                          pgl_order, pgammal_order)


@pytest.fixture(scope="module")
def line9():
    """Points of the projective line over F_9, full semilinear group."""
    f9 = make_field(3, 2)
    uni = la.subspace_universe(f9, 2, 1)
    return GroupContext(uni)


@pytest.fixture(scope="module")
def lines33():
    """Lines of PG(3,3) under PGL(4,3) (= the full group, p prime)."""
    f3 = make_field(3, 1)
    uni = la.subspace_universe(f3, 4, 2)
    return GroupContext(uni)


def test_order_formulas():
    assert pgl_order(2, 9) == 720
    assert pgammal_order(2, 9, 2) == 1440
    assert pgl_order(4, 3) == 12130560
    assert pgammal_order(4, 3, 1) == 12130560
    assert pgammal_order(3, 4, 2) == 120960


def test_projective_line_group_certified(line9):
    assert line9.group_order == 1440
    assert line9.top.chain.order() == 1440


def test_point_stabilizer_order(line9):
    stab = line9.stabilizer_of(line9.top, 0)
    assert stab.order == 144  # 1440 / 10 points
    # the stabilizer chain rejects an element that moves the point
    rng = np.random.default_rng(7)
    for _ in range(20):
        g = line9.top.chain.random_element(rng)
        if g.pperm[0] != 0:
            assert not stab.chain.contains(g)
            break
    else:
        pytest.fail("no element moving point 0 found")


def test_triples_on_projective_line_single_class(line9):
    # 3-transitivity: every triple of points is equivalent to {0, 1, 2}
    assert line9.minimal_image((0, 1, 2)) == (0, 1, 2)
    assert line9.minimal_image((3, 7, 9)) == (0, 1, 2)
    st = line9.setwise_stabilizer((0, 1, 2))
    assert st.order == 12  # 1440 / C(10,3)
    for g in st.gens:
        assert set(line9.apply_elt(g, (0, 1, 2))) == {0, 1, 2}


def test_line_pairs_two_classes_with_orbit_stabilizer_check(lines33):
    assert lines33.group_order == 12130560
    uni = lines33.uni
    assert uni.count == 130
    reps = {}
    for a in range(uni.count):
        for b in range(a + 1, uni.count):
            mi = lines33.minimal_image((a, b))
            reps[mi] = reps.get(mi, 0) + 1
    # meeting pairs and skew pairs
    assert sorted(reps.values()) == [3120, 5265]
    for rep, cnt in reps.items():
        st = lines33.setwise_stabilizer(rep)
        assert cnt * st.order == lines33.group_order
        for g in st.gens:
            assert set(lines33.apply_elt(g, rep)) == set(rep)
    assert sorted(lines33.setwise_stabilizer(r).order for r in reps) == [2304, 3888]


def test_are_equivalent_matches_minimal_images(lines33):
    a, b = (0, 1), (2, 117)
    if lines33.minimal_image(a) == lines33.minimal_image(b):
        assert lines33.are_equivalent(a, b)
    else:
        assert not lines33.are_equivalent(a, b)


def test_hyperoval_stabilizer_in_plane_over_f4():
    f4 = make_field(2, 2)
    uni = la.subspace_universe(f4, 3, 1)
    ctx = GroupContext(uni)
    assert ctx.group_order == 120960
    w = f4.generator  # code 2
    w2 = f4.mul(w, w)
    pts = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, w, w2), (1, w2, w)]
    ids = tuple(int(uni.ids_of_mats(np.array([[p]], dtype=np.uint8))[0])
                for p in pts)
    assert len(set(ids)) == 6
    st = ctx.setwise_stabilizer(ids)
    assert st.order == 720
    for g in st.gens:
        assert set(ctx.apply_elt(g, ids)) == set(ids)


def test_large_group_order_certified_quickly():
    f2 = make_field(2, 1)
    uni = la.subspace_universe(f2, 9, 1)
    ctx = GroupContext(uni)
    assert ctx.group_order == 699612310033197642547200  # |PGL(9,2)|
    rng = np.random.default_rng(3)
    g = ctx.top.chain.random_element(rng)
    assert ctx.top.chain.contains(g)
    assert ctx.top.chain.contains(g.inverse(ctx.field))


def test_chain_membership_and_sifting(line9):
    chain = line9.top.chain
    ident = identity_element(line9.uni)
    assert chain.contains(ident)
    rng = np.random.default_rng(11)
    for _ in range(5):
        g = chain.random_element(rng)
        r, lvl = chain.sift(g)
        assert r.is_identity() and lvl == len(chain.base)


def test_frobenius_collineation_is_in_semilinear_group(line9):
    g = collineation(line9.uni, np.eye(2, dtype=np.uint8), frob=1)
    assert line9.top.chain.contains(g)
    assert not g.is_identity()


def test_determinism_across_contexts():
    f3 = make_field(3, 1)
    uni = la.subspace_universe(f3, 4, 2)
    c1 = GroupContext(uni)
    c2 = GroupContext(uni)
    pair = (5, 40)
    assert c1.minimal_image(pair) == c2.minimal_image(pair)
    s1 = c1.setwise_stabilizer(pair)
    s2 = c2.setwise_stabilizer(pair)
    assert s1.order == s2.order
    assert len(s1.gens) == len(s2.gens)
    for g, h in zip(s1.gens, s2.gens):
        assert np.array_equal(g.pperm, h.pperm)
        assert np.array_equal(g.mat, h.mat) and g.frob == h.frob
