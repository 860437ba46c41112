"""Arcs of (h-1)-subspaces of PG(kh-1, q) and spread membership tests.

An arc is a set of h-dimensional F_q-subspaces (projective dimension h-1)
such that every k of them span the whole space; sets smaller than k must be
in general position (every t of them span a th-dimensional subspace).  Arcs
are carried as sorted tuples of ids into a SubspaceUniverse whose r equals h.

A frame is an ordered arc whose first k elements are mapped to the coordinate
subspaces and whose (k+1)-st becomes the row space of [I | I | ... | I]; after
that normalization every further element reads as blocks [A_1 | ... | A_k]
with all blocks invertible, and the element encodes the projective point
(1 : m_2 : ... : m_k) over whatever field the blocks generate.  The arc lies
in a Desarguesian spread exactly when the unital algebra generated by all its
blocks is a field F_{q^m} with m dividing h.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import linalg as la


def _arc_k(universe: la.SubspaceUniverse) -> int:
    if universe.n_vec % universe.r:
        raise ValueError("ambient dimension is not a multiple of the element dimension")
    k = universe.n_vec // universe.r
    if k < 2:
        raise ValueError("arcs need at least two blocks of coordinates")
    return k


def is_arc(universe: la.SubspaceUniverse, ids) -> bool:
    """Every min(|X|, k)-subset must span a space of full expected rank."""
    ids = [int(i) for i in ids]
    k = _arc_k(universe)
    if len(set(ids)) != len(ids):
        return False
    if not ids:
        return True
    t = min(len(ids), k)
    h = universe.r
    subsets = list(combinations(ids, t))
    stacks = universe.mats[np.array(subsets, dtype=np.int64)]
    stacks = stacks.reshape(len(subsets), t * h, universe.n_vec)
    _, ranks = la.rref_batch(universe.field, stacks)
    return bool((ranks == t * h).all())


def arc_extensions(universe: la.SubspaceUniverse, ids) -> np.ndarray:
    """Ids y such that ids + [y] is again an arc, via point-mask filtering."""
    ids = [int(i) for i in ids]
    k = _arc_k(universe)
    t = min(len(ids) + 1, k)
    masks = []
    for sub in combinations(ids, t - 1):
        if sub:
            stack = universe.mats[list(sub)].reshape(-1, universe.n_vec)
            masks.append(universe.point_mask_of_mat(stack))
    if not masks:
        return np.arange(universe.count, dtype=np.int32)
    return universe.ids_clear_of(masks)


def max_hyperplane_load(universe: la.SubspaceUniverse, ids) -> int:
    """Largest number of arc elements contained in a single hyperplane."""
    ids = [int(i) for i in ids]
    if not ids:
        return 0
    field = universe.field
    normals = universe.points.mats[:, 0, :]  # one normal per hyperplane
    flat = universe.mats[ids].reshape(-1, universe.n_vec)
    prods = la.matmul(field, flat, normals.T)  # (n*h, #hyperplanes)
    inside = (prods.reshape(len(ids), universe.r, -1) == 0).all(axis=1)
    return int(inside.sum(axis=0).max())


def project_arc(universe: la.SubspaceUniverse, ids, pivot_id: int):
    """Quotient the arc by one of its elements.

    Coordinates of the quotient are the non-pivot columns of the pivot's
    echelon basis.  Returns (quotient universe, ids of the surviving elements
    in their original order).
    """
    ids = [int(i) for i in ids]
    pivot_id = int(pivot_id)
    if pivot_id not in ids:
        raise ValueError("pivot must be an element of the arc")
    field = universe.field
    h = universe.r
    E = universe.mats[pivot_id]
    pivcols = [int(np.nonzero(E[i])[0][0]) for i in range(h)]
    keep = [j for j in range(universe.n_vec) if j not in pivcols]
    rest = [i for i in ids if i != pivot_id]
    S = universe.mats[rest]
    coeff = S[:, :, pivcols]
    # reduce each basis row modulo E: subtract (row at pivot cols) . E
    prod = np.zeros_like(S, dtype=np.int32)
    ADD, MUL = field.ADD, field.MUL
    for j in range(h):
        prod = ADD[prod, MUL[coeff[:, :, j, None], E[j][None, None, :]]]
    red = field.SUB[S, prod].astype(np.uint8)
    quot = red[:, :, keep]
    qual = la.subspace_universe(field, universe.n_vec - h, h)
    return qual, tuple(int(i) for i in qual.ids_of_mats(quot))


def normalize_frame(universe: la.SubspaceUniverse, ids_seq):
    """Transform sending the first k elements to the coordinate subspaces and
    the (k+1)-st to [I | I | ... | I]; returns (T, transformed bases).

    Row bases map as B -> B . T; the transformed bases are returned in the
    input order with each first invertible block scaled back to the identity.
    """
    ids_seq = [int(i) for i in ids_seq]
    field = universe.field
    h = universe.r
    k = _arc_k(universe)
    if len(ids_seq) < k + 1:
        raise ValueError("a frame needs k+1 elements")
    mats = [universe.mats[i] for i in ids_seq]
    P = np.vstack(mats[:k])
    try:
        Pinv = la.inverse(field, P)
    except ValueError:
        raise ValueError("first k elements do not span the space") from None
    C = la.matmul(field, mats[k], Pinv)
    D = np.zeros((universe.n_vec, universe.n_vec), dtype=np.uint8)
    for j in range(k):
        blk = C[:, j * h:(j + 1) * h]
        try:
            D[j * h:(j + 1) * h, j * h:(j + 1) * h] = la.inverse(field, blk)
        except ValueError:
            raise ValueError("element k+1 is not in general position") from None
    T = la.matmul(field, Pinv, D)
    out = []
    for B in mats:
        M = la.matmul(field, B, T)
        blk = M[:, :h]
        if la.rank(field, blk) == h:
            M = la.matmul(field, la.inverse(field, blk), M)
        out.append(M)
    return T, out


# -- Desarguesian spread membership --------------------------------------------

@dataclass(frozen=True)
class DesarguesianParams:
    """Witness that an arc lies in a Desarguesian spread.

    subfield_degree m (dividing h) and the monic minimal polynomial of a
    generator of the block field over F_q, coefficients low to high.  For
    m == 2 the pair (a1, a2) restates the polynomial as t^2 = a1 + a2 t.
    """
    subfield_degree: int
    poly: tuple
    pair: tuple | None


def _algebra_closure(field, blocks, h: int):
    """F_q-basis of the unital algebra generated by the given h x h blocks."""
    basis: list[np.ndarray] = []

    def reduce_add(M) -> bool:
        # Gaussian reduction of flattened matrices against current basis
        v = M.astype(np.uint8).reshape(-1).copy()
        for b in basis:
            lead = int(np.nonzero(b)[0][0])
            if v[lead]:
                v = field.SUB[v, field.MUL[v[lead], b]]
        if not v.any():
            return False
        lead = int(np.nonzero(v)[0][0])
        v = field.MUL[field.INV[v[lead]], v].astype(np.uint8)
        for i, b in enumerate(basis):
            if b[lead]:
                basis[i] = field.SUB[b, field.MUL[b[lead], v]].astype(np.uint8)
        basis.append(v)
        basis.sort(key=lambda b: int(np.nonzero(b)[0][0]))
        return True

    reduce_add(np.eye(h, dtype=np.uint8))
    queue = [np.asarray(b, dtype=np.uint8) for b in blocks]
    for M in queue:
        reduce_add(M)
    grown = True
    while grown:
        grown = False
        mats = [b.reshape(h, h) for b in basis]
        for A in mats:
            for B in mats:
                if reduce_add(la.matmul(field, A, B)):
                    grown = True
    return [b.reshape(h, h) for b in basis]


def _field_witness(field, basis, h: int):
    """Check a commutative closed algebra is a field; return its parameters."""
    m = len(basis)
    for A, B in combinations(basis, 2):
        if not np.array_equal(la.matmul(field, A, B), la.matmul(field, B, A)):
            return None
    # enumerate all elements; all nonzero ones must be invertible
    q = field.order
    coeffs = np.zeros((q ** m, m), dtype=np.uint8)
    v = np.arange(q ** m)
    for i in range(m):
        coeffs[:, i] = v % q
        v //= q
    elems = np.zeros((q ** m, h, h), dtype=np.int32)
    for i in range(m):
        elems = field.ADD[elems, field.MUL[coeffs[:, i, None, None], basis[i][None]]]
    elems = elems.astype(np.uint8)
    _, ranks = la.rref_batch(field, elems[1:])
    if (ranks != h).any():
        return None
    # minimal polynomial of a generator: first element whose powers span
    for idx in range(1, q ** m):
        E = elems[idx]
        powers = [np.eye(h, dtype=np.uint8)]
        for _ in range(m):
            powers.append(la.matmul(field, powers[-1], E))
        V = np.stack([p.reshape(-1) for p in powers])
        R, rk = la.rref(field, V[:m])
        if rk < m:
            continue
        # express E^m over the lower powers: solve x . V[:m] = V[m]
        aug = np.hstack([V[:m].T, V[m][:, None]])
        Raug, _ = la.rref(field, aug)
        sol = np.zeros(m, dtype=np.uint8)
        for i in range(m):
            row = Raug[i]
            nz = np.nonzero(row[:m])[0]
            if len(nz):
                sol[int(nz[0])] = row[m]
        poly = tuple(int(field.neg(int(c))) for c in sol) + (1,)
        pair = None
        if m == 2:
            pair = (int(sol[0]), int(sol[1]))  # t^2 = a1 + a2 t
        return DesarguesianParams(m, poly, pair)
    return None


def is_in_desarguesian_spread(universe: la.SubspaceUniverse, ids):
    """DesarguesianParams if the arc lies in a Desarguesian spread, else None.

    Sets of at most k+1 elements are degenerate: any of them lie in some
    Desarguesian spread, reported with subfield degree 1.
    """
    ids = sorted(int(i) for i in ids)
    field = universe.field
    h = universe.r
    k = _arc_k(universe)
    if not is_arc(universe, ids):
        raise ValueError("not an arc")
    if len(ids) <= k + 1:
        return DesarguesianParams(1, (field.neg(1), 1), None)
    _, mats = normalize_frame(universe, ids)
    blocks = []
    for M in mats[k + 1:]:
        for j in range(1, k):
            blocks.append(np.ascontiguousarray(M[:, j * h:(j + 1) * h]))
    basis = _algebra_closure(field, blocks, h)
    if len(basis) > h or h % len(basis):
        return None
    return _field_witness(field, basis, h)


def desproj_check(universe: la.SubspaceUniverse, ids):
    """Check Desarguesian membership of every projection down to k = 2.

    Projects the arc from each (k-2)-subset of its elements and tests the
    resulting line-sized arc; returns (all_pass, failing subsets).
    """
    ids = sorted(int(i) for i in ids)
    k = _arc_k(universe)
    failures = []
    for drop in combinations(ids, k - 2):
        uni, cur = universe, list(ids)
        for pid in drop:
            uni, cur2 = project_arc(uni, cur, pid)
            cur = list(cur2)
        if is_in_desarguesian_spread(uni, cur) is None:
            failures.append(drop)
    return not failures, failures


# -- spread sets for k = 2 ------------------------------------------------------

@dataclass(frozen=True)
class SpreadSet:
    """Blocks M with the arc elements as row spaces of [I | M], plus the two
    frame elements [I | 0] and [0 | I] (the latter flagged, not a block)."""
    matrices: tuple
    has_infinity: bool


def spread_set_of(universe: la.SubspaceUniverse, ids) -> SpreadSet:
    """Spread-set matrices of a k = 2 arc, frame-normalized on its first three
    elements: they become 0, infinity, and the identity in that order."""
    ids = sorted(int(i) for i in ids)
    field = universe.field
    h = universe.r
    if _arc_k(universe) != 2:
        raise ValueError("spread sets are defined for arcs of half-dimension")
    if len(ids) < 3:
        raise ValueError("need at least three elements to fix a frame")
    order = [ids[0], ids[1], ids[2]] + ids[3:]
    _, mats = normalize_frame(universe, order)
    blocks = [np.zeros((h, h), dtype=np.uint8)]
    for M in mats[2:]:
        A1, A2 = M[:, :h], M[:, h:]
        if la.rank(field, A1) < h:
            raise ValueError("unexpected singular block in a normalized arc")
        blocks.append(la.matmul(field, la.inverse(field, A1), A2))
    return SpreadSet(tuple(b for b in blocks), True)


# -- a thin wrapper -------------------------------------------------------------

@dataclass(frozen=True)
class Arc:
    """A sorted arc of subspace ids in its universe."""
    universe: la.SubspaceUniverse
    ids: tuple

    def __post_init__(self):
        object.__setattr__(self, "ids", tuple(sorted(int(i) for i in self.ids)))
        if not is_arc(self.universe, self.ids):
            raise ValueError("ids do not form an arc")

    @property
    def k(self) -> int:
        return _arc_k(self.universe)

    @property
    def h(self) -> int:
        return self.universe.r

    def __len__(self):
        return len(self.ids)

    def extensions(self) -> np.ndarray:
        return arc_extensions(self.universe, self.ids)

    def max_hyperplane_load(self) -> int:
        return max_hyperplane_load(self.universe, self.ids)
