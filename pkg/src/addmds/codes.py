"""Additive codes over F_{q^h} that are linear over F_q.

A code is carried by a generator matrix G with kh rows and n columns over the
top field F_{q^h}: the code is the F_q-row-span, so it has q^{kh} = (q^h)^k
codewords and behaves like a dimension-k code for Singleton accounting.  The
F_q-expansion of G replaces each entry by its h F_q-coordinates (coordinate j
occupies expansion columns jh..jh+h-1); its reduced echelon form is the
canonical generator used for equality and serialization.

Column j expands to a kh x h block over F_q; the code is MDS exactly when
every k of those blocks stack to an invertible kh x kh matrix, i.e. when the
blocks' column spaces form an arc of (h-1)-subspaces of PG(kh-1, q).  That
correspondence (to_arc / from_arc) is the bridge to the geometry modules.

For h = 2 the trace-alternating form tr_{q -> p}((u . v^q - u^q . v) / gamma)
with gamma^q = -gamma governs quantum code construction: a code that is
totally isotropic for it yields an [[n, n - 2k, k + 1]]_q stabilizer code when
MDS.
"""

from __future__ import annotations

import numpy as np

from . import arcs as _arcs
from . import linalg as la
from .gf import FieldError, FieldTower

_WORD_BUDGET = 10 ** 7


def bush_bound(q: int, h: int, k: int) -> int:
    """Largest length an additive MDS code with k >= 3 blocks can have."""
    return q ** h + k - 1


class AdditiveCode:
    """An F_q-linear code inside F_{q^h}^n given by kh generator rows."""

    def __init__(self, tower: FieldTower, G):
        self.tower = tower
        G = np.asarray(G, dtype=np.uint8)
        if G.ndim != 2 or G.shape[0] == 0 or G.shape[1] == 0:
            raise ValueError("generator must be a nonempty matrix")
        if int(G.max(initial=0)) >= tower.top.order:
            raise ValueError("entry is not an element of the top field")
        if G.shape[0] % tower.h:
            raise ValueError("row count must be a multiple of h")
        self.G = G
        self.n = G.shape[1]
        self.k = G.shape[0] // tower.h
        self._exp = None
        if la.rank(tower.mid, self.expansion()) != G.shape[0]:
            raise ValueError("generator rows are not independent over F_q")
        self._d = None

    # -- basic views --

    def expansion(self) -> np.ndarray:
        """kh x nh matrix of F_q-coordinates of the generator entries."""
        if self._exp is None:
            rows = [la.expand_vector(self.tower, row) for row in self.G]
            self._exp = np.array(rows, dtype=np.uint8)
        return self._exp

    def canonical_generator(self) -> np.ndarray:
        """Canonical kh x n top-field generator (echelonized expansion)."""
        R, rk = la.rref(self.tower.mid, self.expansion())
        return np.array([la.compress_vector(self.tower, row) for row in R[:rk]],
                        dtype=np.uint8)

    def __eq__(self, other):
        return (isinstance(other, AdditiveCode)
                and self.tower is other.tower
                and self.n == other.n and self.k == other.k
                and np.array_equal(self.canonical_generator(),
                                   other.canonical_generator()))

    def __hash__(self):
        return hash((id(self.tower), self.n, self.k,
                     self.canonical_generator().tobytes()))

    def codewords(self) -> np.ndarray:
        """All q^{kh} codewords as rows over the top field (desk scale only)."""
        tower = self.tower
        q = tower.mid.order
        kh = self.G.shape[0]
        count = q ** kh
        if count * self.n > _WORD_BUDGET:
            raise ValueError("codeword enumeration exceeds the budget")
        coeffs = np.zeros((count, kh), dtype=np.uint8)
        v = np.arange(count)
        for r in range(kh):
            coeffs[:, r] = v % q
            v //= q
        top = tower.top
        acc = np.zeros((count, self.n), dtype=np.int32)
        for r in range(kh):
            c = tower.embed_q[coeffs[:, r]]
            acc = top.ADD[acc, top.MUL[c[:, None], self.G[r][None, :]]]
        return acc.astype(np.uint8)

    # -- metrics --

    def min_weight(self) -> int:
        """Least Hamming weight of a nonzero codeword (= min distance)."""
        if self._d is None:
            words = self.codewords()
            w = (words != 0).sum(axis=1)
            self._d = int(w[w > 0].min())
        return self._d

    min_distance = min_weight

    def hyperplane_distance(self) -> int:
        """n minus the largest number of column blocks inside one hyperplane.

        Words correspond projectively to hyperplanes of the expansion space:
        the word of a functional v vanishes at column j exactly when block j
        lies in v's kernel.  Equals min_weight without enumerating words.
        """
        tower = self.tower
        mid, h = tower.mid, tower.h
        E = self.expansion()
        q = mid.order
        count = (q ** E.shape[0] - 1) // (q - 1)
        if count * self.n * h > _WORD_BUDGET:
            raise ValueError("hyperplane enumeration exceeds the budget")
        normals = la.subspace_universe(mid, E.shape[0], 1).mats[:, 0, :]
        prods = la.matmul(mid, normals, E)  # (#hyperplanes, n*h)
        inside = (prods.reshape(len(normals), self.n, h) == 0).all(axis=2)
        return self.n - int(inside.sum(axis=1).max())

    def is_mds(self) -> bool:
        """Distance meets Singleton: every k column blocks stack invertibly."""
        from itertools import combinations
        kh = self.G.shape[0]
        h = self.tower.h
        if self.n < self.k:
            return False
        exp = self.expansion()
        blocks = exp.reshape(kh, self.n, h).transpose(1, 0, 2)  # (n, kh, h)
        subs = list(combinations(range(self.n), self.k))
        stacks = blocks[np.array(subs)].transpose(0, 2, 1, 3).reshape(
            len(subs), kh, kh)
        _, ranks = la.rref_batch(self.tower.mid, stacks)
        return bool((ranks == kh).all())

    def spec_tuple(self) -> tuple:
        q = self.tower.mid.order
        return (self.n, q ** self.G.shape[0], self.min_distance())

    # -- geometry bridge --

    def to_arc(self):
        """(universe, ordered ids): column j's block column space as a subspace."""
        tower = self.tower
        kh = self.G.shape[0]
        uni = la.subspace_universe(tower.mid, kh, tower.h)
        exp = self.expansion()
        cols = []
        for j in range(self.n):
            block = exp[:, j * tower.h:(j + 1) * tower.h]  # kh x h
            cols.append(block.T)
        ids = uni.ids_of_mats(np.array(cols, dtype=np.uint8))
        return uni, tuple(int(i) for i in ids)

    # -- derived codes --

    def dual(self) -> "AdditiveCode":
        """Dual under the trace bilinear form tr_{q^h -> q}(u . v)."""
        tower = self.tower
        mid, top, h = tower.mid, tower.top, tower.h
        TR = np.array([tower.trace("top", "mid", x) for x in range(top.order)],
                      dtype=np.uint8)
        kh = self.G.shape[0]
        M = np.zeros((kh, self.n * h), dtype=np.uint8)
        for l, eps in enumerate(tower.basis):
            M[:, l::h] = TR[top.MUL[eps, self.G]]
        ker = la.kernel(mid, M)
        if not len(ker):
            raise ValueError("dual code is trivial")
        Gd = np.array([la.compress_vector(tower, row) for row in ker],
                      dtype=np.uint8)
        return AdditiveCode(tower, Gd)

    def truncate(self, cols) -> "AdditiveCode":
        """Keep only the given columns (in the given order)."""
        cols = [int(c) for c in cols]
        if len(set(cols)) != len(cols) or not cols:
            raise ValueError("column selection must be nonempty and distinct")
        return AdditiveCode(self.tower, self.G[:, cols])

    def project(self, col: int) -> "AdditiveCode":
        """Shorten at a column: geometrically, project the arc from it."""
        uni, ids = self.to_arc()
        if len(set(ids)) != len(ids):
            raise ValueError("projection needs distinct column subspaces")
        quot, qids = _arcs.project_arc(uni, ids, ids[int(col)])
        return from_arc(self.tower, quot, qids)

    def is_linear_over_top(self) -> bool:
        """Whether the F_q-span is in fact F_{q^h}-linear."""
        tower = self.tower
        t = tower.basis[1] if tower.h > 1 else 1
        scaled = tower.top.MUL[t, self.G].astype(np.uint8)
        extra = np.array([la.expand_vector(tower, row) for row in scaled],
                         dtype=np.uint8)
        stacked = np.vstack([self.expansion(), extra])
        return la.rank(tower.mid, stacked) == self.G.shape[0]


def from_arc(tower: FieldTower, universe: la.SubspaceUniverse, ordered_ids) -> AdditiveCode:
    """Code whose column blocks are the given subspaces, in the given order."""
    if universe.field is not tower.mid:
        raise ValueError("universe is not over the middle field of the tower")
    if universe.r != tower.h:
        raise ValueError("subspace dimension does not match h")
    kh = universe.n_vec
    G = np.zeros((kh, len(ordered_ids)), dtype=np.uint8)
    for j, i in enumerate(ordered_ids):
        block = universe.mats[int(i)].T  # kh x h
        for r in range(kh):
            G[r, j] = tower.compose(block[r])
    return AdditiveCode(tower, G)


# -- trace-alternating form and quantum parameters ------------------------------

class TraceAlternatingForm:
    """The form tr_{q -> p}((u . v^q - u^q . v) / gamma) on F_{q^2}^n, h = 2.

    gamma is the least nonzero scalar with gamma^q = -gamma; every value of
    u . v^q - u^q . v is gamma times an F_q element, so dividing lands in F_q
    before the trace to the prime field.  (Tracing from the top field instead
    would kill the form entirely in characteristic 2.)
    """

    def __init__(self, tower: FieldTower):
        if tower.h != 2:
            raise ValueError("the alternating form lives over a degree-2 tower")
        self.tower = tower
        top, q = tower.top, tower.mid.order
        gamma = None
        for c in range(1, top.order):
            if top.pow(c, q) == top.neg(c):
                gamma = c
                break
        if gamma is None:
            raise AssertionError("no purely alternating scalar exists")
        self.gamma = gamma
        self.q = q

    def pairing(self, u, v) -> int:
        """Value in the prime field."""
        tower = self.tower
        top = tower.top
        u = np.asarray(u, dtype=np.uint8)
        v = np.asarray(v, dtype=np.uint8)
        vq = v
        uq = u
        for _ in range(tower.e):
            vq = top.FRB[vq]
            uq = top.FRB[uq]
        s = 0
        for j in range(len(u)):
            t = top.sub(top.mul(int(u[j]), int(vq[j])), top.mul(int(uq[j]), int(v[j])))
            s = top.add(s, t)
        return tower.trace("q", "p", tower.unembed(top.div(s, self.gamma)))

    def is_totally_isotropic(self, code: AdditiveCode) -> bool:
        """True when the whole F_q-span pairs to zero with itself.

        It is enough that A_rs = sum_j G[r,j] G[s,j]^q lies in F_q for every
        row pair: scaling rows by F_q then keeps gamma (A - A^q) = 0.
        """
        top = self.tower.top
        G = code.G
        Gq = G
        for _ in range(self.tower.e):
            Gq = top.FRB[Gq]
        kh = G.shape[0]
        for r in range(kh):
            for s in range(r, kh):
                a = 0
                for j in range(code.n):
                    a = top.add(a, top.mul(int(G[r, j]), int(Gq[s, j])))
                if top.pow(a, self.q) != a:  # A not fixed by x -> x^q
                    return False
        return True


def is_self_orthogonal_a(code: AdditiveCode) -> bool:
    return TraceAlternatingForm(code.tower).is_totally_isotropic(code)


def quantum_params(code: AdditiveCode) -> tuple:
    """[[n, n - 2k, k + 1]]_q parameters of a self-orthogonal MDS code."""
    if not is_self_orthogonal_a(code):
        raise ValueError("code is not self-orthogonal for the alternating form")
    if not code.is_mds():
        raise ValueError("code is not MDS")
    n, k = code.n, code.k
    if n - 2 * k < 0:
        raise ValueError("code is too large to be an isotropic subspace")
    return (n, n - 2 * k, k + 1)
