"""Collineation groups of PG(n-1, q) acting on subspace universes.

A collineation x -> M . sigma^e(x) is carried as a triple: its permutation of
projective points (the working representation for all group arithmetic), the
matrix M, and the Frobenius exponent e.  Stabilizer chains live on the point
domain, which stays small even when the acted-on subspace universe is huge;
the action on r-subspaces is materialized lazily, one orbit forest per cached
subgroup, through the universe's sorted point-set index.

Chains are built by certified randomized Schreier-Sims: every group
constructed here has a target order known in advance (a closed form for the
full collineation group, orbit-stabilizer quotients below it), random sifting
runs until the chain reaches exactly that order, and a deterministic Schreier
closure is the fallback -- so a returned chain is never wrong, only the time
to build it is randomized.  All randomness is seeded from stable digests of
the construction path, which makes rebuilt chains identical across runs.

Canonical forms of subspace sets use Linton's minimal-image backtracking; the
stabilizer subgroups it walks through are cached by their canonical prefix,
and setwise stabilizers of canonical sets walk the same prefixes, so the two
share cache entries.  Subgroups below a size threshold are handled by direct
element enumeration instead of deeper recursion.
"""

from __future__ import annotations

import hashlib
import os
from collections import OrderedDict

import numpy as np

from . import linalg as la

_SMALL_GROUP = int(os.environ.get("ADDMDS_SMALL_GROUP", "2048"))
_STALL_LIMIT = 96


def stable_seed(*parts) -> int:
    """Deterministic 64-bit seed from the textual form of the parts."""
    text = "|".join(str(p) for p in parts)
    return int.from_bytes(hashlib.blake2b(text.encode(), digest_size=8).digest(), "big")


# -- group elements ------------------------------------------------------------

_FROB_TABLES: dict = {}


def _frob_table(field, e: int) -> np.ndarray:
    e = e % field.m
    key = (field.p, field.m, field.poly, e)
    tbl = _FROB_TABLES.get(key)
    if tbl is None:
        tbl = np.arange(field.order, dtype=np.int32)
        for _ in range(e):
            tbl = field.FRB[tbl]
        _FROB_TABLES[key] = tbl
    return tbl


class GroupElement:
    """A collineation: point permutation plus its (matrix, Frobenius) witness."""

    __slots__ = ("pperm", "mat", "frob")

    def __init__(self, pperm: np.ndarray, mat: np.ndarray, frob: int):
        self.pperm = pperm
        self.mat = mat
        self.frob = frob

    def compose(self, other: "GroupElement", field) -> "GroupElement":
        """self after other."""
        tbl = _frob_table(field, self.frob)
        mat = la.matmul(field, self.mat, tbl[other.mat].astype(np.uint8))
        return GroupElement(self.pperm[other.pperm], mat,
                            (self.frob + other.frob) % field.m)

    def inverse(self, field) -> "GroupElement":
        inv = np.empty_like(self.pperm)
        inv[self.pperm] = np.arange(len(self.pperm), dtype=self.pperm.dtype)
        e = (-self.frob) % field.m
        mat = _frob_table(field, e)[la.inverse(field, self.mat)].astype(np.uint8)
        return GroupElement(inv, mat, e)

    def is_identity(self) -> bool:
        p = self.pperm
        return bool((p == np.arange(len(p), dtype=p.dtype)).all())


def collineation(universe: la.SubspaceUniverse, M, frob: int = 0) -> GroupElement:
    field = universe.field
    M = np.asarray(M, dtype=np.uint8)
    pperm = universe.induced_point_perm(M, frob).astype(np.int32)
    return GroupElement(pperm, M, frob % field.m)


def identity_element(universe: la.SubspaceUniverse) -> GroupElement:
    return GroupElement(np.arange(universe.points.count, dtype=np.int32),
                        np.eye(universe.n_vec, dtype=np.uint8), 0)


# -- orders and generators of the full group -----------------------------------

def pgl_order(n: int, q: int) -> int:
    o = 1
    for i in range(n):
        o *= q ** n - q ** i
    return o // (q - 1)


def pgammal_order(n: int, q: int, aut: int) -> int:
    return pgl_order(n, q) * aut


def pgammal_generators(universe: la.SubspaceUniverse) -> list[GroupElement]:
    """Generators of the full collineation group of the ambient space."""
    field = universe.field
    n = universe.n_vec
    gens = []
    C = np.zeros((n, n), dtype=np.uint8)
    C[np.arange(1, n + 1) % n, np.arange(n)] = 1  # coordinate n-cycle
    T = np.eye(n, dtype=np.uint8)
    T[0, 1] = 1  # transvection
    mats = [C, T]
    if field.order > 2:
        D = np.eye(n, dtype=np.uint8)
        D[0, 0] = field.generator
        mats.append(D)
    for M in mats:
        gens.append(collineation(universe, M))
    if field.m > 1:
        gens.append(collineation(universe, np.eye(n, dtype=np.uint8), 1))
    return gens


# -- stabilizer chains on the point domain -------------------------------------

class StabChain:
    """Base and strong generators with Schreier trees stored as parent arrays."""

    def __init__(self, field, domain: int, dim: int):
        self.field = field
        self.P = domain
        self.dim = dim
        self.gens: list[GroupElement] = []
        self.base: list[int] = []
        self.lvl_gens: list[list[int]] = []
        self.parent: list[np.ndarray] = []
        self.genidx: list[np.ndarray] = []
        self.orbit: list[np.ndarray] = []
        self._arange = np.arange(domain, dtype=np.int32)
        self._inv: dict[int, GroupElement] = {}

    def _gen_inv(self, j: int) -> GroupElement:
        g = self._inv.get(j)
        if g is None:
            g = self._inv[j] = self.gens[j].inverse(self.field)
        return g

    def identity(self) -> GroupElement:
        return GroupElement(self._arange.copy(), np.eye(self.dim, dtype=np.uint8), 0)

    def order(self) -> int:
        o = 1
        for orb in self.orbit:
            o *= len(orb)
        return o

    def _rebuild(self, lvl: int):
        parent = np.full(self.P, -1, np.int32)
        genidx = np.full(self.P, -1, np.int32)
        root = self.base[lvl]
        parent[root] = root
        frontier = np.array([root], np.int32)
        orbs = [frontier]
        perms = [(gi, self.gens[gi].pperm) for gi in self.lvl_gens[lvl]]
        while len(frontier):
            nxt = []
            for gi, p in perms:
                img = p[frontier]
                fresh = parent[img] < 0
                if fresh.any():
                    new = img[fresh]
                    parent[new] = frontier[fresh]
                    genidx[new] = gi
                    nxt.append(new)
            frontier = np.concatenate(nxt) if nxt else np.empty(0, np.int32)
            if len(frontier):
                orbs.append(frontier)
        self.parent[lvl] = parent
        self.genidx[lvl] = genidx
        self.orbit[lvl] = np.concatenate(orbs)

    def transversal(self, lvl: int, x: int, to_root: bool) -> GroupElement:
        """Element mapping x to base[lvl] (to_root) or base[lvl] to x."""
        parent, genidx = self.parent[lvl], self.genidx[lvl]
        js = []
        while parent[x] != x:
            js.append(int(genidx[x]))
            x = int(parent[x])
        field = self.field
        acc = None
        if to_root:
            for j in js:
                g = self._gen_inv(j)
                acc = g if acc is None else g.compose(acc, field)
        else:
            for j in js:
                g = self.gens[j]
                acc = g if acc is None else acc.compose(g, field)
        return acc if acc is not None else self.identity()

    def sift(self, g: GroupElement, start: int = 0) -> tuple[GroupElement, int]:
        for lvl in range(start, len(self.base)):
            x = int(g.pperm[self.base[lvl]])
            if x == self.base[lvl]:
                continue
            if self.parent[lvl][x] < 0:
                return g, lvl
            g = self.transversal(lvl, x, to_root=True).compose(g, self.field)
        return g, len(self.base)

    def extend_with(self, r: GroupElement, lvl: int) -> bool:
        """Install a sift residue known to fix base[:lvl]; True if it grew."""
        if r.is_identity():
            return False
        if lvl == len(self.base):
            moved = int(np.nonzero(r.pperm != self._arange)[0][0])
            self.base.append(moved)
            self.lvl_gens.append([])
            self.parent.append(None)
            self.genidx.append(None)
            self.orbit.append(None)
        gi = len(self.gens)
        self.gens.append(r)
        for i in range(lvl + 1):
            self.lvl_gens[i].append(gi)
        for i in range(lvl + 1):
            self._rebuild(i)
        return True

    def contains(self, g: GroupElement) -> bool:
        r, _ = self.sift(g)
        return r.is_identity()

    def random_element(self, rng) -> GroupElement:
        g = None
        for lvl in range(len(self.base)):
            orb = self.orbit[lvl]
            t = self.transversal(lvl, int(orb[rng.integers(len(orb))]), to_root=False)
            g = t if g is None else g.compose(t, self.field)
        return g if g is not None else self.identity()

    def all_elements(self) -> list[GroupElement]:
        """Every element, as transversal products; only for small orders."""
        elts = [self.identity()]
        for lvl in reversed(range(len(self.base))):
            cur = []
            for x in self.orbit[lvl]:
                t = self.transversal(lvl, int(x), to_root=False)
                cur.extend(t.compose(e, self.field) for e in elts)
            elts = cur
        return elts


def schreier_sims_complete(chain: StabChain) -> StabChain:
    """Deterministic Schreier closure; afterwards order() is exactly <gens>."""
    changed = True
    while changed:
        changed = False
        for lvl in reversed(range(len(chain.base))):
            for x in chain.orbit[lvl].copy():
                tx = chain.transversal(lvl, int(x), to_root=False)
                for gi in list(chain.lvl_gens[lvl]):
                    g = chain.gens[gi]
                    s = g.compose(tx, chain.field)
                    y = int(s.pperm[chain.base[lvl]])
                    s = chain.transversal(lvl, y, to_root=True).compose(s, chain.field)
                    r, l2 = chain.sift(s, lvl + 1)
                    if chain.extend_with(r, l2):
                        changed = True
    return chain


def _product_replacement(field, gens, rng, width: int = 8, burn: int = 30):
    state = [gens[i % len(gens)] for i in range(max(width, len(gens)))]

    def draw() -> GroupElement:
        i = int(rng.integers(len(state)))
        j = int(rng.integers(len(state) - 1))
        if j >= i:
            j += 1
        if rng.integers(2):
            state[i] = state[i].compose(state[j], field)
        else:
            state[i] = state[j].compose(state[i], field)
        return state[i]

    for _ in range(burn):
        draw()
    return draw


def build_chain_certified(field, domain: int, dim: int, init_gens, target: int,
                          seed: int, sampler_factory=None, extra_source=None) -> StabChain:
    """Grow a chain until its order equals the known target order.

    sampler_factory(rng) supplies random elements of the target group;
    extra_source() supplies a finite generating family used as fallback.
    A final deterministic closure certifies the order or raises.
    """
    chain = StabChain(field, domain, dim)
    for g in init_gens:
        r, lvl = chain.sift(g)
        chain.extend_with(r, lvl)
        if chain.order() == target:
            break
    if chain.order() < target and sampler_factory is not None:
        rng = np.random.default_rng(seed)
        draw = sampler_factory(rng)
        stall = 0
        while chain.order() < target and stall < _STALL_LIMIT:
            r, lvl = chain.sift(draw())
            if chain.extend_with(r, lvl):
                stall = 0
            else:
                stall += 1
    if chain.order() < target and extra_source is not None:
        for g in extra_source():
            r, lvl = chain.sift(g)
            chain.extend_with(r, lvl)
            if chain.order() >= target:
                break
    if chain.order() < target:
        schreier_sims_complete(chain)
    if chain.order() != target:
        raise AssertionError(
            f"chain certified at order {chain.order()}, expected {target}")
    return chain


# -- subgroups acting on the subspace domain -----------------------------------

class Subgroup:
    """A chain-backed subgroup with a lazy orbit forest on subspace ids."""

    def __init__(self, ctx: "GroupContext", key: tuple, chain, order: int,
                 forest_gens=None):
        self.ctx = ctx
        self.key = key
        self.chain = chain
        self.order = order
        self.forest_gens = forest_gens if forest_gens is not None else (
            chain.gens if chain is not None else [])
        self._labels = None
        self._parent = None
        self._genidx = None
        self._counts = None
        self._elts = None
        self._elt_pperms = None
        self._finv: dict[int, GroupElement] = {}

    def _forest_inv(self, j: int) -> GroupElement:
        g = self._finv.get(j)
        if g is None:
            g = self._finv[j] = self.forest_gens[j].inverse(self.ctx.field)
        return g

    # orbit forest on the subspace domain

    def _ensure_forest(self):
        if self._labels is not None:
            return
        uni = self.ctx.uni
        perms = [self.ctx.subspace_perm(g) for g in self.forest_gens]
        N = uni.count
        labels = np.full(N, -1, np.int32)
        parent = np.full(N, -1, np.int32)
        genidx = np.full(N, -1, np.int32)
        for root in range(N):
            if labels[root] >= 0:
                continue
            labels[root] = root
            parent[root] = root
            frontier = np.array([root], np.int32)
            while len(frontier):
                nxt = []
                for j, p in enumerate(perms):
                    img = p[frontier]
                    fresh = labels[img] < 0
                    if fresh.any():
                        new = img[fresh]
                        labels[new] = root
                        parent[new] = frontier[fresh]
                        genidx[new] = j
                        nxt.append(new)
                frontier = np.concatenate(nxt) if nxt else np.empty(0, np.int32)
        self._labels = labels
        self._parent = parent
        self._genidx = genidx
        self._counts = np.bincount(labels, minlength=N).astype(np.int64)

    @property
    def labels(self) -> np.ndarray:
        self._ensure_forest()
        return self._labels

    def orbit_size(self, i: int) -> int:
        self._ensure_forest()
        return int(self._counts[self._labels[i]])

    def transversal_sub(self, s: int, to_root: bool) -> GroupElement:
        """Element mapping s to its orbit root (or back)."""
        self._ensure_forest()
        field = self.ctx.field
        js = []
        x = int(s)
        while self._parent[x] != x:
            js.append(int(self._genidx[x]))
            x = int(self._parent[x])
        acc = None
        if to_root:
            for j in js:
                g = self._forest_inv(j)
                acc = g if acc is None else g.compose(acc, field)
        else:
            for j in js:
                g = self.forest_gens[j]
                acc = g if acc is None else acc.compose(g, field)
        return acc if acc is not None else self.ctx.identity

    def map_between(self, s: int, t: int) -> GroupElement:
        """An element sending subspace s to t (same orbit required)."""
        u = self.transversal_sub(s, to_root=True)
        v = self.transversal_sub(t, to_root=True)
        return v.inverse(self.ctx.field).compose(u, self.ctx.field)

    # small-order element enumeration

    def elements(self) -> list[GroupElement]:
        if self.order > _SMALL_GROUP:
            raise ValueError("element enumeration is only for small subgroups")
        if self._elts is None:
            self._elts = ([self.ctx.identity] if self.chain is None
                          else self.chain.all_elements())
            self._elt_pperms = np.stack([e.pperm for e in self._elts])
        return self._elts

    def _sorted_image_keys(self, ids: tuple) -> np.ndarray:
        """Packed sorted images of the id set under every element; (E, n)."""
        self.elements()
        uni = self.ctx.uni
        if uni.r == 1:
            imgs = self._elt_pperms[:, list(ids)]
        else:
            pts = uni.pts[list(ids)]
            keys = uni._pack_ptsets(
                np.sort(self._elt_pperms[:, pts].reshape(len(self._elts), len(ids), -1),
                        axis=2).reshape(-1, pts.shape[1]))
            pos = np.searchsorted(uni._ptset_keys, keys)
            imgs = uni._ptset_order[pos].reshape(len(self._elts), len(ids))
        return np.sort(imgs, axis=1)

    def min_sorted_image(self, ids: tuple) -> tuple:
        rows = self._sorted_image_keys(ids)
        best = rows[np.lexsort(rows.T[::-1])[0]]
        return tuple(int(x) for x in best)

    def filter_setwise(self, src: tuple, targets: tuple):
        """Elements mapping the source id set onto the target id set."""
        rows = self._sorted_image_keys(src)
        want = np.array(sorted(targets), dtype=rows.dtype)
        hits = np.nonzero((rows == want[None, :]).all(axis=1))[0]
        return [self._elts[i] for i in hits]


class SetwiseStabilizer:
    """Order, generators and membership chain of a set stabilizer."""

    __slots__ = ("order", "gens", "chain")

    def __init__(self, order: int, gens: list, chain: StabChain):
        self.order = order
        self.gens = gens
        self.chain = chain


class GroupContext:
    """The full collineation group of a universe plus its subgroup cache."""

    def __init__(self, universe: la.SubspaceUniverse, cache_mb: int | None = None):
        self.uni = universe
        self.field = universe.field
        self.P = universe.points.count
        if cache_mb is None:
            cache_mb = int(os.environ.get("ADDMDS_CACHE_MB", "1024"))
        self._cache_cap = cache_mb * (1 << 20)
        self._cache: OrderedDict[tuple, Subgroup] = OrderedDict()
        self._cache_bytes: dict[tuple, int] = {}
        self._bytes = 0
        self._sig = (universe.field.p, universe.field.m, universe.n_vec, universe.r)
        self.identity = identity_element(universe)
        raw = pgammal_generators(universe)
        n, q = universe.n_vec, universe.field.order
        target = pgammal_order(n, q, universe.field.m)
        chain = build_chain_certified(
            self.field, self.P, n, raw, target,
            stable_seed("top", *self._sig),
            sampler_factory=lambda rng: _product_replacement(self.field, raw, rng))
        self.top = Subgroup(self, (), chain, target, forest_gens=raw)
        self.group_order = target

    # element actions on subspace ids

    def subspace_perm(self, g: GroupElement) -> np.ndarray:
        if self.uni.r == 1:
            return g.pperm
        return self.uni.subspace_perm_from_point_perm(g.pperm)

    def apply_elt(self, g: GroupElement, ids) -> tuple:
        uni = self.uni
        ids = list(ids)
        if uni.r == 1:
            return tuple(int(g.pperm[i]) for i in ids)
        pts = uni.pts[ids]
        keys = uni._pack_ptsets(np.sort(g.pperm[pts], axis=1))
        pos = np.searchsorted(uni._ptset_keys, keys)
        if (uni._ptset_keys[pos] != keys).any():
            raise AssertionError("element does not permute the universe")
        return tuple(int(x) for x in uni._ptset_order[pos])

    def apply_elt_single(self, g: GroupElement, i: int) -> int:
        return self.apply_elt(g, (i,))[0]

    # subgroup cache

    def _remember(self, key: tuple, sub: Subgroup):
        uni = self.uni
        if sub.order <= _SMALL_GROUP:
            est = sub.order * (4 * self.P + uni.n_vec ** 2 + 64)
        else:
            est = 28 * uni.count + len(sub.forest_gens) * 4 * self.P
        self._cache[key] = sub
        self._cache_bytes[key] = est
        self._bytes += est
        while self._bytes > self._cache_cap and len(self._cache) > 1:
            old, _ = self._cache.popitem(last=False)
            self._bytes -= self._cache_bytes.pop(old)

    def stabilizer_of(self, parent: Subgroup, m: int) -> Subgroup:
        """Stabilizer of subspace id m inside parent, cached by prefix."""
        m = int(m)
        key = parent.key + (m,)
        sub = self._cache.get(key)
        if sub is not None:
            self._cache.move_to_end(key)
            return sub
        parent._ensure_forest()
        root = int(parent._labels[m])
        target = parent.order // int(parent._counts[root])
        if target == 1:
            sub = Subgroup(self, key, None, 1)
            self._remember(key, sub)
            return sub
        field = self.field
        conj = conj_inv = None
        if root != m:
            conj = parent.transversal_sub(m, to_root=False)  # root -> m
            conj_inv = conj.inverse(field)

        def fix_root(z: GroupElement) -> GroupElement:
            if conj is None:
                return z
            return conj.compose(z, field).compose(conj_inv, field)

        def sampler_factory(rng):
            def draw():
                h = parent.chain.random_element(rng)
                y = self.apply_elt_single(h, root)
                if y != root:
                    h = parent.transversal_sub(y, to_root=True).compose(h, field)
                return fix_root(h)
            return draw

        def extra_source():
            # Schreier generators of the orbit of the root: always generating
            idxs = np.nonzero(parent._labels == root)[0]
            for x in idxs:
                tx = parent.transversal_sub(int(x), to_root=False)
                for g in parent.forest_gens:
                    y = self.apply_elt_single(g, int(x))
                    s = g.compose(tx, field)
                    s = parent.transversal_sub(y, to_root=True).compose(s, field)
                    yield fix_root(s)

        chain = build_chain_certified(
            field, self.P, self.uni.n_vec, [], target,
            stable_seed("stab", *self._sig, *key),
            sampler_factory=sampler_factory, extra_source=extra_source)
        sub = Subgroup(self, key, chain, target)
        self._remember(key, sub)
        return sub

    # canonical forms

    def minimal_image(self, ids) -> tuple:
        """Lexicographically least image of the id set under the full group."""
        S0 = tuple(sorted(int(i) for i in ids))
        if len(set(S0)) != len(S0):
            raise ValueError("minimal_image expects distinct ids")
        best = None

        def rec(G: Subgroup, S: tuple, prefix: tuple):
            nonlocal best
            if not S:
                if best is None or prefix < best:
                    best = prefix
                return
            if G.order == 1:
                cand = prefix + tuple(sorted(S))
                if best is None or cand < best:
                    best = cand
                return
            if G.order <= _SMALL_GROUP:
                cand = prefix + G.min_sorted_image(S)
                if best is None or cand < best:
                    best = cand
                return
            lab = G.labels[list(S)]
            m = int(lab.min())
            pref = prefix + (m,)
            if best is not None and pref > best[:len(pref)]:
                return
            Gm = None
            for s, l in zip(S, lab):
                if l != m:
                    continue
                u = G.transversal_sub(s, to_root=True)
                rest = tuple(t for t in S if t != s)
                S2 = self.apply_elt(u, rest) if rest else ()
                if Gm is None:
                    Gm = self.stabilizer_of(G, m)
                rec(Gm, S2, pref)

        rec(self.top, S0, ())
        return best

    def are_equivalent(self, a, b) -> bool:
        return self.minimal_image(a) == self.minimal_image(b)

    def setwise_stabilizer(self, ids) -> SetwiseStabilizer:
        """Stabilizer of the id set inside the full collineation group."""
        X = tuple(sorted(int(i) for i in ids))
        n = len(X)
        field = self.field
        found: list[GroupElement] = []
        saw_pointwise = False

        def collect(g: GroupElement | None):
            if g is not None and not g.is_identity():
                found.append(g)

        def rec(G: Subgroup, d: int, targets: tuple, acc) -> int:
            # the found list must generate: every leaf coset rep plus the
            # pointwise stabilizer's gens plus every brute-forced element
            nonlocal saw_pointwise
            if d == n:
                if G.chain is not None and not saw_pointwise:
                    saw_pointwise = True
                    for g in G.chain.gens:
                        collect(acc.compose(g, field) if acc is not None else g)
                collect(acc)
                return G.order
            if G.order == 1:
                if tuple(sorted(targets)) == X[d:]:
                    collect(acc)
                    return 1
                return 0
            if G.order <= _SMALL_GROUP:
                hits = G.filter_setwise(X[d:], targets)
                for h in hits:
                    collect(acc.compose(h, field) if acc is not None else h)
                return len(hits)
            lab_s = int(G.labels[X[d]])
            cnt = 0
            Gs = None
            for t in targets:
                if int(G.labels[t]) != lab_s:
                    continue
                z = G.map_between(X[d], t)
                rest = tuple(x for x in targets if x != t)
                t2 = self.apply_elt(z.inverse(field), rest) if rest else ()
                if Gs is None:
                    Gs = self.stabilizer_of(G, X[d])
                acc2 = acc.compose(z, field) if acc is not None else z
                cnt += rec(Gs, d + 1, t2, acc2)
            return cnt

        total = rec(self.top, 0, X, None)
        gens = found if found else [self.identity]
        chain = build_chain_certified(
            field, self.P, self.uni.n_vec, gens, total,
            stable_seed("setwise", *self._sig, *X),
            sampler_factory=(lambda rng: _product_replacement(field, gens, rng))
            if found else None)
        return SetwiseStabilizer(total, chain.gens if chain.gens else [], chain)
