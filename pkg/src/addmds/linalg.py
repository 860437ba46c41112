"""Exact linear algebra over small fields and projective subspace universes.

Matrices are numpy uint8 arrays of field codes; vectors are rows.  A projective
subspace of PG(N, q) is identified with its row space and represented by the
reduced row echelon form of any basis, zero rows removed: that matrix is the
canonical representative, and the canonical key packs its entries row-major
into an integer (fixed bits per entry, big-endian), so numeric key order equals
lexicographic order on canonical matrices.

A SubspaceUniverse enumerates every r-dimensional (vector) subspace of F_q^n
in key order and assigns ids 0..count-1.  It also stores, per subspace, the
ids of its projective points and a packed point bitmask; those drive both the
arc extension filters and the induced permutation of a collineation.

Collineations act on column vectors as x -> M . sigma^e(x), so a row-space
basis B transforms as B -> sigma^e(B) . M^T.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .gf import FieldError, FieldTable, FieldTower


# -- dense matrix routines ---------------------------------------------------

def rref(field: FieldTable, M) -> tuple[np.ndarray, int]:
    """Reduced row echelon form and rank of a single matrix."""
    A = np.array(M, dtype=np.uint8, copy=True)
    if A.ndim != 2:
        raise ValueError("rref expects a 2-d matrix")
    rows, cols = A.shape
    MUL, SUB, INV = field.MUL, field.SUB, field.INV
    piv = 0
    for col in range(cols):
        if piv >= rows:
            break
        hit = -1
        for i in range(piv, rows):
            if A[i, col]:
                hit = i
                break
        if hit < 0:
            continue
        if hit != piv:
            A[[piv, hit]] = A[[hit, piv]]
        v = A[piv, col]
        if v != 1:
            A[piv] = MUL[INV[v], A[piv]]
        for i in range(rows):
            if i != piv and A[i, col]:
                A[i] = SUB[A[i], MUL[A[i, col], A[piv]]]
        piv += 1
    return A, piv


def rref_batch(field: FieldTable, mats) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon forms of a (B, r, c) batch; returns (forms, ranks)."""
    A = np.array(mats, dtype=np.uint8, copy=True)
    B, r, c = A.shape
    MUL, SUB, INV = field.MUL, field.SUB, field.INV
    piv = np.zeros(B, dtype=np.int64)
    rows = np.arange(r)
    allb = np.arange(B)
    for col in range(c):
        colv = A[:, :, col]
        elig = (colv != 0) & (rows[None, :] >= piv[:, None])
        has = elig.any(axis=1)
        if not has.any():
            continue
        first = np.where(elig, rows[None, :], r).min(axis=1)
        b = allb[has]
        f, pr = first[has], piv[has]
        tmp = A[b, f, :].copy()
        A[b, f, :] = A[b, pr, :]
        A[b, pr, :] = tmp
        v = A[b, pr, col]
        need = v != 1
        if need.any():
            bn, prn = b[need], pr[need]
            A[bn, prn, :] = MUL[INV[A[bn, prn, col]][:, None], A[bn, prn, :]]
        prow = A[b, pr, :]
        fac = A[b, :, col]
        prod = MUL[fac[:, :, None], prow[:, None, :]]
        out = SUB[A[b], prod]
        out[np.arange(len(b)), pr, :] = prow
        A[b] = out.astype(np.uint8)
        piv[has] += 1
    return A, piv


def rank(field: FieldTable, M) -> int:
    return rref(field, M)[1]


def matmul(field: FieldTable, A, B) -> np.ndarray:
    """Field matrix product (a x n) . (n x b)."""
    A = np.asarray(A, dtype=np.uint8)
    B = np.asarray(B, dtype=np.uint8)
    n = A.shape[1]
    if B.shape[0] != n:
        raise ValueError("shape mismatch")
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int32)
    ADD, MUL = field.ADD, field.MUL
    for k in range(n):
        out = ADD[out, MUL[A[:, k][:, None], B[k][None, :]]]
    return out.astype(np.uint8)


def matvec(field: FieldTable, v, M) -> np.ndarray:
    """Row vector times matrix."""
    return matmul(field, np.asarray(v, dtype=np.uint8)[None, :], M)[0]


def inverse(field: FieldTable, M) -> np.ndarray:
    M = np.asarray(M, dtype=np.uint8)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    aug = np.zeros((n, 2 * n), dtype=np.uint8)
    aug[:, :n] = M
    aug[np.arange(n), n + np.arange(n)] = 1
    R, rk = rref(field, aug)
    if rk < n or not np.array_equal(R[:, :n], np.eye(n, dtype=np.uint8)):
        raise ValueError("matrix is singular")
    return R[:, n:].copy()


def kernel(field: FieldTable, M) -> np.ndarray:
    """Rows spanning {v : M . v^T = 0}, one per free column, in RREF-like form."""
    M = np.asarray(M, dtype=np.uint8)
    R, rk = rref(field, M)
    cols = M.shape[1]
    pivots = []
    j = 0
    for i in range(rk):
        while R[i, j] == 0:
            j += 1
        pivots.append(j)
    free = [j for j in range(cols) if j not in pivots]
    out = np.zeros((len(free), cols), dtype=np.uint8)
    NEG = field.NEG
    for t, j in enumerate(free):
        out[t, j] = 1
        for i, pj in enumerate(pivots):
            out[t, pj] = NEG[R[i, j]]
    return out


def apply_collineation_to_mats(field: FieldTable, mats, M, frob: int = 0):
    """sigma^frob entrywise, then right-multiply row bases by M^T; no echelon."""
    X = np.asarray(mats, dtype=np.uint8)
    if frob:
        tbl = np.arange(field.order, dtype=np.int32)
        for _ in range(frob % field.m):
            tbl = field.FRB[tbl]
        X = tbl[X].astype(np.uint8)
    MT = np.asarray(M, dtype=np.uint8).T
    c = MT.shape[0]
    single = X.ndim == 2
    if single:
        X = X[None]
    out = np.zeros(X.shape[:-1] + (MT.shape[1],), dtype=np.int32)
    ADD, MUL = field.ADD, field.MUL
    for k in range(c):
        out = ADD[out, MUL[X[..., k, None], MT[k][None, None, :]]]
    out = out.astype(np.uint8)
    return out[0] if single else out


# -- canonical subspaces -----------------------------------------------------

def _bits_per_entry(q: int) -> int:
    return int(q - 1).bit_length()


def pack_keys(field: FieldTable, mats) -> np.ndarray:
    """Canonical integer keys of a batch of (r x c) canonical matrices."""
    mats = np.asarray(mats, dtype=np.uint8)
    B = mats.shape[0]
    flat = mats.reshape(B, -1).astype(np.uint64)
    bits = _bits_per_entry(field.order)
    if flat.shape[1] * bits > 64:
        raise ValueError("matrix too large for 64-bit keys")
    acc = np.zeros(B, dtype=np.uint64)
    for i in range(flat.shape[1]):
        acc = (acc << np.uint64(bits)) | flat[:, i]
    return acc


class SubspacePG:
    """A projective subspace as its canonical (RREF) basis matrix."""

    __slots__ = ("field", "mat", "key")

    def __init__(self, field: FieldTable, canonical_mat: np.ndarray, key: int):
        self.field = field
        self.mat = canonical_mat
        self.key = key

    @classmethod
    def from_matrix(cls, field: FieldTable, M) -> "SubspacePG":
        R, rk = rref(field, M)
        if rk == 0:
            raise ValueError("a projective subspace needs a nonzero span")
        can = R[:rk].copy()
        can.flags.writeable = False
        key = int(pack_keys(field, can[None])[0])
        return cls(field, can, key)

    @property
    def vdim(self) -> int:
        return self.mat.shape[0]

    @property
    def pg_dim(self) -> int:
        return self.mat.shape[0] - 1

    @property
    def ambient_vdim(self) -> int:
        return self.mat.shape[1]

    @property
    def ambient_pg_dim(self) -> int:
        return self.mat.shape[1] - 1

    def _ident(self):
        return (self.field.order, self.mat.shape, self.key)

    def __eq__(self, other):
        return isinstance(other, SubspacePG) and self._ident() == other._ident()

    def __lt__(self, other):
        return (self.mat.shape[0], self.key) < (other.mat.shape[0], other.key)

    def __hash__(self):
        return hash(self._ident())

    def __repr__(self):
        rows = ["".join(str(int(x)) for x in row) for row in self.mat]
        return f"SubspacePG[{'/'.join(rows)}]"


def subspace_from_columns(field: FieldTable, vectors) -> SubspacePG:
    """Subspace spanned by the given vectors (error if they span only zero)."""
    arr = np.asarray(list(vectors), dtype=np.uint8)
    if arr.ndim != 2 or not arr.any():
        raise ValueError("a projective subspace needs a nonzero span")
    return SubspacePG.from_matrix(field, arr)


def span(a: SubspacePG, b: SubspacePG) -> SubspacePG:
    if a.field is not b.field or a.ambient_vdim != b.ambient_vdim:
        raise ValueError("span of subspaces from different ambients")
    return SubspacePG.from_matrix(a.field, np.vstack([a.mat, b.mat]))


def meet(a: SubspacePG, b: SubspacePG):
    """Intersection subspace, or None when the subspaces meet trivially."""
    if a.field is not b.field or a.ambient_vdim != b.ambient_vdim:
        raise ValueError("meet of subspaces from different ambients")
    # Zassenhaus: echelonize [[A A],[B 0]]; rows with zero left half carry
    # the intersection in their right half.
    c = a.ambient_vdim
    top = np.hstack([a.mat, a.mat])
    bot = np.hstack([b.mat, np.zeros_like(b.mat)])
    R, rk = rref(a.field, np.vstack([top, bot]))
    rows = [i for i in range(rk) if not R[i, :c].any()]
    if not rows:
        return None
    return SubspacePG.from_matrix(a.field, R[rows, c:])


def contains(a: SubspacePG, b: SubspacePG) -> bool:
    """Whether subspace a contains subspace b."""
    if a.field is not b.field or a.ambient_vdim != b.ambient_vdim:
        raise ValueError("containment of subspaces from different ambients")
    return rank(a.field, np.vstack([a.mat, b.mat])) == a.vdim


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


# -- the universe of r-subspaces ---------------------------------------------

def _proj_coeffs(q: int, r: int) -> np.ndarray:
    """All coefficient rows over F_q of length r with leading nonzero = 1."""
    out = []
    for lead in range(r):
        tail = r - lead - 1
        block = np.zeros((q ** tail, r), dtype=np.uint8)
        block[:, lead] = 1
        v = np.arange(q ** tail)
        for i in range(tail):
            block[:, lead + 1 + i] = v % q
            v //= q
        out.append(block)
    return np.vstack(out)


class SubspaceUniverse:
    """Every r-dimensional subspace of F_q^n, id-ordered by canonical key."""

    def __init__(self, field: FieldTable, n_vec: int, r: int):
        if not 1 <= r <= n_vec:
            raise ValueError("need 1 <= r <= n")
        self.field = field
        self.n_vec = n_vec
        self.r = r
        self.count = gaussian_binomial(n_vec, r, field.order)
        self.mats = self._enumerate()
        self.keys = pack_keys(field, self.mats)
        order = np.argsort(self.keys, kind="stable")
        self.mats = np.ascontiguousarray(self.mats[order])
        self.keys = self.keys[order]
        if len(self.mats) != self.count:
            raise AssertionError("enumeration disagrees with the Gaussian binomial")
        if r == 1:
            self.points = self
        else:
            self.points = subspace_universe(field, n_vec, 1)
        self._fill_points()

    def _enumerate(self) -> np.ndarray:
        q = self.field.order
        n, r = self.n_vec, self.r
        chunks = []
        for pivots in combinations(range(n), r):
            free = []
            for i in range(r):
                for j in range(pivots[i] + 1, n):
                    if j not in pivots:
                        free.append((i, j))
            f = len(free)
            block = np.zeros((q ** f, r, n), dtype=np.uint8)
            block[:, np.arange(r), pivots] = 1
            v = np.arange(q ** f)
            for t, (i, j) in enumerate(free):
                block[:, i, j] = v % q
                v //= q
            chunks.append(block)
        return np.vstack(chunks)

    def _fill_points(self):
        q = self.field.order
        if self.r == 1:
            self.pts = np.arange(self.count, dtype=np.int32)[:, None]
        else:
            coeffs = _proj_coeffs(q, self.r)
            ppos = len(coeffs)
            ADD, MUL = self.field.ADD, self.field.MUL
            pts = np.zeros((self.count, ppos), dtype=np.int32)
            for t, cf in enumerate(coeffs):
                vec = np.zeros((self.count, self.n_vec), dtype=np.int32)
                for i in range(self.r):
                    if cf[i]:
                        vec = ADD[vec, MUL[cf[i], self.mats[:, i, :]]]
                # RREF bases make these rows canonical point representatives
                pts[:, t] = self.points.ids_of_mats(
                    vec.astype(np.uint8)[:, None, :], canonical=True
                )
            self.pts = pts
        P = self.points.count
        W = (P + 63) // 64
        self.mask_words = W
        masks = np.zeros((self.count, W), dtype=np.uint64)
        rows = np.arange(self.count)
        for t in range(self.pts.shape[1]):
            ids = self.pts[:, t]
            np.bitwise_or.at(masks, (rows, ids >> 6),
                             np.uint64(1) << (ids & 63).astype(np.uint64))
        self.masks = masks
        # a subspace is its point set: when the sorted id tuple packs into 64
        # bits, index it so induced permutations skip re-echelonization
        self._id_bits = max(1, int(P - 1).bit_length())
        if self.r > 1 and self.pts.shape[1] * self._id_bits <= 64:
            pk = self._pack_ptsets(np.sort(self.pts, axis=1))
            self._ptset_order = np.argsort(pk).astype(np.int32)
            self._ptset_keys = pk[self._ptset_order]
        else:
            self._ptset_keys = None

    def _pack_ptsets(self, sorted_ids) -> np.ndarray:
        acc = np.zeros(len(sorted_ids), dtype=np.uint64)
        b = np.uint64(self._id_bits)
        for t in range(sorted_ids.shape[1]):
            acc = (acc << b) | sorted_ids[:, t].astype(np.uint64)
        return acc

    # -- id lookups --

    def ids_of_mats(self, mats, canonical: bool = False) -> np.ndarray:
        """Ids of a (B, r, n) batch of bases (echelonized here unless canonical)."""
        mats = np.asarray(mats, dtype=np.uint8)
        if not canonical:
            mats, ranks = rref_batch(self.field, mats)
            if (ranks != self.r).any():
                raise ValueError("rank-deficient basis has no id in this universe")
        keys = pack_keys(self.field, mats)
        ids = np.searchsorted(self.keys, keys)
        if (ids >= self.count).any() or (self.keys[ids] != keys).any():
            raise ValueError("basis does not belong to this universe")
        return ids.astype(np.int32)

    def id_of(self, sub) -> int:
        mat = sub.mat if isinstance(sub, SubspacePG) else np.asarray(sub, np.uint8)
        return int(self.ids_of_mats(mat[None])[0])

    def subspace(self, i: int) -> SubspacePG:
        mat = self.mats[i].copy()
        mat.flags.writeable = False
        return SubspacePG(self.field, mat, int(self.keys[i]))

    # -- collineation actions --

    def induced_point_perm(self, M, frob: int = 0) -> np.ndarray:
        """Permutation of point ids under x -> M . sigma^frob(x)."""
        pu = self.points
        vec = apply_collineation_to_mats(self.field, pu.mats[:, 0, :], M, frob)
        lead = (vec != 0).argmax(axis=1)
        lv = vec[np.arange(len(vec)), lead]
        vec = self.field.MUL[self.field.INV[lv][:, None], vec].astype(np.uint8)
        return pu.ids_of_mats(vec[:, None, :], canonical=True)

    def induced_subspace_perm(self, M, frob: int = 0) -> np.ndarray:
        """Permutation of subspace ids under the same collineation."""
        if self._ptset_keys is not None:
            pp = self.induced_point_perm(M, frob)
            keys = self._pack_ptsets(np.sort(pp[self.pts], axis=1))
            pos = np.searchsorted(self._ptset_keys, keys)
            if (self._ptset_keys[pos] != keys).any():
                raise ValueError("collineation does not permute this universe")
            return self._ptset_order[pos]
        moved = apply_collineation_to_mats(self.field, self.mats, M, frob)
        return self.ids_of_mats(moved)

    def subspace_perm_from_point_perm(self, pp) -> np.ndarray:
        """Lift a point permutation known to preserve the geometry."""
        if self._ptset_keys is None:
            raise ValueError("no point-set index for this universe")
        keys = self._pack_ptsets(np.sort(np.asarray(pp)[self.pts], axis=1))
        pos = np.searchsorted(self._ptset_keys, keys)
        if (self._ptset_keys[pos] != keys).any():
            raise ValueError("point permutation does not permute this universe")
        return self._ptset_order[pos]

    # -- point masks --

    def point_mask_of_mat(self, mat) -> np.ndarray:
        """Packed bitmask of the point ids covered by the row space of mat."""
        R, rk = rref(self.field, mat)
        mask = np.zeros(self.mask_words, dtype=np.uint64)
        if rk == 0:
            return mask
        coeffs = _proj_coeffs(self.field.order, rk)
        vecs = matmul(self.field, coeffs, R[:rk])
        ids = self.points.ids_of_mats(vecs[:, None, :], canonical=True)
        np.bitwise_or.at(mask, ids >> 6, np.uint64(1) << (ids & 63).astype(np.uint64))
        return mask

    def ids_clear_of(self, span_masks) -> np.ndarray:
        """Ids of subspaces meeting none of the given point masks."""
        ok = np.ones(self.count, dtype=bool)
        for m in span_masks:
            ok &= ((self.masks & m[None, :]) == 0).all(axis=1)
        return np.nonzero(ok)[0].astype(np.int32)


_UNIVERSE_CACHE: dict = {}


def subspace_universe(field: FieldTable, n_vec: int, r: int) -> SubspaceUniverse:
    key = (field.p, field.m, field.poly, n_vec, r)
    if key not in _UNIVERSE_CACHE:
        _UNIVERSE_CACHE[key] = SubspaceUniverse(field, n_vec, r)
    return _UNIVERSE_CACHE[key]


def enumerate_subspaces(field: FieldTable, ambient_pg_dim: int, pg_dim: int):
    """Yield every pg_dim-subspace of PG(ambient_pg_dim, q) in id order."""
    uni = subspace_universe(field, ambient_pg_dim + 1, pg_dim + 1)
    for i in range(uni.count):
        yield uni.subspace(i)


# -- field reduction ----------------------------------------------------------

def expand_vector(tower: FieldTower, u) -> np.ndarray:
    """F_{q^h}^k row -> F_q^{kh} row; coordinate j fills columns jh..jh+h-1."""
    h = tower.h
    out = np.zeros(len(u) * h, dtype=np.uint8)
    for j, x in enumerate(u):
        out[j * h:(j + 1) * h] = tower.DEC[int(x)]
    return out


def compress_vector(tower: FieldTower, v) -> np.ndarray:
    """Inverse of expand_vector."""
    h = tower.h
    v = np.asarray(v, dtype=np.uint8)
    if len(v) % h:
        raise ValueError("length is not a multiple of h")
    k = len(v) // h
    return np.array([tower.compose(v[j * h:(j + 1) * h]) for j in range(k)],
                    dtype=np.uint8)


def field_reduce(tower: FieldTower, obj) -> SubspacePG:
    """Field reduction: a point (or subspace) of PG(k-1, q^h) as an F_q-subspace.

    A point with coordinate vector w maps to the (h-1)-subspace of
    PG(kh-1, q) spanned by the expansions of eps_i * w.
    """
    top, mid = tower.top, tower.mid
    if isinstance(obj, SubspacePG):
        if obj.field is not top:
            raise ValueError("subspace is not over the top field")
        rows_top = [row for row in obj.mat]
    else:
        w = np.asarray(obj, dtype=np.uint8)
        if w.ndim != 1 or not w.any():
            raise ValueError("a projective point needs a nonzero vector")
        rows_top = [w]
    rows = []
    for b in rows_top:
        for eps in tower.basis:
            scaled = [top.mul(eps, int(x)) for x in b]
            rows.append(expand_vector(tower, scaled))
    return SubspacePG.from_matrix(mid, np.array(rows, dtype=np.uint8))


def field_reduce_inverse(tower: FieldTower, sub: SubspacePG) -> tuple:
    """The PG(k-1, q^h) point mapping to sub, or FieldError if none does."""
    if sub.vdim != tower.h:
        raise FieldError("subspace dimension does not match the tower")
    w = compress_vector(tower, sub.mat[0])
    lead = int(w[np.nonzero(w)[0][0]])
    w = np.array([tower.top.div(int(x), lead) for x in w], dtype=np.uint8)
    if field_reduce(tower, w) != sub:
        raise FieldError("subspace is not an element of the standard spread")
    return tuple(int(x) for x in w)
