"""Classification of subspace arcs up to collineations, and lifting.

Arcs are grown breadth-first from the empty set.  Each equivalence class of
size-s arcs is stored as its minimal-image representative together with the
order and generators of its setwise stabilizer.  Extending a representative
enumerates one candidate per stabilizer orbit on the valid extensions,
canonicalizes every candidate, then sorts the canonical forms and keeps first
occurrences -- so the output is identical no matter how the per-representative
jobs were scheduled (ADDMDS_WORKERS > 1 forks a pool over representatives).

The database file is line-delimited JSON: one header object pinning the
universe (p, m, defining polynomial, ambient dimension, element dimension),
the group order and the id-enumeration version; one object per class
{size, rep, stab_order, stab_gens}, rep ascending, stab_gens as
[matrix rows, frobenius exponent] pairs; and one completion marker per
finished size.  Ids are positions in the universe's enumeration order, which
both ends must agree on -- hence the version field.  Saves write the whole
file through a temp file + rename, so interrupting a run leaves the last
finished size intact and a resumed run reproduces the same bytes.

lift_search answers whether a classified arc of k-1 blocks is the projection
of any arc one block up: an arc X of size n+1 in PG(kh-1, q) containing an
element x projects from x onto an arc of size n in PG((k-1)h-1, q), and every
such X can be moved so that x is the span of the last h coordinates and the
projection is the stored representative itself.  Lifts of the representative
then have bases [B_i | W_i] with W blocks free, and the first k of them can be
gauge-fixed to 0, .., 0, I; the remaining blocks are found by depth-first
search pruned by the rank conditions.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import linalg as la
from .arcs import arc_extensions, is_in_desarguesian_spread
from .gf import make_field
from .group import GroupContext, GroupElement, collineation

ENUM_VERSION = 1


class DatabaseError(ValueError):
    pass


@dataclass(frozen=True)
class OrbitRecord:
    size: int
    rep: tuple
    stab_order: int
    stab_gens: tuple  # of (matrix row-tuples, frobenius exponent)


def _serialize_gens(gens) -> tuple:
    out = []
    for g in gens:
        mat = tuple(tuple(int(x) for x in row) for row in g.mat)
        out.append((mat, int(g.frob)))
    return tuple(out)


def _deserialize_gens(universe, stab_gens) -> list[GroupElement]:
    return [collineation(universe, np.array(mat, dtype=np.uint8), int(frob))
            for mat, frob in stab_gens]


class OrbitDatabase:
    """Classified arc classes per size, with per-size completion markers."""

    def __init__(self, universe: la.SubspaceUniverse, group_order: int):
        self.universe = universe
        self.group_order = int(group_order)
        self.records: dict[int, list[OrbitRecord]] = {}
        self.completed: dict[int, int] = {}

    def header(self) -> dict:
        f = self.universe.field
        return {
            "kind": "header",
            "enum_version": ENUM_VERSION,
            "p": f.p,
            "m": f.m,
            "poly": list(f.poly),
            "n_vec": self.universe.n_vec,
            "r": self.universe.r,
            "group_order": self.group_order,
        }

    def add_size(self, size: int, recs: list[OrbitRecord]) -> None:
        recs = sorted(recs, key=lambda rec: rec.rep)
        for rec in recs:
            if rec.size != size or tuple(sorted(rec.rep)) != rec.rep:
                raise DatabaseError("malformed record")
        self.records[size] = recs
        self.completed[size] = len(recs)

    def counts(self) -> dict[int, int]:
        return dict(sorted(self.completed.items()))

    def max_complete(self) -> int:
        return max(self.completed, default=0)

    def dumps(self) -> str:
        lines = [json.dumps(self.header(), sort_keys=True)]
        for size in sorted(self.records):
            for rec in self.records[size]:
                lines.append(json.dumps({
                    "kind": "class",
                    "size": rec.size,
                    "rep": list(rec.rep),
                    "stab_order": rec.stab_order,
                    "stab_gens": [[list(map(list, mat)), frob]
                                  for mat, frob in rec.stab_gens],
                }, sort_keys=True))
            lines.append(json.dumps(
                {"kind": "complete", "size": size,
                 "count": self.completed[size]}, sort_keys=True))
        return "\n".join(lines) + "\n"

    def dump(self, path: str) -> None:
        d = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(self.dumps())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def loads(cls, text: str) -> "OrbitDatabase":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise DatabaseError("empty database")
        head = json.loads(lines[0])
        if head.get("kind") != "header":
            raise DatabaseError("first line is not a header")
        if head.get("enum_version") != ENUM_VERSION:
            raise DatabaseError(
                f"enumeration version {head.get('enum_version')} != {ENUM_VERSION}")
        field = make_field(head["p"], head["m"], head["poly"])
        uni = la.subspace_universe(field, head["n_vec"], head["r"])
        db = cls(uni, head["group_order"])
        pending: dict[int, list[OrbitRecord]] = {}
        for ln in lines[1:]:
            obj = json.loads(ln)
            if obj["kind"] == "class":
                rec = OrbitRecord(
                    size=int(obj["size"]),
                    rep=tuple(int(i) for i in obj["rep"]),
                    stab_order=int(obj["stab_order"]),
                    stab_gens=tuple(
                        (tuple(tuple(int(x) for x in row) for row in mat),
                         int(frob))
                        for mat, frob in obj["stab_gens"]),
                )
                pending.setdefault(rec.size, []).append(rec)
            elif obj["kind"] == "complete":
                size = int(obj["size"])
                recs = pending.pop(size, [])
                if len(recs) != int(obj["count"]):
                    raise DatabaseError(f"size {size}: marker count mismatch")
                db.add_size(size, recs)
            else:
                raise DatabaseError(f"unknown record kind {obj['kind']!r}")
        # classes of an unfinished size are dropped: not resumable mid-size
        return db

    @classmethod
    def load(cls, path: str) -> "OrbitDatabase":
        with open(path) as fh:
            return cls.loads(fh.read())

    def check_universe(self, universe: la.SubspaceUniverse,
                       group_order: int | None = None) -> None:
        mine = self.header()
        f = universe.field
        theirs = (f.p, f.m, list(f.poly), universe.n_vec, universe.r)
        ours = (mine["p"], mine["m"], mine["poly"], mine["n_vec"], mine["r"])
        if theirs != ours:
            raise DatabaseError(f"database is for {ours}, not {theirs}")
        if group_order is not None and group_order != self.group_order:
            raise DatabaseError("database group order disagrees")


# -- classification ---------------------------------------------------------------


def _stabilizer_orbit_reps(ctx: GroupContext, rep: tuple,
                           gens: list[GroupElement]) -> np.ndarray:
    """Minimal candidate per stabilizer orbit on the valid extensions."""
    cand = arc_extensions(ctx.uni, rep)
    if len(cand) == 0 or not gens:
        return cand
    # the stabilizer permutes the extension set, so work inside it
    perms = []
    for g in gens:
        img = np.array(ctx.apply_elt(g, cand), dtype=np.int64)
        pos = np.searchsorted(cand, img)
        if (cand[pos] != img).any():
            raise AssertionError("stabilizer does not preserve the extensions")
        perms.append(pos)
        perms.append(np.argsort(pos))
    labels = np.arange(len(cand))
    while True:
        before = labels
        for p in perms:
            labels = np.minimum(labels, labels[p])
        if np.array_equal(labels, before):
            break
    return cand[np.unique(labels)]


def _extension_canons(ctx: GroupContext, rep: tuple,
                      gens: list[GroupElement]) -> list[tuple]:
    out = []
    for y in _stabilizer_orbit_reps(ctx, rep, gens):
        out.append(ctx.minimal_image(tuple(sorted(rep + (int(y),)))))
    return out


_POOL_CTX: GroupContext | None = None


def _pool_init(p, m, poly, n_vec, r):
    global _POOL_CTX
    field = make_field(p, m, poly)
    _POOL_CTX = GroupContext(la.subspace_universe(field, n_vec, r))


def _pool_job(task):
    rep, gens_ser = task
    gens = _deserialize_gens(_POOL_CTX.uni, gens_ser)
    return _extension_canons(_POOL_CTX, rep, gens)


def _record_of(ctx: GroupContext, size: int, rep: tuple) -> OrbitRecord:
    stab = ctx.setwise_stabilizer(rep)
    return OrbitRecord(size=size, rep=rep, stab_order=stab.order,
                       stab_gens=_serialize_gens(stab.gens))


def classify(universe: la.SubspaceUniverse, max_size: int | None = None,
             db: OrbitDatabase | None = None, db_path: str | None = None,
             ctx: GroupContext | None = None, workers: int | None = None,
             log=None) -> OrbitDatabase:
    """Classify arcs of the universe's subspaces up to size max_size.

    Sizes already completed in db are reused verbatim (resume); newly
    finished sizes are flushed to db_path after each one.  Returns the
    database; db.counts() is the classes-per-size table.
    """
    if ctx is None:
        ctx = GroupContext(universe)
    if db is None and db_path is not None and os.path.exists(db_path):
        db = OrbitDatabase.load(db_path)
    if db is None:
        db = OrbitDatabase(universe, ctx.group_order)
    db.check_universe(universe, ctx.group_order)
    if workers is None:
        workers = int(os.environ.get("ADDMDS_WORKERS", "1"))

    if max_size is None:
        max_size = universe.points.count  # no arc is bigger than its point set

    pool = None
    try:
        size = 1
        reps: list[OrbitRecord] = []
        while size <= max_size:
            if size in db.completed:
                reps = db.records[size]
            elif size == 1:
                # the collineation group is transitive on subspaces
                if universe.count == 0:
                    db.add_size(1, [])
                else:
                    rep = ctx.minimal_image((0,))
                    if rep != (0,):
                        raise AssertionError("id 0 is not the minimal subspace")
                    db.add_size(1, [_record_of(ctx, 1, rep)])
                reps = db.records[1]
                if db_path:
                    db.dump(db_path)
            else:
                tasks = [(rec.rep,
                          _deserialize_gens(universe, rec.stab_gens))
                         for rec in reps]
                if workers > 1 and len(tasks) > 1:
                    if pool is None:
                        import multiprocessing as mp
                        f = universe.field
                        pool = mp.get_context("fork").Pool(
                            workers, _pool_init,
                            (f.p, f.m, f.poly, universe.n_vec, universe.r))
                    results = pool.map(
                        _pool_job,
                        [(rep, _serialize_gens(gens)) for rep, gens in tasks])
                else:
                    results = [_extension_canons(ctx, rep, gens)
                               for rep, gens in tasks]
                canons = sorted({c for chunk in results for c in chunk})
                recs = [_record_of(ctx, size, c) for c in canons]
                db.add_size(size, recs)
                reps = db.records[size]
                if db_path:
                    db.dump(db_path)
            if log:
                log(f"size {size}: {len(reps)} classes")
            if not reps:
                break
            size += 1
    finally:
        if pool is not None:
            pool.terminate()
    return db


def brute_force_classify(universe: la.SubspaceUniverse, max_size: int,
                         ctx: GroupContext | None = None) -> dict[int, int]:
    """Independent check: enumerate every arc, partition by group orbit.

    No minimal images and no stabilizers: orbits come from closing each arc
    under the generator permutations.  Only for small universes.
    """
    if universe.count > 400:
        raise ValueError(f"{universe.count} subspaces is past the brute-force budget")
    if max_size > 5:
        raise ValueError("brute force is capped at size 5")
    if ctx is None:
        ctx = GroupContext(universe)
    perms = [ctx.subspace_perm(g) for g in ctx.top.forest_gens]
    counts: dict[int, int] = {}
    layer = [()]
    for size in range(1, max_size + 1):
        nxt = []
        for a in layer:
            for y in arc_extensions(universe, a):
                if not a or y > a[-1]:
                    nxt.append(a + (int(y),))
        layer = nxt
        seen: set[tuple] = set()
        n_orbits = 0
        for a in layer:
            if a in seen:
                continue
            n_orbits += 1
            frontier = {a}
            while frontier:
                seen.update(frontier)
                frontier = {tuple(sorted(int(p[i]) for i in b))
                            for b in frontier for p in perms} - seen
        counts[size] = n_orbits
        if not layer:
            break
    return counts


def desarguesian_census(db: OrbitDatabase) -> dict[int, int]:
    """Per size, how many classes lie in a Desarguesian spread (are linear)."""
    out = {}
    for size in sorted(db.records):
        out[size] = sum(
            1 for rec in db.records[size]
            if is_in_desarguesian_spread(db.universe, rec.rep) is not None)
    return out


# -- lifting ----------------------------------------------------------------------


def _all_blocks(field, h: int) -> np.ndarray:
    """Every h x h matrix over the field, id-ordered."""
    q = field.order
    blocks = np.zeros((q ** (h * h), h, h), dtype=np.uint8)
    v = np.arange(q ** (h * h))
    for i in range(h):
        for j in range(h):
            blocks[:, i, j] = v % q
            v //= q
    return blocks


def lifts_of_arc(source_universe: la.SubspaceUniverse, source_ids,
                 max_results: int | None = None) -> list[np.ndarray]:
    """All arcs one block up that project onto this exact arc, gauge-fixed.

    Returns one (n+1, h, kh) basis stack per lift of an n-element arc: the n
    lifted elements in source order followed by the projection element (the
    span of the last h coordinates).  Gauge: the first k-1 lift blocks are 0
    and the k-th is the identity, which every lift can be moved to, so an
    empty result proves no arc of size n+1 in the larger space projects onto
    this class.
    """
    field = source_universe.field
    h = source_universe.r
    small_k = source_universe.n_vec // h
    k = small_k + 1
    ids = sorted(int(i) for i in source_ids)
    n = len(ids)
    if n < k:
        raise ValueError("need at least k elements below to gauge-fix a lift")
    B = source_universe.mats[ids]  # (n, h, (k-1)h)
    kh = k * h
    W = _all_blocks(field, h)  # candidate lift blocks
    nW = len(W)

    def lifted(i: int, w: np.ndarray) -> np.ndarray:
        m = np.zeros((h, kh), dtype=np.uint8)
        m[:, : kh - h] = B[i]
        m[:, kh - h:] = w
        return m

    fixed = [lifted(i, np.zeros((h, h), np.uint8)) for i in range(k - 1)]
    fixed.append(lifted(k - 1, np.eye(h, dtype=np.uint8)))

    found: list[np.ndarray] = []
    proj_elt = np.zeros((h, kh), dtype=np.uint8)
    proj_elt[:, kh - h:] = np.eye(h, dtype=np.uint8)

    def descend(chosen: list[np.ndarray]):
        i = len(chosen)
        if i == n:
            found.append(np.stack(chosen + [proj_elt]))
            return
        # batch-filter the q^(h*h) candidates against every k-subset that
        # closes with element i; subsets through the projection element are
        # arc conditions downstairs and hold already
        alive = np.ones(nW, dtype=bool)
        cand = np.zeros((nW, kh, kh), dtype=np.uint8)
        cand[:, kh - h:, : kh - h] = B[i]
        for sub in combinations(range(i), k - 1):
            stack = np.concatenate([chosen[j] for j in sub])
            cand[:, : kh - h, :] = stack
            cand[:, kh - h:, kh - h:] = W
            _, ranks = la.rref_batch(field, cand[alive])
            alive[np.flatnonzero(alive)[ranks < kh]] = False
            if not alive.any():
                return
        for w in W[alive]:
            descend(chosen + [lifted(i, w)])
            if max_results is not None and len(found) >= max_results:
                return

    descend(fixed)
    return found


def lift_search(db: OrbitDatabase, size: int,
                max_results: int | None = None) -> dict[tuple, list[np.ndarray]]:
    """Lifts (one block up) of every classified class of the given size.

    Requires the source classification to be complete at that size.  The
    result maps each representative to its gauge-fixed lifts; all values
    empty means no arc of size+1 with one more block projects onto any of
    these classes.
    """
    if size not in db.completed:
        raise DatabaseError(
            f"size {size} is not classified to completion in this database")
    return {rec.rep: lifts_of_arc(db.universe, rec.rep, max_results)
            for rec in db.records[size]}
