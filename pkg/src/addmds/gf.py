"""Arithmetic in small finite fields and towers F_p < F_q < F_{q^h}.

Elements of GF(p^m) are integers in [0, p^m): the base-p digits of the code
are the coordinates over the polynomial basis {1, t, .., t^(m-1)}, where t is
the class of X modulo the defining polynomial.  The element t itself has code
p.  Polynomials are lists of F_p coefficients, lowest degree first, monic.

All arithmetic is table lookup.  Tables are numpy arrays indexed by element
codes so bulk operations vectorise; scalar helpers wrap the same tables.

Pinned defining polynomials (primitive, so t generates the multiplicative
group):

    F_4   X^2 + X + 1
    F_8   X^3 + X + 1
    F_9   X^2 + 2X + 2     (i.e. X^2 - X - 1: t^2 = t + 1)
    F_16  X^4 + X + 1

A FieldTower fixes compatible tables for F_p, F_q = F_{p^e} and the top field
F_{q^h} = F_{p^(e*h)}, an embedding of F_q into the top field (t_mid maps to
the smallest root of the mid polynomial), and the F_q-basis {1, T, .., T^(h-1)}
of the top field used by decompose/compose.
"""

from __future__ import annotations

import numpy as np


class FieldError(ValueError):
    """Bad field construction or use: non-prime p, reducible polynomial, .."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


# -- polynomial helpers over F_p (coefficient lists, lowest degree first) --

def _poly_trim(f):
    while len(f) > 1 and f[-1] == 0:
        f = f[:-1]
    return f


def _poly_mul(f, g, p):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return out


def _poly_mod(f, g, p):
    """Remainder of f by monic g."""
    f = list(f)
    dg = len(g) - 1
    while len(f) - 1 >= dg and any(f):
        f = _poly_trim(f)
        if len(f) - 1 < dg:
            break
        lead = f[-1]
        shift = len(f) - 1 - dg
        for i, b in enumerate(g):
            f[shift + i] = (f[shift + i] - lead * b) % p
        f = _poly_trim(f)
    return _poly_trim(f)


def _poly_str(f) -> str:
    terms = []
    for i in range(len(f) - 1, -1, -1):
        c = f[i]
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            x = "X" if i == 1 else f"X^{i}"
            terms.append(x if c == 1 else f"{c}{x}")
    return " + ".join(terms) if terms else "0"


def irreducible_factor(poly, p):
    """A nontrivial monic factor of poly over F_p, or None if irreducible."""
    m = len(poly) - 1
    for d in range(1, m // 2 + 1):
        for idx in range(p ** d):
            g = []
            v = idx
            for _ in range(d):
                g.append(v % p)
                v //= p
            g.append(1)
            if not any(_poly_mod(poly, g, p)):
                return g
    return None


# Defining polynomials the file formats and catalog pin down.
PINNED_POLYS = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 2): (2, 2, 1),
}


def default_poly(p: int, m: int):
    """The pinned defining polynomial, or the lex-first primitive one."""
    if m == 1:
        return (0, 1)
    if (p, m) in PINNED_POLYS:
        return PINNED_POLYS[(p, m)]
    for idx in range(p ** m):
        f = []
        v = idx
        for _ in range(m):
            f.append(v % p)
            v //= p
        f.append(1)
        if irreducible_factor(f, p) is None:
            fld = FieldTable(p, m, f)
            if fld.is_primitive:
                return tuple(f)
    raise FieldError(f"no primitive polynomial of degree {m} over F_{p}")


_FIELD_CACHE: dict = {}


class FieldTable:
    """Lookup-table arithmetic for GF(p^m)."""

    def __init__(self, p: int, m: int, poly):
        if not _is_prime(p):
            raise FieldError(f"p = {p} is not prime")
        poly = tuple(int(c) % p for c in poly)
        if len(poly) != m + 1 or poly[-1] != 1:
            raise FieldError(f"defining polynomial must be monic of degree {m}")
        if m > 1:
            factor = irreducible_factor(list(poly), p)
            if factor is not None:
                raise FieldError(
                    f"{_poly_str(list(poly))} is reducible over F_{p}: "
                    f"factor {_poly_str(factor)}"
                )
        self.p = p
        self.m = m
        self.order = p ** m
        self.poly = poly
        q = self.order
        # digits[x] = base-p digit expansion of code x
        codes = np.arange(q)
        digits = np.zeros((q, m), dtype=np.uint8)
        v = codes.copy()
        for i in range(m):
            digits[:, i] = v % p
            v //= p
        self._digits = digits
        weights = p ** np.arange(m)
        # addition is digitwise mod p
        d64 = digits.astype(np.int64)
        self.ADD = (((d64[:, None, :] + d64[None, :, :]) % p)
                    @ weights).astype(np.int32)
        self.NEG = (((p - d64) % p) @ weights).astype(np.int32)
        self.SUB = self.ADD[:, self.NEG]
        # multiplication via polynomial product mod poly
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            fa = [int(d) for d in digits[a]]
            for b in range(a, q):
                fb = [int(d) for d in digits[b]]
                r = _poly_mod(_poly_mul(fa, fb, p), list(poly), p)
                code = 0
                for i, c in enumerate(r):
                    code += c * (p ** i)
                mul[a, b] = code
                mul[b, a] = code
        self.MUL = mul.astype(np.int32)
        inv = np.zeros(q, dtype=np.int32)
        for a in range(1, q):
            hits = np.nonzero(self.MUL[a] == 1)[0]
            if len(hits) != 1:
                raise FieldError(f"no unique inverse for code {a}")
            inv[a] = hits[0]
        self.INV = inv
        # absolute Frobenius x -> x^p
        frb = np.arange(q, dtype=np.int32)
        for a in range(q):
            frb[a] = self.pow(a, p)
        self.FRB = frb

    # -- scalar operations --

    def add(self, a: int, b: int) -> int:
        return int(self.ADD[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.SUB[a, b])

    def neg(self, a: int) -> int:
        return int(self.NEG[a])

    def mul(self, a: int, b: int) -> int:
        return int(self.MUL[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("inverse of zero")
        return int(self.INV[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        r, base = 1, a
        while k:
            if k & 1:
                r = int(self.MUL[r, base])
            base = int(self.MUL[base, base])
            k >>= 1
        return r

    def digits(self, a: int):
        return tuple(int(d) for d in self._digits[a])

    def from_digits(self, ds) -> int:
        code = 0
        for i, d in enumerate(ds):
            code += (int(d) % self.p) * (self.p ** i)
        return code

    def element_order(self, a: int) -> int:
        if a == 0:
            raise FieldError("zero has no multiplicative order")
        k, x = 1, a
        while x != 1:
            x = int(self.MUL[x, a])
            k += 1
        return k

    @property
    def generator(self) -> int:
        """The class t of X; code p (only meaningful when m > 1)."""
        return self.p if self.m > 1 else 1

    @property
    def is_primitive(self) -> bool:
        """Whether t generates the multiplicative group."""
        if self.m == 1:
            return self.order == 2
        return self.element_order(self.generator) == self.order - 1

    def frobenius(self, a: int, times: int = 1) -> int:
        """a^(p^times)."""
        for _ in range(times % self.m if self.m > 1 else 1):
            a = int(self.FRB[a])
        return a

    def __repr__(self):
        return f"GF({self.p}^{self.m}, {_poly_str(list(self.poly))})"


def make_field(p: int, m: int, poly=None) -> FieldTable:
    """Field table for GF(p^m); tables are cached per defining polynomial."""
    if poly is None:
        poly = default_poly(p, m)
    key = (p, m, tuple(int(c) % p for c in poly))
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = FieldTable(p, m, poly)
    return _FIELD_CACHE[key]


_LEVELS = {"p": 0, "bottom": 0, "q": 1, "mid": 1, "top": 2, "qh": 2}


class FieldTower:
    """Compatible tables for F_p < F_q < F_{q^h} with a fixed embedding.

    q = p^e.  The embedding sends the mid generator to the smallest root of
    the mid polynomial inside the top field.  decompose/compose translate
    between top-field codes and h-vectors over F_q via the basis
    {1, T, .., T^(h-1)}, T the top-field generator.
    """

    def __init__(self, p: int, e: int, h: int, qpoly=None, top_poly=None):
        if e < 1 or h < 1:
            raise FieldError("tower degrees must be positive")
        self.p = p
        self.e = e
        self.h = h
        self.bottom = make_field(p, 1)
        self.mid = make_field(p, e, qpoly)
        self.top = make_field(p, e * h, top_poly)
        self.q = self.mid.order
        self.qh = self.top.order
        self._build_embedding()
        self._build_basis()

    def _build_embedding(self):
        top, mid, p = self.top, self.mid, self.p
        if self.e == 1:
            # prime subfield: codes 0..p-1 coincide in every table
            self.embed_q = np.arange(p, dtype=np.int32)
        else:
            root = None
            for x in range(top.order):
                acc = 0
                for c in reversed(mid.poly):
                    acc = top.add(top.mul(acc, x), c)
                if acc == 0:
                    root = x
                    break
            if root is None:
                raise FieldError("mid polynomial has no root in the top field")
            emb = np.zeros(mid.order, dtype=np.int32)
            for a in range(mid.order):
                acc = 0
                for i, d in enumerate(mid.digits(a)):
                    if d:
                        acc = top.add(acc, top.mul(d, top.pow(root, i)))
                emb[a] = acc
            self.embed_q = emb
        rev = {}
        for a in range(self.q):
            rev[int(self.embed_q[a])] = a
        self._unembed_q = rev

    def _build_basis(self):
        top, h, q = self.top, self.h, self.q
        if h == 1:
            eps = [1]
        else:
            T = top.generator
            eps = [top.pow(T, i) for i in range(h)]
        self.basis = tuple(eps)
        comp = np.zeros(q ** h, dtype=np.int32)
        for idx in range(q ** h):
            v, code = idx, 0
            for i in range(h):
                vi = v % q
                v //= q
                if vi:
                    code = top.add(code, top.mul(eps[i], int(self.embed_q[vi])))
            comp[idx] = code
        if len(set(comp.tolist())) != q ** h:
            raise FieldError("basis powers are not F_q-independent")
        self._compose = comp
        dec = np.zeros((q ** h, h), dtype=np.uint8)
        for idx in range(q ** h):
            v = idx
            for i in range(h):
                dec[comp[idx], i] = v % q
                v //= q
        self.DEC = dec

    # -- spec operations --

    def decompose(self, x: int):
        """h-vector of F_q codes with x = sum eps_i * embed(v_i)."""
        return tuple(int(d) for d in self.DEC[x])

    def compose(self, v) -> int:
        idx, w = 0, 1
        for vi in v:
            idx += int(vi) * w
            w *= self.q
        return int(self._compose[idx])

    def _pair(self, frm: str, to: str):
        try:
            i, j = _LEVELS[frm], _LEVELS[to]
        except KeyError as exc:
            raise FieldError(f"unknown tower level {exc}") from None
        if i <= j:
            raise FieldError(f"trace goes down the tower, not {frm} -> {to}")
        return i, j

    def trace(self, frm: str, to: str, x: int) -> int:
        """Relative trace: sum of x over the Frobenius orbit fixing the target."""
        i, j = self._pair(frm, to)
        fld = (self.bottom, self.mid, self.top)[i]
        sub_order = (self.p, self.q, self.qh)[j]
        ext = {(2, 1): self.h, (2, 0): self.e * self.h, (1, 0): self.e}[(i, j)]
        acc, y = 0, x
        for _ in range(ext):
            acc = fld.add(acc, y)
            y = fld.pow(y, sub_order)
        if i == 2 and j == 1:
            if acc not in self._unembed_q:
                raise FieldError("trace image missed the subfield")
            return self._unembed_q[acc]
        if acc >= self.p:
            raise FieldError("trace image missed the prime field")
        return acc

    def frobenius(self, x: int, times: int = 1) -> int:
        """Relative Frobenius x -> x^(q^times) on the top field (fixes F_q)."""
        return self.top.pow(x, self.q ** (times % self.h if self.h > 1 else 1))

    def embed(self, a: int) -> int:
        """F_q code -> top-field code."""
        return int(self.embed_q[a])

    def in_subfield(self, x: int) -> bool:
        return x in self._unembed_q

    def unembed(self, x: int) -> int:
        if x not in self._unembed_q:
            raise FieldError(f"top-field code {x} is not in the embedded F_{self.q}")
        return self._unembed_q[x]

    def __repr__(self):
        return f"Tower(F_{self.p} < F_{self.q} < F_{self.qh})"


_TOWER_CACHE: dict = {}


def make_tower(p: int, e: int, h: int, qpoly=None, top_poly=None) -> FieldTower:
    # resolve defaults before keying so explicit-but-default polynomials
    # (e.g. from a parsed file) share the cached tower object
    qp = (tuple(int(c) % p for c in qpoly) if qpoly is not None
          else default_poly(p, e))
    tp = (tuple(int(c) % p for c in top_poly) if top_poly is not None
          else default_poly(p, e * h))
    key = (p, e, h, qp, tp)
    if key not in _TOWER_CACHE:
        _TOWER_CACHE[key] = FieldTower(p, e, h, qp, tp)
    return _TOWER_CACHE[key]


# module-level wrappers for the tower operations

def trace(tower: FieldTower, frm: str, to: str, x: int) -> int:
    return tower.trace(frm, to, x)


def decompose(tower: FieldTower, x: int):
    return tower.decompose(x)


def compose(tower: FieldTower, v) -> int:
    return tower.compose(v)


def frobenius(tower: FieldTower, x: int, times: int = 1) -> int:
    return tower.frobenius(x, times)
