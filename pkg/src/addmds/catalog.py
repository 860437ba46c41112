"""Reference additive MDS codes that are not equivalent to linear codes.

For each of the orders 8, 9 and 16 this module carries the longest known
additive MDS code that is not semilinearly equivalent to a linear code, as an
explicit generator matrix together with the properties a verification run is
expected to confirm.  Generators are stored as their F_q-expansions (h columns
per code coordinate, coefficients over the basis {1, T, .., T^(h-1)}) because
that is the form in which they are usually quoted; code_of compresses them
back to top-field matrices.

Element notation inside the expansions: entries are F_q codes, so over F_4
the generator e (e^2 = e + 1) is 2 and e^2 is 3.
"""

from dataclasses import dataclass, field

import numpy as np

from .codes import AdditiveCode
from .gf import FieldTower, make_tower


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    p: int
    e: int
    h: int
    expansion: tuple  # kh rows of nh F_q codes
    expected: dict = field(default_factory=dict)

    def tower(self) -> FieldTower:
        return make_tower(self.p, self.e, self.h)

    def code(self) -> AdditiveCode:
        tw = self.tower()
        exp = np.array(self.expansion, dtype=np.uint8)
        kh, nh = exp.shape
        n = nh // self.h
        G = np.zeros((kh, n), dtype=np.uint8)
        for r in range(kh):
            for j in range(n):
                G[r, j] = tw.compose(exp[r, j * self.h:(j + 1) * self.h])
        return AdditiveCode(tw, G)


# (6, 8^3, 4) over F_8, linear over F_2: the unique longest additive MDS code
# over F_8 not equivalent to a linear one.  Equivalent to its own dual.
_F8 = CatalogEntry(
    name="nonlinear-6-over-8",
    p=2, e=1, h=3,
    expansion=(
        (1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0),
        (0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0),
        (0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1),
        (0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 1, 1, 1, 0),
        (0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1, 1),
        (0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 1, 1, 0, 1, 0, 0),
        (0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 1),
        (0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 1, 1, 1, 1),
        (0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 1, 0, 1, 0, 1, 0),
    ),
    expected={
        "n": 6, "k": 3, "d": 4, "mds": True,
        "linear_over_top": False, "desarguesian": False,
        "dual_params": (6, 8 ** 3, 4),
    },
)

# (8, 9^3, 6) over F_9, linear over F_3: unique longest additive MDS code over
# F_9 not equivalent to a linear one.  Isotropic for the alternating form, so
# it carries an [[8, 2, 4]]_3 quantum code.
_F9 = CatalogEntry(
    name="nonlinear-8-over-9",
    p=3, e=1, h=2,
    expansion=(
        (1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0),
        (0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1),
        (0, 0, 1, 0, 0, 0, 1, 0, 2, 2, 0, 2, 2, 0, 1, 2),
        (0, 0, 0, 1, 0, 0, 0, 1, 0, 2, 1, 1, 1, 2, 1, 0),
        (0, 0, 0, 0, 1, 0, 1, 0, 0, 1, 2, 0, 1, 1, 2, 1),
        (0, 0, 0, 0, 0, 1, 0, 1, 2, 1, 2, 2, 2, 0, 0, 2),
    ),
    expected={
        "n": 8, "k": 3, "d": 6, "mds": True,
        "linear_over_top": False, "desarguesian": False,
        "self_orthogonal": True, "quantum": (8, 2, 4),
        "dual_params": (8, 9 ** 5, 4),
    },
)

# (11, 16^3, 9) over F_16, linear over F_4: unique longest additive MDS code
# over F_16 not equivalent to a linear one (e = F_4 generator, code 2).
_F16 = CatalogEntry(
    name="nonlinear-11-over-16",
    p=2, e=2, h=2,
    expansion=(
        (1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0),
        (0, 1, 0, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1),
        (0, 0, 1, 0, 0, 0, 1, 0, 0, 2, 1, 3, 1, 1, 0, 1, 2, 3, 2, 1, 2, 2),
        (0, 0, 0, 1, 0, 0, 0, 1, 2, 3, 2, 0, 3, 1, 1, 3, 3, 3, 0, 2, 2, 1),
        (0, 0, 0, 0, 1, 0, 1, 0, 1, 2, 2, 2, 3, 0, 0, 2, 0, 1, 2, 3, 2, 1),
        (0, 0, 0, 0, 0, 1, 0, 1, 2, 0, 0, 2, 1, 2, 2, 3, 1, 3, 2, 2, 1, 1),
    ),
    expected={
        "n": 11, "k": 3, "d": 9, "mds": True,
        "linear_over_top": False, "desarguesian": False,
        "dual_params": (11, 16 ** 8, 4),
    },
)

CATALOG = {entry.name: entry for entry in (_F8, _F9, _F16)}


def get(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; "
                       f"have {sorted(CATALOG)}") from None
