"""Interior Weyl groups of leaves and the Weyl group of a fission tree."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .budget import check_budget
from .fission_trees import (
    AutGroup,
    Entry,
    FissionError,
    FissionTree,
    InvariantViolation,
    PointedType,
    automorphisms,
)
from .level_data import ram_of
from .puiseux_core import INF, is_special_sequence

__all__ = [
    "InteriorWeyl",
    "PairConstraint",
    "TreeWeylElement",
    "TreeWeylGroup",
    "interior_weyl",
    "pair_constraints",
    "tree_weyl_group",
    "act",
    "sign_parity",
]


@dataclass(frozen=True)
class InteriorWeyl:
    """Z/r, optionally times a sign group; ``kind`` records which case applies."""

    leaf: int
    r: int
    has_sign: bool
    kind: str  # "nonspecial", "special", "empty", "A"

    @property
    def order(self) -> int:
        return self.r * (2 if self.has_sign else 1)

    def elements(self) -> list[tuple[int, int]]:
        signs = (1, -1) if self.has_sign else (1,)
        return [(d, e) for d in range(self.r) for e in signs]

    def to_json(self) -> dict:
        return {"leaf": self.leaf, "r": self.r, "hasSign": self.has_sign, "kind": self.kind, "order": self.order}


def interior_weyl(T: FissionTree, leaf: int) -> InteriorWeyl:
    info = T.leaf_info[leaf]
    datum = info.datum
    if T.case == "A":
        return InteriorWeyl(leaf, datum.ram, False, "A")
    if datum.empty:
        if T.case == "D":
            return InteriorWeyl(leaf, 1, True, "empty")
        return InteriorWeyl(leaf, 1, False, "empty")
    if datum.special:
        return InteriorWeyl(leaf, datum.ram, False, "special")
    return InteriorWeyl(leaf, datum.ram, True, "nonspecial")


@dataclass(frozen=True)
class PairConstraint:
    """Leaves i < j whose branches share a nonzero truncation of ramification r."""

    i: int
    j: int
    r: int
    special: bool

    def allows(self, wi: tuple[int, int], wj: tuple[int, int], literal: bool = False) -> bool:
        (di, ei), (dj, ej) = wi, wj
        diff = (di - dj) % self.r
        if ei * ej == 1:
            return diff == 0
        # the sign product is -1, so zeta_r^(di - dj) must be -1
        if self.r % 2 or diff != self.r // 2:
            return False
        return literal or self.special


def pair_constraints(T: FissionTree) -> list[PairConstraint]:
    out = []
    for i, j in itertools.combinations(T.labels, 2):
        v = T.vertex(T.meeting_vertex(i, j))
        if v.height == INF:
            continue
        h = Fraction(v.height)
        above_i = [k for k in T.leaf_info[i].datum.levels if k >= h]
        above_j = [k for k in T.leaf_info[j].datum.levels if k >= h]
        if not above_i:
            continue
        if above_i != above_j:
            raise InvariantViolation(f"leaves {i} and {j} disagree above their meeting vertex")
        r = ram_of(above_i)
        special = T.case != "A" and is_special_sequence(k.denominator for k in above_i)
        out.append(PairConstraint(i, j, r, special))
    return out


def sign_parity(T: FissionTree, w: InteriorWeyl, d: int, e: int) -> int:
    """Parity of the number of sign changes produced by (d, e) on a leaf's coordinates."""
    mult = T.leaf_info[w.leaf].mult
    if w.kind == "nonspecial":
        return e ** (w.r * mult)
    if w.kind == "special":
        return (-1) ** (d * mult)
    return e


@dataclass(frozen=True)
class TreeWeylElement:
    perm: tuple[tuple[int, int], ...]  # (leaf, image leaf)
    inner: tuple[tuple[int, int, int], ...]  # (leaf, d, epsilon)

    @property
    def perm_map(self) -> dict[int, int]:
        return dict(self.perm)

    @property
    def inner_map(self) -> dict[int, tuple[int, int]]:
        return {lab: (d, e) for lab, d, e in self.inner}

    def is_identity(self) -> bool:
        return all(a == b for a, b in self.perm) and all(d == 0 and e == 1 for _, d, e in self.inner)


@dataclass(frozen=True)
class TreeWeylGroup:
    case: str
    labels: tuple[int, ...]
    interior: tuple[InteriorWeyl, ...]
    constraints: tuple[PairConstraint, ...]
    aut: AutGroup
    inner_elements: tuple[tuple[tuple[int, int], ...], ...]
    literal: bool = False

    @property
    def order(self) -> int:
        return self.aut.order * len(self.inner_elements)

    def elements(self) -> Iterator[TreeWeylElement]:
        for sigma in self.aut.elements:
            perm = tuple(sorted(sigma.items()))
            for inner in self.inner_elements:
                yield TreeWeylElement(perm, tuple((lab, d, e) for lab, (d, e) in zip(self.labels, inner)))

    def identity(self) -> TreeWeylElement:
        return TreeWeylElement(tuple((b, b) for b in self.labels), tuple((b, 0, 1) for b in self.labels))

    def to_json(self, max_elements: int = 64) -> dict:
        inner = [[list(w) for w in t] for t in self.inner_elements[:max_elements]]
        return {
            "case": self.case,
            "order": self.order,
            "autOrder": self.aut.order,
            "innerOrder": len(self.inner_elements),
            "autGenerators": [{str(k): v for k, v in sorted(g.items())} for g in self.aut.generators],
            "interior": [w.to_json() for w in self.interior],
            "constraints": [{"leaves": [c.i, c.j], "r": c.r, "special": c.special} for c in self.constraints],
            "innerElements": inner,
            "innerElementsTruncated": len(self.inner_elements) > max_elements,
            "literalPairRule": self.literal,
        }


def tree_weyl_group(T: FissionTree, budget: Optional[int] = None, literal: bool = False) -> TreeWeylGroup:
    """Aut(T) with the constraint-satisfying tuples of interior elements.

    ``literal`` lets a sign product -1 pair with a half-turn shift for any
    common part; by default this needs a special common part.
    """
    labels = tuple(T.labels)
    interior = tuple(interior_weyl(T, b) for b in labels)
    size = 1
    for w in interior:
        size *= w.order
    check_budget(size, budget, "product of interior Weyl groups")
    cons = tuple(pair_constraints(T))
    pos = {b: n for n, b in enumerate(labels)}
    by_last: dict[int, list[PairConstraint]] = {}
    for c in cons:
        by_last.setdefault(max(pos[c.i], pos[c.j]), []).append(c)
    options = [w.elements() for w in interior]
    found: list[tuple] = []

    def extend(prefix: list):
        n = len(prefix)
        if n == len(labels):
            if T.case == "D":
                acc = 1
                for w, (d, e) in zip(interior, prefix):
                    acc *= sign_parity(T, w, d, e)
                if acc != 1:
                    return
            found.append(tuple(prefix))
            return
        for x in options[n]:
            ok = True
            for c in by_last.get(n, ()):
                a, b = pos[c.i], pos[c.j]
                wa = x if a == n else prefix[a]
                wb = x if b == n else prefix[b]
                if not c.allows(wa, wb, literal):
                    ok = False
                    break
            if ok:
                prefix.append(x)
                extend(prefix)
                prefix.pop()

    extend([])
    return TreeWeylGroup(T.case, labels, interior, cons, automorphisms(T), tuple(found), literal)


def act(G: TreeWeylGroup, g: TreeWeylElement, pt: PointedType) -> PointedType:
    """Permute entries by the automorphism and twist each factor by its interior element."""
    if len(pt.entries) != len(G.labels) or pt.case != G.case:
        raise FissionError("element and pointed type do not match")
    sigma = g.perm_map
    inner = g.inner_map
    out: list[Optional[Entry]] = [None] * len(G.labels)
    pos = {b: n for n, b in enumerate(G.labels)}
    for b in G.labels:
        e = pt.entries[pos[b]]
        d, eps = inner[b]
        q = e.factor.conjugate(d)
        if eps == -1:
            q = -q
        out[pos[sigma[b]]] = Entry(e.mult, q, e.sign)
    return PointedType(pt.case, tuple(out))
