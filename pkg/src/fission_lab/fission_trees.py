"""Pointed types, fission exponents, fission trees and their realizations."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .cyclotomic import Cyc, as_cyc, lcm
from .level_data import (
    LevelDatum,
    admissible_exponents,
    expected_sign,
    good_breakings,
    level_datum_A,
    level_datum_BC,
    level_datum_D,
    ram_of,
)
from .puiseux_core import (
    INF,
    ExpFactor,
    canonical_representative,
    format_exponent,
    is_special_sequence,
    same_circle,
    truncate,
)

__all__ = [
    "Entry",
    "PointedType",
    "FissionError",
    "IncompatibleError",
    "InvariantViolation",
    "common_part",
    "fission_distinct",
    "fission_distinct_oracle",
    "special_fission_power",
    "global_sign",
    "enhance",
    "Vertex",
    "FissionTree",
    "build_tree",
    "tree_iso",
    "AutGroup",
    "automorphisms",
    "is_realization",
    "sample_realization",
    "random_realization",
    "realize",
]

CASES = ("A", "BC", "D")
EDGE_RANK = {"E": 0, "HE": 1, "S": 2, "NS": 3}
ADMISSIBLE_KINDS = ("mandatory", "inconsequential")


class FissionError(ValueError):
    pass


class IncompatibleError(FissionError):
    pass


class InvariantViolation(AssertionError):
    pass


def _signed(case: str) -> bool:
    return case != "A"


# pointed types --------------------------------------------------------------


@dataclass(frozen=True)
class Entry:
    mult: int
    factor: ExpFactor
    sign: int = 1

    def __post_init__(self):
        if self.mult < 1:
            raise FissionError("multiplicities are positive integers")
        if self.sign not in (1, -1):
            raise FissionError("signs are +1 or -1")


@dataclass(frozen=True)
class PointedType:
    """An ordered list of (multiplicity, factor[, sign]) with pairwise distinct circles."""

    case: str
    entries: tuple[Entry, ...]

    def __post_init__(self):
        if self.case not in CASES:
            raise FissionError(f"unknown case {self.case!r}")
        if not self.entries:
            raise FissionError("a pointed type has at least one entry")
        signed = _signed(self.case)
        for (i, a), (j, b) in itertools.combinations(enumerate(self.entries), 2):
            if same_circle(a.factor, b.factor, signed):
                raise FissionError(f"entries {i + 1} and {j + 1} lie in the same circle")
        for a, b in itertools.combinations(self.entries, 2):
            common_part(a.factor, b.factor, self.case)
        if self.case == "D":
            for e in self.entries:
                forced = expected_sign(e.mult, e.factor)
                if forced is not None and forced != e.sign:
                    raise FissionError(f"sign {e.sign} inconsistent with ({e.mult}, {e.factor!r})")

    @classmethod
    def make(cls, case: str, entries: Iterable) -> "PointedType":
        out = []
        for e in entries:
            if isinstance(e, Entry):
                out.append(e)
            else:
                out.append(Entry(*e))
        return cls(case, tuple(out))

    @property
    def rank(self) -> int:
        return sum(entry_rank(self.case, e) for e in self.entries)

    @property
    def katz_rank(self) -> Fraction:
        return max(e.factor.slope for e in self.entries)

    @property
    def ram(self) -> int:
        return lcm(*(e.factor.ram for e in self.entries))

    @property
    def global_sign(self) -> int:
        out = 1
        for e in self.entries:
            out *= e.sign
        return out


def entry_rank(case: str, e: Entry) -> int:
    q = e.factor
    if q.is_zero():
        return e.mult
    if case != "A" and is_special_sequence(q.denominators):
        # special multiplicities are stored doubled
        return e.mult * q.ram // 2
    return e.mult * q.ram


# common parts and fission ---------------------------------------------------


def common_part(q: ExpFactor, other: ExpFactor, case: str = "BC") -> tuple[ExpFactor, Fraction, int]:
    """(q_c, f, N): shared truncation, fission exponent, partial ramification."""
    if q == other:
        return q, Fraction(0), 1
    signed = _signed(case)
    heights = sorted(set(q.exponents) | set(other.exponents), reverse=True)
    f = None
    for e in heights:
        if not same_circle(truncate(q, e), truncate(other, e), signed):
            f = e
            break
    if f is None:
        raise IncompatibleError("distinct factors with equal circles")
    above = [e for e in heights if e > f]
    qc = ExpFactor(tuple(t for t in q.terms if t[0] > f))
    oc = ExpFactor(tuple(t for t in other.terms if t[0] > f))
    if qc != oc:
        raise IncompatibleError(
            f"truncations above {f} lie in one circle but differ: {qc!r} vs {oc!r}"
        )
    del above
    r = qc.ram
    return qc, f, lcm(r, f.denominator) // r


def fission_distinct_oracle(qc: ExpFactor, a, b, k, case: str = "BC") -> bool:
    """Direct circle comparison of qc + a z^-k and qc + b z^-k."""
    k = Fraction(k)
    q = qc + ExpFactor.monomial(as_cyc(a), k)
    p = qc + ExpFactor.monomial(as_cyc(b), k)
    return not same_circle(q, p, _signed(case))


def fission_distinct(qc: ExpFactor, a, b, k, case: str = "BC", literal: bool = False) -> bool:
    """Whether qc + a z^-k and qc + b z^-k split exactly at height k (case table).

    ``literal`` uses a^N (N odd) / a^2N (N even) for a special common part
    with N > 1; the default uses the multiplier group, which agrees with
    direct circle comparison.
    """
    a, b = as_cyc(a), as_cyc(b)
    k = Fraction(k)
    if any(e <= k for e in qc.exponents):
        raise FissionError("all exponents of the common part must exceed k")
    rc = qc.ram
    N = lcm(rc, k.denominator) // rc
    if case == "A":
        return a ** N != b ** N
    if case == "D" and qc.is_zero() and (2 * k).denominator == 1:
        return a != b and a != -b
    if qc.is_zero():
        if a.is_zero() != b.is_zero():
            return True
        if a.is_zero():
            return False
        e = N if N % 2 == 0 else 2 * N
        return a ** e != b ** e
    inc = admissible_exponents(level_datum_BC(qc))[1]
    if k in inc:
        return a != b
    if a.is_zero() != b.is_zero():
        return True
    if a.is_zero():
        return False
    if not is_special_sequence(qc.denominators):
        return a ** N != b ** N
    if N == 1:
        if k in good_breakings(qc.exponents):
            return a != b and a != -b
        return False
    if literal:
        e = N if N % 2 == 1 else 2 * N
    else:
        e = special_fission_power(rc, k)
    return a ** e != b ** e


def special_fission_power(rc: int, k: Fraction) -> int:
    """Order of the group of multipliers on a z^-k fixing a special common part up to sign.

    Conjugations fixing q_c give the N-th roots of unity; the one negating
    q_c multiplies a by -zeta_d^(n rc/2), with n/d = k.
    """
    k = Fraction(k)
    d, n = k.denominator, k.numerator
    N = lcm(rc, d) // rc
    w = -Cyc.root(d, n * rc // 2)
    return lcm(N, w.root_of_unity_order())


# type D signs ----------------------------------------------------------------


def _entries_list(entries) -> list[Entry]:
    if isinstance(entries, PointedType):
        return list(entries.entries)
    return [e if isinstance(e, Entry) else Entry(*e) for e in entries]


def global_sign(entries) -> int:
    """Product of forced enhancement signs; tame entries never force a sign."""
    out = 1
    for e in _entries_list(entries):
        s = expected_sign(e.mult, e.factor)
        if s is not None:
            out *= s
    return out


@dataclass(frozen=True)
class EnhancementResult:
    ok: bool
    signs: tuple[int, ...]
    global_sign: int
    pointed: Optional[PointedType]


def enhance(entries) -> EnhancementResult:
    """Attach the unique sign vector; a tame entry absorbs the global sign."""
    ents = _entries_list(entries)
    signs = []
    for e in ents:
        s = expected_sign(e.mult, e.factor)
        signs.append(1 if s is None else s)
    g = 1
    for s in signs:
        g *= s
    tame = [i for i, e in enumerate(ents) if e.factor.is_zero()]
    if g == -1 and tame:
        signs[tame[0]] = -1
        g = 1
    new = [Entry(e.mult, e.factor, s) for e, s in zip(ents, signs)]
    ok = g == 1
    pointed = None
    if ok:
        try:
            pointed = PointedType("D", tuple(new))
        except FissionError:
            pointed = None
    return EnhancementResult(ok, tuple(signs), global_sign(ents) if not tame else g, pointed)


# trees -----------------------------------------------------------------------


@dataclass
class Vertex:
    id: int
    height: object
    kind: str  # root, leaf, mandatory, inconsequential, empty, hybridation
    parent: Optional[int]
    edge: Optional[str]  # type of the edge to the parent
    branches: tuple[int, ...]
    ram: int = 1  # ramification of the truncation at this vertex
    partial: int = 1  # partial ramification relative to the parent
    children: list[int] = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        return self.kind in ADMISSIBLE_KINDS


@dataclass(frozen=True)
class LeafInfo:
    mult: int
    datum: LevelDatum
    sign: int
    special: bool
    tame: bool
    hybrid_height: object = None


def _hkey(h) -> tuple:
    return (1, Fraction(0)) if h == INF else (0, Fraction(h))


@dataclass
class FissionTree:
    case: str
    vertices: list[Vertex]
    root: int
    leaves: dict[int, int]  # branch label -> leaf vertex id
    leaf_info: dict[int, LeafInfo]
    fission: dict[tuple[int, int], Fraction]
    labelled: bool = True

    # navigation ----------------------------------------------------------

    def vertex(self, vid: int) -> Vertex:
        return self.vertices[vid]

    @property
    def labels(self) -> list[int]:
        return sorted(self.leaves)

    def admissible(self) -> list[int]:
        return [v.id for v in self.vertices if v.admissible]

    def mandatory(self) -> list[int]:
        return [v.id for v in self.vertices if v.kind == "mandatory"]

    def inconsequential(self) -> list[int]:
        return [v.id for v in self.vertices if v.kind == "inconsequential"]

    def path(self, label: int) -> list[int]:
        """Vertex ids from the leaf of ``label`` up to the root."""
        out, v = [], self.leaves[label]
        while v is not None:
            out.append(v)
            v = self.vertices[v].parent
        return out

    def meeting_vertex(self, i: int, j: int) -> int:
        pi = self.path(i)
        pj = set(self.path(j))
        for v in pi:
            if v in pj:
                return v
        raise InvariantViolation("branches without a common ancestor")

    def leaf_labels_under(self, vid: int) -> list[int]:
        return sorted(b for b in self.vertices[vid].branches)

    # canonical forms -----------------------------------------------------

    def _key(self, vid: int, labelled: bool) -> tuple:
        v = self.vertices[vid]
        leaf = ()
        if v.kind == "leaf":
            (b,) = v.branches
            info = self.leaf_info[b]
            leaf = (info.mult, info.datum.flavour, info.sign if self.case == "D" else 1)
            if labelled:
                leaf = leaf + (b,)
        kids = tuple(sorted(self._sort_key(c, labelled) for c in v.children))
        return (_hkey(v.height), v.kind, v.edge or "", v.partial, leaf, kids)

    def _first_mandatory(self, vid: int) -> tuple:
        stack, best = [vid], None
        while stack:
            u = self.vertices[stack.pop()]
            if u.kind == "mandatory" and (best is None or _hkey(u.height) > best):
                best = _hkey(u.height)
            stack.extend(u.children)
        return best or (0, Fraction(0))

    def _sort_key(self, vid: int, labelled: bool) -> tuple:
        v = self.vertices[vid]
        mults = tuple(sorted(self.leaf_info[b].mult for b in v.branches))
        return (
            self._first_mandatory(vid),
            EDGE_RANK.get(v.edge or "", 9),
            mults,
            self._key(vid, labelled),
        )

    def canonical_key(self, labelled: Optional[bool] = None) -> tuple:
        return self._key(self.root, self.labelled if labelled is None else labelled)

    def ordered_children(self, vid: int) -> list[int]:
        v = self.vertices[vid]
        return sorted(v.children, key=lambda c: self._sort_key(c, False))

    def canonical_leaf_order(self, vid: int) -> list[int]:
        v = self.vertices[vid]
        if v.kind == "leaf":
            return list(v.branches)
        out = []
        for c in self.ordered_children(vid):
            out.extend(self.canonical_leaf_order(c))
        return out

    # reports ----------------------------------------------------------------

    def to_json(self) -> dict:
        verts = []
        for v in self.vertices:
            verts.append(
                {
                    "id": v.id,
                    "height": format_exponent(v.height),
                    "kind": v.kind,
                    "parent": v.parent,
                    "edge": v.edge,
                    "branches": list(v.branches),
                    "ram": v.ram,
                    "partial": v.partial,
                }
            )
        leaves = []
        for b in self.labels:
            info = self.leaf_info[b]
            leaves.append(
                {
                    "label": b,
                    "vertex": self.leaves[b],
                    "mult": info.mult,
                    "levelDatum": info.datum.to_json(),
                    "sign": info.sign,
                }
            )
        return {
            "case": self.case,
            "vertices": verts,
            "leaves": leaves,
            "admissible": len(self.admissible()),
            "mandatory": len(self.mandatory()),
            "inconsequential": len(self.inconsequential()),
        }

    def to_dot(self, name: str = "fission_tree") -> str:
        shape = {
            "root": 'shape=square, style=filled, fillcolor=black, label=""',
            "mandatory": 'shape=circle, style=filled, fillcolor=black, label="", width=0.15',
            "inconsequential": 'shape=circle, label="", width=0.15',
            "empty": 'shape=point, label=""',
            "hybridation": 'shape=point, label=""',
        }
        style = {"E": "dotted", "HE": "dotted, penwidth=0.5", "S": "dashed", "NS": "solid"}
        lines = [f"graph {name} {{", "  rankdir=TB;"]
        for v in self.vertices:
            if v.kind == "leaf":
                (b,) = v.branches
                attrs = f'shape=plaintext, label="{b}"'
            else:
                attrs = shape[v.kind]
            lines.append(f'  v{v.id} [{attrs}, tooltip="h={format_exponent(v.height)}"];')
        for v in self.vertices:
            if v.parent is not None:
                lines.append(f"  v{v.parent} -- v{v.id} [style=\"{style[v.edge]}\"];")
        lines.append("}")
        return "\n".join(lines) + "\n"


# tree construction --------------------------------------------------------------


@dataclass
class _Branch:
    label: int
    datum: LevelDatum
    adm: frozenset
    levels: frozenset
    hybrid: bool
    hybrid_height: object = None

    def status(self, h) -> str:
        if self.hybrid:
            if h == self.hybrid_height:
                return "hybridation"
            return "inconsequential" if h in self.adm else "empty"
        if h in self.levels:
            return "mandatory"
        return "inconsequential" if h in self.adm else "empty"

    def edge_below(self, l, case: str) -> str:
        if self.hybrid:
            return "E" if l > self.hybrid_height else "HE"
        if not any(a >= l for a in self.adm):
            return "E"
        if case == "A":
            return "NS"
        above = [k for k in self.levels if k >= l]
        if not above:
            raise InvariantViolation("admissible heights above every level")
        return "S" if is_special_sequence(k.denominator for k in above) else "NS"

    def ram_at(self, l) -> int:
        if self.hybrid:
            return 1
        return ram_of(k for k in self.levels if k >= l)


def leaf_level_data(pt: PointedType) -> list[LevelDatum]:
    out = []
    for i, e in enumerate(pt.entries):
        if pt.case == "A":
            out.append(level_datum_A(e.factor))
        elif pt.case == "BC":
            out.append(level_datum_BC(e.factor))
        else:
            isolated = all(
                common_part(e.factor, o.factor, "D")[0].is_zero()
                for j, o in enumerate(pt.entries)
                if j != i
            )
            out.append(level_datum_D(e.mult, e.factor, e.sign, isolated))
    return out


def build_tree(pt: PointedType) -> FissionTree:
    if pt.case == "D" and pt.global_sign != 1:
        raise FissionError("type-D trees need an enhanced type with global sign +1")
    p = len(pt.entries)
    labels = list(range(1, p + 1))
    data = leaf_level_data(pt)
    K = pt.katz_rank
    branches: dict[int, _Branch] = {}
    for lab, datum in zip(labels, data):
        if datum.kind == "D" and datum.flavour == "EmptyD":
            adm, _ = admissible_exponents(datum, cutoff=K)
            branches[lab] = _Branch(lab, datum, adm, frozenset(), True)
        else:
            adm, _ = admissible_exponents(datum, cutoff=K)
            branches[lab] = _Branch(lab, datum, adm, frozenset(datum.levels), False)

    fission: dict[tuple[int, int], Fraction] = {}
    for i, j in itertools.combinations(labels, 2):
        f = common_part(pt.entries[i - 1].factor, pt.entries[j - 1].factor, pt.case)[1]
        fission[(i, j)] = fission[(j, i)] = f

    all_adm = sorted(set().union(*(b.adm for b in branches.values())))

    def succ(k):
        for a in all_adm:
            if a > k:
                return a
        return INF

    glue = {key: succ(f) for key, f in fission.items()}

    for b in branches.values():
        if b.hybrid:
            others = [glue[(b.label, j)] for j in labels if j != b.label]
            k = min(others) if others else INF
            b.hybrid_height = k
            b.adm = frozenset(a for a in b.adm if a < k)

    heights = {Fraction(0), INF}
    for b in branches.values():
        heights |= set(b.adm)
        if b.hybrid and b.hybrid_height != INF:
            heights.add(b.hybrid_height)
    heights = sorted(heights, key=_hkey, reverse=True)

    def linked(i, j, h):
        return i == j or h >= glue[(i, j)]

    vertices: list[Vertex] = []
    index: dict[tuple[int, object], int] = {}
    prev_classes: list[tuple[int, ...]] = []
    for h in heights:
        classes: list[list[int]] = []
        for lab in labels:
            for cl in classes:
                if linked(cl[0], lab, h):
                    cl.append(lab)
                    break
            else:
                classes.append([lab])
        for cl in classes:
            if any(not linked(a, b, h) for a, b in itertools.combinations(cl, 2)):
                raise InvariantViolation(f"gluing is not transitive at height {h}")
        for cl in classes:
            cl = tuple(cl)
            if h == INF:
                kind = "root"
            elif h == 0:
                kind = "leaf"
            else:
                stats = {branches[b].status(h) for b in cl}
                adm_stats = stats & set(ADMISSIBLE_KINDS)
                if len(adm_stats) > 1 or (adm_stats and len(stats) > 1):
                    raise InvariantViolation(f"branches {cl} disagree at height {h}: {stats}")
                if adm_stats:
                    kind = adm_stats.pop()
                elif "hybridation" in stats:
                    kind = "hybridation"
                else:
                    kind = "empty"
            parent = None
            edge = None
            if h != INF:
                parent_ids = {index[(b, prev_h)] for b in cl}
                if len(parent_ids) != 1:
                    raise InvariantViolation(f"class {cl} at {h} has several parents")
                parent = parent_ids.pop()
                edges = {branches[b].edge_below(prev_h, pt.case) for b in cl}
                if len(edges) != 1:
                    raise InvariantViolation(f"class {cl} at {h} has edge types {edges}")
                edge = edges.pop()
            rams = {branches[b].ram_at(h) for b in cl} if h != 0 else {1}
            if len(rams) != 1 and h != 0:
                raise InvariantViolation(f"class {cl} at {h} has ramifications {rams}")
            vid = len(vertices)
            v = Vertex(vid, h, kind, parent, edge, cl, ram=rams.pop() if h != 0 else 1)
            if parent is not None:
                R = vertices[parent].ram
                v.partial = lcm(R, Fraction(h).denominator) // R if h != 0 else 1
                vertices[parent].children.append(vid)
            vertices.append(v)
            for b in cl:
                index[(b, h)] = vid
        prev_h = h
        prev_classes = classes
    del prev_classes

    # leaves carry the ramification of the whole branch
    for lab in labels:
        leaf = vertices[index[(lab, Fraction(0))]]
        leaf.ram = branches[lab].ram_at(Fraction(0)) if not branches[lab].hybrid else 1

    leaf_info = {}
    for lab, e in zip(labels, pt.entries):
        d = data[lab - 1]
        special = d.special if not (d.kind == "D" and d.flavour != "none") else False
        leaf_info[lab] = LeafInfo(
            e.mult,
            d,
            e.sign,
            special,
            e.factor.is_zero(),
            branches[lab].hybrid_height if branches[lab].hybrid else None,
        )
    tree = FissionTree(
        pt.case,
        vertices,
        0,
        {lab: index[(lab, Fraction(0))] for lab in labels},
        leaf_info,
        {k: v for k, v in fission.items() if k[0] < k[1]},
    )
    check_tree(tree)
    return tree


def check_tree(T: FissionTree) -> None:
    """Structural invariants of a constructed tree."""
    roots = [v for v in T.vertices if v.parent is None]
    if len(roots) != 1 or roots[0].height != INF:
        raise InvariantViolation("exactly one root at infinity")
    for v in T.vertices:
        if v.parent is not None and not _hkey(T.vertices[v.parent].height) > _hkey(v.height):
            raise InvariantViolation("heights must increase toward the root")
        if v.kind == "leaf" and (v.height != 0 or v.children):
            raise InvariantViolation("leaves sit at height 0")
        if v.kind != "leaf":
            empties = [c for c in v.children if not T.vertices[c].admissible and T.vertices[c].kind != "leaf"]
            leaf_kids = [c for c in v.children if T.vertices[c].kind == "leaf"]
            if len(empties) > 1 and not leaf_kids:
                raise InvariantViolation(f"vertex {v.id} has several empty children")
    if T.case == "D":
        prod = 1
        for info in T.leaf_info.values():
            prod *= info.sign
            if info.datum.flavour == "EmptyD" and info.mult != 1:
                raise InvariantViolation("empty D leaves have multiplicity one")
            if info.datum.flavour == "EmptyBC" and info.mult < 2:
                raise InvariantViolation("empty BC leaves have multiplicity at least two")
        if prod != 1:
            raise InvariantViolation("leaf signs of a D tree multiply to +1")


# isomorphisms and automorphisms ----------------------------------------------------


def tree_iso(T: FissionTree, U: FissionTree, labelled: bool = False) -> bool:
    return T.case == U.case and T.canonical_key(labelled) == U.canonical_key(labelled)


@dataclass(frozen=True)
class AutGroup:
    order: int
    generators: tuple[dict, ...]
    elements: tuple[dict, ...]


def _subtree_autos(T: FissionTree, vid: int) -> list[dict]:
    v = T.vertices[vid]
    if v.kind == "leaf":
        (b,) = v.branches
        return [{b: b}]
    kids = T.ordered_children(vid)
    groups: dict[tuple, list[int]] = {}
    for c in kids:
        groups.setdefault(T.canonical_key_of(c), []).append(c)
    per_group = []
    for members in groups.values():
        orders = [T.canonical_leaf_order(c) for c in members]
        child_autos = [_subtree_autos(T, c) for c in members]
        options = []
        for perm in itertools.permutations(range(len(members))):
            for combo in itertools.product(*child_autos):
                g = {}
                for src, dst in enumerate(perm):
                    # first apply the child's own automorphism, then move the subtree
                    inner = combo[src]
                    pos = {lab: n for n, lab in enumerate(orders[src])}
                    for lab in orders[src]:
                        g[lab] = orders[dst][pos[inner[lab]]]
                options.append(g)
        per_group.append(options)
    out = []
    for combo in itertools.product(*per_group):
        g = {}
        for part in combo:
            g.update(part)
        out.append(g)
    return out


def _canonical_key_of(self: FissionTree, vid: int) -> tuple:
    return self._key(vid, False)


FissionTree.canonical_key_of = _canonical_key_of


def automorphisms(T: FissionTree, limit: int = 100000) -> AutGroup:
    """Leaf permutations preserving the unlabelled tree structure."""
    order = _aut_order(T, T.root)
    if order > limit:
        raise FissionError(f"automorphism group of order {order} exceeds the limit {limit}")
    elements = _subtree_autos(T, T.root)
    assert len(elements) == order
    gens = []
    for v in T.vertices:
        kids = T.ordered_children(v.id)
        groups: dict[tuple, list[int]] = {}
        for c in kids:
            groups.setdefault(T.canonical_key_of(c), []).append(c)
        for members in groups.values():
            for a, b in zip(members, members[1:]):
                la, lb = T.canonical_leaf_order(a), T.canonical_leaf_order(b)
                g = {lab: lab for lab in T.labels}
                for x, y in zip(la, lb):
                    g[x], g[y] = y, x
                gens.append(g)
    return AutGroup(order, tuple(gens), tuple(elements))


def _aut_order(T: FissionTree, vid: int) -> int:
    v = T.vertices[vid]
    if v.kind == "leaf":
        return 1
    out = 1
    counts: dict[tuple, int] = {}
    for c in v.children:
        k = T.canonical_key_of(c)
        counts[k] = counts.get(k, 0) + 1
        out *= _aut_order(T, c)
    for n in counts.values():
        for i in range(2, n + 1):
            out *= i
    return out


# realizations ----------------------------------------------------------------------


def _power_rule(edge: str, N: int, both_mandatory: bool, rc: int, k) -> tuple[int, bool]:
    """(exponent e, up_to_sign) such that siblings need distinct c^e (or c up to sign)."""
    if edge == "NS":
        return N, False
    if edge == "S":
        if N == 1 and both_mandatory:
            return 1, True
        if N == 1:
            return 1, False
        return special_fission_power(rc, k), False
    # E and HE
    return (N, False) if N % 2 == 0 else (2 * N, False)


def sibling_condition(T: FissionTree, u: Vertex, w: Vertex, cu: Cyc, cw: Cyc) -> bool:
    if T.case == "A":
        return cu ** u.partial != cw ** w.partial
    edges = {u.edge, w.edge}
    N = u.partial
    if N != w.partial:
        raise InvariantViolation("siblings with different partial ramification")
    if u.kind == w.kind == "inconsequential" and "HE" not in edges:
        return cu != cw
    edge = "E" if edges & {"E", "HE"} else u.edge
    if len(edges) > 1 and not edges <= {"E", "HE"}:
        raise InvariantViolation(f"siblings with edge types {edges}")
    e, up_to_sign = _power_rule(edge, N, u.kind == w.kind == "mandatory", u.ram // N, u.height)
    if up_to_sign:
        return cu != cw and cu != -cw
    return cu ** e != cw ** e


def is_realization(T: FissionTree, c: Mapping[int, object]) -> bool:
    adm = set(T.admissible())
    if set(c) != adm:
        return False
    vals = {k: as_cyc(v) for k, v in c.items()}
    for vid in T.mandatory():
        if vals[vid].is_zero():
            return False
    for v in T.vertices:
        kids = [T.vertices[k] for k in v.children]
        nonempty = [k for k in kids if k.admissible]
        has_empty = any(not k.admissible for k in kids)
        if T.case == "D" and has_empty:
            for k in nonempty:
                if k.edge == "HE" and vals[k.id].is_zero():
                    return False
        for u, w in itertools.combinations(nonempty, 2):
            if not sibling_condition(T, u, w, vals[u.id], vals[w.id]):
                return False
    return True


def sample_realization(T: FissionTree) -> dict[int, Cyc]:
    """Greedy witness: siblings receive 1, 2, 3, ... in vertex order."""
    out = {}
    for v in T.vertices:
        n = 1
        for k in v.children:
            if T.vertices[k].admissible:
                out[k] = Cyc.rational(n)
                n += 1
    assert is_realization(T, out)
    return out


def random_realization(T: FissionTree, rng, pool: Sequence[Cyc], tries: int = 200) -> dict[int, Cyc]:
    """A random coefficient map from ``pool`` satisfying the realization predicate."""
    adm = T.admissible()
    for _ in range(tries):
        c = {vid: pool[rng.randrange(len(pool))] for vid in adm}
        if is_realization(T, c):
            return c
    return sample_realization(T)


def realize(T: FissionTree, c: Mapping[int, object]) -> PointedType:
    """The pointed type read off the branches of a realization."""
    entries = []
    for lab in T.labels:
        terms = []
        for vid in T.path(lab):
            v = T.vertices[vid]
            if v.admissible:
                terms.append((v.height, as_cyc(c[vid])))
        q = ExpFactor.from_terms(terms)
        info = T.leaf_info[lab]
        entries.append(Entry(info.mult, q, info.sign if T.case == "D" else 1))
    return PointedType(T.case, tuple(entries))
