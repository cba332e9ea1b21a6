"""Brute-force signed-permutation Weyl groups acting on exact cyclotomic vectors.

Coordinates are 0-based internally; a signed permutation stores g(k+1) for
k = 0..m-1 as a nonzero integer in {±1..±m}.  The action on vectors is
(g x)[|g(k)|] = sgn(g(k)) x[k], and roots transform the same way.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd
from typing import Optional, Sequence

from .budget import BudgetExceeded, check_budget
from .cyclotomic import Cyc, lcm, zeta
from .puiseux_core import is_special_sequence

__all__ = [
    "SignedPerm",
    "group_order",
    "weyl_group",
    "roots",
    "simple_roots",
    "UntwistedType",
    "untwist",
    "eigenspace",
    "eigenspace_fast",
    "kernel",
    "levi_annihilator",
    "flat_basis",
    "flat_dims",
    "regular_nonempty",
    "monodromy_group",
    "covering_degree",
    "marking_independence",
    "validate_classification",
    "stratum_components",
    "springer_degrees",
    "max_eigenspace_dim",
    "order_of_minus_root",
]


# signed permutations ----------------------------------------------------------


@dataclass(frozen=True)
class SignedPerm:
    images: tuple[int, ...]

    def __post_init__(self):
        m = len(self.images)
        if sorted(abs(i) for i in self.images) != list(range(1, m + 1)):
            raise ValueError(f"not a signed permutation: {self.images}")

    @classmethod
    def identity(cls, m: int) -> "SignedPerm":
        return cls(tuple(range(1, m + 1)))

    @classmethod
    def from_cycles(cls, m: int, cycles: Sequence[Sequence[int]], negative: Sequence[bool] = ()) -> "SignedPerm":
        """Cycles (1-based) mapping each point to the next; a negative cycle closes with a sign."""
        images = list(range(1, m + 1))
        for n, cyc in enumerate(cycles):
            neg = negative[n] if n < len(negative) else False
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                images[a - 1] = b
            if neg:
                images[cyc[-1] - 1] = -cyc[0]
        return cls(tuple(images))

    @property
    def m(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        """Image of a signed 1-based index."""
        v = self.images[abs(k) - 1]
        return v if k > 0 else -v

    def __mul__(self, other: "SignedPerm") -> "SignedPerm":
        """Composition: (self * other)(k) = self(other(k))."""
        return SignedPerm(tuple(self(other(k)) for k in range(1, self.m + 1)))

    def inverse(self) -> "SignedPerm":
        out = [0] * self.m
        for k, v in enumerate(self.images, start=1):
            out[abs(v) - 1] = k if v > 0 else -k
        return SignedPerm(tuple(out))

    def sign_product(self) -> int:
        out = 1
        for v in self.images:
            if v < 0:
                out = -out
        return out

    def is_positive(self) -> bool:
        return all(v > 0 for v in self.images)

    def in_D(self) -> bool:
        return self.sign_product() == 1

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.m + 1))

    def act(self, vec: Sequence) -> tuple:
        out = [None] * self.m
        for k, v in enumerate(self.images):
            x = vec[k]
            out[abs(v) - 1] = x if v > 0 else -x
        return tuple(out)

    def cycles(self) -> list[tuple[tuple[int, ...], int]]:
        """Disjoint cycles on 1..m as (points, sign of the closing product)."""
        seen, out = set(), []
        for start in range(1, self.m + 1):
            if start in seen:
                continue
            pts, sign, k = [], 1, start
            while True:
                pts.append(k)
                seen.add(k)
                v = self.images[k - 1]
                if v < 0:
                    sign = -sign
                k = abs(v)
                if k == start:
                    break
            out.append((tuple(pts), sign))
        return out

    def cycle_type(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((len(p), s) for p, s in self.cycles()))

    def order(self) -> int:
        return lcm(*(len(p) * (1 if s == 1 else 2) for p, s in self.cycles()))

    def matrix(self) -> list[list[int]]:
        M = [[0] * self.m for _ in range(self.m)]
        for k, v in enumerate(self.images):
            M[abs(v) - 1][k] = 1 if v > 0 else -1
        return M

    def __repr__(self) -> str:
        return f"SignedPerm{self.images}"


def group_order(case: str, m: int) -> int:
    if case == "A":
        return factorial(m)
    if case == "BC":
        return 2**m * factorial(m)
    if case in ("D", "Dtw"):
        return 2 ** max(m - 1, 0) * factorial(m)
    raise ValueError(f"unknown case {case!r}")


@lru_cache(maxsize=32)
def _group(case: str, m: int) -> tuple[SignedPerm, ...]:
    out = []
    for perm in itertools.permutations(range(1, m + 1)):
        if case == "A":
            out.append(SignedPerm(perm))
            continue
        for signs in itertools.product((1, -1), repeat=m):
            g = SignedPerm(tuple(s * p for s, p in zip(signs, perm)))
            if case == "BC" or (case == "D" and g.in_D()) or (case == "Dtw" and not g.in_D()):
                out.append(g)
    return tuple(out)


def weyl_group(case: str, m: int, budget: Optional[int] = None) -> tuple[SignedPerm, ...]:
    """All elements of W_A(m), W_BC(m), W_D(m), or the nontrivial coset W_BC(m) - W_D(m) ("Dtw")."""
    check_budget(group_order(case, m), budget, f"W_{case}({m})")
    return _group(case, m)


def _root_case(case: str) -> str:
    return "D" if case == "Dtw" else case


@lru_cache(maxsize=64)
def roots(case: str, m: int) -> tuple[tuple[int, ...], ...]:
    case = _root_case(case)
    out = []

    def e(i, s=1):
        v = [0] * m
        v[i] = s
        return v

    for i, j in itertools.permutations(range(m), 2):
        v = e(i)
        v[j] = -1
        out.append(tuple(v))
    if case in ("BC", "D"):
        for i, j in itertools.combinations(range(m), 2):
            for s in (1, -1):
                v = [0] * m
                v[i] = s
                v[j] = s
                out.append(tuple(v))
    if case == "BC":
        for i in range(m):
            out.append(tuple(e(i)))
            out.append(tuple(e(i, -1)))
    if case not in ("A", "BC", "D"):
        raise ValueError(f"unknown case {case!r}")
    return tuple(sorted(out, reverse=True))


def simple_roots(case: str, m: int) -> tuple[tuple[int, ...], ...]:
    case = _root_case(case)
    out = []
    for i in range(m - 1):
        v = [0] * m
        v[i], v[i + 1] = 1, -1
        out.append(tuple(v))
    if case == "BC" and m >= 1:
        v = [0] * m
        v[m - 1] = 1
        out.append(tuple(v))
    if case == "D" and m >= 2:
        v = [0] * m
        v[m - 2] = v[m - 1] = 1
        out.append(tuple(v))
    return tuple(out)


def pair(root: Sequence[int], vec: Sequence):
    acc = 0
    for a, x in zip(root, vec):
        if a == 1:
            acc = acc + x
        elif a == -1:
            acc = acc - x
        elif a:
            acc = acc + a * x
    return acc


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, Cyc) else x == 0


# exact linear algebra -------------------------------------------------------------


def rref(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over Q or Q(zeta); returns (rows, pivot columns)."""
    mat = [list(r) for r in rows]
    if not mat:
        return [], []
    n_cols = len(mat[0])
    pivots, row = [], 0
    for col in range(n_cols):
        piv = next((i for i in range(row, len(mat)) if not _is_zero(mat[i][col])), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        p = mat[row][col]
        if not (p == 1):
            inv = p.inverse() if isinstance(p, Cyc) else 1 / Fraction(p)
            mat[row] = [x * inv for x in mat[row]]
        for i in range(len(mat)):
            if i != row and not _is_zero(mat[i][col]):
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[row])]
        pivots.append(col)
        row += 1
        if row == len(mat):
            break
    return mat[:row], pivots


def kernel(rows: Sequence[Sequence], n_cols: int) -> list[tuple]:
    """Basis of {x : rows x = 0}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for i in range(n_cols)) for j in range(n_cols)]
    red, pivots = rref(rows)
    free = [c for c in range(n_cols) if c not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * n_cols
        v[f] = Fraction(1)
        for r, pc in zip(red, pivots):
            v[pc] = -r[f]
        out.append(tuple(v))
    return out


def span_key(vectors: Sequence[Sequence]) -> tuple:
    """Canonical key of a linear span (RREF of the spanning vectors)."""
    if not vectors:
        return ()
    red, _ = rref(vectors)
    return tuple(tuple(_hashable(x) for x in r) for r in red)


def _hashable(x):
    return x.canonical() if isinstance(x, Cyc) else (1, (Fraction(x),))


def _rank(rows) -> int:
    return len(rref(rows)[0]) if rows else 0


# eigenspaces ------------------------------------------------------------------------


def eigenspace_fast(g: SignedPerm, z: Cyc) -> list[tuple]:
    """One eigenvector per cycle whose closing sign equals z^length."""
    zinv = z.inverse()
    out = []
    for pts, sign in g.cycles():
        if z ** len(pts) != sign:
            continue
        v = [Cyc.rational(0)] * g.m
        k = pts[0]
        v[k - 1] = Cyc.rational(1)
        for _ in range(len(pts) - 1):
            img = g.images[k - 1]
            nxt = abs(img)
            v[nxt - 1] = (v[k - 1] if img > 0 else -v[k - 1]) * zinv
            k = nxt
        out.append(tuple(v))
    return out


def eigenspace(g: SignedPerm, z, exact: bool = True) -> tuple[list[tuple], int]:
    """(basis, dim) of ker(g - z); the exact kernel is checked against the cycle rule."""
    z = z if isinstance(z, Cyc) else Cyc.rational(z)
    fast = eigenspace_fast(g, z)
    if not exact:
        return fast, len(fast)
    M = g.matrix()
    rows = [[Cyc.rational(M[i][j]) - (z if i == j else 0) for j in range(g.m)] for i in range(g.m)]
    basis = kernel(rows, g.m)
    if len(basis) != len(fast):
        raise AssertionError(f"eigenspace dimensions disagree for {g}: exact {len(basis)}, fast {len(fast)}")
    for v in fast:
        if any(not _is_zero(x) for x in _sub(g.act(v), _scale(v, z))):
            raise AssertionError("cycle eigenvector is not an eigenvector")
    return basis, len(basis)


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _scale(v, c):
    return tuple(x * c for x in v)


def _restrict_forms(case: str, m: int, basis: Sequence[Sequence]) -> list[tuple[int, tuple]]:
    """(root index, values on the basis) for roots not vanishing on span(basis)."""
    out = []
    for n, a in enumerate(roots(case, m)):
        vals = tuple(pair(a, b) for b in basis)
        if any(not _is_zero(x) for x in vals):
            out.append((n, vals))
    return out


def _projective_key(vals: Sequence) -> tuple:
    first = next(x for x in vals if not _is_zero(x))
    inv = first.inverse() if isinstance(first, Cyc) else 1 / Fraction(first)
    return tuple(_hashable(x * inv) for x in vals)


def is_regular_space(case: str, m: int, basis: Sequence[Sequence], allowed: frozenset = frozenset()) -> bool:
    """No root outside ``allowed`` vanishes on the whole span of ``basis``."""
    if not basis:
        return False
    for n, a in enumerate(roots(case, m)):
        if n in allowed:
            continue
        if all(_is_zero(pair(a, b)) for b in basis):
            return False
    return True


# untwisting -----------------------------------------------------------------------


@dataclass
class UntwistedType:
    case: str
    m: int
    s: int
    R: int
    A: dict[int, tuple]  # i -> vector of Cyc, i = 1..s
    g: SignedPerm
    blocks: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)  # (entry index, coords)

    @property
    def zeta(self) -> Cyc:
        return zeta(self.R)

    def check(self) -> None:
        z = self.zeta
        for i, a in self.A.items():
            lhs = self.g.act(a)
            zi = z**i
            if any(x != y * zi for x, y in zip(lhs, a)):
                raise AssertionError(f"g(A_{i}) != zeta^{i} A_{i}")


def untwist(pt) -> UntwistedType:
    """Coefficient vectors A_1..A_s and a Galois generator g for a pointed type."""
    case = pt.case
    R = lcm(*(e.factor.ram for e in pt.entries))
    K = pt.katz_rank
    s = int(K * R)
    coords: list[dict] = []  # per coordinate: exponent -> coefficient
    images: list[int] = []
    blocks = []
    tame_coords = []
    for idx, e in enumerate(pt.entries):
        q = e.factor
        if q.is_zero():
            for _ in range(e.mult):
                c = len(coords)
                coords.append({})
                images.append(c + 1)
                tame_coords.append(c)
                blocks.append((idx, (c,)))
            continue
        r = q.ram
        special = case != "A" and is_special_sequence(q.denominators)
        L = r // 2 if special else r
        conjs = [q.conjugate(j) for j in range(L)]
        for _ in range(e.mult):
            base = len(coords)
            for j in range(L):
                coords.append(conjs[j].as_dict())
            for j in range(L):
                # g(c_j) = c_{j-1}; g(c_0) = +-c_{L-1}
                target = base + (j - 1) % L + 1
                images.append(-target if (special and j == 0) else target)
            blocks.append((idx, tuple(range(base, base + L))))
    m = len(coords)
    if m != pt.rank:
        raise AssertionError(f"untwisted rank {m} differs from {pt.rank}")
    g = SignedPerm(tuple(images))
    if case == "D" and not g.in_D():
        if not tame_coords:
            raise ValueError("type-D untwisting needs global sign +1")
        c = tame_coords[0]
        images[c] = -images[c]
        g = SignedPerm(tuple(images))
    A = {}
    zero = Cyc.rational(0)
    for i in range(1, s + 1):
        e = Fraction(i, R)
        A[i] = tuple(d.get(e, zero) for d in coords)
    U = UntwistedType(case, m, s, R, A, g, blocks)
    U.check()
    return U


# annihilators and flats -----------------------------------------------------------


def levi_annihilator(case: str, vec: Sequence) -> frozenset[int]:
    m = len(vec)
    return frozenset(n for n, a in enumerate(roots(case, m)) if _is_zero(pair(a, vec)))


def flat_basis(case: str, m: int, phi: frozenset[int]) -> list[tuple]:
    rs = roots(case, m)
    rows = [[Fraction(x) for x in rs[n]] for n in sorted(phi)]
    return kernel(rows, m)


def filtration(U: UntwistedType) -> dict[int, frozenset[int]]:
    """phi_i = roots vanishing on A_j for all j >= i."""
    out, acc = {}, None
    for i in range(U.s, 0, -1):
        ann = levi_annihilator(U.case, U.A[i])
        acc = ann if acc is None else acc & ann
        out[i] = acc
    return out


@dataclass(frozen=True)
class FlatDatum:
    index: int
    phi: frozenset
    flat_dim: int
    eigen_dim: int
    regular: bool


def _eigen_on_flat(case: str, m: int, g: SignedPerm, z: Cyc, phi: frozenset) -> list[tuple]:
    rs = roots(case, m)
    M = g.matrix()
    rows = [[Cyc.rational(M[i][j]) - (z if i == j else 0) for j in range(m)] for i in range(m)]
    rows += [[Cyc.rational(x) for x in rs[n]] for n in sorted(phi)]
    return kernel(rows, m)


def flat_dims(U: UntwistedType) -> list[FlatDatum]:
    """Per coefficient: the flat, its eigen-flat, and whether the eigen-flat meets the stratum.

    The stratum of A_i is the eigen-flat minus the mirrors of the roots
    that vanish on A_(i+1), ..., A_s but not on A_i.
    """
    phis = filtration(U)
    every = frozenset(range(len(roots(U.case, U.m))))
    out = []
    for i in range(1, U.s + 1):
        phi = phis[i]
        above = phis[i + 1] if i < U.s else every
        basis = _eigen_on_flat(U.case, U.m, U.g, U.zeta**i, phi)
        flat = flat_basis(U.case, U.m, phi)
        rs = roots(U.case, U.m)
        meets = all(
            any(not _is_zero(pair(rs[n], b)) for b in basis) for n in above - phi
        )
        out.append(FlatDatum(i, phi, len(flat), len(basis), meets))
    return out


def regular_nonempty(case: str, m: int, g: SignedPerm, z, phi: frozenset) -> bool:
    """Whether t_phi(g, z) is nonzero and lies in no root hyperplane outside phi."""
    z = z if isinstance(z, Cyc) else Cyc.rational(z)
    basis = _eigen_on_flat(case, m, g, z, frozenset(phi))
    return bool(basis) and is_regular_space(case, m, basis, allowed=frozenset(phi))


# monodromy groups -------------------------------------------------------------------


def _root_index(case: str, m: int) -> dict[tuple, int]:
    return {a: n for n, a in enumerate(roots(case, m))}


def _stabilizes(g: SignedPerm, phi: frozenset, rs, index) -> bool:
    return all(index[g.act(rs[n])] in phi for n in phi)


@dataclass(frozen=True)
class MonodromyResult:
    order: int
    representatives: tuple[SignedPerm, ...]
    filtered: int
    pointwise: int


def _group_for(case: str) -> str:
    return "D" if case == "D" else case


def monodromy_group(U: UntwistedType, budget: Optional[int] = None) -> MonodromyResult:
    """Flag stabilizer elements commuting with g on every flat, modulo the pointwise stabilizer."""
    W = weyl_group(_group_for(U.case), U.m, budget)
    rs = roots(U.case, U.m)
    index = _root_index(U.case, U.m)
    phis = filtration(U)
    distinct = sorted(set(phis.values()), key=lambda p: (len(p), sorted(p)))
    bases = {p: flat_basis(U.case, U.m, p) for p in distinct}
    top = phis[1]
    g = U.g
    filtered, pointwise, reps = 0, 0, {}
    for h in W:
        if not all(_stabilizes(h, p, rs, index) for p in distinct):
            continue
        ok = True
        for p in distinct:
            for b in bases[p]:
                if h.act(g.act(b)) != g.act(h.act(b)):
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        filtered += 1
        key = tuple(h.act(b) for b in bases[top])
        if all(k == b for k, b in zip(key, bases[top])):
            pointwise += 1
        reps.setdefault(key, h)
    if filtered % pointwise:
        raise AssertionError("pointwise stabilizer order does not divide the filtered count")
    order = filtered // pointwise
    if order != len(reps):
        raise AssertionError("coset count disagrees with the order quotient")
    return MonodromyResult(order, tuple(reps.values()), filtered, pointwise)


def _translates_in_flats(U: UntwistedType, budget: Optional[int] = None):
    W = weyl_group(_group_for(U.case), U.m, budget)
    rs = roots(U.case, U.m)
    index = _root_index(U.case, U.m)
    phis = filtration(U)
    distinct = set(phis.values())
    z = U.zeta
    for h in W:
        if not all(_stabilizes(h, p, rs, index) for p in distinct):
            continue
        images = {i: h.act(a) for i, a in U.A.items()}
        ok = True
        for i, a in images.items():
            zi = z**i
            if any(x != y * zi for x, y in zip(U.g.act(a), a)):
                ok = False
                break
        if ok:
            yield h, images


def covering_degree(U: UntwistedType, budget: Optional[int] = None) -> int:
    """Number of distinct W-translates of the coefficient tuple inside the (g, r) flats."""
    seen = set()
    for _, images in _translates_in_flats(U, budget):
        seen.add(tuple(tuple(_hashable(x) for x in images[i]) for i in sorted(images)))
    return len(seen)


def marking_independence(U: UntwistedType, budget: Optional[int] = None) -> bool:
    """All generators of the Galois orbit restrict identically to every flat of the kernel flag."""
    W = weyl_group(_group_for(U.case), U.m, budget)
    z = U.zeta
    gens = []
    for h in W:
        if all(h.act(a) == tuple(x * z**i for x in a) for i, a in U.A.items()):
            gens.append(h)
    if U.g not in gens:
        raise AssertionError("the untwisting generator does not generate the orbit")
    phis = filtration(U)
    for p in set(phis.values()):
        basis = flat_basis(U.case, U.m, p)
        ref = [U.g.act(b) for b in basis]
        for h in gens:
            if [h.act(b) for b in basis] != ref:
                return False
    for i in range(1, U.s + 1):
        ref = span_key(_eigen_on_flat(U.case, U.m, U.g, z**i, phis[i]))
        for h in gens:
            if span_key(_eigen_on_flat(U.case, U.m, h, z**i, phis[i])) != ref:
                return False
    return True


def orbit_generators(U: UntwistedType, budget: Optional[int] = None) -> list[SignedPerm]:
    W = weyl_group(_group_for(U.case), U.m, budget)
    z = U.zeta
    return [h for h in W if all(h.act(a) == tuple(x * z**i for x in a) for i, a in U.A.items())]


# classification validators ----------------------------------------------------------


def springer_degrees(case: str, m: int) -> list[int]:
    if case == "A":
        return list(range(1, m + 1))
    if case == "BC":
        return [2 * i for i in range(1, m + 1)]
    if case in ("D", "Dtw"):
        return sorted([2 * i for i in range(1, m)] + [m])
    raise ValueError(case)


def max_eigenspace_dim(case: str, m: int, r: int, budget: Optional[int] = None) -> int:
    z = zeta(r)
    return max(len(eigenspace_fast(g, z)) for g in weyl_group(case, m, budget))


def order_of_minus_root(r: int) -> int:
    got = (-zeta(r)).root_of_unity_order()
    assert got is not None
    return got


@dataclass(frozen=True)
class Prediction:
    clause: str
    k: int
    factor: tuple  # ("MSharp", rho, k) or ("M", rho, k)


def predicted(case: str, m: int, r: int, twisted: bool = False) -> list[Prediction]:
    """The classification statements as hypotheses, one entry per applicable clause."""
    out = []
    if case == "A":
        for q in (m, m - 1):
            if q > 0 and q % r == 0:
                out.append(Prediction("1", q // r, ("MSharp", r, q // r)))
                break
        return out
    if case == "BC":
        if r % 2 and m % r == 0:
            out.append(Prediction("1", m // r, ("MSharp", 2 * r, m // r)))
        if r % 2 == 0 and (2 * m) % r == 0:
            out.append(Prediction("2", 2 * m // r, ("MSharp", r, 2 * m // r)))
        return out
    if case != "D":
        raise ValueError(case)
    if not twisted:
        if r % 2:
            for q in (m, m - 1):
                if q % r == 0:
                    out.append(Prediction("1", q // r, ("MSharp", 2 * r, q // r)))
                    break
        if r >= 4 and r % 2 == 0 and m % r == 0:
            out.append(Prediction("2", m // r, ("MSharp", r, 2 * (m // r))))
        if r >= 4 and r % 2 == 0 and (2 * m - 2) % r == 0:
            out.append(Prediction("3", (2 * m - 2) // r, ("MSharp", r, (2 * m - 2) // r)))
        if r == 2:
            out.append(Prediction("4", m, ("M", 2, m)))
        return out
    if r % 2 and (m - 1) % r == 0:
        out.append(Prediction("1", (m - 1) // r, ("MSharp", 2 * r, (m - 1) // r)))
    if r >= 4 and r % 2 == 0 and (2 * m) % r == 0 and ((2 * m) // r) % 2 == 1:
        out.append(Prediction("2", 2 * m // r, ("MSharp", r, 2 * m // r)))
    if r >= 4 and r % 2 == 0 and (2 * m - 2) % r == 0:
        out.append(Prediction("3", (2 * m - 2) // r, ("MSharp", r, 2 * ((2 * m - 2) // r))))
    if r == 2:
        out.append(Prediction("4", m, ("M", 2, m)))
    return out


def _factor_counts(factor: tuple) -> tuple[int, int, int]:
    """(dimension, hyperplane count, reflection group order) of a standard factor."""
    from math import comb

    variant, rho, k = factor
    if variant == "MSharp":
        return k, k + rho * comb(k, 2), factorial(k) * rho**k
    return k, rho * comb(k, 2), factorial(k) * rho ** (k - 1)


@dataclass
class ClassificationReport:
    case: str
    m: int
    r: int
    twisted: bool
    exists: bool
    dims: tuple[int, ...]
    hyperplanes: tuple[int, ...]
    centralizers: tuple[int, ...]
    predictions: list[Prediction]
    verdicts: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "m": self.m,
            "r": self.r,
            "twisted": self.twisted,
            "exists": self.exists,
            "dims": list(self.dims),
            "hyperplanes": list(self.hyperplanes),
            "centralizers": list(self.centralizers),
            "predicted": [{"clause": p.clause, "k": p.k, "factor": list(p.factor)} for p in self.predictions],
            "verdicts": {k: "PASS" if v else "FAIL" for k, v in self.verdicts.items()},
        }


def _centralizer_order(W: Sequence[SignedPerm], g: SignedPerm) -> int:
    return sum(1 for h in W if h * g == g * h)


def validate_classification(case: str, m: int, r: int, twisted: bool = False, budget: Optional[int] = None) -> ClassificationReport:
    """Brute force versus the classification statements for one (case, m, r)."""
    gcase = "Dtw" if (case == "D" and twisted) else case
    elems = weyl_group(gcase, m, budget)
    ambient = weyl_group("D", m, budget) if case == "D" else elems
    z = zeta(r)
    reps: dict[tuple, tuple] = {}
    for g in elems:
        basis = eigenspace_fast(g, z)
        if basis and is_regular_space(case, m, basis):
            reps.setdefault(g.cycle_type(), (g, basis))
    dims, hyps, cents = set(), set(), set()
    for g, basis in reps.values():
        dims.add(len(basis))
        forms = _restrict_forms(case, m, basis)
        hyps.add(len({_projective_key(v) for _, v in forms}))
        cents.add(_centralizer_order(ambient, g))
    preds = predicted(case, m, r, twisted)
    verdicts = {"existence": bool(reps) == bool(preds)}
    for p in preds:
        k, nh, zo = _factor_counts(p.factor)
        ok = bool(reps) and dims == {k}
        if case != "D":
            # the type-D statements describe the space only, not the centralizer
            ok = ok and cents == {zo}
        if r > 1:
            ok = ok and hyps == {nh}
        verdicts[f"clause {p.clause}"] = ok
    return ClassificationReport(
        case, m, r, twisted, bool(reps), tuple(sorted(dims)), tuple(sorted(hyps)), tuple(sorted(cents)), preds, verdicts
    )


# stratum components -------------------------------------------------------------------


def parabolic(case: str, m: int, subset: Sequence[int]) -> frozenset[int]:
    """Root indices of the standard parabolic subsystem spanned by the chosen simple roots."""
    simple = simple_roots(case, m)
    chosen = [simple[i] for i in subset]
    rows = [[Fraction(x) for x in a] for a in chosen]
    out = set()
    for n, a in enumerate(roots(case, m)):
        if _rank(rows + [[Fraction(x) for x in a]]) == len(rows) if rows else False:
            out.add(n)
    return frozenset(out)


def dominant_levi_subsets(case: str, m: int) -> list[tuple[int, ...]]:
    n = len(simple_roots(case, m))
    return [s for k in range(n + 1) for s in itertools.combinations(range(n), k)]


def _reflection(form: Sequence[Fraction]) -> tuple:
    """Reflection of Q^d in the mirror ker(form), for the standard dot product."""
    d = len(form)
    norm = sum(f * f for f in form)
    return tuple(tuple(Fraction(int(i == j)) - 2 * form[i] * form[j] / norm for j in range(d)) for i in range(d))


def _matmul(a, b):
    n, k, p = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(p)) for i in range(n))


def relative_reflection_group(case: str, m: int, phi: frozenset, cap: int = 50000) -> tuple[set, list]:
    """Closure of the reflections in the restricted root mirrors, in the block coordinates of t_phi."""
    basis = flat_basis(case, m, phi)
    d = len(basis)
    gens = set()
    for n, a in enumerate(roots(case, m)):
        if n in phi:
            continue
        form = tuple(Fraction(pair(a, b)) for b in basis)
        if any(form):
            gens.add(_reflection(form))
    ident = tuple(tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = _matmul(s, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > cap:
            raise BudgetExceeded(f"relative reflection group exceeds {cap} elements")
        frontier = nxt
    return seen, basis


@dataclass
class StratumResult:
    case: str
    m: int
    r: int
    phi: frozenset
    component_count: int
    index: Optional[int]
    transitive: bool
    obstruction: bool
    relative_order: int
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "m": self.m,
            "r": self.r,
            "phi": sorted(self.phi),
            "componentCount": self.component_count,
            "index": self.index,
            "transitive": self.transitive,
            "obstruction": self.obstruction,
            "relativeOrder": self.relative_order,
        }


def stratum_components(case: str, m: int, r: int, phi, budget: Optional[int] = None) -> StratumResult:
    """Distinct regular eigen-flats t_phi(g, zeta_r) over g in the normalizer of t_phi."""
    phi = frozenset(phi)
    W = weyl_group(_group_for(case), m, budget)
    rs = roots(case, m)
    idx = _root_index(case, m)
    z = zeta(r)
    flat = flat_basis(case, m, phi)
    N = [h for h in W if _stabilizes(h, phi, rs, idx)]
    flats: dict[tuple, tuple] = {}
    witness: dict[tuple, SignedPerm] = {}
    for h in N:
        basis = _eigen_on_flat(case, m, h, z, phi)
        # a zero flat is a single point, regular by definition
        if (basis and is_regular_space(case, m, basis, allowed=phi)) or not flat:
            key = span_key(basis)
            flats.setdefault(key, tuple(basis))
            witness.setdefault(key, h)
    count = len(flats)
    if count == 0:
        return StratumResult(case, m, r, phi, 0, None, True, False, 0, ["empty stratum"])
    key0 = next(iter(flats))
    g = witness[key0]
    orbit = set()
    for h in N:
        orbit.add(span_key([h.act(v) for v in flats[key0]]))
    transitive = orbit == set(flats)
    commuting = sum(1 for h in N if all(h.act(g.act(b)) == g.act(h.act(b)) for b in flat))
    index = len(N) // commuting
    group, _ = relative_reflection_group(case, m, phi)
    obstruction = not transitive
    notes = []
    mirrors = _reflecting_hyperplanes(group, len(flat))
    root_mirrors = set()
    for n, a in enumerate(rs):
        if n in phi:
            continue
        form = tuple(Fraction(pair(a, b)) for b in flat)
        if any(form):
            root_mirrors.add(_projective_key(form))
    exotic = [form for key, form in mirrors.items() if key not in root_mirrors]
    for basis in flats.values():
        coords = _flat_coordinates(flat, basis)
        for form in exotic:
            if all(_is_zero(sum((c * f for f, c in zip(form, vec)), Cyc.rational(0))) for vec in coords):
                obstruction = True
                break
        if obstruction and transitive:
            notes.append("an eigen-flat lies in a mirror of the relative reflection group that is not a root mirror")
            break
    if not obstruction and count != index:
        raise AssertionError(f"component count {count} differs from the orbit index {index}")
    return StratumResult(case, m, r, phi, count, index, transitive, obstruction, len(group), notes)


def _reflecting_hyperplanes(group, d: int) -> dict[tuple, tuple]:
    """Mirrors of the reflections in ``group``: projective key -> defining form."""
    out = {}
    for x in group:
        diff = [[x[i][j] - (1 if i == j else 0) for j in range(d)] for i in range(d)]
        if _rank(diff) != 1:
            continue
        fixed = kernel(diff, d)
        normal = kernel([list(v) for v in fixed], d)
        if len(normal) == 1:
            out.setdefault(_projective_key(normal[0]), normal[0])
    return out


def _flat_coordinates(fbasis, vectors):
    """Coordinates of ``vectors`` (lying in span(fbasis)) with respect to fbasis."""
    d = len(fbasis)
    out = []
    for v in vectors:
        # choose pivot coordinates of the basis matrix
        rows = [[Cyc.rational(fbasis[j][i]) for j in range(d)] + [v[i]] for i in range(len(v))]
        red, piv = rref(rows)
        c = [Cyc.rational(0)] * d
        for row, p in zip(red, piv):
            if p < d:
                c[p] = row[-1]
        out.append(tuple(c))
    return out
