"""Local configuration spaces of fission trees and the global factorization."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import comb, factorial

from .fission_trees import FissionTree, InvariantViolation, special_fission_power

__all__ = [
    "FactorDescriptor",
    "Factorization",
    "POINT",
    "local_factor",
    "factorize",
    "hyperplane_count",
]

VARIANT_RANK = {"Point": 0, "Affine": 1, "Torus": 2, "M": 3, "MSharp": 4, "MDoubleSharp": 5}


@dataclass(frozen=True, order=False)
class FactorDescriptor:
    """A named hyperplane complement; ``params`` is (n,), (rho, k) or (k, k')."""

    variant: str
    params: tuple[int, ...] = ()

    def __post_init__(self):
        if self.variant not in VARIANT_RANK:
            raise ValueError(f"unknown factor variant {self.variant!r}")
        expected = {"Point": 0, "Affine": 1, "Torus": 1, "M": 2, "MSharp": 2, "MDoubleSharp": 2}
        if len(self.params) != expected[self.variant]:
            raise ValueError(f"{self.variant} takes {expected[self.variant]} parameters")
        if any(p < 0 for p in self.params):
            raise ValueError("factor parameters are nonnegative")

    @property
    def dim(self) -> int:
        if self.variant == "Point":
            return 0
        if self.variant in ("Affine", "Torus"):
            return self.params[0]
        if self.variant == "MDoubleSharp":
            return self.params[0] + self.params[1]
        return self.params[1]

    def normalized(self) -> "FactorDescriptor":
        v, p = self.variant, self.params
        if v == "M" and p[1] == 1:
            return FactorDescriptor("Affine", (1,))
        if v == "MSharp" and p[1] == 1:
            return FactorDescriptor("Torus", (1,))
        if v == "MDoubleSharp" and p[0] == 0:
            return FactorDescriptor("M", (2, p[1])).normalized()
        if v == "MDoubleSharp" and p[1] == 0:
            return FactorDescriptor("MSharp", (2, p[0])).normalized()
        if v in ("M", "MSharp", "MDoubleSharp") and self.dim == 0:
            return POINT
        return self

    def sort_key(self) -> tuple:
        return (self.dim, VARIANT_RANK[self.variant], self.params)

    def __str__(self) -> str:
        v, p = self.variant, self.params
        if v == "Point":
            return "pt"
        if v == "Affine":
            return "C" if p[0] == 1 else f"C^{p[0]}"
        if v == "Torus":
            return "C*" if p[0] == 1 else f"(C*)^{p[0]}"
        name = {"M": "M", "MSharp": "M#", "MDoubleSharp": "M##"}[v]
        return f"{name}({p[0]},{p[1]})"

    def to_json(self) -> dict:
        return {"variant": self.variant, "params": list(self.params), "dim": self.dim}


POINT = FactorDescriptor("Point")


def hyperplane_count(f: FactorDescriptor) -> int:
    """Number of hyperplanes removed from C^dim to form the factor."""
    v, p = f.variant, f.params
    if v in ("Point", "Affine"):
        return 0
    if v == "Torus":
        return p[0]
    if v == "M":
        return p[0] * comb(p[1], 2)
    if v == "MSharp":
        return p[1] + p[0] * comb(p[1], 2)
    k, kk = p
    return k + 2 * comb(k + kk, 2)


def reflection_group_order(f: FactorDescriptor) -> int:
    """Order of the generalized symmetric group acting on the standard factor."""
    v, p = f.variant, f.params
    if v == "MSharp":
        return factorial(p[1]) * p[0] ** p[1]
    if v == "M":
        return factorial(p[1]) * p[0] ** p[1] // p[0]
    if v == "Torus":
        return 1
    raise ValueError(f"no reflection group attached to {f}")


def _mandatory_factor(edge: str, case: str, N: int, n: int, rc: int, k) -> FactorDescriptor:
    if case == "A" or edge == "NS":
        rho = N
    elif edge == "S":
        rho = special_fission_power(rc, k)
    elif edge in ("E", "HE"):
        rho = N if N % 2 == 0 else 2 * N
    else:
        raise InvariantViolation(f"unknown edge type {edge!r}")
    return FactorDescriptor("MSharp", (rho, n))


def local_factor(T: FissionTree, vid: int, normalize: bool = True) -> FactorDescriptor:
    """The configuration space of the coefficients on the children of ``vid``."""
    v = T.vertex(vid)
    kids = [T.vertex(c) for c in v.children]
    nonempty = [k for k in kids if k.admissible]
    if not nonempty:
        return POINT
    has_empty = len(nonempty) < len(kids)
    Ns = {k.partial for k in nonempty}
    if len(Ns) != 1:
        raise InvariantViolation(f"children of vertex {vid} have partial ramifications {Ns}")
    N = Ns.pop()
    he = [k for k in nonempty if k.edge == "HE"]
    mandatory = [k for k in nonempty if k.kind == "mandatory"]
    inconsequential = [k for k in nonempty if k.kind == "inconsequential"]
    if he:
        if T.case != "D":
            raise InvariantViolation("half-empty edges exist in type D only")
        if any(k.kind != "inconsequential" for k in he):
            raise InvariantViolation("half-empty edges lead to inconsequential vertices")
        if has_empty:
            f = FactorDescriptor("MSharp", (2, len(nonempty)))
        else:
            f = FactorDescriptor("MDoubleSharp", (len(mandatory), len(he)))
            if len(mandatory) + len(he) != len(nonempty):
                raise InvariantViolation(f"vertex {vid} mixes half-empty and other inconsequential edges")
    elif mandatory and inconsequential:
        raise InvariantViolation(f"vertex {vid} has mandatory and inconsequential children")
    elif inconsequential:
        if N != 1:
            raise InvariantViolation(f"inconsequential children of {vid} with partial ramification {N}")
        f = FactorDescriptor("M", (1, len(nonempty)))
    else:
        edges = {k.edge for k in nonempty}
        if len(edges) != 1:
            raise InvariantViolation(f"mandatory children of {vid} with edge types {edges}")
        k = nonempty[0]
        f = _mandatory_factor(edges.pop(), T.case, N, len(nonempty), k.ram // N, k.height)
    return f.normalized() if normalize else f


@dataclass(frozen=True)
class Factorization:
    factors: tuple[FactorDescriptor, ...]

    @property
    def dimension(self) -> int:
        return sum(f.dim for f in self.factors)

    def _mu(self, variant: str) -> dict[tuple[int, int], int]:
        return dict(Counter(f.params for f in self.factors if f.variant == variant))

    @property
    def mu(self) -> dict:
        return self._mu("M")

    @property
    def mu_sharp(self) -> dict:
        return self._mu("MSharp")

    @property
    def mu_double_sharp(self) -> dict:
        return self._mu("MDoubleSharp")

    def counts(self) -> Counter:
        return Counter(str(f) for f in self.factors)

    def __str__(self) -> str:
        if not self.factors:
            return "pt"
        return " x ".join(_group_powers(self.factors))

    def to_json(self) -> dict:
        def mu_json(d):
            return {f"{a},{b}": n for (a, b), n in sorted(d.items())}

        return {
            "factors": [f.to_json() for f in self.factors],
            "text": str(self),
            "dimension": self.dimension,
            "mu": mu_json(self.mu),
            "muSharp": mu_json(self.mu_sharp),
            "muDoubleSharp": mu_json(self.mu_double_sharp),
        }


def _group_powers(factors) -> list[str]:
    out = []
    affine = sum(f.params[0] for f in factors if f.variant == "Affine")
    torus = sum(f.params[0] for f in factors if f.variant == "Torus")
    if affine:
        out.append("C" if affine == 1 else f"C^{affine}")
    if torus:
        out.append("C*" if torus == 1 else f"(C*)^{torus}")
    rest = Counter(str(f) for f in factors if f.variant not in ("Affine", "Torus", "Point"))
    for name in sorted(rest, key=lambda s: next(f.sort_key() for f in factors if str(f) == s)):
        n = rest[name]
        out.append(name if n == 1 else f"{name}^{n}")
    return out


def factorize(T: FissionTree) -> Factorization:
    factors = [local_factor(T, v.id) for v in T.vertices]
    kept = sorted((f for f in factors if f.variant != "Point"), key=FactorDescriptor.sort_key)
    out = Factorization(tuple(kept))
    if out.dimension != len(T.admissible()):
        raise InvariantViolation(
            f"factorization dimension {out.dimension} differs from {len(T.admissible())} admissible vertices"
        )
    return out
