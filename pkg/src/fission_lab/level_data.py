"""Level data and admissible/inconsequential exponents for types A, BC and D."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .cyclotomic import lcm
from .puiseux_core import INF, ExpFactor, is_special_sequence

__all__ = [
    "LevelDatum",
    "LevelDataError",
    "level_datum_A",
    "a_levels_fast",
    "level_datum_BC",
    "bc_levels_bruteforce",
    "good_breakings",
    "admissible_exponents",
    "admissible_bruteforce",
    "level_datum_D",
    "ram_of",
    "levels_from_exponents",
]


class LevelDataError(ValueError):
    pass


def ram_of(levels: Iterable[Fraction]) -> int:
    return lcm(*(Fraction(k).denominator for k in levels))


@dataclass(frozen=True)
class LevelDatum:
    kind: str  # "A", "BC" or "D"
    levels: tuple[Fraction, ...] = ()
    flavour: str = "none"  # D only: "none", "EmptyD", "EmptyBC"
    sign: int = 1
    s_part: tuple[Fraction, ...] = ()
    a_part: tuple[Fraction, ...] = ()
    plus_part: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if list(self.levels) != sorted(set(self.levels), reverse=True):
            raise LevelDataError("levels must be strictly decreasing")
        if self.flavour != "none" and self.levels:
            raise LevelDataError("an empty flavour carries no levels")
        if self.flavour != "none" and self.kind != "D":
            raise LevelDataError("empty flavours exist in type D only")

    @property
    def ram(self) -> int:
        return ram_of(self.levels)

    @property
    def empty(self) -> bool:
        return not self.levels

    @property
    def special(self) -> bool:
        return bool(self.levels) and is_special_sequence(k.denominator for k in self.levels)

    def label(self) -> str:
        if self.flavour == "EmptyD":
            return "0_D"
        if self.flavour == "EmptyBC":
            return "0_BC"
        return "{" + ", ".join(str(k) for k in self.levels) + "}"

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "levels": [str(k) for k in self.levels],
            "flavour": self.flavour,
        }
        if self.kind == "D":
            out["sign"] = self.sign
        if self.kind == "BC" or (self.kind == "D" and self.flavour == "none"):
            out["S"] = [str(k) for k in self.s_part]
            out["A"] = [str(k) for k in self.a_part]
            out["plus"] = [str(k) for k in self.plus_part]
        return out


def _desc(values: Iterable[Fraction]) -> tuple[Fraction, ...]:
    return tuple(sorted(set(values), reverse=True))


# type A ------------------------------------------------------------------


def level_datum_A(q: ExpFactor) -> LevelDatum:
    """Slopes of all differences of Galois conjugates, by brute force."""
    conj = list(q.conjugates())
    slopes = {(a - b).slope for a, b in itertools.product(conj, repeat=2)}
    slopes.discard(Fraction(0))
    return LevelDatum("A", _desc(slopes))


def a_levels_fast(q: ExpFactor) -> tuple[Fraction, ...]:
    """Ramification jumps: exponents whose denominator breaks the running lcm."""
    out, run = [], 1
    for e in q.exponents:
        if run % e.denominator:
            out.append(e)
        run = lcm(run, e.denominator)
    return tuple(out)


# type BC -----------------------------------------------------------------


def _plus_level(exps: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    """The exponent where a special prefix first turns nonspecial without a jump."""
    dens = [e.denominator for e in exps]
    for n in range(1, len(dens)):
        if is_special_sequence(dens[:n]) and not is_special_sequence(dens[: n + 1]):
            if lcm(*dens[:n]) % dens[n] == 0:
                return (exps[n],)
            return ()
    return ()


def levels_from_exponents(exps: Iterable[Fraction]) -> tuple[tuple, tuple, tuple]:
    """(S, L_A, L_plus) computed from a decreasing exponent set."""
    exps = _desc(exps)
    if not exps:
        return (), (), ()
    run, a_part = 1, []
    for e in exps:
        if run % e.denominator:
            a_part.append(e)
        run = lcm(run, e.denominator)
    slope = exps[0]
    s_part = (slope,) if slope.denominator == 1 else ()
    return s_part, tuple(a_part), _plus_level(exps)


def level_datum_BC(q: ExpFactor, verify: bool = False) -> LevelDatum:
    s_part, a_part, plus = levels_from_exponents(q.exponents)
    datum = LevelDatum("BC", _desc(s_part + a_part + plus), s_part=s_part, a_part=a_part, plus_part=plus)
    if verify:
        brute = bc_levels_bruteforce(q)
        if brute != datum.levels:
            raise AssertionError(f"BC levels disagree: fast {datum.levels}, brute {brute}")
    return datum


def bc_levels_bruteforce(q: ExpFactor) -> tuple[Fraction, ...]:
    """Slopes of all sums and differences of Galois conjugates."""
    conj = list(q.conjugates())
    slopes = set()
    for a, b in itertools.product(conj, repeat=2):
        slopes.add((a - b).slope)
        slopes.add((a + b).slope)
    slopes.discard(Fraction(0))
    return _desc(slopes)


def good_breakings(exps: Iterable[Fraction]) -> frozenset[Fraction]:
    """All k strictly between consecutive exponents where a special prefix breaks."""
    exps = _desc(exps)
    out = set()
    for n in range(1, len(exps) + 1):
        prefix = [e.denominator for e in exps[:n]]
        if not is_special_sequence(prefix):
            break
        top = exps[n - 1]
        bottom = exps[n] if n < len(exps) else Fraction(0)
        D = lcm(*prefix)
        for num in range(math.floor(bottom * D) + 1, math.ceil(top * D)):
            k = Fraction(num, D)
            if k <= bottom or k >= top:
                continue
            if not is_special_sequence(prefix + [k.denominator]):
                out.add(k)
    return frozenset(out)


def _adm_A_values(a_levels: tuple[Fraction, ...], cap: Fraction) -> set[Fraction]:
    """Adm_A(L) intersected with (0, cap]."""
    out = set(k for k in a_levels if k <= cap)
    bounds = sorted(a_levels, reverse=True)
    # between consecutive levels the admissible denominators divide the lcm above
    edges = [cap] + [k for k in bounds if k < cap] + [Fraction(0)]
    for top, bottom in zip(edges, edges[1:]):
        D = ram_of([k for k in bounds if k > bottom])
        for num in range(math.floor(bottom * D) + 1, math.floor(top * D) + 1):
            k = Fraction(num, D)
            if bottom < k <= top:
                out.add(k)
    return out


def admissible_exponents(
    datum: LevelDatum, cutoff: Optional[Fraction] = None
) -> tuple[frozenset[Fraction], frozenset[Fraction]]:
    """(Adm, Inc) of a level datum; ``cutoff`` bounds infinite families."""
    if datum.kind == "D" and datum.flavour == "EmptyBC":
        return frozenset(), frozenset()
    if datum.kind == "D" and datum.flavour == "EmptyD":
        if cutoff is None:
            raise LevelDataError("the empty D datum needs a cutoff")
        cutoff = Fraction(cutoff)
        if datum.sign == 1:
            vals = {Fraction(n) for n in range(1, math.floor(cutoff) + 1)}
        else:
            vals = {Fraction(2 * n + 1, 2) for n in range(0, math.floor(cutoff - Fraction(1, 2)) + 1)}
            vals = {v for v in vals if v <= cutoff}
        return frozenset(vals), frozenset(vals)
    if datum.kind == "A":
        if cutoff is None:
            raise LevelDataError("type-A admissible sets are infinite; a cutoff is required")
        adm = frozenset(_adm_A_values(datum.levels, Fraction(cutoff)))
        return adm, adm - set(datum.levels)
    # BC, or nonempty D (identical)
    levels = datum.levels
    if not levels:
        return frozenset(), frozenset()
    s_part, a_part, plus = datum.s_part, datum.a_part, datum.plus_part
    if not (s_part or a_part or plus) and levels:
        s_part, a_part, plus = levels_from_exponents(levels)
    top = max(s_part + a_part)
    special_start = top.denominator % 2 == 0
    if not special_start:
        adm = _adm_A_values(a_part, top)
    else:
        beta = good_breakings(a_part)
        kb = plus[0] if plus else None
        adm = set()
        for k in _adm_A_values(a_part, max(a_part)):
            if k in beta and (kb is None or k > kb):
                continue
            adm.add(k)
    adm |= set(levels)
    adm = frozenset(adm)
    return adm, adm - set(levels)


def admissible_bruteforce(levels: Iterable[Fraction]) -> frozenset[Fraction]:
    """All exponents of factors with unit coefficients whose BC levels equal ``levels``."""
    levels = _desc(levels)
    if not levels:
        return frozenset()
    R = ram_of(levels)
    top = levels[0]
    grid = [Fraction(n, R) for n in range(1, math.floor(top * R) + 1)]
    free = [k for k in grid if k not in levels]
    out = set()
    for mask in range(1 << len(free)):
        exps = set(levels) | {free[i] for i in range(len(free)) if mask >> i & 1}
        q = ExpFactor.from_terms([(e, 1) for e in exps])
        if bc_levels_bruteforce(q) == levels:
            out |= exps
    return frozenset(out)


# type D ------------------------------------------------------------------


def expected_sign(mult: int, q: ExpFactor) -> Optional[int]:
    """Enhancement sign forced by (mult, q); None for the tame factor."""
    if q.is_zero():
        return None
    if is_special_sequence(q.denominators):
        return -1 if mult % 2 else 1
    return 1


def level_datum_D(mult: int, q: ExpFactor, sign: int = 1, isolated: bool = True) -> LevelDatum:
    """Enhanced D level datum.

    ``isolated`` says whether q has zero common part with every other
    circle of the ambient type; only then can a multiplicity-one untwisted
    circle carry the empty D datum.
    """
    if mult < 1:
        raise LevelDataError("multiplicities are positive")
    if sign not in (1, -1):
        raise LevelDataError("sign must be +1 or -1")
    forced = expected_sign(mult, q)
    if forced is not None and forced != sign:
        raise LevelDataError(f"sign {sign} inconsistent with multiplicity {mult} and {q!r}")
    if q.is_zero():
        if mult == 1:
            return LevelDatum("D", (), "EmptyD", sign)
        return LevelDatum("D", (), "EmptyBC", sign)
    if mult == 1 and isolated:
        r = q.ram
        if r == 1 or (r == 2 and is_special_sequence(q.denominators)):
            return LevelDatum("D", (), "EmptyD", sign)
    bc = level_datum_BC(q)
    return LevelDatum("D", bc.levels, "none", sign, bc.s_part, bc.a_part, bc.plus_part)
