"""Exponential factors, Galois conjugates and Stokes circles up to sign.

An exponential factor is a finite sum q = sum_e a_e z^(-e) over positive
rational exponents e with nonzero cyclotomic coefficients.  Exponents are
plain ``Fraction`` values; ``INF`` is the height token of tree roots.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from .cyclotomic import Cyc, as_cyc, lcm, zeta

__all__ = [
    "INF",
    "Height",
    "ExpFactor",
    "SignedCircle",
    "FactorSyntaxError",
    "conjugate",
    "truncate",
    "same_circle",
    "is_special_sequence",
    "classify_circle",
    "parse_factor",
    "format_exponent",
]

INF = math.inf
Height = Union[Fraction, float]


def _as_exponent(e: Union[int, Fraction, str]) -> Fraction:
    e = Fraction(e)
    if e <= 0:
        raise ValueError(f"active exponents must be positive, got {e}")
    return e


def format_exponent(e: Height) -> str:
    if e == INF:
        return "inf"
    e = Fraction(e)
    return str(e.numerator) if e.denominator == 1 else f"{e.numerator}/{e.denominator}"


@dataclass(frozen=True)
class ExpFactor:
    """Principal Puiseux part; ``terms`` is sorted by decreasing exponent."""

    terms: tuple[tuple[Fraction, Cyc], ...] = ()

    @classmethod
    def from_terms(cls, terms: Union[Mapping, Iterable]) -> "ExpFactor":
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Fraction, Cyc] = {}
        for e, a in items:
            e = _as_exponent(e)
            acc[e] = acc[e] + as_cyc(a) if e in acc else as_cyc(a)
        kept = tuple(sorted(((e, a) for e, a in acc.items() if not a.is_zero()), key=lambda t: -t[0]))
        return cls(kept)

    @classmethod
    def zero(cls) -> "ExpFactor":
        return cls(())

    @classmethod
    def monomial(cls, coeff, exponent) -> "ExpFactor":
        return cls.from_terms([(exponent, coeff)])

    # numerical invariants ----------------------------------------------

    @property
    def exponents(self) -> tuple[Fraction, ...]:
        return tuple(e for e, _ in self.terms)

    @property
    def denominators(self) -> tuple[int, ...]:
        return tuple(e.denominator for e, _ in self.terms)

    @property
    def ram(self) -> int:
        return lcm(*self.denominators) if self.terms else 1

    @property
    def irr(self) -> int:
        if not self.terms:
            return 0
        r = self.ram
        return max(e.numerator * (r // e.denominator) for e in self.exponents)

    @property
    def slope(self) -> Fraction:
        return self.terms[0][0] if self.terms else Fraction(0)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, e) -> Cyc:
        e = Fraction(e)
        for f, a in self.terms:
            if f == e:
                return a
        return Cyc.rational(0)

    def as_dict(self) -> dict[Fraction, Cyc]:
        return dict(self.terms)

    # arithmetic ----------------------------------------------------------

    def __add__(self, other: "ExpFactor") -> "ExpFactor":
        return ExpFactor.from_terms(list(self.terms) + list(other.terms))

    def __neg__(self) -> "ExpFactor":
        return ExpFactor(tuple((e, -a) for e, a in self.terms))

    def __sub__(self, other: "ExpFactor") -> "ExpFactor":
        return self + (-other)

    def scale(self, c) -> "ExpFactor":
        c = as_cyc(c)
        return ExpFactor.from_terms([(e, c * a) for e, a in self.terms])

    def conjugate(self, j: int) -> "ExpFactor":
        return conjugate(self, j)

    def truncate(self, k: Height) -> "ExpFactor":
        return truncate(self, k)

    def conjugates(self) -> Iterator["ExpFactor"]:
        for j in range(self.ram):
            yield conjugate(self, j)

    def sort_key(self) -> tuple:
        return tuple((-e, a.sort_key()) for e, a in self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({a})*z^(-{format_exponent(e)})" for e, a in self.terms)

    def to_text(self) -> str:
        return repr(self)


def conjugate(q: ExpFactor, j: int) -> ExpFactor:
    """The j-th Galois conjugate: a z^(-b/d) -> zeta_r^(r b j / d) a z^(-b/d)."""
    r = q.ram
    j %= r
    if j == 0:
        return q
    out = []
    for e, a in q.terms:
        k = (e.numerator * (r // e.denominator) * j) % r
        out.append((e, a * zeta(r, k) if k else a))
    return ExpFactor(tuple(out))


def truncate(q: ExpFactor, k: Height) -> ExpFactor:
    """Keep the terms of exponent at least ceil(k r)/r."""
    if k == 0:
        return q
    if k == INF:
        return ExpFactor.zero()
    r = q.ram
    k = Fraction(k)
    threshold = Fraction(math.ceil(k * r), r)
    return ExpFactor(tuple((e, a) for e, a in q.terms if e >= threshold))


def _members(q: ExpFactor, signed: bool) -> Iterator[ExpFactor]:
    for c in q.conjugates():
        yield c
        if signed:
            yield -c


def same_circle(q: ExpFactor, other: ExpFactor, signed: bool) -> bool:
    """Whether ``other`` lies in the (signed) Galois orbit of ``q``."""
    if q.exponents != other.exponents:
        return False
    return any(m == other for m in _members(q, signed))


def is_special_sequence(dens: Iterable[int]) -> bool:
    """Every d even and 2m/d odd, where m = lcm(d/2)."""
    dens = list(dens)
    if not dens:
        raise ValueError("specialness is defined for nonempty sequences only")
    if any(d <= 0 for d in dens):
        raise ValueError("denominators must be positive")
    if any(d % 2 for d in dens):
        return False
    m = lcm(*(d // 2 for d in dens))
    return all((2 * m // d) % 2 == 1 for d in dens)


@dataclass(frozen=True)
class SignedCircle:
    """The set of all signed conjugates of an exponential factor."""

    rep: ExpFactor
    ram: int
    flavour: str  # "special", "nonspecial" or "tame"
    card: int

    @property
    def special(self) -> bool:
        return self.flavour == "special"

    @property
    def tame(self) -> bool:
        return self.flavour == "tame"


def classify_circle(q: ExpFactor) -> SignedCircle:
    if q.is_zero():
        return SignedCircle(q, 1, "tame", 1)
    special = is_special_sequence(q.denominators)
    rep = min(_members(q, True), key=ExpFactor.sort_key)
    r = q.ram
    return SignedCircle(rep, r, "special" if special else "nonspecial", r if special else 2 * r)


def canonical_representative(q: ExpFactor, signed: bool = True) -> ExpFactor:
    if q.is_zero():
        return q
    return min(_members(q, signed), key=ExpFactor.sort_key)


# textual factor syntax ----------------------------------------------------


class FactorSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|(zeta)|(z)|(i)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FactorSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        if m.group(1):
            out.append(("int", m.group(1)))
        elif m.group(2):
            out.append(("zeta", "zeta"))
        elif m.group(3):
            out.append(("z", "z"))
        elif m.group(4):
            out.append(("i", "i"))
        else:
            out.append(("op", "^" if m.group(5) == "**" else m.group(5)))
        pos = m.end()
    return out


class _Parser:
    # expr := ['+'|'-'] term (('+'|'-') term)*
    # term := atom (('*'|'/') atom)*
    # atom := int | 'i' | zeta '(' int ')' ['^' int] | z '^' exponent | '(' expr ')'

    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise FactorSyntaxError(f"expected {value or kind}, found {tok[1]!r}")
        self.pos += 1
        return tok

    def parse(self) -> dict[Fraction, Cyc]:
        out = self.expr()
        if self.pos != len(self.toks):
            raise FactorSyntaxError(f"trailing input near token {self.pos}")
        return out

    def expr(self) -> dict[Fraction, Cyc]:
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        acc = _scale(self.term(), sign)
        while self.peek() in (("op", "+"), ("op", "-")):
            s = 1 if self.take()[1] == "+" else -1
            acc = _merge(acc, _scale(self.term(), s))
        return acc

    def term(self) -> dict[Fraction, Cyc]:
        acc = self.atom()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.atom()
            if op == "*":
                acc = _product(acc, rhs)
            else:
                if set(rhs) != {Fraction(0)}:
                    raise FactorSyntaxError("division by a non-constant")
                acc = _scale(acc, rhs[Fraction(0)].inverse())
        return acc

    def atom(self) -> dict[Fraction, Cyc]:
        kind, val = self.peek()
        if kind == "int":
            self.take()
            return {Fraction(0): Cyc.rational(int(val))}
        if kind == "i":
            self.take()
            return {Fraction(0): zeta(4)}
        if kind == "zeta":
            self.take()
            self.take("op", "(")
            n = int(self.take("int")[1])
            self.take("op", ")")
            k = 1
            if self.peek() == ("op", "^"):
                self.take()
                k = self.signed_int()
            return {Fraction(0): zeta(n, k)}
        if kind == "z":
            self.take()
            self.take("op", "^")
            e = self.exponent()
            if e >= 0:
                raise FactorSyntaxError("only negative powers of z form a principal part")
            return {-e: Cyc.rational(1)}
        if (kind, val) == ("op", "("):
            self.take()
            inner = self.expr()
            self.take("op", ")")
            return inner
        raise FactorSyntaxError(f"unexpected token {val!r}")

    def signed_int(self) -> int:
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        return sign * int(self.take("int")[1])

    def exponent(self) -> Fraction:
        if self.peek() == ("op", "("):
            self.take()
            num = self.signed_int()
            den = 1
            if self.peek() == ("op", "/"):
                self.take()
                den = int(self.take("int")[1])
                if den == 0:
                    raise FactorSyntaxError("zero denominator in an exponent")
            self.take("op", ")")
            return Fraction(num, den)
        return Fraction(self.signed_int())


def _merge(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        out[e] = out[e] + c if e in out else c
    return out


def _scale(a: dict, s) -> dict:
    return {e: c * s for e, c in a.items()}


def _product(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            out = _merge(out, {e1 + e2: c1 * c2})
    return out


def parse_factor(text: str) -> ExpFactor:
    """Parse e.g. ``"-z^(-3/2) + 2*zeta(6)^5*z^(-1/3)"``; ``"0"`` is tame."""
    terms = _Parser(text).parse()
    const = terms.pop(Fraction(0), None)
    if const is not None and not const.is_zero():
        raise FactorSyntaxError("a nonzero constant term is not part of an exponential factor")
    return ExpFactor.from_terms(terms)
