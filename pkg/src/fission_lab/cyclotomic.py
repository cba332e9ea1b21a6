"""Exact arithmetic in cyclotomic fields Q(zeta_L).

An element is stored as a rational coordinate vector in the power basis
1, zeta, ..., zeta^(phi(L)-1) modulo the L-th cyclotomic polynomial.
Elements of different levels interoperate through the embedding
Q(zeta_L) -> Q(zeta_L') for L | L'.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Union

Number = Union[int, Fraction, "Cyc"]

__all__ = ["Cyc", "cyclotomic_polynomial", "euler_phi", "lcm", "zeta", "as_cyc"]


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _poly_divmod(num: list[int], den: list[int]) -> list[int]:
    # exact division of integer polynomials (low degree first), den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        for j, dj in enumerate(den):
            num[i + j] -= c * dj
    assert not any(num), "non-exact polynomial division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(level: int) -> tuple[tuple[int, ...], ...]:
    """Coordinates of zeta_L^k for k = 0..L-1."""
    phi = cyclotomic_polynomial(level)
    deg = len(phi) - 1
    rows = []
    cur = [1] + [0] * (deg - 1)
    for _ in range(level):
        rows.append(tuple(cur))
        # multiply by x and reduce with x^deg = -sum phi_i x^i
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * p for c, p in zip(cur, phi[:-1])]
    return tuple(rows)


def _solve(columns: list[list[Fraction]], target: list[Fraction]) -> list[Fraction] | None:
    """Solve sum_j y_j columns[j] = target exactly; None when inconsistent."""
    n_rows = len(target)
    n_cols = len(columns)
    mat = [[Fraction(columns[j][i]) for j in range(n_cols)] + [Fraction(target[i])] for i in range(n_rows)]
    pivots = []
    row = 0
    for col in range(n_cols):
        piv = next((i for i in range(row, n_rows) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[row], mat[piv] = mat[piv], mat[row]
        inv = 1 / mat[row][col]
        mat[row] = [v * inv for v in mat[row]]
        for i in range(n_rows):
            if i != row and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[row])]
        pivots.append(col)
        row += 1
    if any(mat[i][-1] != 0 for i in range(row, n_rows)):
        return None
    sol = [Fraction(0)] * n_cols
    for i, col in enumerate(pivots):
        sol[col] = mat[i][-1]
    return sol


class Cyc:
    """An element of Q(zeta_L)."""

    __slots__ = ("level", "coeffs", "_canon")

    def __init__(self, level: int, coeffs: Iterable[Union[int, Fraction]]):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != euler_phi(level):
            raise ValueError(f"level {level} needs {euler_phi(level)} coordinates, got {len(coeffs)}")
        self.level = level
        self.coeffs = coeffs
        self._canon = None

    # constructors -----------------------------------------------------

    @classmethod
    def rational(cls, value: Union[int, Fraction]) -> "Cyc":
        return cls(1, (Fraction(value),))

    @classmethod
    def root(cls, n: int, k: int = 1) -> "Cyc":
        """zeta_n^k with zeta_n = exp(2 pi i / n)."""
        if n <= 0:
            raise ValueError("root of unity order must be positive")
        return cls(n, _power_table(n)[k % n])

    # level handling ---------------------------------------------------

    def at_level(self, level: int) -> "Cyc":
        if level == self.level:
            return self
        if level % self.level:
            raise ValueError(f"cannot embed level {self.level} into level {level}")
        step = level // self.level
        table = _power_table(level)
        out = [Fraction(0)] * euler_phi(level)
        for i, c in enumerate(self.coeffs):
            if c:
                for j, t in enumerate(table[i * step]):
                    if t:
                        out[j] += c * t
        return Cyc(level, out)

    def _galois(self, a: int) -> tuple[Fraction, ...]:
        table = _power_table(self.level)
        out = [Fraction(0)] * len(self.coeffs)
        for i, c in enumerate(self.coeffs):
            if c:
                for j, t in enumerate(table[(a * i) % self.level]):
                    if t:
                        out[j] += c * t
        return tuple(out)

    def galois(self, a: int) -> "Cyc":
        """The automorphism zeta_L -> zeta_L^a (a coprime to L)."""
        if gcd(a, self.level) != 1:
            raise ValueError("Galois exponent must be a unit")
        return Cyc(self.level, self._galois(a))

    def canonical(self) -> tuple[int, tuple[Fraction, ...]]:
        """(minimal level, coordinates there); equal elements give equal keys."""
        if self._canon is not None:
            return self._canon
        L = self.level
        if not any(self.coeffs[1:]):
            self._canon = (1, (self.coeffs[0],))
            return self._canon
        units = [a for a in range(1, L) if gcd(a, L) == 1]
        for d in _divisors(L):
            fixing = [a for a in units if a % d == 1 % d and a != 1]
            if all(self._galois(a) == self.coeffs for a in fixing):
                step = L // d
                table = _power_table(L)
                cols = [list(table[i * step]) for i in range(euler_phi(d))]
                sol = _solve(cols, list(self.coeffs))
                assert sol is not None
                self._canon = (d, tuple(sol))
                return self._canon
        raise AssertionError("unreachable: element lies in its own level")

    # arithmetic -------------------------------------------------------

    @staticmethod
    def _pair(x: "Cyc", y: Number) -> tuple["Cyc", "Cyc"]:
        y = as_cyc(y)
        if x.level == y.level:
            return x, y
        L = lcm(x.level, y.level)
        return x.at_level(L), y.at_level(L)

    def __add__(self, other: Number) -> "Cyc":
        if not isinstance(other, (Cyc, int, Fraction)):
            return NotImplemented
        a, b = self._pair(self, other)
        return Cyc(a.level, [u + v for u, v in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> "Cyc":
        return Cyc(self.level, [-c for c in self.coeffs])

    def __sub__(self, other: Number) -> "Cyc":
        if not isinstance(other, (Cyc, int, Fraction)):
            return NotImplemented
        return self + (-as_cyc(other))

    def __rsub__(self, other: Number) -> "Cyc":
        return as_cyc(other) - self

    def __mul__(self, other: Number) -> "Cyc":
        if isinstance(other, (int, Fraction)):
            return Cyc(self.level, [c * other for c in self.coeffs])
        if not isinstance(other, Cyc):
            return NotImplemented
        a, b = self._pair(self, other)
        L = a.level
        table = _power_table(L)
        out = [Fraction(0)] * len(a.coeffs)
        for i, u in enumerate(a.coeffs):
            if not u:
                continue
            for j, v in enumerate(b.coeffs):
                if not v:
                    continue
                uv = u * v
                for k, t in enumerate(table[(i + j) % L]):
                    if t:
                        out[k] += uv * t
        return Cyc(L, out)

    __rmul__ = __mul__

    def inverse(self) -> "Cyc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        n = len(self.coeffs)
        basis = [Cyc(self.level, [1 if i == j else 0 for i in range(n)]) for j in range(n)]
        cols = [list((self * e).coeffs) for e in basis]
        sol = _solve(cols, [Fraction(1)] + [Fraction(0)] * (n - 1))
        assert sol is not None
        return Cyc(self.level, sol)

    def __truediv__(self, other: Number) -> "Cyc":
        other = as_cyc(other)
        return self * other.inverse()

    def __rtruediv__(self, other: Number) -> "Cyc":
        return as_cyc(other) * self.inverse()

    def __pow__(self, n: int) -> "Cyc":
        if n < 0:
            return self.inverse() ** (-n)
        result = Cyc.rational(1).at_level(self.level)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # predicates -------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return self.canonical()[0] == 1

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Cyc.rational(other)
        if not isinstance(other, Cyc):
            return NotImplemented
        a, b = self._pair(self, other)
        return a.coeffs == b.coeffs

    def __hash__(self) -> int:
        return hash(self.canonical())

    def sort_key(self) -> tuple:
        d, coords = self.canonical()
        return (d, coords)

    def root_of_unity_order(self) -> int | None:
        """Multiplicative order if this is a root of unity, else None."""
        if self.is_zero():
            return None
        cap = lcm(2, self.level)
        one = Cyc.rational(1)
        for n in _divisors(cap):
            if self ** n == one:
                return n
        return None

    def __repr__(self) -> str:
        d, coords = self.canonical()
        if d == 1:
            return str(coords[0])
        parts = []
        for i, c in enumerate(coords):
            if not c:
                continue
            mono = "1" if i == 0 else (f"zeta({d})" if i == 1 else f"zeta({d})^{i}")
            if i == 0:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def as_cyc(x: Number) -> Cyc:
    if isinstance(x, Cyc):
        return x
    if isinstance(x, (int, Fraction)):
        return Cyc.rational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Cyc")


def zeta(n: int, k: int = 1) -> Cyc:
    return Cyc.root(n, k)
