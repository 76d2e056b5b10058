"""Exact elements of cyclotomic fields Q(zeta_n).

Values of finite-order characters and the L-values built from them live in
Q(zeta_n).  An element is kept as its coefficient vector on 1, z, ..., z^(phi(n)-1)
after reduction modulo the cyclotomic polynomial, so equality is exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import PreconditionError
from .padic_arith import PadicNumber, primitive_root, teichmuller_int


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients (constant first) of the n-th cyclotomic polynomial."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _polydiv_exact(num, list(cyclotomic_poly(d)))
    return tuple(num)


def _polydiv_exact(a: list[int], b: list[int]) -> list[int]:
    a = a[:]
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        q = a[i + len(b) - 1] // b[-1]
        out[i] = q
        for j, c in enumerate(b):
            a[i + j] -= q * c
    return out


class Cyclo:
    """Element of Q(zeta_n), zeta_n = exp(2 pi i / n)."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs):
        self.n = n
        self.coeffs = _reduce(n, [Fraction(c) for c in coeffs])

    @classmethod
    def rational(cls, q) -> "Cyclo":
        return cls(1, [Fraction(q)])

    @classmethod
    def root_of_unity(cls, r: Fraction) -> "Cyclo":
        """exp(2 pi i r) for rational r."""
        r = Fraction(r) % 1
        n = r.denominator
        c = [Fraction(0)] * n
        c[r.numerator] = Fraction(1)
        return cls(n, c)

    def lift(self, m: int) -> "Cyclo":
        """The same element viewed in Q(zeta_m), n | m."""
        if m % self.n:
            raise ValueError("cannot lift")
        k = m // self.n
        c = [Fraction(0)] * m
        for i, v in enumerate(self.coeffs):
            c[i * k] += v
        return Cyclo(m, c)

    def _common(self, o):
        if not isinstance(o, Cyclo):
            o = Cyclo.rational(o)
        m = math.lcm(self.n, o.n)
        return self.lift(m), o.lift(m)

    def __add__(self, o):
        a, b = self._common(o)
        L = max(len(a.coeffs), len(b.coeffs))
        ca = a.coeffs + [Fraction(0)] * (L - len(a.coeffs))
        cb = b.coeffs + [Fraction(0)] * (L - len(b.coeffs))
        return Cyclo(a.n, [x + y for x, y in zip(ca, cb)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.n, [-c for c in self.coeffs])

    def __sub__(self, o):
        return self + (-(o if isinstance(o, Cyclo) else Cyclo.rational(o)))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, Cyclo):
            q = Fraction(o)
            return Cyclo(self.n, [c * q for c in self.coeffs])
        a, b = self._common(o)
        out = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs))
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    out[i + j] += x * y
        return Cyclo(a.n, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Cyclo":
        if e < 0:
            raise ValueError("negative powers are taken through conjugate() for roots of unity")
        out, base = Cyclo.rational(1), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, o) -> bool:
        if not isinstance(o, Cyclo):
            try:
                o = Cyclo.rational(o)
            except (TypeError, ValueError):
                return NotImplemented
        a, b = self._common(o)
        return _strip(a.coeffs) == _strip(b.coeffs)

    def __hash__(self):
        if self.is_rational():
            return hash(self.to_fraction())
        return hash((self.n, tuple(_strip(self.coeffs))))

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not rational")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def conjugate(self) -> "Cyclo":
        c = [Fraction(0)] * self.n
        for i, v in enumerate(self.coeffs):
            c[(-i) % self.n] += v
        return Cyclo(self.n, c)

    def to_complex(self) -> complex:
        z = complex(math.cos(2 * math.pi / self.n), math.sin(2 * math.pi / self.n))
        return sum(float(c) * z ** i for i, c in enumerate(self.coeffs))

    def to_padic(self, p: int, prec: int) -> PadicNumber:
        """Image under the fixed embedding zeta_n -> teich(g)^((p-1)/n), g the least primitive root."""
        if self.is_rational():
            return PadicNumber.from_rational(p, self.to_fraction(), prec)
        if (p - 1) % self.n:
            raise PreconditionError(f"Q(zeta_{self.n}) does not embed in Q_{p}")
        g = teichmuller_int(primitive_root(p), p, prec + 2)
        z = g ** ((p - 1) // self.n)
        acc = PadicNumber.zero(p, prec)
        zi = PadicNumber.one(p, prec + 2)
        for c in self.coeffs:
            if c:
                acc = acc + zi * c
            zi = zi * z
        return acc.with_prec(prec)

    def to_json(self):
        if self.is_rational():
            return str(self.to_fraction())
        return {"cyclotomic_order": self.n, "coefficients": [str(c) for c in self.coeffs]}

    def __repr__(self) -> str:
        if self.is_rational():
            return str(self.to_fraction())
        return f"Cyclo({self.n}, {[str(c) for c in self.coeffs]})"


def _strip(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _reduce(n: int, c: list[Fraction]) -> list[Fraction]:
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    c = c[:]
    for i in range(len(c) - 1, deg - 1, -1):
        q = c[i]
        if q:
            for j, pj in enumerate(phi):
                c[i - deg + j] -= q * pj
    c = c[:deg] + [Fraction(0)] * max(0, deg - len(c))
    return c
