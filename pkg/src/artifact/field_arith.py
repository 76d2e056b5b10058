"""Exact arithmetic in F = Q or a real quadratic field Q(sqrt(D)).

Elements are pairs (a, b) of rationals meaning a + b*omega, where omega is
(1 + sqrt(D))/2 when D = 1 mod 4 and sqrt(D/4) otherwise, so that
omega^2 = t*omega + n with (t, n) = (1, (D-1)/4) or (0, D/4).

Integral ideals are stored in Hermite normal form: the Z-module spanned by
a and b + c*omega with a, c > 0 and 0 <= b < a.  For F = Q an ideal (m) is
stored as (m, 0, 1).

Narrow ray class groups modulo m (times both real places) are built from the
exact sequence

    E+ -> (o/m)^x -> Cl_m^+ -> Cl^+ -> 1.

An ideal I in the narrow class of a fixed representative J is written
I = gamma*J with gamma totally positive; the class of I is determined by the
pair (class of J, gamma mod m up to totally positive units).  The group
structure comes from a Schreier spanning tree over prime-ideal generators and
a Smith normal form of the resulting relation lattice.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Optional, Sequence

from .errors import BoundTooSmall, NonFundamentalDiscriminant, RamifiedPrime
from .padic_arith import PadicNumber, Qp2Number, hensel_lift_root


# ---------------------------------------------------------------------------
# integer helpers


def factorint(n: int) -> dict[int, int]:
    """Trial-division factorization of a positive integer."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorint(n) == {n: 1}


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i, v in enumerate(sieve) if v]


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_fundamental_discriminant(D: int) -> bool:
    if D == 1:
        return True
    if D % 4 == 1:
        return all(e == 1 for e in factorint(abs(D)).values())
    if D % 4 == 0:
        m = D // 4
        if m % 4 not in (2, 3):
            return False
        return all(e == 1 for e in factorint(abs(m)).values())
    return False


def _hnf2(vectors: Iterable[tuple[int, int]]) -> tuple[int, int, int]:
    """HNF (a, b, c) of the full-rank lattice spanned by integer vectors (x, y)."""
    pivot: Optional[tuple[int, int]] = None
    a = 0
    for x, y in vectors:
        if y == 0:
            a = math.gcd(a, x)
            continue
        if pivot is None:
            pivot = (x, y)
            continue
        px, py = pivot
        g, s, t = _xgcd(py, y)
        pivot = (s * px + t * x, g)
        a = math.gcd(a, (y // g) * px - (py // g) * x)
    if pivot is None or a == 0:
        raise ValueError("lattice is not of full rank")
    a = abs(a)
    bx, c = pivot
    if c < 0:
        bx, c = -bx, -c
    return a, bx % a, c


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ---------------------------------------------------------------------------
# fields and elements


class BaseField:
    """F = Q (disc 1) or the real quadratic field of fundamental discriminant disc."""

    def __init__(self, disc: int):
        if disc < 1 or not is_fundamental_discriminant(disc):
            raise NonFundamentalDiscriminant(f"{disc} is not 1 or a fundamental discriminant > 1")
        self.disc = disc
        self.degree = 1 if disc == 1 else 2
        if disc % 4 == 1:
            self.t, self.n = 1, (disc - 1) // 4
        else:
            self.t, self.n = 0, disc // 4
        self.kind = "rationals" if disc == 1 else "real-quadratic"

    def __repr__(self) -> str:
        return "Q" if self.degree == 1 else f"Q(sqrt({self.disc}))"

    def __eq__(self, other) -> bool:
        return isinstance(other, BaseField) and other.disc == self.disc

    def __hash__(self) -> int:
        return hash(("BaseField", self.disc))

    # elements ---------------------------------------------------------
    def element(self, a, b=0) -> "FieldElement":
        if self.degree == 1 and b != 0:
            raise ValueError("rational field has no omega")
        return FieldElement(self, Fraction(a), Fraction(b))

    @property
    def omega(self) -> "FieldElement":
        return self.element(0, 1)

    @property
    def sqrt_disc(self) -> "FieldElement":
        """sqrt(D) = 2*omega - t."""
        return self.element(-self.t, 2)

    def from_sqrt_coords(self, A, B) -> "FieldElement":
        """The element A + B*sqrt(D)."""
        A, B = Fraction(A), Fraction(B)
        return self.element(A - B * self.t, 2 * B)

    def min_poly_omega(self) -> list[int]:
        """Coefficients (constant first) of X^2 - tX - n."""
        return [-self.n, -self.t, 1]

    # units ------------------------------------------------------------
    @cached_property
    def units(self) -> "UnitData":
        if self.degree == 1:
            one = self.element(1)
            return UnitData(one, one, 2)
        D = self.disc
        y = 1
        while True:
            for sgn in (-4, 4):
                x2 = D * y * y + sgn
                x = math.isqrt(x2)
                if x * x == x2 and x > 0:
                    eps = self.from_sqrt_coords(Fraction(x, 2), Fraction(y, 2))
                    if eps.norm() == 1:
                        eps_plus = eps
                    else:
                        eps_plus = eps * eps
                    return UnitData(eps, eps_plus, 2)
            y += 1

    # ideals -----------------------------------------------------------
    def ideal(self, *gens) -> "IntegralIdeal":
        """Ideal generated by the given integral elements (or integers)."""
        vecs = []
        for g in gens:
            g = g if isinstance(g, FieldElement) else self.element(g)
            if not g.is_integral():
                raise ValueError("generators must be integral")
            a, b = int(g.a), int(g.b)
            vecs.append((a, b))
            if self.degree == 2:
                w = g * self.omega
                vecs.append((int(w.a), int(w.b)))
        if self.degree == 1:
            m = 0
            for a, _ in vecs:
                m = math.gcd(m, a)
            return IntegralIdeal(self, abs(m), 0, 1)
        return IntegralIdeal(self, *_hnf2(vecs))

    def unit_ideal(self) -> "IntegralIdeal":
        return self.ideal(1)

    @cached_property
    def different(self) -> "IntegralIdeal":
        if self.degree == 1:
            return self.unit_ideal()
        return self.ideal(self.sqrt_disc)

    def primes_above(self, p: int) -> list["IntegralIdeal"]:
        """Prime ideals above p, sorted by (norm, HNF second generator)."""
        return list(_primes_above_cached(self.disc, p))

    def splitting_type(self, p: int) -> str:
        if self.degree == 1:
            return "split"
        if self.disc % p == 0:
            return "ramified"
        ps = self.primes_above(p)
        return "split" if len(ps) == 2 else "inert"

    def factor(self, I: "IntegralIdeal") -> list[tuple["IntegralIdeal", int]]:
        return factor_ideal(self, I)

    def divisors(self, I: "IntegralIdeal") -> list["IntegralIdeal"]:
        return divisors(self, I)

    def ideals_of_norm(self, n: int) -> list["IntegralIdeal"]:
        return ideals_of_norm(self, n)

    def ideals_up_to(self, bound: int, coprime_to: int = 1) -> list["IntegralIdeal"]:
        out = []
        for n in range(1, bound + 1):
            if math.gcd(n, coprime_to) != 1:
                continue
            out.extend(ideals_of_norm(self, n))
        return out

    def prime_ideals_up_to(self, bound: int, coprime_to: int = 1) -> list["IntegralIdeal"]:
        return list(self.iter_prime_ideals(bound, coprime_to))

    def iter_prime_ideals(self, bound: int, coprime_to: int = 1) -> Iterator["IntegralIdeal"]:
        """Prime ideals of norm <= bound, in order of (norm, HNF)."""
        pending: list = []
        for q in primes_up_to(bound):
            while pending and pending[0][0] <= q:
                yield heapq.heappop(pending)[2]
            if coprime_to % q == 0:
                continue
            for P in self.primes_above(q):
                if P.norm == q:
                    yield P
                elif P.norm <= bound:
                    heapq.heappush(pending, (P.norm, P.key, P))
        while pending:
            yield heapq.heappop(pending)[2]

    # embeddings -------------------------------------------------------
    def real_embeddings(self, x: "FieldElement") -> tuple[float, ...]:
        if self.degree == 1:
            return (float(x.a),)
        s = math.sqrt(self.disc)
        w1 = (self.t + s) / 2
        w2 = (self.t - s) / 2
        return (float(x.a) + float(x.b) * w1, float(x.a) + float(x.b) * w2)


@dataclass(frozen=True)
class UnitData:
    eps0: "FieldElement"
    eps_plus: "FieldElement"
    torsion: int


class FieldElement:
    __slots__ = ("F", "a", "b")

    def __init__(self, F: BaseField, a: Fraction, b: Fraction):
        self.F = F
        self.a = a
        self.b = b

    def _c(self, o) -> "FieldElement":
        if isinstance(o, FieldElement):
            return o
        return FieldElement(self.F, Fraction(o), Fraction(0))

    def __add__(self, o):
        o = self._c(o)
        return FieldElement(self.F, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.F, -self.a, -self.b)

    def __sub__(self, o):
        return self + (-self._c(o))

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        o = self._c(o)
        F = self.F
        bb = self.b * o.b
        return FieldElement(F, self.a * o.a + F.n * bb, self.a * o.b + self.b * o.a + F.t * bb)

    __rmul__ = __mul__

    def conj(self) -> "FieldElement":
        """Image under the nontrivial automorphism (omega -> t - omega)."""
        return FieldElement(self.F, self.a + self.F.t * self.b, -self.b)

    def norm(self) -> Fraction:
        F = self.F
        return self.a * self.a + F.t * self.a * self.b - F.n * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a + self.F.t * self.b if self.F.degree == 2 else self.a

    def inverse(self) -> "FieldElement":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.F.degree == 1:
            return FieldElement(self.F, 1 / self.a, Fraction(0))
        c = self.conj()
        return FieldElement(self.F, c.a / n, c.b / n)

    def __truediv__(self, o):
        return self * self._c(o).inverse()

    def __rtruediv__(self, o):
        return self._c(o) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        r = FieldElement(self.F, Fraction(1), Fraction(0))
        base = self
        while e:
            if e & 1:
                r = r * base
            e >>= 1
            if e:
                base = base * base
        return r

    def __eq__(self, o) -> bool:
        if isinstance(o, (int, Fraction)):
            o = self._c(o)
        if not isinstance(o, FieldElement):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self) -> str:
        if self.F.degree == 1:
            return str(self.a)
        return f"{self.a} + {self.b}*w"

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def is_rational(self) -> bool:
        return self.b == 0

    def sqrt_coords(self) -> tuple[Fraction, Fraction]:
        """(A, B) with self = A + B*sqrt(D)."""
        return self.a + self.b * self.F.t / 2, self.b / 2

    def signs(self) -> tuple[int, ...]:
        """Exact signs of the real embeddings (omega -> larger root first)."""
        if self.F.degree == 1:
            return (_sgn(self.a),)
        A, B = self.sqrt_coords()
        return (_sgn_surd(A, B, self.F.disc), _sgn_surd(A, -B, self.F.disc))

    def is_totally_positive(self) -> bool:
        return all(s > 0 for s in self.signs())

    def to_json(self):
        if self.F.degree == 1:
            return str(self.a)
        return [str(self.a), str(self.b)]


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def _sgn_surd(A: Fraction, B: Fraction, D: int) -> int:
    """Sign of A + B*sqrt(D)."""
    sa, sb = _sgn(A), _sgn(B)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare A^2 and B^2 D
    d = A * A - B * B * D
    return sa if d > 0 else (sb if d < 0 else 0)


# ---------------------------------------------------------------------------
# ideals


class IntegralIdeal:
    """Nonzero integral ideal, Z-basis {a, b + c*omega} in Hermite normal form."""

    __slots__ = ("F", "a", "b", "c")

    def __init__(self, F: BaseField, a: int, b: int, c: int):
        self.F = F
        self.a, self.b, self.c = a, b, c

    @property
    def norm(self) -> int:
        return self.a * self.c if self.F.degree == 2 else self.a

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def __eq__(self, o) -> bool:
        return isinstance(o, IntegralIdeal) and self.F == o.F and self.key == o.key

    def __hash__(self):
        return hash((self.F.disc, self.key))

    def __lt__(self, o):
        return (self.norm, self.key) < (o.norm, o.key)

    def __repr__(self) -> str:
        if self.F.degree == 1:
            return f"({self.a})"
        return f"[{self.a}, {self.b}+{self.c}w]"

    def to_json(self):
        return {"norm": self.norm, "hnf": [self.a, self.b, self.c]}

    def basis(self) -> tuple[FieldElement, ...]:
        if self.F.degree == 1:
            return (self.F.element(self.a),)
        return self.F.element(self.a), self.F.element(self.b, self.c)

    def contains(self, x: FieldElement) -> bool:
        if not x.is_integral():
            return False
        xa, xb = int(x.a), int(x.b)
        if self.F.degree == 1:
            return xa % self.a == 0
        if xb % self.c:
            return False
        return (xa - (xb // self.c) * self.b) % self.a == 0

    def contains_ideal(self, J: "IntegralIdeal") -> bool:
        return all(self.contains(g) for g in J.basis())

    def divides(self, J: "IntegralIdeal") -> bool:
        return self.contains_ideal(J)

    def __mul__(self, J: "IntegralIdeal") -> "IntegralIdeal":
        F = self.F
        if F.degree == 1:
            return IntegralIdeal(F, self.a * J.a, 0, 1)
        gens = []
        for x in self.basis():
            for y in J.basis():
                z = x * y
                gens.append((int(z.a), int(z.b)))
        return IntegralIdeal(F, *_hnf2(gens))

    def __pow__(self, e: int) -> "IntegralIdeal":
        r = self.F.unit_ideal()
        for _ in range(e):
            r = r * self
        return r

    def conj(self) -> "IntegralIdeal":
        if self.F.degree == 1:
            return self
        gens = []
        for x in self.basis():
            for y in (x.conj(), x.conj() * self.F.omega):
                gens.append((int(y.a), int(y.b)))
        return IntegralIdeal(self.F, *_hnf2(gens))

    def div_int(self, m: int) -> "IntegralIdeal":
        """The ideal I/m; requires I contained in m*o."""
        if self.F.degree == 1:
            if self.a % m:
                raise ValueError("not divisible")
            return IntegralIdeal(self.F, self.a // m, 0, 1)
        if self.a % m or self.b % m or self.c % m:
            raise ValueError("not divisible")
        return IntegralIdeal(self.F, self.a // m, self.b // m, self.c // m)

    def is_coprime_to(self, J: "IntegralIdeal") -> bool:
        return self.F.ideal(*(self.basis() + J.basis())).norm == 1

    def smallest_integer(self) -> int:
        return self.a

    def prime_divisors(self) -> list["IntegralIdeal"]:
        return [P for P, _ in factor_ideal(self.F, self)]

    def valuation(self, P: "IntegralIdeal") -> int:
        for Q, e in factor_ideal(self.F, self):
            if Q == P:
                return e
        return 0

    def residue_prime(self) -> int:
        """For a prime ideal: the rational prime below it."""
        return next(iter(factorint(self.norm)))


def ideal_quotient_by_prime(F: BaseField, I: IntegralIdeal, P: IntegralIdeal) -> IntegralIdeal:
    """I * P^{-1} for a prime P dividing I."""
    q = P.residue_prime()
    if F.degree == 1 or P.norm == q * q:
        return I.div_int(q)
    return (I * P.conj()).div_int(q)


def factor_ideal(F: BaseField, I: IntegralIdeal) -> list[tuple[IntegralIdeal, int]]:
    return list(_factor_cached(F.disc, I.key))


@lru_cache(maxsize=200000)
def _factor_cached(disc: int, key: tuple[int, int, int]) -> tuple:
    F = _field(disc)
    I = IntegralIdeal(F, *key)
    out = []
    for q in sorted(factorint(I.norm)):
        for P in F.primes_above(q):
            e = 0
            while P.contains_ideal(I):
                I = ideal_quotient_by_prime(F, I, P)
                e += 1
            if e:
                out.append((P, e))
    out.sort(key=lambda t: (t[0].norm, t[0].b))
    return tuple(out)


def sqrt_mod_p(a: int, p: int) -> Optional[int]:
    """A square root of a modulo the prime p (Tonelli-Shanks), or None."""
    a %= p
    if a == 0 or p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


@lru_cache(maxsize=None)
def _primes_above_cached(disc: int, p: int) -> tuple:
    F = _field(disc)
    if F.degree == 1:
        return (IntegralIdeal(F, p, 0, 1),)
    if p == 2:
        roots = [r for r in range(2) if (r * r - F.t * r - F.n) % 2 == 0]
    else:
        s = sqrt_mod_p(disc, p)
        if s is None:
            roots = []
        else:
            inv2 = (p + 1) // 2
            roots = sorted({(F.t + s) * inv2 % p, (F.t - s) * inv2 % p})
    if not roots:
        return (IntegralIdeal(F, p, 0, p),)
    out = {F.ideal(p, F.element(-r, 1)) for r in roots}
    return tuple(sorted(out, key=lambda I: (I.norm, I.b)))


@lru_cache(maxsize=None)
def _field(disc: int) -> BaseField:
    return BaseField(disc)


def create_field(disc: int) -> BaseField:
    return _field(disc)


def divisors(F: BaseField, I: IntegralIdeal) -> list[IntegralIdeal]:
    fac = factor_ideal(F, I)
    out = []
    for exps in itertools.product(*[range(e + 1) for _, e in fac]):
        J = F.unit_ideal()
        for (P, _), k in zip(fac, exps):
            if k:
                J = J * P ** k
        out.append(J)
    return sorted(out)


def ideals_of_norm(F: BaseField, n: int) -> list[IntegralIdeal]:
    return list(_ideals_of_norm_cached(F.disc, n))


@lru_cache(maxsize=100000)
def _ideals_of_norm_cached(disc: int, n: int) -> tuple:
    F = _field(disc)
    if n == 1:
        return (F.unit_ideal(),)
    choices = []
    for q, e in sorted(factorint(n).items()):
        Ps = F.primes_above(q)
        opts = []
        if len(Ps) == 2:
            for i in range(e + 1):
                opts.append(Ps[0] ** i * Ps[1] ** (e - i))
        elif Ps[0].norm == q:
            opts.append(Ps[0] ** e)
        elif e % 2 == 0:
            opts.append(Ps[0] ** (e // 2))
        if not opts:
            return ()
        choices.append(opts)
    out = []
    for combo in itertools.product(*choices):
        J = F.unit_ideal()
        for X in combo:
            J = J * X
        out.append(J)
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# principality


def find_generator(F: BaseField, I: IntegralIdeal) -> Optional[FieldElement]:
    """Some beta with (beta) = I, or None when I is not principal."""
    N = I.norm
    if F.degree == 1:
        return F.element(I.a)
    eps = F.real_embeddings(F.units.eps0)[0]
    sD = math.sqrt(F.disc)
    w1 = (F.t + sD) / 2
    R1 = math.sqrt(N) * eps * (1 + 1e-9) + 1e-9
    R2 = math.sqrt(N) * (1 + 1e-9) + 1e-9
    ymax = int((R1 + R2) / (I.c * sD)) + 1
    for y in range(0, ymax + 1):
        for ys in ((y,) if y == 0 else (y, -y)):
            base = ys * (I.b + I.c * w1)
            lo = math.floor((-R1 - base) / I.a)
            hi = math.ceil((R1 - base) / I.a)
            for x in range(lo, hi + 1):
                beta = F.element(x * I.a + ys * I.b, ys * I.c)
                if abs(beta.norm()) == N and beta != 0:
                    return beta
    return None


def totally_positive_generator(F: BaseField, I: IntegralIdeal) -> Optional[FieldElement]:
    """A totally positive generator of I, or None if I is not narrowly principal."""
    beta = find_generator(F, I)
    if beta is None:
        return None
    if F.degree == 1:
        return beta
    s = beta.signs()
    if s[0] != s[1]:
        eps = F.units.eps0
        if eps.norm() == 1:
            return None
        beta = beta * eps
        s = beta.signs()
    return beta if s[0] > 0 else -beta


def narrowly_equivalent(F: BaseField, I: IntegralIdeal, J: IntegralIdeal) -> Optional[FieldElement]:
    """gamma totally positive with I = gamma*J, or None."""
    beta = totally_positive_generator(F, I * J.conj())
    if beta is None:
        return None
    return beta / J.norm


# ---------------------------------------------------------------------------
# residues modulo an ideal


class ResidueRing:
    """The finite ring o/m with canonical representatives."""

    def __init__(self, F: BaseField, m: IntegralIdeal):
        self.F = F
        self.m = m
        self.phi = 1
        for P, e in factor_ideal(F, m):
            self.phi *= P.norm ** (e - 1) * (P.norm - 1)

    def reduce(self, x: FieldElement) -> tuple[int, int]:
        """Canonical residue of x, which must be integral at all primes of m."""
        m = self.m
        if m.norm == 1:
            return (0, 0)
        den = math.lcm(x.a.denominator, x.b.denominator)
        if den != 1:
            if math.gcd(den, m.a) != 1:
                raise ValueError("element not integral at the modulus")
            inv = pow(den, -1, m.a)
            x = FieldElement(self.F, x.a * den * inv, x.b * den * inv)
        xa, xb = int(x.a), int(x.b)
        if self.F.degree == 1:
            return (xa % m.a, 0)
        q = xb // m.c
        xa -= q * m.b
        xb -= q * m.c
        return (xa % m.a, xb)

    def element(self, r: tuple[int, int]) -> FieldElement:
        return self.F.element(r[0], r[1])

    def mul(self, r: tuple[int, int], s: tuple[int, int]) -> tuple[int, int]:
        return self.reduce(self.element(r) * self.element(s))

    def power(self, r, e: int):
        out = self.reduce(self.F.element(1))
        base = r
        while e:
            if e & 1:
                out = self.mul(out, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return out

    def inverse(self, r):
        return self.power(r, self.phi - 1)


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(rows: list[list[int]], ncols: int):
    """Return (diag, Q) with rows*Q row-equivalent to diag(diag) (r = ncols).

    ``rows`` spans a full-rank sublattice of Z^ncols.  Q is unimodular
    (ncols x ncols) and Z^ncols / rowspace is isomorphic to sum Z/d_i via
    w -> (w*Q)_i mod d_i.  Also returns Q^{-1}.
    """
    A = [r[:] for r in rows if any(r)]
    n = ncols
    Q = [[int(i == j) for j in range(n)] for i in range(n)]
    Qi = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op_swap(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in Q:
            r[i], r[j] = r[j], r[i]
        Qi[i], Qi[j] = Qi[j], Qi[i]

    def col_op_add(dst, src, k):
        # column dst += k * column src
        for r in A:
            r[dst] += k * r[src]
        for r in Q:
            r[dst] += k * r[src]
        # inverse: row src of Qi -= k * row dst
        Qi[src] = [a - k * b for a, b in zip(Qi[src], Qi[dst])]

    diag = []
    t = 0
    while t < n:
        A = [r for r in A if any(r[t:])]
        if not A:
            break
        while True:
            # pick smallest nonzero entry in the remaining block
            best = None
            for i, r in enumerate(A):
                for j in range(t, n):
                    if r[j] and (best is None or abs(r[j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            i, j = best
            A[0], A[i] = A[i], A[0]
            if j != t:
                col_op_swap(t, j)
            piv = A[0][t]
            done = True
            for jj in range(t + 1, n):
                q = A[0][jj] // piv
                if q:
                    col_op_add(jj, t, -q)
                if A[0][jj]:
                    done = False
            for r in A[1:]:
                q = r[t] // piv
                if q:
                    for jj in range(t, n):
                        r[jj] -= q * A[0][jj]
                if r[t]:
                    done = False
            if not done:
                continue
            bad = None
            for r in A[1:]:
                for jj in range(t + 1, n):
                    if r[jj] % piv:
                        bad = r
                        break
                if bad:
                    break
            if bad is None:
                break
            A[0] = [a + b for a, b in zip(A[0], bad)]
        if A[0][t] < 0:
            A[0] = [-x for x in A[0]]
        diag.append(abs(A[0][t]))
        A = A[1:]
        t += 1
    if len(diag) < n:
        raise ValueError("relation lattice is not of full rank")
    return diag, Q, Qi


# ---------------------------------------------------------------------------
# narrow ray class groups


class NarrowRayClassGroup:
    """Cl_m^+ for modulus m times all real places."""

    def __init__(self, F: BaseField, modulus: IntegralIdeal, bound: Optional[int] = None):
        self.F = F
        self.modulus = modulus
        self.R = ResidueRing(F, modulus)
        self.bound = bound if bound is not None else 30 * modulus.norm ** 2 * F.disc
        self._setup_narrow_classes()
        self._setup_units()
        self.expected_order = self.h_plus * self.R.phi // self.unit_index
        self._build()

    # narrow class group representatives coprime to the modulus
    def _setup_narrow_classes(self):
        F, m = self.F, self.modulus
        reps = [F.unit_ideal()]
        if F.degree == 2:
            gens = F.prime_ideals_up_to(max(2, math.isqrt(F.disc) // 2 + 1))
            gens.append(F.ideal(F.sqrt_disc))
            frontier = list(reps)
            while frontier:
                new = []
                for R in frontier:
                    for g in gens:
                        X = R * g
                        if not any(narrowly_equivalent(F, X, J) is not None for J in reps):
                            reps.append(X)
                            new.append(X)
                frontier = new
            # replace representatives by primes coprime to the modulus
            good = [F.unit_ideal()]
            for J in reps[1:]:
                for P in F.iter_prime_ideals(10 ** 5, coprime_to=m.a):
                    if narrowly_equivalent(F, P, J) is not None:
                        good.append(P)
                        break
            reps = good
        self.narrow_reps = reps
        self.h_plus = len(reps)

    def _setup_units(self):
        F = self.F
        if F.degree == 1 or self.modulus.norm == 1:
            self.unit_index = 1
            self._unit_orbit = [self.R.reduce(F.element(1))]
            return
        e = self.R.reduce(F.units.eps_plus)
        orbit = [self.R.reduce(F.element(1))]
        cur = e
        while cur != orbit[0]:
            orbit.append(cur)
            cur = self.R.mul(cur, e)
        self._unit_orbit = orbit
        self.unit_index = len(orbit)

    def _canon(self, r: tuple[int, int]) -> tuple[int, int]:
        if len(self._unit_orbit) == 1:
            return r
        return min(self.R.mul(r, u) for u in self._unit_orbit)

    def _narrow_index(self, I: IntegralIdeal) -> tuple[int, FieldElement]:
        F = self.F
        for j, J in enumerate(self.narrow_reps):
            g = narrowly_equivalent(F, I, J)
            if g is not None:
                return j, g
        raise RuntimeError("ideal not in any narrow class (bug)")

    def class_key(self, I: IntegralIdeal) -> tuple:
        if not I.is_coprime_to(self.modulus):
            raise ValueError("ideal not coprime to the modulus")
        j, gamma = self._narrow_index(I)
        return (j, self._canon(self.R.reduce(gamma)))

    def _key_mul(self, k1, k2):
        j3, delta = self._rep_products[(k1[0], k2[0])]
        r = self.R.mul(self.R.mul(k1[1], k2[1]), delta)
        return (j3, self._canon(r))

    def _build(self):
        F, m = self.F, self.modulus
        h = self.h_plus
        self._rep_products = {}
        for i in range(h):
            for j in range(h):
                X = self.narrow_reps[i] * self.narrow_reps[j]
                jj, gamma = self._narrow_index(X)
                self._rep_products[(i, j)] = (jj, self.R.reduce(gamma))
        identity = (0, self._canon(self.R.reduce(F.element(1))))
        gens: list[IntegralIdeal] = []
        gen_keys: list[tuple] = []
        words = {identity: ()}
        elements = [identity]
        if self.expected_order > 1:
            for P in F.iter_prime_ideals(self.bound, coprime_to=m.a):
                if not P.is_coprime_to(m):
                    continue
                k = self.class_key(P)
                if k in words:
                    continue
                gens.append(P)
                gen_keys.append(k)
                # closure
                r = len(gens)
                words = {key: w + (0,) for key, w in words.items()}
                queue = deque(words.keys())
                while queue:
                    x = queue.popleft()
                    for gi, gk in enumerate(gen_keys):
                        y = self._key_mul(x, gk)
                        if y not in words:
                            w = list(words[x])
                            w[gi] += 1
                            words[y] = tuple(w)
                            queue.append(y)
                if len(words) == self.expected_order:
                    break
                if len(words) > self.expected_order:
                    raise RuntimeError("group larger than predicted order (bug)")
            if len(words) != self.expected_order:
                raise BoundTooSmall(f"generators up to norm {self.bound} do not reach order {self.expected_order}")
        self.gen_ideals = gens
        self.gen_keys = gen_keys
        self._words = words
        r = len(gens)
        # relations from the Schreier tree: word(x) + e_i - word(x*g_i)
        rels = []
        for x, w in words.items():
            for gi, gk in enumerate(gen_keys):
                y = self._key_mul(x, gk)
                v = [a - b for a, b in zip(w, words[y])]
                v[gi] += 1
                if any(v):
                    rels.append(v)
        if r == 0:
            self.invariants, self._Q, self._Qi = [], [], []
        else:
            rels = _hnf_rows(rels, r)
            diag, Q, Qi = smith_normal_form(rels, r)
            keep = [i for i, d in enumerate(diag) if d != 1]
            self.invariants = [diag[i] for i in keep]
            self._Q = [[row[i] for i in keep] for row in Q]
            self._Qi = [Qi[i] for i in keep]
        prod = 1
        for d in self.invariants:
            prod *= d
        if prod != self.expected_order:
            raise RuntimeError("Smith normal form disagrees with group order (bug)")
        self._key_to_coords = {k: self._word_to_coords(w) for k, w in words.items()}
        self.order = prod

    def _word_to_coords(self, w: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(w[j] * self._Q[j][i] for j in range(len(w))) % d
                     for i, d in enumerate(self.invariants))

    def coords(self, I: IntegralIdeal) -> tuple[int, ...]:
        """Normal-form word of the class of I in the Smith generators."""
        return self._key_to_coords[self.class_key(I)]

    def coords_of_key(self, key) -> tuple[int, ...]:
        return self._key_to_coords[key]

    def elements(self) -> list[tuple[int, ...]]:
        return sorted(self._key_to_coords.values())

    def generator_words(self) -> list[list[int]]:
        """Exponent vectors (in the prime generators) of the Smith generators."""
        return [list(row) for row in self._Qi]

    def add(self, c1, c2):
        return tuple((a + b) % d for a, b, d in zip(c1, c2, self.invariants))

    def class_representatives(self) -> dict[tuple, IntegralIdeal]:
        """Integral ideal of smallest norm in each class."""
        if hasattr(self, "_reps"):
            return self._reps
        reps: dict[tuple, IntegralIdeal] = {}
        n = 1
        while len(reps) < self.order:
            if math.gcd(n, self.modulus.a) == 1 or self.modulus.norm == 1:
                for I in ideals_of_norm(self.F, n):
                    if I.is_coprime_to(self.modulus):
                        c = self.coords(I)
                        reps.setdefault(c, I)
            n += 1
        self._reps = reps
        return reps

    def sign_classes(self) -> list[tuple[int, ...]]:
        """Classes of (alpha) with alpha = 1 mod m and alpha negative at exactly one real place."""
        F, m = self.F, self.modulus
        out = []
        a = m.a
        if F.degree == 1:
            alpha = F.element(1 - a * 2) if a > 1 else F.element(-1)
            return [self.coords(F.ideal(abs(alpha.a)))]
        targets = [(-1, 1), (1, -1)]
        for target in targets:
            found = None
            for x, y in itertools.product(range(-40, 41), repeat=2):
                alpha = F.element(1 + a * x, a * y)
                if alpha.signs() == target:
                    found = alpha
                    break
            if found is None:
                raise RuntimeError("no sign element found")
            I = F.ideal(found)
            out.append(self.coords(I))
        return out

    def to_json(self) -> dict:
        return {"modulus": self.modulus.to_json(), "order": self.order,
                "invariants": self.invariants,
                "generators": [P.to_json() for P in self.gen_ideals],
                "smith_generator_words": self.generator_words()}


def _hnf_rows(rows: list[list[int]], n: int) -> list[list[int]]:
    """Row-style Hermite reduction to at most n independent rows."""
    basis: list[Optional[list[int]]] = [None] * n
    for v in rows:
        v = v[:]
        for i in range(n):
            if v[i] == 0:
                continue
            if basis[i] is None:
                if v[i] < 0:
                    v = [-x for x in v]
                basis[i] = v
                break
            b = basis[i]
            g, s, t = _xgcd(b[i], v[i])
            new_b = [s * x + t * y for x, y in zip(b, v)]
            v = [(b[i] // g) * y - (v[i] // g) * x for x, y in zip(b, v)]
            basis[i] = new_b
            # reduce entries of the remaining vector later in the loop
    out = [b for b in basis if b is not None]
    # keep entries small: reduce above-diagonal
    for i, b in enumerate(out):
        piv = next(k for k, x in enumerate(b) if x)
        for j in range(i):
            q = out[j][piv] // b[piv]
            if q:
                out[j] = [x - q * y for x, y in zip(out[j], b)]
    return out


_GROUP_CACHE: dict = {}


def narrow_ray_class_group(F: BaseField, modulus: IntegralIdeal, bound: Optional[int] = None) -> NarrowRayClassGroup:
    key = (F.disc, modulus.key, bound)
    G = _GROUP_CACHE.get(key)
    if G is None:
        G = NarrowRayClassGroup(F, modulus, bound)
        _GROUP_CACHE[key] = G
    return G


# ---------------------------------------------------------------------------
# p-adic embeddings


def embed_padic(F: BaseField, x: FieldElement, p: int, prec: int, prime: Optional[IntegralIdeal] = None):
    """Image of x in the completion of F at a prime above p.

    For p split the completion is Q_p and the prime defaults to the first of
    ``primes_above(p)``; for p inert the value is a :class:`Qp2Number` in
    Q_p(sqrt(D)).
    """
    if p == 2:
        raise ValueError("p must be odd")
    if F.degree == 1:
        return PadicNumber.from_rational(p, x.a, prec)
    if F.disc % p == 0:
        raise RamifiedPrime(f"{p} ramifies in {F}")
    Ps = F.primes_above(p)
    if len(Ps) == 1:
        A, B = x.sqrt_coords()
        return Qp2Number(PadicNumber.from_rational(p, A, prec),
                         PadicNumber.from_rational(p, B, prec), F.disc)
    P = prime if prime is not None else Ps[0]
    if P not in Ps:
        raise ValueError("prime does not lie above p")
    root = hensel_lift_root(F.min_poly_omega(), (-P.b) % p, p, prec + 4)
    return PadicNumber.from_rational(p, x.a, prec) + PadicNumber.from_rational(p, x.b, prec) * root


def omega_padic_root(F: BaseField, P: IntegralIdeal, prec: int) -> int:
    """Integer image of omega in Z_p for a split prime P (mod p**prec)."""
    p = P.residue_prime()
    return hensel_lift_root(F.min_poly_omega(), (-P.b) % p, p, prec)
