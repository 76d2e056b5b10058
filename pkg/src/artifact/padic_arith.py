"""Capped-absolute-precision p-adic arithmetic.

A :class:`PadicNumber` is known modulo ``p**prec`` (absolute precision).  It is
stored as ``p**val * unit`` with ``unit`` coprime to ``p`` and reduced modulo
``p**(prec - val)``; a number that is zero to the available precision has
``unit == 0`` and ``val == prec``.

Precision rules (absolute precision of the result):

* ``x + y``:  ``min(N_x, N_y)``
* ``x * y``:  ``min(N_x + v_y, N_y + v_x)``
* ``x / y``:  ``min(N_x - v_y, N_y + v_x - 2 v_y)``
* ``log``:    ``N_rel - ceil(log_p(series length))`` where ``N_rel`` is the
  relative precision of the argument.

The module also provides the unramified quadratic extension
(:class:`Qp2Number`), truncated power series in ``Z_p[[X]]``
(:class:`PadicSeries`), dual numbers and the precision ledger used by
:func:`fit_series`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import NonUnit, SingularSystem, ZeroToPrecision

Rational = Union[int, Fraction]
_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def vp(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_rational(q: Rational, p: int) -> int:
    q = Fraction(q)
    return vp(q.numerator, p) - vp(q.denominator, p)


def ceil_log(n: int, p: int) -> int:
    """Smallest c >= 0 with p**c >= n."""
    c, t = 0, 1
    while t < n:
        t *= p
        c += 1
    return c


class PadicNumber:
    """An element of Q_p known to absolute precision ``prec``."""

    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val: int, unit: int, prec: int):
        if val >= prec or unit % p ** (prec - val) == 0:
            val, unit = prec, 0
        else:
            unit %= p ** (prec - val)
            while unit % p == 0:
                unit //= p
                val += 1
        self.p = p
        self.val = val
        self.unit = unit
        self.prec = prec

    # construction -----------------------------------------------------
    @classmethod
    def from_rational(cls, p: int, q: Rational, prec: int) -> "PadicNumber":
        q = Fraction(q)
        if q == 0:
            return cls(p, prec, 0, prec)
        v = vp_rational(q, p)
        if v >= prec:
            return cls(p, prec, 0, prec)
        num = q.numerator // p ** max(v, 0)
        den = q.denominator // p ** max(-v, 0)
        mod = p ** (prec - v)
        return cls(p, v, num * pow(den, -1, mod), prec)

    @classmethod
    def zero(cls, p: int, prec: int) -> "PadicNumber":
        return cls(p, prec, 0, prec)

    @classmethod
    def one(cls, p: int, prec: int) -> "PadicNumber":
        return cls(p, 0, 1, prec)

    # inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.unit == 0

    def is_unit(self) -> bool:
        return self.unit != 0 and self.val == 0

    @property
    def relative_precision(self) -> int:
        return self.prec - self.val

    def lift(self) -> Fraction:
        """The canonical rational representative p**val * unit."""
        if self.unit == 0:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def residue(self, n: int) -> int:
        """Integer representative modulo p**n of an integral number (n <= prec)."""
        if self.val < 0:
            raise NonUnit("number is not integral")
        n = min(n, self.prec)
        return (self.unit * self.p ** self.val) % self.p ** n

    def digits(self) -> str:
        """Base-p digits of the unit part, most significant first, zero padded.

        Digits use 0-9a-z for p <= 36 and comma-separated decimals beyond.
        """
        if self.unit == 0:
            return ""
        out = []
        u = self.unit
        for _ in range(self.prec - self.val):
            u, r = divmod(u, self.p)
            out.append(r)
        out.reverse()
        if self.p <= 36:
            return "".join(_DIGITS[d] for d in out)
        return ",".join(str(d) for d in out)

    def to_json(self) -> dict:
        return {"p": self.p, "val": self.val, "unit": self.digits(), "prec": self.prec}

    @classmethod
    def from_json(cls, d: dict) -> "PadicNumber":
        p, val, prec = d["p"], d["val"], d["prec"]
        s = d["unit"]
        if not s:
            return cls.zero(p, prec)
        digs = [int(c) for c in s.split(",")] if p > 36 else [_DIGITS.index(c) for c in s]
        u = 0
        for dg in digs:
            u = u * p + dg
        return cls(p, val, u, prec)

    def with_prec(self, n: int) -> "PadicNumber":
        return PadicNumber(self.p, self.val, self.unit, min(n, self.prec))

    def __repr__(self) -> str:
        if self.unit == 0:
            return f"O({self.p}^{self.prec})"
        return f"{self.lift()} + O({self.p}^{self.prec})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PadicNumber):
            return NotImplemented
        return (self.p, self.val, self.unit, self.prec) == (
            other.p, other.val, other.unit, other.prec)

    def __hash__(self) -> int:
        return hash((self.p, self.val, self.unit, self.prec))

    def agrees(self, other: "PadicNumber | Rational", n: int | None = None) -> bool:
        """True when the two numbers agree modulo p**n (default: joint precision)."""
        d = self - other
        if n is None:
            return d.is_zero()
        return d.val >= n

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError("mismatched primes")
            return other
        q = Fraction(other)
        vq = 0 if q == 0 else vp_rational(q, self.p)
        n = self.prec + abs(vq) + abs(self.val) + 2
        return PadicNumber.from_rational(self.p, q, n)

    def __add__(self, other) -> "PadicNumber":
        o = self._coerce(other)
        prec = min(self.prec, o.prec)
        m = min(self.val, o.val)
        if m >= prec:
            return PadicNumber.zero(self.p, prec)
        s = self.unit * self.p ** (self.val - m) + o.unit * self.p ** (o.val - m)
        return PadicNumber(self.p, m, s, prec)

    __radd__ = __add__

    def __neg__(self) -> "PadicNumber":
        return PadicNumber(self.p, self.val, -self.unit, self.prec)

    def __sub__(self, other) -> "PadicNumber":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PadicNumber":
        return self._coerce(other) - self

    def __mul__(self, other) -> "PadicNumber":
        o = self._coerce(other)
        prec = min(self.prec + o.val, o.prec + self.val)
        return PadicNumber(self.p, self.val + o.val, self.unit * o.unit, prec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PadicNumber":
        o = self._coerce(other)
        if o.is_zero():
            raise ZeroToPrecision("division by a number that is zero to precision")
        prec = min(self.prec - o.val, o.prec + self.val - 2 * o.val)
        val = self.val - o.val
        if self.is_zero() or val >= prec:
            return PadicNumber.zero(self.p, prec)
        mod = self.p ** (prec - val)
        return PadicNumber(self.p, val, self.unit * pow(o.unit, -1, mod), prec)

    def __rtruediv__(self, other) -> "PadicNumber":
        return self._coerce(other) / self

    def __pow__(self, e: int) -> "PadicNumber":
        if e < 0:
            d = self ** (-e)
            return PadicNumber.one(self.p, d.prec + abs(d.val) + 1) / d
        if e == 0:
            return PadicNumber.one(self.p, self.prec + abs(self.val) + 1)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result


def as_padic(x, p: int, prec: int) -> PadicNumber:
    if isinstance(x, PadicNumber):
        return x
    return PadicNumber.from_rational(p, x, prec)


# ---------------------------------------------------------------------------
# logarithm and Teichmuller lift


def _log_principal(t: int, p: int, r: int, mul, unit_scale, zero):
    """Sum of (-1)^(k+1) t^k / k modulo p**r for t in p*(ring).

    ``mul`` multiplies ring elements modulo the working modulus,
    ``unit_scale(x, c, d)`` divides x exactly by p**d and multiplies by c.
    Returns (sum, number of terms used).
    """
    n_terms = 1
    while (n_terms + 1) - ceil_log(n_terms + 2, p) < r:
        n_terms += 1
    e = ceil_log(n_terms + 1, p)
    total = zero
    power = None
    for k in range(1, n_terms + 1):
        power = t if power is None else mul(power, t, e)
        d = vp(k, p)
        kk = k // p ** d
        c = pow(kk, -1, p ** r)
        if k % 2 == 0:
            c = -c
        total = unit_scale(total, power, c, d)
    return total, n_terms


def padic_log(x: PadicNumber) -> PadicNumber:
    """Iwasawa logarithm with log_p(p) = 0."""
    if x.is_zero():
        raise ZeroToPrecision("log of a number that is zero to precision")
    p = x.p
    r = x.prec - x.val
    if r <= 0:
        raise ZeroToPrecision("no relative precision")
    mod = p ** r
    y = pow(x.unit, p - 1, mod)
    t = (y - 1) % mod
    if t == 0:
        return PadicNumber.zero(p, r)
    n_guard = ceil_log(r + 2, p) + 2
    wmod = p ** (r + n_guard)

    def mul(a, b, _e):
        return (a * b) % wmod

    def scale(total, power, c, d):
        return (total + (power // p ** d) * c) % mod

    s, n_terms = _log_principal(t, p, r, mul, scale, 0)
    s = (s * pow(p - 1, -1, mod)) % mod
    return PadicNumber(p, 0, s, r - ceil_log(n_terms, p))


def teichmuller(x: PadicNumber) -> PadicNumber:
    """The (p-1)-th root of unity congruent to x modulo p."""
    if x.val != 0 or x.is_zero():
        raise NonUnit("Teichmuller lift needs a unit")
    p, n = x.p, x.prec
    mod = p ** n
    return PadicNumber(p, 0, pow(x.unit, p ** (n - 1), mod), n)


def teichmuller_int(a: int, p: int, prec: int) -> PadicNumber:
    return teichmuller(PadicNumber.from_rational(p, a, prec))


def primitive_root(p: int) -> int:
    """Smallest primitive root modulo an odd prime p."""
    factors = _prime_factors(p - 1)
    g = 2
    while True:
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
        g += 1


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def weight_point(p: int, u, k: int, prec: int = 16) -> PadicNumber:
    """X_k = u^(k-1) - 1, the weight-k specialization point."""
    if k < 1:
        raise ValueError("k must be >= 1")
    uu = as_padic(u, p, prec)
    return uu ** (k - 1) - 1


# ---------------------------------------------------------------------------
# unramified quadratic extension


class Qp2Number:
    """Element a + b*sqrt(d) of Q_p(sqrt(d)), d a quadratic non-residue unit."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a: PadicNumber, b: PadicNumber, d: int):
        self.a = a
        self.b = b
        self.d = d

    @property
    def p(self) -> int:
        return self.a.p

    @property
    def prec(self) -> int:
        return min(self.a.prec, self.b.prec)

    @property
    def val(self) -> int:
        return min(self.a.val, self.b.val)

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def _coerce(self, o) -> "Qp2Number":
        if isinstance(o, Qp2Number):
            return o
        a = self.a._coerce(o)
        return Qp2Number(a, PadicNumber.zero(self.p, a.prec), self.d)

    def __add__(self, o):
        o = self._coerce(o)
        return Qp2Number(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Qp2Number(-self.a, -self.b, self.d)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        o = self._coerce(o)
        return Qp2Number(self.a * o.a + self.b * o.b * self.d,
                         self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def conjugate(self) -> "Qp2Number":
        """The Frobenius automorphism."""
        return Qp2Number(self.a, -self.b, self.d)

    frobenius = conjugate

    def norm(self) -> PadicNumber:
        return self.a * self.a - self.b * self.b * self.d

    def __truediv__(self, o):
        o = self._coerce(o)
        n = o.norm()
        c = o.conjugate()
        num = self * c
        return Qp2Number(num.a / n, num.b / n, self.d)

    def __pow__(self, e: int):
        if e < 0:
            return self._coerce(1) / (self ** (-e))
        result = self._coerce(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __repr__(self) -> str:
        return f"({self.a!r}) + ({self.b!r})*sqrt({self.d})"

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json(), "sqrt": self.d}


def padic_log_qp2(x: Qp2Number) -> Qp2Number:
    """Iwasawa logarithm on the unramified quadratic extension."""
    if x.is_zero():
        raise ZeroToPrecision("log of zero")
    p, d = x.p, x.d
    v = x.val
    r = x.prec - v
    if r <= 0:
        raise ZeroToPrecision("no relative precision")
    mod = p ** r
    n_guard = ceil_log(r + 2, p) + 2
    wmod = p ** (r + n_guard)

    def ints(z: PadicNumber) -> int:
        # integer representative of p^(-v) z modulo p^r
        if z.is_zero():
            return 0
        return (z.unit * p ** (z.val - v)) % mod

    w = (ints(x.a), ints(x.b))

    def mulm(s, t, m):
        return ((s[0] * t[0] + d * s[1] * t[1]) % m, (s[0] * t[1] + s[1] * t[0]) % m)

    def powm(s, e, m):
        res, base = (1, 0), s
        while e:
            if e & 1:
                res = mulm(res, base, m)
            e >>= 1
            if e:
                base = mulm(base, base, m)
        return res

    y = powm(w, p * p - 1, mod)
    t = ((y[0] - 1) % mod, y[1] % mod)

    def mul(s, u, _e):
        return mulm(s, u, wmod)

    def scale(total, power, c, dd):
        return ((total[0] + (power[0] // p ** dd) * c) % mod,
                (total[1] + (power[1] // p ** dd) * c) % mod)

    if t == (0, 0):
        z = PadicNumber.zero(p, r)
        return Qp2Number(z, z, d)
    s, n_terms = _log_principal(t, p, r, mul, scale, (0, 0))
    inv = pow(p * p - 1, -1, mod)
    out_prec = r - ceil_log(n_terms, p)
    return Qp2Number(PadicNumber(p, 0, s[0] * inv, out_prec),
                     PadicNumber(p, 0, s[1] * inv, out_prec), d)


def sqrt_mod_prime_power(a: int, p: int, n: int) -> int:
    """A square root of a unit a modulo p**n (p odd), smallest residue mod p first."""
    a %= p ** n
    r0 = None
    for r in range(1, p):
        if (r * r - a) % p == 0:
            r0 = r
            break
    if r0 is None:
        raise ValueError(f"{a} is not a square mod {p}")
    return hensel_lift_root([-a, 0, 1], r0, p, n)


def hensel_lift_root(coeffs: Sequence[int], r: int, p: int, n: int) -> int:
    """Lift a simple root r mod p of the integer polynomial sum c_i t^i to mod p**n."""

    def f(t, m):
        return sum(c * pow(t, i, m) for i, c in enumerate(coeffs)) % m

    def df(t, m):
        return sum(i * c * pow(t, i - 1, m) for i, c in enumerate(coeffs) if i) % m

    if df(r, p) == 0:
        raise ValueError("root is not simple")
    m = p
    while m < p ** n:
        m = min(m * m, p ** n)
        r = (r - f(r, m) * pow(df(r, m), -1, m)) % m
    return r % p ** n


# ---------------------------------------------------------------------------
# power series, dual numbers, ledger


@dataclass
class PrecisionLedger:
    """Digits lost along a computation; N_out = N - sum(losses)."""

    input_prec: int
    losses: list = field(default_factory=list)

    def record(self, label: str, digits: int) -> None:
        self.losses.append((label, int(digits)))

    @property
    def output_prec(self) -> int:
        return self.input_prec - sum(d for _, d in self.losses)

    def to_json(self) -> dict:
        return {"input_prec": self.input_prec,
                "losses": [{"step": s, "digits": d} for s, d in self.losses],
                "output_prec": self.output_prec}


class PadicSeries:
    """Truncated power series sum c_m X^m, m <= M, with p-adic coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[PadicNumber]):
        if not coeffs:
            raise ValueError("empty series")
        self.coeffs = list(coeffs)

    @property
    def p(self) -> int:
        return self.coeffs[0].p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def prec(self) -> int:
        return min(c.prec for c in self.coeffs)

    @classmethod
    def constant(cls, c: PadicNumber, M: int) -> "PadicSeries":
        z = PadicNumber.zero(c.p, c.prec)
        return cls([c] + [z] * M)

    @classmethod
    def from_rationals(cls, p: int, qs: Iterable[Rational], prec: int) -> "PadicSeries":
        return cls([PadicNumber.from_rational(p, q, prec) for q in qs])

    @classmethod
    def binomial(cls, s: PadicNumber, M: int) -> "PadicSeries":
        """(1+X)^s truncated at degree M, for s in Z_p.

        The coefficients binom(s, m) are those of exp(s*log(1+X)); they are
        computed by the product formula, which avoids the intermediate
        denominators of the exponential series.
        """
        p = s.p
        prec = s.prec + 2 * M + 2
        out = [PadicNumber.one(p, prec)]
        term = PadicNumber.one(p, prec)
        for m in range(1, M + 1):
            term = term * (s - (m - 1)) / m
            out.append(term)
        return cls(out)

    def coefficient(self, m: int) -> PadicNumber:
        return self.coeffs[m]

    def _combine(self, other, op):
        n = min(self.degree, other.degree)
        return PadicSeries([op(a, b) for a, b in zip(self.coeffs[:n + 1], other.coeffs[:n + 1])])

    def __add__(self, other):
        if not isinstance(other, PadicSeries):
            return PadicSeries([self.coeffs[0] + other] + self.coeffs[1:])
        return self._combine(other, lambda a, b: a + b)

    __radd__ = __add__

    def __neg__(self):
        return PadicSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PadicSeries):
            return PadicSeries([c * other for c in self.coeffs])
        n = min(self.degree, other.degree)
        out = []
        for m in range(n + 1):
            acc = self.coeffs[0] * other.coeffs[m]
            for i in range(1, m + 1):
                acc = acc + self.coeffs[i] * other.coeffs[m - i]
            out.append(acc)
        return PadicSeries(out)

    __rmul__ = __mul__

    def truncate(self, M: int) -> "PadicSeries":
        return PadicSeries(self.coeffs[:M + 1])

    def with_precisions(self, precs: Sequence[int]) -> "PadicSeries":
        return PadicSeries([c.with_prec(n) for c, n in zip(self.coeffs, precs)])

    def evaluate(self, x) -> PadicNumber:
        """Horner evaluation; x should have positive valuation."""
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def derivative(self) -> "PadicSeries":
        if self.degree == 0:
            return PadicSeries([PadicNumber.zero(self.p, self.prec)])
        return PadicSeries([c * m for m, c in enumerate(self.coeffs) if m])

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]

    def __repr__(self) -> str:
        return " + ".join(f"({c!r})X^{m}" for m, c in enumerate(self.coeffs))


class DualNumber:
    """a + b*eps with eps^2 = 0, over any commutative coefficient ring."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = a
        self.b = b

    def _coerce(self, o):
        return o if isinstance(o, DualNumber) else DualNumber(o, 0 * o)

    def __add__(self, o):
        o = self._coerce(o)
        return DualNumber(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return DualNumber(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        o = self._coerce(o)
        return DualNumber(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e == 0:
            return DualNumber(self.a ** 0, 0 * self.b)
        return DualNumber(self.a ** e, e * self.a ** (e - 1) * self.b)

    def __repr__(self) -> str:
        return f"({self.a!r}) + ({self.b!r})eps"

    def __eq__(self, o) -> bool:
        o = self._coerce(o)
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))


def fit_series(points: Sequence[tuple], M: int) -> tuple[PadicSeries, PrecisionLedger]:
    """Degree-M polynomial through M+1 points, solved exactly.

    The nodes and values are replaced by their canonical rational
    representatives and the Vandermonde system is solved by exact Gaussian
    elimination over Q.  The ledger records the valuation of the Vandermonde
    determinant as the digits lost.
    """
    if len(points) < M + 1:
        raise ValueError("need at least M+1 points")
    pts = list(points[:M + 1])
    p = pts[0][0].p
    n_in = min(min(x.prec, y.prec) for x, y in pts)
    loss = 0
    for i in range(M + 1):
        for j in range(i + 1, M + 1):
            diff = pts[j][0] - pts[i][0]
            if diff.is_zero():
                raise SingularSystem("interpolation nodes coincide to precision")
            loss += diff.val
    xs = [x.lift() for x, _ in pts]
    ys = [y.lift() for _, y in pts]
    coeffs = solve_vandermonde(xs, ys)
    ledger = PrecisionLedger(n_in)
    ledger.record("vandermonde_determinant", loss)
    out = ledger.output_prec
    return PadicSeries([PadicNumber.from_rational(p, c, out) for c in coeffs]), ledger


def solve_vandermonde(xs: Sequence[Fraction], ys: Sequence[Fraction]) -> list[Fraction]:
    """Exact Gaussian elimination for sum_m c_m x_i^m = y_i."""
    n = len(xs)
    rows = [[Fraction(x) ** m for m in range(n)] + [Fraction(y)] for x, y in zip(xs, ys)]
    return gauss_solve(rows)


def gauss_solve(rows: list[list[Fraction]]) -> list[Fraction]:
    """Solve a square system given as augmented rows over Q."""
    n = len(rows)
    a = [r[:] for r in rows]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise SingularSystem("singular linear system")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]
