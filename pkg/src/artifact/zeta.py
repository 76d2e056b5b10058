"""Classical L-values at non-positive integers and the p-adic zeta functions they pin down.

Over Q the values come from generalized Bernoulli numbers.  Over a real
quadratic field they come from Shintani's cone decomposition, or, for a
character that is a base change from Q, from the factorization
L(s, chi o N) = L(s, chi) L(s, chi chi_D).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Optional, Sequence

from .characters import (
    CharacterPair,
    HeckeCharacter,
    eval_character,
    irregular_primes,
    kronecker_character,
)
from .cyclotomic import Cyclo
from .errors import (
    DecompositionFailure,
    InconclusiveOrder,
    PoleAtOne,
    PreconditionError,
    TruncationInsufficient,
)
from .field_arith import (
    BaseField,
    FieldElement,
    IntegralIdeal,
    NarrowRayClassGroup,
    _hnf2,
    narrow_ray_class_group,
)
from .padic_arith import (
    PadicNumber,
    PadicSeries,
    PrecisionLedger,
    as_padic,
    fit_series,
    padic_log,
    weight_point,
)

# ---------------------------------------------------------------------------
# Bernoulli numbers and polynomials


@functools.lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n with B_1 = -1/2."""
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2:
        return Fraction(0)
    # sum_{j<n} C(n+1, j) B_j = -(n+1) B_n
    s = sum(comb(n + 1, j) * bernoulli_number(j) for j in range(n))
    return -s / (n + 1)


def bernoulli_poly(n: int, x) -> Fraction:
    x = Fraction(x)
    return sum((comb(n, j) * bernoulli_number(j) * x ** (n - j) for j in range(n + 1)), Fraction(0))


def bernoulli_L_value(chi: HeckeCharacter, k: int) -> Cyclo:
    """L(1-k, chi) = -B_{k,chi}/k for a character over Q (evaluated through its primitive character)."""
    if chi.F.degree != 1:
        raise PreconditionError("Bernoulli L-values are for characters over Q")
    if k < 1:
        raise PreconditionError("k must be >= 1")
    prim = chi.primitive()
    f = prim.conductor.a
    if f == 1:
        if k == 1:
            raise PoleAtOne("zeta(s) has a pole at s = 1; L(0, 1) is not in scope at k = 1 with trivial character")
        return Cyclo.rational(-bernoulli_number(k) / k)
    Q = chi.F
    total = Cyclo.rational(0)
    for a in range(1, f + 1):
        if math.gcd(a, f) != 1:
            continue
        total = total + eval_character(prim, Q.ideal(a)) * bernoulli_poly(k, Fraction(a, f))
    return total * Fraction(-f ** (k - 1), k)


# ---------------------------------------------------------------------------
# Shintani cone decomposition


def _xy(x: FieldElement) -> tuple[Fraction, Fraction]:
    return x.a, x.b


def _cross(u, v) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def sail_chain(F: BaseField, eps: FieldElement) -> list[FieldElement]:
    """Boundary lattice points of the convex hull of (o minus 0) inside the cone <1, eps>.

    Consecutive points span unimodular cones; the list starts at 1 and ends at eps.
    """
    ex, ey = _xy(eps)
    if ey <= 0:
        raise DecompositionFailure("eps must have positive omega-coordinate")
    pts = []
    for y in range(0, int(ey) + 1):
        t = Fraction(y) / ey
        lo = t * ex
        hi = 1 - t + t * ex
        for x in range(math.ceil(lo), math.floor(hi) + 1):
            if (x, y) != (0, 0):
                pts.append((Fraction(x), Fraction(y)))

    def cmp(u, v):
        c = _cross(u, v)
        if c > 0:
            return -1
        if c < 0:
            return 1
        return (abs(u[0]) + abs(u[1])) - (abs(v[0]) + abs(v[1]))

    pts.sort(key=functools.cmp_to_key(cmp))
    # nearest point on each ray
    rays = []
    for q in pts:
        if rays and _cross(rays[-1], q) == 0:
            continue
        rays.append(q)
    hull: list = []
    for q in rays:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            chord = (q[0] - a[0], q[1] - a[1])
            side_b = _cross(chord, (b[0] - a[0], b[1] - a[1]))
            side_0 = _cross(chord, (-a[0], -a[1]))
            if side_b * side_0 < 0:
                hull.pop()
            else:
                break
        hull.append(q)
    chain = [F.element(x, y) for x, y in hull]
    if chain[0] != F.element(1) or chain[-1] != eps:
        raise DecompositionFailure("sail does not connect 1 to eps")
    for u, v in zip(chain, chain[1:]):
        if abs(_cross(_xy(u), _xy(v))) != 1:
            raise DecompositionFailure("sail cone is not unimodular")
    return chain


def cone_decomposition(F: BaseField, power: int, method: str = "sail") -> list[tuple[FieldElement, FieldElement]]:
    """Cones whose half-open union is a fundamental domain for <eps+^power> on F_+.

    method "sail": unimodular cones from the sail of <1, eps+>, translated by powers;
    "single": the one cone <1, eps+^power>;
    "shifted": the sail cones multiplied by a fixed totally positive non-unit w.
    """
    eps = F.units.eps_plus
    if method == "single":
        return [(F.element(1), eps ** power)]
    base = sail_chain(F, eps)
    cones = []
    for i in range(power):
        s = eps ** i
        cones.extend((s * u, s * v) for u, v in zip(base, base[1:]))
    if method == "sail":
        return cones
    if method == "shifted":
        n = 1
        while not (F.element(n, 1)).is_totally_positive():
            n += 1
        w = F.element(n, 1)
        return [(w * u, w * v) for u, v in cones]
    raise ValueError(f"unknown decomposition method {method}")


def _gen_binom(m: int, i: int) -> Fraction:
    r = Fraction(1)
    for t in range(i):
        r *= m - t
    return r / factorial(i)


def _cone_traces(g1: FieldElement, g2: FieldElement, k: int) -> list[Fraction]:
    """Tr_{F/Q} of [w^(k-1)] (g1 + g1' w)^(l-1) (g2 + g2' w)^(2k-l-1), for l = 0..2k."""
    a1, b1 = g1, g1.conj()
    a2, b2 = g2, g2.conj()
    n = k - 1
    ia1, ia2 = a1.inverse(), a2.inverse()

    def powers(x, ix, lo, hi):
        out = {}
        cur = x ** 0
        for e in range(0, hi + 1):
            out[e] = cur
            cur = cur * x
        cur = ix
        for e in range(-1, lo - 1, -1):
            out[e] = cur
            cur = cur * ix
        return out

    lo = -1 - n
    hi = 2 * k
    pa1, pa2 = powers(a1, ia1, lo, hi), powers(a2, ia2, lo, hi)
    pb1, pb2 = powers(b1, b1.inverse(), 0, n), powers(b2, b2.inverse(), 0, n)
    out = []
    for l1 in range(2 * k + 1):
        m1, m2 = l1 - 1, 2 * k - l1 - 1
        tot = a1 * 0
        for i in range(n + 1):
            j = n - i
            c = _gen_binom(m1, i) * _gen_binom(m2, j)
            if c:
                tot = tot + pa1[m1 - i] * pb1[i] * pa2[m2 - j] * pb2[j] * c
        out.append(tot.trace())
    return out


def _shintani_point(traces: list[Fraction], x: tuple[Fraction, Fraction], k: int) -> Fraction:
    s = Fraction(0)
    for l1 in range(2 * k + 1):
        l2 = 2 * k - l1
        if traces[l1]:
            s += (bernoulli_poly(l1, x[0]) * bernoulli_poly(l2, x[1])
                  / (factorial(l1) * factorial(l2))) * traces[l1]
    return s


def _solve2(g1: FieldElement, g2: FieldElement, x: FieldElement) -> tuple[Fraction, Fraction]:
    det = g1.a * g2.b - g1.b * g2.a
    t1 = (x.a * g2.b - x.b * g2.a) / det
    t2 = (g1.a * x.b - g1.b * x.a) / det
    return t1, t2


def _ray_class_lattice(G: NarrowRayClassGroup, b: IntegralIdeal):
    """Z-basis of L = m b^-1 (as field elements) for the class of b."""
    F = G.F
    J = G.modulus * b.conj()
    nb = b.norm
    return F.element(Fraction(J.a, nb)), F.element(Fraction(J.b, nb), Fraction(J.c, nb))


def shintani_partial_zeta(G: NarrowRayClassGroup, cls: tuple[int, ...], k: int,
                          method: str = "sail", rep: Optional[IntegralIdeal] = None) -> Fraction:
    """zeta(C, 1-k) = sum over integral a in C of N(a)^(k-1), regularized, for the ray class C."""
    F = G.F
    if F.degree != 2:
        raise PreconditionError("Shintani decomposition is implemented for real quadratic fields")
    if k < 1:
        raise PreconditionError("k must be >= 1")
    b = rep if rep is not None else G.class_representatives()[tuple(cls)]
    l1, l2 = _ray_class_lattice(G, b)
    c = G.modulus.a
    cones = cone_decomposition(F, G.unit_index, method)
    pref = Fraction(factorial(k - 1) ** 2, 2)
    total = Fraction(0)
    for v1, v2 in cones:
        g1, g2 = v1 * c, v2 * c
        # coordinates of g1, g2 in the basis l1, l2 of L
        rows = []
        for g in (g1, g2):
            u1, u2 = _solve2(l1, l2, g)
            if u1.denominator != 1 or u2.denominator != 1:
                raise DecompositionFailure("cone generator not in the lattice")
            rows.append((int(u1), int(u2)))
        A, B, C = _hnf2(rows)
        traces = _cone_traces(g1, g2, k)
        for z1 in range(A):
            for z2 in range(C):
                alpha = l1 * z1 + l2 * z2 + 1
                t1, t2 = _solve2(g1, g2, alpha)
                t1 = t1 - math.ceil(t1) + 1
                t2 = t2 - math.floor(t2)
                total += _shintani_point(traces, (t1, t2), k)
    return total * pref * Fraction(b.norm) ** (k - 1)


def shintani_L_value(phi: HeckeCharacter, k: int, method: str = "sail") -> Cyclo:
    """L(1-k, phi) for a character of a real quadratic field via partial zeta values."""
    prim = phi.primitive()
    G = prim.G
    total = Cyclo.rational(0)
    for cls, rep in sorted(G.class_representatives().items()):
        z = shintani_partial_zeta(G, cls, k, method, rep)
        if z:
            total = total + Cyclo.root_of_unity(prim.exponent_of_class(cls)) * z
    return total


def dedekind_zeta_value(F: BaseField, k: int, method: str = "sail") -> Fraction:
    """zeta_F(1-k) as the sum of the partial zeta values over the narrow class group."""
    G = narrow_ray_class_group(F, F.unit_ideal())
    return sum((shintani_partial_zeta(G, c, k, method) for c in G.elements()), Fraction(0))


def siegel_zeta_minus_one(D: int) -> Fraction:
    """zeta_F(-1) for F = Q(sqrt D) by Siegel's divisor-sum formula."""
    tot = 0
    for b in range(-math.isqrt(D), math.isqrt(D) + 1):
        if b * b < D and (D - b * b) % 4 == 0:
            n = (D - b * b) // 4
            tot += sum(d for d in range(1, n + 1) if n % d == 0)
    return Fraction(tot, 60)


# ---------------------------------------------------------------------------
# classical L-values with route selection


def _base_change_factors(phi: HeckeCharacter):
    chi = getattr(phi, "base_change_of", None)
    if chi is None:
        return None
    D = phi.F.disc
    f = chi.conductor.a
    if math.gcd(f, D) != 1:
        return None
    twist = (chi * kronecker_character(D)).primitive()
    return chi.primitive(), twist


@functools.lru_cache(maxsize=4096)
def _classical_cached(phi: HeckeCharacter, k: int, method: str) -> Cyclo:
    F = phi.F
    if F.degree == 1:
        return bernoulli_L_value(phi, k)
    if method == "auto":
        fac = _base_change_factors(phi)
        if fac is not None:
            return bernoulli_L_value(fac[0], k) * bernoulli_L_value(fac[1], k)
        method = "sail"
    if method == "factor":
        fac = _base_change_factors(phi)
        if fac is None:
            raise PreconditionError("character is not a base change with conductor prime to the discriminant")
        return bernoulli_L_value(fac[0], k) * bernoulli_L_value(fac[1], k)
    if phi.primitive().is_trivial() and k == 1:
        raise PoleAtOne("trivial character at s = 0 of the Dedekind zeta function is excluded")
    return shintani_L_value(phi, k, method)


def classical_L_value(phi: HeckeCharacter, k: int, method: str = "auto") -> Cyclo:
    """L(1-k, phi) for the primitive character attached to phi.

    method "auto" uses Bernoulli numbers over Q, the factorization for base-change
    characters, and Shintani's method otherwise; "factor", "sail", "single" and
    "shifted" force a route.
    """
    return _classical_cached(phi, k, method)


# ---------------------------------------------------------------------------
# p-adic interpolation


def _phi_of(obj) -> HeckeCharacter:
    return obj.phi if isinstance(obj, CharacterPair) else obj


def euler_factor_at_p(phi: HeckeCharacter, p: int, k: int) -> Cyclo:
    """prod over primes q above p of (1 - phi(q) N(q)^(k-1)), phi primitive."""
    prim = phi.primitive()
    out = Cyclo.rational(1)
    for q in phi.F.primes_above(p):
        out = out * (1 - eval_character(prim, q) * Fraction(q.norm) ** (k - 1))
    return out


def interp_point(obj, p: int, k: int, prec: int = 16, method: str = "auto") -> PadicNumber:
    """L(1-k, phi) prod_{q | p} (1 - phi(q) N(q)^(k-1)) embedded in Q_p; k = 1 mod (p-1)."""
    phi = _phi_of(obj)
    if (k - 1) % (p - 1):
        raise PreconditionError("interpolation weights must satisfy k = 1 mod (p-1)")
    val = classical_L_value(phi, k, method) * euler_factor_at_p(phi, p, k)
    return val.to_padic(p, prec)


def weight_schedule(p: int, M: int, r: int = 2) -> list[int]:
    return [1 + j * (p - 1) for j in range(M + 1 + r)]


@dataclass
class PadicZetaResult:
    series: PadicSeries
    ledger: PrecisionLedger
    weights: list
    u: int
    p: int
    heldout_residual_valuations: list = field(default_factory=list)

    @property
    def output_prec(self) -> int:
        return self.ledger.output_prec

    def coefficient_precisions(self) -> list[int]:
        return [c.prec for c in self.series.coeffs]

    def to_json(self) -> dict:
        return {"p": self.p, "u": self.u, "weights": self.weights,
                "series": self.series.to_json(), "ledger": self.ledger.to_json(),
                "coefficient_precisions": self.coefficient_precisions(),
                "heldout_residual_valuations": self.heldout_residual_valuations}


def fit_from_values(p: int, M: int, N: int, weights: Sequence[int], values: Sequence[PadicNumber],
                    u: Optional[int] = None, truncation: bool = True) -> PadicZetaResult:
    """Fit a degree-M series through the first M+1 (weight, value) pairs and test the rest.

    With ``truncation`` set, the series is treated as the truncation of an
    integral power series: values at nodes of valuation >= 1 then determine it
    only to M+1 digits (and its X^m coefficient to M+1-m digits), which is
    recorded in the ledger.
    """
    u = u if u is not None else 1 + p
    xs = [weight_point(p, u, k, N) for k in weights]
    pts = list(zip(xs, values))
    series, ledger = fit_series(pts[:M + 1], M)
    if truncation:
        over = ledger.output_prec - (M + 1)
        ledger.record("truncation", max(0, over))
    n_out = ledger.output_prec
    precs = [min(n_out, M + 1 - m) if truncation else n_out for m in range(M + 1)]
    series = series.with_precisions([max(n, 0) for n in precs])
    residuals = []
    full = PadicSeries([c.with_prec(n_out) for c in series.coeffs]) if truncation else series
    for x, y in pts[M + 1:]:
        res = full.evaluate(x) - y.with_prec(n_out)
        residuals.append(min(res.val, n_out))
        if res.val < n_out:
            raise TruncationInsufficient(
                f"held-out residual has valuation {res.val} < {n_out}; increase M")
    # the full-precision series is needed for evaluation above, the stored one carries per-coefficient precision
    return PadicZetaResult(series, ledger, list(weights), u, p, residuals)


def fit_padic_zeta(phi, p: int, M: int = 4, N: int = 16, r: int = 2, u: Optional[int] = None,
                   method: str = "auto") -> PadicZetaResult:
    """zeta_phi mod (p^N_out, X^(M+1)) from interpolation values at k = 1 + j(p-1)."""
    phi = _phi_of(phi)
    if r < 1:
        raise PreconditionError("at least one held-out weight is required")
    if phi.conductor.norm % p == 0 and phi.F.degree == 1:
        raise PreconditionError("p must not divide the conductor")
    weights = weight_schedule(p, M, r)
    values = [interp_point(phi, p, k, N, method) for k in weights]
    return fit_from_values(p, M, N, weights, values, u)


def s_exponent(q: IntegralIdeal, p: int, u: int, prec: int) -> PadicNumber:
    """s(q) = log_p<N q>/log_p u."""
    return padic_log(as_padic(q.norm, p, prec)) / padic_log(as_padic(u, p, prec))


def imprimitive_zeta(pair: CharacterPair, p: int, M: int = 4, N: int = 16, u: Optional[int] = None,
                     base: Optional[PadicZetaResult] = None, method: str = "auto") -> PadicZetaResult:
    """zeta_phi(X) prod_{q | n, q not dividing cond phi} (1 - phi(q)^-1 (1+X)^-s(q) N(q)^-1)."""
    res = base if base is not None else fit_padic_zeta(pair.phi, p, M, N, u=u, method=method)
    u = res.u
    series = res.series
    ledger = PrecisionLedger(res.ledger.input_prec, list(res.ledger.losses))
    for q in pair.extra_primes():
        s = s_exponent(q, p, u, N + 2)
        c = (eval_character(pair.phi.primitive(), q).conjugate() * Fraction(1, q.norm)).to_padic(p, N + 2)
        power = PadicSeries.binomial(-s, series.degree)
        factor = PadicSeries.constant(PadicNumber.one(p, N + 2), series.degree) - power * c
        series = series * factor
    return PadicZetaResult(series, ledger, res.weights, u, p, res.heldout_residual_valuations)


def closed_value_at_zero(pair: CharacterPair, p: int) -> Cyclo:
    """L(0, phi) prod_{v | p}(1 - phi(v)) prod_{q | n, q not dividing cond}(1 - phi(q)^-1 N(q)^-1)."""
    phi = pair.phi.primitive()
    val = classical_L_value(phi, 1) * euler_factor_at_p(phi, p, 1)
    for q in pair.extra_primes():
        val = val * (1 - eval_character(phi, q).conjugate() * Fraction(1, q.norm))
    return val


@dataclass
class TrivialZeroReport:
    value_at_zero: PadicNumber
    derivative_at_zero: PadicNumber
    closed_formula: PadicNumber
    closed_formula_matches: bool
    apparent_order: int
    order_is_lower_bound: bool
    leading_is_unit: bool
    irregular: list
    ledger: PrecisionLedger

    def to_json(self) -> dict:
        order = self.apparent_order
        return {"value_at_zero": self.value_at_zero.to_json(),
                "derivative_at_zero": self.derivative_at_zero.to_json(),
                "closed_formula": self.closed_formula.to_json(),
                "closed_formula_matches": self.closed_formula_matches,
                "apparent_order": f">={order} at this precision" if self.order_is_lower_bound else order,
                "leading_coefficient_is_unit": self.leading_is_unit,
                "irregular_primes": [P.to_json() for P in self.irregular],
                "ledger": self.ledger.to_json()}


def trivial_zero_report(pair: CharacterPair, p: int, M: int = 4, N: int = 16,
                        result: Optional[PadicZetaResult] = None) -> TrivialZeroReport:
    res = result if result is not None else imprimitive_zeta(pair, p, M, N)
    s = res.series
    n_out = res.output_prec
    closed = closed_value_at_zero(pair, p).to_padic(p, n_out)
    c0 = s.coeffs[0]
    match = (c0 - closed).val >= min(c0.prec, n_out)
    order = None
    for m, c in enumerate(s.coeffs):
        if not c.is_zero():
            order = m
            break
    if order is None:
        raise InconclusiveOrder("all retained coefficients vanish to precision")
    irr = irregular_primes(pair.phi.primitive(), p)
    return TrivialZeroReport(c0, s.coeffs[1] if s.degree >= 1 else PadicNumber.zero(p, n_out), closed, match,
                             order, len(irr) >= 2 and order >= 2, s.coeffs[order].is_unit(), irr, res.ledger)
