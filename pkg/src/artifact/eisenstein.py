"""Fourier coefficients and constant terms of weight-one Eisenstein series and their Lambda-adic families.

Coefficients are indexed by nonzero integral ideals and normalized adelically.
The family coefficient of an ideal b is

    sum over a | b with p not dividing a of  phi1(b/a) phi2(a) (1+X)^(log_p N(a) / log_p u),

a truncated power series in X whose value at X = 0 is the p-stabilized weight-one
coefficient.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .characters import CharacterPair, HeckeCharacter, delta, eval_character, irregular_primes
from .cyclotomic import Cyclo
from .errors import IncompleteCuspData, PreconditionError, UnexpectedVanishing
from .field_arith import BaseField, FieldElement, IntegralIdeal, divisors, factor_ideal, narrow_ray_class_group
from .padic_arith import PadicNumber, PadicSeries, as_padic, padic_log, teichmuller
from .zeta import classical_L_value, imprimitive_zeta


def _divides_p(a: IntegralIdeal, p: int) -> bool:
    return a.norm % p == 0


def _quotient(F: BaseField, b: IntegralIdeal, a: IntegralIdeal) -> IntegralIdeal:
    """b/a for a | b, through the factorizations."""
    out = F.unit_ideal()
    fa = dict(factor_ideal(F, a))
    for P, e in factor_ideal(F, b):
        out = out * P ** (e - fa.get(P, 0))
    return out


def _divisor_terms(pair: CharacterPair, b: IntegralIdeal, skip_p: bool):
    """(a, phi1(b/a) phi2(a)) over divisors a of b, dropping zero terms."""
    F = pair.F
    out = []
    for a in divisors(F, b):
        if skip_p and _divides_p(a, pair.p):
            continue
        v = eval_character(pair.phi1, _quotient(F, b, a)) * eval_character(pair.phi2, a)
        if not v.is_zero():
            out.append((a, v))
    return out


def weight_k_coeff(pair: CharacterPair, b: IntegralIdeal, k: int = 1) -> Cyclo:
    """sum over a | b of phi1(b/a) phi2(a) N(a)^(k-1), exactly."""
    if k < 1:
        raise PreconditionError("k must be >= 1")
    tot = Cyclo.rational(0)
    for a, v in _divisor_terms(pair, b, skip_p=False):
        tot = tot + v * Fraction(a.norm) ** (k - 1)
    return tot


def p_stabilize_weight1(pair: CharacterPair, b: IntegralIdeal) -> Cyclo:
    """C(b, f_phi1): the weight-one divisor sum restricted to a prime to p."""
    tot = Cyclo.rational(0)
    for _, v in _divisor_terms(pair, b, skip_p=True):
        tot = tot + v
    return tot


@functools.lru_cache(maxsize=None)
def _power_series(p: int, norm: int, u: int, M: int, N: int) -> PadicSeries:
    """(1+X)^(log_p(norm)/log_p(u)) truncated at degree M."""
    if norm == 1:
        return PadicSeries.constant(PadicNumber.one(p, N), M)
    s = padic_log(as_padic(norm, p, N + 2)) / padic_log(as_padic(u, p, N + 2))
    return PadicSeries.binomial(s, M)


def family_coeff(pair: CharacterPair, b: IntegralIdeal, M: int = 4, N: int = 16,
                 u: Optional[int] = None) -> PadicSeries:
    """C(b, E_{phi1,phi2}) as a power series in X mod X^(M+1)."""
    p = pair.p
    u = u if u is not None else 1 + p
    tot = PadicSeries.constant(PadicNumber.zero(p, N), M)
    for a, v in _divisor_terms(pair, b, skip_p=True):
        tot = tot + _power_series(p, a.norm, u, M, N) * v.to_padic(p, N)
    return tot


def specialize_family_coeff(pair: CharacterPair, b: IntegralIdeal, k: int, N: int = 16) -> PadicNumber:
    """The family coefficient at X = u^(k-1) - 1, evaluated term by term without truncation.

    (1+X)^(log_p N(a)/log_p u) at that point is <N a>^(k-1) = N(a)^(k-1) omega_p(N a)^(1-k),
    independent of u; for k = 1 mod (p-1) this is the p-stabilized weight-k coefficient.
    """
    p = pair.p
    tot = PadicNumber.zero(p, N)
    for a, v in _divisor_terms(pair, b, skip_p=True):
        n = as_padic(a.norm, p, N)
        tot = tot + v.to_padic(p, N) * (n / teichmuller(n)) ** (k - 1)
    return tot


def family_constant_term(pair: CharacterPair, M: int = 4, N: int = 16, u: Optional[int] = None,
                         zeta_result=None) -> dict:
    """Per narrow class c: 2^-d zeta_{phi1,phi2}(X) delta(phi1) phi1^-1(c d)."""
    F = pair.F
    G = narrow_ray_class_group(F, F.unit_ideal())
    reps = G.class_representatives()
    p = pair.p
    if delta(pair.phi1) == 0:
        zero = PadicSeries.constant(PadicNumber.zero(p, N), M)
        return {c: zero for c in sorted(reps)}
    z = zeta_result if zeta_result is not None else imprimitive_zeta(pair, p, M, N, u)
    scale = Fraction(1, 2 ** F.degree)
    out = {}
    for c, rep in sorted(reps.items()):
        val = eval_character(pair.phi1, rep * F.different).conjugate() * scale
        out[c] = z.series * val.to_padic(p, N)
    return out


def pprime_stabilized_constant_term(phi: HeckeCharacter, p: int) -> dict:
    """Per narrow class c: 2^-d prod_{q in Sigma_p, q != P}(1 - phi(q)) (L(0,phi) + delta(phi) phi^-1(c d) L(0,phi^-1))."""
    F = phi.F
    prim = phi.primitive()
    irr = irregular_primes(prim, p)
    if len(irr) != 1:
        raise PreconditionError("exactly one irregular prime above p is required")
    P = irr[0]
    fac = Cyclo.rational(Fraction(1, 2 ** F.degree))
    for q in F.primes_above(p):
        if q != P:
            fac = fac * (1 - eval_character(prim, q))
    L0 = classical_L_value(prim, 1)
    dl = delta(prim)
    L0inv = classical_L_value(prim.inverse(), 1) if dl else Cyclo.rational(0)
    G = narrow_ray_class_group(F, F.unit_ideal())
    out = {}
    for c, rep in sorted(G.class_representatives().items()):
        term = L0
        if dl:
            term = term + eval_character(prim, rep * F.different).conjugate() * L0inv
        out[c] = fac * term
    if all(v.is_zero() for v in out.values()):
        raise UnexpectedVanishing("p'-stabilized constant term vanishes identically")
    return out


# ---------------------------------------------------------------------------
# cusp conditions


@dataclass
class CuspLabel:
    """Valuation data of a cusp diag(t1, t2) * (a b; c d) at the primes dividing m = n1 n2.

    ``c_valuations`` maps prime ideals to val_v(c); ``None`` stands for c = 0 locally
    (infinite valuation).
    """

    t1: Optional[IntegralIdeal] = None
    t2: Optional[IntegralIdeal] = None
    entries: Optional[tuple] = None
    c_valuations: dict = field(default_factory=dict)

    @classmethod
    def from_c(cls, F: BaseField, c: FieldElement, primes, t1=None, t2=None) -> "CuspLabel":
        vals = {}
        if c == 0:
            vals = {P: None for P in primes}
        else:
            if not c.is_integral():
                raise PreconditionError("c must be integral")
            I = F.ideal(c)
            vals = {P: I.valuation(P) for P in primes}
        return cls(t1, t2, None, vals)


def _val(v):
    return float("inf") if v is None else v


def cusp_conditions(pair: CharacterPair, gamma: CuspLabel) -> dict:
    """Which of the three non-vanishing conditions hold at gamma."""
    F = pair.F
    n1, n2 = pair.phi1.conductor, pair.phi2.conductor
    f1 = dict(factor_ideal(F, n1))
    f2 = dict(factor_ideal(F, n2))
    for P in set(f1) | set(f2):
        if P not in gamma.c_valuations:
            raise IncompleteCuspData(f"missing val_v(c) at {P}")
    c = {P: _val(v) for P, v in gamma.c_valuations.items()}
    cond_i = all(c[v] >= f2[v] for v in f2 if v not in f1)
    cond_ii = all(c[v] == 0 for v in f1 if v not in f2)
    cond_iii = all(c[v] == f2[v] for v in f1 if v in f2)
    return {"i": cond_i, "ii": cond_ii, "iii": cond_iii}


def cusp_constant_term_vanishes(pair: CharacterPair, gamma: CuspLabel) -> bool:
    """True when one of the conditions fails, which forces the constant term at gamma to vanish."""
    return not all(cusp_conditions(pair, gamma).values())
