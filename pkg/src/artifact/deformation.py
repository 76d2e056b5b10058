"""First-order (mod X^2) data of the cuspidal family through a weight-one Eisenstein point.

Conventions.  The pseudo-character of the family is

    Ps(Frob_l) = (1 + lambda log_p(N l) eps) + phi(l) (1 + mu log_p(N l) eps),

and the derivative table for Fourier coefficients is stated in the weight
variable X.  The two are related by one global constant c with
d/dX = c * d/deps, fixed at a reference prime and then checked at many others.
Determinants are phi(l)(1 - log_p(N l)/log_p(u) eps).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import sympy

from .characters import CharacterPair, HeckeCharacter, eval_character, irregular_primes, trivial_character
from .eisenstein import family_coeff, p_stabilize_weight1, weight_k_coeff
from .errors import InconclusivePrecision, NotApplicable, PreconditionError, SumVanishes
from .field_arith import IntegralIdeal, factor_ideal
from .gross_stark import l_invariant, LInvariantReport
from .padic_arith import DualNumber, PadicNumber, PrecisionLedger, as_padic, padic_log
from .zeta import classical_L_value, fit_padic_zeta


def _zero_at(x: PadicNumber, prec: int) -> bool:
    return x.with_prec(prec).is_zero()


def _dual_zero(x: DualNumber, prec: int) -> bool:
    return _zero_at(x.a, prec) and _zero_at(x.b, prec)


# ---------------------------------------------------------------------------
# lambda, mu and the family


@dataclass
class InfinitesimalFamily:
    phi: HeckeCharacter
    p: int
    u: int
    N: int
    prime: IntegralIdeal
    case: str                         # "d_p<d" or "d_p=d"
    lam: PadicNumber
    mu: PadicNumber
    log_u: PadicNumber
    L: Optional[PadicNumber]
    L_inv: Optional[PadicNumber]
    ledger: PrecisionLedger
    l_reports: list = field(default_factory=list)

    @property
    def F(self):
        return self.phi.F

    def phi_value(self, I: IntegralIdeal) -> PadicNumber:
        return eval_character(self.phi, I).to_padic(self.p, self.N)

    def log_norm(self, I: IntegralIdeal) -> PadicNumber:
        return padic_log(as_padic(I.norm, self.p, self.N + 2)).with_prec(self.N)

    def _check_tame(self, I: IntegralIdeal) -> None:
        if I.norm % self.p == 0 or not I.is_coprime_to(self.phi.conductor):
            raise PreconditionError(f"{I} must be prime to the conductor and to p")

    # table entries -------------------------------------------------
    def table_T_derivative(self, l: IntegralIdeal) -> PadicNumber:
        """d/dX C(l, F) from the derivative table."""
        self._check_tame(l)
        ln = self.log_norm(l)
        if self.case == "d_p<d":
            return ln / self.log_u
        return (self.L + self.phi_value(l) * self.L_inv) * ln / ((self.L + self.L_inv) * self.log_u)

    def table_U_derivative(self, v: IntegralIdeal) -> PadicNumber:
        """d/dX C(v, F) for v above p, the normalized U_v coefficient."""
        if v.norm % self.p:
            raise PreconditionError(f"{v} does not lie above p")
        if self.case == "d_p<d":
            if v != self.prime:
                return PadicNumber.zero(self.p, self.N)
            if self.L is None:
                raise NotApplicable("L-invariant unavailable for this splitting field")
            return self.L / self.log_u
        return self.L * self.L_inv / ((self.L + self.L_inv) * self.log_u)

    def trace_eps_derivative(self, l: IntegralIdeal) -> PadicNumber:
        """eps-coefficient of Ps(Frob_l): (lambda + phi(l) mu) log_p(N l)."""
        self._check_tame(l)
        return (self.lam + self.phi_value(l) * self.mu) * self.log_norm(l)

    # eigenvalues in the eps variable ----------------------------------
    def eigenvalues(self, l: IntegralIdeal) -> tuple[DualNumber, DualNumber]:
        ln = self.log_norm(l)
        ph = self.phi_value(l)
        return DualNumber(PadicNumber.one(self.p, self.N), self.lam * ln), DualNumber(ph, ph * self.mu * ln)

    def determinant(self, l: IntegralIdeal) -> DualNumber:
        """phi(l)(1 - log_p(N l)/log_p(u) eps)."""
        ph = self.phi_value(l)
        return DualNumber(ph, -ph * self.log_norm(l) / self.log_u)

    # coefficients in the X variable -----------------------------------
    def prime_coeff(self, l: IntegralIdeal) -> DualNumber:
        """C(l, F) mod X^2 for l prime to the level: 1 + phi(l) + X * table."""
        return DualNumber(1 + self.phi_value(l), self.table_T_derivative(l))

    def _det_X(self, l: IntegralIdeal) -> DualNumber:
        ph = self.phi_value(l)
        return DualNumber(ph, ph * self.log_norm(l) / self.log_u)

    def coeff(self, b: IntegralIdeal) -> DualNumber:
        """C(b, F) mod X^2 for b prime to the conductor of phi."""
        one = PadicNumber.one(self.p, self.N)
        out = DualNumber(one, PadicNumber.zero(self.p, self.N))
        for P, e in factor_ideal(self.F, b):
            if P.norm % self.p == 0:
                out = out * DualNumber(one, self.table_U_derivative(P)) ** e
                continue
            self._check_tame(P)
            c1 = self.prime_coeff(P)
            det = self._det_X(P)
            prev, cur = DualNumber(one, PadicNumber.zero(self.p, self.N)), c1
            for _ in range(e - 1):
                prev, cur = cur, c1 * cur - det * prev
            out = out * cur
        return out

    def to_json(self) -> dict:
        return {"phi": self.phi.to_json(), "p": self.p, "u": self.u, "N": self.N,
                "prime": self.prime.to_json(), "case": self.case, "lambda": self.lam.to_json(),
                "mu": self.mu.to_json(), "log_p(u)": self.log_u.to_json(),
                "L_phi": self.L.to_json() if self.L is not None else None,
                "L_phi_inv": self.L_inv.to_json() if self.L_inv is not None else None,
                "ledger": self.ledger.to_json(),
                "l_invariants": [r.to_json() for r in self.l_reports]}


def _unique_irregular(phi: HeckeCharacter, p: int) -> IntegralIdeal:
    irr = irregular_primes(phi, p)
    if len(irr) != 1:
        raise PreconditionError(f"need exactly one irregular prime above {p}, found {len(irr)}")
    return irr[0]


def build_family(phi: HeckeCharacter, p: int, N: int = 12, u: Optional[int] = None) -> InfinitesimalFamily:
    """The mod X^2 family with lambda, mu from the L-invariants."""
    phi = phi.primitive()
    P = _unique_irregular(phi, p)
    F = phi.F
    u = u if u is not None else 1 + p
    d_p = 2 if P.norm == p * p else 1
    case = "d_p=d" if d_p == F.degree else "d_p<d"
    ledger = PrecisionLedger(N)
    log_u = padic_log(as_padic(u, p, N + 2)).with_prec(N)
    ledger.record("division by log_p(u)", log_u.val)
    reports: list[LInvariantReport] = []
    if case == "d_p<d":
        lam = PadicNumber.zero(p, N)
        mu = -1 / log_u
        try:
            rep = l_invariant(phi, p, N, prime=P)
            reports.append(rep)
            L, L_inv = rep.L, None
        except NotApplicable:
            L, L_inv = None, None
        return InfinitesimalFamily(phi, p, u, N, P, case, lam, mu, log_u, L, L_inv, ledger, reports)
    r1 = l_invariant(phi, p, N, prime=P)
    r2 = l_invariant(phi.inverse(), p, N, prime=P)
    reports = [r1, r2]
    L, L_inv = r1.L, r2.L
    S = L + L_inv
    if S.is_zero():
        raise SumVanishes("L(phi) + L(phi^-1) vanishes to the working precision")
    ledger.record("L-invariants", N - min(L.prec, L_inv.prec))
    ledger.record("division by L(phi) + L(phi^-1)", S.val)
    lam = -L / (S * log_u)
    mu = -L_inv / (S * log_u)
    return InfinitesimalFamily(phi, p, u, N, P, case, lam, mu, log_u, L, L_inv, ledger, reports)


def lambda_mu(phi: HeckeCharacter, p: int, N: int = 12, u: Optional[int] = None) -> tuple[PadicNumber, PadicNumber]:
    fam = build_family(phi, p, N, u)
    return fam.lam, fam.mu


def derivative_coeff(family: InfinitesimalFamily, ideal: IntegralIdeal) -> PadicNumber:
    """Table value: U-coefficient for ideals above p, T-coefficient otherwise."""
    if ideal.norm % family.p == 0:
        return family.table_U_derivative(ideal)
    return family.table_T_derivative(ideal)


# ---------------------------------------------------------------------------
# checks


def _sym_coeffs(alpha, beta, k):
    return sum(alpha ** i * beta ** (k - i) for i in range(k + 1))


def eigen_consistency_check(family: InfinitesimalFamily, l: IntegralIdeal, n: int,
                            symbolic: bool = False) -> bool:
    """C(l^(n+1)) = C(l) C(l^n) - det(Frob_l) C(l^(n-1)) for C(l^k) built from the trace shape.

    With ``symbolic`` the identity is expanded in sympy with lambda, mu, the
    L-invariants, log_p N(l) and log_p(u) as indeterminates, modulo eps^2.
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if symbolic:
        return _symbolic_consistency(family.case, int(_phi_sign(family, l)), n)
    alpha, beta = family.eigenvalues(l)
    det = family.determinant(l)
    C = [_sym_coeffs(alpha, beta, k) if k else DualNumber(PadicNumber.one(family.p, family.N),
                                                           PadicNumber.zero(family.p, family.N))
         for k in range(n + 2)]
    diff = C[n + 1] - (C[1] * C[n] - det * C[n - 1])
    return _dual_zero(diff, min(diff.a.prec, diff.b.prec))


def _phi_sign(family: InfinitesimalFamily, l: IntegralIdeal) -> int:
    v = eval_character(family.phi, l)
    if not v.is_rational():
        raise NotApplicable("symbolic check is set up for quadratic characters")
    return int(v.to_fraction())


def _symbolic_consistency(case: str, phi_l: int, n: int) -> bool:
    eps, ell, lu, L, Lp = sympy.symbols("eps ell logu L Lp")
    if case == "d_p<d":
        lam, mu = sympy.Integer(0), -1 / lu
    else:
        lam, mu = -L / ((L + Lp) * lu), -Lp / ((L + Lp) * lu)
    alpha = 1 + lam * ell * eps
    beta = phi_l * (1 + mu * ell * eps)
    det = phi_l * (1 - ell / lu * eps)
    C = [_sym_coeffs(alpha, beta, k) for k in range(n + 2)]
    diff = sympy.expand(C[n + 1] - (C[1] * C[n] - det * C[n - 1]))
    poly = sympy.Poly(diff, eps)
    for (deg,), coeff in poly.terms():
        if deg <= 1 and sympy.simplify(coeff) != 0:
            return False
    return True


@dataclass
class CoherenceReport:
    calibration: PadicNumber
    reference: IntegralIdeal
    checked: int
    mismatches: list
    ratios_constant: bool
    precision: int

    @property
    def ok(self) -> bool:
        return self.ratios_constant and not self.mismatches

    def to_json(self) -> dict:
        return {"calibration_constant": self.calibration.to_json(), "reference_prime": self.reference.to_json(),
                "primes_checked": self.checked, "mismatches": [m.to_json() for m in self.mismatches],
                "constant": self.ratios_constant, "precision": self.precision, "ok": self.ok}


def trace_coherence_check(family: InfinitesimalFamily, count: int = 50, bound: int = 2000) -> CoherenceReport:
    """Fix c = table/trace at a reference prime, then test table = c * trace at ``count`` further primes."""
    F, p = family.F, family.p
    primes = [P for P in F.prime_ideals_up_to(bound, coprime_to=p * family.phi.conductor.norm)
              if P.is_coprime_to(family.phi.conductor)]
    prec = min(family.lam.prec, family.mu.prec) - 2
    c = None
    ref = None
    mismatches = []
    checked = 0
    for P in primes:
        t_eps = family.trace_eps_derivative(P)
        t_X = family.table_T_derivative(P)
        if c is None:
            if _zero_at(t_eps, prec):
                continue
            c, ref = t_X / t_eps, P
            prec = min(prec, c.prec)
            continue
        if checked >= count:
            break
        checked += 1
        if not _zero_at(t_X - c * t_eps, prec):
            mismatches.append(P)
    if c is None or checked < count:
        raise InconclusivePrecision("not enough primes with a nonzero trace derivative")
    return CoherenceReport(c, ref, checked, mismatches, not mismatches, prec)


@dataclass
class GrossStarkReport:
    lhs: PadicNumber
    rhs: PadicNumber
    difference_valuation: int
    precision: int
    constant_term: PadicNumber
    L: PadicNumber
    L0: object
    sign: int

    @property
    def passed(self) -> bool:
        return self.difference_valuation >= self.precision

    def to_json(self) -> dict:
        return {"lhs_zeta_prime_0": self.lhs.to_json(), "rhs": self.rhs.to_json(),
                "difference_valuation": self.difference_valuation, "precision": self.precision,
                "zeta_0": self.constant_term.to_json(), "L_invariant": self.L.to_json(),
                "L(0,phi)": self.L0.to_json(), "sign": self.sign, "passed": self.passed}


def gross_stark_check(phi: HeckeCharacter, p: int, M: int = 6, N: int = 30, u: Optional[int] = None,
                      sign: int = 1) -> GrossStarkReport:
    """zeta_phi'(0) against -(L(phi)/log_p u) L(0, phi) prod_{q | p, q != P}(1 - phi(q)).

    ``sign = -1`` flips the right-hand side (negative control).
    """
    phi = phi.primitive()
    irr = irregular_primes(phi, p)
    if not irr:
        raise NotApplicable(f"phi has no trivial zero at {p}")
    if len(irr) > 1:
        raise NotApplicable("more than one irregular prime: the zero has higher order")
    P = irr[0]
    u = u if u is not None else 1 + p
    z = fit_padic_zeta(phi, p, M, N, u=u)
    lhs = z.series.coefficient(1)
    rep = l_invariant(phi, p, N, prime=P)
    L0 = classical_L_value(phi, 1)
    fac = L0
    for q in phi.F.primes_above(p):
        if q != P:
            fac = fac * (1 - eval_character(phi, q))
    log_u = padic_log(as_padic(u, p, N + 2))
    rhs = -sign * rep.L / log_u * fac.to_padic(p, N)
    prec = min(lhs.prec, rhs.prec)
    diff = (lhs - rhs).with_prec(prec)
    return GrossStarkReport(lhs, rhs, diff.val, prec, z.series.coefficient(0), rep.L, L0, sign)


@dataclass
class CombinationReport:
    checked: int
    failures: list
    precision: int
    rows: list

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"ideals_checked": self.checked, "failures": [b.to_json() for b in self.failures],
                "precision": self.precision, "passed": self.passed, "rows": self.rows}


def eisenstein_combination_check(phi: HeckeCharacter, p: int, B: int = 100, N: int = 12,
                                 u: Optional[int] = None, keep_rows: bool = False) -> CombinationReport:
    """(L(phi^-1) + L(phi)) (E_1(phi,1) - f) = E_{1,phi} + E_{phi,1} on ideals prime to cond(phi), N b <= B."""
    fam = build_family(phi, p, N, u)
    if fam.case != "d_p=d":
        raise NotApplicable("the linear combination is stated for d_p = d")
    phi = fam.phi
    one = trivial_character(phi.F)
    pair_1phi = CharacterPair(one, phi, p)
    pair_phi1 = CharacterPair(phi, one, p)
    L, Lp, lu = fam.L, fam.L_inv, fam.log_u
    S = L + Lp
    prec = N
    rows, failures = [], []
    checked = 0
    for b in phi.F.ideals_up_to(B):
        if not b.is_coprime_to(phi.conductor):
            continue
        checked += 1
        gap = (weight_k_coeff(pair_phi1, b, 1) - p_stabilize_weight1(pair_1phi, b)).to_padic(p, N)
        lhs = S * gap
        dF = fam.coeff(b).b
        d1 = family_coeff(pair_1phi, b, 1, N, fam.u).coefficient(1)
        d2 = family_coeff(pair_phi1, b, 1, N, fam.u).coefficient(1)
        rhs = S * lu / L * (dF - d1) + S * lu / Lp * (dF - d2)
        diff = lhs - rhs
        cmp_prec = min(lhs.prec, rhs.prec)
        prec = min(prec, cmp_prec)
        if not _zero_at(diff, cmp_prec):
            failures.append(b)
        if keep_rows:
            rows.append({"ideal": b.to_json(), "lhs": lhs.to_json(), "rhs": rhs.to_json()})
    return CombinationReport(checked, failures, prec, rows)
