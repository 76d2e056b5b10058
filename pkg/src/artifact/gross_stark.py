"""p-units of splitting fields, L-invariants and cocycle log matrices for quadratic characters.

For a totally odd quadratic character phi of F (F = Q or real quadratic) and an
irregular prime P above p, the splitting field H of phi is a CM field with
[H:F] = 2.  Two shapes of H are handled:

* F = Q, H imaginary quadratic;
* F = Q(sqrt D), phi the base change of a quadratic Dirichlet character, so
  H = Q(sqrt D, sqrt delta) is biquadratic over Q.

An element of H is stored by rational coordinates on the products of the square
roots of the generators, and iota_p sends each square root to a fixed root in
Q_p or in Q_p(sqrt n), n a non-residue.  The place w0 of H is the one singled
out by iota_p.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .characters import HeckeCharacter, irregular_primes, is_totally_odd
from .errors import (ArtifactError, InconclusivePrecision, NonQuadratic, NotApplicable, NotSplit,
                     PreconditionError, RankUnstable, SearchExhausted)
from .field_arith import (BaseField, IntegralIdeal, embed_padic, factorint, find_generator, kronecker,
                          narrow_ray_class_group)
from .padic_arith import (PadicNumber, PrecisionLedger, Qp2Number, padic_log, padic_log_qp2,
                          sqrt_mod_prime_power, vp)


# ---------------------------------------------------------------------------
# imaginary quadratic helpers


def fundamental_discriminant(n: int) -> int:
    """Discriminant of Q(sqrt n) for a non-square integer n."""
    s = 1 if n > 0 else -1
    for q, e in factorint(abs(n)).items():
        if e % 2:
            s *= q
    if s == 1:
        raise ValueError(f"{n} is a square")
    return s if s % 4 == 1 else 4 * s


def reduced_forms(delta: int) -> list[tuple[int, int, int]]:
    """Reduced primitive positive definite forms (a, b, c) of discriminant delta < 0."""
    if delta >= 0 or delta % 4 not in (0, 1):
        raise PreconditionError("need a negative discriminant")
    out = []
    a = 1
    while 3 * a * a <= -delta:
        for b in range(-a + 1, a + 1):
            if (b * b - delta) % (4 * a):
                continue
            c = (b * b - delta) // (4 * a)
            if c < a or (b < 0 and a == c):
                continue
            if math.gcd(math.gcd(a, b), c) == 1:
                out.append((a, b, c))
        a += 1
    return out


def class_number(delta: int) -> int:
    """Class number of the imaginary quadratic order of discriminant delta."""
    return len(reduced_forms(delta))


def _least_nonresidue(p: int) -> int:
    n = 2
    while kronecker(n, p) != -1:
        n += 1
    return n


# ---------------------------------------------------------------------------
# multiquadratic fields


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class MultiQuadratic:
    """Q(sqrt d_1, ..., sqrt d_r) with basis s_A = prod_{i in A} sqrt d_i."""

    def __init__(self, gens):
        self.gens = tuple(int(d) for d in gens)
        self.r = len(self.gens)
        self.size = 1 << self.r

    def __eq__(self, o) -> bool:
        return isinstance(o, MultiQuadratic) and o.gens == self.gens

    def __hash__(self):
        return hash(("MQ", self.gens))

    def __repr__(self) -> str:
        return "Q(" + ", ".join(f"sqrt({d})" for d in self.gens) + ")"

    def square_factor(self, A: int, B: int) -> int:
        """s_A * s_B = square_factor(A, B) * s_(A xor B)."""
        out = 1
        for i in _bits(A & B):
            out *= self.gens[i]
        return out

    def element(self, coeffs) -> "HElement":
        if isinstance(coeffs, dict):
            c = [Fraction(0)] * self.size
            for k, v in coeffs.items():
                c[k] = Fraction(v)
            return HElement(self, c)
        return HElement(self, coeffs)

    def rational(self, q) -> "HElement":
        return self.element({0: q})

    def galois(self) -> list[tuple[int, ...]]:
        """Gal(H/Q) as sign vectors on the generators, identity first."""
        return [tuple(s) for s in itertools.product((1, -1), repeat=self.r)]

    def basis_labels(self) -> list[str]:
        out = []
        for A in range(self.size):
            out.append("*".join(f"sqrt({self.gens[i]})" for i in _bits(A)) or "1")
        return out


def compose(g: tuple, h: tuple) -> tuple:
    return tuple(a * b for a, b in zip(g, h))


class HElement:
    """Element of a multiquadratic field, exact."""

    __slots__ = ("H", "c")

    def __init__(self, H: MultiQuadratic, coeffs):
        self.H = H
        self.c = tuple(Fraction(x) for x in coeffs)

    def _co(self, o) -> "HElement":
        return o if isinstance(o, HElement) else self.H.rational(o)

    def __add__(self, o):
        o = self._co(o)
        return HElement(self.H, [x + y for x, y in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return HElement(self.H, [-x for x in self.c])

    def __sub__(self, o):
        return self + (-self._co(o))

    def __mul__(self, o):
        o = self._co(o)
        out = [Fraction(0)] * self.H.size
        for A, x in enumerate(self.c):
            if x:
                for B, y in enumerate(o.c):
                    if y:
                        out[A ^ B] += x * y * self.H.square_factor(A, B)
        return HElement(self.H, out)

    __rmul__ = __mul__

    def act(self, g: tuple) -> "HElement":
        out = []
        for A, x in enumerate(self.c):
            s = 1
            for i in _bits(A):
                s *= g[i]
            out.append(x * s)
        return HElement(self.H, out)

    def norm(self) -> Fraction:
        """N_{H/Q}."""
        prod = self.H.rational(1)
        for g in self.H.galois():
            prod = prod * self.act(g)
        return prod.c[0]

    def inverse(self) -> "HElement":
        prod = self.H.rational(1)
        for g in self.H.galois()[1:]:
            prod = prod * self.act(g)
        n = (prod * self).c[0]
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return prod * (1 / n)

    def __truediv__(self, o):
        return self * self._co(o).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.H.rational(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __eq__(self, o) -> bool:
        if not isinstance(o, HElement):
            try:
                o = self.H.rational(Fraction(o))
            except (TypeError, ValueError):
                return NotImplemented
        return self.H == o.H and self.c == o.c

    def __hash__(self):
        return hash((self.H, self.c))

    def min_poly(self) -> list[Fraction]:
        """Minimal polynomial over Q, constant coefficient first."""
        conjs = []
        for g in self.H.galois():
            x = self.act(g)
            if x not in conjs:
                conjs.append(x)
        poly = [self.H.rational(1)]
        for x in conjs:
            nxt = [self.H.rational(0)] * (len(poly) + 1)
            for i, a in enumerate(poly):
                nxt[i + 1] = nxt[i + 1] + a
                nxt[i] = nxt[i] - a * x
            poly = nxt
        if any(any(a.c[1:]) for a in poly):
            raise ArtifactError("conjugate product is not rational")
        return [a.c[0] for a in poly]

    def __repr__(self) -> str:
        terms = []
        for lab, x in zip(self.H.basis_labels(), self.c):
            if x:
                terms.append(f"{x}" if lab == "1" else f"({x})*{lab}")
        return " + ".join(terms) or "0"

    def to_json(self) -> dict:
        return {"basis": self.H.basis_labels(), "coefficients": [str(x) for x in self.c]}


# ---------------------------------------------------------------------------
# p-adic embedding of H


class PadicEmbedding:
    """iota_p on H: each generator goes to a root in Q_p or in sqrt(n) * Q_p.

    ``root_makers[i](prec)`` returns the image of sqrt(d_i) at the given
    precision; images are recomputed when a higher precision is requested.
    """

    def __init__(self, H: MultiQuadratic, p: int, n: int, root_makers, twisted: list[bool]):
        self.H, self.p, self.n = H, p, n
        self.root_makers = root_makers
        self.twisted = twisted
        self._cache: dict = {}

    def roots(self, prec: int) -> list[Qp2Number]:
        if prec not in self._cache:
            self._cache[prec] = [mk(prec + 4) for mk in self.root_makers]
        return self._cache[prec]

    @property
    def frobenius(self) -> tuple:
        """The sign vector g with iota_p o g = Frob o iota_p."""
        return tuple(-1 if t else 1 for t in self.twisted)

    def embed(self, x: HElement, prec: int) -> Qp2Number:
        p, n = self.p, self.n
        roots = self.roots(prec)
        zero = PadicNumber.zero(p, prec)
        acc = Qp2Number(zero, zero, n)
        for A, c in enumerate(x.c):
            if not c:
                continue
            mono = Qp2Number(PadicNumber.one(p, prec + 4), PadicNumber.zero(p, prec + 4), n)
            for i in _bits(A):
                mono = mono * roots[i]
            acc = acc + mono * c
        return Qp2Number(acc.a.with_prec(prec), acc.b.with_prec(prec), n)


def _qp2(x: PadicNumber, n: int) -> Qp2Number:
    return Qp2Number(x, PadicNumber.zero(x.p, x.prec), n)


def _root_maker(d: int, p: int, n: int):
    """(maker, twisted): maker(prec) is a fixed square root of d in Q_p or sqrt(n) Q_p."""
    if kronecker(d, p) == 1:
        def mk(prec):
            return _qp2(PadicNumber(p, 0, sqrt_mod_prime_power(d, p, prec), prec), n)
        return mk, False

    def mk(prec):
        q = (d * pow(n, -1, p ** prec)) % p ** prec
        r = sqrt_mod_prime_power(q, p, prec)
        return Qp2Number(PadicNumber.zero(p, prec), PadicNumber(p, 0, r, prec), n)
    return mk, True


# ---------------------------------------------------------------------------
# splitting field


@dataclass
class SplittingFieldData:
    """H = F(sqrt delta) for a totally odd quadratic phi, with the place w0 fixed by iota_p."""

    F: BaseField
    phi: HeckeCharacter
    p: int
    prime: IntegralIdeal
    delta: int
    H: MultiQuadratic
    iota: PadicEmbedding
    gal_HF: list                      # [(g, phi(g))] for g in Gal(H/F)
    sigmas: list                      # [{"name", "in_Sigma_p", "tildes"}]
    class_numbers: dict
    places: dict                      # g -> index of the place of iota_p o g
    prec: int = 20

    @property
    def d(self) -> int:
        return self.F.degree

    @property
    def d_p(self) -> int:
        return sum(1 for s in self.sigmas if s["in_Sigma_p"])

    @property
    def decomposition_group(self) -> list:
        f = self.iota.frobenius
        return [g for g in self.H.galois() if g == tuple(1 for _ in g) or g == f]

    def induces_w0(self, g: tuple) -> bool:
        return g in self.decomposition_group

    def to_json(self) -> dict:
        return {
            "F_disc": self.F.disc, "p": self.p, "prime": self.prime.to_json(), "delta": self.delta,
            "H": [str(d) for d in self.H.gens],
            "iota_p": {"nonresidue": self.iota.n,
                       "roots": [r.to_json() for r in self.iota.roots(self.prec)]},
            "gal_H_over_F": [{"g": list(g), "phi": v} for g, v in self.gal_HF],
            "sigmas": [{"name": s["name"], "in_Sigma_p": s["in_Sigma_p"],
                        "tildes": [list(t) for t in s["tildes"]]} for s in self.sigmas],
            "class_numbers": {str(k): v for k, v in sorted(self.class_numbers.items())},
            "places_above_p": {",".join(map(str, g)): i for g, i in self.places.items()},
        }


def _character_sign(phi: HeckeCharacter, I: IntegralIdeal) -> int:
    e = phi.exponent(I)
    if e is None:
        return 0
    return 1 if e == 0 else -1


def base_change_discriminant(phi: HeckeCharacter, bound: int = 400) -> Optional[int]:
    """The negative fundamental delta, least in absolute value, with phi = kron(delta, N .), or None."""
    F = phi.F
    cond = phi.conductor.norm
    top = 4 * cond * F.disc
    cands = sorted((-m for m in range(3, top + 1) if top % m == 0 and _is_fund(-m)), key=abs)
    primes = F.prime_ideals_up_to(bound, coprime_to=2 * cond * F.disc)
    for dl in cands:
        if all(_character_sign(phi, P) == kronecker(dl, P.norm) for P in primes
               if P.norm % abs(dl)):
            return dl
    return None


def _is_fund(D: int) -> bool:
    from .field_arith import is_fundamental_discriminant
    return is_fundamental_discriminant(D)


def splitting_field(phi: HeckeCharacter, p: int, prime: Optional[IntegralIdeal] = None,
                    prec: int = 20, flip: bool = False) -> SplittingFieldData:
    """Explicit H = F(sqrt delta) with complete splitting of the irregular prime verified.

    ``flip`` replaces iota_p by its composite with the nontrivial element of
    Gal(H/F), which moves w0 to the conjugate place.
    """
    if phi.order != 2:
        raise NonQuadratic(f"character of order {phi.order}; only quadratic characters are supported")
    if not is_totally_odd(phi):
        raise PreconditionError("phi is not totally odd")
    F = phi.F
    prim = phi.primitive()
    if prim.conductor.norm % p == 0 or F.disc % p == 0 or p == 2:
        raise PreconditionError(f"p = {p} must be odd and prime to the conductor and the discriminant")
    irr = irregular_primes(prim, p)
    if prime is None:
        if not irr:
            raise NotSplit(f"phi(P) != 1 for every prime above {p}")
        prime = irr[0]
    elif prime not in irr:
        raise NotSplit(f"phi({prime}) != 1")
    dl = base_change_discriminant(prim)
    if dl is None:
        raise NotApplicable("splitting field is not multiquadratic over Q; "
                            "over a real quadratic field only base-change characters are supported")

    inert_F = F.degree == 2 and len(F.primes_above(p)) == 1
    n = F.disc if inert_F else _least_nonresidue(p)
    if F.degree == 1:
        H = MultiQuadratic((dl,))
        mk, tw = _root_maker(dl, p, n)
        makers, twisted = [mk], [tw]
    else:
        H = MultiQuadratic((F.disc, dl))
        if inert_F:
            def mkD(w):
                return Qp2Number(PadicNumber.zero(p, w), PadicNumber.one(p, w), n)
            twD = True
        else:
            def mkD(w):
                return _qp2(embed_padic(F, F.sqrt_disc, p, w, prime=prime), n)
            twD = False
        mkd, twd = _root_maker(dl, p, n)
        makers, twisted = [mkD, mkd], [twD, twd]
    if flip:
        last = makers[-1]
        makers[-1] = lambda w: -last(w)
    iota = PadicEmbedding(H, p, n, makers, twisted)

    if F.degree == 1:
        gal_HF = [((1,), 1), ((-1,), -1)]
    else:
        gal_HF = [((1, 1), 1), ((1, -1), -1)]
    frob = iota.frobenius
    if frob in [g for g, v in gal_HF if v == -1]:
        raise NotSplit(f"{prime} does not split in H")

    ident = tuple(1 for _ in H.gens)
    dec = [ident] if frob == ident else [ident, frob]
    if F.degree == 1:
        sigmas = [{"name": "id", "in_Sigma_p": True, "tildes": [ident]}]
    else:
        conj_lifts = [g for g in H.galois() if g[0] == -1]
        sigmas = [{"name": "id", "in_Sigma_p": True, "tildes": [ident]}]
        if inert_F:
            sigmas.append({"name": "conj", "in_Sigma_p": True, "tildes": [frob]})
        else:
            sigmas.append({"name": "conj", "in_Sigma_p": False, "tildes": conj_lifts})

    places: dict = {}
    cosets: list = []
    for g in H.galois():
        coset = frozenset(compose(g, h) for h in dec)
        if coset not in cosets:
            cosets.append(coset)
        places[g] = cosets.index(coset)

    hs = {dl: class_number(dl)}
    if F.degree == 2:
        other = fundamental_discriminant(F.disc * dl)
        hs[other] = class_number(other)
        hs[F.disc] = narrow_ray_class_group(F, F.unit_ideal()).order
    return SplittingFieldData(F, phi, p, prime, dl, H, iota, gal_HF, sigmas, hs, places, prec)


# ---------------------------------------------------------------------------
# p-units


@dataclass
class PUnit:
    """u0 in O_H[1/w0]^x with positive valuation at w0 and zero valuation at every other place."""

    element: HElement
    ord_w0: int
    valuations: dict                  # g -> v(iota_p(g u0))
    description: str
    search: dict = field(default_factory=dict)

    def min_poly(self) -> list[Fraction]:
        return self.element.min_poly()

    def to_json(self) -> dict:
        return {"element": self.element.to_json(), "min_poly": [str(c) for c in self.min_poly()],
                "ord_w0": self.ord_w0, "description": self.description,
                "valuations": {",".join(map(str, g)): v for g, v in self.valuations.items()},
                "search": self.search}


def imag_quadratic_p_unit(delta: int, p: int, bound: Optional[int] = None,
                          scale: int = 1) -> tuple[int, int, int]:
    """(a, b, e) with alpha = (a + b sqrt(delta))/2 of norm p^e, p not dividing alpha.

    Exponents e = scale*m are tried for m = 1, ..., h(delta); for each, the norm
    equation a^2 + |delta| b^2 = 4 p^e is solved by enumerating b upward,
    with |a|, |b| <= bound when a bound is given.
    """
    h = class_number(delta)
    limited = False
    for m in range(1, h + 1):
        e = scale * m
        target = 4 * p ** e
        bmax = math.isqrt(target // -delta)
        if bound is not None and bmax > bound:
            bmax, limited = bound, True
        for b in range(0, bmax + 1):
            a2 = target + delta * b * b
            a = math.isqrt(a2)
            if a * a != a2 or (a - delta * b) % 2:
                continue
            if bound is not None and a > bound:
                limited = True
                continue
            if math.gcd(a, b) % p == 0:
                continue
            return a, b, e
    if limited:
        raise SearchExhausted(f"no element of norm p^e within height bound {bound}")
    raise ArtifactError(f"no generator found for a prime above {p} in Q(sqrt({delta}))")


def _search(delta, p, bound, scale):
    if bound is not None:
        return imag_quadratic_p_unit(delta, p, bound, scale)
    B = 16
    while True:
        try:
            return imag_quadratic_p_unit(delta, p, B, scale)
        except SearchExhausted:
            B *= 2


def _valuation(x: Qp2Number) -> int:
    return x.val


def _orient(SF: SplittingFieldData, x: HElement, prec: int) -> HElement:
    """Return x or its conjugate over Q inside its quadratic subfield so that iota_p x has positive valuation."""
    if SF.iota.embed(x, prec).val > 0:
        return x
    for g in SF.H.galois()[1:]:
        y = x.act(g)
        if y != x and SF.iota.embed(y, prec).val > 0:
            return y
    raise ArtifactError("no conjugate with positive valuation at w0")


def _subfield_element(SF: SplittingFieldData, delta_k: int, a: int, b: int) -> HElement:
    """(a + b sqrt(delta_k))/2 as an element of H."""
    H = SF.H
    half = Fraction(1, 2)
    if H.r == 1:
        return H.element({0: a * half, 1: b * half})
    D, dl = H.gens
    if delta_k == dl:
        return H.element({0: a * half, 2: b * half})
    # sqrt(delta_k) = sqrt(D) sqrt(dl) / s
    s = math.isqrt(D * dl // delta_k)
    if s * s * delta_k != D * dl:
        raise ArtifactError("subfield discriminant mismatch")
    return H.element({0: a * half, 3: b * half / s})


def find_p_unit(SF: SplittingFieldData, bound: Optional[int] = None, independent: bool = False,
                prec: int = 8) -> PUnit:
    """A p-unit supported exactly at w0, assembled from p-units of the quadratic subfields.

    ``independent`` runs a different search (norm targets p^(2m) in place of
    p^m), giving a second generator for the well-definedness check.
    """
    H, p, F = SF.H, SF.p, SF.F
    scale = 2 if independent else 1
    search = {"bound": bound, "norm_exponent_scale": scale}
    if F.degree == 1:
        a, b, e = _search(SF.delta, p, bound, scale)
        u = _orient(SF, _subfield_element(SF, SF.delta, a, b), prec + e)
        desc = f"({a} + {b}*sqrt({SF.delta}))/2 up to conjugation"
        search["exponents"] = [e]
    elif SF.d_p == 2:
        D, dl = H.gens
        dk = next(x for x in (dl, fundamental_discriminant(D * dl)) if kronecker(x, p) == 1)
        a, b, e = _search(dk, p, bound, scale)
        u = _orient(SF, _subfield_element(SF, dk, a, b), prec + e)
        desc = f"({a} + {b}*sqrt({dk}))/2 up to conjugation"
        search["exponents"] = [e]
    else:
        D, dl = H.gens
        d2 = fundamental_discriminant(D * dl)
        parts = []
        for dk in (dl, d2):
            a, b, e = _search(dk, p, bound, scale)
            parts.append((_orient(SF, _subfield_element(SF, dk, a, b), prec + e), e,
                          f"({a} + {b}*sqrt({dk}))/2"))
        hF = SF.class_numbers[F.disc]
        pi = None
        for m in range(1, 2 * hF + 1):
            k = scale * m
            g = find_generator(F, SF.prime ** k)
            if g is not None:
                A, B = g.sqrt_coords()
                pi = (_orient(SF, H.element({0: A, 1: B}), prec + k), k, f"generator of P^{k}")
                break
        if pi is None:
            raise SearchExhausted("no generator of a power of P")
        parts.append(pi)
        L = 1
        for _, e, _ in parts:
            L = math.lcm(L, e)
        u = H.rational(1)
        for x, e, _ in parts:
            u = u * x ** (L // e)
        u = u / p ** L
        desc = " * ".join(f"[{d}]^{L // e}" for _, e, d in parts) + f" / {p}^{L}"
        search["exponents"] = [e for _, e, _ in parts]
    norm = u.norm()
    num, den = abs(norm.numerator), norm.denominator
    if num * den != p ** (vp(num, p) + vp(den, p)):
        raise ArtifactError("search returned an element that is not a p-unit")
    vals = {}
    W = prec + 4 * abs(vp(num, p) - vp(den, p)) + 4
    for g in H.galois():
        vals[g] = _valuation(SF.iota.embed(u.act(g), W))
    for g, v in vals.items():
        if SF.induces_w0(g) != (v > 0) or v < 0:
            raise ArtifactError("p-unit is not supported exactly at w0")
    ident = H.galois()[0]
    return PUnit(u, vals[ident], vals, desc, search)


# ---------------------------------------------------------------------------
# L-invariant


@dataclass
class LInvariantReport:
    ord: Fraction
    log: PadicNumber
    L: PadicNumber
    ledger: PrecisionLedger
    unit: PUnit
    power: int
    splitting: SplittingFieldData

    def to_json(self) -> dict:
        return {"ord_P(u_phi)": str(self.ord), "log_P(u_phi)": self.log.to_json(),
                "L_invariant": self.L.to_json(), "ledger": self.ledger.to_json(),
                "u0": self.unit.to_json(), "power": self.power,
                "splitting_field": self.splitting.to_json()}


def _norm_to_qp(x: Qp2Number, d_p: int) -> PadicNumber:
    if d_p == 2:
        return x.norm()
    if not x.b.is_zero():
        raise ArtifactError("local image is not in Q_p although the completion is Q_p")
    return x.a


def u_phi_image(SF: SplittingFieldData, u0: HElement, prec: int) -> tuple[Qp2Number, int]:
    """iota_p(u_phi) = prod_g iota_p(g^-1 u0)^phi(g) and ord_w0(u_phi) = sum_g phi(g) ord_w0(g^-1 u0)."""
    acc = None
    ordv = 0
    for g, v in SF.gal_HF:
        y = SF.iota.embed(u0.act(g), prec)
        ordv += v * y.val
        term = y if v == 1 else y._coerce(1) / y
        acc = term if acc is None else acc * term
    return acc, ordv


def l_invariant(phi: HeckeCharacter, p: int, N: int = 12, prime: Optional[IntegralIdeal] = None,
                unit: Optional[PUnit] = None, power: int = 1, flip: bool = False,
                bound: Optional[int] = None, independent: bool = False) -> LInvariantReport:
    """L^P(phi) = -log_P(u_phi) / ord_P(u_phi), log_P = log_p o N_{F_P/Q_p}."""
    SF = splitting_field(phi, p, prime, prec=N, flip=flip)
    if unit is None:
        unit = find_p_unit(SF, bound=bound, independent=independent)
    u0 = unit.element ** power
    ledger = PrecisionLedger(N)
    # the unit part keeps N digits: work at N plus the valuation of u_phi
    W = N + power * max(unit.valuations.values()) + 2
    img, ordv = u_phi_image(SF, u0, W)
    if ordv == 0:
        raise ArtifactError("u_phi has zero valuation at w0")
    lg = padic_log(_norm_to_qp(img, SF.d_p))
    lg = lg.with_prec(min(lg.prec, N))
    ledger.record("log_p series length", N - lg.prec)
    ledger.record("division by ord", vp(ordv, p))
    L = (-lg / ordv).with_prec(ledger.output_prec)
    return LInvariantReport(Fraction(ordv), lg, L, ledger, unit, power, SF)


def l_invariant_sum_check(phi: HeckeCharacter, p: int, N: int = 12) -> dict:
    """L(phi) + L(phi^-1) and whether it is nonzero at the ledgered precision."""
    F = phi.F
    if len(F.primes_above(p)) != 1:
        raise PreconditionError("the sum check needs a unique prime above p")
    r1 = l_invariant(phi, p, N)
    r2 = l_invariant(phi.inverse(), p, N)
    n_out = min(r1.ledger.output_prec, r2.ledger.output_prec)
    s = (r1.L + r2.L).with_prec(n_out)
    if s.is_zero():
        raise InconclusivePrecision(f"L(phi) + L(phi^-1) vanishes to precision {n_out}")
    return {"L_phi": r1.L, "L_phi_inv": r2.L, "sum": s, "nonzero": True, "precision": n_out,
            "reports": (r1, r2)}


# ---------------------------------------------------------------------------
# cocycle log matrices


def _log2(x: Qp2Number) -> Qp2Number:
    return padic_log_qp2(x)


def cocycle_unit_value(SF: SplittingFieldData, tilde: tuple, x: HElement, prec: int) -> Qp2Number:
    """eta^(tilde) on x placed at w0: sum over g with tilde g^-1 in D_w0 of phi(g) log_p(iota_p tilde g^-1 x)."""
    zero = PadicNumber.zero(SF.p, prec)
    acc = Qp2Number(zero, zero, SF.iota.n)
    for g, v in SF.gal_HF:
        h = compose(tilde, g)
        if SF.induces_w0(h):
            acc = acc + _log2(SF.iota.embed(x.act(h), prec)) * v
    return acc


def cocycle_frobenius_value(SF: SplittingFieldData, tilde: tuple, u0: HElement, ord_w0: int,
                            prec: int) -> Qp2Number:
    """eta^(tilde)(Frob_P) = -(1/ord) sum_g phi(g) log_p(iota_p tilde g^-1 u0), by global reciprocity on u0."""
    zero = PadicNumber.zero(SF.p, prec)
    acc = Qp2Number(zero, zero, SF.iota.n)
    for g, v in SF.gal_HF:
        acc = acc + _log2(SF.iota.embed(u0.act(compose(tilde, g)), prec)) * v
    return acc * Fraction(-1, ord_w0)


def _local_units(SF: SplittingFieldData) -> list[HElement]:
    H, p = SF.H, SF.p
    out = [H.rational(1 + p)]
    if SF.d_p == 2:
        out.append(H.element({0: 1, 1: p}))
    return out


def _det(m: list[list[Qp2Number]]) -> Qp2Number:
    if len(m) == 1:
        return m[0][0]
    if len(m) == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    tot = None
    for j in range(len(m)):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        t = m[0][j] * _det(minor)
        t = t if j % 2 == 0 else -t
        tot = t if tot is None else tot + t
    return tot


def numeric_rank(m: list[list[Qp2Number]]) -> int:
    """Largest k with a k x k minor that is nonzero at the precision carried by the entries."""
    rows, cols = len(m), len(m[0]) if m else 0
    for k in range(min(rows, cols), 0, -1):
        for R in itertools.combinations(range(rows), k):
            for C in itertools.combinations(range(cols), k):
                if not _det([[m[i][j] for j in C] for i in R]).is_zero():
                    return k
    return 0


def cocycle_matrix(SF: SplittingFieldData, unit: PUnit, prec: int, choice: int = 0) -> dict:
    """Coordinates of loc_P(eta^(sigma~)) for sigma in Sigma: unit rows at w0, then the Frobenius row."""
    units = _local_units(SF)
    cols = []
    for s in SF.sigmas:
        t = s["tildes"][min(choice, len(s["tildes"]) - 1)]
        col = [cocycle_unit_value(SF, t, x, prec) for x in units]
        col.append(cocycle_frobenius_value(SF, t, unit.element, unit.ord_w0, prec))
        cols.append((s, t, col))
    rows = [[c[2][i] for c in cols] for i in range(len(units) + 1)]
    return {"rows": rows, "columns": [(s["name"], t) for s, t, _ in cols], "units": units}


def _solve(A: list[list[Qp2Number]], b: list[Qp2Number]) -> list[Qp2Number]:
    """Cramer's rule for a square system of size <= 2."""
    d = _det(A)
    if d.is_zero():
        raise InconclusivePrecision("singular unit block")
    out = []
    for j in range(len(A)):
        Aj = [row[:j] + [b[i]] + row[j + 1:] for i, row in enumerate(A)]
        out.append(_det(Aj) / d)
    return out


@dataclass
class RankReport:
    d: int
    d_p: int
    observed: int
    expected: int
    ranks: dict
    choice_independent: bool
    prop_iii: list
    prop_ii: dict
    unramified_columns_ok: bool
    matrix: list

    @property
    def ok(self) -> bool:
        return (self.observed == self.expected and self.choice_independent and self.unramified_columns_ok
                and all(e["nonzero"] for e in self.prop_iii) and self.prop_ii["agree"])

    def to_json(self) -> dict:
        return {"d": self.d, "d_p": self.d_p, "observed_kernel_dim": self.observed,
                "expected_kernel_dim": self.expected, "ranks": {str(k): v for k, v in self.ranks.items()},
                "choice_independent": self.choice_independent, "prop_iii": self.prop_iii,
                "prop_ii": self.prop_ii, "unramified_columns_ok": self.unramified_columns_ok,
                "matrix": self.matrix, "ok": self.ok}


def cocycle_rank_check(phi: HeckeCharacter, p: int, N: int = 12,
                       prime: Optional[IntegralIdeal] = None) -> RankReport:
    """Kernel dimension of loc_P on the basis eta^(sigma~), sigma in Sigma, compared with max(d - d_P - 1, 0)."""
    SF = splitting_field(phi, p, prime, prec=N)
    unit = find_p_unit(SF)
    d, d_p = SF.d, SF.d_p
    expected = max(d - d_p - 1, 0)
    W0 = N + unit.ord_w0 + 2

    def at(n: int, choice: int = 0):
        M = cocycle_matrix(SF, unit, n + unit.ord_w0 + 2, choice)
        rows = [[Qp2Number(x.a.with_prec(n), x.b.with_prec(n), x.d) for x in r] for r in M["rows"]]
        return rows, M

    ranks = {}
    for n in (N, N - 2):
        ranks[n] = numeric_rank(at(n)[0])
    if ranks[N] != ranks[N - 2]:
        raise RankUnstable(f"rank {ranks[N]} at precision {N} but {ranks[N - 2]} at {N - 2}")
    rows, M = at(N)
    alt_rank = numeric_rank(at(N, choice=1)[0])
    observed = d - ranks[N]
    n_units = len(M["units"])

    unram_ok = True
    prop_iii = []
    for j, s in enumerate(SF.sigmas):
        if not s["in_Sigma_p"]:
            unram_ok = unram_ok and all(rows[i][j].is_zero() for i in range(n_units))
            for choice in range(len(s["tildes"])):
                val = at(N, choice)[0][n_units][j]
                prop_iii.append({"sigma": s["name"], "tilde": list(s["tildes"][choice]),
                                 "frobenius_value": val.to_json(), "nonzero": not val.is_zero()})

    # Prop (ii): solve unit block for eta^(P) = sum h_sigma eta^(sigma~) matching eta_1 = log_p o N on units
    in_p = [j for j, s in enumerate(SF.sigmas) if s["in_Sigma_p"]]
    A = [[rows[i][j] for j in in_p] for i in range(n_units)]
    rhs = []
    for x in M["units"]:
        img = SF.iota.embed(x, W0)
        rhs.append(_qp2(padic_log(_norm_to_qp(img, d_p)).with_prec(N), SF.iota.n))
    h = _solve(A, rhs)
    L_mat = None
    for hj, j in zip(h, in_p):
        t = hj * rows[n_units][j]
        L_mat = t if L_mat is None else L_mat + t
    rep = l_invariant(phi, p, N, prime=SF.prime, unit=unit)
    diff = L_mat - _qp2(rep.L, SF.iota.n)
    prec_cmp = min(rep.ledger.output_prec, L_mat.prec)
    agree = Qp2Number(diff.a.with_prec(prec_cmp), diff.b.with_prec(prec_cmp), diff.d).is_zero()
    prop_ii = {"L_from_matrix": L_mat.to_json(), "L_invariant": rep.L.to_json(),
               "h": [x.to_json() for x in h], "precision": prec_cmp, "agree": agree}
    matrix = [[x.to_json() for x in r] for r in rows]
    return RankReport(d, d_p, observed, expected, ranks, alt_rank == ranks[N], prop_iii, prop_ii,
                      unram_ok, matrix)
