"""Finite-order Hecke characters of F as characters of narrow ray class groups.

A character is stored by its exponents on the Smith generators of the group:
the value on generator i is exp(2 pi i * values[i]) with values[i] a Fraction
in [0, 1).  Values on ideals sharing a prime with the conductor are 0; ideals
coprime to the conductor but not to the modulus are evaluated through the
primitive character.
"""

from __future__ import annotations

import hashlib
import json
import math
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Optional

from .cyclotomic import Cyclo
from .errors import InconsistentValues, PreconditionError
from .field_arith import (
    BaseField,
    IntegralIdeal,
    NarrowRayClassGroup,
    create_field,
    divisors,
    factor_ideal,
    ideals_of_norm,
    kronecker,
    narrow_ray_class_group,
)
from .padic_arith import PadicNumber, teichmuller_int


def _as_exponent(v) -> Fraction:
    """Normalize a character value given as an exponent, a sign or an (n, e) pair."""
    if isinstance(v, tuple):
        n, e = v
        return Fraction(e, n) % 1
    if isinstance(v, int) and v in (1, -1) and not isinstance(v, bool):
        return Fraction(0) if v == 1 else Fraction(1, 2)
    return Fraction(v) % 1


class HeckeCharacter:
    """A character of the narrow ray class group ``G``."""

    def __init__(self, G: NarrowRayClassGroup, values: Iterable, name: Optional[str] = None):
        vals = tuple(_as_exponent(v) for v in values)
        if len(vals) != len(G.invariants):
            raise InconsistentValues(
                f"expected {len(G.invariants)} generator values, got {len(vals)}")
        for v, d in zip(vals, G.invariants):
            if (v * d).denominator != 1:
                raise InconsistentValues(f"value exp(2 pi i {v}) is not a {d}-th root of unity")
        self.G = G
        self.F: BaseField = G.F
        self.modulus: IntegralIdeal = G.modulus
        self.values = vals
        self.name = name

    # -- basic data ------------------------------------------------------
    def __repr__(self) -> str:
        label = self.name or "chi"
        return f"<HeckeCharacter {label} of {self.F} mod {self.modulus}>"

    def __eq__(self, other) -> bool:
        return (isinstance(other, HeckeCharacter) and self.F == other.F
                and self.modulus == other.modulus and self.values == other.values)

    def __hash__(self):
        return hash((self.F.disc, self.modulus.key, self.values))

    @cached_property
    def order(self) -> int:
        return math.lcm(1, *(v.denominator for v in self.values))

    def is_trivial(self) -> bool:
        return self.order == 1

    def is_quadratic(self) -> bool:
        return self.order == 2

    def exponent_of_class(self, c: tuple[int, ...]) -> Fraction:
        return sum((v * x for v, x in zip(self.values, c)), Fraction(0)) % 1

    def exponent(self, I: IntegralIdeal) -> Optional[Fraction]:
        """exp(2 pi i * result) = chi(I); None when I is not coprime to the conductor."""
        if I.is_coprime_to(self.modulus):
            return self.exponent_of_class(self.G.coords(I))
        if not I.is_coprime_to(self.conductor):
            return None
        return self.primitive().exponent(I)

    def __call__(self, I: IntegralIdeal) -> Cyclo:
        return eval_character(self, I)

    def sign(self, I: IntegralIdeal) -> int:
        """Value of a real-valued character as an integer in {-1, 0, 1}."""
        e = self.exponent(I)
        if e is None:
            return 0
        if e == 0:
            return 1
        if e == Fraction(1, 2):
            return -1
        raise ValueError("character value is not real")

    # -- conductor -------------------------------------------------------
    def _factors_through(self, f: IntegralIdeal) -> bool:
        """True if chi is trivial on the kernel of Cl_m^+ -> Cl_f^+."""
        F, m = self.F, self.modulus
        if f == m:
            return True
        R = self.G.R
        am = m.a
        seen = set()
        basis = f.basis()
        rng = range(am) if F.degree == 2 else range(am // f.a)
        for i in rng:
            for j in (rng if F.degree == 2 else (0,)):
                x = basis[0] * i + (basis[1] * j if F.degree == 2 else 0)
                alpha = x + 1
                r = R.reduce(alpha)
                if r in seen:
                    continue
                seen.add(r)
                if F.degree == 1:
                    alpha = F.element(alpha.a % am or am)
                else:
                    sizes = F.real_embeddings(alpha)
                    K = int(max(abs(s) for s in sizes) / am) + 2
                    alpha = alpha + am * K
                I = F.ideal(alpha)
                if not I.is_coprime_to(m):
                    continue
                if self.exponent_of_class(self.G.coords(I)) != 0:
                    return False
        return True

    @cached_property
    def conductor(self) -> IntegralIdeal:
        if self.is_trivial():
            return self.F.unit_ideal()
        good = [f for f in divisors(self.F, self.modulus) if self._factors_through(f)]
        best = min(good, key=lambda f: (f.norm, f.key))
        return best

    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def primitive(self) -> "HeckeCharacter":
        """The character attached to the conductor that induces this one."""
        if "_primitive" in self.__dict__:
            return self.__dict__["_primitive"]
        if self.is_primitive():
            prim = self
        else:
            Gf = narrow_ray_class_group(self.F, self.conductor)

            def f(I):
                return self.exponent_of_class(self.G.coords(I))

            prim = character_from_function(Gf, f, avoid=self.modulus, name=self.name)
            if hasattr(self, "base_change_of"):
                prim.base_change_of = self.base_change_of
        self.__dict__["_primitive"] = prim
        return prim

    # -- algebra ---------------------------------------------------------
    def inverse(self) -> "HeckeCharacter":
        name = f"{self.name}^-1" if self.name else None
        inv = HeckeCharacter(self.G, [(-v) % 1 for v in self.values], name=name)
        if hasattr(self, "base_change_of"):
            inv.base_change_of = self.base_change_of.inverse()
        return inv

    def __mul__(self, other: "HeckeCharacter") -> "HeckeCharacter":
        if self.F != other.F:
            raise PreconditionError("characters of different fields")
        if self.is_trivial() and self.modulus.norm == 1:
            return other
        if other.is_trivial() and other.modulus.norm == 1:
            return self
        if self.modulus == other.modulus:
            return HeckeCharacter(self.G, [(a + b) % 1 for a, b in zip(self.values, other.values)])
        m = lcm_ideal(self.F, self.modulus, other.modulus)
        Gm = narrow_ray_class_group(self.F, m)
        return character_from_function(Gm, lambda I: (self.exponent(I) + other.exponent(I)) % 1)

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        return {
            "field_disc": self.F.disc,
            "modulus": self.modulus.to_json(),
            "group_invariants": list(self.G.invariants),
            "generator_values": [str(v) for v in self.values],
            "order": self.order,
            "conductor": self.conductor.to_json(),
            "totally_odd": is_totally_odd(self),
        }

    @cached_property
    def canonical_id(self) -> str:
        data = {"disc": self.F.disc, "modulus": list(self.modulus.key),
                "values": [str(v) for v in self.values]}
        raw = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(raw.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# constructors


def build_character(G: NarrowRayClassGroup, values: Iterable, name: Optional[str] = None) -> HeckeCharacter:
    return HeckeCharacter(G, values, name=name)


def trivial_character(F: BaseField) -> HeckeCharacter:
    G = narrow_ray_class_group(F, F.unit_ideal())
    return HeckeCharacter(G, [0] * len(G.invariants), name="1")


def _class_representatives_avoiding(G: NarrowRayClassGroup, targets: set, avoid: IntegralIdeal):
    found: dict = {}
    stop = avoid.a * G.modulus.a
    n = 1
    limit = 200 * (G.order + 1) ** 2 * max(1, G.F.disc)
    while len(found) < len(targets):
        if n > limit:
            raise InconsistentValues("could not find class representatives coprime to the modulus")
        if math.gcd(n, stop) == 1:
            for I in ideals_of_norm(G.F, n):
                c = G.coords(I)
                if c in targets and c not in found:
                    found[c] = I
        n += 1
    return found


def character_from_function(G: NarrowRayClassGroup, f: Callable[[IntegralIdeal], Fraction],
                            avoid: Optional[IntegralIdeal] = None, check_bound: int = 60,
                            name: Optional[str] = None) -> HeckeCharacter:
    """The character of G agreeing with the multiplicative function f.

    f takes integral ideals coprime to ``avoid`` (and to the modulus) to exponents
    in Q/Z.  The result is verified on all such ideals of norm <= check_bound;
    a mismatch raises InconsistentValues.
    """
    avoid = avoid if avoid is not None else G.modulus
    r = len(G.invariants)
    units = [tuple(1 if j == i else 0 for j in range(r)) for i in range(r)]
    reps = _class_representatives_avoiding(G, set(units), avoid)
    values = [Fraction(f(reps[e])) % 1 for e in units]
    chi = HeckeCharacter(G, values, name=name)
    stop = avoid.a * G.modulus.a
    for n in range(1, check_bound + 1):
        if math.gcd(n, stop) != 1:
            continue
        for I in ideals_of_norm(G.F, n):
            if chi.exponent_of_class(G.coords(I)) != Fraction(f(I)) % 1:
                raise InconsistentValues(f"function is not a character of {G.modulus} (fails at {I})")
    return chi


def kronecker_character(D: int, F: Optional[BaseField] = None) -> HeckeCharacter:
    """The quadratic character n -> (D/n) of the field of discriminant D, as a character over Q."""
    F = F or create_field(1)
    if F.degree != 1:
        raise PreconditionError("Kronecker characters are built over Q; use base_change")
    G = narrow_ray_class_group(F, F.ideal(abs(D)))
    return character_from_function(
        G, lambda I: Fraction(0) if kronecker(D, I.norm) == 1 else Fraction(1, 2), name=f"kron({D})")


def quadratic_character_mod(q: int) -> HeckeCharacter:
    """The unique quadratic Dirichlet character of odd prime conductor q."""
    D = q if q % 4 == 1 else -q
    chi = kronecker_character(D)
    chi.name = f"mod{q}quad"
    return chi


def dirichlet_character(m: int, gen_values: Iterable) -> HeckeCharacter:
    """Character of (Z/m)^x given by exponents on the Smith generators of the ray class group."""
    F = create_field(1)
    return HeckeCharacter(narrow_ray_class_group(F, F.ideal(m)), gen_values)


def base_change(F: BaseField, chi: HeckeCharacter) -> HeckeCharacter:
    """chi composed with the ideal norm, a character of F of modulus (f), f the conductor of chi."""
    if chi.F.degree != 1:
        raise PreconditionError("base change starts from a character over Q")
    f = chi.conductor.a
    G = narrow_ray_class_group(F, F.ideal(f))
    Q = chi.F
    phi = character_from_function(G, lambda I: chi.exponent(Q.ideal(I.norm)),
                                  name=f"{chi.name or 'chi'}oN")
    phi.base_change_of = chi
    return phi


def lcm_ideal(F: BaseField, I: IntegralIdeal, J: IntegralIdeal) -> IntegralIdeal:
    exps: dict = {}
    for P, e in factor_ideal(F, I) + factor_ideal(F, J):
        exps[P] = max(exps.get(P, 0), e)
    out = F.unit_ideal()
    for P, e in exps.items():
        out = out * P ** e
    return out


# ---------------------------------------------------------------------------
# evaluation and predicates


def eval_character(chi: HeckeCharacter, I: IntegralIdeal) -> Cyclo:
    e = chi.exponent(I)
    if e is None:
        return Cyclo.rational(0)
    return Cyclo.root_of_unity(e)


def eval_character_padic(chi: HeckeCharacter, I: IntegralIdeal, p: int, prec: int) -> PadicNumber:
    """iota_p of chi(I)."""
    return eval_character(chi, I).to_padic(p, prec)


def is_totally_odd(chi: HeckeCharacter) -> bool:
    return all(chi.exponent_of_class(c) == Fraction(1, 2) for c in chi.G.sign_classes())


def irregular_primes(phi: HeckeCharacter, p: int) -> list[IntegralIdeal]:
    """Primes above p at which phi takes the value 1."""
    if phi.conductor.norm % p == 0:
        raise PreconditionError(f"{p} divides the conductor")
    return [P for P in phi.F.primes_above(p) if phi.exponent(P) == 0]


def teichmuller_on_ideal(I: IntegralIdeal, p: int, prec: int) -> PadicNumber:
    """omega_p(I) = teichmuller(N(I) mod p)."""
    return teichmuller_int(I.norm % p, p, prec)


def delta(chi: HeckeCharacter) -> int:
    """1 if the conductor is the unit ideal, else 0."""
    return 1 if chi.conductor.norm == 1 else 0


# ---------------------------------------------------------------------------
# pairs


class CharacterPair:
    """(phi1, phi2) with phi = phi1^-1 phi2 totally odd and cond(phi1) prime to p."""

    def __init__(self, phi1: HeckeCharacter, phi2: HeckeCharacter, p: int):
        if phi1.F != phi2.F:
            raise PreconditionError("characters of different fields")
        self.F = phi1.F
        self.p = p
        self.phi1 = phi1
        self.phi2 = phi2
        n1, n2 = phi1.conductor, phi2.conductor
        if n1.norm % p == 0:
            raise PreconditionError("conductor of phi1 must be prime to p")
        phi = (phi1.inverse() * phi2).primitive()
        if not is_totally_odd(phi):
            raise PreconditionError("phi = phi1^-1 phi2 is not totally odd")
        self.phi = phi
        self.m = n1 * n2
        tame = self.F.unit_ideal()
        for P, e in factor_ideal(self.F, self.m):
            if P.residue_prime() != p:
                tame = tame * P ** e
        self.tame_level = tame
        self.n = max([e for P, e in factor_ideal(self.F, self.m) if P.residue_prime() == p] or [0])

    def extra_primes(self) -> list[IntegralIdeal]:
        """Primes dividing the tame level but not the conductor of phi."""
        c = self.phi.conductor
        return [P for P, _ in factor_ideal(self.F, self.tame_level) if not P.divides(c)]

    def to_json(self) -> dict:
        return {"phi1": self.phi1.to_json(), "phi2": self.phi2.to_json(), "p": self.p,
                "phi": self.phi.to_json(), "tame_level": self.tame_level.to_json(), "n": self.n}


def single_pair(phi: HeckeCharacter, p: int) -> CharacterPair:
    """The pair (1, phi)."""
    return CharacterPair(trivial_character(phi.F), phi, p)
