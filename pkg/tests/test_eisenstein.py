import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from artifact.characters import (CharacterPair, build_character, eval_character, quadratic_character_mod,
                                 trivial_character)
from artifact.cyclotomic import Cyclo
from artifact.eisenstein import (CuspLabel, cusp_constant_term_vanishes, family_coeff, family_constant_term,
                                 p_stabilize_weight1, pprime_stabilized_constant_term, specialize_family_coeff,
                                 weight_k_coeff)
from artifact.errors import IncompleteCuspData
from artifact.field_arith import create_field, narrow_ray_class_group
from artifact.padic_arith import PadicNumber
from artifact.zeta import classical_L_value, imprimitive_zeta

from conftest import legendre


@pytest.fixture(scope="module")
def pair7(one, chi7):
    return CharacterPair(one, chi7, 11)


@pytest.fixture(scope="module")
def psi12():
    """The unramified totally odd character of Q(sqrt 3)."""
    F = create_field(12)
    return build_character(narrow_ray_class_group(F, F.unit_ideal()), [Fraction(1, 2)])


def divisor_sum_oracle(n: int, f1, f2, k: int = 1, p: int = 0) -> Fraction:
    return sum(Fraction(f1(n // a) * f2(a) * a ** (k - 1)) for a in range(1, n + 1)
               if n % a == 0 and (p == 0 or a % p))


def test_weight_k_examples(Q, pair7):
    assert weight_k_coeff(pair7, Q.unit_ideal()) == 1
    assert weight_k_coeff(pair7, Q.ideal(4)) == 3
    for l in (2, 3, 5, 13):
        assert weight_k_coeff(pair7, Q.ideal(l)) == 1 + legendre(l, 7)


def test_family_coefficient_examples(Q, pair7):
    s = family_coeff(pair7, Q.unit_ideal(), 4, 10)
    assert s.coeffs[0] == PadicNumber.one(11, 10) and all(c.is_zero() for c in s.coeffs[1:])
    s = family_coeff(pair7, Q.ideal(11), 4, 10)
    assert s.coeffs[0].agrees(1, 10) and all(c.is_zero() for c in s.coeffs[1:])


def test_family_coefficient_at_p_with_nontrivial_phi1(Q, chi3, chi7):
    pair = CharacterPair(chi3, chi3 * chi7, 11)
    s = family_coeff(pair, Q.ideal(11), 3, 10)
    assert s.coeffs[0].agrees(legendre(11, 3), 10) and all(c.is_zero() for c in s.coeffs[1:])


def test_p_stabilization(Q, pair7, chi3, chi7):
    assert p_stabilize_weight1(pair7, Q.ideal(11)) == 1
    assert p_stabilize_weight1(pair7, Q.ideal(121)) == 1
    pair = CharacterPair(chi3, chi3 * chi7, 11)
    assert p_stabilize_weight1(pair, Q.ideal(11)) == legendre(11, 3)
    assert p_stabilize_weight1(pair, Q.ideal(121)) == legendre(11, 3) ** 2
    for n in (1, 2, 6, 10, 15, 20):
        assert p_stabilize_weight1(pair, Q.ideal(n)) == weight_k_coeff(pair, Q.ideal(n))


@given(st.integers(1, 3000))
def test_specialization_matches_divisor_sum(n):
    Q = create_field(1)
    pair = CharacterPair(trivial_character(Q), quadratic_character_mod(7), 11)
    s = family_coeff(pair, Q.ideal(n), 3, 10)
    want = divisor_sum_oracle(n, lambda a: 1, lambda a: legendre(a, 7), p=11)
    assert s.coeffs[0].agrees(want, 10)
    assert p_stabilize_weight1(pair, Q.ideal(n)) == want


@given(st.integers(1, 500))
def test_weight_k_matches_oracle(n):
    Q = create_field(1)
    chi3, chi7 = quadratic_character_mod(3), quadratic_character_mod(7)
    pair = CharacterPair(chi3, chi3 * chi7, 11)
    for k in (1, 2, 3):
        want = divisor_sum_oracle(n, lambda a: legendre(a, 3), lambda a: legendre(a, 3) * legendre(a, 7), k)
        assert weight_k_coeff(pair, Q.ideal(n), k) == want


@given(st.integers(1, 300), st.integers(1, 300))
def test_family_multiplicative(m, n):
    from math import gcd
    if gcd(m, n) != 1:
        return
    Q = create_field(1)
    pair = CharacterPair(trivial_character(Q), quadratic_character_mod(7), 11)
    a, b = family_coeff(pair, Q.ideal(m), 3, 10), family_coeff(pair, Q.ideal(n), 3, 10)
    ab = family_coeff(pair, Q.ideal(m * n), 3, 10)
    prod = a * b
    for x, y in zip(ab.coeffs, prod.coeffs):
        assert x.agrees(y, min(x.prec, y.prec))


@given(st.integers(1, 200))
def test_specialize_matches_weight_k_mod_p_minus_1(n):
    Q = create_field(1)
    pair = CharacterPair(trivial_character(Q), quadratic_character_mod(7), 11)
    k = 11
    want = sum(Fraction(legendre(a, 7) * a ** (k - 1)) for a in range(1, n + 1) if n % a == 0 and a % 11)
    got = specialize_family_coeff(pair, Q.ideal(n), k, 10)
    assert got.agrees(want, 10)


def test_constant_terms(Q, F5, pair7, phi5, chi3, chi7):
    pair = CharacterPair(chi3, chi3 * chi7, 11)
    assert all(all(c.is_zero() for c in s.coeffs) for s in family_constant_term(pair, 3, 10).values())
    ct = family_constant_term(pair7, 3, 10)
    z = imprimitive_zeta(pair7, 11, 3, 10).series
    assert list(ct) == [()]
    for a, b in zip(ct[()].coeffs, z.coeffs):
        assert a.agrees(b * Fraction(1, 2), a.prec)
    pair5 = CharacterPair(trivial_character(F5), phi5, 23)
    ct5 = family_constant_term(pair5, 3, 10)
    z5 = imprimitive_zeta(pair5, 23, 3, 10).series
    assert len(ct5) == 1
    for a, b in zip(next(iter(ct5.values())).coeffs, z5.coeffs):
        assert a.agrees(b * Fraction(1, 4), a.prec)


def test_pprime_constant_terms(Q, chi7, psi12):
    assert pprime_stabilized_constant_term(chi7, 11) == {(): Fraction(1, 2)}
    # psi12 is unramified, so the phi^-1(c d) L(0, phi^-1) term is present
    out = pprime_stabilized_constant_term(psi12, 5)
    L = classical_L_value(psi12, 1)
    F = psi12.F
    G = narrow_ray_class_group(F, F.unit_ideal())
    for c, rep in G.class_representatives().items():
        want = Fraction(1, 4) * (L + eval_character(psi12, rep * F.different).conjugate() * L)
        assert out[c] == want
    assert sorted(out.values(), key=str) == sorted([Cyclo.rational(0), Cyclo.rational(Fraction(1, 12))], key=str)


def test_pprime_regular_prime_factor(F5):
    # a character of conductor above 41 with phi(P) = 1, phi(P') = -1 at p = 11
    G = narrow_ray_class_group(F5, F5.ideal(41, F5.element(6, 1)))
    psi = build_character(G, [Fraction(1, 2)])
    P, Pb = F5.primes_above(11)
    assert {eval_character(psi, P), eval_character(psi, Pb)} == {Cyclo.rational(1), Cyclo.rational(-1)}
    out = pprime_stabilized_constant_term(psi, 11)
    assert list(out.values()) == [Fraction(1, 4) * 2 * classical_L_value(psi, 1)]


def test_cusp_conditions(Q, pair7, psi12):
    P7 = Q.ideal(7)
    assert cusp_constant_term_vanishes(pair7, CuspLabel(c_valuations={P7: 0}))
    assert not cusp_constant_term_vanishes(pair7, CuspLabel(c_valuations={P7: 1}))
    assert not cusp_constant_term_vanishes(pair7, CuspLabel.from_c(Q, Q.element(0), [P7]))
    with pytest.raises(IncompleteCuspData):
        cusp_constant_term_vanishes(pair7, CuspLabel())
    F = psi12.F
    assert not cusp_constant_term_vanishes(CharacterPair(trivial_character(F), psi12, 5), CuspLabel())


def test_cusp_condition_ii_and_iii(Q, chi3, chi7):
    pair = CharacterPair(chi3, chi3 * chi7, 11)
    P3, P7 = Q.ideal(3), Q.ideal(7)
    # n1 = (3), n2 = (21): 3 divides both, so condition (iii) needs val_3(c) = 1
    assert not cusp_constant_term_vanishes(pair, CuspLabel(c_valuations={P3: 1, P7: 1}))
    assert cusp_constant_term_vanishes(pair, CuspLabel(c_valuations={P3: 0, P7: 1}))
    pair2 = CharacterPair(quadratic_character_mod(5), chi7, 11)
    P5 = Q.ideal(5)
    # n1 = (5) only: condition (ii) needs val_5(c) = 0
    assert cusp_constant_term_vanishes(pair2, CuspLabel(c_valuations={P5: 1, P7: 1}))
    assert not cusp_constant_term_vanishes(pair2, CuspLabel(c_valuations={P5: 0, P7: 2}))
