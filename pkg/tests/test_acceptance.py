"""Acceptance criteria 1 to 10, each at its stated tolerance and time limit.

Every test prints one line of the form ``criterion N: PASS|FAIL (t s / limit s) detail``.
"""

import io
import json
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from artifact import cli
from artifact.characters import CharacterPair, base_change, kronecker_character, quadratic_character_mod, trivial_character
from artifact.deformation import (build_family, eigen_consistency_check, gross_stark_check,
                                  trace_coherence_check)
from artifact.eisenstein import family_coeff, p_stabilize_weight1
from artifact.field_arith import create_field
from artifact.gross_stark import cocycle_rank_check, l_invariant, l_invariant_sum_check
from artifact.zeta import dedekind_zeta_value, fit_padic_zeta, trivial_zero_report

from test_zeta import siegel_oracle


@contextmanager
def criterion(capsys, number: int, limit: float):
    """Time the block, then print one PASS/FAIL line and enforce the runtime limit."""
    info = {"detail": ""}
    start = time.perf_counter()
    ok = False
    try:
        yield info
    except Exception as exc:
        info["detail"] += f" {type(exc).__name__}: {exc}"
        raise
    else:
        elapsed = time.perf_counter() - start
        ok = elapsed < limit
        if not ok:
            info["detail"] += f" exceeded the {limit:g} s limit"
    finally:
        elapsed = time.perf_counter() - start
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s / {limit:g} s) {info['detail']}")
    assert ok, info["detail"]


@pytest.fixture(scope="module")
def Q():
    return create_field(1)


@pytest.fixture(scope="module")
def F5():
    return create_field(5)


@pytest.fixture(scope="module")
def c3():
    return quadratic_character_mod(3)


@pytest.fixture(scope="module")
def c7():
    return quadratic_character_mod(7)


def test_criterion_01_shintani_vs_siegel(capsys):
    with criterion(capsys, 1, 1.0) as info:
        fixtures = {5: Fraction(1, 30), 8: Fraction(1, 12)}
        for D, want in fixtures.items():
            assert siegel_oracle(D) == want
            assert dedekind_zeta_value(create_field(D), 2) == want
        info["detail"] = "zeta_Q(sqrt5)(-1) = 1/30, zeta_Q(sqrt2)(-1) = 1/12"


@pytest.mark.parametrize("q,p", [(3, 5), (7, 11), (7, 23)])
def test_criterion_02_kubota_leopoldt(capsys, q, p):
    with criterion(capsys, 2, 30.0) as info:
        res = fit_padic_zeta(quadratic_character_mod(q), p, M=4, N=16, r=2)
        assert res.weights == [1 + j * (p - 1) for j in range(7)]
        loss = sum(e["digits"] for e in res.ledger.to_json()["losses"])
        assert res.output_prec == 16 - loss
        assert len(res.heldout_residual_valuations) == 2
        assert all(v >= 16 - loss for v in res.heldout_residual_valuations)
        info["detail"] = (f"chi mod {q}, p={p}: loss {loss} digits, held-out residual valuations "
                          f"{res.heldout_residual_valuations} >= N - loss = {16 - loss}")


def test_criterion_03_trivial_zero_value(capsys, Q, F5, c3, c7):
    with criterion(capsys, 3, 60.0) as info:
        one, one5 = trivial_character(Q), trivial_character(F5)
        pairs = [
            (CharacterPair(one, c3, 5), 5),
            (CharacterPair(one, c7, 11), 11),
            (CharacterPair(one5, base_change(F5, c7), 11), 11),
            (CharacterPair(c3, c3 * c7, 11), 11),          # extra tame prime (3)
        ]
        assert pairs[3][0].extra_primes() == [Q.ideal(3)]
        precs = []
        for pair, p in pairs:
            rep = trivial_zero_report(pair, p, 4, 16)
            assert rep.closed_formula_matches
            prec = min(rep.value_at_zero.prec, rep.ledger.output_prec)
            assert prec >= 1
            assert rep.value_at_zero.agrees(rep.closed_formula, prec)
            precs.append(prec)
        info["detail"] = f"4 pairs agree at ledgered precisions {precs}"


def test_criterion_04_simple_trivial_zero(capsys, c7):
    with criterion(capsys, 4, 30.0) as info:
        res = fit_padic_zeta(c7, 11, 4, 16)
        n_out = res.output_prec
        c0, c1 = res.series.coeffs[0], res.series.coeffs[1]
        assert c0.is_zero() and c0.val >= n_out
        assert c1.val == 0 and c1.is_unit()
        info["detail"] = f"v(zeta(0)) >= {n_out} = N_out, X-coefficient is a unit"


def test_criterion_05_gross_stark(capsys, c7):
    with criterion(capsys, 5, 120.0) as info:
        rows = []
        for name, chi, p in (("chi mod 7", c7, 11), ("kron(-11, .)", kronecker_character(-11), 5)):
            rep = gross_stark_check(chi, p, 6, 30)
            assert rep.difference_valuation >= 6, (name, rep.difference_valuation)
            assert not gross_stark_check(chi, p, 6, 30, sign=-1).passed
            rows.append(f"{name}/p={p}: v = {rep.difference_valuation}")
        info["detail"] = "; ".join(rows)


def test_criterion_06_family_coherence(capsys, Q, F5, c7):
    with criterion(capsys, 6, 60.0) as info:
        N = 12
        cases = [(Q, CharacterPair(trivial_character(Q), c7, 11), 11),
                 (F5, CharacterPair(trivial_character(F5), base_change(F5, c7), 23), 23)]
        checked = 0
        for F, pair, p in cases:
            for b in F.ideals_up_to(500):
                c0 = family_coeff(pair, b, 1, N).coefficient(0)
                want = p_stabilize_weight1(pair, b).to_padic(p, N)
                assert c0.agrees(want, N), b
                checked += 1
        rng = random.Random(20261016)
        pairs = 0
        while pairs < 200:
            F, pair, p = cases[pairs % 2]
            ideals = F.ideals_up_to(60)
            a, b = rng.choice(ideals), rng.choice(ideals)
            if not a.is_coprime_to(b):
                continue
            fa, fb, fab = (family_coeff(pair, x, 3, N) for x in (a, b, a * b))
            for x, y in zip(fab.coeffs, (fa * fb).coeffs):
                assert x.agrees(y, min(x.prec, y.prec))
            pairs += 1
        info["detail"] = f"{checked} ideals of norm <= 500 exact at X=0, {pairs} coprime pairs multiplicative"


def test_criterion_07_coefficient_suite(capsys, c7, F5):
    with criterion(capsys, 7, 60.0) as info:
        rows = []
        for name, phi, p in (("chi mod 7", c7, 11), ("Q(sqrt5) base change", base_change(F5, c7), 23)):
            fam = build_family(phi, p, 12)
            assert fam.case == "d_p=d"
            s, want = fam.lam + fam.mu, -1 / fam.log_u
            assert s.agrees(want, min(s.prec, want.prec))
            rep = trace_coherence_check(fam, 50)
            assert rep.ok and rep.checked >= 50
            F = fam.F
            for l in F.prime_ideals_up_to(60, coprime_to=7 * p)[:4]:
                for n in (1, 2, 3):
                    assert eigen_consistency_check(fam, l, n, symbolic=True)
            assert rep.calibration.agrees(-1, rep.precision)
            rows.append(f"{name}/p={p}: {rep.checked} primes, calibration -1 to {rep.precision} digits")
        info["detail"] = "; ".join(rows)


def test_criterion_08_l_invariant_robustness(capsys, c7, F5):
    with criterion(capsys, 8, 60.0) as info:
        for phi, p in ((c7, 11), (base_change(F5, c7), 23)):
            base = l_invariant(phi, p, 12).L
            for m in (2, 3, 5):
                other = l_invariant(phi, p, 12, power=m).L
                assert base.agrees(other, min(base.prec, other.prec)), m
            other = l_invariant(phi, p, 12, independent=True).L
            assert base.agrees(other, min(base.prec, other.prec))
        out = l_invariant_sum_check(c7, 11, 12)
        assert out["nonzero"]
        assert out["sum"].agrees(2 * out["L_phi"], out["precision"])
        info["detail"] = f"powers 2,3,5 and independent search agree; 2L != 0 at precision {out['precision']}"


def test_criterion_09_rank_checks(capsys, c7, F5):
    with criterion(capsys, 9, 60.0) as info:
        phi5 = base_change(F5, c7)
        instances = [("d=1", c7, 11, None), ("d=2 inert", phi5, 23, None)]
        instances += [(f"d=2 split, prime {i}", phi5, 11, P) for i, P in enumerate(F5.primes_above(11))]
        rows = []
        for name, phi, p, P in instances:
            reps = [cocycle_rank_check(phi, p, N, prime=P) for N in (12, 16)]
            for rep in reps:
                assert rep.observed == rep.expected == max(rep.d - rep.d_p - 1, 0)
                assert rep.ok
            assert reps[0].observed == reps[1].observed
            rows.append(f"{name}: {reps[0].observed}")
        info["detail"] = "kernel dimensions " + ", ".join(rows) + " at N = 12 and 16"


def _invoke(argv):
    out = io.StringIO()
    code = cli.run(argv, stdout=out)
    return code, out.getvalue()


def test_criterion_10_determinism_and_cache(capsys, tmp_path):
    with criterion(capsys, 10, 300.0) as info:
        commands = [
            ["zeta", "fit", "--chi", "mod7quad", "-p", "11"],
            ["zeta", "check-zero", "--phi1", "mod3quad", "--phi2", "mod3quad*mod7quad", "-p", "11"],
            ["linv", "compute", "--disc", "5", "--chi", "mod7quad", "-p", "23"],
            ["deform", "gross-stark", "--chi", "mod7quad", "-p", "11"],
        ]
        cache = ["--cache-dir", str(tmp_path / "cache")]
        for argv in commands:
            outputs = [_invoke(argv + cache), _invoke(argv + cache), _invoke(argv + ["--no-cache"])]
            assert all(code == 0 for code, _ in outputs)
            assert len({text for _, text in outputs}) == 1, argv
        start = time.perf_counter()
        code, text = _invoke(["selftest"])
        elapsed = time.perf_counter() - start
        doc = json.loads(text)
        assert code == 0 and doc["result"]["passed"]
        info["detail"] = (f"{len(commands)} commands byte-identical across runs and cache on/off; "
                          f"selftest ({len(doc['result']['checks'])} checks) in {elapsed:.2f} s")
