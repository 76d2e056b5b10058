"""Command-line driver: one JSON document per invocation on standard output.

Exit codes: 0 success, 1 usage error, 2 precondition failure, 3 inconclusive
precision, 4 a selftest check failed.

Configuration is resolved per field as: command-line flag, then the TOML file
given by ``--config``, then the environment (``ARTIFACT_PRECISION`` for the
default N, ``ARTIFACT_CACHE_DIR`` for the cache), then the built-in default.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from typing import Callable, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .cache import Cache, default_cache_dir
from .characters import (CharacterPair, HeckeCharacter, base_change, build_character, dirichlet_character,
                         eval_character, irregular_primes, is_totally_odd, kronecker_character,
                         quadratic_character_mod, trivial_character)
from .errors import ArtifactError
from .field_arith import BaseField, create_field, is_prime, narrow_ray_class_group

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_PRECISION, EXIT_SELFTEST = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# JSON conversion


def jsonable(obj):
    """Convert library values to plain JSON types (exact rationals as strings)."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "to_json"):
        return jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k) if not isinstance(k, tuple) else json.dumps(list(k)): jsonable(v)
                for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if hasattr(obj, "a") and hasattr(obj, "b") and type(obj).__name__ == "DualNumber":
        return {"a": jsonable(obj.a), "eps": jsonable(obj.b)}
    return str(obj)


def dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def render_pretty(doc) -> str:
    """Aligned ``path  value`` rows for every leaf of the document."""
    rows: list[tuple[str, str]] = []

    def walk(prefix: str, x):
        if isinstance(x, dict) and x:
            for k in sorted(x):
                walk(f"{prefix}.{k}" if prefix else str(k), x[k])
        elif isinstance(x, list) and x and any(isinstance(v, (dict, list)) for v in x):
            for i, v in enumerate(x):
                walk(f"{prefix}[{i}]", v)
        else:
            rows.append((prefix, json.dumps(x, sort_keys=True)))

    walk("", doc)
    width = max((len(k) for k, _ in rows), default=0)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


# ---------------------------------------------------------------------------
# character specs


def _values(text: str) -> list[Fraction]:
    if not text:
        return []
    try:
        return [Fraction(v) for v in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad generator values {text!r}") from exc


def parse_ideal(F: BaseField, text: str):
    try:
        parts = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad ideal {text!r}") from exc
    if len(parts) == 1:
        if parts[0] <= 0:
            raise UsageError("ideal generator must be positive")
        return F.ideal(parts[0])
    if len(parts) == 3 and F.degree == 2:
        a, b, c = parts
        return F.ideal(a, F.element(b, c))
    raise UsageError(f"ideal {text!r}: give 'a' or 'a,b,c' for the ideal (a, b + c*w)")


def _atom(F: BaseField, text: str) -> HeckeCharacter:
    if text in ("1", "trivial"):
        return trivial_character(F)
    m = re.fullmatch(r"mod(\d+)quad", text)
    if m:
        q = int(m.group(1))
        if q % 2 == 0 or not is_prime(q):
            raise UsageError("modNquad needs an odd prime N")
        return _lift(F, quadratic_character_mod(q))
    m = re.fullmatch(r"kron(-?\d+)", text)
    if m:
        return _lift(F, kronecker_character(int(m.group(1))))
    m = re.fullmatch(r"dirichlet:(\d+):([-\d/,]*)", text)
    if m:
        return _lift(F, dirichlet_character(int(m.group(1)), _values(m.group(2))))
    m = re.fullmatch(r"ray:([\d,]+):([-\d/,]*)", text)
    if m:
        G = narrow_ray_class_group(F, parse_ideal(F, m.group(1)))
        vals = _values(m.group(2))
        if len(vals) != len(G.invariants):
            raise UsageError(f"group has {len(G.invariants)} generators, got {len(vals)} values")
        return build_character(G, vals, name=text)
    raise UsageError(f"unrecognized character spec {text!r}")


def _lift(F: BaseField, chi: HeckeCharacter) -> HeckeCharacter:
    return chi if F.degree == 1 else base_change(F, chi)


def parse_character(F: BaseField, spec: str) -> HeckeCharacter:
    """Character from a spec such as ``mod7quad``, ``kron-11``, ``mod3quad*mod7quad``,
    ``dirichlet:7:1/3`` or ``ray:41,6,1:1/2``; characters over Q are base changed to F."""
    chi = None
    for part in spec.split("*"):
        c = _atom(F, part.strip())
        chi = c if chi is None else chi * c
    return chi


# ---------------------------------------------------------------------------
# configuration

DEFAULTS = {"disc": 1, "chi": None, "phi1": None, "phi2": None, "p": None, "u": None, "M": 4,
            "N": 16, "r": 2, "bound": None, "prime": 0, "modulus": "1", "weight": None, "power": 1,
            "flip": False, "independent": False, "search_bound": None, "sign": 1, "limit": 200,
            "cache_dir": None, "no_cache": False}

CACHE_ONLY = {"cache_dir", "no_cache"}

# per-command values that replace DEFAULTS when neither flag nor config sets them
COMMAND_DEFAULTS = {
    ("eis", "coeffs"): {"bound": 20},
    ("chars", "show"): {"bound": 30},
    ("linv", "compute"): {"N": 12},
    ("linv", "sum-check"): {"N": 12},
    ("linv", "rank-check"): {"N": 12},
    ("deform", "coeffs"): {"N": 12, "bound": 30},
    ("deform", "gross-stark"): {"M": 6, "N": 30},
    ("deform", "combo-check"): {"N": 12, "bound": 100},
}


def _env_defaults() -> dict:
    out = {}
    env = os.environ.get("ARTIFACT_PRECISION")
    if env:
        try:
            out["N"] = int(env)
        except ValueError as exc:
            raise UsageError(f"ARTIFACT_PRECISION must be an integer, got {env!r}") from exc
    return out


def resolve_config(args: argparse.Namespace) -> dict:
    cmd = (args.group, getattr(args, "action", None))
    cfg = dict(DEFAULTS)
    cfg.update(COMMAND_DEFAULTS.get(cmd, {}))
    cfg.update(_env_defaults())
    if args.config:
        try:
            with open(args.config, "rb") as fh:
                toml = tomllib.load(fh)
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(toml) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg.update(toml)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            cfg[key] = val
    return cfg


def _need(cfg: dict, *keys: str) -> None:
    for k in keys:
        if cfg.get(k) is None:
            raise UsageError(f"--{k.replace('_', '-')} is required")


def _field(cfg) -> BaseField:
    return create_field(int(cfg["disc"]))


def _chi(cfg, F) -> HeckeCharacter:
    _need(cfg, "chi")
    return parse_character(F, cfg["chi"])


def _pair(cfg, F) -> CharacterPair:
    _need(cfg, "p")
    if cfg.get("phi2") is None and cfg.get("chi") is None:
        raise UsageError("give --chi or --phi2")
    phi1 = parse_character(F, cfg["phi1"]) if cfg.get("phi1") else trivial_character(F)
    phi2 = parse_character(F, cfg["phi2"] or cfg["chi"])
    return CharacterPair(phi1, phi2, int(cfg["p"]))


def _prime(cfg, F):
    primes = F.primes_above(int(cfg["p"]))
    k = int(cfg["prime"])
    if not 0 <= k < len(primes):
        raise UsageError(f"--prime must be below {len(primes)}")
    return primes[k]


# ---------------------------------------------------------------------------
# commands


def cmd_field_info(cfg):
    F = _field(cfg)
    U = F.units
    out = {"disc": F.disc, "degree": F.degree, "kind": F.kind, "omega_min_poly": F.min_poly_omega(),
           "fundamental_unit": U.eps0, "totally_positive_unit": U.eps_plus, "torsion": U.torsion,
           "narrow_class_group": narrow_ray_class_group(F, F.unit_ideal())}
    if cfg.get("p") is not None:
        p = int(cfg["p"])
        out["primes_above_p"] = {"p": p, "splitting": F.splitting_type(p), "primes": F.primes_above(p)}
    return out


def _exponent_vectors(invariants):
    vecs = [[]]
    for n in invariants:
        vecs = [v + [Fraction(j, n)] for v in vecs for j in range(n)]
    return vecs


def cmd_chars_list(cfg):
    F = _field(cfg)
    modulus = parse_ideal(F, str(cfg["modulus"]))
    G = narrow_ray_class_group(F, modulus)
    chars = []
    for vals in _exponent_vectors(G.invariants)[: int(cfg["limit"])]:
        chi = build_character(G, vals)
        spec = f"ray:{modulus.a},{modulus.b},{modulus.c}:" if F.degree == 2 else f"ray:{modulus.a}:"
        chars.append({"spec": spec + ",".join(str(v) for v in vals), "id": chi.canonical_id,
                      "order": chi.order, "conductor": chi.conductor, "totally_odd": is_totally_odd(chi)})
    return {"group": G, "characters": chars, "truncated": len(chars) < G.order}


def cmd_chars_show(cfg):
    F = _field(cfg)
    chi = _chi(cfg, F)
    out = {"character": chi, "id": chi.canonical_id,
           "values": [{"prime": P, "value": eval_character(chi, P)}
                      for P in F.prime_ideals_up_to(int(cfg["bound"]))]}
    if cfg.get("p") is not None:
        out["irregular_primes"] = irregular_primes(chi.primitive(), int(cfg["p"]))
    return out


def cmd_eis_coeffs(cfg):
    from .eisenstein import family_coeff, specialize_family_coeff, weight_k_coeff

    F = _field(cfg)
    pair = _pair(cfg, F)
    rows = []
    for b in F.ideals_up_to(int(cfg["bound"])):
        row = {"norm": b.norm, "hnf": [b.a, b.b, b.c]}
        if cfg.get("weight") is not None:
            k = int(cfg["weight"])
            row["weight"] = k
            row["exact"] = weight_k_coeff(pair, b, k)
            row["family_specialization"] = specialize_family_coeff(pair, b, k, int(cfg["N"]))
        else:
            row["series"] = family_coeff(pair, b, int(cfg["M"]), int(cfg["N"]), cfg.get("u"))
        rows.append(row)
    return {"pair": pair, "coefficients": rows}


def cmd_eis_constant(cfg):
    from .eisenstein import family_constant_term, pprime_stabilized_constant_term

    F = _field(cfg)
    pair = _pair(cfg, F)
    out = {"pair": pair,
           "family_constant_term": family_constant_term(pair, int(cfg["M"]), int(cfg["N"]), cfg.get("u"))}
    if pair.phi1.is_trivial():
        out["p_prime_stabilized"] = pprime_stabilized_constant_term(pair.phi, pair.p)
    return out


def cmd_zeta_fit(cfg):
    from .zeta import fit_padic_zeta

    F = _field(cfg)
    chi = _chi(cfg, F)
    _need(cfg, "p")
    res = fit_padic_zeta(chi, int(cfg["p"]), int(cfg["M"]), int(cfg["N"]), int(cfg["r"]), cfg.get("u"))
    return {"character": chi, "fit": res, "iota_p": "least primitive root convention"}


def cmd_zeta_check_zero(cfg):
    from .zeta import trivial_zero_report

    F = _field(cfg)
    pair = _pair(cfg, F)
    return {"pair": pair, "report": trivial_zero_report(pair, pair.p, int(cfg["M"]), int(cfg["N"]))}


def cmd_linv_compute(cfg):
    from .gross_stark import l_invariant

    F = _field(cfg)
    chi = _chi(cfg, F)
    _need(cfg, "p")
    return l_invariant(chi, int(cfg["p"]), int(cfg["N"]), prime=_prime(cfg, F), power=int(cfg["power"]),
                       flip=bool(cfg["flip"]), bound=cfg.get("search_bound"),
                       independent=bool(cfg["independent"]))


def cmd_linv_sum_check(cfg):
    from .gross_stark import l_invariant_sum_check

    F = _field(cfg)
    chi = _chi(cfg, F)
    _need(cfg, "p")
    return l_invariant_sum_check(chi, int(cfg["p"]), int(cfg["N"]))


def cmd_linv_rank_check(cfg):
    from .gross_stark import cocycle_rank_check

    F = _field(cfg)
    chi = _chi(cfg, F)
    _need(cfg, "p")
    return cocycle_rank_check(chi, int(cfg["p"]), int(cfg["N"]), prime=_prime(cfg, F))


def cmd_deform_coeffs(cfg):
    from .deformation import build_family, derivative_coeff

    F = _field(cfg)
    chi = _chi(cfg, F)
    _need(cfg, "p")
    fam = build_family(chi, int(cfg["p"]), int(cfg["N"]), cfg.get("u"))
    rows = []
    for b in F.ideals_up_to(int(cfg["bound"])):
        if not b.is_coprime_to(fam.phi.conductor):
            continue
        row = {"norm": b.norm, "hnf": [b.a, b.b, b.c]}
        try:
            row["coeff_mod_X2"] = fam.coeff(b)
        except ArtifactError as exc:
            row["unavailable"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    derivs = []
    for P in F.prime_ideals_up_to(int(cfg["bound"])):
        if P.is_coprime_to(fam.phi.conductor):
            try:
                derivs.append({"prime": P, "derivative": derivative_coeff(fam, P)})
            except ArtifactError as exc:
                derivs.append({"prime": P, "unavailable": f"{type(exc).__name__}: {exc}"})
    return {"family": fam, "coefficients": rows, "prime_derivatives": derivs}


def cmd_deform_gross_stark(cfg):
    from .deformation import gross_stark_check

    F = _field(cfg)
    chi = _chi(cfg, F)
    _need(cfg, "p")
    return gross_stark_check(chi, int(cfg["p"]), int(cfg["M"]), int(cfg["N"]), cfg.get("u"), int(cfg["sign"]))


def cmd_deform_combo_check(cfg):
    from .deformation import eisenstein_combination_check

    F = _field(cfg)
    chi = _chi(cfg, F)
    _need(cfg, "p")
    return eisenstein_combination_check(chi, int(cfg["p"]), int(cfg["bound"]), int(cfg["N"]), cfg.get("u"))


# ---------------------------------------------------------------------------
# selftest


def _raises(exc_type, func) -> bool:
    try:
        func()
    except exc_type:
        return True
    return False


def _selftest_checks() -> list[tuple[str, Callable[[], bool]]]:
    """The quick examples of every module: trivial values, error paths and symmetries."""
    from .deformation import build_family, derivative_coeff, gross_stark_check
    from .eisenstein import (CuspLabel, cusp_constant_term_vanishes, family_coeff, family_constant_term,
                             p_stabilize_weight1, weight_k_coeff)
    from .errors import InconclusivePrecision, NotApplicable, NotSplit
    from .field_arith import divisors, embed_padic, factor_ideal
    from .gross_stark import cocycle_rank_check, l_invariant, l_invariant_sum_check, splitting_field
    from .padic_arith import PadicNumber, as_padic, fit_series, padic_log, teichmuller, weight_point
    from .zeta import fit_padic_zeta, imprimitive_zeta, interp_point

    Q = create_field(1)
    c3 = quadratic_character_mod(3)
    c7 = quadratic_character_mod(7)
    one = trivial_character(Q)

    def pair7():
        return CharacterPair(one, c7, 11)

    def shadow():
        # classical recursion at eps = 0: C(l^2) = C(l)^2 - phi(l)
        pr = pair7()
        for l in (2, 3, 5):
            c1 = weight_k_coeff(pr, Q.ideal(l))
            c2 = weight_k_coeff(pr, Q.ideal(l * l))
            if c2 != c1 * c1 - eval_character(c7, Q.ideal(l)):
                return False
        return True

    def fit_const():
        c = as_padic(3, 5, 8)
        s, led = fit_series([(as_padic(0, 5, 8), c)], 0)
        return s.coeffs[0] == c and led.output_prec == 8

    def fit_line():
        z, p5 = as_padic(0, 5, 8), as_padic(5, 5, 8)
        s, led = fit_series([(z, z), (p5, p5)], 1)
        return s.coeffs[0].is_zero() and s.coeffs[1].agrees(1, led.output_prec) and led.output_prec == 7

    def imprimitive_equals_primitive():
        base = fit_padic_zeta(c7, 11, 4, 16)
        return imprimitive_zeta(pair7(), 11, 4, 16, base=base).series.coeffs == base.series.coeffs

    def power_invariance():
        a, b = l_invariant(c7, 11, 12).L, l_invariant(c7, 11, 12, power=3).L
        return a.agrees(b, min(a.prec, b.prec))

    def sum_is_twice():
        out = l_invariant_sum_check(c7, 11, 12)
        return out["sum"].agrees(2 * out["L_phi"], out["precision"]) and out["nonzero"]

    def quadratic_lambda_mu():
        fam = build_family(c7, 11, 12)
        half = -1 / (2 * fam.log_u)
        U = derivative_coeff(fam, Q.ideal(11))
        Uw = fam.L / (2 * fam.log_u)
        T = derivative_coeff(fam, Q.ideal(2))
        Tw = fam.log_norm(Q.ideal(2)) / fam.log_u
        return (fam.lam.agrees(half, fam.lam.prec) and fam.mu.agrees(half, fam.mu.prec)
                and U.agrees(Uw, min(U.prec, Uw.prec)) and T.agrees(Tw, min(T.prec, Tw.prec)))

    def zero_constant_term():
        pair = CharacterPair(c3, c3 * c7, 11)
        return all(c.is_zero() for s in family_constant_term(pair, 2, 8).values() for c in s.coeffs)

    def unramified_cusp():
        F = create_field(12)
        G = narrow_ray_class_group(F, F.unit_ideal())
        psi = build_character(G, [Fraction(1, 2)])
        return not cusp_constant_term_vanishes(CharacterPair(trivial_character(F), psi, 5), CuspLabel())

    F1 = Q
    return [
        ("rationals: degree 1, different (1)", lambda: F1.degree == 1 and F1.different == F1.unit_ideal()),
        ("factor (12) over Q", lambda: [(P.norm, e) for P, e in factor_ideal(Q, Q.ideal(12))] == [(2, 2), (3, 1)]),
        ("divisors of (1)", lambda: divisors(Q, Q.unit_ideal()) == [Q.unit_ideal()]),
        ("divisors of (4) over Q", lambda: sorted(d.norm for d in divisors(Q, Q.ideal(4))) == [1, 2, 4]),
        ("ray class group mod (7) over Q has order 6", lambda: narrow_ray_class_group(Q, Q.ideal(7)).order == 6),
        ("ray class group of modulus (1) over Q is trivial",
         lambda: narrow_ray_class_group(Q, Q.unit_ideal()).order == 1),
        ("embed 7 at p=5, N=4", lambda: embed_padic(Q, Q.element(7), 5, 4) == as_padic(7, 5, 4)),
        ("log_p(1) = 0", lambda: padic_log(as_padic(1, 5, 8)).is_zero()),
        ("log_p(p) = 0", lambda: padic_log(as_padic(5, 5, 8)).is_zero()),
        ("teichmuller(1 + p) = 1", lambda: teichmuller(as_padic(6, 5, 8)) == as_padic(1, 5, 8)),
        ("teichmuller(-1) = -1", lambda: teichmuller(as_padic(-1, 5, 8)) == as_padic(-1, 5, 8)),
        ("weight point k=1 is 0", lambda: weight_point(5, 6, 1, 8).is_zero()),
        ("weight point u=1+p, k=2 is p", lambda: weight_point(5, 6, 2, 8) == as_padic(5, 5, 8)),
        ("fit through one point with M = 0", fit_const),
        ("fit through (0,0), (p,p) records one lost digit", fit_line),
        ("trivial character has conductor (1)", lambda: one.conductor == Q.unit_ideal()),
        ("trivial character is 1 on ideals", lambda: all(eval_character(one, Q.ideal(n)) == 1
                                                         for n in (1, 2, 3, 10))),
        ("character vanishes on ideals sharing its conductor", lambda: eval_character(c7, Q.ideal(7)) == 0),
        ("trivial character is not totally odd", lambda: not is_totally_odd(one)),
        ("trivial character: every prime above p is irregular",
         lambda: irregular_primes(one, 11) == Q.primes_above(11)),
        ("interpolation value at k=1 vanishes for an irregular prime", lambda: interp_point(c7, 11, 1).is_zero()),
        ("imprimitive series with no extra primes is the primitive one", imprimitive_equals_primitive),
        ("weight-one coefficient of (1) is 1", lambda: weight_k_coeff(pair7(), Q.unit_ideal()) == 1),
        ("weight-one coefficient at a prime is phi1 + phi2",
         lambda: weight_k_coeff(pair7(), Q.ideal(3)) == 1 + eval_character(c7, Q.ideal(3))),
        ("p-stabilized coefficient of (1) is 1", lambda: p_stabilize_weight1(pair7(), Q.unit_ideal()) == 1),
        ("p-stabilization leaves ideals prime to p alone",
         lambda: all(p_stabilize_weight1(pair7(), Q.ideal(n)) == weight_k_coeff(pair7(), Q.ideal(n))
                     for n in (2, 4, 6, 9, 10))),
        ("family coefficient of (1) is constant 1",
         lambda: [c == PadicNumber.one(11, 8) if i == 0 else c.is_zero()
                  for i, c in enumerate(family_coeff(pair7(), Q.unit_ideal(), 4, 8).coeffs)] == [True] * 5),
        ("constant term vanishes when phi1 is ramified", zero_constant_term),
        ("modulus (1): cusp conditions never force vanishing", unramified_cusp),
        ("splitting field needs an irregular prime", lambda: _raises(NotSplit, lambda: splitting_field(c3, 5))),
        ("L-invariant unchanged by u0 -> u0^3", power_invariance),
        ("quadratic phi: L(phi) + L(phi^-1) = 2 L(phi)", sum_is_twice),
        ("starved precision gives InconclusivePrecision",
         lambda: _raises(InconclusivePrecision, lambda: l_invariant_sum_check(c7, 11, 1))),
        ("rank check over Q: kernel dimension 0", lambda: cocycle_rank_check(c7, 11, 12).observed == 0),
        ("quadratic phi: lambda = mu, table entries collapse", quadratic_lambda_mu),
        ("eps = 0 shadow satisfies the classical recursion", shadow),
        ("Gross-Stark check skipped without a trivial zero",
         lambda: _raises(NotApplicable, lambda: gross_stark_check(c3, 5))),
        ("Gross-Stark negative control fails", lambda: not gross_stark_check(c7, 11, 6, 30, sign=-1).passed),
    ]


def cmd_selftest(cfg):
    results = []
    for name, check in _selftest_checks():
        try:
            ok = bool(check())
            err = None
        except Exception as exc:  # a crashing check is a failed check
            ok, err = False, f"{type(exc).__name__}: {exc}"
        row = {"name": name, "passed": ok}
        if err:
            row["error"] = err
        results.append(row)
    return {"checks": results, "passed": all(r["passed"] for r in results)}


COMMANDS: dict[tuple[str, Optional[str]], Callable[[dict], object]] = {
    ("field", "info"): cmd_field_info,
    ("chars", "list"): cmd_chars_list,
    ("chars", "show"): cmd_chars_show,
    ("eis", "coeffs"): cmd_eis_coeffs,
    ("eis", "constant"): cmd_eis_constant,
    ("zeta", "fit"): cmd_zeta_fit,
    ("zeta", "check-zero"): cmd_zeta_check_zero,
    ("linv", "compute"): cmd_linv_compute,
    ("linv", "sum-check"): cmd_linv_sum_check,
    ("linv", "rank-check"): cmd_linv_rank_check,
    ("deform", "coeffs"): cmd_deform_coeffs,
    ("deform", "gross-stark"): cmd_deform_gross_stark,
    ("deform", "combo-check"): cmd_deform_combo_check,
    ("selftest", None): cmd_selftest,
}


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML file with configuration keys; flags win")
    p.add_argument("--pretty", action="store_true", help="render the JSON document as a table")
    p.add_argument("--no-cache", dest="no_cache", action="store_true", help="bypass the result cache")
    p.add_argument("--cache-dir", dest="cache_dir", help="cache directory (env ARTIFACT_CACHE_DIR)")


def _math(p: argparse.ArgumentParser, *opts: str) -> None:
    spec = {
        "disc": (["--disc"], dict(type=int, help="field discriminant, 1 for Q")),
        "chi": (["--chi"], dict(help="character spec, e.g. mod7quad, kron-11, ray:41,6,1:1/2")),
        "phi1": (["--phi1"], dict(help="first character of the pair (default trivial)")),
        "phi2": (["--phi2"], dict(help="second character of the pair (default --chi)")),
        "p": (["-p"], dict(type=int, help="odd prime")),
        "u": (["-u"], dict(type=int, help="topological generator of 1+pZ_p (default 1+p)")),
        "M": (["-M"], dict(type=int, help="series truncation degree")),
        "N": (["-N"], dict(type=int, help="working precision in p-adic digits (env ARTIFACT_PRECISION)")),
        "r": (["-r"], dict(type=int, help="number of held-out weights")),
        "bound": (["--bound"], dict(type=int, help="norm bound")),
        "prime": (["--prime"], dict(type=int, help="index of the prime above p used for iota_p")),
        "modulus": (["--modulus"], dict(help="modulus ideal as 'a' or 'a,b,c'")),
        "weight": (["--weight"], dict(type=int, help="specialize to weight k")),
        "power": (["--power"], dict(type=int, help="replace u0 by u0^m")),
        "flip": (["--flip"], dict(action="store_true", default=None, help="use the other sign of u0")),
        "independent": (["--independent"], dict(action="store_true", default=None,
                                                help="use an independent p-unit search")),
        "search_bound": (["--search-bound"], dict(type=int, dest="search_bound",
                                                  help="bound for the p-unit search")),
        "sign": (["--sign"], dict(type=int, choices=[1, -1], help="-1 runs the negative control")),
        "limit": (["--limit"], dict(type=int, help="maximum number of characters listed")),
    }
    for o in opts:
        flags, kw = spec[o]
        p.add_argument(*flags, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="artifact", description="Eisenstein families, p-adic L-functions and L-invariants.")
    parser.add_argument("--version", action="version", version=__version__)
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    layout = {
        "field": {"info": ("disc", "p")},
        "chars": {"list": ("disc", "modulus", "limit"), "show": ("disc", "chi", "p", "bound")},
        "eis": {"coeffs": ("disc", "chi", "phi1", "phi2", "p", "u", "M", "N", "bound", "weight"),
                "constant": ("disc", "chi", "phi1", "phi2", "p", "u", "M", "N")},
        "zeta": {"fit": ("disc", "chi", "p", "u", "M", "N", "r"),
                 "check-zero": ("disc", "chi", "phi1", "phi2", "p", "M", "N")},
        "linv": {"compute": ("disc", "chi", "p", "N", "prime", "power", "flip", "independent", "search_bound"),
                 "sum-check": ("disc", "chi", "p", "N"),
                 "rank-check": ("disc", "chi", "p", "N", "prime")},
        "deform": {"coeffs": ("disc", "chi", "p", "u", "N", "bound"),
                   "gross-stark": ("disc", "chi", "p", "u", "M", "N", "sign"),
                   "combo-check": ("disc", "chi", "p", "u", "N", "bound")},
    }
    for group, actions in layout.items():
        gp = groups.add_parser(group)
        sub = gp.add_subparsers(dest="action", required=True, parser_class=_Parser)
        for action, opts in actions.items():
            ap = sub.add_parser(action)
            _common(ap)
            _math(ap, *opts)
    st = groups.add_parser("selftest")
    _common(st)
    return parser


def run(argv: Optional[list[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except UsageError as exc:
        print(f"artifact: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    command = " ".join(x for x in (args.group, getattr(args, "action", None)) if x)
    func = COMMANDS[(args.group, getattr(args, "action", None))]
    echo = {k: v for k, v in sorted(cfg.items()) if k not in CACHE_ONLY}
    cache = Cache(cfg["cache_dir"] or default_cache_dir(), enabled=not cfg["no_cache"] and args.group != "selftest")
    doc = {"command": command, "config": echo, "version": __version__}
    code = EXIT_OK
    try:
        doc["result"] = cache.get_or_compute({"command": command, "config": echo}, lambda: jsonable(func(cfg)))
        if args.group == "selftest" and not doc["result"]["passed"]:
            code = EXIT_SELFTEST
    except UsageError as exc:
        print(f"artifact: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArtifactError as exc:
        doc["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = exc.exit_code
    stdout.write(render_pretty(doc) if args.pretty else dump(doc))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
