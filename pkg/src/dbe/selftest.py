"""Invariant suites run by ``dbe selftest`` and by the acceptance tests."""

from __future__ import annotations

import contextlib
import itertools
import random
from typing import Callable, Dict, List, Tuple

from . import groups
from .dbe_ad import ad_decaps, ad_encaps, ad_gen_key, ad_is_valid, ad_setup
from .dbe_ss import check_pp_consistency, ss_decaps, ss_encaps, ss_gen_key, ss_is_valid, ss_setup
from .errors import DBEError
from .games import (
    gsd_fixture,
    pp_from_ul,
    run_adaptive_game,
    run_semi_static_game,
    sample_ch_sf,
    sample_ul_sf,
    sd_fixture,
    transparent_setup,
    vandermonde_bijection_check,
)
from .groups import (
    GroupParams,
    decode_g,
    decode_gt,
    element_order,
    encode_g,
    encode_gt,
    generate_params,
    has_component,
    pair,
    random_element,
    random_generator,
    random_scalar,
    subgroup_generator,
)
from .wire import decode_pp, encode_pp

Checks = List[Tuple[str, bool]]

# relations in ``relation_suite`` whose correct truth value is False
EXPECTED_FALSE = frozenset({
    "same_subgroup_pairs_to_identity", "p1p3_element_has_p2_part", "gsd_z0_has_p2",
})


@contextlib.contextmanager
def pairing_fault(nth: int = 1):
    """Corrupt the ``nth`` pairing evaluated inside the block (one-shot)."""
    count = [0]

    def hook(out):
        count[0] += 1
        if count[0] != nth:
            return out
        groups._pairing_fault = None
        bad = out * out.params.gt_generator
        groups._pairing_fault = hook
        return bad

    groups._pairing_fault = hook
    try:
        yield
    finally:
        groups._pairing_fault = None


def relation_suite(params: GroupParams, rng: random.Random, trials: int = 16) -> Dict[str, bool]:
    """Truth values of exponent-expressible relations; identical on every backend.

    Some entries are expected False (e.g. a nontrivial element paired with
    itself is not the identity); agreement on those matters as much.
    """
    g = params.generator
    N = params.N
    egg = pair(g, g)
    out: Dict[str, bool] = {}

    pairs = [(random_scalar(rng, params), random_scalar(rng, params)) for _ in range(trials)]
    out["bilinearity"] = all(pair(g ** a, g ** b) == egg ** (a * b) for a, b in pairs)
    xs = [random_element(rng, params) for _ in range(4)]
    out["symmetry"] = all(pair(x, y) == pair(y, x) for x, y in itertools.combinations(xs, 2))
    out["non_degeneracy"] = all(has_component(egg, i) for i in (1, 2, 3))
    out["egg_order_is_N"] = element_order(egg) == N
    gens = {i: random_generator(rng, params, {i}) for i in (1, 2, 3)}
    out["orthogonality"] = all(pair(gens[i], gens[j]).is_identity()
                               for i in (1, 2, 3) for j in (1, 2, 3) if i != j)
    out["same_subgroup_pairs_to_identity"] = any(pair(gens[i], gens[i]).is_identity() for i in (1, 2, 3))
    out["subgroup_orders"] = all(element_order(gens[i]) == params.primes[i - 1] for i in (1, 2, 3))
    out["subgroup_generator_orders"] = all(
        element_order(subgroup_generator(params, s)) == _prod(params.primes[i - 1] for i in s)
        for r in (1, 2, 3) for s in itertools.combinations((1, 2, 3), r))
    out["p1p3_element_has_p2_part"] = has_component(gens[1] * gens[3], 2)
    out["inverse_law"] = all((x * x.inverse()).is_identity() for x in xs)
    out["identity_pairs_to_identity"] = pair(params.g_identity, xs[0]).is_identity()
    out["encoding_round_trip"] = all(decode_g(params, encode_g(x)) == x for x in xs) and \
        decode_gt(params, encode_gt(egg)) == egg

    ts = transparent_setup(rng, params, 1, 8)
    sd0, sd1 = sd_fixture(ts, rng, 0), sd_fixture(ts, rng, 1)
    out["sd_z0_in_gp1"] = element_order(sd0.Z) == params.p1
    out["sd_z1_has_p2"] = has_component(sd1.Z, 2)
    gsd0, gsd1 = gsd_fixture(ts, rng, 0), gsd_fixture(ts, rng, 1)
    out["gsd_z0_order_p1p3"] = element_order(gsd0.Z) == params.p1 * params.p3
    out["gsd_z1_order_N"] = element_order(gsd1.Z) == N
    out["gsd_z0_has_p2"] = has_component(gsd0.Z, 2)
    return out


def _prod(it) -> int:
    r = 1
    for v in it:
        r *= v
    return r


def _ss_suite(params: GroupParams, rng: random.Random) -> Checks:
    checks: Checks = []
    for L in (1, 2, 3):
        pp = ss_setup(rng, params, L, 16)
        checks.append((f"pp consistency L={L}", check_pp_consistency(pp)))
        checks.append((f"pp round trip L={L}", decode_pp(encode_pp(pp)) == pp))
        keys = {i: ss_gen_key(rng, i, pp) for i in range(1, L + 1)}
        upks = {i: k[1] for i, k in keys.items()}
        checks.append((f"honest keys valid L={L}", all(ss_is_valid(i, upks[i], pp) for i in upks)))
        ok = True
        for r in range(1, L + 1):
            for S in itertools.combinations(range(1, L + 1), r):
                ch, ck = ss_encaps(rng, S, upks, pp)
                ok &= all(ss_decaps(S, ch, i, keys[i][0], upks, pp) == ck for i in S)
                ok &= all(ss_decaps(S, ch, i, keys[i][0], upks, pp) is None
                          for i in range(1, L + 1) if i not in S)
        checks.append((f"encaps/decaps agree L={L}", ok))
    return checks


def _ad_suite(params: GroupParams, rng: random.Random) -> Checks:
    checks: Checks = []
    for L in (1, 2):
        pp = ad_setup(rng, params, L, 16)
        kps = {i: ad_gen_key(rng, i, pp) for i in range(1, L + 1)}
        upks = {i: k.public for i, k in kps.items()}
        checks.append((f"honest pairs valid L={L}", all(ad_is_valid(i, upks[i], pp) for i in upks)))
        ok = True
        for r in range(1, L + 1):
            for S in itertools.combinations(range(1, L + 1), r):
                for bits in itertools.product((0, 1), repeat=len(S)):
                    ch, ck = ad_encaps(rng, S, upks, pp, z=dict(zip(S, bits)))
                    ok &= all(ad_decaps(S, ch, i, kps[i], upks, pp) == ck for i in S)
        checks.append((f"encaps/decaps agree L={L}", ok))
    return checks


def _sf_suite(params: GroupParams, rng: random.Random) -> Checks:
    ts = transparent_setup(rng, params, 2, 16)
    pp = ts.pp
    keys = {i: ss_gen_key(rng, i, pp) for i in (1, 2)}
    upks = {i: k[1] for i, k in keys.items()}
    ch, ck = ss_encaps(rng, {1, 2}, upks, pp)
    sf = sample_ch_sf(ts, rng, ch)
    checks = [("sf header decaps unchanged",
               all(ss_decaps({1, 2}, sf, i, keys[i][0], upks, pp) == ck for i in (1, 2)))]
    pp_sf = pp_from_ul(ts, sample_ul_sf(ts, rng))
    keys2 = {i: ss_gen_key(rng, i, pp_sf) for i in (1, 2)}
    upks2 = {i: k[1] for i, k in keys2.items()}
    ch2, ck2 = ss_encaps(rng, {1, 2}, upks2, pp_sf)
    checks.append(("sf U-list decaps unchanged",
                   all(ss_decaps({1, 2}, ch2, i, keys2[i][0], upks2, pp_sf) == ck2 for i in (1, 2))))
    checks.append(("vandermonde p=7", vandermonde_bijection_check(7, (1, 2, 3))))
    return checks


class _Guesser:
    def __init__(self, seed):
        self.rng = random.Random(seed)

    def init(self, L):
        return set(range(1, L + 1))

    def query(self, pp, oracle):
        for i in range(1, pp.users + 1):
            if oracle.transcript.game != "semi-static":
                oracle.keygen(i)

    def challenge(self):
        return {1}

    def guess(self, header, key):
        return self.rng.getrandbits(1)


def _games_suite(params: GroupParams, rng: random.Random) -> Checks:
    class Overreach(_Guesser):
        def challenge(self):
            return {1, 2}

        def init(self, L):
            return {1}

    t = run_semi_static_game(Overreach(0), params, 2, 16, rng)
    checks = [("semi-static rejects S* outside S~", not t.valid)]

    class CorruptThenChallenge(_Guesser):
        def query(self, pp, oracle):
            oracle.keygen(1)
            oracle.corrupt(1)

    t = run_adaptive_game(CorruptThenChallenge(0), params, 2, 16, rng)
    checks.append(("adaptive rejects corrupted index in S*", not t.valid))
    t = run_adaptive_game(_Guesser(0), params, 1, 16, rng)
    checks.append(("adaptive honest run completes", t.valid and t.mu_guess is not None))
    return checks


def run_selftest(seed: bytes = b"selftest", *, fault: bool = False, prime_bits: int = 12) -> Tuple[bool, str]:
    """Run every suite at toy parameters; returns (all passed, report text)."""
    backends = {b: generate_params(b, prime_bits, seed) for b in ("symbolic", "curve")}
    suites: List[Tuple[str, Callable[[random.Random], Checks]]] = []
    for name, params in backends.items():
        suites.append((f"groups/{name}", lambda rng, p=params: [
            (k, v != (k in EXPECTED_FALSE)) for k, v in relation_suite(p, rng).items()]))
    suites.append(("cross-backend", lambda rng: [(
        "identical relation verdicts",
        relation_suite(backends["symbolic"], random.Random(seed))
        == relation_suite(backends["curve"], random.Random(seed)))]))
    for name, params in backends.items():
        suites.append((f"dbe_ss/{name}", lambda rng, p=params: _ss_suite(p, rng)))
        suites.append((f"dbe_ad/{name}", lambda rng, p=params: _ad_suite(p, rng)))
        suites.append((f"games/{name}", lambda rng, p=params: _sf_suite(p, rng) + _games_suite(p, rng)))

    lines, all_ok = [], True
    ctx = pairing_fault() if fault else contextlib.nullcontext()
    with ctx:
        for name, suite in suites:
            rng = random.Random(seed + b"|" + name.encode())
            try:
                checks = suite(rng)
            except (DBEError, AssertionError) as exc:
                checks = [(f"raised {type(exc).__name__}: {exc}", False)]
            failed = [c for c, ok in checks if not ok]
            all_ok &= not failed
            if failed:
                lines.append(f"FAIL {name}: {'; '.join(failed)}")
            else:
                lines.append(f"PASS {name} ({len(checks)} checks)")
    lines.append("selftest: " + ("all suites passed" if all_ok else "FAILED"))
    return all_ok, "\n".join(lines)
