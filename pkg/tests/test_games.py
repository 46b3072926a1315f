import itertools
import random

import pytest
import sympy

from dbe.dbe_ad import ad_gen_key
from dbe.dbe_ss import ss_decaps, ss_encaps, ss_gen_key, ss_is_valid
from dbe.errors import NonDistinctInputs
from dbe.games import (
    gsd_fixture,
    pp_from_ul,
    reparametrized_gen_key,
    run_active_adaptive_game,
    run_adaptive_game,
    run_semi_static_game,
    sample_ch_sf,
    sample_ul_eta,
    sample_ul_sf,
    sd_fixture,
    transparent_setup,
    vandermonde_bijection_check,
    vandermonde_determinant,
    vandermonde_image_size,
    vandermonde_matrix,
)
from dbe.groups import element_order, has_component


@pytest.fixture
def ts(params):
    return transparent_setup(random.Random(1), params, 3, 16)


def world(ts, rng):
    pp = ts.pp
    keys = {i: ss_gen_key(rng, i, pp) for i in range(1, pp.L + 1)}
    return {i: k[0] for i, k in keys.items()}, {i: k[1] for i, k in keys.items()}


def test_trapdoor_reproduces_pp(ts):
    assert ts.rederive_pp() == ts.pp


# -- semi-functional headers ------------------------------------------------------------

def test_sf_header_same_session_key(ts):
    rng = random.Random(2)
    usks, upks = world(ts, rng)
    for S in [(1,), (1, 3), (1, 2, 3)]:
        ch, ck = ss_encaps(rng, S, upks, ts.pp)
        sf = sample_ch_sf(ts, rng, ch)
        assert sf != ch
        for i in S:
            assert ss_decaps(S, sf, i, usks[i], upks, ts.pp) == ck


def test_sf_header_zero_c_is_identity_map(ts):
    rng = random.Random(3)
    _, upks = world(ts, rng)
    ch, _ = ss_encaps(rng, {1}, upks, ts.pp)
    assert sample_ch_sf(ts, rng, ch, c=0) == ch


def test_sf_header_has_p2_part(ts):
    rng = random.Random(4)
    _, upks = world(ts, rng)
    ch, _ = ss_encaps(rng, {2}, upks, ts.pp)
    assert not has_component(ch.C1, 2)
    sf = sample_ch_sf(ts, rng, ch, c=1, d=1)
    assert has_component(sf.C1, 2) and has_component(sf.C2, 2)


# -- semi-functional U-lists ------------------------------------------------------------

def _same_draws(ts, seed, pp):
    rng = random.Random(seed)
    keys = {i: ss_gen_key(rng, i, pp) for i in (1, 2, 3)}
    upks = {i: k[1] for i, k in keys.items()}
    ch, ck = ss_encaps(rng, {1, 2, 3}, upks, pp)
    outs = [ss_decaps({1, 2, 3}, ch, i, keys[i][0], upks, pp) for i in (1, 2, 3)]
    return ch, ck, outs


def test_sf_ulist_leaves_decapsulation_unchanged(ts):
    pp_sf = pp_from_ul(ts, sample_ul_sf(ts, random.Random(5)))
    assert pp_sf.U != ts.pp.U
    ch_n, ck_n, outs_n = _same_draws(ts, 6, ts.pp)
    ch_s, ck_s, outs_s = _same_draws(ts, 6, pp_sf)
    assert ch_n == ch_s and ck_n == ck_s
    assert outs_n == outs_s == [ck_n] * 3


def test_sf_ulist_keys_pass_validation(ts):
    pp_sf = pp_from_ul(ts, sample_ul_sf(ts, random.Random(7)))
    rng = random.Random(8)
    for i in (1, 2, 3):
        assert ss_is_valid(i, ss_gen_key(rng, i, pp_sf)[1], pp_sf)


def test_sf_ulist_zero_deltas_is_reblinded_normal(ts):
    ul = sample_ul_sf(ts, random.Random(9), deltas=[0] * 6)
    normal = ts.normal_ul()
    for i in ul:
        assert not has_component(ul[i] * normal[i].inverse(), 1)
        assert not has_component(ul[i] * normal[i].inverse(), 2)
    pp0 = pp_from_ul(ts, ul)
    rng = random.Random(10)
    assert all(ss_is_valid(i, ss_gen_key(rng, i, pp0)[1], pp0) for i in (1, 2, 3))


def test_ulist_sf_has_p2_parts(ts):
    ul = sample_ul_sf(ts, random.Random(11), deltas=[1] * 6)
    assert all(has_component(v, 2) for v in ul.values())


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_hybrid_identity(sym20, L):
    ts = transparent_setup(random.Random(L), sym20, L, 16)
    n = 2 * L
    rng = random.Random(100 + L)
    r = [rng.randrange(sym20.N) for _ in range(n)]
    for eta in range(1, n + 1):
        a = [rng.randrange(sym20.N) for _ in range(n)]
        # congruent to alpha mod p2 but a different residue mod N
        a[eta - 1] = (ts.alpha + ts.p2 * rng.randrange(1, ts.p1 * ts.p3)) % sym20.N
        left = sample_ul_eta(ts, random.Random(eta), eta, 1, r, a)
        right = sample_ul_eta(ts, random.Random(eta), eta + 1, 0, r, a) if eta < n else None
        if right is not None:
            assert left == right
        # exponent-level statement: the G_p2 exponents agree mod p2
        for i in range(1, n + 1):
            e_left = sum(r[j] * pow(a[j], i, sym20.N) for j in range(eta - 1)) + r[eta - 1] * pow(ts.alpha, i, sym20.N)
            e_right = sum(r[j] * pow(a[j], i, sym20.N) for j in range(eta))
            assert (e_left - e_right) % ts.p2 == 0


def test_hybrid_identity_fails_without_congruence(sym20):
    ts = transparent_setup(random.Random(1), sym20, 2, 16)
    r = [1, 1, 1, 1]
    a = [(ts.alpha + 1) % sym20.N] * 4
    assert sample_ul_eta(ts, random.Random(0), 1, 1, r, a) != sample_ul_eta(ts, random.Random(0), 2, 0, r, a)


def test_first_hybrid_is_normal(sym20):
    ts = transparent_setup(random.Random(2), sym20, 2, 16)
    ul = sample_ul_eta(ts, random.Random(0), 1, 0, [5] * 4, [7] * 4)
    normal = ts.normal_ul()
    assert all(not has_component(ul[i] * normal[i].inverse(), 2) for i in ul)


def test_reparametrized_key(sym20):
    ts = transparent_setup(random.Random(3), sym20, 3, 16)
    N = sym20.N
    for i in (1, 2, 3):
        gp = random.Random(i).randrange(N)
        upk = reparametrized_gen_key(ts, random.Random(i), i, gp)
        assert ss_is_valid(i, upk, ts.pp)
        gamma = (gp - pow(ts.alpha, i, N)) % N
        assert upk.V.value == ts.pp.g.value * gamma % N


# -- Vandermonde ------------------------------------------------------------------------

def test_vandermonde_example():
    assert vandermonde_bijection_check(7, (1, 2, 3))
    # the classical product (2-1)(3-1)(3-2) = 2; rows start at power 1, adding the factor 1*2*3
    assert vandermonde_determinant((1, 2, 3), 7) == 2 * 6 % 7


def test_vandermonde_repeat():
    with pytest.raises(NonDistinctInputs):
        vandermonde_bijection_check(7, (1, 2, 1))
    with pytest.raises(NonDistinctInputs):
        vandermonde_bijection_check(5, (1, 6))


def test_vandermonde_full_image_p5():
    assert vandermonde_image_size((1, 2, 3, 4), 5) == 5 ** 4


def test_vandermonde_zero_point_singular():
    assert not vandermonde_bijection_check(5, (0, 1, 2))
    assert vandermonde_image_size((0, 1, 2), 5) == 25


@pytest.mark.parametrize("p", [5, 7, 11])
def test_determinant_matches_sympy(p):
    for n in (1, 2, 3):
        for a in itertools.permutations(range(p), n):
            M = sympy.Matrix(vandermonde_matrix(a, p).tolist())
            assert M.det() % p == vandermonde_determinant(a, p)


def test_vandermonde_rejects_composite():
    with pytest.raises(ValueError):
        vandermonde_bijection_check(9, (1, 2))


# -- subgroup-decision fixtures ---------------------------------------------------------

def test_sd_fixture_orders(ts):
    P = ts.pp.params
    rng = random.Random(12)
    z0, z1 = sd_fixture(ts, rng, 0), sd_fixture(ts, rng, 1)
    assert element_order(z0.Z) == P.p1
    assert element_order(z1.Z) % P.p2 == 0
    assert element_order(z0.g1) == P.p1 and element_order(z0.g3) == P.p3


def test_gsd_fixture_orders(ts):
    P = ts.pp.params
    rng = random.Random(13)
    z0, z1 = gsd_fixture(ts, rng, 0), gsd_fixture(ts, rng, 1)
    assert element_order(z1.Z) == P.N
    assert element_order(z0.Z) == P.p1 * P.p3
    assert element_order(z0.X1R1) == P.p1 * P.p2
    assert element_order(z0.R2Y1) == P.p2 * P.p3


def test_fixture_case_checked(ts):
    with pytest.raises(ValueError):
        sd_fixture(ts, random.Random(0), 2)


def test_fixture_orders_agree_across_backends(sym20, curve20):
    verdicts = []
    for P in (sym20, curve20):
        ts = transparent_setup(random.Random(0), P, 1, 8)
        rng = random.Random(1)
        fx = [sd_fixture(ts, rng, 0), sd_fixture(ts, rng, 1), gsd_fixture(ts, rng, 0), gsd_fixture(ts, rng, 1)]
        verdicts.append([[has_component(f.Z, i) for i in (1, 2, 3)] for f in fx])
    assert verdicts[0] == verdicts[1]


# -- game harness -------------------------------------------------------------------------

class Guesser:
    def __init__(self, seed, S_tilde=None, S_star=None):
        self.rng = random.Random(seed)
        self.S_tilde = S_tilde
        self.S_star = S_star

    def init(self, L):
        return self.S_tilde if self.S_tilde is not None else set(range(1, L + 1))

    def query(self, pp, oracle):
        if oracle.transcript.game != "semi-static":
            for i in range(1, pp.users + 1):
                oracle.keygen(i)

    def challenge(self):
        return self.S_star or {1}

    def guess(self, header, key):
        return self.rng.getrandbits(1)


class CoinReader(Guesser):
    def query(self, pp, oracle):
        super().query(pp, oracle)
        self.transcript = oracle.transcript

    def guess(self, header, key):
        return self.transcript.mu


def test_semi_static_outside_commitment(sym20):
    t = run_semi_static_game(Guesser(0, {1}, {1, 2}), sym20, 3, 16, random.Random(0))
    assert not t.valid and t.verdict == 0
    assert "outside" in t.violation


def test_semi_static_no_adaptive_queries(sym20):
    class Asker(Guesser):
        def query(self, pp, oracle):
            oracle.keygen(1)

    t = run_semi_static_game(Asker(0), sym20, 2, 16, random.Random(0))
    assert not t.valid


def test_empty_challenge_rejected(sym20):
    class Empty(Guesser):
        def challenge(self):
            return set()

    assert not run_semi_static_game(Empty(0), sym20, 2, 16, random.Random(0)).valid


def test_coin_reader_always_wins(sym20):
    for s in range(20):
        t = run_semi_static_game(CoinReader(s), sym20, 2, 16, random.Random(s))
        assert t.valid and t.verdict == 1


def test_adaptive_corrupt_then_challenge(sym20):
    class Corrupter(Guesser):
        def query(self, pp, oracle):
            oracle.keygen(1)
            secret = oracle.corrupt(1)
            assert secret.i == 1

    t = run_adaptive_game(Corrupter(0), sym20, 2, 16, random.Random(0))
    assert not t.valid and t.CQ == {1}


def test_adaptive_constraints(sym20):
    class Twice(Guesser):
        def query(self, pp, oracle):
            oracle.keygen(1)
            oracle.keygen(1)

    class Unqueried(Guesser):
        def query(self, pp, oracle):
            oracle.corrupt(2)

    class Malicious(Guesser):
        def query(self, pp, oracle):
            oracle.malicious(1, None)

    for adv in (Twice(0), Unqueried(0), Malicious(0)):
        assert not run_adaptive_game(adv, sym20, 2, 16, random.Random(0)).valid


def test_adaptive_honest_run(sym20):
    t = run_adaptive_game(Guesser(0, S_star={1, 2}), sym20, 2, 16, random.Random(0))
    assert t.valid and t.KQ == {1, 2} and t.S_star == {1, 2}
    assert t.report().splitlines()[0] == "game: adaptive"
    assert t.report().splitlines()[-1].startswith("verdict: ")


class MaliciousRegistrar(Guesser):
    def __init__(self, seed, valid_key, include_mq):
        super().__init__(seed)
        self.valid_key, self.include_mq = valid_key, include_mq

    def query(self, pp, oracle):
        oracle.keygen(1)
        kp = ad_gen_key(random.Random(5), 2, pp)
        upk = kp.public
        if not self.valid_key:
            from dbe.dbe_ad import AdPublicKey
            from dbe.dbe_ss import UserPublicKey
            e = upk.even
            upk = AdPublicKey(2, UserPublicKey(e.i, e.V * pp.g, e.Vk), upk.odd)
        oracle.malicious(2, upk)

    def challenge(self):
        return {1, 2} if self.include_mq else {1}


def test_active_malicious_invalid_key_stored_and_flagged(sym20):
    t = run_active_adaptive_game(MaliciousRegistrar(0, False, False), sym20, 2, 16, random.Random(0))
    assert t.valid and t.MQ == {2} and t.malicious_valid == {2: False}


def test_active_malicious_valid_key_flagged_valid(sym20):
    t = run_active_adaptive_game(MaliciousRegistrar(0, True, False), sym20, 2, 16, random.Random(0))
    assert t.malicious_valid == {2: True}


def test_active_mq_index_in_challenge(sym20):
    t = run_active_adaptive_game(MaliciousRegistrar(0, True, True), sym20, 2, 16, random.Random(0))
    assert not t.valid


def test_active_malicious_on_queried_index(sym20):
    class Clash(Guesser):
        def query(self, pp, oracle):
            kp = oracle.keygen(1)
            oracle.malicious(1, kp)

    assert not run_active_adaptive_game(Clash(0), sym20, 2, 16, random.Random(0)).valid


@pytest.mark.parametrize("runner", [run_semi_static_game, run_adaptive_game, run_active_adaptive_game])
def test_guessing_baseline_smoke(sym20, runner):
    wins = sum(runner(Guesser(s), sym20, 1, 16, random.Random(s)).verdict for s in range(200))
    assert 0.4 <= wins / 200 <= 0.6


def test_transcripts_deterministic(sym20):
    a = run_adaptive_game(Guesser(1), sym20, 2, 16, random.Random(7)).report()
    b = run_adaptive_game(Guesser(1), sym20, 2, 16, random.Random(7)).report()
    assert a == b
