import itertools
import random

import pytest

from dbe.dbe_ss import (
    UserPublicKey,
    _build,
    check_pp_consistency,
    count_elements,
    normalize_set,
    ss_decaps,
    ss_encaps,
    ss_gen_key,
    ss_is_valid,
    ss_setup,
    ss_sizes,
)
from dbe.errors import EmptySet, IndexOutOfRange, InvalidKey, MalformedKey, MissingKey
from dbe.groups import random_generator
from dbe.hashing import hash_gt


def keys_for(rng, pp, idx=None):
    idx = idx or range(1, pp.L + 1)
    keys = {i: ss_gen_key(rng, i, pp) for i in idx}
    return {i: k[0] for i, k in keys.items()}, {i: k[1] for i, k in keys.items()}


def test_pp_shape_L4(sym20):
    pp = ss_setup(random.Random(0), sym20, 4, 16)
    assert len(pp.A) == 4
    assert sorted(pp.U) == [1, 2, 3, 4, 6, 7, 8]
    # g, Y, four A, seven U, plus Omega
    assert count_elements(pp) == (13, 1)


def test_pp_shape_L1(sym20):
    pp = ss_setup(random.Random(0), sym20, 1, 16)
    assert sorted(pp.U) == [1]
    assert len(pp.A) == 1


def test_pp_consistency_L3(params):
    pp = ss_setup(random.Random(1), params, 3, 16)
    assert check_pp_consistency(pp)


def test_pp_consistency_detects_broken_chain(sym20):
    pp = ss_setup(random.Random(1), sym20, 3, 16)
    U = dict(pp.U)
    U[2] = U[2] * sym20.generator
    bad = type(pp)(pp.params, pp.L, pp.g, pp.Y, pp.A, U, pp.Omega, pp.hk)
    assert not check_pp_consistency(bad)


def test_pp_matches_exponent_oracle(sym20):
    # recompute every PP element from the trapdoor with plain modular arithmetic
    pp, trap = _build(random.Random(2), sym20, 3, 16)
    N, a, g = sym20.N, trap["alpha"], pp.g.value
    assert [x.value for x in pp.A] == [g * pow(a, k, N) % N for k in (1, 2, 3)]
    u = trap["u"].value
    for k, Uk in pp.U.items():
        assert Uk.value == (u * pow(a, k, N) + trap["Y"][k].value) % N
    assert pp.Omega.value == g * trap["U_full"][4].value % N


def test_gen_key_exponent_oracle(sym20):
    rng = random.Random(3)
    pp = ss_setup(rng, sym20, 2, 16)
    gamma = random.Random()
    gamma.setstate(rng.getstate())
    gamma = gamma.randrange(sym20.N)
    usk, upk = ss_gen_key(rng, 1, pp)
    assert upk.V.value == pp.g.value * gamma % sym20.N
    assert set(upk.Vk) == {1}


def test_gen_key_index_range(sym20):
    pp = ss_setup(random.Random(0), sym20, 3, 16)
    with pytest.raises(IndexOutOfRange):
        ss_gen_key(random.Random(0), 4, pp)
    with pytest.raises(IndexOutOfRange):
        ss_gen_key(random.Random(0), 0, pp)


@pytest.mark.parametrize("L", [1, 2, 3, 4, 5, 6, 7, 8])
def test_honest_keys_valid(sym20, L):
    rng = random.Random(L)
    pp = ss_setup(rng, sym20, L, 16)
    _, upks = keys_for(rng, pp)
    assert all(ss_is_valid(j, upks[j], pp) for j in upks)


def _tamper(upk, k, factor):
    if k == 0:
        return UserPublicKey(upk.i, upk.V * factor, upk.Vk)
    Vk = dict(upk.Vk)
    Vk[k] *= factor
    return UserPublicKey(upk.i, upk.V, Vk)


def test_tamper_by_g_rejected(params):
    rng = random.Random(4)
    pp = ss_setup(rng, params, 3, 16)
    _, upks = keys_for(rng, pp)
    for j, upk in upks.items():
        for k in [0] + sorted(upk.Vk):
            assert not ss_is_valid(j, _tamper(upk, k, params.generator), pp)


def test_p3_reblinding_accepted(params):
    rng = random.Random(5)
    pp = ss_setup(rng, params, 3, 16)
    _, upks = keys_for(rng, pp)
    for j, upk in upks.items():
        for k in sorted(upk.Vk):
            assert ss_is_valid(j, _tamper(upk, k, random_generator(rng, params, {3})), pp)


def test_p3_factor_on_V_detected(params):
    # V is paired with U_L, whose G_p3 blinding does not annihilate a G_p3 factor
    rng = random.Random(15)
    pp = ss_setup(rng, params, 3, 16)
    _, upks = keys_for(rng, pp)
    assert not ss_is_valid(1, _tamper(upks[1], 0, random_generator(rng, params, {3})), pp)


def test_pure_p2_tamper_invisible(params):
    # the checks pair against G_p1 elements only, so a G_p2 factor is annihilated too
    rng = random.Random(6)
    pp = ss_setup(rng, params, 3, 16)
    _, upks = keys_for(rng, pp)
    k = sorted(upks[1].Vk)[0]
    assert ss_is_valid(1, _tamper(upks[1], k, random_generator(rng, params, {2})), pp)


def test_malformed_shape(sym20):
    rng = random.Random(0)
    pp = ss_setup(rng, sym20, 3, 16)
    _, upks = keys_for(rng, pp)
    upk = upks[1]
    with pytest.raises(MalformedKey):
        ss_is_valid(2, upk, pp)
    missing = UserPublicKey(1, upk.V, {k: v for k, v in upk.Vk.items() if k != 1})
    with pytest.raises(MalformedKey):
        ss_is_valid(1, missing, pp)
    extra = UserPublicKey(1, upk.V, {**upk.Vk, 3: upk.V})
    with pytest.raises(MalformedKey):
        ss_is_valid(1, extra, pp)


@pytest.mark.parametrize("L", [1, 2, 3])
def test_correctness_exhaustive(params, L):
    rng = random.Random(L)
    pp = ss_setup(rng, params, L, 16)
    usks, upks = keys_for(rng, pp)
    for r in range(1, L + 1):
        for S in itertools.combinations(range(1, L + 1), r):
            ch, ck = ss_encaps(rng, S, upks, pp)
            for i in S:
                assert ss_decaps(S, ch, i, usks[i], upks, pp) == ck


@pytest.mark.parametrize("L", [8, 16])
def test_correctness_randomized_large(sym20, L):
    rng = random.Random(L)
    pp = ss_setup(rng, sym20, L, 16)
    usks, upks = keys_for(rng, pp)
    for _ in range(5):
        S = rng.sample(range(1, L + 1), rng.randint(1, L))
        ch, ck = ss_encaps(rng, S, upks, pp)
        assert all(ss_decaps(S, ch, i, usks[i], upks, pp) == ck for i in S)


def test_non_member_gets_bottom(params):
    rng = random.Random(7)
    pp = ss_setup(rng, params, 3, 16)
    usks, upks = keys_for(rng, pp)
    ch, _ = ss_encaps(rng, {1, 3}, upks, pp)
    assert ss_decaps({1, 3}, ch, 2, usks[2], upks, pp) is None


def test_wrong_secret_key_mismatch(sym20):
    rng = random.Random(8)
    pp = ss_setup(rng, sym20, 3, 32)
    usks, upks = keys_for(rng, pp)
    mismatches = 0
    for _ in range(50):
        ch, ck = ss_encaps(rng, {1, 2}, upks, pp)
        mismatches += ss_decaps({1, 2}, ch, 1, usks[2], upks, pp) != ck
    assert mismatches == 50


def test_header_has_two_elements(params):
    rng = random.Random(9)
    pp = ss_setup(rng, params, 4, 16)
    _, upks = keys_for(rng, pp)
    for r in range(1, 5):
        ch, _ = ss_encaps(rng, range(1, r + 1), upks, pp)
        assert count_elements(ch) == (2, 0)


class ZeroRng(random.Random):
    def randrange(self, *args, **kwargs):
        return 0


def test_zero_exponent_stub(params):
    rng = random.Random(10)
    pp = ss_setup(rng, params, 2, 16)
    _, upks = keys_for(rng, pp)
    ch, ck = ss_encaps(ZeroRng(), {1}, upks, pp)
    assert ch.C1.is_identity()
    assert ck == hash_gt(pp.hk, params.gt_identity)


def _next_scalar(rng, N):
    probe = random.Random()
    probe.setstate(rng.getstate())
    return probe.randrange(N)


def test_header_exponent_oracle(sym20):
    rng = random.Random(11)
    pp, trap = _build(rng, sym20, 2, 16)
    N = sym20.N
    gammas, upks = [], {}
    for i in (1, 2):
        gammas.append(_next_scalar(rng, N))
        upks[i] = ss_gen_key(rng, i, pp)[1]
    t = _next_scalar(rng, N)
    ch, _ = ss_encaps(rng, {1, 2}, upks, pp)
    a = trap["alpha"]
    expected = t * sum(pow(a, j, N) + gammas[j - 1] for j in (1, 2)) * pp.g.value % N
    assert ch.C2.value == expected


def test_encaps_rejects_invalid_key(sym20):
    rng = random.Random(12)
    pp = ss_setup(rng, sym20, 3, 16)
    _, upks = keys_for(rng, pp)
    upks[2] = _tamper(upks[2], 0, sym20.generator)
    with pytest.raises(InvalidKey):
        ss_encaps(rng, {1, 2}, upks, pp)
    ss_encaps(rng, {1, 2}, upks, pp, validate=False)


def test_encaps_preconditions(sym20):
    rng = random.Random(13)
    pp = ss_setup(rng, sym20, 3, 16)
    _, upks = keys_for(rng, pp, [1])
    with pytest.raises(EmptySet):
        ss_encaps(rng, [], upks, pp)
    with pytest.raises(IndexOutOfRange):
        ss_encaps(rng, [4], upks, pp)
    with pytest.raises(MissingKey):
        ss_encaps(rng, [1, 2], upks, pp)


def test_normalize_set():
    assert normalize_set([3, 1, 3], 4) == frozenset({1, 3})


@pytest.mark.parametrize("L", [1, 2, 4, 8, 16])
def test_size_closed_forms(sym20, L):
    pp = ss_setup(random.Random(L), sym20, L, 16)
    assert ss_sizes(pp) == {"pp": (3 * L + 1, 1), "usk": (1, 0), "upk": (L, 0), "ch": (2, 0)}


def test_degenerate_user_blinding_still_correct(toy_curve):
    # at toy sizes random exponents often vanish in a subgroup; correctness must not depend on it
    rng = random.Random(14)
    for _ in range(5):
        pp = ss_setup(rng, toy_curve, 2, 8)
        usks, upks = keys_for(rng, pp)
        ch, ck = ss_encaps(rng, {1, 2}, upks, pp)
        assert ss_decaps({1, 2}, ch, 2, usks[2], upks, pp) == ck
