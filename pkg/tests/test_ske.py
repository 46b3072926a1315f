import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dbe.bitstring import BitString
from dbe.games import otp_ciphertext_distribution
from dbe.ske import ske_decrypt, ske_encrypt, ske_gen_key


def test_xor_example():
    assert ske_encrypt(BitString(0b1010, 4), BitString(0b0110, 4)) == BitString(0b1100, 4)


def test_zero_message_gives_key():
    k = ske_gen_key(random.Random(1), 16)
    assert ske_encrypt(k, BitString(0, 16)) == k


def test_key_length_and_determinism():
    k = ske_gen_key(random.Random(7), 16)
    assert len(k) == 16
    assert k == ske_gen_key(random.Random(7), 16)


def test_different_seeds_differ():
    keys = [ske_gen_key(random.Random(s), 64) for s in range(100)]
    assert len(set(keys)) == 100


def test_lambda_below_minimum():
    with pytest.raises(ValueError):
        ske_gen_key(random.Random(0), 4)


def test_round_trip_1000():
    rng = random.Random(11)
    for _ in range(1000):
        k, m = ske_gen_key(rng, 32), BitString(rng.getrandbits(32), 32)
        assert ske_decrypt(k, ske_encrypt(k, m)) == m


def test_length_mismatch_is_bottom():
    assert ske_encrypt(BitString(1, 8), BitString(1, 16)) is None
    assert ske_decrypt(BitString(1, 8), BitString(1, 16)) is None


@pytest.mark.parametrize("lam", [4, 8, 12])
def test_ciphertext_distribution_independent_of_message(lam):
    rng = random.Random(lam)
    m0, m1 = BitString(0, lam), BitString(rng.getrandbits(lam) | 1, lam)
    d0, d1 = otp_ciphertext_distribution(m0), otp_ciphertext_distribution(m1)
    assert d0 == d1
    assert set(d0.values()) == {1} and len(d0) == 1 << lam


def test_ciphertext_distribution_matches_direct_enumeration():
    m = BitString(0b1011_0010, 8)
    direct = Counter((k ^ m.value) for k in range(256))
    assert otp_ciphertext_distribution(m) == dict(direct)


@given(st.integers(1, 64).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2 ** n - 1),
                                                     st.integers(0, 2 ** n - 1))))
def test_involution(args):
    n, k, m = args
    K, M = BitString(k, n), BitString(m, n)
    assert ske_decrypt(K, ske_encrypt(K, M)) == M
