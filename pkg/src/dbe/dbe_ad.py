"""Adaptively secure DBE obtained by doubling the semi-static scheme.

User i owns the two semi-static slots 2i and 2i-1, publishes both public
keys, and keeps the secret key of slot 2i-u for a private coin u. A sender
flips one coin z_j per recipient, encapsulates to S_0 = {2j - z_j} and to the
complementary S_1 = {2j - (1 - z_j)}, and wraps a fresh session key under
both resulting semi-static keys with the one-time pad.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Tuple

from .bitstring import BitString
from .dbe_ss import (
    CiphertextHeaderSS,
    PublicParams,
    SessionKey,
    UserPublicKey,
    UserSecretKey,
    _build,
    count_elements,
    normalize_set,
    ss_decaps,
    ss_encaps,
    ss_gen_key,
    ss_is_valid,
)
from .errors import IndexOutOfRange, InvalidKey, MalformedHeader, MalformedKey, MissingKey
from .groups import GroupParams
from .ske import SkeCiphertext, ske_decrypt, ske_encrypt


@dataclass(frozen=True)
class AdPublicKey:
    i: int
    even: UserPublicKey  # slot 2i
    odd: UserPublicKey  # slot 2i - 1

    __hash__ = None

    def slot(self, k: int) -> UserPublicKey:
        return self.even if k % 2 == 0 else self.odd


@dataclass(frozen=True)
class AdSecretKey:
    i: int
    u: int
    usk_kept: UserSecretKey

    @property
    def slot(self) -> int:
        return 2 * self.i - self.u


@dataclass(frozen=True)
class AdKeyPair:
    i: int
    u: int
    usk_kept: UserSecretKey
    upk_even: UserPublicKey
    upk_odd: UserPublicKey

    __hash__ = None

    @property
    def slot(self) -> int:
        return 2 * self.i - self.u

    @property
    def public(self) -> AdPublicKey:
        return AdPublicKey(self.i, self.upk_even, self.upk_odd)

    @property
    def secret(self) -> AdSecretKey:
        return AdSecretKey(self.i, self.u, self.usk_kept)


@dataclass(frozen=True)
class CiphertextHeaderAD:
    ch0: CiphertextHeaderSS
    ch1: CiphertextHeaderSS
    ct0: SkeCiphertext
    ct1: SkeCiphertext
    z: Mapping[int, int]

    __hash__ = None


def ad_setup(rng: random.Random, params: GroupParams, L: int, lam: int) -> PublicParams:
    pp, _ = _build(rng, params, 2 * L, lam, scheme="AD")
    return pp


def ad_gen_key(rng: random.Random, i: int, pp: PublicParams) -> AdKeyPair:
    if not 1 <= i <= pp.users:
        raise IndexOutOfRange(f"index {i} outside [1, {pp.users}]")
    usk_even, upk_even = ss_gen_key(rng, 2 * i, pp)
    usk_odd, upk_odd = ss_gen_key(rng, 2 * i - 1, pp)
    u = rng.getrandbits(1)
    kept = usk_odd if u else usk_even
    # Best effort erasure: Python ints are immutable, so the discarded key is
    # only unreferenced here and never serialized.
    del usk_even, usk_odd
    return AdKeyPair(i, u, kept, upk_even, upk_odd)


def ad_is_valid(j: int, upk: AdPublicKey, pp: PublicParams) -> bool:
    if not 1 <= j <= pp.users:
        raise MalformedKey(f"index {j} outside [1, {pp.users}]")
    if upk.i != j:
        raise MalformedKey(f"public key is for index {upk.i}, expected {j}")
    return ss_is_valid(2 * j, upk.even, pp) and ss_is_valid(2 * j - 1, upk.odd, pp)


def split_sets(S: Iterable[int], z: Mapping[int, int]) -> Tuple[frozenset, frozenset]:
    S = sorted(S)
    S0 = frozenset(2 * j - z[j] for j in S)
    S1 = frozenset(2 * j - (1 - z[j]) for j in S)
    return S0, S1


def _slot_keys(S_b: Iterable[int], upks: Mapping[int, AdPublicKey]) -> dict:
    out = {}
    for k in S_b:
        j = (k + 1) // 2
        if j not in upks:
            raise MissingKey(f"no public key for index {j}")
        out[k] = upks[j].slot(k)
    return out


def ad_encaps(rng: random.Random, S: Iterable[int], upks: Mapping[int, AdPublicKey],
              pp: PublicParams, *, z: Optional[Mapping[int, int]] = None,
              validate: bool = True) -> Tuple[CiphertextHeaderAD, SessionKey]:
    """Encapsulate to ``S``. ``z`` pins the per-recipient coins (drawn from rng if omitted)."""
    S = normalize_set(S, pp.users)
    for j in sorted(S):
        if j not in upks:
            raise MissingKey(f"no public key for index {j}")
        if validate and not ad_is_valid(j, upks[j], pp):
            raise InvalidKey(f"public key for index {j} failed validation")
    if z is None:
        z = {j: rng.getrandbits(1) for j in sorted(S)}
    elif set(z) != set(S) or any(b not in (0, 1) for b in z.values()):
        raise ValueError("z must assign one bit to every member of S")
    z = dict(sorted(z.items()))
    S0, S1 = split_sets(S, z)
    ch0, ck0 = ss_encaps(rng, S0, _slot_keys(S0, upks), pp, validate=False)
    ch1, ck1 = ss_encaps(rng, S1, _slot_keys(S1, upks), pp, validate=False)
    ck = BitString(rng.getrandbits(pp.lam), pp.lam)
    header = CiphertextHeaderAD(ch0, ch1, ske_encrypt(ck0, ck), ske_encrypt(ck1, ck), z)
    return header, ck


def ad_decaps(S: Iterable[int], ch: CiphertextHeaderAD, i: int, key,
              upks: Mapping[int, AdPublicKey], pp: PublicParams) -> Optional[SessionKey]:
    """Recover the session key; ``key`` is an AdKeyPair or AdSecretKey.

    Returns None when ``i`` is not in ``S``.
    """
    S = normalize_set(S, pp.users)
    if i not in S:
        return None
    if set(ch.z) != set(S):
        raise MalformedHeader("coin vector does not match the recipient set")
    S0, S1 = split_sets(S, ch.z)
    if ch.z[i] == key.u:
        S_b, ch_b, ct_b = S0, ch.ch0, ch.ct0
    else:
        S_b, ch_b, ct_b = S1, ch.ch1, ch.ct1
    slot = 2 * i - key.u
    assert slot in S_b, "retained slot must be a recipient of the selected branch"
    ck_ss = ss_decaps(S_b, ch_b, slot, key.usk_kept, _slot_keys(S_b, upks), pp)
    return ske_decrypt(ck_ss, ct_b)


def ad_sizes(pp: PublicParams, rng: Optional[random.Random] = None, S=(1,)) -> dict:
    """Element counts of PP, a key pair's public/secret halves and a header for ``S``."""
    rng = rng or random.Random(0)
    keys = {j: ad_gen_key(rng, j, pp) for j in S}
    ch, _ = ad_encaps(rng, S, {j: k.public for j, k in keys.items()}, pp, validate=False)
    k = next(iter(keys.values()))
    return {
        "pp": count_elements(pp),
        "usk": count_elements(k.usk_kept),
        "upk": count_elements(k.public),
        "ch": count_elements(ch),
        "ch_bits": ch.ct0.nbits + ch.ct1.nbits + len(ch.z),
    }
