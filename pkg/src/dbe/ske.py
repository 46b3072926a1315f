"""One-time-pad symmetric encryption on lambda-bit strings.

A uniformly random key used once gives perfect one-message secrecy, which is
all the two-branch key wrapping of the adaptive scheme needs. ``None`` is the
failure symbol: it is returned only when lengths disagree.
"""

from __future__ import annotations

import random
from typing import Optional

from .bitstring import BitString

SkeKey = BitString
SkeCiphertext = BitString


def ske_gen_key(rng: random.Random, lam: int) -> SkeKey:
    if lam < 8:
        raise ValueError("lambda must be at least 8")
    return BitString(rng.getrandbits(lam), lam)


def ske_encrypt(k: SkeKey, m: BitString) -> Optional[SkeCiphertext]:
    if k.nbits != m.nbits:
        return None
    return k ^ m


def ske_decrypt(k: SkeKey, c: SkeCiphertext) -> Optional[BitString]:
    if k.nbits != c.nbits:
        return None
    return k ^ c
