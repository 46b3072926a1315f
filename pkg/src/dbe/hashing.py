"""Pairwise-independent hash family H(x) = low_lambda((a*x + b) mod P).

Inputs are G_T elements read as big-endian integers of their canonical
encoding. P is the smallest prime above 2**(8*enc_len + 64), so every encoded
input is a distinct residue and truncating to lambda <= bits(P) - 64 bits
leaves the output statistically close to uniform.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

import sympy

from .bitstring import BitString
from .errors import MalformedEncoding
from .groups import GroupParams, GTElem, encode_gt, gt_encoding_length

MIN_LAMBDA = 8
SLACK_BITS = 64


@dataclass(frozen=True)
class HashKey:
    P: int
    a: int
    b: int
    lam: int

    def __post_init__(self):
        if not (1 <= self.a < self.P and 0 <= self.b < self.P):
            raise ValueError("hash key coefficients out of range")
        if self.lam < 1:
            raise ValueError("output length must be positive")

    def to_bytes(self) -> bytes:
        out = b""
        for v in (self.P, self.a, self.b, self.lam):
            raw = v.to_bytes(max(1, (v.bit_length() + 7) // 8), "big")
            out += len(raw).to_bytes(4, "big") + raw
        return out

    @classmethod
    def from_bytes(cls, data: bytes) -> HashKey:
        vals, pos = [], 0
        for _ in range(4):
            if pos + 4 > len(data):
                raise MalformedEncoding("truncated hash key")
            n = int.from_bytes(data[pos:pos + 4], "big")
            pos += 4
            if pos + n > len(data):
                raise MalformedEncoding("truncated hash key")
            vals.append(int.from_bytes(data[pos:pos + n], "big"))
            pos += n
        if pos != len(data):
            raise MalformedEncoding("trailing bytes after hash key")
        try:
            return cls(*vals)
        except ValueError as exc:
            raise MalformedEncoding(str(exc)) from exc


@lru_cache(maxsize=None)
def _modulus_for(enc_len: int) -> int:
    return sympy.nextprime(1 << (8 * enc_len + SLACK_BITS))


def hash_modulus(params: GroupParams) -> int:
    return _modulus_for(gt_encoding_length(params))


def sample_hash_key(rng: random.Random, params: GroupParams, lam: int) -> HashKey:
    if lam < MIN_LAMBDA:
        raise ValueError(f"lambda must be at least {MIN_LAMBDA}")
    P = hash_modulus(params)
    if lam > P.bit_length() - SLACK_BITS:
        raise ValueError(f"lambda={lam} exceeds {P.bit_length() - SLACK_BITS} bits for these parameters")
    a = rng.randrange(1, P)
    b = rng.randrange(P)
    return HashKey(P, a, b, lam)


def hash_int(hk: HashKey, x: int) -> BitString:
    return BitString((hk.a * x + hk.b) % hk.P & ((1 << hk.lam) - 1), hk.lam)


def hash_gt(hk: HashKey, x: GTElem) -> BitString:
    return hash_int(hk, int.from_bytes(encode_gt(x), "big"))
