"""Binary serialization of parameters, keys and headers.

Every artifact starts with a 14-byte header::

    b"DBE1" | kind (1) | backend (1) | L (4, big-endian) | lambda (4, big-endian)

followed by a sequence of chunks, each a 4-byte big-endian length and the
payload. Group elements inside chunks use the canonical encodings from
``groups``; indices are always carried explicitly.
"""

from __future__ import annotations

import enum
import hashlib
from typing import List, Tuple

from . import groups
from .bitstring import BitString
from .dbe_ad import AdPublicKey, AdSecretKey, CiphertextHeaderAD
from .dbe_ss import CiphertextHeaderSS, PublicParams, UserPublicKey, UserSecretKey
from .errors import MalformedEncoding
from .groups import Backend, GroupParams, decode_g, decode_gt, encode_g, encode_gt
from .hashing import HashKey

MAGIC = b"DBE1"
HEADER_LEN = 14
DIGEST_ALG = "sha256"


class Kind(enum.IntEnum):
    PARAMS = 1
    PP_SS = 2
    PP_AD = 3
    USK = 4
    UPK = 5
    CH = 6
    AD_USK = 7
    AD_UPK = 8
    AD_CH = 9


_BACKEND_CODE = {Backend.CURVE: ord("C"), Backend.SYMBOLIC: ord("S")}
_CODE_BACKEND = {v: k for k, v in _BACKEND_CODE.items()}


def _int_bytes(v: int) -> bytes:
    return v.to_bytes(max(1, (v.bit_length() + 7) // 8), "big")


def _u32(v: int) -> bytes:
    return v.to_bytes(4, "big")


def pack(chunks: List[bytes]) -> bytes:
    return b"".join(_u32(len(c)) + c for c in chunks)


def unpack(data: bytes) -> List[bytes]:
    out, pos = [], 0
    while pos < len(data):
        if pos + 4 > len(data):
            raise MalformedEncoding("truncated chunk length")
        n = int.from_bytes(data[pos:pos + 4], "big")
        pos += 4
        if pos + n > len(data):
            raise MalformedEncoding("truncated chunk")
        out.append(data[pos:pos + n])
        pos += n
    return out


def _header(kind: Kind, backend: Backend, L: int, lam: int) -> bytes:
    return MAGIC + bytes([kind, _BACKEND_CODE[backend]]) + _u32(L) + _u32(lam)


def read_header(data: bytes) -> Tuple[Kind, Backend, int, int]:
    if len(data) < HEADER_LEN or data[:4] != MAGIC:
        raise MalformedEncoding("missing DBE1 header")
    try:
        kind = Kind(data[4])
        backend = _CODE_BACKEND[data[5]]
    except (ValueError, KeyError):
        raise MalformedEncoding("unknown artifact kind or backend") from None
    return kind, backend, int.from_bytes(data[6:10], "big"), int.from_bytes(data[10:14], "big")


def _open(data: bytes, kind: Kind, pp: PublicParams = None) -> List[bytes]:
    got, backend, L, lam = read_header(data)
    if got != kind:
        raise MalformedEncoding(f"expected {kind.name}, found {got.name}")
    if pp is not None and (backend != pp.params.backend or L != pp.L or lam != pp.lam):
        raise MalformedEncoding("artifact does not belong to these public parameters")
    return unpack(data[HEADER_LEN:])


def _expect(chunks: List[bytes], n: int) -> None:
    if len(chunks) != n:
        raise MalformedEncoding(f"expected {n} chunks, found {len(chunks)}")


def _index(raw: bytes) -> int:
    if len(raw) != 4:
        raise MalformedEncoding("index must be 4 bytes")
    return int.from_bytes(raw, "big")


# -- group parameters -------------------------------------------------------------

def encode_params(params: GroupParams) -> bytes:
    vals = list(params.primes)
    if params.backend is Backend.CURVE:
        vals += [params.p, params.h, params.base[0], params.base[1]]
    return _header(Kind.PARAMS, params.backend, 0, 0) + pack([_int_bytes(v) for v in vals])


def decode_params(data: bytes) -> GroupParams:
    _, backend, _, _ = read_header(data)
    chunks = _open(data, Kind.PARAMS)
    vals = [int.from_bytes(c, "big") for c in chunks]
    if backend is Backend.SYMBOLIC:
        _expect(chunks, 3)
        params = GroupParams(backend, *vals)
    else:
        _expect(chunks, 7)
        params = GroupParams(backend, *vals[:5], base=(vals[5], vals[6]))
    if not groups.is_valid_params(params):
        raise MalformedEncoding("group parameters fail their invariants")
    return params


# -- public parameters ---------------------------------------------------------------

def encode_pp(pp: PublicParams) -> bytes:
    kind = Kind.PP_AD if pp.scheme == "AD" else Kind.PP_SS
    chunks = [encode_params(pp.params), encode_g(pp.g), encode_g(pp.Y)]
    chunks += [encode_g(a) for a in pp.A]
    chunks += [_u32(k) + encode_g(pp.U[k]) for k in sorted(pp.U)]
    chunks += [encode_gt(pp.Omega), pp.hk.to_bytes()]
    return _header(kind, pp.params.backend, pp.L, pp.lam) + pack(chunks)


def decode_pp(data: bytes) -> PublicParams:
    kind, _, L, lam = read_header(data)
    if kind not in (Kind.PP_SS, Kind.PP_AD):
        raise MalformedEncoding("not a public-parameter file")
    chunks = _open(data, kind)
    _expect(chunks, 3 + L + (2 * L - 1) + 2)
    params = decode_params(chunks[0])
    g, Y = decode_g(params, chunks[1]), decode_g(params, chunks[2])
    A = tuple(decode_g(params, c) for c in chunks[3:3 + L])
    U = {}
    for c in chunks[3 + L:3 + L + 2 * L - 1]:
        U[_index(c[:4])] = decode_g(params, c[4:])
    if set(U) != set(range(1, 2 * L + 1)) - {L + 1}:
        raise MalformedEncoding("U-chain has the wrong index set")
    Omega = decode_gt(params, chunks[-2])
    hk = HashKey.from_bytes(chunks[-1])
    if hk.lam != lam:
        raise MalformedEncoding("lambda in header and hash key disagree")
    return PublicParams(params, L, g, Y, A, U, Omega, hk, "AD" if kind == Kind.PP_AD else "SS")


def pp_digest(pp: PublicParams) -> str:
    return hashlib.new(DIGEST_ALG, encode_pp(pp)).hexdigest()


# -- semi-static artifacts -----------------------------------------------------------

def encode_usk(usk: UserSecretKey, pp: PublicParams) -> bytes:
    return _header(Kind.USK, pp.params.backend, pp.L, pp.lam) + pack([_u32(usk.i), encode_g(usk.K)])


def decode_usk(data: bytes, pp: PublicParams) -> UserSecretKey:
    chunks = _open(data, Kind.USK, pp)
    _expect(chunks, 2)
    return UserSecretKey(_index(chunks[0]), decode_g(pp.params, chunks[1]))


def encode_upk(upk: UserPublicKey, pp: PublicParams) -> bytes:
    chunks = [_u32(upk.i), encode_g(upk.V)]
    chunks += [_u32(k) + encode_g(upk.Vk[k]) for k in sorted(upk.Vk)]
    return _header(Kind.UPK, pp.params.backend, pp.L, pp.lam) + pack(chunks)


def decode_upk(data: bytes, pp: PublicParams) -> UserPublicKey:
    chunks = _open(data, Kind.UPK, pp)
    if len(chunks) < 2:
        raise MalformedEncoding("public key too short")
    Vk = {}
    for c in chunks[2:]:
        k = _index(c[:4])
        if k in Vk:
            raise MalformedEncoding("duplicate public-key component")
        Vk[k] = decode_g(pp.params, c[4:])
    return UserPublicKey(_index(chunks[0]), decode_g(pp.params, chunks[1]), Vk)


def encode_ch(ch: CiphertextHeaderSS, pp: PublicParams) -> bytes:
    return _header(Kind.CH, pp.params.backend, pp.L, pp.lam) + pack([encode_g(ch.C1), encode_g(ch.C2)])


def decode_ch(data: bytes, pp: PublicParams) -> CiphertextHeaderSS:
    chunks = _open(data, Kind.CH, pp)
    _expect(chunks, 2)
    return CiphertextHeaderSS(decode_g(pp.params, chunks[0]), decode_g(pp.params, chunks[1]))


# -- adaptive artifacts ----------------------------------------------------------------

def encode_ad_usk(key, pp: PublicParams) -> bytes:
    """Serialize the retained half of an AdKeyPair (or an AdSecretKey)."""
    chunks = [_u32(key.i), bytes([key.u]), encode_usk(key.usk_kept, pp)]
    return _header(Kind.AD_USK, pp.params.backend, pp.L, pp.lam) + pack(chunks)


def decode_ad_usk(data: bytes, pp: PublicParams) -> AdSecretKey:
    chunks = _open(data, Kind.AD_USK, pp)
    _expect(chunks, 3)
    if chunks[1] not in (b"\x00", b"\x01"):
        raise MalformedEncoding("secret bit must be 0 or 1")
    key = AdSecretKey(_index(chunks[0]), chunks[1][0], decode_usk(chunks[2], pp))
    if key.usk_kept.i != key.slot:
        raise MalformedEncoding("retained key does not match the secret bit")
    return key


def encode_ad_upk(upk: AdPublicKey, pp: PublicParams) -> bytes:
    chunks = [_u32(upk.i), encode_upk(upk.even, pp), encode_upk(upk.odd, pp)]
    return _header(Kind.AD_UPK, pp.params.backend, pp.L, pp.lam) + pack(chunks)


def decode_ad_upk(data: bytes, pp: PublicParams) -> AdPublicKey:
    chunks = _open(data, Kind.AD_UPK, pp)
    _expect(chunks, 3)
    return AdPublicKey(_index(chunks[0]), decode_upk(chunks[1], pp), decode_upk(chunks[2], pp))


def encode_ad_ch(ch: CiphertextHeaderAD, pp: PublicParams) -> bytes:
    idx = sorted(ch.z)
    bitmap = 0
    for pos, j in enumerate(idx):
        bitmap |= ch.z[j] << (len(idx) - 1 - pos)
    nbytes = (len(idx) + 7) // 8
    # left-align so bit 7 of the first byte is the smallest index
    bitmap <<= 8 * nbytes - len(idx)
    chunks = [
        encode_ch(ch.ch0, pp), encode_ch(ch.ch1, pp),
        ch.ct0.to_bytes(), ch.ct1.to_bytes(),
        _u32(len(idx)), b"".join(_u32(j) for j in idx),
        bitmap.to_bytes(nbytes, "big"),
    ]
    return _header(Kind.AD_CH, pp.params.backend, pp.L, pp.lam) + pack(chunks)


def decode_ad_ch(data: bytes, pp: PublicParams) -> CiphertextHeaderAD:
    chunks = _open(data, Kind.AD_CH, pp)
    _expect(chunks, 7)
    n = _index(chunks[4])
    if len(chunks[5]) != 4 * n or len(chunks[6]) != (n + 7) // 8:
        raise MalformedEncoding("index list or coin bitmap has the wrong length")
    idx = [int.from_bytes(chunks[5][4 * k:4 * k + 4], "big") for k in range(n)]
    if idx != sorted(set(idx)):
        raise MalformedEncoding("index list must be strictly ascending")
    bits = int.from_bytes(chunks[6], "big") >> (8 * len(chunks[6]) - n) if n else 0
    z = {j: (bits >> (n - 1 - pos)) & 1 for pos, j in enumerate(idx)}
    return CiphertextHeaderAD(
        decode_ch(chunks[0], pp), decode_ch(chunks[1], pp),
        BitString.from_bytes(chunks[2], pp.lam), BitString.from_bytes(chunks[3], pp.lam),
        z,
    )


def encode_public_key(upk, pp: PublicParams) -> bytes:
    return encode_ad_upk(upk, pp) if pp.scheme == "AD" else encode_upk(upk, pp)


def decode_public_key(data: bytes, pp: PublicParams):
    return decode_ad_upk(data, pp) if pp.scheme == "AD" else decode_upk(data, pp)
