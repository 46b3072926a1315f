"""Composite-order symmetric bilinear groups of order N = p1*p2*p3.

Two interchangeable backends share one element API:

* ``Backend.CURVE`` -- the order-N subgroup of the supersingular curve
  y^2 = x^3 + x over F_p with p = h*N - 1, paired by the reduced Tate pairing
  composed with the distortion map (x, y) -> (-x, i*y).
* ``Backend.SYMBOLIC`` -- elements are discrete logarithms in Z_N relative to
  a fixed abstract generator; the pairing multiplies exponents. It is an exact
  oracle for any identity expressible in the exponents.

Parameters at desk scale are deliberately insecure; ``GroupParams.toy`` flags
every parameter set below ``TOY_THRESHOLD_BITS``.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Tuple

import sympy

from . import _curve
from .errors import (
    BackendMismatch,
    DBEError,
    InvalidBits,
    MalformedEncoding,
    NotInSubgroup,
    SearchExhausted,
)

TOY_THRESHOLD_BITS = 1024
MAX_COFACTOR = 1 << 24

SYMBOLIC_TAG = 0x53
INFINITY_TAG = 0x00
AFFINE_TAG = 0x04

Scalar = int


class Backend(str, enum.Enum):
    CURVE = "curve"
    SYMBOLIC = "symbolic"


def _byte_width(n: int) -> int:
    return (n.bit_length() + 7) // 8


@dataclass(frozen=True)
class GroupParams:
    backend: Backend
    p1: int
    p2: int
    p3: int
    # curve backend only
    p: Optional[int] = None
    h: Optional[int] = None
    base: Optional[Tuple[int, int]] = None

    @property
    def N(self) -> int:
        return self.p1 * self.p2 * self.p3

    @property
    def primes(self) -> Tuple[int, int, int]:
        return (self.p1, self.p2, self.p3)

    @property
    def toy(self) -> bool:
        return self.N.bit_length() < TOY_THRESHOLD_BITS

    @property
    def scalar_width(self) -> int:
        return _byte_width(self.N)

    @property
    def coord_width(self) -> int:
        return _byte_width(self.p)

    @cached_property
    def generator(self) -> GElem:
        if self.backend is Backend.SYMBOLIC:
            return GElem(self, 1)
        return GElem(self, self.base)

    @cached_property
    def g_identity(self) -> GElem:
        return GElem(self, 0 if self.backend is Backend.SYMBOLIC else None)

    @cached_property
    def gt_identity(self) -> GTElem:
        return GTElem(self, 0 if self.backend is Backend.SYMBOLIC else _curve.FP2_ONE)

    @cached_property
    def gt_generator(self) -> GTElem:
        return pair(self.generator, self.generator)

    def __repr__(self) -> str:
        tag = " toy parameters" if self.toy else ""
        return (f"GroupParams({self.backend.value}, N={self.N} "
                f"[{self.N.bit_length()} bits]{tag})")


def _check_same(a, b) -> None:
    if a.params is not b.params and a.params != b.params:
        raise BackendMismatch("operands belong to different groups")


class GElem:
    """Element of the source group G (order N)."""

    __slots__ = ("params", "value")

    def __init__(self, params: GroupParams, value):
        self.params = params
        self.value = value

    def __mul__(self, other: GElem) -> GElem:
        if not isinstance(other, GElem):
            return NotImplemented
        _check_same(self, other)
        P = self.params
        if P.backend is Backend.SYMBOLIC:
            return GElem(P, (self.value + other.value) % P.N)
        return GElem(P, _curve.point_add(self.value, other.value, P.p))

    def __pow__(self, s: int) -> GElem:
        P = self.params
        s %= P.N
        if P.backend is Backend.SYMBOLIC:
            return GElem(P, self.value * s % P.N)
        return GElem(P, _curve.point_mul(self.value, s, P.p))

    def inverse(self) -> GElem:
        P = self.params
        if P.backend is Backend.SYMBOLIC:
            return GElem(P, -self.value % P.N)
        return GElem(P, _curve.point_neg(self.value, P.p))

    def is_identity(self) -> bool:
        return self.value == self.params.g_identity.value

    def __eq__(self, other) -> bool:
        if not isinstance(other, GElem):
            return NotImplemented
        return self.params == other.params and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.params.backend, self.value))

    def __repr__(self) -> str:
        return f"GElem({self.params.backend.value}, {self.value!r})"


class GTElem:
    """Element of the target group G_T (order N)."""

    __slots__ = ("params", "value")

    def __init__(self, params: GroupParams, value):
        self.params = params
        self.value = value

    def __mul__(self, other: GTElem) -> GTElem:
        if not isinstance(other, GTElem):
            return NotImplemented
        _check_same(self, other)
        P = self.params
        if P.backend is Backend.SYMBOLIC:
            return GTElem(P, (self.value + other.value) % P.N)
        return GTElem(P, _curve.fp2_mul(self.value, other.value, P.p))

    def __pow__(self, s: int) -> GTElem:
        P = self.params
        s %= P.N
        if P.backend is Backend.SYMBOLIC:
            return GTElem(P, self.value * s % P.N)
        return GTElem(P, _curve.fp2_pow(self.value, s, P.p))

    def inverse(self) -> GTElem:
        P = self.params
        if P.backend is Backend.SYMBOLIC:
            return GTElem(P, -self.value % P.N)
        return GTElem(P, _curve.fp2_conj(self.value, P.p))  # unitary: x^-1 = x^p

    def is_identity(self) -> bool:
        return self.value == self.params.gt_identity.value

    def __eq__(self, other) -> bool:
        if not isinstance(other, GTElem):
            return NotImplemented
        return self.params == other.params and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.params.backend, self.value))

    def __repr__(self) -> str:
        return f"GTElem({self.params.backend.value}, {self.value!r})"


def g_exp(base: GElem, s: Scalar) -> GElem:
    return base ** s


def g_mul(a: GElem, b: GElem) -> GElem:
    return a * b


def g_inv(a: GElem) -> GElem:
    return a.inverse()


def gt_exp(base: GTElem, s: Scalar) -> GTElem:
    return base ** s


def gt_mul(a: GTElem, b: GTElem) -> GTElem:
    return a * b


def gt_inv(a: GTElem) -> GTElem:
    return a.inverse()


def g_prod(elems: Iterable[GElem], params: GroupParams) -> GElem:
    """Product of ``elems``; the empty product is the identity."""
    acc = params.g_identity
    for x in elems:
        acc = acc * x
    return acc


# Fault-injection hook for the self-test: when set, a callable applied to
# every pairing output.
_pairing_fault = None


def pair(a: GElem, b: GElem) -> GTElem:
    _check_same(a, b)
    P = a.params
    if P.backend is Backend.SYMBOLIC:
        out = GTElem(P, a.value * b.value % P.N)
    else:
        out = GTElem(P, _curve.tate_pairing(a.value, b.value, P.N, P.h, P.p))
    if _pairing_fault is not None:
        out = _pairing_fault(out)
    return out


# -- parameter generation ------------------------------------------------------

def _random_prime(rng: random.Random, bits: int) -> int:
    lo, hi = 1 << (bits - 1), 1 << bits
    while True:
        q = sympy.nextprime(rng.randrange(lo, hi) - 1)
        if q < hi and q > 2:
            return q


def _enough_primes(bits: int) -> bool:
    if bits >= 8:
        return True
    return len(list(sympy.primerange(max(3, 1 << (bits - 1)), 1 << bits))) >= 3


def generate_params(backend: Backend | str, prime_bits: Optional[int] = None,
                    seed: bytes = b"dbe", *, primes: Optional[Iterable[int]] = None,
                    max_cofactor: int = MAX_COFACTOR) -> GroupParams:
    """Deterministically derive group parameters from ``(backend, prime_bits, seed)``.

    ``primes`` pins (p1, p2, p3) explicitly instead of drawing them; this is
    how toy fixtures such as (5, 7, 11) are produced.
    """
    backend = Backend(backend)
    if not seed:
        raise ValueError("seed must be nonempty")
    rng = random.Random(b"dbe-params|" + bytes(seed))
    if primes is not None:
        p1, p2, p3 = (int(q) for q in primes)
        if len({p1, p2, p3}) != 3 or not all(q > 2 and sympy.isprime(q) for q in (p1, p2, p3)):
            raise InvalidBits("primes must be three distinct odd primes")
    else:
        if prime_bits is None or prime_bits < 3 or not _enough_primes(prime_bits):
            raise InvalidBits(f"no three distinct odd primes of {prime_bits} bits")
        chosen: list = []
        while len(chosen) < 3:
            q = _random_prime(rng, prime_bits)
            if q not in chosen:
                chosen.append(q)
        p1, p2, p3 = chosen
    if backend is Backend.SYMBOLIC:
        return GroupParams(Backend.SYMBOLIC, p1, p2, p3)

    N = p1 * p2 * p3
    # h = 0 mod 4 makes p = h*N - 1 = 3 mod 4 for any odd N.
    for h in range(4, max_cofactor + 1, 4):
        p = h * N - 1
        if sympy.isprime(p):
            break
    else:
        raise SearchExhausted(f"no prime p = h*N - 1 with h <= {max_cofactor}")

    for _ in range(1000):
        pt = _curve.lift_x(rng.randrange(p), p)
        if pt is None:
            continue
        base = _curve.point_mul(pt, h, p)
        if base is None:
            continue
        if all(_curve.point_mul(base, N // q, p) is not None for q in (p1, p2, p3)):
            break
    else:
        raise SearchExhausted("no base point of order N found")
    params = GroupParams(Backend.CURVE, p1, p2, p3, p=p, h=h, base=base)
    e = params.gt_generator
    if any((e ** (N // q)).is_identity() for q in (p1, p2, p3)):
        raise DBEError("pairing is degenerate on the chosen base point")
    return params


def is_valid_params(params: GroupParams) -> bool:
    """Re-verify every GroupParams invariant from scratch."""
    qs = params.primes
    if len(set(qs)) != 3 or not all(sympy.isprime(q) for q in qs):
        return False
    if params.backend is Backend.SYMBOLIC:
        return True
    p, N = params.p, params.N
    if not sympy.isprime(p) or p % 4 != 3 or p + 1 != params.h * N:
        return False
    if not _curve.on_curve(params.base, p) or _curve.point_mul(params.base, N, p) is not None:
        return False
    return all(_curve.point_mul(params.base, N // q, p) is not None for q in qs)


# -- subgroups and sampling ----------------------------------------------------

def _subgroup_order(params: GroupParams, primes: Iterable[int]) -> int:
    idx = set(primes)
    if not idx or not idx <= {1, 2, 3}:
        raise ValueError("primes must be a nonempty subset of {1, 2, 3}")
    order = 1
    for i in idx:
        order *= params.primes[i - 1]
    return order


def subgroup_generator(params: GroupParams, primes: Iterable[int]) -> GElem:
    """Generator of the subgroup of order prod(p_i for i in primes)."""
    return params.generator ** (params.N // _subgroup_order(params, primes))


def random_scalar(rng: random.Random, params: GroupParams) -> Scalar:
    return rng.randrange(params.N)


def random_element(rng: random.Random, params: GroupParams,
                   primes: Iterable[int] = (1, 2, 3)) -> GElem:
    return subgroup_generator(params, primes) ** random_scalar(rng, params)


def random_generator(rng: random.Random, params: GroupParams,
                     primes: Iterable[int]) -> GElem:
    """Uniform generator of the designated subgroup (exact order prod p_i)."""
    idx = set(primes)
    gen = subgroup_generator(params, idx)
    while True:
        s = random_scalar(rng, params)
        if all(s % params.primes[i - 1] for i in idx):
            return gen ** s


def has_component(x, i: int) -> bool:
    """True iff the order of ``x`` is divisible by p_i (works on G and G_T)."""
    P = x.params
    return not (x ** (P.N // P.primes[i - 1])).is_identity()


def element_order(x) -> int:
    order = 1
    for i, q in enumerate(x.params.primes, start=1):
        if has_component(x, i):
            order *= q
    return order


# -- canonical encodings ---------------------------------------------------------

def encode_scalar(params: GroupParams, s: Scalar) -> bytes:
    return (s % params.N).to_bytes(params.scalar_width, "big")


def decode_scalar(params: GroupParams, data: bytes) -> Scalar:
    if len(data) != params.scalar_width:
        raise MalformedEncoding("scalar has wrong length")
    s = int.from_bytes(data, "big")
    if s >= params.N:
        raise MalformedEncoding("scalar out of range")
    return s


def g_encoding_length(params: GroupParams) -> int:
    if params.backend is Backend.SYMBOLIC:
        return 1 + params.scalar_width
    return 1 + 2 * params.coord_width


def gt_encoding_length(params: GroupParams) -> int:
    if params.backend is Backend.SYMBOLIC:
        return 1 + params.scalar_width
    return 2 * params.coord_width


def encode_g(a: GElem) -> bytes:
    P = a.params
    if P.backend is Backend.SYMBOLIC:
        return bytes([SYMBOLIC_TAG]) + a.value.to_bytes(P.scalar_width, "big")
    w = P.coord_width
    if a.value is None:
        return bytes([INFINITY_TAG]) + bytes(2 * w)
    x, y = a.value
    return bytes([AFFINE_TAG]) + x.to_bytes(w, "big") + y.to_bytes(w, "big")


def decode_g(params: GroupParams, data: bytes) -> GElem:
    data = bytes(data)
    if len(data) != g_encoding_length(params):
        raise MalformedEncoding(f"G element must be {g_encoding_length(params)} bytes")
    tag, body = data[0], data[1:]
    if params.backend is Backend.SYMBOLIC:
        if tag != SYMBOLIC_TAG:
            raise MalformedEncoding("bad symbolic tag")
        v = int.from_bytes(body, "big")
        if v >= params.N:
            raise MalformedEncoding("exponent out of range")
        return GElem(params, v)
    if tag == INFINITY_TAG:
        if any(body):
            raise MalformedEncoding("non-canonical infinity")
        return params.g_identity
    if tag != AFFINE_TAG:
        raise MalformedEncoding("bad point tag")
    w, p = params.coord_width, params.p
    x, y = int.from_bytes(body[:w], "big"), int.from_bytes(body[w:], "big")
    if x >= p or y >= p or not _curve.on_curve((x, y), p):
        raise MalformedEncoding("point not on curve")
    if _curve.point_mul((x, y), params.N, p) is not None:
        raise NotInSubgroup("point is not in the order-N subgroup")
    return GElem(params, (x, y))


def encode_gt(a: GTElem) -> bytes:
    P = a.params
    if P.backend is Backend.SYMBOLIC:
        return bytes([SYMBOLIC_TAG]) + a.value.to_bytes(P.scalar_width, "big")
    w = P.coord_width
    return a.value[0].to_bytes(w, "big") + a.value[1].to_bytes(w, "big")


def decode_gt(params: GroupParams, data: bytes) -> GTElem:
    data = bytes(data)
    if len(data) != gt_encoding_length(params):
        raise MalformedEncoding(f"GT element must be {gt_encoding_length(params)} bytes")
    if params.backend is Backend.SYMBOLIC:
        if data[0] != SYMBOLIC_TAG:
            raise MalformedEncoding("bad symbolic tag")
        v = int.from_bytes(data[1:], "big")
        if v >= params.N:
            raise MalformedEncoding("exponent out of range")
        return GTElem(params, v)
    w, p = params.coord_width, params.p
    a, b = int.from_bytes(data[:w], "big"), int.from_bytes(data[w:], "big")
    if a >= p or b >= p or (a == 0 and b == 0):
        raise MalformedEncoding("not an element of F_p^2 *")
    if _curve.fp2_pow((a, b), params.N, p) != _curve.FP2_ONE:
        raise NotInSubgroup("element is not in the order-N subgroup of F_p^2 *")
    return GTElem(params, (a, b))
