"""Semi-statically secure distributed broadcast encryption.

Public parameters carry A_k = g^(alpha^k) for k in [1, L] and
U_k = u^(alpha^k) Y_k for k in [1, 2L] except L+1, together with
Omega = e(g, U_{L+1}). Users pick their own gamma_i and publish
V_i = g^gamma_i with V_{i,k} = U_k^gamma_i (times G_p3 noise); nobody ever
learns alpha, u or the setup randomizers, which are dropped once setup ends.

Indices are 1-based throughout.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Tuple

from .bitstring import BitString
from .errors import EmptySet, IndexOutOfRange, InvalidKey, MalformedKey, MissingKey
from .groups import (
    GElem,
    GroupParams,
    GTElem,
    g_prod,
    pair,
    random_element,
    random_generator,
    random_scalar,
)
from .hashing import HashKey, hash_gt, sample_hash_key

SessionKey = BitString


@dataclass(frozen=True, eq=True)
class PublicParams:
    params: GroupParams
    L: int
    g: GElem
    Y: GElem
    A: Tuple[GElem, ...]
    U: Mapping[int, GElem]
    Omega: GTElem
    hk: HashKey
    # "AD" when built for the adaptive scheme; L is then the slot count 2*users
    scheme: str = "SS"

    __hash__ = None

    def a(self, k: int) -> GElem:
        """A_k with the convention A_0 = g."""
        return self.g if k == 0 else self.A[k - 1]

    @property
    def users(self) -> int:
        return self.L // 2 if self.scheme == "AD" else self.L

    @property
    def lam(self) -> int:
        return self.hk.lam


@dataclass(frozen=True)
class UserSecretKey:
    i: int
    K: GElem


@dataclass(frozen=True)
class UserPublicKey:
    i: int
    V: GElem
    Vk: Mapping[int, GElem]

    __hash__ = None


@dataclass(frozen=True)
class CiphertextHeaderSS:
    C1: GElem
    C2: GElem


def _build(rng: random.Random, params: GroupParams, L: int, lam: int,
           scheme: str = "SS") -> Tuple[PublicParams, dict]:
    """Run setup and also return the trapdoor (alpha, u, randomizers, U_{L+1}).

    Only ``ss_setup`` and the transparent setup used by the proof samplers
    call this; the trapdoor must never leave those two callers.
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    g = random_generator(rng, params, {1})
    Y = random_generator(rng, params, {3})
    alpha = random_scalar(rng, params)
    u = random_element(rng, params, {1})
    N = params.N
    A = tuple(g ** pow(alpha, k, N) for k in range(1, L + 1))
    Ys = {k: random_element(rng, params, {3}) for k in range(1, 2 * L + 1)}
    U_full = {k: (u ** pow(alpha, k, N)) * Ys[k] for k in range(1, 2 * L + 1)}
    Omega = pair(g, U_full[L + 1])
    hk = sample_hash_key(rng, params, lam)
    U = {k: v for k, v in U_full.items() if k != L + 1}
    pp = PublicParams(params, L, g, Y, A, U, Omega, hk, scheme)
    trapdoor = {"alpha": alpha, "u": u, "Y": Ys, "U_full": U_full}
    return pp, trapdoor


def ss_setup(rng: random.Random, params: GroupParams, L: int, lam: int) -> PublicParams:
    pp, _ = _build(rng, params, L, lam)
    return pp


def check_pp_consistency(pp: PublicParams) -> bool:
    """Pairing checks that tie the A- and U-chains to a common alpha."""
    A1 = pp.a(1)
    for k in range(1, pp.L):
        if pair(pp.a(k), pp.g) != pair(pp.a(k - 1), A1):
            return False
    for k in range(1, 2 * pp.L):
        if k in (pp.L, pp.L + 1):
            continue
        if pair(pp.U[k], A1) != pair(pp.U[k + 1], pp.g):
            return False
    return True


def _check_index(i: int, L: int) -> None:
    if not 1 <= i <= L:
        raise IndexOutOfRange(f"index {i} outside [1, {L}]")


def ss_gen_key(rng: random.Random, i: int, pp: PublicParams) -> Tuple[UserSecretKey, UserPublicKey]:
    L = pp.L
    _check_index(i, L)
    gamma = random_scalar(rng, pp.params)

    def blind() -> GElem:
        return pp.Y ** random_scalar(rng, pp.params)

    K = (pp.U[L + 1 - i] ** gamma) * blind()
    V = pp.g ** gamma
    Vk = {k: (pp.U[k] ** gamma) * blind() for k in range(1, L + 1) if k != L + 1 - i}
    return UserSecretKey(i, K), UserPublicKey(i, V, Vk)


def _check_upk_shape(j: int, upk: UserPublicKey, L: int) -> None:
    if not 1 <= j <= L:
        raise MalformedKey(f"index {j} outside [1, {L}]")
    if upk.i != j:
        raise MalformedKey(f"public key is for index {upk.i}, expected {j}")
    expected = set(range(1, L + 1)) - {L + 1 - j}
    if set(upk.Vk) != expected:
        raise MalformedKey(f"public key for index {j} has the wrong component set")


def ss_is_valid(j: int, upk: UserPublicKey, pp: PublicParams) -> bool:
    L = pp.L
    _check_upk_shape(j, upk, L)
    T = pair(upk.V, pp.U[L])
    return all(T == pair(pp.a(L - k), upk.Vk[k]) for k in sorted(upk.Vk))


def normalize_set(S: Iterable[int], L: int) -> frozenset:
    out = frozenset(int(j) for j in S)
    if not out:
        raise EmptySet("recipient set is empty")
    for j in out:
        _check_index(j, L)
    return out


def ss_encaps(rng: random.Random, S: Iterable[int], upks: Mapping[int, UserPublicKey],
              pp: PublicParams, *, validate: bool = True) -> Tuple[CiphertextHeaderSS, SessionKey]:
    S = normalize_set(S, pp.L)
    for j in sorted(S):
        if j not in upks:
            raise MissingKey(f"no public key for index {j}")
        if validate and not ss_is_valid(j, upks[j], pp):
            raise InvalidKey(f"public key for index {j} failed validation")
    t = random_scalar(rng, pp.params)
    C1 = pp.g ** t
    C2 = g_prod((pp.a(j) * upks[j].V for j in sorted(S)), pp.params) ** t
    return CiphertextHeaderSS(C1, C2), hash_gt(pp.hk, pp.Omega ** t)


def ss_decaps(S: Iterable[int], ch: CiphertextHeaderSS, i: int, usk: UserSecretKey,
              upks: Mapping[int, UserPublicKey], pp: PublicParams) -> Optional[SessionKey]:
    """Recover the session key, or None when ``i`` is not a recipient."""
    L = pp.L
    S = normalize_set(S, L)
    if i not in S:
        return None
    col = L + 1 - i
    factors = []
    for j in sorted(S - {i}):
        if j not in upks:
            raise MissingKey(f"no public key for index {j}")
        assert L + 1 - i + j != L + 1, "U_{L+1} must never be referenced"
        assert col != L + 1 - j, "V_{j,L+1-j} does not exist"
        try:
            vjk = upks[j].Vk[col]
        except KeyError:
            raise MalformedKey(f"public key {j} lacks component {col}") from None
        factors.append(pp.U[L + 1 - i + j] * vjk)
    D1 = usk.K
    D2 = pp.U[col]
    D3 = g_prod(factors, pp.params)
    session = pair(ch.C2, D2) * pair(ch.C1, D1 * D3).inverse()
    return hash_gt(pp.hk, session)


def count_elements(obj) -> Tuple[int, int]:
    """Number of (G, G_T) elements reachable from ``obj``; hash keys excluded."""
    if isinstance(obj, GElem):
        return 1, 0
    if isinstance(obj, GTElem):
        return 0, 1
    if isinstance(obj, (GroupParams, HashKey, BitString, int, str)) or obj is None:
        return 0, 0
    if isinstance(obj, Mapping):
        items = obj.values()
    elif isinstance(obj, (tuple, list)):
        items = obj
    elif hasattr(obj, "__dataclass_fields__"):
        items = [getattr(obj, f) for f in obj.__dataclass_fields__]
    else:
        raise TypeError(f"cannot count elements in {type(obj).__name__}")
    g = gt = 0
    for item in items:
        a, b = count_elements(item)
        g, gt = g + a, gt + b
    return g, gt


def ss_sizes(pp: PublicParams, rng: Optional[random.Random] = None) -> Dict[str, Tuple[int, int]]:
    """(G, G_T) element counts of PP and of a freshly generated USK, UPK and header."""
    rng = rng or random.Random(0)
    usk, upk = ss_gen_key(rng, 1, pp)
    ch, _ = ss_encaps(rng, {1}, {1: upk}, pp, validate=False)
    return {
        "pp": count_elements(pp),
        "usk": count_elements(usk),
        "upk": count_elements(upk),
        "ch": count_elements(ch),
    }
