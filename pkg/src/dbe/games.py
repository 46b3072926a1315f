"""Security-game challengers and proof-side samplers.

The challengers run the semi-static, adaptive and active-adaptive
experiments against scripted adversaries and record every event in a
``GameTranscript``. The samplers build the semi-functional objects used in
the hybrid argument; they need the setup trapdoor, so they work from a
``TransparentSetup`` that the scheme itself never produces. Nothing here is
exported from the package namespace.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Protocol, Sequence, Set

import numpy as np
import sympy

from .bitstring import BitString
from .dbe_ad import AdPublicKey, ad_encaps, ad_gen_key, ad_is_valid, ad_setup
from .dbe_ss import (
    CiphertextHeaderSS,
    PublicParams,
    UserPublicKey,
    _build,
    ss_encaps,
    ss_gen_key,
    ss_setup,
)
from .errors import DBEError, NonDistinctInputs, ProtocolViolation
from .groups import GElem, GroupParams, pair, random_element, random_generator, random_scalar
from .hashing import hash_gt, sample_hash_key


# -- transparent setup -----------------------------------------------------------

@dataclass(frozen=True)
class TransparentSetup:
    pp: PublicParams
    alpha: int
    u_elem: GElem
    g2: GElem
    Y: Mapping[int, GElem]  # setup randomizers Y_1..Y_2L
    p1: int
    p2: int
    p3: int

    __hash__ = None

    def normal_ul(self) -> Dict[int, GElem]:
        """The full list U'_i = u^(alpha^i) Y_i for i in [1, 2L], including U_{L+1}."""
        N = self.pp.params.N
        return {i: (self.u_elem ** pow(self.alpha, i, N)) * self.Y[i]
                for i in range(1, 2 * self.pp.L + 1)}

    def rederive_pp(self) -> PublicParams:
        pp = self.pp
        N = pp.params.N
        A = tuple(pp.g ** pow(self.alpha, k, N) for k in range(1, pp.L + 1))
        ul = self.normal_ul()
        U = {k: v for k, v in ul.items() if k != pp.L + 1}
        return PublicParams(pp.params, pp.L, pp.g, pp.Y, A, U,
                            pair(pp.g, ul[pp.L + 1]), pp.hk, pp.scheme)


def transparent_setup(rng: random.Random, params: GroupParams, L: int, lam: int,
                      scheme: str = "SS") -> TransparentSetup:
    pp, trap = _build(rng, params, L, lam, scheme)
    g2 = random_generator(rng, params, {2})
    return TransparentSetup(pp, trap["alpha"], trap["u"], g2, trap["Y"], *params.primes)


def pp_from_ul(ts: TransparentSetup, ul: Mapping[int, GElem]) -> PublicParams:
    """Public parameters whose U-chain is replaced by ``ul`` (which includes U_{L+1})."""
    pp = ts.pp
    U = {k: v for k, v in ul.items() if k != pp.L + 1}
    return PublicParams(pp.params, pp.L, pp.g, pp.Y, pp.A, U,
                        pair(pp.g, ul[pp.L + 1]), pp.hk, pp.scheme)


# -- semi-functional samplers ------------------------------------------------------

def sample_ch_sf(ts: TransparentSetup, rng: random.Random, ch: CiphertextHeaderSS,
                 *, c: Optional[int] = None, d: Optional[int] = None) -> CiphertextHeaderSS:
    params = ts.pp.params
    c = random_scalar(rng, params) if c is None else c
    d = random_scalar(rng, params) if d is None else d
    return CiphertextHeaderSS(ch.C1 * ts.g2 ** c, ch.C2 * ts.g2 ** (c * d))


def sample_ul_sf(ts: TransparentSetup, rng: random.Random,
                 deltas: Optional[Sequence[int]] = None) -> Dict[int, GElem]:
    params = ts.pp.params
    n = 2 * ts.pp.L
    if deltas is None:
        deltas = [random_scalar(rng, params) for _ in range(n)]
    out = {}
    for i, u_i in ts.normal_ul().items():
        out[i] = u_i * ts.g2 ** deltas[i - 1] * random_element(rng, params, {3})
    return out


def sample_ul_eta(ts: TransparentSetup, rng: random.Random, eta: int, sub: int,
                  r: Sequence[int], a: Sequence[int]) -> Dict[int, GElem]:
    """Hybrid U-list of type (eta, sub).

    The G_p2 exponent of U_i is sum_{j < eta} r_j a_j^i, plus r_eta alpha^i when
    ``sub == 1``. ``r`` and ``a`` are the fixed exponents, 0-based lists holding
    r_1, r_2, ... and a_1, a_2, ...
    """
    if sub not in (0, 1):
        raise ValueError("sub-type must be 0 or 1")
    params = ts.pp.params
    N = params.N
    out = {}
    for i, u_i in ts.normal_ul().items():
        e = sum(r[j] * pow(a[j], i, N) for j in range(eta - 1))
        if sub == 1:
            e += r[eta - 1] * pow(ts.alpha, i, N)
        out[i] = u_i * ts.g2 ** e * random_element(rng, params, {3})
    return out


def reparametrized_gen_key(ts: TransparentSetup, rng: random.Random, i: int,
                           gamma_prime: int) -> UserPublicKey:
    """Public key with gamma_i = gamma'_i - alpha^i, built without knowing gamma_i."""
    pp = ts.pp
    ul = ts.normal_ul()
    V = pp.g ** gamma_prime * pp.a(i).inverse()
    Vk = {k: ul[k] ** gamma_prime * ul[k + i].inverse() * random_element(rng, pp.params, {3})
          for k in range(1, pp.L + 1) if k != pp.L + 1 - i}
    return UserPublicKey(i, V, Vk)


# -- Vandermonde argument -------------------------------------------------------------

def _check_vandermonde_inputs(p2: int, a: Sequence[int]) -> List[int]:
    if not sympy.isprime(p2) or p2 > 1 << 20:
        raise ValueError("p2 must be a prime below 2^20")
    reduced = [x % p2 for x in a]
    if len(set(reduced)) != len(reduced):
        raise NonDistinctInputs("evaluation points repeat modulo p2")
    return reduced


def vandermonde_matrix(a: Sequence[int], p2: int) -> np.ndarray:
    """Rows are successive powers a_j^1 .. a_j^n (no row of ones)."""
    n = len(a)
    return np.array([[pow(x, i, p2) for x in a] for i in range(1, n + 1)], dtype=np.int64)


def vandermonde_determinant(a: Sequence[int], p2: int) -> int:
    # rows start at the first power, so each column contributes a factor a_j
    det = 1
    for x in a:
        det = det * x % p2
    for i, j in itertools.combinations(range(len(a)), 2):
        det = det * (a[j] - a[i]) % p2
    return det % p2


def vandermonde_image_size(a: Sequence[int], p2: int) -> int:
    """Count distinct images of r -> V r mod p2 over all p2^n inputs."""
    n = len(a)
    V = vandermonde_matrix(a, p2)
    grid = np.array(list(itertools.product(range(p2), repeat=n)), dtype=np.int64)
    images = grid @ V.T % p2
    keys = images @ (p2 ** np.arange(n, dtype=np.int64))
    return int(np.unique(keys).size)


def vandermonde_bijection_check(p2: int, a: Sequence[int]) -> bool:
    """True iff r -> V r mod p2 is a bijection.

    Decided by the determinant; for p2^n <= 10^6 the verdict is also confirmed
    by enumerating the image.
    """
    a = _check_vandermonde_inputs(p2, a)
    verdict = vandermonde_determinant(a, p2) != 0
    if p2 ** len(a) <= 10 ** 6:
        exhaustive = vandermonde_image_size(a, p2) == p2 ** len(a)
        if exhaustive != verdict:
            raise AssertionError("determinant and enumeration disagree")
    return verdict


# -- leftover-hash and OMI facts -------------------------------------------------------

def hash_collision_rate(rng: random.Random, params: GroupParams, lam: int,
                        x, y, trials: int) -> float:
    """Fraction of freshly sampled hash keys under which H(x) == H(y)."""
    hits = 0
    for _ in range(trials):
        hk = sample_hash_key(rng, params, lam)
        hits += hash_gt(hk, x) == hash_gt(hk, y)
    return hits / trials


def otp_ciphertext_distribution(m: BitString) -> Dict[int, int]:
    """Histogram of one-time-pad ciphertexts of ``m`` over every key."""
    hist: Dict[int, int] = {}
    for k in range(1 << m.nbits):
        c = (BitString(k, m.nbits) ^ m).value
        hist[c] = hist.get(c, 0) + 1
    return hist


# -- subgroup-decision fixtures ---------------------------------------------------------

@dataclass(frozen=True)
class SDChallenge:
    g1: GElem
    g3: GElem
    Z: GElem


@dataclass(frozen=True)
class GSDChallenge:
    g1: GElem
    g3: GElem
    X1R1: GElem
    R2Y1: GElem
    Z: GElem


def _nontrivial(rng, params, i):
    return random_generator(rng, params, {i})


def sd_fixture(ts: TransparentSetup, rng: random.Random, case: int) -> SDChallenge:
    params = ts.pp.params
    Z = _nontrivial(rng, params, 1)
    if case == 1:
        Z = Z * _nontrivial(rng, params, 2)
    elif case != 0:
        raise ValueError("case must be 0 or 1")
    return SDChallenge(ts.pp.g, ts.pp.Y, Z)


def gsd_fixture(ts: TransparentSetup, rng: random.Random, case: int) -> GSDChallenge:
    params = ts.pp.params
    X1R1 = _nontrivial(rng, params, 1) * _nontrivial(rng, params, 2)
    R2Y1 = _nontrivial(rng, params, 2) * _nontrivial(rng, params, 3)
    Z = _nontrivial(rng, params, 1) * _nontrivial(rng, params, 3)
    if case == 1:
        Z = Z * _nontrivial(rng, params, 2)
    elif case != 0:
        raise ValueError("case must be 0 or 1")
    return GSDChallenge(ts.pp.g, ts.pp.Y, X1R1, R2Y1, Z)


# -- game harness ------------------------------------------------------------------------

class Adversary(Protocol):
    def init(self, L: int) -> Optional[Set[int]]:
        """Semi-static game: return the committed superset. Ignored elsewhere."""

    def query(self, pp: PublicParams, oracle: "Oracle") -> None:
        ...

    def challenge(self) -> Set[int]:
        ...

    def guess(self, header, key: BitString) -> int:
        ...


@dataclass
class GameTranscript:
    game: str
    events: List[str] = field(default_factory=list)
    S_tilde: Optional[frozenset] = None
    KQ: Set[int] = field(default_factory=set)
    CQ: Set[int] = field(default_factory=set)
    MQ: Set[int] = field(default_factory=set)
    malicious_valid: Dict[int, bool] = field(default_factory=dict)
    S_star: Optional[frozenset] = None
    mu: Optional[int] = None
    mu_guess: Optional[int] = None
    valid: bool = True
    violation: Optional[str] = None

    @property
    def verdict(self) -> int:
        return int(self.valid and self.mu is not None and self.mu == self.mu_guess)

    def log(self, msg: str) -> None:
        self.events.append(msg)

    def report(self) -> str:
        lines = [f"game: {self.game}", *self.events]
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


class Oracle:
    """Query interface handed to the adversary during the query phase."""

    def __init__(self, game: str, rng: random.Random, pp: PublicParams, transcript: GameTranscript):
        self._game = game
        self._rng = rng
        self._pp = pp
        self._secret: Dict[int, object] = {}
        self.public_keys: Dict[int, object] = {}
        self.transcript = transcript

    def _violate(self, msg: str):
        t = self.transcript
        if t.valid:
            t.valid, t.violation = False, msg
        t.log(f"violation: {msg}")
        raise ProtocolViolation(msg)

    def _in_range(self, i: int) -> None:
        if not 1 <= i <= self._pp.users:
            self._violate(f"index {i} outside [1, {self._pp.users}]")

    def _honest_key(self, i: int):
        if self._game == "semi-static":
            usk, upk = ss_gen_key(self._rng, i, self._pp)
            self._secret[i] = usk
        else:
            kp = ad_gen_key(self._rng, i, self._pp)
            self._secret[i], upk = kp.secret, kp.public
        self.public_keys[i] = upk
        return upk

    def keygen(self, i: int):
        t = self.transcript
        if self._game == "semi-static":
            self._violate("no adaptive key queries in the semi-static game")
        self._in_range(i)
        if i in t.KQ or i in t.MQ:
            self._violate(f"key generation on already-used index {i}")
        t.KQ.add(i)
        t.log(f"keygen: {i}")
        return self._honest_key(i)

    def corrupt(self, i: int):
        t = self.transcript
        if self._game == "semi-static":
            self._violate("no corruption queries in the semi-static game")
        if i not in t.KQ or i in t.CQ:
            self._violate(f"corruption of {i} requires i in KQ \\ CQ")
        t.CQ.add(i)
        t.log(f"corrupt: {i}")
        return self._secret[i]

    def malicious(self, i: int, upk: AdPublicKey) -> None:
        t = self.transcript
        if self._game != "active-adaptive":
            self._violate("malicious corruption only exists in the active-adaptive game")
        self._in_range(i)
        if i in t.KQ or i in t.MQ:
            self._violate(f"malicious registration on already-used index {i}")
        try:
            ok = ad_is_valid(i, upk, self._pp)
        except DBEError:
            ok = False
        t.MQ.add(i)
        t.malicious_valid[i] = ok
        self.public_keys[i] = upk
        t.log(f"malicious: {i} valid={int(ok)}")


def _play(game: str, adversary: Adversary, params: GroupParams, L: int, lam: int,
          rng: random.Random) -> GameTranscript:
    t = GameTranscript(game)
    try:
        committed = adversary.init(L)
        if game == "semi-static":
            committed = frozenset(committed or ())
            if not committed <= frozenset(range(1, L + 1)):
                raise ProtocolViolation("committed set must lie in [1, L]")
            t.S_tilde = committed
            t.log(f"init: S~={sorted(committed)}")
            pp = ss_setup(rng, params, L, lam)
        else:
            pp = ad_setup(rng, params, L, lam)
        t.log(f"setup: L={L} lambda={lam} backend={params.backend.value}")
        oracle = Oracle(game, rng, pp, t)
        if game == "semi-static":
            for j in sorted(t.S_tilde):
                oracle._honest_key(j)
            t.log(f"query: public keys for {sorted(t.S_tilde)}")
        adversary.query(pp, oracle)
        if not t.valid:
            raise ProtocolViolation(t.violation)

        S_star = frozenset(adversary.challenge() or ())
        t.S_star = S_star
        t.log(f"challenge: S*={sorted(S_star)}")
        if not S_star:
            raise ProtocolViolation("challenge set is empty")
        if game == "semi-static":
            allowed = t.S_tilde
        elif game == "adaptive":
            allowed = t.KQ - t.CQ
        else:
            allowed = t.KQ - (t.CQ | t.MQ)
        if not S_star <= allowed:
            raise ProtocolViolation(f"challenge set {sorted(S_star)} outside allowed {sorted(allowed)}")

        upks = {j: oracle.public_keys[j] for j in S_star}
        if game == "semi-static":
            ch, ck = ss_encaps(rng, S_star, upks, pp)
        else:
            ch, ck = ad_encaps(rng, S_star, upks, pp)
        rk = BitString(rng.getrandbits(lam), lam)
        t.mu = rng.getrandbits(1)
        t.log("challenge: header and key issued")
        t.mu_guess = int(adversary.guess(ch, ck if t.mu == 0 else rk))
        t.log(f"guess: mu'={t.mu_guess} mu={t.mu}")
    except ProtocolViolation as exc:
        if t.valid:
            t.valid, t.violation = False, str(exc)
            t.log(f"violation: {exc}")
    return t


def run_semi_static_game(adversary: Adversary, params: GroupParams, L: int, lam: int,
                         rng: random.Random) -> GameTranscript:
    return _play("semi-static", adversary, params, L, lam, rng)


def run_adaptive_game(adversary: Adversary, params: GroupParams, L: int, lam: int,
                      rng: random.Random) -> GameTranscript:
    return _play("adaptive", adversary, params, L, lam, rng)


def run_active_adaptive_game(adversary: Adversary, params: GroupParams, L: int, lam: int,
                             rng: random.Random) -> GameTranscript:
    return _play("active-adaptive", adversary, params, L, lam, rng)
