"""Executable IND games with their adversaries, plus the reduction simulators.

The runner plays one fresh challenger per trial:

1. keygen; the adversary gets ``pk`` plus whatever oracles the mode allows
2. ``choose_messages`` returns two messages of equal length
3. the challenger encrypts ``M_β`` for a uniform bit β
4. ``guess`` sees the target ciphertext; in ``cca2`` the decryption oracle
   stays open but refuses the target itself

``cca`` is ``cca2`` with the second-phase oracle closed.  Protocol violations
(unequal messages, closed oracle, replaying the target) end the trial as a
loss and are counted separately.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import random
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Optional

from .braid import (
    BraidWord,
    compose,
    equals,
    exponent_sum,
    braid_permutation,
    inverse,
    left_canonical_form,
    perm_compose,
    perm_inverse,
    random_word,
    serialize_canonical,
)
from .schemes import (
    DEFAULT_OUT_BITS,
    DEFAULT_PARAMS,
    DEFAULT_WORD_LENGTH,
    KEY_BITS,
    NONCE_BYTES,
    Bits,
    Ciphertext,
    CiphertextA1,
    CiphertextA2,
    CiphertextA3,
    DecryptionError,
    PublicKey,
    SecretKey,
    aead_open,
    aead_seal,
    decrypt,
    encrypt,
    keygen,
)
from .subgroups import DcsTuple, SampleLengths, SplitParams, conjugate, dcs_sample, sample_left, sample_right

log = logging.getLogger(__name__)

MODES = ("cpa", "cca", "cca2")
SCHEMES = ("a1", "a2", "a3")
A3_MESSAGE_BYTES = 32


class ProtocolViolation(Exception):
    """The adversary broke the rules of the game."""


class OracleClosed(ProtocolViolation):
    pass


class TargetQueried(ProtocolViolation):
    pass


@dataclass
class Oracles:
    """What an adversary may touch during one phase of one trial."""

    scheme: str
    params: SplitParams
    out_bits: int
    rng: random.Random
    hash: Optional[Callable[[BraidWord], Bits]] = None
    decrypt: Callable[[Ciphertext], Any] = field(default=None)  # type: ignore[assignment]
    secret_key: Optional[SecretKey] = None
    word_length: int = DEFAULT_WORD_LENGTH

    def __post_init__(self) -> None:
        if self.decrypt is None:
            self.decrypt = _closed_oracle


def _closed_oracle(ct: Ciphertext) -> Any:
    raise OracleClosed("decryption oracle is not available in this phase")


def message_length(m: Any) -> int:
    return len(m)


def random_message(scheme: str, oracles: Oracles, rng: random.Random) -> Any:
    if scheme == "a1":
        return random_word(oracles.params.n, 16, rng)
    if scheme == "a2":
        return Bits.random(oracles.out_bits, rng)
    return rng.randbytes(A3_MESSAGE_BYTES)


def same_message(scheme: str, a: Any, b: Any) -> bool:
    return equals(a, b) if scheme == "a1" else a == b


class Adversary:
    """Two-phase game adversary; state may be kept on ``self`` between phases."""

    name = "adversary"

    def choose_messages(self, pk: PublicKey, oracles: Oracles) -> tuple[Any, Any]:
        raise NotImplementedError

    def guess(self, pk: PublicKey, challenge: Ciphertext, oracles: Oracles) -> int:
        raise NotImplementedError


class _DistinctMessages(Adversary):
    def choose_messages(self, pk, oracles):
        m0 = random_message(oracles.scheme, oracles, oracles.rng)
        while True:
            m1 = random_message(oracles.scheme, oracles, oracles.rng)
            if not same_message(oracles.scheme, m0, m1):
                break
        self.messages = (m0, m1)
        return self.messages

    def _match(self, scheme: str, m: Any, rng: random.Random) -> int:
        if m is not None:
            for bit, candidate in enumerate(self.messages):
                if same_message(scheme, m, candidate):
                    return bit
        return rng.randrange(2)


class BlindGuessAdversary(_DistinctMessages):
    name = "blind"

    def guess(self, pk, challenge, oracles):
        return oracles.rng.randrange(2)


class SecretKeyAdversary(_DistinctMessages):
    """Sanity adversary that is handed the secret key by a test hook."""

    name = "sk-leak"

    def guess(self, pk, challenge, oracles):
        if oracles.secret_key is None:
            raise ProtocolViolation("secret key was not leaked to this adversary")
        try:
            m = decrypt(oracles.secret_key, challenge)
        except DecryptionError:
            m = None
        return self._match(oracles.scheme, m, oracles.rng)


class ReplayAdversary(_DistinctMessages):
    """Submits the target ciphertext verbatim to the decryption oracle."""

    name = "replay"

    def guess(self, pk, challenge, oracles):
        return self._match(oracles.scheme, oracles.decrypt(challenge), oracles.rng)


class MalleabilityAdversaryA1(_DistinctMessages):
    """Queries ``(Y, c·w)``; the answer is ``M_β·w``."""

    name = "malleability-a1"

    def __init__(self, w: Optional[BraidWord] = None) -> None:
        self.w = w

    def guess(self, pk, challenge, oracles):
        if not isinstance(challenge, CiphertextA1):
            return oracles.rng.randrange(2)
        w = self.w if self.w is not None else BraidWord(pk.n, (1,))
        mauled = CiphertextA1(challenge.Y, compose(challenge.c, w))
        answer = oracles.decrypt(mauled)
        return self._match(oracles.scheme, compose(answer, inverse(w)), oracles.rng)


class MalleabilityAdversaryA2(Adversary):
    """Flips payload bits with δ and un-flips the oracle's answer.

    Against a3 the same flip lands in the AEAD blob and is rejected.
    """

    name = "malleability-a2"

    def choose_messages(self, pk, oracles):
        if oracles.scheme == "a2":
            self.messages = (Bits.zeros(oracles.out_bits),
                             Bits.from_bytes(b"\xff" * ((oracles.out_bits + 7) // 8), oracles.out_bits))
        else:
            self.messages = (bytes(A3_MESSAGE_BYTES), b"\xff" * A3_MESSAGE_BYTES)
        return self.messages

    def guess(self, pk, challenge, oracles):
        if isinstance(challenge, CiphertextA2):
            delta = Bits.from_bytes(b"\x80" + bytes(len(challenge.c.data) - 1), len(challenge.c))
            answer = oracles.decrypt(CiphertextA2(challenge.Y, challenge.c ^ delta))
            m = answer ^ delta
        elif isinstance(challenge, CiphertextA3):
            blob = bytes([challenge.blob[0] ^ 0x80]) + challenge.blob[1:]
            answer = oracles.decrypt(CiphertextA3(challenge.Y, challenge.nonce, blob))
            m = None if answer is None else bytes([answer[0] ^ 0x80]) + answer[1:]
        else:
            return oracles.rng.randrange(2)
        for bit, candidate in enumerate(self.messages):
            if m == candidate:
                return bit
        return oracles.rng.randrange(2)


ADVERSARIES: dict[str, Callable[[], Adversary]] = {
    "blind": BlindGuessAdversary,
    "sk-leak": SecretKeyAdversary,
    "replay": ReplayAdversary,
    "malleability-a1": MalleabilityAdversaryA1,
    "malleability-a2": MalleabilityAdversaryA2,
}


def malleability_adversary_a1() -> Adversary:
    return MalleabilityAdversaryA1()


def malleability_adversary_a2() -> Adversary:
    return MalleabilityAdversaryA2()


@dataclass
class GameResult:
    trials: int
    wins: int
    violations: int = 0
    beta_ones: int = 0
    scheme: str = ""
    mode: str = ""
    adversary: str = ""
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if not 0 <= self.wins <= self.trials:
            raise ValueError("wins must lie in [0, trials]")

    @property
    def win_rate(self) -> float:
        return self.wins / self.trials if self.trials else 0.5

    @property
    def advantage_estimate(self) -> float:
        return abs(self.win_rate - 0.5)

    @property
    def confidence_halfwidth(self) -> float:
        """95% normal-approximation half-width of the win-rate estimate."""
        if not self.trials:
            return 0.5
        p = self.win_rate
        return 1.96 * math.sqrt(p * (1 - p) / self.trials)

    def summary(self) -> dict[str, Any]:
        out = asdict(self)
        out.update(win_rate=self.win_rate, advantage_estimate=self.advantage_estimate,
                   confidence_halfwidth=self.confidence_halfwidth)
        return out

    def report(self) -> str:
        return "\n".join([
            f"game {self.scheme}/{self.mode} adversary={self.adversary} seed={self.seed}",
            f"trials {self.trials}",
            f"wins {self.wins}",
            f"violations {self.violations}",
            f"advantage {self.advantage_estimate:.4f} +/- {self.confidence_halfwidth:.4f}",
        ])

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)


def _decryption_oracle(scheme: str, sk: SecretKey, target: Optional[Ciphertext]) -> Callable[[Ciphertext], Any]:
    def oracle(ct: Ciphertext) -> Any:
        if target is not None and ct == target:
            raise TargetQueried("the target ciphertext may not be queried")
        try:
            return decrypt(sk, ct)
        except DecryptionError:
            return None
    return oracle


def _check_messages(scheme: str, m0: Any, m1: Any, out_bits: int, n: int) -> None:
    kinds = {"a1": BraidWord, "a2": Bits, "a3": bytes}
    if not (isinstance(m0, kinds[scheme]) and isinstance(m1, kinds[scheme])):
        raise ProtocolViolation(f"messages for {scheme} must be {kinds[scheme].__name__}")
    if message_length(m0) != message_length(m1):
        raise ProtocolViolation("messages differ in length")
    if scheme == "a2" and len(m0) != out_bits:
        raise ProtocolViolation(f"a2 messages must be {out_bits} bits")
    if scheme == "a1" and (m0.n != n or m1.n != n):
        raise ProtocolViolation("a1 messages must live in B_n")


def play_trial(scheme: str, adversary: Adversary, mode: str, rng: random.Random, *,
               params: SplitParams = DEFAULT_PARAMS, word_length: int = DEFAULT_WORD_LENGTH,
               out_bits: int = DEFAULT_OUT_BITS, leak_secret_key: bool = False) -> tuple[bool, bool, int]:
    """One game instance; returns (won, violated, beta)."""
    pk, sk = keygen(params, word_length, rng, g_length=word_length)
    enc_kw: dict[str, Any] = {"y_length": word_length}
    if scheme == "a2":
        enc_kw["out_bits"] = out_bits
    adversary_rng = random.Random(rng.getrandbits(64))
    oracles = Oracles(scheme, params, out_bits, adversary_rng, word_length=word_length,
                      secret_key=sk if leak_secret_key else None)
    if mode in ("cca", "cca2"):
        oracles.decrypt = _decryption_oracle(scheme, sk, None)
    beta = rng.randrange(2)
    try:
        m0, m1 = adversary.choose_messages(pk, oracles)
        _check_messages(scheme, m0, m1, out_bits, params.n)
        target = encrypt(scheme, pk, (m0, m1)[beta], rng, **enc_kw)
        oracles.decrypt = _decryption_oracle(scheme, sk, target) if mode == "cca2" else _closed_oracle
        guess = adversary.guess(pk, target, oracles)
    except ProtocolViolation as exc:
        log.info("trial lost to protocol violation: %s", exc)
        return False, True, beta
    return guess == beta, False, beta


def run_game(scheme: str, adversary: Adversary, mode: str, trials: int, rng: random.Random, *,
             params: SplitParams = DEFAULT_PARAMS, word_length: int = DEFAULT_WORD_LENGTH,
             out_bits: int = DEFAULT_OUT_BITS, leak_secret_key: bool = False,
             seed: Optional[int] = None) -> GameResult:
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    result = GameResult(0, 0, scheme=scheme, mode=mode, adversary=adversary.name, seed=seed)
    for _ in range(trials):
        trial_rng = random.Random(rng.getrandbits(64))
        won, violated, beta = play_trial(scheme, adversary, mode, trial_rng, params=params,
                                         word_length=word_length, out_bits=out_bits,
                                         leak_secret_key=leak_secret_key)
        result.trials += 1
        result.wins += won
        result.violations += violated
        result.beta_ones += beta
    return result


# -- DCS distinguisher built from an a1 adversary ------------------------------

def reduction_dcs_from_cpa(adversary: Adversary, tup: DcsTuple, params: SplitParams,
                           rng: random.Random, *, leak_secret_key: bool = False) -> int:
    """Treat ``(g1, g2)`` as a public key and ``(g3, g4·M_β)`` as the target.

    Returns 1 iff the adversary recovers β.  With ``leak_secret_key`` the
    adversary is handed ``x`` from the tuple's witnesses (test hook).
    """
    pk = PublicKey(params, tup.g1, tup.g2)
    sk = SecretKey(params, tup.x, tup.g1) if leak_secret_key else None
    oracles = Oracles("a1", params, DEFAULT_OUT_BITS, random.Random(rng.getrandbits(64)), secret_key=sk)
    try:
        m0, m1 = adversary.choose_messages(pk, oracles)
        _check_messages("a1", m0, m1, DEFAULT_OUT_BITS, params.n)
    except ProtocolViolation:
        return 0
    beta = rng.randrange(2)
    target = CiphertextA1(tup.g3, compose(tup.g4, (m0, m1)[beta]))
    try:
        guess = adversary.guess(pk, target, oracles)
    except ProtocolViolation:
        return 0
    return int(guess == beta)


def dcs_distinguisher_rates(adversary: Adversary, params: SplitParams, runs: int, rng: random.Random, *,
                            lengths: SampleLengths = SampleLengths(),
                            leak_secret_key: bool = False) -> tuple[float, float]:
    """Output-1 rates of the DCS distinguisher on D and on R tuples."""
    rates = []
    for real in (True, False):
        ones = 0
        for _ in range(runs):
            tup = dcs_sample(params, real, lengths, rng)
            ones += reduction_dcs_from_cpa(adversary, tup, params, rng, leak_secret_key=leak_secret_key)
        rates.append(ones / runs)
    return rates[0], rates[1]


# -- random-oracle bookkeeping ------------------------------------------------

def element_key(z: BraidWord) -> bytes:
    """Canonical bytes of the element; equal elements share a key."""
    return serialize_canonical(left_canonical_form(z))


class ProgrammableOracle:
    """Lazily sampled random function on group elements with a query log."""

    def __init__(self, out_bits: int, rng: random.Random) -> None:
        self.out_bits = out_bits
        self.rng = rng
        self.entries: dict[bytes, Bits] = {}
        self.words: dict[bytes, BraidWord] = {}
        self.log: list[bytes] = []

    def __contains__(self, z: BraidWord) -> bool:
        return element_key(z) in self.entries

    def program(self, z: BraidWord, value: Bits) -> None:
        key = element_key(z)
        if key in self.entries and self.entries[key] != value:
            raise ValueError("oracle point already fixed to a different value")
        self.entries[key] = value
        self.words.setdefault(key, z)

    def __call__(self, z: BraidWord) -> Bits:
        key = element_key(z)
        self.log.append(key)
        if key not in self.entries:
            self.entries[key] = Bits.random(self.out_bits, self.rng)
            self.words[key] = z
        return self.entries[key]


# -- CCS solver from an a2 CPA adversary -----------------------------------

@dataclass(frozen=True)
class CcsInstance:
    """Public ``(g, X, ĉ1)``; ``x`` and ``y`` are harness-only witnesses."""

    g: BraidWord
    X: BraidWord
    c1: BraidWord
    x: Optional[BraidWord] = field(default=None, repr=False, compare=False)
    y: Optional[BraidWord] = field(default=None, repr=False, compare=False)

    @property
    def solution(self) -> BraidWord:
        if self.y is None:
            raise ValueError("instance carries no witness")
        return conjugate(self.y, self.X)


def ccs_instance(params: SplitParams, rng: random.Random, *,
                 lengths: SampleLengths = SampleLengths()) -> CcsInstance:
    g = random_word(params.n, lengths.g, rng)
    x = sample_left(params, lengths.x, rng)
    y = sample_right(params, lengths.y, rng)
    return CcsInstance(g, conjugate(x, g), conjugate(y, g), x=x, y=y)


def _block_conjugates(p: tuple[int, ...], lo: int, hi: int) -> set[tuple[int, ...]]:
    n = len(p)
    out = set()
    for block in itertools.permutations(range(lo, hi)):
        s = list(range(n))
        s[lo:hi] = block
        out.add(perm_compose(perm_compose(s, p), perm_inverse(s)))
    return out


class PublicShapeFilter:
    """Necessary conditions for ``Q = ŷXŷ⁻¹`` that use only ``(g, X, ĉ1)``.

    ``Q`` must have the exponent sum of g, and its strand permutation must be
    a left-block conjugate of that of ĉ1 and a right-block conjugate of
    that of X.
    """

    def __init__(self, inst: CcsInstance, params: SplitParams) -> None:
        self.n = params.n
        self.exponent = exponent_sum(inst.g)
        left = _block_conjugates(braid_permutation(inst.c1), 0, params.l)
        right = _block_conjugates(braid_permutation(inst.X), params.l, params.n)
        self.perms = left & right

    def __call__(self, q: BraidWord) -> bool:
        return q.n == self.n and exponent_sum(q) == self.exponent and braid_permutation(q) in self.perms


class CcsFromCpa:
    """Simulated a2 challenger that plants ĥ at the first plausible H query."""

    def __init__(self, adversary: Adversary, inst: CcsInstance, params: SplitParams,
                 rng: random.Random, out_bits: int = DEFAULT_OUT_BITS) -> None:
        self.adversary = adversary
        self.inst = inst
        self.params = params
        self.rng = rng
        self.out_bits = out_bits
        self.h_hat = Bits.random(out_bits, rng)
        self.oracle = ProgrammableOracle(out_bits, rng)
        self.plausible = PublicShapeFilter(inst, params)
        self.recorded: Optional[BraidWord] = None
        self.beta: Optional[int] = None
        self.guess: Optional[int] = None

    def hash(self, z: BraidWord) -> Bits:
        if z not in self.oracle and self.recorded is None and self.plausible(z):
            self.oracle.program(z, self.h_hat)
            self.recorded = z
        return self.oracle(z)

    def run(self) -> Optional[BraidWord]:
        pk = PublicKey(self.params, self.inst.g, self.inst.X)
        oracles = Oracles("a2", self.params, self.out_bits, random.Random(self.rng.getrandbits(64)),
                          hash=self.hash)
        try:
            m0, m1 = self.adversary.choose_messages(pk, oracles)
            _check_messages("a2", m0, m1, self.out_bits, self.params.n)
            self.beta = self.rng.randrange(2)
            target = CiphertextA2(self.inst.c1, self.h_hat ^ (m0, m1)[self.beta])
            self.guess = self.adversary.guess(pk, target, oracles)
        except ProtocolViolation as exc:
            log.info("simulation aborted: %s", exc)
        return self.recorded


def reduction_ccs_from_cpa(adversary: Adversary, inst: CcsInstance, params: SplitParams,
                           rng: random.Random, *, out_bits: int = DEFAULT_OUT_BITS) -> Optional[BraidWord]:
    return CcsFromCpa(adversary, inst, params, rng, out_bits).run()


# -- CCS solver from an a3 CCA2 adversary ----------------------------------

@dataclass
class HListEntry:
    y: Optional[BraidWord]
    c1: BraidWord
    h: Bits
    key: bytes = field(repr=False)


class CcsFromCca2:
    """Simulated a3 challenger with an H-list of ``(y, c1, h)`` entries.

    H is queried at an ephemeral ``y``; the list is indexed by the element
    ``c1 = y g y⁻¹``.  Decryption queries on an unseen ``c̄1`` get a fresh key
    recorded as ``(None, c̄1, h)``, later completed by a matching H query.
    """

    def __init__(self, adversary: Adversary, inst: CcsInstance, params: SplitParams,
                 rng: random.Random) -> None:
        self.adversary = adversary
        self.inst = inst
        self.params = params
        self.rng = rng
        self.h_hat = Bits.random(KEY_BITS, rng)
        self.h_list: list[HListEntry] = [HListEntry(None, inst.c1, self.h_hat, element_key(inst.c1))]
        self.target: Optional[CiphertextA3] = None
        self.beta: Optional[int] = None
        self.guess: Optional[int] = None

    def _find(self, key: bytes) -> Optional[HListEntry]:
        for entry in self.h_list:
            if entry.key == key:
                return entry
        return None

    def hash(self, y: BraidWord) -> Bits:
        c1 = conjugate(y, self.inst.g)
        key = element_key(c1)
        entry = self._find(key)
        if entry is None:
            entry = HListEntry(y, c1, Bits.random(KEY_BITS, self.rng), key)
            self.h_list.append(entry)
        elif entry.y is None:
            entry.y = y
        return entry.h

    def decrypt(self, ct: Ciphertext) -> Optional[bytes]:
        if not isinstance(ct, CiphertextA3):
            raise ProtocolViolation("a3 oracle only accepts a3 ciphertexts")
        if self.target is not None and ct == self.target:
            raise TargetQueried("the target ciphertext may not be queried")
        key = element_key(ct.Y)
        entry = self._find(key)
        if entry is None:
            entry = HListEntry(None, ct.Y, Bits.random(KEY_BITS, self.rng), key)
            self.h_list.append(entry)
        try:
            return aead_open(entry.h.data, ct.nonce, ct.blob)
        except DecryptionError:
            return None

    def run(self) -> Optional[BraidWord]:
        pk = PublicKey(self.params, self.inst.g, self.inst.X)
        oracles = Oracles("a3", self.params, KEY_BITS, random.Random(self.rng.getrandbits(64)),
                          hash=self.hash, decrypt=self.decrypt)
        try:
            m0, m1 = self.adversary.choose_messages(pk, oracles)
            _check_messages("a3", m0, m1, KEY_BITS, self.params.n)
            self.beta = self.rng.randrange(2)
            nonce = self.rng.randbytes(NONCE_BYTES)
            self.target = CiphertextA3(self.inst.c1, nonce,
                                       aead_seal(self.h_hat.data, nonce, (m0, m1)[self.beta]))
            self.guess = self.adversary.guess(pk, self.target, oracles)
        except ProtocolViolation as exc:
            log.info("simulation aborted: %s", exc)
        return self.extract()

    def extract(self) -> Optional[BraidWord]:
        hat_key = element_key(self.inst.c1)
        for entry in self.h_list:
            if entry.key == hat_key and entry.h == self.h_hat and entry.y is not None:
                return entry.y
        return None


def reduction_ccs_from_cca2(adversary: Adversary, inst: CcsInstance, params: SplitParams,
                            rng: random.Random) -> Optional[BraidWord]:
    return CcsFromCca2(adversary, inst, params, rng).run()


# -- test-hook adversaries for the extractors --------------------------------

class DiligentCpaAdversary(Adversary):
    """Knows ŷ (hook), queries a decoy and then H(ŷXŷ⁻¹), and unmasks the target."""

    name = "diligent-cpa"

    def __init__(self, y_hat: BraidWord) -> None:
        self.y_hat = y_hat

    def choose_messages(self, pk, oracles):
        z = conjugate(self.y_hat, pk.X)
        oracles.hash(compose(z, BraidWord(pk.n, (1,))))
        self.mask = oracles.hash(z)
        self.messages = (Bits.zeros(oracles.out_bits), Bits.random(oracles.out_bits, oracles.rng))
        return self.messages

    def guess(self, pk, challenge, oracles):
        m = challenge.c ^ self.mask
        return 0 if m == self.messages[0] else 1


class DiligentCca2Adversary(Adversary):
    """Knows ŷ (hook), queries H at ŷ and opens the target with the answer."""

    name = "diligent-cca2"

    def __init__(self, y_hat: BraidWord) -> None:
        self.y_hat = y_hat

    def choose_messages(self, pk, oracles):
        self.key = oracles.hash(self.y_hat)
        self.messages = (bytes(A3_MESSAGE_BYTES), oracles.rng.randbytes(A3_MESSAGE_BYTES))
        return self.messages

    def guess(self, pk, challenge, oracles):
        try:
            m = aead_open(self.key.data, challenge.nonce, challenge.blob)
        except DecryptionError:
            return oracles.rng.randrange(2)
        return 0 if m == self.messages[0] else 1
