"""The three braid encryption schemes and their key/ciphertext files.

All schemes share one key shape: public ``(g, X = x g x⁻¹)`` and secret ``x``
from the left subgroup.  Encryption picks ``y`` from the right subgroup and
sends ``Y = y g y⁻¹``; both sides reach the same element ``Z = y X y⁻¹ =
x Y x⁻¹`` because x and y commute.

* ``a1``: ElGamal-style, ``c = Z m`` for a braid message ``m``.
* ``a2``: hashed one-time pad, ``c = H(Z) xor m`` for an ``out_bits`` string.
* ``a3``: KEM-DEM, ``k = H(Z)`` keys an AEAD over arbitrary bytes.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from typing import Optional, Union

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM, ChaCha20Poly1305

from .braid import (
    BraidError,
    BraidWord,
    compose,
    deserialize_word,
    inverse,
    left_canonical_form,
    normalize,
    random_word,
    serialize_canonical,
    serialize_word,
)
from .subgroups import SplitParams, conjugate, sample_left, sample_right

DEFAULT_PARAMS = SplitParams(5, 5)
DEFAULT_WORD_LENGTH = 32
DEFAULT_OUT_BITS = 256
NONCE_BYTES = 12
KEY_BITS = 256

ALGORITHMS = ("a1", "a2", "a3")


class DecryptionError(Exception):
    """Authentication failed; no plaintext is released."""


class FormatError(ValueError):
    """A key or ciphertext file could not be parsed."""


@dataclass(frozen=True)
class Bits:
    """A bit string of ``nbits`` bits packed MSB-first; padding bits are zero."""

    data: bytes
    nbits: int

    def __post_init__(self) -> None:
        if self.nbits < 0 or len(self.data) != (self.nbits + 7) // 8:
            raise ValueError("byte length does not match bit length")
        pad = (-self.nbits) % 8
        if pad and self.data[-1] & ((1 << pad) - 1):
            raise ValueError("padding bits must be zero")

    @classmethod
    def from_bytes(cls, data: bytes, nbits: Optional[int] = None) -> Bits:
        nbits = 8 * len(data) if nbits is None else nbits
        data = bytes(data[: (nbits + 7) // 8])
        pad = (-nbits) % 8
        if pad and data:
            data = data[:-1] + bytes([data[-1] & (0xFF << pad) & 0xFF])
        return cls(data, nbits)

    @classmethod
    def zeros(cls, nbits: int) -> Bits:
        return cls(bytes((nbits + 7) // 8), nbits)

    @classmethod
    def random(cls, nbits: int, rng: random.Random) -> Bits:
        return cls.from_bytes(rng.randbytes((nbits + 7) // 8), nbits)

    @classmethod
    def from_hex(cls, text: str, nbits: int) -> Bits:
        return cls(bytes.fromhex(text), nbits)

    def hex(self) -> str:
        return self.data.hex()

    def __len__(self) -> int:
        return self.nbits

    def __xor__(self, other: Bits) -> Bits:
        if self.nbits != other.nbits:
            raise ValueError(f"bit length mismatch: {self.nbits} vs {other.nbits}")
        return Bits(bytes(a ^ b for a, b in zip(self.data, other.data)), self.nbits)

    def bit(self, i: int) -> int:
        return (self.data[i // 8] >> (7 - i % 8)) & 1


@dataclass(frozen=True)
class PublicKey:
    params: SplitParams
    g: BraidWord
    X: BraidWord

    @property
    def n(self) -> int:
        return self.params.n


@dataclass(frozen=True)
class SecretKey:
    params: SplitParams
    x: BraidWord
    g: BraidWord


@dataclass(frozen=True)
class CiphertextA1:
    Y: BraidWord
    c: BraidWord


@dataclass(frozen=True)
class CiphertextA2:
    Y: BraidWord
    c: Bits


@dataclass(frozen=True)
class CiphertextA3:
    Y: BraidWord
    nonce: bytes
    blob: bytes


Ciphertext = Union[CiphertextA1, CiphertextA2, CiphertextA3]


def keygen(p: SplitParams, secret_length: int, rng: random.Random, *,
           g_length: int = DEFAULT_WORD_LENGTH,
           x: Optional[BraidWord] = None) -> tuple[PublicKey, SecretKey]:
    """Sample g from B_n and x from the left subgroup; ``x`` overrides (test hook)."""
    if secret_length < 1:
        raise ValueError("secret_length must be >= 1")
    g = random_word(p.n, g_length, rng)
    x = sample_left(p, secret_length, rng) if x is None else x
    if not p.is_left(x):
        raise ValueError("secret conjugator must lie in the left subgroup")
    return PublicKey(p, g, conjugate(x, g)), SecretKey(p, x, g)


def _ephemeral(pk: PublicKey, rng: random.Random, y_length: int,
               y: Optional[BraidWord]) -> tuple[BraidWord, BraidWord]:
    y = sample_right(pk.params, y_length, rng) if y is None else y
    if not pk.params.is_right(y):
        raise ValueError("ephemeral conjugator must lie in the right subgroup")
    return conjugate(y, pk.g), conjugate(y, pk.X)


def shared_element(sk: SecretKey, Y: BraidWord) -> BraidWord:
    """``Z = x Y x⁻¹`` as computed by the key holder."""
    if Y.n != sk.params.n:
        raise BraidError(f"strand-count mismatch: B_{Y.n} vs B_{sk.params.n}")
    return conjugate(sk.x, Y)


# -- hashing ---------------------------------------------------------------

_XOFS = {"shake256": hashlib.shake_256, "shake128": hashlib.shake_128}


def hash_braid(z: BraidWord, out_bits: int, *, xof: str = "shake256") -> Bits:
    """XOF over the canonical serialization, truncated to ``out_bits`` bits."""
    if out_bits < 1:
        raise ValueError("out_bits must be >= 1")
    digest = _XOFS[xof](serialize_canonical(left_canonical_form(z))).digest((out_bits + 7) // 8)
    return Bits.from_bytes(digest, out_bits)


# -- a1: braid-masked message ----------------------------------------------

def enc_a1(pk: PublicKey, m: BraidWord, rng: random.Random, *,
           y_length: int = DEFAULT_WORD_LENGTH, y: Optional[BraidWord] = None) -> CiphertextA1:
    if m.n != pk.n:
        raise BraidError(f"strand-count mismatch: B_{m.n} vs B_{pk.n}")
    Y, Z = _ephemeral(pk, rng, y_length, y)
    return CiphertextA1(Y, compose(Z, m))


def dec_a1(sk: SecretKey, ct: CiphertextA1) -> BraidWord:
    """``Z⁻¹ c``, returned as the canonical-form word."""
    Z = shared_element(sk, ct.Y)
    return normalize(compose(inverse(Z), ct.c))


# -- a2: hashed XOR mask ---------------------------------------------------

def enc_a2(pk: PublicKey, m: Bits, rng: random.Random, *,
           out_bits: int = DEFAULT_OUT_BITS, y_length: int = DEFAULT_WORD_LENGTH,
           y: Optional[BraidWord] = None, xof: str = "shake256") -> CiphertextA2:
    if len(m) != out_bits:
        raise ValueError(f"message must be {out_bits} bits, got {len(m)}")
    Y, Z = _ephemeral(pk, rng, y_length, y)
    return CiphertextA2(Y, hash_braid(Z, out_bits, xof=xof) ^ m)


def dec_a2(sk: SecretKey, ct: CiphertextA2, *, xof: str = "shake256") -> Bits:
    Z = shared_element(sk, ct.Y)
    return hash_braid(Z, len(ct.c), xof=xof) ^ ct.c


# -- a3: hashed key with an authenticated cipher ---------------------------

_AEADS = {"chacha20poly1305": ChaCha20Poly1305, "aes256gcm": AESGCM}


def aead_seal(key: bytes, nonce: bytes, plaintext: bytes, *, aead: str = "chacha20poly1305") -> bytes:
    return _AEADS[aead](key).encrypt(nonce, plaintext, None)


def aead_open(key: bytes, nonce: bytes, blob: bytes, *, aead: str = "chacha20poly1305") -> bytes:
    if len(nonce) != NONCE_BYTES:
        raise DecryptionError("authentication failure")
    try:
        return _AEADS[aead](key).decrypt(nonce, blob, None)
    except InvalidTag:
        raise DecryptionError("authentication failure") from None


def enc_a3(pk: PublicKey, m: bytes, rng: random.Random, *,
           y_length: int = DEFAULT_WORD_LENGTH, y: Optional[BraidWord] = None,
           xof: str = "shake256", aead: str = "chacha20poly1305") -> CiphertextA3:
    Y, Z = _ephemeral(pk, rng, y_length, y)
    key = hash_braid(Z, KEY_BITS, xof=xof).data
    nonce = rng.randbytes(NONCE_BYTES)
    return CiphertextA3(Y, nonce, aead_seal(key, nonce, bytes(m), aead=aead))


def dec_a3(sk: SecretKey, ct: CiphertextA3, *, xof: str = "shake256",
           aead: str = "chacha20poly1305") -> bytes:
    key = hash_braid(shared_element(sk, ct.Y), KEY_BITS, xof=xof).data
    return aead_open(key, ct.nonce, ct.blob, aead=aead)


def encrypt(alg: str, pk: PublicKey, m, rng: random.Random, **kw) -> Ciphertext:
    return {"a1": enc_a1, "a2": enc_a2, "a3": enc_a3}[alg](pk, m, rng, **kw)


def decrypt(sk: SecretKey, ct: Ciphertext, **kw):
    if isinstance(ct, CiphertextA1):
        return dec_a1(sk, ct)
    if isinstance(ct, CiphertextA2):
        return dec_a2(sk, ct, **kw)
    return dec_a3(sk, ct, **kw)


# -- files -----------------------------------------------------------------

def _parse_fields(text: str, header: str) -> dict[str, str]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != header:
        raise FormatError(f"expected header {header!r}")
    fields: dict[str, str] = {}
    for ln in lines[1:]:
        key, sep, value = ln.partition("=")
        if not sep or key in fields:
            raise FormatError(f"bad line {ln!r}")
        fields[key] = value
    return fields


def _word_field(fields: dict[str, str], key: str) -> BraidWord:
    try:
        return deserialize_word(fields[key])
    except KeyError:
        raise FormatError(f"missing field {key!r}") from None
    except BraidError as exc:
        raise FormatError(f"field {key!r}: {exc}") from None


def _int_field(fields: dict[str, str], key: str) -> int:
    try:
        return int(fields[key])
    except (KeyError, ValueError):
        raise FormatError(f"missing or bad integer field {key!r}") from None


def _alg_field(fields: dict[str, str]) -> str:
    alg = fields.get("alg")
    if alg not in ALGORITHMS:
        raise FormatError(f"unknown algorithm {alg!r}")
    return alg


def dump_public_key(pk: PublicKey, alg: str) -> str:
    return "\n".join([
        "braidpke v1", f"alg={alg}", f"l={pk.params.l}", f"r={pk.params.r}",
        f"g={serialize_word(pk.g)}", f"X={serialize_word(pk.X)}",
    ]) + "\n"


def dump_secret_key(pk: PublicKey, sk: SecretKey, alg: str) -> str:
    return dump_public_key(pk, alg) + f"x={serialize_word(sk.x)}\n"


def _load_key_fields(text: str) -> tuple[str, SplitParams, dict[str, str]]:
    fields = _parse_fields(text, "braidpke v1")
    alg = _alg_field(fields)
    try:
        params = SplitParams(_int_field(fields, "l"), _int_field(fields, "r"))
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    return alg, params, fields


def load_public_key(text: str) -> tuple[str, PublicKey]:
    alg, params, fields = _load_key_fields(text)
    g, X = _word_field(fields, "g"), _word_field(fields, "X")
    if g.n != params.n or X.n != params.n:
        raise FormatError("key words do not live in B_{l+r}")
    return alg, PublicKey(params, g, X)


def load_secret_key(text: str) -> tuple[str, PublicKey, SecretKey]:
    alg, pk = load_public_key(text)
    x = _word_field(_parse_fields(text, "braidpke v1"), "x")
    if not pk.params.is_left(x):
        raise FormatError("secret conjugator is not in the left subgroup")
    return alg, pk, SecretKey(pk.params, x, pk.g)


def dump_ciphertext(ct: Ciphertext) -> str:
    lines = ["ct v1"]
    if isinstance(ct, CiphertextA1):
        lines += ["alg=a1", f"Y={serialize_word(ct.Y)}", f"c={serialize_word(ct.c)}"]
    elif isinstance(ct, CiphertextA2):
        lines += ["alg=a2", f"Y={serialize_word(ct.Y)}", f"bits={ct.c.nbits}", f"c={ct.c.hex()}"]
    else:
        lines += ["alg=a3", f"Y={serialize_word(ct.Y)}", f"nonce={ct.nonce.hex()}", f"blob={ct.blob.hex()}"]
    return "\n".join(lines) + "\n"


def load_ciphertext(text: str) -> Ciphertext:
    """Parse one ``ct v1`` record."""
    fields = _parse_fields(text, "ct v1")
    alg = _alg_field(fields)
    Y = _word_field(fields, "Y")
    try:
        if alg == "a1":
            return CiphertextA1(Y, _word_field(fields, "c"))
        if alg == "a2":
            nbits = _int_field(fields, "bits") if "bits" in fields else 4 * len(fields["c"])
            return CiphertextA2(Y, Bits.from_hex(fields["c"], nbits))
        return CiphertextA3(Y, bytes.fromhex(fields["nonce"]), bytes.fromhex(fields["blob"]))
    except KeyError as exc:
        raise FormatError(f"missing field {exc}") from None
    except ValueError as exc:
        raise FormatError(str(exc)) from None
