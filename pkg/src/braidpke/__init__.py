"""Braid-group public-key encryption with an executable security-game harness."""

from .braid import (
    BraidError,
    BraidWord,
    CanonicalForm,
    compose,
    deserialize_word,
    equals,
    free_reduce,
    fundamental_braid,
    inverse,
    left_canonical_form,
    random_word,
    serialize_canonical,
    serialize_word,
)
from .codec import braid_to_bytes, bytes_to_braid
from .schemes import (
    Bits,
    DecryptionError,
    PublicKey,
    SecretKey,
    dec_a1,
    dec_a2,
    dec_a3,
    enc_a1,
    enc_a2,
    enc_a3,
    hash_braid,
    DEFAULT_PARAMS,
    keygen,
)
from .subgroups import SplitParams, conjugate, dcs_sample, sample_left, sample_right

__version__ = "0.1.0"
