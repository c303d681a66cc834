"""Command-line front end wrapping the encryption schemes and the security experiments."""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import games
from .braid import BraidError
from .codec import braid_to_bytes, bytes_to_braid
from .schemes import (
    ALGORITHMS,
    DEFAULT_OUT_BITS,
    DEFAULT_WORD_LENGTH,
    Bits,
    CiphertextA1,
    CiphertextA2,
    CiphertextA3,
    DecryptionError,
    FormatError,
    dec_a1,
    dec_a2,
    dec_a3,
    dump_ciphertext,
    dump_public_key,
    dump_secret_key,
    enc_a1,
    enc_a2,
    enc_a3,
    keygen,
    load_ciphertext,
    load_public_key,
    load_secret_key,
)
from .subgroups import SampleLengths, SplitParams

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_AUTH = 4
EXIT_IO = 5

A1_BLOCK_BYTES = 64


def make_rng(seed: Optional[int]) -> random.Random:
    return random.Random(seed) if seed is not None else random.SystemRandom()


def pad_blocks(data: bytes, block: int) -> list[bytes]:
    """0x80-then-zeros padding, always at least one byte of it."""
    padded = data + b"\x80" + bytes((-len(data) - 1) % block)
    return [padded[i:i + block] for i in range(0, len(padded), block)]


def unpad(data: bytes) -> bytes:
    stripped = data.rstrip(b"\x00")
    if not stripped.endswith(b"\x80"):
        raise FormatError("bad block padding")
    return stripped[:-1]


def split_records(text: str) -> list[str]:
    return [chunk for chunk in text.split("\n\n") if chunk.strip()]


def encrypt_bytes(alg: str, pk, data: bytes, rng: random.Random, *, word_length: int,
                  out_bits: int, single_block: bool = False) -> str:
    if alg == "a3":
        cts = [enc_a3(pk, data, rng, y_length=word_length)]
    elif alg == "a2":
        if out_bits % 8:
            raise FormatError("file mode needs l(k) to be a multiple of 8")
        block = out_bits // 8
        if single_block:
            if len(data) != block:
                raise FormatError(f"single-block mode needs exactly {block} bytes")
            blocks = [data]
        else:
            blocks = pad_blocks(data, block)
        cts = [enc_a2(pk, Bits.from_bytes(b), rng, out_bits=out_bits, y_length=word_length) for b in blocks]
    else:
        chunks = [data[i:i + A1_BLOCK_BYTES] for i in range(0, len(data), A1_BLOCK_BYTES)] or [b""]
        cts = [enc_a1(pk, bytes_to_braid(c, pk.n), rng, y_length=word_length) for c in chunks]
    return "\n".join(dump_ciphertext(ct) for ct in cts)


def decrypt_text(alg: str, sk, text: str, *, single_block: bool = False) -> bytes:
    cts = [load_ciphertext(rec) for rec in split_records(text)]
    if not cts:
        raise FormatError("no ciphertext records")
    kinds = {"a1": CiphertextA1, "a2": CiphertextA2, "a3": CiphertextA3}
    if any(not isinstance(ct, kinds[alg]) for ct in cts):
        raise FormatError(f"ciphertext does not match key algorithm {alg}")
    if alg == "a3":
        if len(cts) != 1:
            raise FormatError("a3 files hold exactly one record")
        return dec_a3(sk, cts[0])
    if alg == "a2":
        data = b"".join(dec_a2(sk, ct).data for ct in cts)
        return data if single_block else unpad(data)
    return b"".join(braid_to_bytes(dec_a1(sk, ct)) for ct in cts)


def _cmd_keygen(args) -> int:
    rng = make_rng(args.seed)
    params = SplitParams(args.l, args.r)
    pk, sk = keygen(params, args.secret_length, rng, g_length=args.word_length)
    out = Path(args.out)
    Path(f"{out}.pub").write_text(dump_public_key(pk, args.alg))
    Path(f"{out}.sec").write_text(dump_secret_key(pk, sk, args.alg))
    print(f"wrote {out}.pub and {out}.sec ({args.alg}, B_{params.n})")
    return EXIT_OK


def _cmd_encrypt(args) -> int:
    alg, pk = load_public_key(Path(args.key).read_text())
    if args.alg and args.alg != alg:
        raise FormatError(f"key is for {alg}, not {args.alg}")
    data = Path(args.input).read_bytes()
    text = encrypt_bytes(alg, pk, data, make_rng(args.seed), word_length=args.word_length,
                         out_bits=args.out_bits, single_block=args.single_block)
    Path(args.out).write_text(text)
    return EXIT_OK


def _cmd_decrypt(args) -> int:
    alg, _, sk = load_secret_key(Path(args.key).read_text())
    data = decrypt_text(alg, sk, Path(args.input).read_text(), single_block=args.single_block)
    Path(args.out).write_bytes(data)
    return EXIT_OK


def _cmd_demo(args) -> int:
    rng = make_rng(args.seed)
    params = SplitParams(args.l, args.r)
    runs = [
        ("a1", games.malleability_adversary_a1()),
        ("a2", games.malleability_adversary_a2()),
        ("a3", games.malleability_adversary_a2()),
    ]
    for scheme, adversary in runs:
        res = games.run_game(scheme, adversary, "cca2", args.trials, rng, params=params,
                             word_length=args.word_length, seed=args.seed)
        print(f"{adversary.name} vs {scheme}: wins {res.wins}/{res.trials} "
              f"advantage {res.advantage_estimate:.4f}")
    return EXIT_OK


def _cmd_experiment_ind(args) -> int:
    rng = make_rng(args.seed)
    adversary = games.ADVERSARIES[args.adversary]()
    res = games.run_game(args.scheme, adversary, args.mode, args.trials, rng,
                         params=SplitParams(args.l, args.r), word_length=args.word_length,
                         out_bits=args.out_bits, leak_secret_key=args.adversary == "sk-leak",
                         seed=args.seed)
    print(res.to_json() if args.json else res.report())
    return EXIT_OK


def _cmd_experiment_dcs(args) -> int:
    rng = make_rng(args.seed)
    adversary = games.ADVERSARIES[args.adversary]()
    lengths = SampleLengths(args.word_length, args.word_length, args.word_length, args.word_length)
    rate_d, rate_r = games.dcs_distinguisher_rates(
        adversary, SplitParams(args.l, args.r), args.runs, rng, lengths=lengths,
        leak_secret_key=args.adversary == "sk-leak")
    summary = {"runs": args.runs, "adversary": args.adversary, "seed": args.seed,
               "rate_D": rate_d, "rate_R": rate_r, "gap": rate_d - rate_r}
    if args.json:
        print(json.dumps(summary, sort_keys=True))
    else:
        print(f"dcs distinguisher adversary={args.adversary} runs={args.runs} seed={args.seed}")
        print(f"output-1 rate on D tuples {rate_d:.4f}")
        print(f"output-1 rate on R tuples {rate_r:.4f}")
        print(f"gap {rate_d - rate_r:.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--l", type=int, default=5)
    common.add_argument("--r", type=int, default=5)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--word-length", type=int, default=DEFAULT_WORD_LENGTH)
    common.add_argument("--out-bits", type=int, default=DEFAULT_OUT_BITS, help="l(k) for a2")

    parser = argparse.ArgumentParser(prog="braidpke", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", parents=[common])
    p.add_argument("--alg", choices=ALGORITHMS, default="a3")
    p.add_argument("--secret-length", type=int, default=DEFAULT_WORD_LENGTH)
    p.add_argument("--out", required=True, help="path prefix for .pub/.sec")
    p.set_defaults(func=_cmd_keygen)

    for name, func, key_help in (("encrypt", _cmd_encrypt, "public key file"),
                                 ("decrypt", _cmd_decrypt, "secret key file")):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--alg", choices=ALGORITHMS, default=None)
        p.add_argument("--key", required=True, help=key_help)
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--single-block", action="store_true",
                       help="a2 only: one unpadded l(k)-bit block")
        p.set_defaults(func=func)

    demo = sub.add_parser("demo").add_subparsers(dest="demo", required=True)
    p = demo.add_parser("malleability", parents=[common])
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=_cmd_demo)

    exp = sub.add_parser("experiment").add_subparsers(dest="experiment", required=True)
    p = exp.add_parser("ind", parents=[common])
    p.add_argument("--scheme", "--alg", dest="scheme", choices=games.SCHEMES, default="a3")
    p.add_argument("--mode", choices=games.MODES, default="cpa")
    p.add_argument("--adversary", choices=sorted(games.ADVERSARIES), default="blind")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_experiment_ind)

    p = exp.add_parser("dcs", parents=[common])
    p.add_argument("--adversary", choices=["blind", "sk-leak"], default="sk-leak")
    p.add_argument("--runs", "--trials", dest="runs", type=int, default=2000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_experiment_dcs)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except DecryptionError as exc:
        print(f"braidpke: authentication failure: {exc}", file=sys.stderr)
        return EXIT_AUTH
    except (FormatError, BraidError, ValueError) as exc:
        print(f"braidpke: malformed input: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OSError as exc:
        print(f"braidpke: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
