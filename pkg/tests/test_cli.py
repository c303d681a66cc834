import json
import os
import random

import pytest

from braidpke.cli import EXIT_AUTH, EXIT_FORMAT, main, pad_blocks, unpad


@pytest.fixture
def keydir(tmp_path):
    def make(alg, seed=1):
        prefix = tmp_path / f"key-{alg}"
        assert main(["keygen", "--alg", alg, "--seed", str(seed), "--out", str(prefix)]) == 0
        return f"{prefix}.pub", f"{prefix}.sec"
    return make


def _round_trip(tmp_path, keydir, alg, data, *extra):
    pub, sec = keydir(alg)
    src, ct, out = tmp_path / "in.bin", tmp_path / "ct.txt", tmp_path / "out.bin"
    src.write_bytes(data)
    assert main(["encrypt", "--key", pub, "--in", str(src), "--out", str(ct), "--seed", "5", *extra]) == 0
    assert main(["decrypt", "--key", sec, "--in", str(ct), "--out", str(out), *extra]) == 0
    return out.read_bytes(), ct


@pytest.mark.parametrize("alg", ["a1", "a2", "a3"])
@pytest.mark.parametrize("size", [0, 1, 31, 32, 33, 1024])
def test_file_round_trip(tmp_path, keydir, alg, size):
    data = random.Random(size).randbytes(size)
    assert _round_trip(tmp_path, keydir, alg, data)[0] == data


@pytest.mark.slow
@pytest.mark.parametrize("alg", ["a1", "a2", "a3"])
def test_one_mebibyte_round_trip(tmp_path, keydir, alg):
    data = os.urandom(1 << 20)
    assert _round_trip(tmp_path, keydir, alg, data)[0] == data


def test_a2_single_block(tmp_path, keydir):
    data = bytes(range(32))
    out, ct = _round_trip(tmp_path, keydir, "a2", data, "--single-block")
    assert out == data
    assert ct.read_text().count("ct v1") == 1
    pub, _ = keydir("a2")
    (tmp_path / "short").write_bytes(b"abc")
    assert main(["encrypt", "--key", pub, "--in", str(tmp_path / "short"), "--out",
                 str(tmp_path / "x"), "--single-block"]) == EXIT_FORMAT


def test_padding():
    assert unpad(b"".join(pad_blocks(b"abc", 4))) == b"abc"
    assert pad_blocks(b"abcd", 4) == [b"abcd", b"\x80\x00\x00\x00"]
    with pytest.raises(ValueError):
        unpad(b"abc\x00")


def test_tampered_a3_file_fails_authentication(tmp_path, keydir, capsys):
    pub, sec = keydir("a3")
    src, ct, out = tmp_path / "in", tmp_path / "ct", tmp_path / "out"
    src.write_bytes(os.urandom(1024))
    assert main(["encrypt", "--key", pub, "--in", str(src), "--out", str(ct)]) == 0
    lines = ct.read_text().splitlines()
    idx = next(i for i, ln in enumerate(lines) if ln.startswith("blob="))
    blob = bytearray.fromhex(lines[idx][5:])
    blob[100] ^= 0x04
    lines[idx] = "blob=" + blob.hex()
    ct.write_text("\n".join(lines) + "\n")
    assert main(["decrypt", "--key", sec, "--in", str(ct), "--out", str(out)]) == EXIT_AUTH
    assert "authentication failure" in capsys.readouterr().err
    assert not out.exists()


def test_error_statuses(tmp_path, keydir):
    pub, sec = keydir("a1")
    bad = tmp_path / "bad"
    bad.write_text("not a key\n")
    src = tmp_path / "in"
    src.write_bytes(b"x")
    assert main(["encrypt", "--key", str(bad), "--in", str(src), "--out", str(tmp_path / "o")]) == EXIT_FORMAT
    assert main(["decrypt", "--key", sec, "--in", str(bad), "--out", str(tmp_path / "o")]) == EXIT_FORMAT
    assert main(["encrypt", "--key", pub, "--alg", "a3", "--in", str(src), "--out", str(tmp_path / "o")]) == EXIT_FORMAT
    assert main(["keygen", "--alg", "a7", "--out", "x"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["encrypt", "--key", str(tmp_path / "missing"), "--in", str(src), "--out", "o"]) == 5


def test_mismatched_ciphertext_algorithm(tmp_path, keydir):
    pub2, _ = keydir("a2")
    _, sec3 = keydir("a3")
    src, ct = tmp_path / "in", tmp_path / "ct"
    src.write_bytes(b"hello")
    assert main(["encrypt", "--key", pub2, "--in", str(src), "--out", str(ct)]) == 0
    assert main(["decrypt", "--key", sec3, "--in", str(ct), "--out", str(tmp_path / "o")]) == EXIT_FORMAT


def test_keygen_deterministic(tmp_path):
    for name in ("a", "b"):
        assert main(["keygen", "--alg", "a2", "--seed", "9", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.sec").read_text() == (tmp_path / "b.sec").read_text()


def test_encrypt_deterministic(tmp_path, keydir):
    pub, _ = keydir("a3")
    src = tmp_path / "in"
    src.write_bytes(b"same input")
    outs = []
    for name in ("c1", "c2"):
        assert main(["encrypt", "--key", pub, "--in", str(src), "--out", str(tmp_path / name), "--seed", "3"]) == 0
        outs.append((tmp_path / name).read_text())
    assert outs[0] == outs[1]


def test_experiment_ind_malleability(capsys):
    assert main(["experiment", "ind", "--scheme", "a2", "--mode", "cca2", "--adversary",
                 "malleability-a2", "--trials", "200", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "wins 200" in out and "trials 200" in out


def test_experiment_ind_json_is_deterministic(capsys):
    argv = ["experiment", "ind", "--scheme", "a1", "--trials", "100", "--seed", "2", "--json"]
    main(argv)
    first = json.loads(capsys.readouterr().out)
    main(argv)
    assert json.loads(capsys.readouterr().out) == first
    assert first["seed"] == 2 and first["trials"] == 100


def test_demo_malleability(capsys):
    assert main(["demo", "malleability", "--trials", "50", "--seed", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "malleability-a1 vs a1: wins 50/50 advantage 0.5000"
    assert out[1] == "malleability-a2 vs a2: wins 50/50 advantage 0.5000"
    assert out[2].startswith("malleability-a2 vs a3:")


def test_experiment_dcs(capsys):
    assert main(["experiment", "dcs", "--runs", "100", "--seed", "4", "--json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["rate_D"] == 1.0
    assert summary["gap"] > 0.3
