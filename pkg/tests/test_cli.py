import os
import re

import numpy as np
import pytest

from qgcipher.audio import parse_wav, pcm16_wav, write_wav
from qgcipher.cli import build_parser, main
from qgcipher.quasigroup import load_table

SMALL = ["--bits", "16384", "--param", "serial_m=8", "--param", "approximate_entropy_m=6"]


@pytest.fixture
def files(tmp_path):
    table, key = tmp_path / "t.qg", tmp_path / "k.key"
    assert main(["gen-table", "--gen-seed", "7", "--out", str(table)]) == 0
    assert main(["keygen", "--seed", "1", "--out", str(key)]) == 0
    return tmp_path, table, key


def run(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestGenTable:
    def test_default_order_256(self, tmp_path):
        assert main(["gen-table", "--gen-seed", "1", "--out", str(tmp_path / "t")]) == 0
        assert load_table(tmp_path / "t").order == 256

    def test_reproducible(self, tmp_path):
        for name in ("a", "b"):
            main(["gen-table", "--gen-seed", "0x2A", "--out", str(tmp_path / name)])
        assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()

    def test_random_seed_differs(self, tmp_path):
        for name in ("a", "b"):
            main(["gen-table", "--order", "16", "--out", str(tmp_path / name)])
        assert (tmp_path / "a").read_bytes() != (tmp_path / "b").read_bytes()

    def test_binary(self, tmp_path):
        main(["gen-table", "--gen-seed", "3", "--binary", "--out", str(tmp_path / "t")])
        assert (tmp_path / "t").read_bytes().startswith(b"qgb 256\n")

    def test_order_300(self, tmp_path, capsys):
        code, _, err = run(capsys, ["gen-table", "--order", "300", "--gen-seed", "1", "--out", str(tmp_path / "t")])
        assert code == 2 and "order" in err


class TestKeygen:
    def test_hex(self, tmp_path):
        main(["keygen", "--out", str(tmp_path / "k")])
        assert re.fullmatch(r"[0-9a-f]{64}\n", (tmp_path / "k").read_text())

    def test_seeded(self, tmp_path):
        for name in ("a", "b"):
            main(["keygen", "--seed", "5", "--out", str(tmp_path / name)])
        assert (tmp_path / "a").read_text() == (tmp_path / "b").read_text()

    def test_random_differs(self, tmp_path):
        for name in ("a", "b"):
            main(["keygen", "--out", str(tmp_path / name)])
        assert (tmp_path / "a").read_text() != (tmp_path / "b").read_text()

    def test_key_id(self, tmp_path):
        main(["keygen", "--seed", "5", "--key-id", "dev", "--out", str(tmp_path / "k")])
        assert (tmp_path / "k").read_text().startswith("# dev\n")


class TestCrypt:
    @pytest.mark.parametrize("size", [0, 1, 15, 16, 17, 1000])
    def test_cbc_roundtrip(self, files, capsys, size):
        d, table, key = files
        (d / "p").write_bytes(os.urandom(size))
        plain = (d / "p").read_bytes()
        assert main(["encrypt", "--table", str(table), "--key", str(key), "--in", str(d / "p"), "--out", str(d / "c")]) == 0
        assert (d / "c").read_bytes()[:4] == b"QGC1"
        assert main(["decrypt", "--table", str(table), "--key", str(key), "--in", str(d / "c"), "--out", str(d / "r")]) == 0
        assert (d / "r").read_bytes() == plain
        out, err = capsys.readouterr()
        assert key.read_text().strip().splitlines()[-1] not in out + err

    def test_inline_hex_key(self, files):
        d, table, key = files
        hexkey = key.read_text().strip()
        (d / "p").write_bytes(b"inline key")
        main(["encrypt", "--table", str(table), "--key", hexkey, "--in", str(d / "p"), "--out", str(d / "c")])
        main(["decrypt", "--table", str(table), "--key", str(key), "--in", str(d / "c"), "--out", str(d / "r")])
        assert (d / "r").read_bytes() == b"inline key"

    def test_iv_seed_reproducible(self, files):
        d, table, key = files
        (d / "p").write_bytes(b"abc" * 50)
        for name in ("c1", "c2"):
            main(["encrypt", "--table", str(table), "--key", str(key), "--iv-seed", "4",
                  "--in", str(d / "p"), "--out", str(d / name)])
        assert (d / "c1").read_bytes() == (d / "c2").read_bytes()

    def test_ecb_unaligned(self, files, capsys):
        d, table, key = files
        (d / "p").write_bytes(bytes(17))
        code, _, err = run(capsys, ["encrypt", "--mode", "ecb", "--table", str(table), "--key", str(key),
                                    "--in", str(d / "p"), "--out", str(d / "c")])
        assert code == 2 and "CBC" in err

    def test_ecb_aligned_roundtrip(self, files):
        d, table, key = files
        (d / "p").write_bytes(bytes(64))
        base = ["--mode", "ecb", "--table", str(table), "--key", str(key)]
        assert main(["encrypt", *base, "--in", str(d / "p"), "--out", str(d / "c")]) == 0
        assert main(["decrypt", *base, "--in", str(d / "c"), "--out", str(d / "r")]) == 0
        assert (d / "r").read_bytes() == bytes(64)

    def test_wrong_key(self, files, capsys, tmp_path):
        d, table, key = files
        (d / "p").write_bytes(b"secret")
        main(["encrypt", "--table", str(table), "--key", str(key), "--in", str(d / "p"), "--out", str(d / "c")])
        code, _, _ = run(capsys, ["decrypt", "--table", str(table), "--key", "00" * 32,
                                  "--in", str(d / "c"), "--out", str(d / "r")])
        assert code in (0, 2)
        if code == 0:
            assert (d / "r").read_bytes() != b"secret"

    def test_missing_file(self, files, capsys):
        d, table, key = files
        code, _, _ = run(capsys, ["encrypt", "--table", str(table), "--key", str(key),
                                  "--in", str(d / "absent"), "--out", str(d / "c")])
        assert code == 2

    def test_bad_key(self, files, capsys):
        d, table, _ = files
        (d / "p").write_bytes(b"x")
        code, _, _ = run(capsys, ["encrypt", "--table", str(table), "--key", "abc",
                                  "--in", str(d / "p"), "--out", str(d / "c")])
        assert code == 2

    def test_small_table_rejected(self, tmp_path, capsys):
        main(["gen-table", "--order", "16", "--gen-seed", "1", "--out", str(tmp_path / "t")])
        (tmp_path / "p").write_bytes(b"x")
        code, _, _ = run(capsys, ["encrypt", "--table", str(tmp_path / "t"), "--key", "00" * 32,
                                  "--in", str(tmp_path / "p"), "--out", str(tmp_path / "c")])
        assert code == 2


class TestBattery:
    def test_default_runs(self, monkeypatch):
        monkeypatch.delenv("QG_BATTERY_RUNS", raising=False)
        assert build_parser().parse_args(["battery"]).runs == 20
        assert build_parser().parse_args(["battery"]).input == "zeros"

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("QG_BATTERY_RUNS", "3")
        assert build_parser().parse_args(["battery"]).runs == 3

    def test_reproducible_report(self, tmp_path, capsys):
        args = ["battery", "--runs", "2", *SMALL, "--seed", "9"]
        for name in ("a", "b"):
            assert main([*args, "--report", str(tmp_path / f"{name}.txt"),
                         "--records", str(tmp_path / f"{name}.csv")]) == 0
        capsys.readouterr()
        assert (tmp_path / "a.txt").read_text() == (tmp_path / "b.txt").read_text()
        assert (tmp_path / "a.csv").read_text() == (tmp_path / "b.csv").read_text()
        assert (tmp_path / "a.csv").read_text().startswith("test,run,p_value\n")

    def test_zeros_input_control(self, capsys):
        # plain zeros through a cipher must look random; report lists every test
        code, out, _ = run(capsys, ["battery", "--runs", "1", *SMALL])
        assert code == 0
        for name in ("frequency", "runs", "serial_1", "approximate_entropy"):
            assert name in out

    def test_file_input(self, tmp_path, capsys):
        (tmp_path / "in.txt").write_bytes(b"plain ascii text for the file preset " * 100)
        code, _, _ = run(capsys, ["battery", "--runs", "1", "--input", "file", "--file", str(tmp_path / "in.txt"),
                                  "--param", "serial_m=8", "--param", "approximate_entropy_m=6"])
        assert code == 0

    def test_file_input_needs_path(self, capsys):
        code, _, _ = run(capsys, ["battery", "--input", "file"])
        assert code == 2

    def test_bad_param(self, capsys):
        code, _, _ = run(capsys, ["battery", "--runs", "1", "--param", "nope=3"])
        assert code == 2
        code, _, _ = run(capsys, ["battery", "--runs", "1", "--param", "serial_m"])
        assert code == 2

    def test_unknown_cipher(self, capsys):
        code, _, _ = run(capsys, ["battery", "--runs", "1", "--cipher", "rot13", *SMALL])
        assert code == 2


class TestCompare:
    def test_same_cipher_twice(self, tmp_path, capsys):
        code, out, _ = run(capsys, ["compare", "--cipher", "qg-cbc", "--cipher", "qg-cbc", "--runs", "1", *SMALL,
                                    "--records", str(tmp_path / "r.csv")])
        assert code == 0
        rows = [ln.split() for ln in out.splitlines()[2:]]
        assert rows and all(r[-1] == "100.00" for r in rows)
        assert (tmp_path / "r.csv").read_text().startswith("cipher,test,run,p_value\n")

    def test_against_aes(self, capsys):
        code, out, _ = run(capsys, ["compare", "--cipher", "qg-cbc", "--cipher", "aes256-cbc", "--runs", "1", *SMALL])
        assert code == 0 and "% of aes256-cbc" in out


class TestBench:
    def test_bench(self, tmp_path, capsys):
        code, out, _ = run(capsys, ["bench", "--cipher", "qg-ecb", "--cipher", "aes256-ecb", "--size", "4096",
                                    "--trials", "1", "--records", str(tmp_path / "b.csv")])
        assert code == 0 and "qg-ecb" in out and "aes256-ecb" in out
        assert len((tmp_path / "b.csv").read_text().splitlines()) == 3

    def test_unaligned_size(self, capsys):
        code, _, _ = run(capsys, ["bench", "--cipher", "qg-ecb", "--size", "10", "--trials", "1"])
        assert code == 2


class TestCountReduced:
    @pytest.mark.parametrize("order, expected", [(1, "1"), (3, "1"), (4, "4"), (5, "56")])
    def test_counts(self, capsys, order, expected):
        code, out, _ = run(capsys, ["count-reduced", "--order", str(order)])
        assert code == 0 and out.strip() == expected

    def test_too_large(self, capsys):
        code, _, _ = run(capsys, ["count-reduced", "--order", "7"])
        assert code == 2


class TestAudio:
    def test_roundtrip_and_csv(self, files, capsys):
        d, table, key = files
        samples = (10000 * np.sin(np.arange(2000) / 10)).astype("<i2")
        write_wav(pcm16_wav(samples), d / "a.wav")
        base = ["--table", str(table), "--key", str(key)]
        assert main(["audio", "encrypt", *base, "--in", str(d / "a.wav"), "--out", str(d / "e.wav")]) == 0
        assert main(["audio", "decrypt", *base, "--in", str(d / "e.wav"), "--out", str(d / "r.wav")]) == 0
        assert parse_wav((d / "r.wav").read_bytes()).samples == samples.tobytes()
        assert main(["audio", "csv", "--in", str(d / "e.wav"), "--out", str(d / "e.csv")]) == 0
        assert (d / "e.csv").read_text().splitlines()[0] == "index,amplitude"

    def test_needs_table(self, files, capsys):
        d, _, _ = files
        write_wav(pcm16_wav([1, 2]), d / "a.wav")
        with pytest.raises(SystemExit) as exc:
            main(["audio", "encrypt", "--in", str(d / "a.wav"), "--out", str(d / "e.wav")])
        assert exc.value.code == 1

    def test_not_wav(self, files, capsys):
        d, table, key = files
        (d / "x.wav").write_bytes(b"hello")
        code, _, _ = run(capsys, ["audio", "csv", "--in", str(d / "x.wav"), "--out", str(d / "x.csv")])
        assert code == 2


class TestUsage:
    def test_no_subcommand(self, capsys):
        code, _, err = run(capsys, [])
        assert code == 1 and "usage" in err

    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 1
        assert "usage" in capsys.readouterr().err

    def test_missing_required(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["encrypt"])
        assert exc.value.code == 1

    def test_internal_error_code(self, monkeypatch, capsys):
        import qgcipher.cli as cli

        def broken(args):
            raise AssertionError("invariant")

        monkeypatch.setattr(cli, "cmd_count_reduced", broken)
        code, _, err = run(capsys, ["count-reduced", "--order", "3"])
        assert code == 3 and "internal" in err
