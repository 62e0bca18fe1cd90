"""``qg`` command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 internal
invariant violation. Key material is read from and written to files only and
is never printed.
"""

from __future__ import annotations

import argparse
import logging
import os
import secrets
import sys
from pathlib import Path

from . import audio, block, cbc
from .bench import (
    bench_throughput,
    cipher_battery,
    compare_battery,
    default_registry,
    format_bench,
    format_bench_records,
    format_comparison,
    format_comparison_records,
)
from .errors import QGError
from .latin import count_reduced_latin_squares
from .prng import SplitMix64
from .quasigroup import CIPHER_ORDER, generate_table, invert_table, load_table, save_table
from .randomness import TestParams, format_records, format_summary, preset_stream
from .randomness.battery import DEFAULT_BITS, PRESETS

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
RUNS_ENV = "QG_BATTERY_RUNS"
DEFAULT_GEN_SEED = 0x2A


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int(text: str) -> int:
    return int(text, 0)


def _default_runs() -> int:
    value = os.environ.get(RUNS_ENV)
    return int(value) if value else 20


def _key(arg: str) -> block.CipherKey:
    """A key file path, or the 64 hex characters themselves."""
    path = Path(arg)
    if path.is_file():
        return block.load_key(path)
    if len(arg) == 2 * block.KEY_SIZE and all(c in "0123456789abcdefABCDEF" for c in arg):
        return block.CipherKey.from_hex(arg)
    raise QGError("--key is neither a readable key file nor 64 hex characters")


def _table_for(args):
    if getattr(args, "table", None):
        return load_table(args.table)
    return generate_table(CIPHER_ORDER, args.gen_seed)


# -- subcommands -----------------------------------------------------------

def cmd_gen_table(args) -> int:
    seed = args.gen_seed if args.gen_seed is not None else secrets.randbits(64)
    save_table(generate_table(args.order, seed), args.out, binary=args.binary)
    return EXIT_OK


def cmd_keygen(args) -> int:
    rng = SplitMix64(args.seed) if args.seed is not None else None
    block.save_key(block.generate_key(rng, args.key_id), args.out)
    return EXIT_OK


def _crypt(args, forward: bool) -> int:
    qg = load_table(args.table)
    key = _key(args.key)
    data = Path(args.input).read_bytes()
    if forward:
        if args.mode == "ecb":
            out = block.encrypt_message_ecb(qg, key, data)
        else:
            rng = SplitMix64(args.iv_seed) if args.iv_seed is not None else None
            out = cbc.cbc_encrypt(qg, key, cbc.generate_iv(rng), data).to_bytes()
    else:
        inv = invert_table(qg)
        if args.mode == "ecb":
            out = block.decrypt_message_ecb(inv, key, data)
        else:
            out = cbc.cbc_decrypt(inv, key, data)
    Path(args.output).write_bytes(out)
    return EXIT_OK


def cmd_encrypt(args) -> int:
    return _crypt(args, forward=True)


def cmd_decrypt(args) -> int:
    return _crypt(args, forward=False)


def _params(args) -> TestParams:
    values = {}
    for item in args.param or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise QGError(f"--param expects name=value, got {item!r}")
        values[name.strip()] = value.strip()
    try:
        return TestParams.from_mapping(values)
    except ValueError as exc:
        raise QGError(str(exc)) from None


def _stream(args) -> bytes:
    if args.input == "file" and not args.file:
        raise QGError("--input file needs --file PATH")
    return preset_stream(args.input, args.bits, args.file)


def _write(path, text):
    if path:
        Path(path).write_text(text)


def cmd_battery(args) -> int:
    registry = default_registry(_table_for(args))
    summary = cipher_battery(registry, args.cipher, _stream(args), runs=args.runs,
                             seed=args.seed, params=_params(args),
                             label=f"{args.cipher} input={args.input}")
    text = format_summary(summary)
    sys.stdout.write(text)
    _write(args.report, text)
    _write(args.records, format_records(summary.reports))
    return EXIT_OK


def cmd_compare(args) -> int:
    registry = default_registry(_table_for(args))
    result = compare_battery(registry, args.cipher, _stream(args), label=f"input={args.input}",
                             runs=args.runs, seed=args.seed, params=_params(args))
    text = format_comparison(result)
    sys.stdout.write(text)
    _write(args.report, text)
    _write(args.records, format_comparison_records(result))
    return EXIT_OK


def cmd_bench(args) -> int:
    registry = default_registry(_table_for(args))
    names = args.cipher or registry.names()
    reports = [bench_throughput(registry, n, args.size, args.trials, args.seed) for n in names]
    text = format_bench(reports)
    sys.stdout.write(text)
    _write(args.report, text)
    _write(args.records, format_bench_records(reports))
    return EXIT_OK


def cmd_count_reduced(args) -> int:
    print(count_reduced_latin_squares(args.order))
    return EXIT_OK


def cmd_audio(args) -> int:
    payload = audio.read_wav(args.input)
    if args.action == "csv":
        audio.dump_amplitude_csv(payload, args.output)
        return EXIT_OK
    qg = load_table(args.table)
    key = _key(args.key)
    if args.action == "encrypt":
        rng = SplitMix64(args.iv_seed) if args.iv_seed is not None else None
        iv = cbc.generate_iv(rng) if args.mode == "cbc" else None
        result = audio.encrypt_wav(payload, qg, key, args.mode, iv)
    else:
        result = audio.decrypt_wav(payload, invert_table(qg), key, args.mode)
    audio.write_wav(result, args.output)
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def _add_table_source(p):
    p.add_argument("--table", help="table file (default: generate one from --gen-seed)")
    p.add_argument("--gen-seed", type=_int, default=DEFAULT_GEN_SEED,
                   help="table generation seed when --table is absent (default: %(default)#x)")


def _add_battery_input(p):
    p.add_argument("--input", choices=PRESETS, default="zeros",
                   help="plaintext: all 0x00, all 0xFF, or a file (default: %(default)s)")
    p.add_argument("--file", help="plaintext file for --input file")
    p.add_argument("--bits", type=int, default=DEFAULT_BITS,
                   help="plaintext length for zeros/ones (default: %(default)s)")
    p.add_argument("--runs", type=int, default=_default_runs(),
                   help=f"runs, each under a fresh key (default: 20, or ${RUNS_ENV})")
    p.add_argument("--seed", type=_int, default=0, help="key/IV stream seed (default: 0)")
    p.add_argument("--param", action="append", metavar="NAME=VALUE",
                   help="override a test parameter, e.g. serial_m=16 (repeatable)")
    p.add_argument("--report", help="write the text table here too")
    p.add_argument("--records", help="write per-run CSV records here")
    _add_table_source(p)


def _add_crypt(p):
    p.add_argument("--table", required=True, help="table file")
    p.add_argument("--key", required=True, help="key file, or the 64 hex chars inline")
    p.add_argument("--mode", choices=("ecb", "cbc"), default="cbc", help="default: %(default)s")
    p.add_argument("--in", dest="input", required=True, help="input file")
    p.add_argument("--out", dest="output", required=True, help="output file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qg", description="Quasigroup block cipher toolkit.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("gen-table", help="generate a quasigroup table file")
    p.add_argument("--order", type=int, default=CIPHER_ORDER, help="default: %(default)s")
    p.add_argument("--gen-seed", type=_int, help="64-bit seed (default: random)")
    p.add_argument("--binary", action="store_true", help="write the raw 'qgb' form")
    p.add_argument("--out", required=True, help="table file to write")
    p.set_defaults(func=cmd_gen_table)

    p = sub.add_parser("keygen", help="generate a 256-bit key file")
    p.add_argument("--out", required=True, help="key file to write")
    p.add_argument("--seed", type=_int, help="deterministic key from this seed (testing only)")
    p.add_argument("--key-id", help="label stored as a '#' comment line")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt a file")
    _add_crypt(p)
    p.add_argument("--iv-seed", type=_int, help="deterministic IV (testing only)")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a file")
    _add_crypt(p)
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("battery", help="randomness battery over one cipher")
    p.add_argument("--cipher", default="qg-cbc", help="registered cipher (default: %(default)s)")
    _add_battery_input(p)
    p.set_defaults(func=cmd_battery)

    p = sub.add_parser("compare", help="side-by-side battery with ratio column")
    p.add_argument("--cipher", action="append", required=True,
                   help="cipher name; first is the subject (repeat for each)")
    _add_battery_input(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="throughput benchmark")
    p.add_argument("--cipher", action="append", help="cipher name (repeatable; default: all)")
    p.add_argument("--size", type=int, default=1 << 20, help="payload bytes (default: %(default)s)")
    p.add_argument("--trials", type=int, default=5, help="default: %(default)s")
    p.add_argument("--seed", type=_int, default=0, help="key/payload seed (default: 0)")
    p.add_argument("--report", help="write the text table here too")
    p.add_argument("--records", help="write CSV records here")
    _add_table_source(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("count-reduced", help="count reduced Latin squares (n <= 6)")
    p.add_argument("--order", type=int, required=True, help="square order, 1..6")
    p.set_defaults(func=cmd_count_reduced)

    p = sub.add_parser("audio", help="encrypt/decrypt a PCM-16 WAV or dump amplitudes")
    p.add_argument("action", choices=("encrypt", "decrypt", "csv"),
                   help="csv writes index,amplitude lines for every sample")
    p.add_argument("--in", dest="input", required=True, help="input WAV file")
    p.add_argument("--out", dest="output", required=True, help="output WAV (or CSV) file")
    p.add_argument("--table", help="table file (encrypt/decrypt)")
    p.add_argument("--key", help="key file, or the 64 hex chars inline")
    p.add_argument("--mode", choices=("ecb", "cbc"), default="cbc", help="default: %(default)s")
    p.add_argument("--iv-seed", type=_int, help="deterministic IV (testing only)")
    p.set_defaults(func=cmd_audio)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "audio" and args.action != "csv" and not (args.table and args.key):
        parser.error("audio encrypt/decrypt needs --table and --key")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"qg: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AssertionError as exc:
        print(f"qg: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
