"""Pluggable cipher registry, throughput benchmark and battery comparison.

Every cipher is wrapped as a :class:`BlockCipherInterface` so the quasigroup
cipher and the AES-256 baseline (from the ``cryptography`` package) run
through identical code. Payloads handed to ``encrypt`` are already aligned;
chaining ciphers also get a 16-byte IV.
"""

from __future__ import annotations

import os
import statistics
import time
import tracemalloc
from dataclasses import dataclass, field
from typing import Callable, Sequence

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from . import block, cbc
from .errors import DuplicateNameError, SmokeTestFailedError, UnalignedInputError, UnknownCipherError
from .prng import SplitMix64
from .quasigroup import QuasigroupTable, invert_table
from .randomness.battery import BatterySummary, TestParams, run_battery


@dataclass(frozen=True)
class BlockCipherInterface:
    name: str
    block_size_bytes: int
    key_size_bytes: int
    setup: Callable[[bytes], object]
    encrypt: Callable[[object, bytes, bytes | None], bytes]
    decrypt: Callable[[object, bytes, bytes | None], bytes]
    chaining: bool = False
    table_memory_bytes: int = 0


class CipherRegistry:
    def __init__(self):
        self._ciphers: dict[str, BlockCipherInterface] = {}

    def register(self, impl: BlockCipherInterface) -> BlockCipherInterface:
        if impl.block_size_bytes <= 0 or impl.key_size_bytes <= 0:
            raise ValueError("block and key sizes must be positive")
        if impl.name in self._ciphers:
            raise DuplicateNameError(f"cipher {impl.name!r} already registered")
        _smoke_test(impl)
        self._ciphers[impl.name] = impl
        return impl

    def get(self, name: str) -> BlockCipherInterface:
        try:
            return self._ciphers[name]
        except KeyError:
            raise UnknownCipherError(f"unknown cipher {name!r}; known: {', '.join(self.names())}") from None

    def names(self) -> list[str]:
        return sorted(self._ciphers)

    def __contains__(self, name: str) -> bool:
        return name in self._ciphers


def _smoke_test(impl: BlockCipherInterface) -> None:
    rng = SplitMix64(0x5EED)
    key = rng.randbytes(impl.key_size_bytes)
    iv = rng.randbytes(impl.block_size_bytes) if impl.chaining else None
    data = rng.randbytes(4 * impl.block_size_bytes)
    try:
        ctx = impl.setup(key)
        ok = impl.decrypt(ctx, impl.encrypt(ctx, data, iv), iv) == data
    except Exception as exc:
        raise SmokeTestFailedError(f"{impl.name}: round trip raised {exc!r}") from exc
    if not ok:
        raise SmokeTestFailedError(f"{impl.name}: decrypt does not invert encrypt")


# -- built-in ciphers ------------------------------------------------------

def qg_ciphers(table: QuasigroupTable) -> list[BlockCipherInterface]:
    """ECB and CBC wrappers around one order-256 table."""
    inv = invert_table(table)
    memory = 2 * table.order * table.order
    setup = block.CipherKey
    return [
        BlockCipherInterface(
            "qg-ecb", block.BLOCK_SIZE, block.KEY_SIZE, setup,
            lambda key, data, iv: block.encrypt_message_ecb(table, key, data),
            lambda key, data, iv: block.decrypt_message_ecb(inv, key, data),
            chaining=False, table_memory_bytes=memory,
        ),
        BlockCipherInterface(
            "qg-cbc", block.BLOCK_SIZE, block.KEY_SIZE, setup,
            lambda key, data, iv: cbc.cbc_encrypt_raw(table, key, iv, data),
            lambda key, data, iv: cbc.cbc_decrypt_raw(inv, key, iv, data),
            chaining=True, table_memory_bytes=memory,
        ),
    ]


def _aes_run(key, data: bytes, iv: bytes | None, forward: bool) -> bytes:
    mode = modes.CBC(iv) if iv is not None else modes.ECB()
    ctx = Cipher(key, mode)
    op = ctx.encryptor() if forward else ctx.decryptor()
    return op.update(data) + op.finalize()


def aes256_ciphers() -> list[BlockCipherInterface]:
    return [
        BlockCipherInterface(
            "aes256-ecb", 16, 32, algorithms.AES256,
            lambda key, data, iv: _aes_run(key, data, None, True),
            lambda key, data, iv: _aes_run(key, data, None, False),
        ),
        BlockCipherInterface(
            "aes256-cbc", 16, 32, algorithms.AES256,
            lambda key, data, iv: _aes_run(key, data, iv, True),
            lambda key, data, iv: _aes_run(key, data, iv, False),
            chaining=True,
        ),
    ]


def default_registry(table: QuasigroupTable) -> CipherRegistry:
    registry = CipherRegistry()
    for impl in qg_ciphers(table) + aes256_ciphers():
        registry.register(impl)
    return registry


# -- throughput ------------------------------------------------------------

@dataclass
class BenchReport:
    cipher: str
    bytes_processed: int
    wall_seconds: float
    throughput_mb_s: float
    setup_seconds: float
    peak_working_set_bytes: int
    table_memory_bytes: int
    trial_seconds: list[float] = field(default_factory=list)


def bench_throughput(
    registry: CipherRegistry, name: str, payload_size: int, trials: int = 5, seed: int = 0
) -> BenchReport:
    """Median encryption time over ``trials`` runs; key setup is timed separately.

    Throughput is in MB/s with MB = 10**6 bytes. The working-set figure is
    the tracemalloc peak of one extra, untimed trial.
    """
    impl = registry.get(name)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if payload_size <= 0 or payload_size % impl.block_size_bytes:
        raise UnalignedInputError(f"payload must be a positive multiple of {impl.block_size_bytes} bytes")
    rng = SplitMix64(seed)
    key = rng.randbytes(impl.key_size_bytes)
    iv = rng.randbytes(impl.block_size_bytes) if impl.chaining else None
    payload = os.urandom(payload_size) if seed is None else rng.randbytes(payload_size)

    t0 = time.perf_counter()
    ctx = impl.setup(key)
    setup_seconds = time.perf_counter() - t0

    times = []
    for _ in range(trials):
        t0 = time.perf_counter()
        impl.encrypt(ctx, payload, iv)
        times.append(time.perf_counter() - t0)
    wall = statistics.median(times)

    tracemalloc.start()
    try:
        impl.encrypt(ctx, payload, iv)
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()

    return BenchReport(
        cipher=name,
        bytes_processed=payload_size,
        wall_seconds=wall,
        throughput_mb_s=payload_size / wall / 1e6 if wall > 0 else float("inf"),
        setup_seconds=setup_seconds,
        peak_working_set_bytes=peak,
        table_memory_bytes=impl.table_memory_bytes,
        trial_seconds=times,
    )


def format_bench(reports: Sequence[BenchReport]) -> str:
    lines = [f"{'cipher':<12}{'bytes':>12}{'median s':>12}{'MB/s':>10}{'setup s':>12}{'peak B':>12}{'table B':>10}"]
    for r in reports:
        lines.append(
            f"{r.cipher:<12}{r.bytes_processed:>12}{r.wall_seconds:>12.5f}{r.throughput_mb_s:>10.2f}"
            f"{r.setup_seconds:>12.2e}{r.peak_working_set_bytes:>12}{r.table_memory_bytes:>10}"
        )
    return "\n".join(lines) + "\n"


def format_bench_records(reports: Sequence[BenchReport]) -> str:
    lines = ["cipher,bytes,wall_seconds,throughput_mb_s,setup_seconds,peak_bytes,table_memory_bytes"]
    for r in reports:
        lines.append(
            f"{r.cipher},{r.bytes_processed},{r.wall_seconds:.6g},{r.throughput_mb_s:.6g},"
            f"{r.setup_seconds:.6g},{r.peak_working_set_bytes},{r.table_memory_bytes}"
        )
    return "\n".join(lines) + "\n"


# -- battery comparison ----------------------------------------------------

def cipher_battery(
    registry: CipherRegistry,
    name: str,
    stream: bytes,
    runs: int = 20,
    seed: int = 0,
    params: TestParams = TestParams(),
    label: str | None = None,
) -> BatterySummary:
    """Battery over one registered cipher.

    Each run draws a key (and an IV for chaining ciphers) from a SplitMix64
    stream seeded with ``seed``, so two ciphers with equal key sizes see the
    same keys. The input is padded like a CBC message before encryption.
    """
    impl = registry.get(name)
    rng = SplitMix64(seed)

    def keygen():
        key = rng.randbytes(impl.key_size_bytes)
        iv = rng.randbytes(impl.block_size_bytes)
        return key, iv

    def encrypt(material, data):
        key, iv = material
        return impl.encrypt(impl.setup(key), cbc.pad(data), iv if impl.chaining else None)

    return run_battery(stream, encrypt=encrypt, keygen=keygen, runs=runs, params=params,
                       label=label or name)


@dataclass
class Comparison:
    label: str
    runs: int
    ciphers: list[str]
    summaries: dict[str, BatterySummary]
    # baseline name -> test -> 100 * p(subject) / p(baseline)
    ratios: dict[str, dict[str, float]]


def _ratio(subject: float, baseline: float) -> float:
    if subject == baseline:
        return 100.0
    if baseline == 0:
        return float("inf")
    return 100.0 * subject / baseline


def compare_battery(
    registry: CipherRegistry,
    ciphers: Sequence[str],
    stream: bytes,
    label: str = "",
    runs: int = 20,
    seed: int = 0,
    params: TestParams = TestParams(),
) -> Comparison:
    """Side-by-side battery; the first cipher is the subject, the rest baselines."""
    if len(ciphers) < 2:
        raise ValueError("compare needs at least two cipher names")
    for name in ciphers:
        registry.get(name)
    summaries: dict[str, BatterySummary] = {}
    for name in ciphers:
        # the same name twice shares one summary, so its ratios are exactly 100
        if name not in summaries:
            summaries[name] = cipher_battery(registry, name, stream, runs, seed, params,
                                             label=f"{label} {name}".strip())
    subject = summaries[ciphers[0]]
    ratios = {}
    for base in ciphers[1:]:
        ref = summaries[base]
        ratios[base] = {t: _ratio(subject.means[t], ref.means[t])
                        for t in subject.means if t in ref.means}
    return Comparison(label, runs, list(ciphers), summaries, ratios)


def format_comparison(cmp: Comparison) -> str:
    subject = cmp.ciphers[0]
    names = list(dict.fromkeys(cmp.ciphers))
    header = f"{'test':<22}" + "".join(f"{n:>14}" for n in names)
    header += "".join(f"{f'% of {b}':>18}" for b in cmp.ciphers[1:])
    lines = [f"# {cmp.label}  runs={cmp.runs}  subject={subject}", header]
    for test in cmp.summaries[subject].means:
        row = f"{test:<22}" + "".join(f"{cmp.summaries[n].means.get(test, float('nan')):>14.5f}" for n in names)
        row += "".join(f"{cmp.ratios[b].get(test, float('nan')):>18.2f}" for b in cmp.ciphers[1:])
        lines.append(row)
    return "\n".join(lines) + "\n"


def format_comparison_records(cmp: Comparison) -> str:
    lines = ["cipher,test,run,p_value"]
    for name, summary in cmp.summaries.items():
        for r in summary.reports:
            lines.extend(f"{name},{t},{r.run},{p:.10g}" for t, p in r.pvalues.items())
    return "\n".join(lines) + "\n"
