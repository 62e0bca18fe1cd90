"""Encrypting the sample data of 16-bit PCM WAV files.

Only the ``data`` chunk payload is touched. Header bytes are kept verbatim,
apart from the RIFF and data sizes, so an encrypted file still opens in any
audio tool and can be plotted. The payload is padded the same way as a CBC
message in both modes. In CBC mode the IV goes in the clear at the front of
the data chunk.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import block, cbc
from .block import CipherKey
from .errors import NotRiffError, TruncatedChunkError, UnsupportedFormatError
from .quasigroup import InverseTable, QuasigroupTable

WAVE_FORMAT_PCM = 1
WAVE_FORMAT_EXTENSIBLE = 0xFFFE
MODES = ("ecb", "cbc")


@dataclass(frozen=True)
class WavPayload:
    audio_format: int
    channels: int
    sample_rate: int
    bits_per_sample: int
    samples: bytes
    header: bytes   # from 'RIFF' through the data chunk's size field
    trailer: bytes  # any chunks after the data chunk

    def to_bytes(self) -> bytes:
        pad = b"\x00" if len(self.samples) % 2 else b""
        head = bytearray(self.header)
        riff_size = len(head) - 8 + len(self.samples) + len(pad) + len(self.trailer)
        head[4:8] = struct.pack("<I", riff_size)
        head[-4:] = struct.pack("<I", len(self.samples))
        return bytes(head) + self.samples + pad + self.trailer

    def amplitudes(self) -> np.ndarray:
        usable = len(self.samples) - len(self.samples) % 2
        return np.frombuffer(self.samples[:usable], dtype="<i2")


def parse_wav(data: bytes) -> WavPayload:
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise NotRiffError("not a RIFF/WAVE file")
    pos = 12
    fmt = None
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4:pos + 8])
        body = pos + 8
        if body + size > len(data):
            raise TruncatedChunkError(
                f"chunk {chunk_id!r} declares {size} bytes, only {len(data) - body} present"
            )
        if chunk_id == b"fmt ":
            if size < 16:
                raise UnsupportedFormatError("fmt chunk too short")
            tag, channels, rate, _, _, bits = struct.unpack("<HHIIHH", data[body:body + 16])
            if tag == WAVE_FORMAT_EXTENSIBLE and size >= 40:
                (tag,) = struct.unpack("<H", data[body + 24:body + 26])
            fmt = (tag, channels, rate, bits)
        elif chunk_id == b"data":
            if fmt is None:
                raise UnsupportedFormatError("data chunk before fmt chunk")
            tag, channels, rate, bits = fmt
            if tag != WAVE_FORMAT_PCM or bits != 16:
                raise UnsupportedFormatError(f"need 16-bit PCM, got format {tag} with {bits} bits")
            end = body + size + (size & 1)
            return WavPayload(tag, channels, rate, bits, bytes(data[body:body + size]),
                              bytes(data[:body]), bytes(data[end:]))
        pos = body + size + (size & 1)
    raise TruncatedChunkError("no data chunk found")


def read_wav(path: str | Path) -> WavPayload:
    return parse_wav(Path(path).read_bytes())


def write_wav(payload: WavPayload, path: str | Path) -> None:
    Path(path).write_bytes(payload.to_bytes())


def pcm16_wav(samples, sample_rate: int = 11025, channels: int = 1) -> WavPayload:
    """Build a canonical 44-byte-header PCM-16 WAV around int16 samples."""
    raw = np.asarray(samples, dtype="<i2").tobytes()
    fmt = struct.pack("<HHIIHH", WAVE_FORMAT_PCM, channels, sample_rate,
                      sample_rate * channels * 2, channels * 2, 16)
    header = (b"RIFF" + struct.pack("<I", 36 + len(raw)) + b"WAVE"
              + b"fmt " + struct.pack("<I", 16) + fmt
              + b"data" + struct.pack("<I", len(raw)))
    return WavPayload(WAVE_FORMAT_PCM, channels, sample_rate, 16, raw, header, b"")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def encrypt_wav(payload: WavPayload, qg: QuasigroupTable, key: CipherKey | bytes,
                mode: str = "cbc", iv: bytes | None = None) -> WavPayload:
    _check_mode(mode)
    if mode == "ecb":
        data = block.encrypt_message_ecb(qg, key, cbc.pad(payload.samples))
    else:
        iv = cbc.generate_iv() if iv is None else iv
        data = cbc.cbc_encrypt(qg, key, iv, payload.samples)
        data = data.iv + data.ciphertext
    return replace(payload, samples=data)


def decrypt_wav(payload: WavPayload, inv: InverseTable, key: CipherKey | bytes,
                mode: str = "cbc") -> WavPayload:
    _check_mode(mode)
    if mode == "ecb":
        data = cbc.unpad(block.decrypt_message_ecb(inv, key, payload.samples))
    else:
        env = cbc.CbcEnvelope(payload.samples[:cbc.IV_SIZE], payload.samples[cbc.IV_SIZE:])
        data = cbc.cbc_decrypt(inv, key, env)
    return replace(payload, samples=data)


def dump_amplitude_csv(payload: WavPayload, path: str | Path) -> None:
    """One ``index,amplitude`` line per 16-bit sample (channels interleaved)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "amplitude"])
        writer.writerows(enumerate(payload.amplitudes().tolist()))


def uniform_int16_std() -> float:
    """Standard deviation of a uniform distribution over all 65536 int16 values."""
    return float(np.sqrt((65536.0 ** 2 - 1) / 12.0))
