"""Cipher-block chaining over the quasigroup block cipher.

Padding is always applied: ``k`` bytes of value ``k`` (1..16), a full block
when the message is already aligned. On the wire an envelope is::

    b"QGC1" || iv (16 bytes) || ciphertext (multiple of 16, at least 16)
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass

import numpy as np

from .block import (
    BLOCK_SIZE,
    CipherKey,
    _check_order,
    _decrypt_rounds,
    _ecb_decrypt_array,
    _encrypt_rounds,
    _seeds,
)
from .errors import BadPaddingError, MalformedEnvelopeError
from .quasigroup import InverseTable, QuasigroupTable

MAGIC = b"QGC1"
IV_SIZE = BLOCK_SIZE


@dataclass(frozen=True)
class CbcEnvelope:
    iv: bytes
    ciphertext: bytes

    def __post_init__(self):
        if len(self.iv) != IV_SIZE:
            raise MalformedEnvelopeError(f"iv must be {IV_SIZE} bytes, got {len(self.iv)}")
        if len(self.ciphertext) < BLOCK_SIZE or len(self.ciphertext) % BLOCK_SIZE:
            raise MalformedEnvelopeError(
                f"ciphertext length {len(self.ciphertext)} is not a positive multiple of {BLOCK_SIZE}"
            )

    def to_bytes(self) -> bytes:
        return MAGIC + self.iv + self.ciphertext

    @classmethod
    def from_bytes(cls, data: bytes) -> "CbcEnvelope":
        if data[:4] != MAGIC:
            raise MalformedEnvelopeError("missing QGC1 magic")
        if len(data) < 4 + IV_SIZE:
            raise MalformedEnvelopeError("envelope truncated inside the iv")
        return cls(bytes(data[4:4 + IV_SIZE]), bytes(data[4 + IV_SIZE:]))


def generate_iv(rng=None) -> bytes:
    """16 random bytes; pass an object with ``randbytes`` for reproducible runs."""
    return secrets.token_bytes(IV_SIZE) if rng is None else rng.randbytes(IV_SIZE)


def pad(message: bytes) -> bytes:
    k = BLOCK_SIZE - len(message) % BLOCK_SIZE
    return bytes(message) + bytes([k]) * k


def unpad(padded: bytes) -> bytes:
    if not padded or len(padded) % BLOCK_SIZE:
        raise BadPaddingError("padded length is not a positive multiple of the block size")
    k = padded[-1]
    if not 1 <= k <= BLOCK_SIZE or padded[-k:] != bytes([k]) * k:
        raise BadPaddingError("inconsistent padding bytes")
    return padded[:-k]


def _xor(a: bytes, b: bytes) -> bytes:
    return (int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).to_bytes(BLOCK_SIZE, "big")


def cbc_encrypt_raw(qg: QuasigroupTable, key: CipherKey | bytes, iv: bytes, data: bytes) -> bytes:
    """CBC over already-aligned ``data``, no padding. Sequential by nature."""
    _check_order(qg.order)
    if len(data) % BLOCK_SIZE:
        raise MalformedEnvelopeError("raw CBC input must be block aligned")
    rows, seeds = qg.rows, _seeds(key)
    prev = bytes(iv)
    out = []
    for off in range(0, len(data), BLOCK_SIZE):
        prev = _encrypt_rounds(rows, seeds, _xor(data[off:off + BLOCK_SIZE], prev))
        out.append(prev)
    return b"".join(out)


def cbc_decrypt_raw(inv: InverseTable, key: CipherKey | bytes, iv: bytes, data: bytes) -> bytes:
    """Inverse of :func:`cbc_encrypt_raw`; blocks are decrypted in parallel."""
    _check_order(inv.order)
    if len(data) % BLOCK_SIZE:
        raise MalformedEnvelopeError("raw CBC input must be block aligned")
    seeds = _seeds(key)
    blocks = np.frombuffer(bytes(data), dtype=np.uint8).reshape(-1, BLOCK_SIZE)
    if len(blocks) < 8:
        plain = np.frombuffer(
            b"".join(_decrypt_rounds(inv.rows, seeds, bytes(b)) for b in blocks), dtype=np.uint8
        ).reshape(-1, BLOCK_SIZE)
    else:
        plain = _ecb_decrypt_array(inv.as_array(), seeds, blocks)
    chain = np.vstack([np.frombuffer(bytes(iv), dtype=np.uint8), blocks[:-1]]) if len(blocks) else blocks
    return (plain ^ chain).tobytes()


def cbc_encrypt(qg: QuasigroupTable, key: CipherKey | bytes, iv: bytes, message: bytes) -> CbcEnvelope:
    if len(iv) != IV_SIZE:
        raise MalformedEnvelopeError(f"iv must be {IV_SIZE} bytes")
    return CbcEnvelope(bytes(iv), cbc_encrypt_raw(qg, key, iv, pad(message)))


def cbc_decrypt(inv: InverseTable, key: CipherKey | bytes, envelope: CbcEnvelope | bytes) -> bytes:
    if not isinstance(envelope, CbcEnvelope):
        envelope = CbcEnvelope.from_bytes(envelope)
    return unpad(cbc_decrypt_raw(inv, key, envelope.iv, envelope.ciphertext))
