"""32-round quasigroup block cipher over 16-byte blocks.

Each round runs the chained stream transform over the block's 16 bytes,
primed with that round's key byte, and then rotates the whole block left as
one 128-bit big-endian integer by 1, 3, 5 or 7 bits (round index mod 4).
Over 32 rounds the rotations add up to exactly one full turn.

Blocks are handled as ``bytes``. Multi-block ECB calls run every block at
once with numpy; that path is checked against the per-block one in the test
suite.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import KeyFormatError, UnalignedInputError, WrongTableOrderError
from .quasigroup import CIPHER_ORDER, InverseTable, QuasigroupTable

BLOCK_SIZE = 16
KEY_SIZE = 32
ROTATION_SCHEDULE = (1, 3, 5, 7)
_BITS = BLOCK_SIZE * 8
_MASK = (1 << _BITS) - 1


@dataclass(frozen=True)
class CipherKey:
    seeds: bytes
    key_id: str | None = None

    def __post_init__(self):
        if len(self.seeds) != KEY_SIZE:
            raise KeyFormatError(f"key must be {KEY_SIZE} bytes, got {len(self.seeds)}")

    def __repr__(self):
        # never print key material
        return f"CipherKey(key_id={self.key_id!r})"

    @classmethod
    def from_hex(cls, text: str, key_id: str | None = None) -> "CipherKey":
        text = text.strip()
        if len(text) != 2 * KEY_SIZE:
            raise KeyFormatError(f"key must be {2 * KEY_SIZE} hex characters")
        try:
            return cls(bytes.fromhex(text), key_id)
        except ValueError:
            raise KeyFormatError("key is not valid hex") from None

    def hex(self) -> str:
        return self.seeds.hex()


def generate_key(rng=None, key_id: str | None = None) -> CipherKey:
    """Fresh 256-bit key. ``rng`` is anything with ``randbytes(n)``; default is :mod:`secrets`."""
    raw = secrets.token_bytes(KEY_SIZE) if rng is None else rng.randbytes(KEY_SIZE)
    return CipherKey(raw, key_id)


def dumps_key(key: CipherKey) -> str:
    head = f"# {key.key_id}\n" if key.key_id else ""
    return head + key.hex() + "\n"


def loads_key(text: str) -> CipherKey:
    key_id = None
    hex_lines = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key_id = line[1:].strip() or None
        else:
            hex_lines.append(line)
    if len(hex_lines) != 1:
        raise KeyFormatError("key file must hold exactly one line of hex")
    return CipherKey.from_hex(hex_lines[0], key_id)


def save_key(key: CipherKey, path: str | Path) -> None:
    Path(path).write_text(dumps_key(key), encoding="ascii")


def load_key(path: str | Path) -> CipherKey:
    return loads_key(Path(path).read_text(encoding="ascii"))


# -- rotation --------------------------------------------------------------

def rotate_left(block: bytes, bits: int) -> bytes:
    if not 0 <= bits < _BITS:
        raise ValueError(f"rotation must be in 0..{_BITS - 1}")
    if len(block) != BLOCK_SIZE:
        raise UnalignedInputError(f"block must be {BLOCK_SIZE} bytes")
    x = int.from_bytes(block, "big")
    x = ((x << bits) | (x >> (_BITS - bits))) & _MASK
    return x.to_bytes(BLOCK_SIZE, "big")


def rotate_right(block: bytes, bits: int) -> bytes:
    if not 0 <= bits < _BITS:
        raise ValueError(f"rotation must be in 0..{_BITS - 1}")
    return rotate_left(block, (_BITS - bits) % _BITS)


def _seeds(key: CipherKey | bytes) -> bytes:
    return key.seeds if isinstance(key, CipherKey) else CipherKey(bytes(key)).seeds


def _check_order(order: int) -> None:
    if order != CIPHER_ORDER:
        raise WrongTableOrderError(f"block cipher needs an order-{CIPHER_ORDER} table, got {order}")


# -- single block ----------------------------------------------------------

def _encrypt_rounds(rows, seeds: Sequence[int], block: bytes, schedule=ROTATION_SCHEDULE) -> bytes:
    """Core round loop; seeds and schedule are free here so tests can shrink them."""
    b = block
    out = bytearray(BLOCK_SIZE)
    period = len(schedule)
    for i, s in enumerate(seeds):
        c = s
        for j in range(BLOCK_SIZE):
            c = rows[c][b[j]]
            out[j] = c
        r = schedule[i % period]
        x = int.from_bytes(out, "big")
        x = ((x << r) | (x >> (_BITS - r))) & _MASK
        b = x.to_bytes(BLOCK_SIZE, "big")
    return b


def _decrypt_rounds(rows, seeds: Sequence[int], block: bytes, schedule=ROTATION_SCHEDULE) -> bytes:
    x = int.from_bytes(block, "big")
    period = len(schedule)
    for i in range(len(seeds) - 1, -1, -1):
        r = schedule[i % period]
        x = ((x >> r) | (x << (_BITS - r))) & _MASK
        b = x.to_bytes(BLOCK_SIZE, "big")
        prev = seeds[i]
        m = bytearray(BLOCK_SIZE)
        for j in range(BLOCK_SIZE):
            c = b[j]
            m[j] = rows[prev][c]
            prev = c
        x = int.from_bytes(m, "big")
    return x.to_bytes(BLOCK_SIZE, "big")


def encrypt_block(qg: QuasigroupTable, key: CipherKey | bytes, plain: bytes) -> bytes:
    _check_order(qg.order)
    if len(plain) != BLOCK_SIZE:
        raise UnalignedInputError(f"block must be {BLOCK_SIZE} bytes, got {len(plain)}")
    return _encrypt_rounds(qg.rows, _seeds(key), bytes(plain))


def decrypt_block(inv: InverseTable, key: CipherKey | bytes, cipher: bytes) -> bytes:
    _check_order(inv.order)
    if len(cipher) != BLOCK_SIZE:
        raise UnalignedInputError(f"block must be {BLOCK_SIZE} bytes, got {len(cipher)}")
    return _decrypt_rounds(inv.rows, _seeds(key), bytes(cipher))


# -- vectorized many-block path --------------------------------------------

def _rotl_rows(a: np.ndarray, bits: int) -> np.ndarray:
    """Rotate each row of an (N, 16) uint8 array left by ``bits`` as a 128-bit string."""
    nbytes, nbits = divmod(bits, 8)
    if nbytes:
        a = np.roll(a, -nbytes, axis=1)
    if nbits:
        nxt = np.roll(a, -1, axis=1)
        a = (a << nbits) | (nxt >> (8 - nbits))
    return a


def _ecb_encrypt_array(table: np.ndarray, seeds: bytes, blocks: np.ndarray) -> np.ndarray:
    b = blocks.copy()
    n = b.shape[0]
    for i, s in enumerate(seeds):
        c = np.full(n, s, dtype=np.uint8)
        for j in range(BLOCK_SIZE):
            c = table[c, b[:, j]]
            b[:, j] = c
        b = _rotl_rows(b, ROTATION_SCHEDULE[i % 4])
    return b


def _ecb_decrypt_array(inv: np.ndarray, seeds: bytes, blocks: np.ndarray) -> np.ndarray:
    b = blocks.copy()
    for i in range(len(seeds) - 1, -1, -1):
        b = _rotl_rows(b, _BITS - ROTATION_SCHEDULE[i % 4])
        m = np.empty_like(b)
        # every plaintext byte depends only on two ciphertext bytes
        m[:, 0] = inv[seeds[i], b[:, 0]]
        m[:, 1:] = inv[b[:, :-1], b[:, 1:]]
        b = m
    return b


def _blocks(data: bytes) -> np.ndarray:
    if len(data) % BLOCK_SIZE:
        raise UnalignedInputError(
            f"input length {len(data)} is not a multiple of {BLOCK_SIZE}; pad it or use CBC mode"
        )
    return np.frombuffer(bytes(data), dtype=np.uint8).reshape(-1, BLOCK_SIZE)


# below this many blocks the plain loop beats numpy's per-call overhead
_VECTOR_THRESHOLD = 8


def encrypt_message_ecb(qg: QuasigroupTable, key: CipherKey | bytes, message: bytes) -> bytes:
    """Encrypt every 16-byte block on its own. Identical blocks stay identical."""
    _check_order(qg.order)
    blocks = _blocks(message)
    seeds = _seeds(key)
    if len(blocks) < _VECTOR_THRESHOLD:
        return b"".join(_encrypt_rounds(qg.rows, seeds, bytes(b)) for b in blocks)
    return _ecb_encrypt_array(qg.as_array(), seeds, blocks).tobytes()


def decrypt_message_ecb(inv: InverseTable, key: CipherKey | bytes, cipher: bytes) -> bytes:
    _check_order(inv.order)
    blocks = _blocks(cipher)
    seeds = _seeds(key)
    if len(blocks) < _VECTOR_THRESHOLD:
        return b"".join(_decrypt_rounds(inv.rows, seeds, bytes(b)) for b in blocks)
    return _ecb_decrypt_array(inv.as_array(), seeds, blocks).tobytes()
