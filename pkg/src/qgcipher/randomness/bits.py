from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class BitSequence:
    """A bit string held as a uint8 array of 0/1 values.

    Bytes expand most-significant bit first, the same order the block cipher
    uses for its 128-bit rotations.
    """

    bits: np.ndarray

    def __post_init__(self):
        if self.bits.ndim != 1 or self.bits.size < 1:
            raise ValueError("bit sequence must be one-dimensional and non-empty")

    @classmethod
    def from_bytes(cls, data: bytes) -> "BitSequence":
        return cls(np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8)))

    @classmethod
    def from_string(cls, text: str) -> "BitSequence":
        return cls(np.frombuffer(text.strip().encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_iterable(cls, bits: Iterable[int]) -> "BitSequence":
        return cls(np.fromiter((1 if b else 0 for b in bits), dtype=np.uint8))

    def __len__(self) -> int:
        return int(self.bits.size)

    def to_bytes(self) -> bytes:
        return np.packbits(self.bits).tobytes()


def as_bits(seq) -> np.ndarray:
    """Accept a BitSequence, a '0101' string or any 0/1 array-like."""
    if isinstance(seq, BitSequence):
        return seq.bits
    if isinstance(seq, str):
        return BitSequence.from_string(seq).bits
    if isinstance(seq, (bytes, bytearray, memoryview)):
        raise TypeError("raw bytes are ambiguous here; wrap them with BitSequence.from_bytes")
    arr = np.asarray(seq, dtype=np.uint8)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("bit sequence must be one-dimensional and non-empty")
    return arr
