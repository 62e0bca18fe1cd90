"""Quasigroup tables: construction, validation, inversion, (de)serialization,
and the chained stream transform they define.

Symbols are 0-based throughout. A table of order ``n`` is stored as ``n`` rows
of ``bytes`` so a lookup ``table.rows[a][b]`` is the quasigroup product
``a . b``; the matching :class:`InverseTable` answers ``a \\ c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateInColumnError,
    DuplicateInRowError,
    OrderOutOfRangeError,
    SymbolOutOfRangeError,
    TableFormatError,
)
from .prng import SplitMix64

MAX_ORDER = 256
CIPHER_ORDER = 256


@dataclass(frozen=True)
class QuasigroupTable:
    order: int
    rows: tuple[bytes, ...] = field(repr=False)

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.rows[r][c]

    @cached_property
    def array(self) -> np.ndarray:
        a = np.frombuffer(b"".join(self.rows), dtype=np.uint8).reshape(self.order, self.order)
        a.flags.writeable = False
        return a

    def as_array(self) -> np.ndarray:
        return self.array

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


@dataclass(frozen=True)
class InverseTable:
    order: int
    rows: tuple[bytes, ...] = field(repr=False)

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.rows[r][c]

    @cached_property
    def array(self) -> np.ndarray:
        a = np.frombuffer(b"".join(self.rows), dtype=np.uint8).reshape(self.order, self.order)
        a.flags.writeable = False
        return a

    def as_array(self) -> np.ndarray:
        return self.array

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def validate_table(candidate: Sequence[Sequence[int]]) -> QuasigroupTable:
    """Check the Latin square property and wrap ``candidate`` as a table.

    Raises the first violation found, scanning rows before columns.
    """
    n = len(candidate)
    if n < 1 or n > MAX_ORDER:
        raise OrderOutOfRangeError(f"order must be in 1..{MAX_ORDER}, got {n}")
    rows = []
    for i, row in enumerate(candidate):
        row = list(row)
        if len(row) != n:
            raise TableFormatError(f"row {i} has {len(row)} entries, expected {n}")
        for v in row:
            if not 0 <= v < n:
                raise SymbolOutOfRangeError(f"symbol {v} in row {i} outside 0..{n - 1}")
        if len(set(row)) != n:
            raise DuplicateInRowError(i)
        rows.append(bytes(row))
    for j in range(n):
        if len({r[j] for r in rows}) != n:
            raise DuplicateInColumnError(j)
    return QuasigroupTable(n, tuple(rows))


def generate_table(order: int, gen_seed: int) -> QuasigroupTable:
    """Deterministic random isotope of the cyclic square ``(i + j) mod n``.

    Three permutations are drawn in order (rows, columns, symbols) by
    Fisher-Yates over one SplitMix64 stream seeded with ``gen_seed``, and
    the cell ``(i, j)`` becomes ``symbols[(rows[i] + cols[j]) % n]``.
    """
    if not 2 <= order <= MAX_ORDER:
        raise OrderOutOfRangeError(f"order must be in 2..{MAX_ORDER}, got {order}")
    if not 0 <= gen_seed < 1 << 64:
        raise ValueError("gen_seed must be a 64-bit unsigned integer")
    rng = SplitMix64(gen_seed)
    alpha = rng.permutation(order)
    beta = rng.permutation(order)
    gamma = rng.permutation(order)
    a, b, g = (np.asarray(p, dtype=np.int64) for p in (alpha, beta, gamma))
    square = g[(a[:, None] + b[None, :]) % order].astype(np.uint8)
    return QuasigroupTable(order, tuple(row.tobytes() for row in square))


def invert_table(qg: QuasigroupTable) -> InverseTable:
    """For each row, map every symbol back to the column holding it."""
    n = qg.order
    inv = np.empty((n, n), dtype=np.uint8)
    np.put_along_axis(inv, qg.array.astype(np.intp),
                      np.broadcast_to(np.arange(n, dtype=np.uint8), (n, n)), axis=1)
    return InverseTable(n, tuple(row.tobytes() for row in inv))


def _check_symbols(order: int, seed: int, data: bytes) -> None:
    if not 0 <= seed < order:
        raise SymbolOutOfRangeError(f"seed {seed} outside 0..{order - 1}")
    if data and max(data) >= order:
        raise SymbolOutOfRangeError(f"symbol {max(data)} outside 0..{order - 1}")


def stream_encrypt(qg: QuasigroupTable, seed: int, message: Iterable[int]) -> bytes:
    """``c1 = seed . m1``, then ``ci = c(i-1) . mi``."""
    data = bytes(message)
    _check_symbols(qg.order, seed, data)
    rows = qg.rows
    out = bytearray(len(data))
    c = seed
    for i, m in enumerate(data):
        c = rows[c][m]
        out[i] = c
    return bytes(out)


def stream_decrypt(inv: InverseTable, seed: int, cipher: Iterable[int]) -> bytes:
    """``m1 = seed \\ c1``, then ``mi = c(i-1) \\ ci``."""
    data = bytes(cipher)
    _check_symbols(inv.order, seed, data)
    rows = inv.rows
    out = bytearray(len(data))
    prev = seed
    for i, c in enumerate(data):
        out[i] = rows[prev][c]
        prev = c
    return bytes(out)


# -- serialization ---------------------------------------------------------

def dumps_table(qg: QuasigroupTable) -> str:
    lines = [f"qg {qg.order}"]
    lines.extend(" ".join(str(v) for v in row) for row in qg.rows)
    return "\n".join(lines) + "\n"


def dumps_table_binary(qg: QuasigroupTable) -> bytes:
    return f"qgb {qg.order}\n".encode("ascii") + b"".join(qg.rows)


def loads_table(data: bytes | str) -> QuasigroupTable:
    """Parse either the text (``qg``) or binary (``qgb``) form and validate it."""
    if isinstance(data, str):
        data = data.encode("ascii")
    head, sep, body = data.partition(b"\n")
    parts = head.split()
    if not sep or len(parts) != 2 or parts[0] not in (b"qg", b"qgb"):
        raise TableFormatError("missing 'qg <order>' or 'qgb <order>' header")
    try:
        n = int(parts[1])
    except ValueError:
        raise TableFormatError(f"bad order in header: {parts[1]!r}") from None
    if not 1 <= n <= MAX_ORDER:
        raise OrderOutOfRangeError(f"order must be in 1..{MAX_ORDER}, got {n}")
    if parts[0] == b"qgb":
        if len(body) != n * n:
            raise TableFormatError(f"binary table body has {len(body)} bytes, expected {n * n}")
        matrix = [body[i * n:(i + 1) * n] for i in range(n)]
    else:
        lines = [ln for ln in body.decode("ascii").splitlines() if ln.strip()]
        if len(lines) != n:
            raise TableFormatError(f"expected {n} rows, found {len(lines)}")
        try:
            matrix = [[int(tok) for tok in ln.split()] for ln in lines]
        except ValueError as exc:
            raise TableFormatError(str(exc)) from None
    return validate_table(matrix)


def save_table(qg: QuasigroupTable, path: str | Path, binary: bool = False) -> None:
    path = Path(path)
    if binary:
        path.write_bytes(dumps_table_binary(qg))
    else:
        path.write_text(dumps_table(qg), encoding="ascii")


def load_table(path: str | Path) -> QuasigroupTable:
    return loads_table(Path(path).read_bytes())
