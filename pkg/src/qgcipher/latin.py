"""Exhaustive counting of reduced Latin squares for small orders."""

from .errors import OrderTooLargeForExhaustiveError

MAX_EXHAUSTIVE_ORDER = 6


def count_reduced_latin_squares(n: int) -> int:
    """Number of order-``n`` Latin squares whose first row and column read 0..n-1.

    Backtracking over cells in row-major order with per-row and per-column
    bitmasks of used symbols. Orders above 6 are refused; n=7 alone has
    about 1.7e7 solutions.
    """
    if n < 1:
        raise ValueError("order must be at least 1")
    if n > MAX_EXHAUSTIVE_ORDER:
        raise OrderTooLargeForExhaustiveError(
            f"exhaustive count limited to n <= {MAX_EXHAUSTIVE_ORDER}, got {n}"
        )
    if n <= 2:
        return 1
    full = (1 << n) - 1
    # row i starts with symbol i; column j starts with symbol j
    row_used = [1 << i for i in range(n)]
    col_used = [1 << j for j in range(n)]
    row_used[0] = full
    cells = [(i, j) for i in range(1, n) for j in range(1, n)]
    last = len(cells)

    def fill(k: int) -> int:
        if k == last:
            return 1
        i, j = cells[k]
        free = full & ~(row_used[i] | col_used[j])
        total = 0
        while free:
            bit = free & -free
            free ^= bit
            row_used[i] |= bit
            col_used[j] |= bit
            total += fill(k + 1)
            row_used[i] ^= bit
            col_used[j] ^= bit
        return total

    return fill(0)
