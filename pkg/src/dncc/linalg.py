"""Gaussian elimination over GF(2^L): rank, row-space membership, solving.

Matrices are lists of rows, each row a list of field values (ints).  All
routines copy their input; nothing is mutated.  These are exact small-matrix
helpers for coding-matrix checks and per-pattern recoverability decisions,
not a bulk linear-algebra kernel.
"""

from __future__ import annotations

from .gf import GF


def row_reduce(field: GF, rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form.

    Returns (reduced_rows, pivot_cols); len(pivot_cols) is the rank.  Zero
    rows are kept at the bottom so callers may pass masked or empty rows
    freely.
    """
    work = [list(r) for r in rows]
    m = len(work)
    pivots: list[int] = []
    prow = 0
    for col in range(ncols):
        sel = next((r for r in range(prow, m) if work[r][col] != 0), None)
        if sel is None:
            continue
        work[prow], work[sel] = work[sel], work[prow]
        scale = field.inv(work[prow][col])
        work[prow] = [field.mul(scale, v) for v in work[prow]]
        for r in range(m):
            if r != prow and work[r][col] != 0:
                f = work[r][col]
                work[r] = [field.add(v, field.mul(f, p)) for v, p in zip(work[r], work[prow])]
        pivots.append(col)
        prow += 1
    return work, pivots


def rank(field: GF, rows: list[list[int]], ncols: int) -> int:
    return len(row_reduce(field, rows, ncols)[1])


def in_rowspan(field: GF, rows: list[list[int]], target: list[int]) -> bool:
    """True iff `target` is a GF-linear combination of `rows`."""
    ncols = len(target)
    reduced, pivots = row_reduce(field, rows, ncols)
    residual = list(target)
    for prow, col in enumerate(pivots):
        if residual[col] != 0:
            f = residual[col]
            residual = [field.add(v, field.mul(f, p)) for v, p in zip(residual, reduced[prow])]
    return all(v == 0 for v in residual)


def solve(field: GF, rows: list[list[int]], rhs: list[int]) -> list[int]:
    """Solve rows @ x = rhs for x; the system must determine x uniquely.

    Accepts any number of rows (redundant equations allowed) as long as the
    coefficient rank equals the column count and the system is consistent.
    """
    if len(rows) != len(rhs):
        raise ValueError("coefficient rows and right-hand side differ in length")
    if not rows:
        raise ValueError("empty system")
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = row_reduce(field, aug, ncols)
    if len(pivots) < ncols:
        raise ValueError(f"system is rank deficient (rank {len(pivots)} < {ncols})")
    # Inconsistency shows up as a nonzero augmented entry on a zero row.
    for r in range(len(pivots), len(reduced)):
        if reduced[r][ncols] != 0:
            raise ValueError("inconsistent system")
    x = [0] * ncols
    for prow, col in enumerate(pivots):
        x[col] = reduced[prow][ncols]
    return x
