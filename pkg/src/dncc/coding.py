"""Coding-matrix construction for network-coded cooperation.

The transmission of N source packets plus M relay combinations is described
by an (N+M) x N matrix over GF(2^L): an N x N identity on top (direct
transmissions) and M rows of combining coefficients below.  A destination
can recover all packets from any subset of received rows whose rank is N,
so the design goal is maximal row Kruskal rank: every N rows independent.

`build_mds_matrix` achieves that with a Cauchy block, whose square
submatrices are all nonsingular; `kruskal_rank` verifies any matrix by
exhaustive subset enumeration.
"""

from __future__ import annotations

import hashlib
from itertools import combinations

from . import linalg
from .gf import GF, DEFAULT_POLYS


class InfeasibleError(Exception):
    """A requested construction or computation cannot be carried out."""


def min_extension_degree(N: int, M: int) -> int:
    """Smallest L with 2^L >= N + M (enough distinct Cauchy points)."""
    L = 1
    while (1 << L) < N + M:
        L += 1
    return L


class CodingMatrix:
    """Immutable (N+M) x N coefficient matrix with identity top block."""

    def __init__(self, N: int, M: int, field: GF, rows):
        if N < 1 or M < 0:
            raise ValueError(f"need N >= 1 and M >= 0, got N={N}, M={M}")
        rows = tuple(tuple(field.validate(v) for v in row) for row in rows)
        if len(rows) != N + M or any(len(r) != N for r in rows):
            raise ValueError(f"expected {N + M} rows of {N} entries")
        for i in range(N):
            expect = tuple(1 if j == i else 0 for j in range(N))
            if rows[i] != expect:
                raise ValueError(f"row {i} is not the identity row e_{i}")
        self.N = N
        self.M = M
        self.field = field
        self.rows = rows

    @property
    def relay_rows(self) -> tuple[tuple[int, ...], ...]:
        return self.rows[self.N:]

    def encode(self, theta: list[int]) -> list[int]:
        """All N+M transmitted values for source packets `theta`.

        The first N outputs repeat `theta`; the rest are the relay
        combinations.
        """
        if len(theta) != self.N:
            raise ValueError(f"expected {self.N} source packets, got {len(theta)}")
        f = self.field
        theta = [f.validate(v) for v in theta]
        out = []
        for row in self.rows:
            acc = 0
            for c, v in zip(row, theta):
                acc = f.add(acc, f.mul(c, v))
            out.append(acc)
        return out

    # -- plain-text interchange -------------------------------------------

    def to_text(self) -> str:
        """Header 'N M L poly' then one space-separated row per line."""
        lines = [f"{self.N} {self.M} {self.field.L} {self.field.poly}"]
        lines += [" ".join(str(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CodingMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty matrix file")
        try:
            N, M, L, poly = (int(t) for t in lines[0].split())
        except ValueError as exc:
            raise ValueError(f"bad matrix header {lines[0]!r}: want 'N M L poly'") from exc
        rows = [[int(t) for t in ln.split()] for ln in lines[1:]]
        return cls(N, M, GF(L, poly), rows)

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "CodingMatrix":
        with open(path, encoding="ascii") as fh:
            return cls.from_text(fh.read())

    def content_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode("ascii")).hexdigest()

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CodingMatrix)
            and self.field == other.field
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.field, self.rows))

    def __repr__(self) -> str:
        return f"CodingMatrix(N={self.N}, M={self.M}, field={self.field!r})"


def build_mds_matrix(N: int, M: int, field: GF) -> CodingMatrix:
    """Identity atop an M x N Cauchy block; every N rows are independent.

    The Cauchy entries are inv(x_i ^ y_j) over the disjoint point sets
    x_i = i for i < M and y_j = M + j for j < N, so the construction needs
    q >= N + M distinct elements.
    """
    if field.q < N + M:
        raise InfeasibleError(
            f"GF(2^{field.L}) has only {field.q} elements; the construction "
            f"needs q >= N+M = {N + M} (minimum L = {min_extension_degree(N, M)})"
        )
    ident = [[1 if j == i else 0 for j in range(N)] for i in range(N)]
    cauchy = [
        [field.inv(field.add(i, M + j)) for j in range(N)]
        for i in range(M)
    ]
    return CodingMatrix(N, M, field, ident + cauchy)


def default_field(N: int, M: int, L: int | None = None, poly: int | None = None) -> GF:
    """Field for a scenario: explicit L/poly, else the smallest feasible L."""
    if L is None:
        if poly is not None:
            raise ValueError("poly given without L")
        L = min_extension_degree(N, M)
        if L not in DEFAULT_POLYS:
            raise InfeasibleError(f"N+M = {N + M} exceeds the largest built-in field")
    return GF(L, poly)


def kruskal_rank(A: CodingMatrix) -> int:
    """Largest r such that every r-subset of rows is linearly independent.

    Exhaustive over row subsets, so cost grows as C(N+M, r); intended for
    matrices with N+M up to ~16.  Returns 0 when any row is zero.
    """
    K = len(A.rows)
    bound = min(K, A.N)
    kappa = 0
    for r in range(1, bound + 1):
        for subset in combinations(range(K), r):
            sub = [list(A.rows[i]) for i in subset]
            if linalg.rank(A.field, sub, A.N) < r:
                return kappa
        kappa = r
    return kappa


def find_dependent_subset(A: CodingMatrix, size: int) -> tuple[int, ...] | None:
    """First row subset of the given size that is linearly dependent."""
    for subset in combinations(range(len(A.rows)), size):
        sub = [list(A.rows[i]) for i in subset]
        if linalg.rank(A.field, sub, A.N) < len(subset):
            return subset
    return None
