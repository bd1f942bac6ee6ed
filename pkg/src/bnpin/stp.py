"""Semi-tensor product algebra over logical matrices.

Every matrix handled here is logical: each column is a canonical basis
vector, so a matrix is just ``rows`` plus one integer per column. Products
reduce to index arithmetic and never materialize dense arrays.

Delta encoding used across the package: TRUE is ``delta_2^1`` and FALSE is
``delta_2^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

__all__ = [
    "LogicalMatrix",
    "SizeCapExceeded",
    "DEFAULT_MAX_COLS",
    "delta",
    "delta_vector",
    "identity",
    "ones_row",
    "stp",
    "stp_chain",
    "kron",
    "transpose",
    "swap_matrix",
    "power_reducing_matrix",
    "dummy_matrix",
    "NEGATION",
]

DEFAULT_MAX_COLS = 1 << 24


class SizeCapExceeded(ValueError):
    """Raised when a product would exceed the configured column cap."""


@dataclass(frozen=True, eq=False)
class LogicalMatrix:
    """A ``rows x cols`` logical matrix stored as 1-based column indices.

    ``col_index[k] == r`` means column ``k`` is ``delta_rows^r``.
    """

    rows: int
    col_index: np.ndarray = field(repr=False)

    def __post_init__(self):
        idx = np.ascontiguousarray(self.col_index, dtype=np.int64)
        if idx.ndim != 1 or idx.size == 0:
            raise ValueError("col_index must be a non-empty 1-d array")
        if self.rows < 1:
            raise ValueError("rows must be positive")
        if idx.min() < 1 or idx.max() > self.rows:
            raise ValueError(f"column indices must lie in [1, {self.rows}]")
        idx.setflags(write=False)
        object.__setattr__(self, "col_index", idx)

    @property
    def cols(self) -> int:
        return int(self.col_index.size)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_permutation(self) -> bool:
        if self.rows != self.cols:
            return False
        return np.array_equal(np.sort(self.col_index), np.arange(1, self.rows + 1))

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.int64)
        out[self.col_index - 1, np.arange(self.cols)] = 1
        return out

    def __eq__(self, other):
        if not isinstance(other, LogicalMatrix):
            return NotImplemented
        return self.rows == other.rows and np.array_equal(self.col_index, other.col_index)

    def __hash__(self):
        return hash((self.rows, self.col_index.tobytes()))

    def __matmul__(self, other: "LogicalMatrix") -> "LogicalMatrix":
        return stp(self, other)

    def __str__(self):
        body = ",".join(str(int(i)) for i in self.col_index)
        return f"delta_{self.rows}[{body}]"

    __repr__ = __str__


def delta(rows: int, indices: Iterable[int]) -> LogicalMatrix:
    """``delta(2, [1, 2, 2, 2])`` is the matrix written δ_2[1,2,2,2]."""
    return LogicalMatrix(rows, np.fromiter(indices, dtype=np.int64))


def delta_vector(dim: int, index: int) -> LogicalMatrix:
    """The column vector δ_dim^index as a ``dim x 1`` logical matrix."""
    return LogicalMatrix(dim, np.array([index], dtype=np.int64))


def identity(n: int) -> LogicalMatrix:
    return LogicalMatrix(n, np.arange(1, n + 1, dtype=np.int64))


def ones_row(n: int) -> LogicalMatrix:
    """The row vector of ``n`` ones; logical with a single row."""
    return LogicalMatrix(1, np.ones(n, dtype=np.int64))


def _check_cap(cols: int, max_cols: int) -> None:
    if cols > max_cols:
        raise SizeCapExceeded(f"result would have {cols} columns (cap {max_cols})")


def _product(a: LogicalMatrix, b: LogicalMatrix) -> LogicalMatrix:
    # conventional product, cols(a) == rows(b)
    return LogicalMatrix(a.rows, a.col_index[b.col_index - 1])


def kron(a: LogicalMatrix, b: LogicalMatrix, max_cols: int = DEFAULT_MAX_COLS) -> LogicalMatrix:
    cols = a.cols * b.cols
    _check_cap(cols, max_cols)
    hi = (a.col_index - 1)[:, None] * b.rows
    lo = (b.col_index - 1)[None, :]
    return LogicalMatrix(a.rows * b.rows, (hi + lo).ravel() + 1)


def _kron_identity(a: LogicalMatrix, k: int, max_cols: int) -> LogicalMatrix:
    if k == 1:
        return a
    return kron(a, identity(k), max_cols)


def stp(a: LogicalMatrix, b: LogicalMatrix, max_cols: int = DEFAULT_MAX_COLS) -> LogicalMatrix:
    """Left semi-tensor product ``(a ⊗ I_{α/n})(b ⊗ I_{α/p})``, α = lcm(n, p)."""
    n, p = a.cols, b.rows
    alpha = math.lcm(n, p)
    _check_cap(b.cols * (alpha // p), max_cols)
    left = _kron_identity(a, alpha // n, max_cols)
    right = _kron_identity(b, alpha // p, max_cols)
    return _product(left, right)


def stp_chain(*mats: LogicalMatrix, max_cols: int = DEFAULT_MAX_COLS) -> LogicalMatrix:
    out = mats[0]
    for m in mats[1:]:
        out = stp(out, m, max_cols)
    return out


def transpose(a: LogicalMatrix) -> LogicalMatrix:
    """Transpose of a permutation matrix, i.e. its inverse."""
    if not a.is_permutation():
        raise ValueError("transpose is only defined here for permutation matrices")
    inv = np.empty(a.cols, dtype=np.int64)
    inv[a.col_index - 1] = np.arange(1, a.cols + 1)
    return LogicalMatrix(a.rows, inv)


def swap_matrix(p: int, m: int, max_cols: int = DEFAULT_MAX_COLS) -> LogicalMatrix:
    """W_[p,m], satisfying ``u ⋉ v = W_[p,m] ⋉ v ⋉ u`` for u ∈ Δ_m, v ∈ Δ_p."""
    if p < 1 or m < 1:
        raise ValueError("p and m must be positive")
    _check_cap(p * m, max_cols)
    # column (j-1)*m + i is δ_m^i ⋉ δ_p^j = δ_{mp}^{(i-1)p + j}
    j, i = np.meshgrid(np.arange(p), np.arange(m), indexing="ij")
    return LogicalMatrix(m * p, (i * p + j).ravel() + 1)


def power_reducing_matrix(n: int, max_cols: int = DEFAULT_MAX_COLS) -> LogicalMatrix:
    """M_{r,n} with ``η ⋉ η = M_{r,n} η`` for η ∈ Δ_n."""
    if n < 1:
        raise ValueError("n must be positive")
    _check_cap(n, max_cols)
    i = np.arange(n, dtype=np.int64)
    return LogicalMatrix(n * n, i * n + i + 1)


def dummy_matrix() -> LogicalMatrix:
    """D = δ_2[1,2,1,2]: discards the first of two Boolean factors."""
    return delta(2, [1, 2, 1, 2])


NEGATION = delta(2, [2, 1])
