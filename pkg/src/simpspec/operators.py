"""Signed operators on (d-1)-forms, indexed by lexicographic (d-1)-cells."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, sqrt

import numpy as np

from .cells import ComplexSample, cell_array, lex_rank_array, sample_complex
from .errors import DomainError

__all__ = [
    "SymmetricOperator",
    "adjacency",
    "complete_adjacency",
    "coboundary",
    "laplacian_decomposition",
    "centered_H",
    "projection_compress",
    "kappa",
    "dump_matrix_csv",
]


@dataclass(frozen=True)
class SymmetricOperator:
    """Dense symmetric matrix over the canonical (d-1)-cells of K(d, n)."""

    matrix: np.ndarray = field(repr=False)
    n: int
    d: int
    kind: str
    p: float | None = None
    seed: int | None = None

    def __post_init__(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("operator matrix must be square")
        if m.shape[0] != comb(self.n, self.d):
            raise DomainError("operator size must equal C(n, d)")
        m.flags.writeable = False

    @property
    def size(self):
        return self.matrix.shape[0]

    @property
    def labels(self):
        return cell_array(self.n, self.d - 1) if self.d >= 1 else None

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def _face_ranks(cells, n):
    """Lex rank of each face of each d-cell row; column i drops vertex i."""
    k = cells.shape[1]
    cols = [lex_rank_array(np.delete(cells, i, axis=1), n) for i in range(k)]
    return np.stack(cols, axis=1)


def _signed_adjacency(cells, n, d):
    N = comb(n, d)
    A = np.zeros((N, N))
    if cells.shape[0] == 0:
        return A
    ranks = _face_ranks(cells, n)
    for i in range(d + 1):
        for j in range(i + 1, d + 1):
            # faces dropping positions i and j of the same d-cell
            A[ranks[:, i], ranks[:, j]] = -((-1) ** (i + j))
            A[ranks[:, j], ranks[:, i]] = -((-1) ** (i + j))
    return A


def adjacency(X: ComplexSample) -> SymmetricOperator:
    A = _signed_adjacency(X.present_cells(), X.n, X.d)
    return SymmetricOperator(A, X.n, X.d, "A", X.p, X.seed)


@lru_cache(maxsize=2)
def _complete_matrix(n, d):
    A = _signed_adjacency(cell_array(n, d), n, d)
    A.flags.writeable = False
    return A


def complete_adjacency(n, d) -> SymmetricOperator:
    """Adjacency of the complete d-complex K(d, n)."""
    if d < 1 or n < d + 1:
        raise DomainError(f"need d >= 1 and n >= d + 1, got n={n}, d={d}")
    return SymmetricOperator(_complete_matrix(n, d), n, d, "Abb", 1.0, None)


def coboundary(X: ComplexSample) -> np.ndarray:
    """Signed incidence from (d-1)-forms to the present d-cells.

    Row ``t`` of the result is the oriented boundary of the t-th present d-cell:
    ``+-1`` at each face rank, sign ``(-1)^i`` for the face dropping vertex i.
    """
    cells = X.present_cells()
    delta = np.zeros((cells.shape[0], X.num_faces))
    if cells.shape[0]:
        ranks = _face_ranks(cells, X.n)
        rows = np.arange(cells.shape[0])
        for i in range(X.d + 1):
            delta[rows, ranks[:, i]] = (-1) ** i
    return delta


def laplacian_decomposition(X: ComplexSample):
    """Degree operator D and upper Laplacian delta^T delta, so that A = D - Lup."""
    delta = coboundary(X)
    up = delta.T @ delta
    degree = np.diag(np.abs(delta).sum(axis=0))
    return (
        SymmetricOperator(degree, X.n, X.d, "D", X.p, X.seed),
        SymmetricOperator(up, X.n, X.d, "Dplus", X.p, X.seed),
    )


def _q(p):
    if not 0.0 < p < 1.0:
        raise DomainError(f"H is undefined for p={p}: q = p(1-p) = 0")
    return p * (1.0 - p)


def kappa(n, p):
    return sqrt(n * _q(p)) / (1.0 - p)


def centered_H(X: ComplexSample, A: SymmetricOperator | None = None) -> SymmetricOperator:
    """H = (A - p * Abb) / sqrt(n q)."""
    q = _q(X.p)
    if A is None:
        A = adjacency(X)
    full = complete_adjacency(X.n, X.d).matrix
    H = np.multiply(full, -X.p)
    H += A.matrix
    H /= sqrt(X.n * q)
    return SymmetricOperator(H, X.n, X.d, "H", X.p, X.seed)


def projection_compress(H: SymmetricOperator):
    """Return ``(P, PHP, kappa)`` with P = (Abb + d I) / n."""
    n, d = H.n, H.d
    full = complete_adjacency(n, d).matrix
    P = (full + d * np.eye(full.shape[0])) / n
    PHP = P @ H.matrix @ P
    PHP = (PHP + PHP.T) / 2.0  # round-off only; the exact product is symmetric
    return (
        SymmetricOperator(P, n, d, "P", H.p, H.seed),
        SymmetricOperator(PHP, n, d, "PHP", H.p, H.seed),
        kappa(n, H.p),
    )


def sample_operators(n, d, p, seed):
    """Convenience: sample X and return ``(X, A)``."""
    X = sample_complex(n, d, p, seed)
    return X, adjacency(X)


def dump_matrix_csv(op: SymmetricOperator, path):
    """Write nonzeros as ``row_index,col_index,value`` plus a ``.meta`` sidecar."""
    rows, cols = np.nonzero(op.matrix)
    with open(path, "w", newline="") as fh:
        fh.write("row_index,col_index,value\n")
        for r, c in zip(rows.tolist(), cols.tolist()):
            fh.write(f"{r},{c},{op.matrix[r, c]!r}\n")
    with open(f"{path}.meta", "w") as fh:
        fh.write(f"{op.n} {op.d} {op.p!r} {op.seed} {op.kind}\n")
