"""Cells, orientations, lexicographic indexing and coupled Linial-Meshulam sampling.

Vertices are labelled ``1..n``.  A j-cell is stored as a strictly increasing
tuple of ``j + 1`` labels; the increasing order is the canonical (positive)
orientation.  Cell indices are lexicographic ranks, so index ``i`` of the
d-cells always refers to the same vertex set regardless of the caller.

Presence of a d-cell is decided by a keyed counter-based hash of
``(seed, d, vertices)``; no RNG stream is consumed, which makes samples
at different ``n`` coupled: the complex on ``1..n1`` is literally the
restriction of the complex on ``1..n2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .errors import DomainError

__all__ = [
    "Cell",
    "OrientedCell",
    "ComplexSample",
    "make_cell",
    "enumerate_cells",
    "cell_array",
    "lex_rank",
    "lex_rank_array",
    "induced_boundary",
    "sample_complex",
    "presence_uniforms",
    "neighbors",
    "dumps_sample",
    "loads_sample",
]

Cell = tuple  # strictly increasing tuple of vertex labels in 1..n

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def make_cell(vertices, n=None):
    """Return ``vertices`` as a canonical cell, validating the invariants."""
    cell = tuple(int(v) for v in vertices)
    if not cell:
        raise DomainError("a cell needs at least one vertex")
    if any(a >= b for a, b in zip(cell, cell[1:])):
        raise DomainError(f"cell vertices must be strictly increasing: {cell}")
    if cell[0] < 1 or (n is not None and cell[-1] > n):
        raise DomainError(f"cell vertices must lie in 1..{n}: {cell}")
    return cell


@dataclass(frozen=True)
class OrientedCell:
    """A cell together with a sign relative to its increasing vertex order."""

    vertices: Cell
    parity: int = 1

    def __post_init__(self):
        if self.parity not in (1, -1):
            raise DomainError(f"parity must be +1 or -1, got {self.parity}")
        object.__setattr__(self, "vertices", make_cell(self.vertices))

    @property
    def dimension(self):
        return len(self.vertices) - 1

    def flip(self):
        return OrientedCell(self.vertices, -self.parity)

    @classmethod
    def from_sequence(cls, seq):
        """Orientation of an arbitrary vertex ordering, e.g. ``[y, x, z]``."""
        seq = [int(v) for v in seq]
        order = sorted(range(len(seq)), key=seq.__getitem__)
        # parity of the sorting permutation via cycle decomposition
        sign, seen = 1, [False] * len(seq)
        for start in range(len(seq)):
            length, i = 0, start
            while not seen[i]:
                seen[i] = True
                i = order[i]
                length += 1
            if length and length % 2 == 0:
                sign = -sign
        return cls(tuple(sorted(seq)), sign)


def _check_dim(n, j):
    if not 0 <= j <= n - 1:
        raise DomainError(f"cell dimension j={j} out of range for n={n}")


def enumerate_cells(n, j):
    """All j-cells on ``1..n`` in lexicographic order."""
    _check_dim(n, j)
    return list(combinations(range(1, n + 1), j + 1))


@lru_cache(maxsize=32)
def _cell_array_cached(n, j):
    k = j + 1
    count = comb(n, k)
    flat = np.fromiter(
        (v for c in combinations(range(1, n + 1), k) for v in c),
        dtype=np.int64,
        count=count * k,
    )
    arr = flat.reshape(count, k)
    arr.flags.writeable = False
    return arr


def cell_array(n, j):
    """``enumerate_cells(n, j)`` as a read-only ``(C(n, j+1), j+1)`` int array."""
    _check_dim(n, j)
    return _cell_array_cached(n, j)


@lru_cache(maxsize=64)
def _binom_table(n, k):
    # table[a, b] = C(a, b) for 0 <= a <= n, 0 <= b <= k
    table = np.zeros((n + 1, k + 2), dtype=np.int64)
    for a in range(n + 1):
        for b in range(min(a, k + 1) + 1):
            table[a, b] = comb(a, b)
    table.flags.writeable = False
    return table


def lex_rank(cell, n):
    """Lexicographic rank of ``cell`` among all cells of its size on ``1..n``."""
    k = len(cell)
    return comb(n, k) - 1 - sum(comb(n - c, k - i) for i, c in enumerate(cell))


def lex_rank_array(cells, n):
    """Vectorised :func:`lex_rank` over the rows of an int array."""
    cells = np.asarray(cells, dtype=np.int64)
    k = cells.shape[1]
    table = _binom_table(n, k)
    total = np.zeros(cells.shape[0], dtype=np.int64)
    for i in range(k):
        total += table[n - cells[:, i], k - i]
    return comb(n, k) - 1 - total


def induced_boundary(tau):
    """Faces of an oriented cell with their induced orientations.

    Returns ``(face, position)`` pairs, where ``position`` is the index of
    the dropped vertex in the increasing order of ``tau``.
    """
    if not isinstance(tau, OrientedCell):
        tau = OrientedCell(tuple(tau))
    if tau.dimension < 1:
        raise DomainError("boundary is defined for cells of dimension >= 1")
    verts = tau.vertices
    out = []
    for i in range(len(verts)):
        face = verts[:i] + verts[i + 1:]
        out.append((OrientedCell(face, tau.parity * (-1) ** i), i))
    return out


def _splitmix(x):
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK64
    x = ((x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK64
    return x ^ (x >> np.uint64(31))


def presence_uniforms(cells, seed, d):
    """Uniform [0, 1) variates keyed by ``(seed, d, vertices)`` per row of ``cells``."""
    cells = np.asarray(cells, dtype=np.int64)
    with np.errstate(over="ignore"):
        key = np.full(cells.shape[0], np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF))
        key = _splitmix(key ^ np.uint64(d + 1) * _GOLDEN)
        for col in range(cells.shape[1]):
            key = _splitmix(key ^ cells[:, col].astype(np.uint64))
    return (key >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class ComplexSample:
    """One draw of X(d, n, p) with a complete (d-1)-skeleton.

    ``present[i]`` refers to the i-th d-cell in lexicographic order.
    """

    n: int
    d: int
    p: float
    seed: int
    present: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.present.shape != (comb(self.n, self.d + 1),):
            raise DomainError("presence bitset has the wrong length")

    @property
    def num_faces(self):
        """N = C(n, d), the number of (d-1)-cells."""
        return comb(self.n, self.d)

    def present_cells(self):
        return cell_array(self.n, self.d)[self.present]

    def contains(self, tau):
        tau = make_cell(tau, self.n)
        if len(tau) != self.d + 1:
            return False
        return bool(self.present[lex_rank(tau, self.n)])


def _validate_params(n, d, p):
    if d < 1:
        raise DomainError(f"dimension d must be >= 1, got {d}")
    if n < d + 1:
        raise DomainError(f"need n >= d + 1, got n={n}, d={d}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")


def sample_complex(n, d, p, seed):
    """Draw X(d, n, p); presence of each d-cell is a pure function of its key."""
    _validate_params(n, d, p)
    cells = cell_array(n, d)
    present = presence_uniforms(cells, seed, d) < p
    present.flags.writeable = False
    return ComplexSample(int(n), int(d), float(p), int(seed), present)


def neighbors(sigma, X):
    """Oriented (d-1)-cells adjacent to ``sigma`` through present d-cells."""
    if not isinstance(sigma, OrientedCell):
        sigma = OrientedCell(tuple(sigma))
    if len(sigma.vertices) != X.d:
        raise DomainError(f"expected a (d-1)-cell with {X.d} vertices")
    make_cell(sigma.vertices, X.n)
    out = []
    inside = set(sigma.vertices)
    for v in range(1, X.n + 1):
        if v in inside:
            continue
        tau = tuple(sorted(inside | {v}))
        if not X.present[lex_rank(tau, X.n)]:
            continue
        i = tau.index(v)
        for j, u in enumerate(tau):
            if u == v:
                continue
            other = tau[:j] + tau[j + 1:]
            sign = -((-1) ** (i + j))
            out.append(OrientedCell(other, sign * sigma.parity))
    return out


def dumps_sample(X):
    """Text form: header ``n d p seed`` then the hex bitset (LSB-first bytes)."""
    packed = np.packbits(X.present.astype(np.uint8), bitorder="little")
    return f"{X.n} {X.d} {X.p!r} {X.seed}\n{packed.tobytes().hex()}\n"


def loads_sample(text):
    header, _, body = text.strip().partition("\n")
    n_s, d_s, p_s, seed_s = header.split()
    n, d, p, seed = int(n_s), int(d_s), float(p_s), int(seed_s)
    _validate_params(n, d, p)
    raw = np.frombuffer(bytes.fromhex(body.strip()), dtype=np.uint8)
    count = comb(n, d + 1)
    if raw.size != (count + 7) // 8:
        raise DomainError("bitset length does not match C(n, d+1)")
    bits = np.unpackbits(raw, bitorder="little")[:count].astype(bool)
    bits.flags.writeable = False
    return ComplexSample(n, d, p, seed, bits)
