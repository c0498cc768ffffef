"""Eigenvalues, spectral measures, semicircle comparison and confinement verdicts."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from math import asin, comb, pi, sqrt

import numpy as np
import scipy.sparse.linalg as spla

from . import bounds
from .errors import DomainError
from .operators import SymmetricOperator, adjacency, centered_H, complete_adjacency

__all__ = [
    "eigenvalues",
    "extreme_eigenvalues",
    "operator_norm",
    "compressed_norm",
    "SpectrumReport",
    "spectrum_report",
    "spectral_moments",
    "semicircle_cdf",
    "kolmogorov_distance",
    "ConfinementVerdict",
    "gap_and_confinement",
    "histogram",
    "interlacing_violation",
    "write_eigenvalues_csv",
    "write_histogram_csv",
]

# Dense eigensolves above this size are replaced by Lanczos for extreme eigenvalues.
DENSE_EXTREME_LIMIT = 3000


def _as_matrix(M):
    m = M.matrix if isinstance(M, SymmetricOperator) else np.asarray(M, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("expected a square matrix")
    if not np.array_equal(m, m.T):
        raise DomainError("matrix is not symmetric")
    return m


def eigenvalues(M, check_residual=False):
    """Full nondecreasing spectrum of a symmetric matrix.

    With ``check_residual`` the eigenvectors are also computed and every pair
    must satisfy ``||Mv - lv|| <= 1e-9 * max(1, ||M||_1)``.
    """
    m = _as_matrix(M)
    if m.shape[0] == 0:
        return np.zeros(0)
    if not check_residual:
        return np.linalg.eigvalsh(m)
    w, v = np.linalg.eigh(m)
    resid = np.linalg.norm(m @ v - v * w, axis=0).max()
    limit = 1e-9 * max(1.0, np.abs(m).sum(axis=0).max())
    if resid > limit:
        raise ArithmeticError(f"eigen-residual {resid:.3g} exceeds {limit:.3g}")
    return w


def extreme_eigenvalues(M):
    """``(lambda_min, lambda_max)``; Lanczos on large inputs, residual-checked."""
    m = _as_matrix(M)
    N = m.shape[0]
    if N <= DENSE_EXTREME_LIMIT:
        w = np.linalg.eigvalsh(m)
        return float(w[0]), float(w[-1])
    out = []
    limit = 1e-9 * max(1.0, np.abs(m).sum(axis=0).max())
    for which in ("SA", "LA"):
        v0 = np.full(N, 1.0 / sqrt(N))
        w, v = spla.eigsh(m, k=1, which=which, tol=1e-13, v0=v0, ncv=40)
        resid = np.linalg.norm(m @ v[:, 0] - w[0] * v[:, 0])
        if resid > limit:
            raise ArithmeticError(f"Lanczos residual {resid:.3g} exceeds {limit:.3g}")
        out.append(float(w[0]))
    return out[0], out[1]


def operator_norm(M):
    lo, hi = extreme_eigenvalues(M)
    return max(abs(lo), abs(hi))


def compressed_norm(H: SymmetricOperator):
    """||PHP|| through an orthonormal basis of im P, without forming PHP.

    P has exact rank C(n-1, d-1), so ``orth(P G)`` for a Gaussian block G of
    that width spans im P; then ||PHP|| = ||U^T H U||.
    """
    n, d = H.n, H.d
    rank = comb(n - 1, d - 1)
    full = complete_adjacency(n, d).matrix
    G = np.random.default_rng(0).standard_normal((H.size, rank))
    PG = (full @ G + d * G) / n
    U, _ = np.linalg.qr(PG)
    small = U.T @ (H.matrix @ U)
    small = (small + small.T) / 2.0
    w = np.linalg.eigvalsh(small)
    return float(max(abs(w[0]), abs(w[-1])))


@dataclass(frozen=True)
class SpectrumReport:
    """Sorted spectrum of one operator plus derived gap/moment/KS statistics."""

    eigenvalues: np.ndarray = field(repr=False)
    n: int
    d: int
    p: float | None
    seed: int | None
    kind: str
    gap: float
    bulk_edge: float
    moments: tuple
    ks_distance: float | None

    @property
    def split_index(self):
        """C(n-1, d): the number of bulk eigenvalues."""
        return comb(self.n - 1, self.d)

    def to_dict(self):
        out = asdict(self)
        out.pop("eigenvalues")
        out["moments"] = list(self.moments)
        out["N"] = int(self.eigenvalues.size)
        return out


def _default_scaling(kind, n, d, p):
    if p is None or not 0.0 < p < 1.0:
        return None
    if kind == "A":
        return 1.0 / sqrt(d * n * p * (1 - p))
    if kind == "H":
        return 1.0 / sqrt(d)
    return None


def spectrum_report(M: SymmetricOperator, k_max=4, eigs=None):
    """Build a :class:`SpectrumReport`; pass ``eigs`` to reuse a computed spectrum."""
    w = eigenvalues(M) if eigs is None else np.sort(np.asarray(eigs, dtype=float))
    split = comb(M.n - 1, M.d)
    gap = float(w[split] - w[split - 1]) if 0 < split < w.size else float("nan")
    scaling = _default_scaling(M.kind, M.n, M.d, M.p)
    ks = None if scaling is None else _ks(w * scaling)
    w.flags.writeable = False
    return SpectrumReport(
        eigenvalues=w,
        n=M.n,
        d=M.d,
        p=M.p,
        seed=M.seed,
        kind=M.kind,
        gap=gap,
        bulk_edge=float(w[split - 1]) if split > 0 else float("nan"),
        moments=tuple(_moments(w, k_max)),
        ks_distance=ks,
    )


def _eigs_of(report):
    if isinstance(report, SpectrumReport):
        return report.eigenvalues
    if isinstance(report, SymmetricOperator):
        return eigenvalues(report)
    return np.sort(np.asarray(report, dtype=float))


def _moments(w, k_max):
    out = [1.0]
    power = np.ones_like(w)
    for _ in range(k_max):
        power = power * w
        out.append(float(power.mean()))
    return out


def spectral_moments(report, k_max):
    """``[m_0, ..., m_kmax]`` with m_k = mean of lambda_i ** k."""
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    return _moments(_eigs_of(report), k_max)


def _semicircle_unit(x):
    if x <= -2.0:
        return 0.0
    if x >= 2.0:
        return 1.0
    return 0.5 + x * sqrt(4.0 - x * x) / (4.0 * pi) + asin(x / 2.0) / pi


def semicircle_cdf(x, scaled_to="unit", d=1):
    """CDF of the semicircle law on [-2, 2]; ``scaled_to="d"`` gives radius 2 sqrt(d)."""
    if scaled_to == "unit":
        return _semicircle_unit(float(x))
    if scaled_to == "d":
        return _semicircle_unit(float(x) / sqrt(d))
    raise DomainError(f"unknown scaling {scaled_to!r}")


def _ks(x):
    x = np.sort(x)
    N = x.size
    F = np.array([_semicircle_unit(v) for v in x])
    i = np.arange(1, N + 1)
    return float(max((i / N - F).max(), (F - (i - 1) / N).max()))


def kolmogorov_distance(report, scaling):
    """sup_x |empirical CDF of scaling * eigenvalues - semicircle CDF|."""
    if scaling <= 0:
        raise DomainError("scaling must be positive")
    return _ks(_eigs_of(report) * scaling)


@dataclass(frozen=True)
class ConfinementVerdict:
    n: int
    d: int
    p: float
    seed: int | None
    xi: float
    variant: str
    bulk_ok: bool
    top_ok: bool
    gap: float
    gap_predicted: float
    gap_relative_deviation: float
    bulk_interval: tuple
    top_interval: tuple
    bulk_range: tuple
    top_range: tuple

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def gap_and_confinement(report: SpectrumReport, xi, variant="basic"):
    """Check the two-interval confinement of the adjacency spectrum.

    ``basic``: bulk in sqrt(dnq)[-2-xi, 2+xi], top in np + [-7d, 7d].
    ``refined``: bulk in -pd + sqrt(nq)[-2 sqrt(d) - xi, 2 sqrt(d) + xi],
    top in np +- Gamma(xi, n); raises DomainError where Gamma is undefined.
    """
    if report.kind != "A":
        raise DomainError("confinement is stated for the adjacency spectrum")
    if xi <= 0:
        raise DomainError("xi must be positive")
    n, d, p = report.n, report.d, report.p
    iv = bounds.theorem_intervals(n, d, p, xi)
    if variant == "basic":
        bulk_iv, top_iv = iv.bulk_basic, iv.top_basic
    elif variant == "refined":
        if iv.top_refined is None:
            raise DomainError("Gamma(xi, n) undefined: sqrt(nq) <= 24d")
        bulk_iv, top_iv = iv.bulk_refined, iv.top_refined
    else:
        raise DomainError(f"unknown variant {variant!r}")
    w = report.eigenvalues
    split = report.split_index
    bulk, top = w[:split], w[split:]
    return ConfinementVerdict(
        n=n,
        d=d,
        p=p,
        seed=report.seed,
        xi=xi,
        variant=variant,
        bulk_ok=bool(bulk.min() >= bulk_iv[0] and bulk.max() <= bulk_iv[1]),
        top_ok=bool(top.min() >= top_iv[0] and top.max() <= top_iv[1]),
        gap=report.gap,
        gap_predicted=iv.gap_predicted,
        gap_relative_deviation=(report.gap - iv.gap_predicted) / iv.gap_predicted,
        bulk_interval=tuple(bulk_iv),
        top_interval=tuple(top_iv),
        bulk_range=(float(bulk.min()), float(bulk.max())),
        top_range=(float(top.min()), float(top.max())),
    )


def histogram(report, bins=80):
    """``[(bin_left, bin_right, count), ...]`` over the eigenvalue range."""
    if bins < 1:
        raise DomainError("bins must be >= 1")
    counts, edges = np.histogram(_eigs_of(report), bins=bins)
    return [(float(edges[i]), float(edges[i + 1]), int(c)) for i, c in enumerate(counts)]


def interlacing_violation(X, A=None):
    """Largest violation of l_i(H) <= l_i(Y) <= l_{i+r}(H), Y = (nq)^(-1/2)(A + pdI).

    Nonpositive means the interlacing holds; r = C(n-1, d-1).
    """
    if A is None:
        A = adjacency(X)
    H = eigenvalues(centered_H(X, A))
    nq = X.n * X.p * (1 - X.p)
    Y = eigenvalues(A) / sqrt(nq) + X.p * X.d / sqrt(nq)
    r = comb(X.n - 1, X.d - 1)
    lower = (H - Y).max()
    upper = (Y[: Y.size - r] - H[r:]).max() if r < Y.size else -np.inf
    return float(max(lower, upper))


def write_eigenvalues_csv(report, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "lambda"])
        for i, lam in enumerate(_eigs_of(report).tolist(), start=1):
            writer.writerow([i, repr(lam)])


def write_histogram_csv(report, path, bins=80):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_left", "bin_right", "count"])
        for left, right, count in histogram(report, bins):
            writer.writerow([repr(left), repr(right), count])
