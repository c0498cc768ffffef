"""Expected spectral moments of H: word sums, full enumeration, and Monte Carlo.

All three compute E[(1/N) tr H^k] for H = (A - p Abb) / sqrt(nq).  The word
sum runs over closed walks of K(d, n) (or, when walks are too many, over
canonical classes weighted by exact orbit sizes); the full enumeration
averages over every presence pattern; Monte Carlo samples complexes.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from math import comb, sqrt

import numpy as np

from .bounds import catalan
from .cells import cell_array, lex_rank, sample_complex
from .errors import DomainError, ResourceError
from .operators import _signed_adjacency, centered_H
from .words import Word, enumerate_word_classes, orbit_size, orbit_size_bruteforce, word_statistics

__all__ = [
    "MomentReport",
    "central_moment_bernoulli",
    "term_T",
    "expected_moment_wordsum",
    "expected_moment_exact",
    "expected_moment_classsum",
    "monte_carlo_moments",
    "moment_reports",
    "limit_moment",
    "write_moments_csv",
    "resolve_threads",
    "WORDSUM_LIMIT",
    "EXACT_CELL_LIMIT",
]

WORDSUM_LIMIT = 10**8
EXACT_CELL_LIMIT = 22


def _check(n, d, p, k):
    if d < 1 or n < d + 1:
        raise DomainError(f"need d >= 1 and n >= d + 1, got n={n}, d={d}")
    if not 0.0 < p < 1.0:
        raise DomainError("moments of H need 0 < p < 1")
    if k < 0:
        raise DomainError("k must be >= 0")


def central_moment_bernoulli(m, p):
    """E[(chi - p)^m] for chi ~ Bernoulli(p)."""
    return (1 - p) * (-p) ** m + p * (1 - p) ** m


def limit_moment(k, d):
    """d^(k/2) C_(k/2) for even k, 0 for odd k."""
    return d ** (k // 2) * catalan(k // 2) if k % 2 == 0 else 0


def term_T(w: Word, n, p):
    """Contribution of one closed word to E[(1/N) tr H^k]."""
    if not w.closed:
        raise DomainError("T(w) is defined for closed words")
    st = word_statistics(w)
    q = p * (1 - p)
    value = 1.0
    for tau, count in st.cell_counts.items():
        value *= central_moment_bernoulli(count, p) * st.signs[tau]
    return value / (comb(n, w.d) * (n * q) ** (w.k / 2))


def _walk_tables(n, d):
    faces = cell_array(n, d - 1)
    N = faces.shape[0]
    A = _signed_adjacency(cell_array(n, d), n, d)
    nbrs = []
    for i in range(N):
        js = np.nonzero(A[i])[0]
        taus = [
            lex_rank(tuple(sorted(set(faces[i].tolist()) | set(faces[j].tolist()))), n)
            for j in js
        ]
        nbrs.append(list(zip(js.tolist(), A[i, js].astype(int).tolist(), taus)))
    return N, nbrs


def _walk_sum(n, d, p, k, restrict):
    N, nbrs = _walk_tables(n, d)
    q = p * (1 - p)
    mom = [central_moment_bernoulli(m, p) for m in range(k + 1)]
    counts = {}
    total = 0.0

    def rec(start, cur, steps, sign):
        nonlocal total
        if steps == k:
            if cur != start:
                return
            value = float(sign)
            for c in counts.values():
                if restrict and c == 1:
                    return
                value *= mom[c]
            total += value
            return
        for j, s, tau in nbrs[cur]:
            counts[tau] = counts.get(tau, 0) + 1
            rec(start, j, steps + 1, sign * s)
            if counts[tau] == 1:
                del counts[tau]
            else:
                counts[tau] -= 1

    for start in range(N):
        rec(start, start, 0, 1)
    return total / (N * (n * q) ** (k / 2))


def expected_moment_classsum(n, d, p, k, orbit="formula"):
    """Sum |[w]| T(w) over canonical classes of closed words with no d-cell crossed once.

    ``orbit="bruteforce"`` counts each class's words on K(d, n) exhaustively
    instead of using n(n-1)...(n-s+1)/d!.
    """
    _check(n, d, p, k)
    if k == 0:
        return 1.0
    total = 0.0
    for w in enumerate_word_classes(k, None, d):
        s = max(max(letter) for letter in w.letters)
        if s > n:
            continue
        size = orbit_size(n, s, d) if orbit == "formula" else orbit_size_bruteforce(w, n)
        total += size * term_T(w, n, p)
    return total


def expected_moment_wordsum(n, d, p, k, method="auto", restrict=True):
    """E[(1/N) tr H^k] as the sum of T(w) over closed words of length k+1.

    ``method="walks"`` enumerates actual walks on K(d, n) and enforces the
    guardrail (d(n-d))^k C(n, d) <= 1e8; ``"classes"`` sums over canonical
    classes with exact orbit sizes; ``"auto"`` picks walks when feasible.
    ``restrict=False`` keeps words with a d-cell crossed once (they add 0).
    """
    _check(n, d, p, k)
    if k == 0:
        return 1.0
    work = (d * (n - d)) ** k * comb(n, d)
    if method == "auto":
        method = "walks" if work <= WORDSUM_LIMIT else "classes"
    if method == "walks":
        if work > WORDSUM_LIMIT:
            raise ResourceError(f"word-sum guardrail: (d(n-d))^k C(n,d) = {work} > 1e8")
        return _walk_sum(n, d, p, k, restrict)
    if method == "classes":
        return expected_moment_classsum(n, d, p, k)
    raise DomainError(f"unknown method {method!r}")


def expected_moment_exact(n, d, p, k, chunk=4096):
    """Average (1/N) tr H^k over all 2^C(n, d+1) presence patterns, weighted by probability."""
    _check(n, d, p, k)
    M = comb(n, d + 1)
    if M > EXACT_CELL_LIMIT:
        raise ResourceError(f"exact-enumeration guardrail: C(n, d+1) = {M} > {EXACT_CELL_LIMIT}")
    cells = cell_array(n, d)
    N = comb(n, d)
    # B[t] is the signed adjacency contributed by the t-th d-cell alone
    B = np.stack([_signed_adjacency(cells[t : t + 1], n, d) for t in range(M)])
    scale = 1.0 / sqrt(n * p * (1 - p))
    total = 0.0
    for lo in range(0, 2**M, chunk):
        idx = np.arange(lo, min(lo + chunk, 2**M))
        chi = ((idx[:, None] >> np.arange(M)) & 1).astype(float)
        ones = chi.sum(axis=1)
        weight = p**ones * (1 - p) ** (M - ones)
        H = np.einsum("bt,tij->bij", (chi - p) * scale, B)
        traces = np.trace(np.linalg.matrix_power(H, k), axis1=1, axis2=2) / N
        total += float(np.dot(weight, traces))
    return total


@dataclass(frozen=True)
class MomentReport:
    n: int
    d: int
    p: float
    k: int
    value_wordsum: float | None
    value_exact: float | None
    value_mc: tuple | None  # (mean, stderr, trials)
    mc_variance: float | None
    limit_value: float

    def to_dict(self):
        return asdict(self)


def resolve_threads(threads=None):
    """Worker count: SIMPSPEC_THREADS beats the argument, which beats os.cpu_count()."""
    env = os.environ.get("SIMPSPEC_THREADS")
    if env:
        try:
            threads = int(env)
        except ValueError as exc:
            raise DomainError(f"SIMPSPEC_THREADS must be an integer, got {env!r}") from exc
    if threads is None:
        threads = os.cpu_count() or 1
    if threads < 1:
        raise DomainError("thread count must be >= 1")
    return threads


def trial_seed(seed, t):
    """Seed of trial t, derived deterministically from the run seed."""
    return int(np.random.SeedSequence([int(seed) & (2**64 - 1), t]).generate_state(1, np.uint64)[0])


def _sample_moments(n, d, p, k_max, seed):
    X = sample_complex(n, d, p, seed)
    N = X.num_faces
    if k_max <= 2:
        # every nonzero entry of H belongs to one d-cell, which owns d(d+1) of them
        chi = X.present.astype(float)
        frob = d * (d + 1) * float(np.sum((chi - p) ** 2)) / (n * p * (1 - p))
        return [0.0, frob / N][:k_max]
    w = np.linalg.eigvalsh(centered_H(X).matrix)
    out, power = [], np.ones_like(w)
    for _ in range(k_max):
        power = power * w
        out.append(float(power.mean()))
    return out


def monte_carlo_moments(n, d, p, k_max, trials, seed, threads=None):
    """Sample mean, variance and standard error of (1/N) tr H^k for k = 1..k_max."""
    _check(n, d, p, k_max)
    if trials < 2:
        raise DomainError("need trials >= 2")
    if k_max < 1:
        raise DomainError("k_max must be >= 1")
    seeds = [trial_seed(seed, t) for t in range(trials)]
    workers = resolve_threads(threads)

    def one(s):
        return _sample_moments(n, d, p, k_max, s)

    if workers == 1:
        rows = [one(s) for s in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, seeds))
    data = np.array(rows)
    mean = data.mean(axis=0)
    var = data.var(axis=0, ddof=1)
    out = []
    for i in range(k_max):
        k = i + 1
        out.append(
            MomentReport(
                n=n,
                d=d,
                p=p,
                k=k,
                value_wordsum=None,
                value_exact=None,
                value_mc=(float(mean[i]), float(sqrt(var[i] / trials)), trials),
                mc_variance=float(var[i]),
                limit_value=limit_moment(k, d),
            )
        )
    return out


def moment_reports(n, d, p, k_max, wordsum=True, exact=False, mc_trials=0, seed=0, threads=None):
    """One :class:`MomentReport` per k = 1..k_max with the requested columns filled."""
    _check(n, d, p, k_max)
    mc = monte_carlo_moments(n, d, p, k_max, mc_trials, seed, threads) if mc_trials else None
    out = []
    for k in range(1, k_max + 1):
        ws = expected_moment_wordsum(n, d, p, k) if wordsum else None
        ex = expected_moment_exact(n, d, p, k) if exact else None
        if ws is not None and ex is not None and abs(ws - ex) > 1e-10 * max(1.0, abs(ex)):
            raise ArithmeticError(f"word-sum {ws!r} and exact {ex!r} disagree at k={k}")
        out.append(
            MomentReport(
                n=n,
                d=d,
                p=p,
                k=k,
                value_wordsum=ws,
                value_exact=ex,
                value_mc=mc[k - 1].value_mc if mc else None,
                mc_variance=mc[k - 1].mc_variance if mc else None,
                limit_value=limit_moment(k, d),
            )
        )
    return out


def write_moments_csv(reports, fh):
    """Columns ``k,wordsum,exact,mc_mean,mc_stderr,limit``; empty cells for missing values."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["k", "wordsum", "exact", "mc_mean", "mc_stderr", "limit"])

    def fmt(x):
        return "" if x is None else repr(float(x))

    for r in reports:
        mean, err = (r.value_mc[0], r.value_mc[1]) if r.value_mc else (None, None)
        writer.writerow([r.k, fmt(r.value_wordsum), fmt(r.value_exact), fmt(mean), fmt(err), fmt(r.limit_value)])
