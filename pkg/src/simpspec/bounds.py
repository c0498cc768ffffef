"""Closed-form evaluators for the explicit constants and bounds of the confinement theory.

All probability bounds are returned raw; values above 1 are legitimate
outputs of the formulas and are left for callers to interpret.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from math import comb, e, exp, factorial, log, sqrt

from .errors import DomainError

__all__ = [
    "eval_error_E",
    "eval_error_script",
    "eval_gamma",
    "second_order_shift",
    "complete_spectrum",
    "theorem_intervals",
    "TheoremIntervals",
    "combinatorial_bounds",
    "closed_class_bound",
    "crude_class_bound",
    "fk_word_bound",
    "two_word_class_bound",
    "catalan",
]


def catalan(m):
    return comb(2 * m, m) // (m + 1)


def eval_error_E(xi, n, q, d):
    """Tail bound for P(||H|| > 2 sqrt(d) + xi)."""
    if xi <= 0:
        raise DomainError("xi must be positive")
    if n * q <= 0:
        raise DomainError("need nq > 0")
    r = 1.0 + xi / (2.0 * sqrt(d))
    prefactor = 2.0 * r**2 / factorial(d - 1)
    exponent = d * log(n) - ((2.0 / 3.0) * log(r)) ** 1.5 * (n * q / d) ** 0.25
    return prefactor * exp(exponent)


def eval_error_script(xi, n, d):
    """Tail bound for the compressed operator PHP at the Gamma scale."""
    if xi <= 0:
        raise DomainError("xi must be positive")
    if n < 3:
        raise DomainError("need n >= 3 so that log log n is defined and positive")
    prefactor = 4.0 * e**3 * d**2.5 / factorial(d - 1)
    return prefactor * exp(5.0 * log(2 * d + 2 * xi) + 5.0 * log(log(n)) - xi * log(n))


def eval_gamma(xi, n, q, d):
    """Half-width of the interval around np holding the top C(n-1, d-1) eigenvalues."""
    root = sqrt(n * q)
    if root <= 24 * d:
        raise DomainError(
            f"denominator nonpositive: sqrt(nq) = {root:.6g} <= 24d = {24 * d}"
        )
    return (
        6 * d
        + 200 * d**1.5 / (root - 24 * d)
        + 100 * d**3.5 * (d + xi) ** 3 * sqrt(q) * log(n) ** 3
    )


def second_order_shift(xi, n, p, d):
    """(2 sqrt(d) + xi)^2 / (kappa - 4 (2 sqrt(d) + xi)); None if the denominator is <= 0."""
    r = 2 * sqrt(d) + xi
    kap = sqrt(n * p * (1 - p)) / (1 - p)
    denom = kap - 4 * r
    return r * r / denom if denom > 0 else None


def complete_spectrum(n, d):
    """Eigenvalue/multiplicity pairs of the complete-complex adjacency."""
    if d < 1 or n < d + 1:
        raise DomainError(f"need d >= 1 and n >= d + 1, got n={n}, d={d}")
    return [(n - d, comb(n - 1, d - 1)), (-d, comb(n - 1, d))]


@dataclass(frozen=True)
class TheoremIntervals:
    n: int
    d: int
    p: float
    xi: float
    D: float
    bulk_basic: tuple
    bulk_refined: tuple
    top_basic: tuple
    top_refined: tuple | None
    gamma: float | None
    second_order_shift: float | None
    gap_predicted: float
    shift_small: bool
    hyp_nq_ge_1000d2: bool
    hyp_sqrt_nq_gt_24d: bool
    hyp_sixth_power: bool
    C_max_bulk: float
    C_max_top: float

    def to_dict(self):
        return asdict(self)


def theorem_intervals(n, d, p, xi, D=0.0):
    """Predicted intervals and the explicitly checkable hypothesis flags.

    The unspecified constant C of the main asymptotic theorem is never
    guessed; instead ``C_max_*`` is the largest C for which that
    hypothesis would hold at these parameters.
    """
    if not 0.0 < p < 1.0:
        raise DomainError("need 0 < p < 1")
    if xi <= 0:
        raise DomainError("xi must be positive")
    q = p * (1 - p)
    nq = n * q
    root = sqrt(nq)
    rd = sqrt(d)
    scale = sqrt(d * nq)
    try:
        gamma = eval_gamma(xi, n, q, d)
    except DomainError:
        gamma = None
    logn = log(n)
    part2_c = min(nq / ((1 + D) ** 4 * logn**4), 1.0 / ((1 + D) ** 6 * q * logn**6))
    return TheoremIntervals(
        n=n,
        d=d,
        p=p,
        xi=xi,
        D=D,
        bulk_basic=(scale * (-2 - xi), scale * (2 + xi)),
        bulk_refined=(-p * d + root * (-2 * rd - xi), -p * d + root * (2 * rd + xi)),
        top_basic=(n * p - 7 * d, n * p + 7 * d),
        top_refined=None if gamma is None else (n * p - gamma, n * p + gamma),
        gamma=gamma,
        second_order_shift=second_order_shift(xi, n, p, d),
        gap_predicted=n * p - 2 * scale,
        shift_small=p * d <= xi / (2 * root),
        hyp_nq_ge_1000d2=nq >= 1000 * d * d,
        hyp_sqrt_nq_gt_24d=root > 24 * d,
        hyp_sixth_power=nq >= d * (2 * d + 2 * xi) ** 6 * logn**6 / n,
        C_max_bulk=nq * min(xi**6, 1.0) / ((1 + D) ** 4 * logn**4),
        C_max_top=part2_c,
    )


def _check_word_range(k, s, d):
    if not d <= s <= k // 2 + d:
        raise DomainError(f"need d <= s <= floor(k/2) + d, got k={k}, s={s}, d={d}")


def closed_class_bound(k, s, d):
    """Upper bound on the number of classes of closed words with s support 0-cells."""
    _check_word_range(k, s, d)
    x = sqrt(d) / 2 * k**3
    terms = sum(x**m / factorial(m) for m in range(k - 2 * (s - d) + 1))
    return d * (2 * sqrt(d)) ** k * terms


def crude_class_bound(k, s, d):
    _check_word_range(k, s, d)
    return float(k ** (d * k))


def fk_word_bound(k, d):
    """Bound on classes of FK words of length k (k letters)."""
    return sqrt(d) / 2 * (2 * sqrt(d)) ** k


def two_word_class_bound(k, s, d):
    """Bound on classes of closed 2-words of length 2k+1 with s support 0-cells."""
    if not d <= s <= k + d:
        raise DomainError(f"need d <= s <= k + d, got k={k}, s={s}, d={d}")
    base = sqrt(d) * (2 * k + 1) ** 3
    return 2 * d * (4 * d) ** k * (2 * k + 1) * base ** (2 * k + 1 - (s - d))


def combinatorial_bounds(k, s, d):
    """All count bounds at (k, s, d) as a dict of floats."""
    _check_word_range(k, s, d)
    return {
        "k": k,
        "s": s,
        "d": d,
        "closed_classes": closed_class_bound(k, s, d),
        "crude_classes": crude_class_bound(k, s, d),
        "fk_words": fk_word_bound(k, d),
        "two_word_classes": two_word_class_bound(k, s, d),
    }
