"""Paired nonparametric inference: Wilcoxon signed-rank, Holm-Bonferroni,
median-difference effect sizes, and normal confidence intervals.

The Wilcoxon test drops zero differences, assigns average ranks to tied
absolute values, and uses the exact null distribution (dynamic program over
sign assignments, ties included) for small samples, switching to a normal
approximation with tie-corrected variance and 0.5 continuity correction
above ``EXACT_CUTOFF`` nonzero pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateSampleError, InsufficientDataError, ValidationError
from .validation import check_probability

#: Largest number of nonzero pairs evaluated with the exact null distribution.
EXACT_CUTOFF = 25

#: Fewest nonzero pairs accepted for any inferential use.
MIN_PAIRS = 5


@dataclass(frozen=True)
class PairedSample:
    """Per-image score differences (a - b) between two methods."""

    label_a: str
    label_b: str
    diffs: tuple[float, ...]


class WilcoxonResult(NamedTuple):
    w_statistic: float  # W+, the positive-rank sum
    p_value: float  # two-sided
    n_nonzero: int
    n_zeros_dropped: int
    method: str  # "exact" or "normal"


class HolmResult(NamedTuple):
    adjusted: tuple[float, ...]  # in input order
    reject: tuple[bool, ...]


def _signed_ranks(absdiffs: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Average ranks of |d| (1-based) and the tie-group sizes."""
    n = len(absdiffs)
    order = np.argsort(absdiffs, kind="stable")
    sorted_abs = absdiffs[order]
    ranks = np.empty(n, dtype=np.float64)
    tie_sizes: list[int] = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and sorted_abs[j + 1] == sorted_abs[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j + 2) / 2.0
        tie_sizes.append(j - i + 1)
        i = j + 1
    return ranks, tie_sizes


@lru_cache(maxsize=256)
def _exact_null_counts(doubled_ranks: tuple[int, ...]) -> np.ndarray:
    """Counts of sign assignments per achievable doubled positive-rank sum."""
    total = sum(doubled_ranks)
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled_ranks:
        shifted = counts.copy()
        shifted[r:] += counts[: len(counts) - r]
        counts = shifted
    return counts


def _exact_p(w_plus: float, ranks: np.ndarray) -> float:
    # Doubling makes tie-averaged ranks integral; probabilities stay exact
    # because every count and 2**n are dyadic.
    doubled = tuple(sorted(int(round(2 * r)) for r in ranks))
    counts = _exact_null_counts(doubled)
    w2 = int(round(2 * w_plus))
    n = len(ranks)
    lo = int(counts[: w2 + 1].sum()) / 2**n
    hi = int(counts[w2:].sum()) / 2**n
    return min(1.0, 2.0 * min(lo, hi))


def _normal_p(w_plus: float, ranks: np.ndarray, tie_sizes: Sequence[int]) -> float:
    n = len(ranks)
    mu = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - sum(t**3 - t for t in tie_sizes) / 48.0
    sigma = math.sqrt(variance)
    z = max(abs(w_plus - mu) - 0.5, 0.0) / sigma
    return math.erfc(z / math.sqrt(2.0))


def wilcoxon_signed_rank(diffs: Sequence[float], *, mode: str = "auto") -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on paired differences.

    Returns W+ (the positive-rank sum). ``mode`` may be "auto", "exact",
    or "normal"; "auto" selects the exact path for at most
    ``EXACT_CUTOFF`` nonzero pairs.
    """
    if mode not in ("auto", "exact", "normal"):
        raise ValueError(f"unknown mode {mode!r}")
    d = np.asarray(tuple(diffs), dtype=np.float64)
    if d.ndim != 1:
        raise ValidationError("diffs must be one-dimensional")
    if len(d) and not np.all(np.isfinite(d)):
        raise ValidationError("diffs contain non-finite values")
    nonzero = d[d != 0.0]
    n_zeros = len(d) - len(nonzero)
    n = len(nonzero)
    if len(d) and n == 0:
        raise DegenerateSampleError("all paired differences are zero")
    if n < MIN_PAIRS:
        raise InsufficientDataError(f"need at least {MIN_PAIRS} nonzero differences, got {n}")

    ranks, tie_sizes = _signed_ranks(np.abs(nonzero))
    w_plus = float(ranks[nonzero > 0].sum())
    use_exact = mode == "exact" or (mode == "auto" and n <= EXACT_CUTOFF)
    if use_exact:
        if n > 50:
            raise ValueError("exact mode is limited to 50 nonzero pairs")
        p = _exact_p(w_plus, ranks)
        return WilcoxonResult(w_plus, p, n, n_zeros, "exact")
    return WilcoxonResult(w_plus, _normal_p(w_plus, ranks, tie_sizes), n, n_zeros, "normal")


def holm_bonferroni(p_values: Sequence[float], alpha: float = 0.05) -> HolmResult:
    """Step-down Holm-Bonferroni adjustment; results follow input order.

    adjusted_(i) = max_{j<=i} min(1, (m-j+1) * p_(j)) over the ascending
    sort; a hypothesis is rejected iff its adjusted p-value is <= alpha.
    """
    ps = [check_probability(p, "p-value") for p in p_values]
    if not ps:
        raise ValueError("holm_bonferroni needs at least one p-value")
    check_probability(alpha, "alpha")
    m = len(ps)
    order = sorted(range(m), key=lambda i: ps[i])
    adjusted = [0.0] * m
    running = 0.0
    for pos, i in enumerate(order):
        running = max(running, min(1.0, (m - pos) * ps[i]))
        adjusted[i] = running
    reject = tuple(a <= alpha for a in adjusted)
    return HolmResult(tuple(adjusted), reject)


def effect_size_median_diff(diffs: Sequence[float]) -> float:
    """Median of paired differences (even length averages the middle two)."""
    d = np.asarray(tuple(diffs), dtype=np.float64)
    if d.size == 0:
        raise InsufficientDataError("cannot take the median of an empty sample")
    return float(np.median(d))


@dataclass(frozen=True)
class ConfidenceInterval:
    """Symmetric normal-theory interval: mean +/- half_width."""

    mean: float
    half_width: float
    level: float = 0.95
    degenerate: bool = False


def normal_ci(scores: Sequence[float], level: float = 0.95) -> ConfidenceInterval:
    """mean +/- z_{(1+level)/2} * sample_std / sqrt(n), std with n-1."""
    x = np.asarray(tuple(scores), dtype=np.float64)
    if x.size < 2:
        raise InsufficientDataError("confidence interval needs at least 2 observations")
    lvl = float(level)
    if not (0.0 < lvl < 1.0):
        raise ValueError(f"confidence level must be in (0, 1), got {level}")
    z = NormalDist().inv_cdf((1.0 + lvl) / 2.0)
    # constant samples must give a zero width, not summation noise
    std = 0.0 if np.all(x == x[0]) else float(x.std(ddof=1))
    return ConfidenceInterval(float(x.mean()), z * std / math.sqrt(x.size), lvl)


@dataclass(frozen=True)
class PairwiseTestResult:
    """One corrected pairwise comparison within a method family."""

    method_a: str
    method_b: str
    w_statistic: float
    p_raw: float
    p_adjusted: float
    effect_size: float  # median of per-image (a - b) differences
    significant: bool
    degenerate: bool = False  # all-zero differences; reported non-significant
    n_zeros_dropped: int = 0


def run_pairwise_family(
    per_method_scores: Mapping[str, Mapping[str, float]],
    alpha: float = 0.05,
) -> list[PairwiseTestResult]:
    """All C(k,2) Wilcoxon comparisons, Holm-corrected as one family.

    ``per_method_scores`` maps method_id -> {image_id: score}; every method
    must cover the same image set. Results are ordered lexicographically by
    (method_a, method_b). Degenerate pairs (identical score lists) are kept
    in the family with p = 1 and flagged.
    """
    methods = sorted(per_method_scores)
    if len(methods) < 2:
        raise InsufficientDataError("pairwise comparison needs at least 2 methods")
    image_ids = sorted(per_method_scores[methods[0]])
    for m in methods[1:]:
        if sorted(per_method_scores[m]) != image_ids:
            raise ValidationError(f"method {m!r} covers a different image set")

    rows: list[dict] = []
    for i, a in enumerate(methods):
        for b in methods[i + 1 :]:
            sample = PairedSample(
                a, b, tuple(per_method_scores[a][img] - per_method_scores[b][img] for img in image_ids)
            )
            effect = effect_size_median_diff(sample.diffs)
            try:
                res = wilcoxon_signed_rank(sample.diffs)
                rows.append(
                    dict(a=a, b=b, w=res.w_statistic, p=res.p_value, eff=effect,
                         degen=False, zeros=res.n_zeros_dropped)
                )
            except (DegenerateSampleError, InsufficientDataError):
                # all-zero or too-few pairs: keep the comparison in the family,
                # flagged and never significant
                zeros = sum(1 for d in sample.diffs if d == 0.0)
                rows.append(dict(a=a, b=b, w=0.0, p=1.0, eff=effect, degen=True, zeros=zeros))

    holm = holm_bonferroni([r["p"] for r in rows], alpha)
    return [
        PairwiseTestResult(
            method_a=r["a"],
            method_b=r["b"],
            w_statistic=r["w"],
            p_raw=r["p"],
            p_adjusted=holm.adjusted[i],
            effect_size=r["eff"],
            significant=bool(holm.reject[i]) and not r["degen"],
            degenerate=r["degen"],
            n_zeros_dropped=r["zeros"],
        )
        for i, r in enumerate(rows)
    ]
