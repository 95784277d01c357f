"""Threshold-selection-bias diagnostics.

Relative difference of AUC-IoU against a single-threshold IoU,
(AUC - IoU(tau)) / IoU(tau) * 100, the performance swing between the
extreme thresholds 0.3 and 0.7, per-method bias rows with a
Holm-corrected family of AUC-vs-IoU(tau) tests, and ranking-reversal
detection between evaluation criteria.

Zero-denominator relative differences propagate as ``None`` markers,
never as infinities.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum
from typing import Mapping, Sequence

from .errors import DegenerateSampleError, InsufficientDataError, ValidationError
from .metrics import IoUCurve
from .stats import holm_bonferroni, wilcoxon_signed_rank

#: Thresholds conventionally reported alongside AUC.
DEFAULT_TAUS_OF_INTEREST = (0.3, 0.5, 0.7)

#: Thresholds whose relative differences define the performance swing.
SWING_LOW = 0.3
SWING_HIGH = 0.7


def relative_difference(auc: float, iou_tau: float) -> float | None:
    """Percentage gap of a single-threshold IoU from the threshold-free score.

    Returns ``None`` when ``iou_tau`` is zero (undefined marker).
    """
    if iou_tau < 0:
        raise ValueError(f"iou_tau must be >= 0, got {iou_tau}")
    if iou_tau == 0:
        return None
    return (auc - iou_tau) / iou_tau * 100.0


def performance_swing(rel_low: float | None, rel_high: float | None) -> float | None:
    """|rel_diff(0.3) - rel_diff(0.7)| in percentage points; None propagates."""
    if rel_low is None or rel_high is None:
        return None
    return abs(rel_low - rel_high)


@dataclass(frozen=True)
class ThresholdBiasRow:
    """Per-method bias summary across the full threshold grid."""

    method_id: str
    auc_mean: float
    iou_at: dict[float, float]  # tau -> mean IoU
    rel_diff_at: dict[float, float | None]  # tau -> percentage (None if undefined)
    swing: float | None  # |rel@0.3 - rel@0.7| in percentage points
    p_adjusted_at: dict[float, float]  # tau -> Holm-adjusted p, AUC vs IoU(tau)


def _mean(values: Sequence[float]) -> float:
    return fsum(values) / len(values)


def threshold_bias_table(
    per_image_curves: Mapping[str, Mapping[str, IoUCurve]],
    taus_of_interest: Sequence[float] = DEFAULT_TAUS_OF_INTEREST,
    *,
    alpha: float = 0.05,
) -> list[ThresholdBiasRow]:
    """Build bias rows for every method, ordered by method_id.

    For each method and every grid threshold, a Wilcoxon signed-rank test
    compares per-image AUC against per-image IoU(tau); all method x
    threshold tests are Holm-corrected as a single family. Methods whose
    per-image curves are constant produce all-zero differences; those
    tests are reported non-significant (p = 1).
    """
    if not per_image_curves:
        raise InsufficientDataError("no methods supplied")
    methods = sorted(per_image_curves)
    first = per_image_curves[methods[0]]
    if not first:
        raise InsufficientDataError("no images supplied")
    image_ids = sorted(first)
    grid = next(iter(first.values())).grid
    for m in methods:
        if sorted(per_image_curves[m]) != image_ids:
            raise ValidationError(f"method {m!r} covers a different image set")
        for curve in per_image_curves[m].values():
            if curve.grid.taus != grid.taus:
                raise ValidationError("all curves must share one threshold grid")
    for tau in taus_of_interest:
        grid.index_of(tau)  # raises if off-grid

    # One family across all methods and all grid thresholds.
    p_raw: list[float] = []
    per_method_stats: dict[str, dict] = {}
    for m in methods:
        curves = [per_image_curves[m][img] for img in image_ids]
        aucs = [c.auc for c in curves]
        iou_at: dict[float, float] = {}
        for k, tau in enumerate(grid.taus):
            iou_at[tau] = _mean([c.ious[k] for c in curves])
            diffs = [c.auc - c.ious[k] for c in curves]
            try:
                p_raw.append(wilcoxon_signed_rank(diffs).p_value)
            except (DegenerateSampleError, InsufficientDataError):
                p_raw.append(1.0)  # untestable comparisons stay non-significant
        per_method_stats[m] = dict(auc_mean=_mean(aucs), iou_at=iou_at)

    adjusted = holm_bonferroni(p_raw, alpha).adjusted
    rows: list[ThresholdBiasRow] = []
    for i, m in enumerate(methods):
        stats = per_method_stats[m]
        auc_mean = stats["auc_mean"]
        iou_at = stats["iou_at"]
        rel_diff_at = {tau: relative_difference(auc_mean, iou_at[tau]) for tau in grid.taus}
        try:
            lo = grid.taus[grid.index_of(SWING_LOW)]
            hi = grid.taus[grid.index_of(SWING_HIGH)]
            swing = performance_swing(rel_diff_at[lo], rel_diff_at[hi])
        except ValidationError:
            swing = None  # swing undefined when 0.3/0.7 are off-grid
        p_adjusted_at = {
            tau: adjusted[i * len(grid) + k] for k, tau in enumerate(grid.taus)
        }
        rows.append(
            ThresholdBiasRow(
                method_id=m,
                auc_mean=auc_mean,
                iou_at=iou_at,
                rel_diff_at=rel_diff_at,
                swing=swing,
                p_adjusted_at=p_adjusted_at,
            )
        )
    return rows


@dataclass(frozen=True)
class RankingComparison:
    """Method orderings under two criteria and the pairs whose order flips."""

    criterion_a: str
    criterion_b: str
    rank_a: dict[str, int]  # method_id -> 1..k (1 = best)
    rank_b: dict[str, int]
    reversals: tuple[tuple[str, str], ...]
    had_ties: bool = False


def _dense_ranks(scores: Mapping[str, float]) -> tuple[dict[str, int], bool]:
    # Descending by score; exact ties broken lexicographically by method_id.
    ordered = sorted(scores, key=lambda m: (-scores[m], m))
    values = [scores[m] for m in ordered]
    had_ties = len(set(values)) != len(values)
    return {m: i + 1 for i, m in enumerate(ordered)}, had_ties


def ranking_comparison(
    mean_scores_a: Mapping[str, float],
    mean_scores_b: Mapping[str, float],
    criterion_a: str = "criterion_a",
    criterion_b: str = "criterion_b",
) -> RankingComparison:
    """Rank methods under each criterion and list every order reversal."""
    if set(mean_scores_a) != set(mean_scores_b):
        raise ValidationError("both criteria must score the same method set")
    rank_a, ties_a = _dense_ranks(mean_scores_a)
    rank_b, ties_b = _dense_ranks(mean_scores_b)
    methods = sorted(mean_scores_a)
    reversals = []
    for i, x in enumerate(methods):
        for y in methods[i + 1 :]:
            if (rank_a[x] - rank_a[y]) * (rank_b[x] - rank_b[y]) < 0:
                reversals.append((x, y))
    return RankingComparison(
        criterion_a=criterion_a,
        criterion_b=criterion_b,
        rank_a=rank_a,
        rank_b=rank_b,
        reversals=tuple(reversals),
        had_ties=ties_a or ties_b,
    )
