"""Size-stratified performance: percentile bucketing and per-stratum aggregates.

Images are bucketed by their original-resolution positive-pixel count:
small (size <= 33rd percentile), medium (strictly between the 33rd and
67th percentiles), large (size >= 67th percentile). Percentiles use
linear interpolation between closest ranks; explicit boundary overrides
are accepted to reproduce externally defined strata.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import InsufficientDataError, ValidationError

STRATUM_NAMES = ("small", "medium", "large")


@dataclass(frozen=True)
class SizeStratum:
    """One size bucket; ``None`` bounds are unbounded ends."""

    name: str
    lower_bound: float | None
    upper_bound: float | None
    image_ids: tuple[str, ...]
    degenerate: bool = False  # both percentile boundaries coincide

    @property
    def n(self) -> int:
        return len(self.image_ids)


def compute_strata(
    sizes: Mapping[str, int],
    *,
    bounds: tuple[float, float] | None = None,
) -> list[SizeStratum]:
    """Partition images into small/medium/large by positive-pixel count.

    ``bounds`` overrides the computed 33rd/67th percentiles. Membership:
    size >= upper boundary -> large, else size <= lower boundary -> small,
    else medium; with coinciding boundaries everything lands in "large"
    and the strata are flagged degenerate.
    """
    if not sizes:
        raise InsufficientDataError("cannot stratify an empty size map")
    if bounds is not None:
        p33, p67 = float(bounds[0]), float(bounds[1])
        if p67 < p33:
            raise ValidationError(f"strata bounds must be ordered, got {bounds}")
    else:
        p33, p67 = (float(v) for v in np.percentile(list(sizes.values()), [33, 67]))

    degenerate = p33 == p67
    members: dict[str, list[str]] = {name: [] for name in STRATUM_NAMES}
    for image_id in sorted(sizes):
        size = sizes[image_id]
        if size >= p67:
            members["large"].append(image_id)
        elif size <= p33:
            members["small"].append(image_id)
        else:
            members["medium"].append(image_id)

    return [
        SizeStratum("small", None, p33, tuple(members["small"]), degenerate),
        SizeStratum("medium", p33, p67, tuple(members["medium"]), degenerate),
        SizeStratum("large", p67, None, tuple(members["large"]), degenerate),
    ]


class StratumStats(NamedTuple):
    mean: float | None  # None for an empty stratum
    std: float | None  # n-1 denominator; 0.0 for a single image
    n: int


@dataclass(frozen=True)
class StratifiedResult:
    """Per-method aggregates over the size strata."""

    method_id: str
    per_stratum: dict[str, StratumStats]
    improvement: float | None  # (mean_large - mean_small) / mean_small * 100


def _stats(values: Sequence[float]) -> StratumStats:
    n = len(values)
    if n == 0:
        return StratumStats(None, None, 0)
    mean = fsum(values) / n
    if n == 1:
        return StratumStats(mean, 0.0, 1)
    var = fsum((v - mean) ** 2 for v in values) / (n - 1)
    return StratumStats(mean, var**0.5, n)


def improvement_factor(mean_small: float | None, mean_large: float | None) -> float | None:
    """Small-to-large improvement percentage; None when undefined."""
    if mean_small is None or mean_large is None or mean_small == 0:
        return None
    return (mean_large - mean_small) / mean_small * 100.0


def stratified_performance(
    scores: Mapping[str, Mapping[str, float]],
    strata: Sequence[SizeStratum],
) -> list[StratifiedResult]:
    """Per-method per-stratum mean/std and the small->large improvement.

    ``scores`` maps method_id -> {image_id: score}; every scored image must
    belong to exactly one stratum.
    """
    stratum_of: dict[str, str] = {}
    for stratum in strata:
        for image_id in stratum.image_ids:
            if image_id in stratum_of:
                raise ValidationError(f"image {image_id!r} appears in two strata")
            stratum_of[image_id] = stratum.name

    results = []
    for method_id in sorted(scores):
        per_image = scores[method_id]
        missing = [img for img in per_image if img not in stratum_of]
        if missing:
            raise ValidationError(f"images missing a stratum: {sorted(missing)[:5]}")
        buckets: dict[str, list[float]] = {name: [] for name in STRATUM_NAMES}
        for image_id in sorted(per_image):
            buckets[stratum_of[image_id]].append(per_image[image_id])
        per_stratum = {name: _stats(buckets[name]) for name in STRATUM_NAMES}
        results.append(
            StratifiedResult(
                method_id=method_id,
                per_stratum=per_stratum,
                improvement=improvement_factor(
                    per_stratum["small"].mean, per_stratum["large"].mean
                ),
            )
        )
    return results


def stratum_trend_slope(result: StratifiedResult) -> float | None:
    """Least-squares slope of stratum mean against stratum index (0, 1, 2).

    Display convenience only; None if any stratum is empty.
    """
    means = [result.per_stratum[name].mean for name in STRATUM_NAMES]
    if any(m is None for m in means):
        return None
    x = np.arange(3.0)
    y = np.asarray(means, dtype=np.float64)
    return float(((x - 1.0) * (y - y.mean())).sum() / 2.0)
