"""Threshold-free metric core: normalization, binarization, IoU, and AUC-IoU.

For a map A and mask G, IoU(tau) = |A_tau ∩ G| / |A_tau ∪ G| where A_tau
binarizes the min-max-normalized map at threshold tau, and AUC-IoU is the
trapezoidal integral of IoU over the threshold grid divided by the grid's
span, so a constant curve c scores exactly c.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .grid_io import AttributionMap, GroundTruthMask
from .validation import check_open_unit, check_same_shape

#: Number of thresholds in the default evaluation grid.
DEFAULT_GRID_SIZE = 19


@dataclass(frozen=True)
class ThresholdGrid:
    """Strictly increasing binarization thresholds, all inside (0, 1)."""

    taus: tuple[float, ...]

    def __post_init__(self):
        taus = tuple(float(t) for t in self.taus)
        if not taus:
            raise ValidationError("threshold grid must contain at least one value")
        for t in taus:
            check_open_unit(t, "threshold")
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValidationError("thresholds must be strictly increasing")
        object.__setattr__(self, "taus", taus)

    @classmethod
    def default(cls) -> "ThresholdGrid":
        """The 19-point grid 0.05, 0.10, ..., 0.95."""
        return cls(tuple(i / 20 for i in range(1, 20)))

    @classmethod
    def linspace(cls, lo: float, hi: float, n: int) -> "ThresholdGrid":
        if n < 2:
            raise ValueError("a threshold grid needs at least 2 points")
        return cls(tuple(np.linspace(lo, hi, n)))

    def index_of(self, tau: float, *, atol: float = 1e-9) -> int:
        for i, t in enumerate(self.taus):
            if abs(t - tau) <= atol:
                return i
        raise ValidationError(f"threshold {tau} is not on the grid")

    def __len__(self) -> int:
        return len(self.taus)

    def __iter__(self):
        return iter(self.taus)


@dataclass(frozen=True)
class IoUCurve:
    """IoU sampled on a threshold grid, with its normalized-area summary.

    ``auc`` is the trapezoidal area divided by the grid span (in [0, 1]);
    ``auc_raw`` is the unnormalized integral.
    """

    grid: ThresholdGrid
    ious: tuple[float, ...]
    auc: float
    auc_raw: float

    def iou_at(self, tau: float) -> float:
        return self.ious[self.grid.index_of(tau)]


def normalize(amap: AttributionMap) -> AttributionMap:
    """Affine min-max rescale to [0, 1]; a constant map becomes all zeros.

    A constant map carries no localization evidence, so it must binarize
    to the empty set at every threshold rather than score through the
    empty-union rule.
    """
    values = amap.values
    lo = float(values.min())
    hi = float(values.max())
    if hi == lo:
        return replace(amap, values=np.zeros_like(values))
    return replace(amap, values=(values - lo) / (hi - lo))


def binarize(amap: AttributionMap | np.ndarray, tau: float, *, inclusive: bool = True) -> np.ndarray:
    """Threshold a normalized map: pixel -> 1 iff value >= tau (or > tau)."""
    check_open_unit(tau, "tau")
    values = amap.values if isinstance(amap, AttributionMap) else np.asarray(amap, dtype=np.float64)
    if float(values.min()) < 0.0 or float(values.max()) > 1.0:
        raise ValidationError("binarize expects normalized values in [0, 1]")
    return values >= tau if inclusive else values > tau


def iou(pred: np.ndarray, truth: np.ndarray) -> float:
    """|pred ∩ truth| / |pred ∪ truth|, with an empty union scoring 1.0.

    Pixel counts are accumulated as exact integers; the single division
    happens at the end.
    """
    pred = np.asarray(pred).astype(bool)
    truth = np.asarray(truth).astype(bool)
    check_same_shape(pred, truth)
    intersection = int(np.count_nonzero(pred & truth))
    union = int(np.count_nonzero(pred | truth))
    if union == 0:
        return 1.0
    return intersection / union


def _trapezoid(ious: Sequence[float], taus: Sequence[float]) -> Fraction:
    """Composite trapezoid in exact rational arithmetic."""
    total = Fraction(0)
    for i in range(len(taus) - 1):
        width = Fraction(taus[i + 1]) - Fraction(taus[i])
        total += (Fraction(ious[i]) + Fraction(ious[i + 1])) * width / 2
    return total


def auc_iou(ious: Iterable[float], grid: ThresholdGrid) -> float:
    """Normalized area under an IoU curve.

    Computed as trapezoid(ious) / (tau_max - tau_min) in exact rational
    arithmetic before the final float conversion, so a constant curve c
    yields exactly c and the all-ones curve exactly 1.0 on any grid.
    """
    ious = tuple(float(v) for v in ious)
    if len(ious) != len(grid):
        raise ValidationError(f"curve has {len(ious)} points but grid has {len(grid)}")
    if len(grid) < 2:
        raise ValueError("AUC needs at least 2 grid points")
    span = Fraction(grid.taus[-1]) - Fraction(grid.taus[0])
    return float(_trapezoid(ious, grid.taus) / span)


def iou_curve(
    amap: AttributionMap,
    mask: GroundTruthMask,
    grid: ThresholdGrid | None = None,
    *,
    inclusive: bool = True,
) -> IoUCurve:
    """Evaluate IoU of binarize(normalize(map), tau) against the mask per tau."""
    if grid is None:
        grid = ThresholdGrid.default()
    check_same_shape(amap.values, mask.bits, "map and mask")
    norm = normalize(amap).values
    truth = mask.bits.astype(bool)
    ious = tuple(iou(binarize(norm, tau, inclusive=inclusive), truth) for tau in grid)
    if len(grid) >= 2:
        raw = _trapezoid(ious, grid.taus)
        span = Fraction(grid.taus[-1]) - Fraction(grid.taus[0])
        return IoUCurve(grid=grid, ious=ious, auc=float(raw / span), auc_raw=float(raw))
    return IoUCurve(grid=grid, ious=ious, auc=ious[0], auc_raw=0.0)
