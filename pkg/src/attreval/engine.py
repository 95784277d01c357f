"""Study orchestration: evaluate a manifest into per-image curves,
per-method aggregates, and the statistical analyses.

Evaluation of (image, method) pairs is embarrassingly parallel; results
are always reduced in manifest order with fixed-order summation, so the
output is bit-identical regardless of worker count.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from math import fsum
from pathlib import Path
from typing import Mapping

from sklearn.base import BaseEstimator

from .bias import DEFAULT_TAUS_OF_INTEREST, ThresholdBiasRow, ranking_comparison, threshold_bias_table
from .bias import RankingComparison
from .errors import AttrEvalError, InsufficientDataError, ValidationError
from .grid_io import StudyManifest, load_manifest, read_grid, read_mask
from .metrics import IoUCurve, ThresholdGrid, iou_curve
from .stats import ConfidenceInterval, PairwiseTestResult, normal_ci, run_pairwise_family
from .stratify import SizeStratum, StratifiedResult, StratumStats, compute_strata, stratified_performance

__version__ = "0.1.0"


@dataclass(frozen=True)
class EvalConfig:
    """Analysis options; ``n_workers`` is an execution detail and is not
    echoed into reports (outputs are invariant to it)."""

    alpha: float = 0.05
    ci_level: float = 0.95
    taus_of_interest: tuple[float, ...] = DEFAULT_TAUS_OF_INTEREST
    strata_bounds: tuple[float, float] | None = None
    n_workers: int = 1

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "ci_level": self.ci_level,
            "taus_of_interest": list(self.taus_of_interest),
            "strata_bounds": list(self.strata_bounds) if self.strata_bounds else None,
        }


@dataclass(frozen=True)
class MethodEvalResult:
    """Aggregate scores for one method, with per-image curves retained."""

    method_id: str
    per_image: dict[str, IoUCurve]
    auc_mean: float
    auc_std: float
    ci: ConfidenceInterval
    per_tau_mean: dict[float, float]


@dataclass(frozen=True)
class StudyResult:
    """Complete evaluation output for one study manifest."""

    study_name: str
    manifest_fingerprint: str
    grid: ThresholdGrid
    config: EvalConfig
    method_results: tuple[MethodEvalResult, ...]
    pairwise: tuple[PairwiseTestResult, ...]
    bias_rows: tuple[ThresholdBiasRow, ...]
    strata: tuple[SizeStratum, ...]
    stratified: tuple[StratifiedResult, ...]
    rankings: tuple[RankingComparison, ...]
    seed: int | None = None

    def method(self, method_id: str) -> MethodEvalResult:
        for res in self.method_results:
            if res.method_id == method_id:
                return res
        raise KeyError(method_id)

    def to_dict(self) -> dict:
        taus = list(self.grid.taus)
        return {
            "tool": {"name": "attreval", "version": __version__},
            "study_name": self.study_name,
            "manifest_fingerprint": self.manifest_fingerprint,
            "seed": self.seed,
            "grid": taus,
            "config": self.config.to_dict(),
            "method_results": [
                {
                    "method_id": r.method_id,
                    "auc_mean": r.auc_mean,
                    "auc_std": r.auc_std,
                    "ci": {
                        "mean": r.ci.mean,
                        "half_width": r.ci.half_width,
                        "level": r.ci.level,
                        "degenerate": r.ci.degenerate,
                    },
                    "per_tau_mean": [r.per_tau_mean[t] for t in taus],
                    "per_image": {
                        img: {"ious": list(c.ious), "auc": c.auc, "auc_raw": c.auc_raw}
                        for img, c in sorted(r.per_image.items())
                    },
                }
                for r in self.method_results
            ],
            "pairwise": [
                {
                    "method_a": p.method_a,
                    "method_b": p.method_b,
                    "w_statistic": p.w_statistic,
                    "p_raw": p.p_raw,
                    "p_adjusted": p.p_adjusted,
                    "effect_size": p.effect_size,
                    "significant": p.significant,
                    "degenerate": p.degenerate,
                    "n_zeros_dropped": p.n_zeros_dropped,
                }
                for p in self.pairwise
            ],
            "bias_rows": [
                {
                    "method_id": b.method_id,
                    "auc_mean": b.auc_mean,
                    "iou_at": [b.iou_at[t] for t in taus],
                    "rel_diff_at": [b.rel_diff_at[t] for t in taus],
                    "swing": b.swing,
                    "p_adjusted_at": [b.p_adjusted_at[t] for t in taus],
                }
                for b in self.bias_rows
            ],
            "strata": [
                {
                    "name": s.name,
                    "lower_bound": s.lower_bound,
                    "upper_bound": s.upper_bound,
                    "image_ids": list(s.image_ids),
                    "degenerate": s.degenerate,
                }
                for s in self.strata
            ],
            "stratified": [
                {
                    "method_id": s.method_id,
                    "per_stratum": {
                        name: {"mean": st.mean, "std": st.std, "n": st.n}
                        for name, st in s.per_stratum.items()
                    },
                    "improvement": s.improvement,
                }
                for s in self.stratified
            ],
            "rankings": [
                {
                    "criterion_a": rk.criterion_a,
                    "criterion_b": rk.criterion_b,
                    "rank_a": dict(sorted(rk.rank_a.items())),
                    "rank_b": dict(sorted(rk.rank_b.items())),
                    "reversals": [list(pair) for pair in rk.reversals],
                    "had_ties": rk.had_ties,
                }
                for rk in self.rankings
            ],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "StudyResult":
        grid = ThresholdGrid(tuple(doc["grid"]))
        taus = grid.taus
        config_doc = doc["config"]
        config = EvalConfig(
            alpha=config_doc["alpha"],
            ci_level=config_doc["ci_level"],
            taus_of_interest=tuple(config_doc["taus_of_interest"]),
            strata_bounds=tuple(config_doc["strata_bounds"]) if config_doc["strata_bounds"] else None,
        )
        method_results = tuple(
            MethodEvalResult(
                method_id=r["method_id"],
                per_image={
                    img: IoUCurve(grid=grid, ious=tuple(c["ious"]), auc=c["auc"], auc_raw=c["auc_raw"])
                    for img, c in r["per_image"].items()
                },
                auc_mean=r["auc_mean"],
                auc_std=r["auc_std"],
                ci=ConfidenceInterval(
                    mean=r["ci"]["mean"],
                    half_width=r["ci"]["half_width"],
                    level=r["ci"]["level"],
                    degenerate=r["ci"]["degenerate"],
                ),
                per_tau_mean=dict(zip(taus, r["per_tau_mean"])),
            )
            for r in doc["method_results"]
        )
        pairwise = tuple(
            PairwiseTestResult(
                method_a=p["method_a"],
                method_b=p["method_b"],
                w_statistic=p["w_statistic"],
                p_raw=p["p_raw"],
                p_adjusted=p["p_adjusted"],
                effect_size=p["effect_size"],
                significant=p["significant"],
                degenerate=p["degenerate"],
                n_zeros_dropped=p["n_zeros_dropped"],
            )
            for p in doc["pairwise"]
        )
        bias_rows = tuple(
            ThresholdBiasRow(
                method_id=b["method_id"],
                auc_mean=b["auc_mean"],
                iou_at=dict(zip(taus, b["iou_at"])),
                rel_diff_at=dict(zip(taus, b["rel_diff_at"])),
                swing=b["swing"],
                p_adjusted_at=dict(zip(taus, b["p_adjusted_at"])),
            )
            for b in doc["bias_rows"]
        )
        strata = tuple(
            SizeStratum(
                name=s["name"],
                lower_bound=s["lower_bound"],
                upper_bound=s["upper_bound"],
                image_ids=tuple(s["image_ids"]),
                degenerate=s["degenerate"],
            )
            for s in doc["strata"]
        )
        stratified = tuple(
            StratifiedResult(
                method_id=s["method_id"],
                per_stratum={
                    name: StratumStats(st["mean"], st["std"], st["n"])
                    for name, st in s["per_stratum"].items()
                },
                improvement=s["improvement"],
            )
            for s in doc["stratified"]
        )
        rankings = tuple(
            RankingComparison(
                criterion_a=rk["criterion_a"],
                criterion_b=rk["criterion_b"],
                rank_a=dict(rk["rank_a"]),
                rank_b=dict(rk["rank_b"]),
                reversals=tuple((a, b) for a, b in rk["reversals"]),
                had_ties=rk["had_ties"],
            )
            for rk in doc["rankings"]
        )
        return cls(
            study_name=doc["study_name"],
            manifest_fingerprint=doc["manifest_fingerprint"],
            grid=grid,
            config=config,
            method_results=method_results,
            pairwise=pairwise,
            bias_rows=bias_rows,
            strata=strata,
            stratified=stratified,
            rankings=rankings,
            seed=doc["seed"],
        )


def manifest_fingerprint(manifest: StudyManifest) -> str:
    canonical = json.dumps(manifest.to_canonical_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def aggregate_method(
    method_id: str,
    per_image: Mapping[str, IoUCurve],
    *,
    ci_level: float = 0.95,
) -> MethodEvalResult:
    """Mean, n-1 std, normal CI, and per-threshold means for one method.

    Summation runs in sorted image_id order so aggregates are independent
    of evaluation scheduling. A single-image study gets std = 0 and a
    degenerate CI.
    """
    if not per_image:
        raise InsufficientDataError(f"method {method_id!r} has no curves")
    image_ids = sorted(per_image)
    curves = [per_image[img] for img in image_ids]
    grid = curves[0].grid
    n = len(curves)
    aucs = [c.auc for c in curves]
    mean = fsum(aucs) / n
    if n == 1:
        std = 0.0
        ci = ConfidenceInterval(mean, 0.0, ci_level, degenerate=True)
    else:
        std = (fsum((a - mean) ** 2 for a in aucs) / (n - 1)) ** 0.5
        ci = normal_ci(aucs, ci_level)
    per_tau_mean = {
        tau: fsum(c.ious[k] for c in curves) / n for k, tau in enumerate(grid.taus)
    }
    return MethodEvalResult(
        method_id=method_id,
        per_image=dict(per_image),
        auc_mean=mean,
        auc_std=std,
        ci=ci,
        per_tau_mean=per_tau_mean,
    )


def _evaluate_task(task: tuple, taus: tuple[float, ...]) -> tuple[str, str, IoUCurve]:
    method_id, image_id, grid_path, mask_path, orig_pixels = task
    try:
        amap = read_grid(grid_path, method_id=method_id, image_id=image_id)
        mask = read_mask(mask_path, image_id=image_id, original_positive_pixels=orig_pixels)
        curve = iou_curve(amap, mask, ThresholdGrid(taus))
    except (AttrEvalError, ValueError, OSError) as exc:
        raise ValidationError(f"image {image_id!r}, method {method_id!r}: {exc}") from exc
    return method_id, image_id, curve


def evaluate_study(
    manifest: StudyManifest | str | Path,
    grid: ThresholdGrid | None = None,
    config: EvalConfig | None = None,
) -> StudyResult:
    """Evaluate every (image, method) pair of a study and run all analyses.

    Fails fast on the first unreadable or mismatched input, identifying the
    offending image and method; partial results are never produced.
    """
    if not isinstance(manifest, StudyManifest):
        manifest = load_manifest(manifest)
    if grid is None:
        grid = ThresholdGrid.default()
    if config is None:
        config = EvalConfig()

    tasks = [
        (
            method_id,
            entry.image_id,
            str(manifest.grid_path(entry, method_id)),
            str(manifest.mask_path(entry)),
            entry.original_positive_pixels,
        )
        for entry in manifest.images
        for method_id in manifest.methods
    ]
    worker = partial(_evaluate_task, taus=grid.taus)
    if config.n_workers > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (8 * config.n_workers))
        with ProcessPoolExecutor(max_workers=config.n_workers) as pool:
            outcomes = list(pool.map(worker, tasks, chunksize=chunk))
    else:
        outcomes = [worker(t) for t in tasks]

    per_method: dict[str, dict[str, IoUCurve]] = {m: {} for m in manifest.methods}
    for method_id, image_id, curve in outcomes:  # fixed manifest order
        per_method[method_id][image_id] = curve

    method_results = tuple(
        aggregate_method(m, per_method[m], ci_level=config.ci_level) for m in manifest.methods
    )
    auc_scores = {m: {img: c.auc for img, c in per_method[m].items()} for m in manifest.methods}
    pairwise = tuple(run_pairwise_family(auc_scores, config.alpha)) if len(manifest.methods) > 1 else ()
    bias_rows = tuple(threshold_bias_table(per_method, config.taus_of_interest, alpha=config.alpha))
    sizes = {e.image_id: e.original_positive_pixels for e in manifest.images}
    strata = tuple(compute_strata(sizes, bounds=config.strata_bounds))
    stratified = tuple(stratified_performance(auc_scores, strata))
    auc_means = {r.method_id: r.auc_mean for r in method_results}
    rankings = tuple(
        ranking_comparison(
            auc_means,
            {r.method_id: r.per_tau_mean[grid.taus[grid.index_of(tau)]] for r in method_results},
            "auc_iou",
            f"iou@{tau:g}",
        )
        for tau in config.taus_of_interest
    )
    return StudyResult(
        study_name=manifest.study_name,
        manifest_fingerprint=manifest_fingerprint(manifest),
        grid=grid,
        config=config,
        method_results=method_results,
        pairwise=pairwise,
        bias_rows=bias_rows,
        strata=strata,
        stratified=stratified,
        rankings=rankings,
        seed=manifest.seed,
    )


class StudyEvaluator(BaseEstimator):
    """sklearn-style front end for study evaluation.

    Parameters mirror :class:`EvalConfig`; ``fit`` accepts a manifest path
    or a loaded :class:`StudyManifest` and exposes the finished
    :class:`StudyResult` as ``result_``.

    >>> ev = StudyEvaluator(alpha=0.01).fit("study/manifest.json")  # doctest: +SKIP
    >>> ev.result_.method_results[0].auc_mean  # doctest: +SKIP
    """

    def __init__(
        self,
        thresholds=None,
        alpha: float = 0.05,
        ci_level: float = 0.95,
        taus_of_interest: tuple[float, ...] = DEFAULT_TAUS_OF_INTEREST,
        strata_bounds: tuple[float, float] | None = None,
        n_workers: int = 1,
    ):
        self.thresholds = thresholds
        self.alpha = alpha
        self.ci_level = ci_level
        self.taus_of_interest = taus_of_interest
        self.strata_bounds = strata_bounds
        self.n_workers = n_workers

    def _grid(self) -> ThresholdGrid:
        if self.thresholds is None:
            return ThresholdGrid.default()
        if isinstance(self.thresholds, ThresholdGrid):
            return self.thresholds
        return ThresholdGrid(tuple(self.thresholds))

    def fit(self, X: StudyManifest | str | Path, y=None) -> "StudyEvaluator":
        config = EvalConfig(
            alpha=self.alpha,
            ci_level=self.ci_level,
            taus_of_interest=tuple(self.taus_of_interest),
            strata_bounds=tuple(self.strata_bounds) if self.strata_bounds else None,
            n_workers=self.n_workers,
        )
        self.result_ = evaluate_study(X, self._grid(), config)
        self.n_methods_ = len(self.result_.method_results)
        self.n_images_ = len(self.result_.method_results[0].per_image) if self.n_methods_ else 0
        return self
