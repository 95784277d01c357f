"""attreval: threshold-free evaluation of feature-attribution maps.

Computes IoU curves over the full binarization-threshold spectrum,
AUC-IoU summaries, threshold-selection-bias diagnostics, size-stratified
performance, and Holm-corrected pairwise Wilcoxon comparisons.
"""

from .bias import (
    RankingComparison,
    ThresholdBiasRow,
    performance_swing,
    ranking_comparison,
    relative_difference,
    threshold_bias_table,
)
from .engine import (
    EvalConfig,
    MethodEvalResult,
    StudyEvaluator,
    StudyResult,
    aggregate_method,
    evaluate_study,
    __version__,
)
from .errors import (
    AttrEvalError,
    CorruptedFileError,
    DegenerateSampleError,
    FormatError,
    InsufficientDataError,
    ValidationError,
)
from .grid_io import (
    AttributionMap,
    GroundTruthMask,
    ImageEntry,
    StudyManifest,
    load_manifest,
    read_grid,
    read_mask,
    save_manifest,
    write_grid,
    write_pgm,
)
from .metrics import IoUCurve, ThresholdGrid, auc_iou, binarize, iou, iou_curve, normalize
from .report import ReportBundle, emit_reports, render_report_md
from .stats import (
    ConfidenceInterval,
    PairedSample,
    PairwiseTestResult,
    WilcoxonResult,
    effect_size_median_diff,
    holm_bonferroni,
    normal_ci,
    run_pairwise_family,
    wilcoxon_signed_rank,
)
from .stratify import (
    SizeStratum,
    StratifiedResult,
    compute_strata,
    improvement_factor,
    stratified_performance,
)
from .synthgen import ArchetypeSpec, PortableRng, derive_seed, generate, generate_study

__all__ = [
    "AttrEvalError",
    "AttributionMap",
    "ArchetypeSpec",
    "ConfidenceInterval",
    "CorruptedFileError",
    "DegenerateSampleError",
    "EvalConfig",
    "FormatError",
    "GroundTruthMask",
    "ImageEntry",
    "InsufficientDataError",
    "IoUCurve",
    "MethodEvalResult",
    "PairedSample",
    "PairwiseTestResult",
    "PortableRng",
    "RankingComparison",
    "ReportBundle",
    "SizeStratum",
    "StratifiedResult",
    "StudyEvaluator",
    "StudyManifest",
    "StudyResult",
    "ThresholdBiasRow",
    "ThresholdGrid",
    "ValidationError",
    "WilcoxonResult",
    "__version__",
    "aggregate_method",
    "auc_iou",
    "binarize",
    "compute_strata",
    "derive_seed",
    "effect_size_median_diff",
    "emit_reports",
    "evaluate_study",
    "generate",
    "generate_study",
    "holm_bonferroni",
    "improvement_factor",
    "iou",
    "iou_curve",
    "load_manifest",
    "normal_ci",
    "normalize",
    "performance_swing",
    "ranking_comparison",
    "read_grid",
    "read_mask",
    "relative_difference",
    "render_report_md",
    "run_pairwise_family",
    "save_manifest",
    "stratified_performance",
    "threshold_bias_table",
    "wilcoxon_signed_rank",
    "write_grid",
    "write_pgm",
]
