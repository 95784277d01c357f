"""Report emission: Markdown tables, machine-readable JSON, and curve CSV.

Formatting is fixed (scores to 4 decimals, percentages to 1) and every
printed number is a rounding of a value present in study_result.json, so
reports are reproducible from the JSON alone.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from math import fsum
from pathlib import Path

from .engine import MethodEvalResult, StudyResult, __version__


@dataclass(frozen=True)
class ReportBundle:
    """Rendered tables plus the curve CSV and provenance metadata."""

    tables: dict[str, str]
    curves_csv: str
    metadata: dict


def significance_stars(p_adjusted: float) -> str:
    if p_adjusted < 0.001:
        return "***"
    if p_adjusted < 0.01:
        return "**"
    if p_adjusted < 0.05:
        return "*"
    return "ns"


def _score(x: float | None) -> str:
    return "n/a" if x is None else f"{x:.4f}"


def _pct(x: float | None, *, signed: bool = True) -> str:
    if x is None:
        return "undef"
    return f"{x:+.1f}%" if signed else f"{x:.1f}%"


def _md_table(header: list[str], rows: list[list[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines) + "\n"


def _by_auc_desc(results: tuple[MethodEvalResult, ...]) -> list[MethodEvalResult]:
    return sorted(results, key=lambda r: (-r.auc_mean, r.method_id))


def performance_table(result: StudyResult) -> str:
    rows = [
        [r.method_id, _score(r.auc_mean), _score(r.auc_std), f"±{r.ci.half_width:.4f}"]
        for r in _by_auc_desc(result.method_results)
    ]
    return _md_table(["Method", "Mean AUC-IoU", "Std Dev", f"{result.config.ci_level:.0%} CI"], rows)


def significance_table(result: StudyResult) -> str:
    rows = []
    for p in result.pairwise:
        rows.append(
            [
                f"{p.method_a} vs. {p.method_b}",
                f"{p.w_statistic:g}",
                f"{p.p_raw:.3g}",
                f"{p.p_adjusted:.3g}",
                f"{p.effect_size:.4f}",
                "ns" if p.degenerate else significance_stars(p.p_adjusted),
            ]
        )
    return _md_table(
        ["Comparison", "W+", "p (raw)", "p (Holm)", "Effect Size", "Significance"], rows
    )


def strata_table(result: StudyResult) -> str:
    n_of = {s.name: s.n for s in result.strata}
    by_method = {s.method_id: s for s in result.stratified}
    rows = []
    for r in _by_auc_desc(result.method_results):
        s = by_method[r.method_id]
        cells = [r.method_id]
        for name in ("small", "medium", "large"):
            st = s.per_stratum[name]
            cells.append("n/a" if st.mean is None else f"{st.mean:.4f} ± {st.std:.4f}")
        cells.append(_pct(s.improvement, signed=False))
        rows.append(cells)
    header = [
        "Method",
        f"Small (n={n_of['small']})",
        f"Medium (n={n_of['medium']})",
        f"Large (n={n_of['large']})",
        "Improvement",
    ]
    return _md_table(header, rows)


def threshold_bias_table_md(result: StudyResult) -> str:
    taus = [result.grid.taus[result.grid.index_of(t)] for t in result.config.taus_of_interest]
    by_method = {b.method_id: b for b in result.bias_rows}
    header = ["Method", "AUC-IoU"]
    for tau in taus:
        header += [f"IoU@{tau:g}", "Rel. Diff."]
    rows = []
    for r in _by_auc_desc(result.method_results):
        b = by_method[r.method_id]
        cells = [r.method_id, _score(b.auc_mean)]
        for tau in taus:
            rel = b.rel_diff_at[tau]
            mark = significance_stars(b.p_adjusted_at[tau])
            cells.append(_score(b.iou_at[tau]))
            cells.append("undef" if rel is None else f"{_pct(rel)}{'' if mark == 'ns' else mark}")
        rows.append(cells)
    return _md_table(header, rows)


def ranking_section(result: StudyResult) -> str:
    lines = []
    for rk in result.rankings:
        lines.append(f"- **{rk.criterion_a} vs {rk.criterion_b}**: ")
        if rk.reversals:
            pairs = "; ".join(f"{a} <-> {b}" for a, b in rk.reversals)
            lines[-1] += f"{len(rk.reversals)} reversal(s): {pairs}"
        else:
            lines[-1] += "no reversals"
        if rk.had_ties:
            lines[-1] += " (ties broken lexicographically)"
    return "\n".join(lines) + "\n"


def curves_csv_text(result: StudyResult) -> str:
    """Long-format per-method per-threshold means: method, tau, mean_iou, std_iou."""
    buf = io.StringIO()
    writer = csv.writer(buf)  # RFC-4180 CRLF line endings
    writer.writerow(["method", "tau", "mean_iou", "std_iou"])
    for r in result.method_results:
        image_ids = sorted(r.per_image)
        n = len(image_ids)
        for k, tau in enumerate(result.grid.taus):
            points = [r.per_image[img].ious[k] for img in image_ids]
            mean = fsum(points) / n
            std = 0.0 if n == 1 else (fsum((p - mean) ** 2 for p in points) / (n - 1)) ** 0.5
            writer.writerow([r.method_id, f"{tau:g}", repr(mean), repr(std)])
    return buf.getvalue()


def report_metadata(result: StudyResult) -> dict:
    return {
        "tool": "attreval",
        "version": __version__,
        "study_name": result.study_name,
        "manifest_fingerprint": result.manifest_fingerprint,
        "seed": result.seed,
        "thresholds": list(result.grid.taus),
        "config": result.config.to_dict(),
    }


def render_report_md(result: StudyResult) -> str:
    meta = report_metadata(result)
    parts = [
        f"# Study report: {result.study_name}\n",
        "## Metadata\n",
        "```json\n" + json.dumps(meta, indent=2, sort_keys=True) + "\n```\n",
        "## Method performance\n",
        performance_table(result),
        "## Pairwise significance\n",
        significance_table(result),
        "## Performance by lesion size\n",
        strata_table(result),
        "## Threshold-free vs single-threshold comparison\n",
        threshold_bias_table_md(result),
        "## Ranking stability\n",
        ranking_section(result),
    ]
    return "\n".join(parts)


def emit_reports(result: StudyResult, out_dir: str | Path) -> ReportBundle:
    """Write report.md, study_result.json, and curves.csv into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tables = {
        "performance": performance_table(result),
        "significance": significance_table(result),
        "size_strata": strata_table(result),
        "threshold_bias": threshold_bias_table_md(result),
    }
    curves = curves_csv_text(result)
    (out / "report.md").write_text(render_report_md(result), encoding="utf-8")
    (out / "study_result.json").write_text(
        json.dumps(result.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    (out / "curves.csv").write_text(curves, encoding="utf-8", newline="")
    return ReportBundle(tables=tables, curves_csv=curves, metadata=report_metadata(result))
