"""Command-line interface.

Subcommands: ``evaluate`` a study manifest into reports, ``synth``
a synthetic study from an archetype spec, ``compare`` stored results,
and ``rank`` methods under a chosen criterion. Exit codes: 0 success,
1 validation/usage error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bias import ranking_comparison
from .engine import EvalConfig, StudyResult, evaluate_study, __version__
from .errors import AttrEvalError, ValidationError
from .metrics import ThresholdGrid
from .report import emit_reports, significance_table
from .synthgen import ArchetypeSpec, generate_study

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_VALIDATION)


def _parse_thresholds(text: str) -> ThresholdGrid:
    try:
        lo, hi, n = text.split(":")
        return ThresholdGrid.linspace(float(lo), float(hi), int(n))
    except (ValueError, AttrEvalError) as exc:
        raise ValidationError(f"bad --thresholds {text!r} (want lo:hi:n): {exc}") from exc


def _parse_bounds(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
        return a, b
    except ValueError as exc:
        raise ValidationError(f"bad --strata-bounds {text!r} (want a,b): {exc}") from exc


def _parse_taus(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad --taus {text!r} (want comma-separated floats): {exc}") from exc


def _load_result(path: str) -> StudyResult:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON: {exc}") from exc
    try:
        return StudyResult.from_dict(doc)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{path}: not a study result file: {exc}") from exc


def _criterion_scores(result: StudyResult, criterion: str) -> dict[str, float]:
    if criterion == "auc":
        return {r.method_id: r.auc_mean for r in result.method_results}
    if criterion.startswith("iou@"):
        tau = float(criterion[4:])
        key = result.grid.taus[result.grid.index_of(tau)]
        return {r.method_id: r.per_tau_mean[key] for r in result.method_results}
    raise ValidationError(f"unknown criterion {criterion!r} (want auc or iou@<tau>)")


def _cmd_evaluate(args) -> int:
    grid = _parse_thresholds(args.thresholds) if args.thresholds else ThresholdGrid.default()
    config = EvalConfig(
        alpha=args.alpha,
        ci_level=args.ci_level,
        taus_of_interest=_parse_taus(args.taus),
        strata_bounds=_parse_bounds(args.strata_bounds) if args.strata_bounds else None,
        n_workers=args.workers,
    )
    result = evaluate_study(args.manifest, grid, config)
    emit_reports(result, args.out)
    print(f"wrote report.md, study_result.json, curves.csv to {args.out}")
    return EXIT_OK


def _archetype_from_doc(doc: dict) -> ArchetypeSpec:
    known = {
        "kind", "method_id", "concentration", "superpixel_size", "noise_level", "background",
    }
    unknown = set(doc) - known
    if unknown:
        raise ValidationError(f"unknown archetype keys: {sorted(unknown)}")
    return ArchetypeSpec(**doc)


def _cmd_synth(args) -> int:
    try:
        doc = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{args.spec}: not valid JSON: {exc}") from exc
    methods = [_archetype_from_doc(m) for m in doc.get("methods", [])]
    seed = args.seed if args.seed is not None else int(doc.get("seed", 0))
    manifest = generate_study(
        methods,
        int(doc.get("n_images", 1)),
        args.out,
        dims=tuple(doc.get("dims", (64, 64))),
        radius_choices=tuple(doc.get("radius_choices", (5, 9, 14))),
        seed=seed,
        study_name=str(doc.get("study_name", "synthetic-study")),
    )
    print(f"wrote {len(manifest.images)} images x {len(manifest.methods)} methods to {args.out}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    for path in args.results:
        result = _load_result(path)
        print(f"## {result.study_name} ({path})\n")
        print(significance_table(result))
    return EXIT_OK


def _cmd_rank(args) -> int:
    result = _load_result(args.result)
    scores = _criterion_scores(result, args.criterion)
    ordered = sorted(scores, key=lambda m: (-scores[m], m))
    print(f"ranking under {args.criterion}:")
    for i, m in enumerate(ordered, start=1):
        print(f"{i}. {m} ({scores[m]:.4f})")
    if args.against:
        other = _criterion_scores(result, args.against)
        cmp = ranking_comparison(scores, other, args.criterion, args.against)
        if cmp.reversals:
            print(f"reversals vs {args.against}:")
            for a, b in cmp.reversals:
                print(f"  {a} <-> {b}")
        else:
            print(f"no reversals vs {args.against}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="attreval", description=__doc__)
    parser.add_argument("--version", action="version", version=f"attreval {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="evaluate a study manifest")
    p_eval.add_argument("manifest")
    p_eval.add_argument("--out", required=True, help="output directory for reports")
    p_eval.add_argument("--thresholds", help="threshold grid as lo:hi:n (default 0.05:0.95:19)")
    p_eval.add_argument("--strata-bounds", help="explicit size boundaries a,b")
    p_eval.add_argument("--alpha", type=float, default=0.05, help="family-wise error rate")
    p_eval.add_argument("--ci-level", type=float, default=0.95)
    p_eval.add_argument("--taus", default="0.3,0.5,0.7", help="reported single thresholds")
    p_eval.add_argument("--workers", type=int, default=1)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_synth = sub.add_parser("synth", help="generate a synthetic study")
    p_synth.add_argument("spec", help="archetype spec JSON")
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--seed", type=int, help="override the spec's seed")
    p_synth.set_defaults(func=_cmd_synth)

    p_cmp = sub.add_parser("compare", help="print significance tables from stored results")
    p_cmp.add_argument("results", nargs="+")
    p_cmp.set_defaults(func=_cmd_compare)

    p_rank = sub.add_parser("rank", help="rank methods under a criterion")
    p_rank.add_argument("result")
    p_rank.add_argument("--criterion", default="auc", help="auc or iou@<tau>")
    p_rank.add_argument("--against", help="second criterion; reports ranking reversals")
    p_rank.set_defaults(func=_cmd_rank)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    try:
        return args.func(args)
    except (AttrEvalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
