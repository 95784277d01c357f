"""Report emission and command-line interface tests."""

import hashlib
import json

import pytest

from attreval import (
    ArchetypeSpec,
    StudyResult,
    emit_reports,
    evaluate_study,
    generate_study,
)
from attreval.cli import main
from attreval.report import significance_stars

METHODS = [
    ArchetypeSpec(kind="concentrated", method_id="grad_like", noise_level=0.05),
    ArchetypeSpec(kind="diffuse_superpixel", method_id="superpixel_like"),
    ArchetypeSpec(kind="uniform_noise", method_id="noise"),
]

SYNTH_SPEC = {
    "study_name": "demo",
    "seed": 42,
    "dims": [32, 32],
    "n_images": 8,
    "radius_choices": [4, 7, 10],
    "methods": [
        {"method_id": "grad_like", "kind": "concentrated", "noise_level": 0.05},
        {"method_id": "superpixel_like", "kind": "diffuse_superpixel"},
        {"method_id": "noise", "kind": "uniform_noise"},
    ],
}


@pytest.fixture(scope="module")
def study_result(tmp_path_factory):
    out = tmp_path_factory.mktemp("study")
    manifest = generate_study(METHODS, 8, out, dims=(32, 32), radius_choices=(4, 7, 10), seed=13)
    return evaluate_study(manifest)


def _digest(path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestStars:
    @pytest.mark.parametrize(
        "p,mark",
        [(0.0005, "***"), (0.005, "**"), (0.04, "*"), (0.05, "ns"), (0.9, "ns")],
    )
    def test_thresholds(self, p, mark):
        assert significance_stars(p) == mark


class TestEmitReports:
    def test_files_written(self, study_result, tmp_path):
        bundle = emit_reports(study_result, tmp_path)
        for name in ("report.md", "study_result.json", "curves.csv"):
            assert (tmp_path / name).is_file()
        assert set(bundle.tables) == {"performance", "significance", "size_strata", "threshold_bias"}

    def test_curves_csv_shape(self, study_result, tmp_path):
        emit_reports(study_result, tmp_path)
        lines = (tmp_path / "curves.csv").read_text().strip().splitlines()
        assert lines[0].strip() == "method,tau,mean_iou,std_iou"
        assert len(lines) == 1 + 3 * 19

    def test_performance_rows_sorted_descending(self, study_result, tmp_path):
        bundle = emit_reports(study_result, tmp_path)
        rows = bundle.tables["performance"].strip().splitlines()[2:]
        means = [float(r.split("|")[2]) for r in rows]
        assert means == sorted(means, reverse=True)

    def test_printed_scores_trace_to_json(self, study_result, tmp_path):
        bundle = emit_reports(study_result, tmp_path)
        doc = json.loads((tmp_path / "study_result.json").read_text())
        by_method = {m["method_id"]: m for m in doc["method_results"]}
        for row in bundle.tables["performance"].strip().splitlines()[2:]:
            cells = [c.strip() for c in row.split("|")[1:-1]]
            method, mean, std, ci = cells
            assert f"{by_method[method]['auc_mean']:.4f}" == mean
            assert f"{by_method[method]['auc_std']:.4f}" == std
            assert f"±{by_method[method]['ci']['half_width']:.4f}" == ci

    def test_json_round_trip_reproduces_report_bytes(self, study_result, tmp_path):
        emit_reports(study_result, tmp_path / "first")
        doc = json.loads((tmp_path / "first" / "study_result.json").read_text())
        emit_reports(StudyResult.from_dict(doc), tmp_path / "second")
        assert _digest(tmp_path / "first" / "report.md") == _digest(tmp_path / "second" / "report.md")
        assert _digest(tmp_path / "first" / "curves.csv") == _digest(tmp_path / "second" / "curves.csv")

    def test_rel_diff_cells_carry_stars_or_markers(self, study_result, tmp_path):
        bundle = emit_reports(study_result, tmp_path)
        table = bundle.tables["threshold_bias"]
        assert "IoU@0.3" in table and "IoU@0.7" in table
        assert "%" in table


class TestCli:
    def test_synth_then_evaluate(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps(SYNTH_SPEC))
        assert main(["synth", str(spec), "--out", str(tmp_path / "study")]) == 0
        assert (tmp_path / "study" / "manifest.json").is_file()
        code = main(
            ["evaluate", str(tmp_path / "study" / "manifest.json"), "--out", str(tmp_path / "res")]
        )
        assert code == 0
        for name in ("report.md", "study_result.json", "curves.csv"):
            assert (tmp_path / "res" / name).is_file()

    def test_synth_deterministic_across_runs(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps(SYNTH_SPEC))
        main(["synth", str(spec), "--out", str(tmp_path / "a"), "--seed", "42"])
        main(["synth", str(spec), "--out", str(tmp_path / "b"), "--seed", "42"])
        digests = []
        for d in ("a", "b"):
            root = tmp_path / d
            h = hashlib.sha256()
            for f in sorted(root.rglob("*")):
                if f.is_file():
                    h.update(str(f.relative_to(root)).encode())
                    h.update(f.read_bytes())
            digests.append(h.hexdigest())
        assert digests[0] == digests[1]

    def test_evaluate_with_explicit_strata_bounds(self, tmp_path):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps(SYNTH_SPEC))
        main(["synth", str(spec), "--out", str(tmp_path / "study")])
        code = main(
            [
                "evaluate",
                str(tmp_path / "study" / "manifest.json"),
                "--out",
                str(tmp_path / "res"),
                "--strata-bounds",
                "60,300",
            ]
        )
        assert code == 0
        doc = json.loads((tmp_path / "res" / "study_result.json").read_text())
        assert doc["config"]["strata_bounds"] == [60.0, 300.0]
        assert doc["strata"][0]["upper_bound"] == 60.0

    def test_rank_and_compare(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps(SYNTH_SPEC))
        main(["synth", str(spec), "--out", str(tmp_path / "study")])
        main(["evaluate", str(tmp_path / "study" / "manifest.json"), "--out", str(tmp_path / "res")])
        result_json = str(tmp_path / "res" / "study_result.json")
        assert main(["rank", result_json, "--criterion", "auc"]) == 0
        out = capsys.readouterr().out
        assert "1." in out
        assert main(["rank", result_json, "--criterion", "iou@0.5", "--against", "auc"]) == 0
        assert main(["compare", result_json]) == 0
        out = capsys.readouterr().out
        assert "vs." in out

    def test_unknown_flag_exits_1(self, tmp_path, capsys):
        assert main(["evaluate", "x.json", "--out", "y", "--bogus"]) == 1

    def test_unknown_subcommand_exits_1(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_missing_manifest_exits_2(self, tmp_path, capsys):
        assert main(["evaluate", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")]) == 2

    def test_invalid_thresholds_exit_1(self, tmp_path, capsys):
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps(SYNTH_SPEC))
        main(["synth", str(spec), "--out", str(tmp_path / "study")])
        code = main(
            [
                "evaluate",
                str(tmp_path / "study" / "manifest.json"),
                "--out",
                str(tmp_path / "res"),
                "--thresholds",
                "nonsense",
            ]
        )
        assert code == 1

    def test_bad_result_file_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"not": "a result"}')
        assert main(["rank", str(bad), "--criterion", "auc"]) == 1
