"""Threshold-bias diagnostics tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attreval import (
    IoUCurve,
    ThresholdGrid,
    ValidationError,
    performance_swing,
    ranking_comparison,
    relative_difference,
    threshold_bias_table,
)
from attreval.metrics import auc_iou

# Benchmark aggregate fixture: AUC-IoU plus IoU at 0.3/0.5/0.7 with the
# relative differences they imply (percent, to one decimal).
AGGREGATE_FIXTURE = {
    "XRAI": (0.1844, (0.2784, -33.8), (0.2331, -20.9), (0.1483, +24.3)),
    "LIME": (0.1409, (0.1565, -10.0), (0.1565, -10.0), (0.1565, -10.0)),
    "SmoothGrad_IG": (0.1172, (0.1980, -40.8), (0.1095, +7.0), (0.0536, +118.7)),
    "GradCAM": (0.1146, (0.1856, -38.3), (0.1266, -9.5), (0.0671, +70.7)),
    "Blur_IG": (0.0979, (0.1425, -31.3), (0.0785, +24.7), (0.0467, +109.7)),
    "Guided_IG": (0.0968, (0.1508, -35.8), (0.0788, +22.8), (0.0412, +134.8)),
    "Vanilla_IG": (0.0606, (0.0904, -32.9), (0.0422, +43.5), (0.0200, +202.7)),
}


class TestRelativeDifference:
    def test_all_21_fixture_cells(self):
        for auc, *cells in AGGREGATE_FIXTURE.values():
            for iou_tau, expected in cells:
                got = relative_difference(auc, iou_tau)
                assert got == pytest.approx(expected, abs=0.3 + 1e-9)

    def test_equal_scores_give_zero(self):
        assert relative_difference(0.42, 0.42) == 0.0

    def test_zero_denominator_is_undefined_marker(self):
        assert relative_difference(0.3, 0.0) is None

    def test_negative_denominator_rejected(self):
        with pytest.raises(ValueError):
            relative_difference(0.3, -0.1)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0, 1), st.floats(1e-6, 1))
    def test_sign_matches_gap(self, auc, iou_tau):
        rel = relative_difference(auc, iou_tau)
        assert (rel == 0) == (auc == iou_tau)
        assert np.sign(rel) == np.sign(auc - iou_tau)


class TestPerformanceSwing:
    def test_fixture_swing(self):
        swing = performance_swing(-32.9, +202.7)
        assert swing == pytest.approx(235.6, abs=1e-9)

    def test_threshold_invariant_method_has_zero_swing(self):
        assert performance_swing(-10.0, -10.0) == 0.0

    def test_equal_inputs_always_zero(self):
        for x in (-50.0, 0.0, 123.4):
            assert performance_swing(x, x) == 0.0

    def test_undefined_propagates(self):
        assert performance_swing(None, 1.0) is None
        assert performance_swing(1.0, None) is None

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-500, 500), st.floats(-500, 500))
    def test_symmetry(self, x, y):
        assert performance_swing(x, y) == performance_swing(y, x)


def _curve(grid: ThresholdGrid, ious) -> IoUCurve:
    ious = tuple(float(v) for v in ious)
    return IoUCurve(grid=grid, ious=ious, auc=auc_iou(ious, grid), auc_raw=0.0)


def _study(curves_by_method: dict[str, list[list[float]]], grid: ThresholdGrid):
    return {
        m: {f"img{i:03d}": _curve(grid, ious) for i, ious in enumerate(curve_list)}
        for m, curve_list in curves_by_method.items()
    }


class TestThresholdBiasTable:
    def test_constant_curve_method_has_zero_rel_diff_and_no_significance(self):
        grid = ThresholdGrid.default()
        rng = np.random.default_rng(0)
        flat = [[0.2 + 0.01 * i] * 19 for i in range(8)]
        wavy = [list(np.clip(rng.uniform(0.1, 0.9) - 0.3 * np.array(grid.taus), 0, 1)) for _ in range(8)]
        rows = threshold_bias_table(_study({"flat": flat, "wavy": wavy}, grid))
        flat_row = next(r for r in rows if r.method_id == "flat")
        for tau in grid.taus:
            assert flat_row.rel_diff_at[tau] == 0.0
            assert flat_row.p_adjusted_at[tau] == 1.0
        assert flat_row.swing == 0.0

    def test_family_size_is_methods_times_grid(self):
        grid = ThresholdGrid.default()
        rng = np.random.default_rng(1)
        study = {
            f"m{k}": [list(np.clip(rng.uniform(0.2, 0.8, size=19), 0, 1)) for _ in range(6)]
            for k in range(7)
        }
        rows = threshold_bias_table(_study(study, grid))
        assert len(rows) == 7
        assert sum(len(r.p_adjusted_at) for r in rows) == 133

    def test_reconstructed_aggregate_fixture_reproduces_rel_diffs(self):
        # Per-image curves anchored to the benchmark per-threshold means;
        # every image shares the method's mean curve, so table means hit the
        # anchors exactly.
        grid = ThresholdGrid.default()
        study = {}
        expected = {}
        for method, (auc, c03, c05, c07) in AGGREGATE_FIXTURE.items():
            anchors = {0.3: c03[0], 0.5: c05[0], 0.7: c07[0]}
            base = np.interp(grid.taus, [0.05, 0.3, 0.5, 0.7, 0.95],
                             [min(1.0, anchors[0.3] * 1.6), anchors[0.3], anchors[0.5],
                              anchors[0.7], max(0.0, anchors[0.7] * 0.4)])
            study[method] = [list(base)] * 4
            expected[method] = {0.3: c03[1], 0.5: c05[1], 0.7: c07[1]}
        rows = threshold_bias_table(_study(study, grid))
        for row in rows:
            anchors = {  # means must equal the fixture inputs exactly
                tau: AGGREGATE_FIXTURE[row.method_id][k + 1][0]
                for k, tau in enumerate((0.3, 0.5, 0.7))
            }
            for tau, anchor in anchors.items():
                key = grid.taus[grid.index_of(tau)]
                assert row.iou_at[key] == pytest.approx(anchor, abs=1e-12)
                got = relative_difference(AGGREGATE_FIXTURE[row.method_id][0], row.iou_at[key])
                assert got == pytest.approx(expected[row.method_id][tau], abs=0.3 + 1e-9)

    def test_misaligned_images_rejected(self):
        grid = ThresholdGrid.default()
        study = _study({"a": [[0.5] * 19] * 3, "b": [[0.4] * 19] * 3}, grid)
        study["b"]["extra"] = study["b"]["img000"]
        with pytest.raises(ValidationError):
            threshold_bias_table(study)

    def test_taus_of_interest_must_be_on_grid(self):
        grid = ThresholdGrid.default()
        study = _study({"a": [[0.5] * 19] * 3}, grid)
        with pytest.raises(ValidationError):
            threshold_bias_table(study, taus_of_interest=(0.33,))


class TestRankingComparison:
    def test_identical_criteria_have_no_reversals(self):
        scores = {"x": 0.3, "y": 0.2, "z": 0.1}
        cmp = ranking_comparison(scores, dict(scores))
        assert cmp.reversals == ()

    def test_full_reversal(self):
        cmp = ranking_comparison({"x": 3.0, "y": 2.0, "z": 1.0}, {"x": 1.0, "y": 2.0, "z": 3.0})
        assert len(cmp.reversals) == 3

    def test_benchmark_reversal_pair(self):
        auc = {m: v[0] for m, v in AGGREGATE_FIXTURE.items()}
        iou05 = {m: v[2][0] for m, v in AGGREGATE_FIXTURE.items()}
        cmp = ranking_comparison(auc, iou05, "auc_iou", "iou@0.5")
        assert ("GradCAM", "SmoothGrad_IG") in cmp.reversals

    def test_swapping_criteria_keeps_reversal_set(self):
        rng = np.random.default_rng(4)
        a = {f"m{k}": float(rng.random()) for k in range(6)}
        b = {f"m{k}": float(rng.random()) for k in range(6)}
        assert ranking_comparison(a, b).reversals == ranking_comparison(b, a).reversals

    def test_ranks_are_dense_permutations(self):
        a = {"x": 0.5, "y": 0.5, "z": 0.1}  # tie broken lexicographically
        cmp = ranking_comparison(a, a)
        assert sorted(cmp.rank_a.values()) == [1, 2, 3]
        assert cmp.rank_a["x"] < cmp.rank_a["y"]
        assert cmp.had_ties

    def test_method_sets_must_match(self):
        with pytest.raises(ValidationError):
            ranking_comparison({"a": 1.0}, {"b": 1.0})
