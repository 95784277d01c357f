"""Synthetic archetype generator tests."""

import hashlib
from pathlib import Path

import numpy as np
import pytest

from attreval import (
    ArchetypeSpec,
    PortableRng,
    ValidationError,
    derive_seed,
    evaluate_study,
    generate,
    generate_study,
    iou_curve,
    load_manifest,
)


def tree_digest(root: Path) -> str:
    h = hashlib.sha256()
    for path in sorted(root.rglob("*")):
        if path.is_file():
            h.update(str(path.relative_to(root)).encode())
            h.update(path.read_bytes())
    return h.hexdigest()


class TestPortableRng:
    def test_scalar_and_block_draws_agree(self):
        a = PortableRng(1234)
        b = PortableRng(1234)
        scalar = [a.next_u64() for _ in range(32)]
        block = list(b._block_u64(32))
        assert scalar == [int(x) for x in block]

    def test_streams_differ_by_seed(self):
        assert PortableRng(1).next_u64() != PortableRng(2).next_u64()

    def test_uniform_range(self):
        rng = PortableRng(7)
        u = rng.uniform(10_000)
        assert u.min() >= 0.0 and u.max() < 1.0
        assert abs(u.mean() - 0.5) < 0.02

    def test_normal_moments(self):
        z = PortableRng(11).normal(20_000)
        assert abs(z.mean()) < 0.03
        assert abs(z.std() - 1.0) < 0.03

    def test_derive_seed_children_are_distinct(self):
        children = {derive_seed(42, i, j) for i in range(50) for j in range(8)}
        assert len(children) == 400


class TestGenerate:
    def test_perfect_archetype_scores_one_everywhere(self):
        spec = ArchetypeSpec(kind="perfect", center=(16, 16), radius=6)
        amap, mask = generate(spec, (32, 32))
        curve = iou_curve(amap, mask)
        assert curve.ious == (1.0,) * 19
        assert curve.auc == 1.0

    def test_inverted_archetype_scores_zero(self):
        spec = ArchetypeSpec(kind="inverted", center=(16, 16), radius=6)
        amap, mask = generate(spec, (32, 32))
        curve = iou_curve(amap, mask)
        assert curve.ious == (0.0,) * 19

    def test_mask_is_disk_with_reported_count(self):
        spec = ArchetypeSpec(kind="perfect", center=(10, 12), radius=4)
        _, mask = generate(spec, (24, 24))
        assert mask.original_positive_pixels == mask.positive_pixels
        assert mask.bits[10, 12] == 1
        assert mask.bits[10, 12 + 4] == 1
        assert mask.bits[10, 12 + 5] == 0

    def test_diffuse_superpixel_is_two_valued_and_flat(self):
        spec = ArchetypeSpec(kind="diffuse_superpixel", center=(16, 16), radius=6, superpixel_size=8)
        amap, mask = generate(spec, (32, 32))
        assert set(np.unique(amap.values)) == {0.2, 1.0}
        curve = iou_curve(amap, mask)
        assert len(set(curve.ious)) <= 2  # one plateau break at the low value
        plateau = [v for tau, v in zip(curve.grid.taus, curve.ious) if tau > 0.2]
        assert len(set(plateau)) == 1

    def test_concentrated_tail_is_monotone(self):
        spec = ArchetypeSpec(kind="concentrated", center=(20, 20), radius=8, concentration=3.0)
        amap, mask = generate(spec, (48, 48))
        curve = iou_curve(amap, mask)
        # boundary attribution exp(-3) < 0.05, so the whole grid is the tail
        assert all(a >= b for a, b in zip(curve.ious, curve.ious[1:]))

    def test_uniform_noise_independent_of_mask(self):
        spec = ArchetypeSpec(kind="uniform_noise", center=(16, 16), radius=5, seed=3)
        amap, _ = generate(spec, (32, 32))
        assert 0.0 <= amap.values.min() < amap.values.max() < 1.0

    def test_deterministic_given_seed(self):
        spec = ArchetypeSpec(kind="concentrated", center=(16, 16), radius=5, noise_level=0.1, seed=99)
        a, _ = generate(spec, (32, 32))
        b, _ = generate(spec, (32, 32))
        np.testing.assert_array_equal(a.values, b.values)

    def test_lesion_must_fit(self):
        spec = ArchetypeSpec(kind="perfect", center=(2, 2), radius=6)
        with pytest.raises(ValueError):
            generate(spec, (16, 16))

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError):
            ArchetypeSpec(kind="sorcery")


class TestGenerateStudy:
    METHODS = [
        ArchetypeSpec(kind="concentrated", method_id="grad_like"),
        ArchetypeSpec(kind="diffuse_superpixel", method_id="superpixel_like"),
        ArchetypeSpec(kind="perfect", method_id="oracle"),
    ]

    def test_smoke_study_loads_and_evaluates(self, tmp_path):
        manifest = generate_study(self.METHODS, 6, tmp_path / "study", seed=5)
        reloaded = load_manifest(tmp_path / "study" / "manifest.json")
        assert reloaded.methods == manifest.methods
        assert len(reloaded.images) == 6
        result = evaluate_study(reloaded)
        oracle = result.method("oracle")
        assert oracle.auc_mean == 1.0
        assert oracle.auc_std == 0.0

    def test_single_image_study(self, tmp_path):
        manifest = generate_study(self.METHODS, 1, tmp_path / "one", seed=9)
        result = evaluate_study(manifest)
        for res in result.method_results:
            only = next(iter(res.per_image.values()))
            assert res.auc_mean == only.auc
            assert res.auc_std == 0.0
            assert res.ci.degenerate

    def test_identical_seeds_reproduce_identical_trees(self, tmp_path):
        generate_study(self.METHODS, 5, tmp_path / "a", seed=1)
        generate_study(self.METHODS, 5, tmp_path / "b", seed=1)
        assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")

    def test_different_seeds_differ(self, tmp_path):
        generate_study(self.METHODS, 5, tmp_path / "a", seed=1)
        generate_study(self.METHODS, 5, tmp_path / "b", seed=2)
        assert tree_digest(tmp_path / "a") != tree_digest(tmp_path / "b")

    def test_duplicate_method_ids_rejected(self, tmp_path):
        methods = [ArchetypeSpec(kind="perfect"), ArchetypeSpec(kind="perfect")]
        with pytest.raises(ValidationError):
            generate_study(methods, 2, tmp_path / "dup")

    def test_radius_clusters_span_strata(self, tmp_path):
        manifest = generate_study(self.METHODS, 30, tmp_path / "s", seed=3, radius_choices=(4, 9, 14))
        sizes = sorted({e.original_positive_pixels for e in manifest.images})
        assert len(sizes) == 3  # one disk area per radius cluster
