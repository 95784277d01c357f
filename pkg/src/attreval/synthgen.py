"""Synthetic attribution/mask generator with archetypal threshold behaviors.

Archetypes:

* ``concentrated`` — attribution decays exponentially with distance from
  the lesion center (monotonic IoU degradation at high thresholds).
* ``diffuse_superpixel`` — block-constant two-valued map, 1.0 on blocks
  touching the lesion and a low constant elsewhere (threshold-invariant
  plateaus).
* ``uniform_noise`` — i.i.d. values independent of the mask.
* ``perfect`` — the mask itself.
* ``inverted`` — one minus the mask.

Randomness comes from a counter-based splitmix64 stream so identical
seeds reproduce identical grids on any platform: output k of a stream
seeded with s is ``mix64((s + (k+1) * GOLDEN) mod 2^64)`` where GOLDEN is
0x9E3779B97F4A7C15 and ``mix64`` is the splitmix64 finalizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .grid_io import (
    AttributionMap,
    GroundTruthMask,
    ImageEntry,
    StudyManifest,
    save_manifest,
    write_grid,
    write_pgm,
)

ARCHETYPE_KINDS = ("concentrated", "diffuse_superpixel", "uniform_noise", "perfect", "inverted")

_MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """splitmix64 finalizer."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *indices: int) -> int:
    """Mix a master seed with stream indices into an independent child seed."""
    s = seed & _MASK64
    for ix in indices:
        s = _mix64(s ^ ((ix + 1) * GOLDEN & _MASK64))
    return s


class PortableRng:
    """Counter-based splitmix64 stream; vectorized draws match scalar order."""

    def __init__(self, seed: int):
        self._seed = seed & _MASK64
        self._counter = 0

    def _block_u64(self, n: int) -> np.ndarray:
        ks = np.arange(self._counter + 1, self._counter + n + 1, dtype=np.uint64)
        self._counter += n
        with np.errstate(over="ignore"):
            z = np.uint64(self._seed) + ks * np.uint64(GOLDEN)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
            return z ^ (z >> np.uint64(31))

    def next_u64(self) -> int:
        self._counter += 1
        return _mix64((self._seed + self._counter * GOLDEN) & _MASK64)

    def uniform(self, n: int | None = None):
        """Floats in [0, 1) with 53-bit resolution."""
        if n is None:
            return (self.next_u64() >> 11) / 2**53
        return (self._block_u64(n) >> np.uint64(11)).astype(np.float64) / 2**53

    def normal(self, n: int) -> np.ndarray:
        """Standard normals via Box-Muller; consumes 2n uniforms."""
        u = self._block_u64(2 * n)
        u1 = ((u[:n] >> np.uint64(11)).astype(np.float64) + 1.0) / (2**53 + 1)  # (0, 1]
        u2 = (u[n:] >> np.uint64(11)).astype(np.float64) / 2**53
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)

    def randint(self, n: int) -> int:
        # Modulo bias is < 2**-50 for any practical n; fine for layout choices.
        return self.next_u64() % n


@dataclass(frozen=True)
class ArchetypeSpec:
    """Recipe for one synthetic attribution method."""

    kind: str
    center: tuple[int, int] = (0, 0)  # (row, col) of the lesion center
    radius: int = 0  # lesion radius in pixels; 0 = template, set per image
    concentration: float = 3.0  # exp decay rate for "concentrated"
    superpixel_size: int = 8
    noise_level: float = 0.0  # std of additive noise (concentrated/diffuse only)
    background: float = 0.2  # off-lesion block value for "diffuse_superpixel"
    seed: int = 0
    method_id: str = ""

    def __post_init__(self):
        if self.kind not in ARCHETYPE_KINDS:
            raise ValidationError(f"unknown archetype kind {self.kind!r}")
        if self.radius < 0:
            raise ValidationError("radius must be >= 0")
        if self.superpixel_size < 1:
            raise ValidationError("superpixel_size must be >= 1")
        if self.noise_level < 0:
            raise ValidationError("noise_level must be >= 0")


def _disk_mask(dims: tuple[int, int], center: tuple[int, int], radius: int) -> np.ndarray:
    height, width = dims
    row, col = center
    if radius < 1:
        raise ValueError("lesion radius must be >= 1")
    if row - radius < 0 or row + radius > height - 1 or col - radius < 0 or col + radius > width - 1:
        raise ValueError(f"lesion (center={center}, radius={radius}) does not fit inside {dims}")
    rr, cc = np.ogrid[:height, :width]
    return ((rr - row) ** 2 + (cc - col) ** 2 <= radius**2).astype(np.uint8)


def _block_values(mask: np.ndarray, block: int, background: float) -> np.ndarray:
    """Block-constant map: 1.0 on blocks overlapping the mask, else background."""
    height, width = mask.shape
    values = np.empty(mask.shape, dtype=np.float64)
    for top in range(0, height, block):
        for left in range(0, width, block):
            window = mask[top : top + block, left : left + block]
            values[top : top + block, left : left + block] = (
                1.0 if window.any() else background
            )
    return values


def _archetype_values(spec: ArchetypeSpec, mask: np.ndarray, rng: PortableRng) -> np.ndarray:
    height, width = mask.shape
    if spec.kind == "concentrated":
        rr, cc = np.ogrid[:height, :width]
        dist = np.sqrt((rr - spec.center[0]) ** 2.0 + (cc - spec.center[1]) ** 2.0)
        values = np.exp(-spec.concentration * dist / spec.radius)
    elif spec.kind == "diffuse_superpixel":
        values = _block_values(mask, spec.superpixel_size, spec.background)
    elif spec.kind == "uniform_noise":
        return rng.uniform(height * width).reshape(height, width)
    elif spec.kind == "perfect":
        return mask.astype(np.float64)
    else:  # inverted
        return 1.0 - mask.astype(np.float64)
    if spec.noise_level > 0:
        values = values + spec.noise_level * rng.normal(height * width).reshape(height, width)
    return values


def generate(
    spec: ArchetypeSpec,
    dims: tuple[int, int],
    *,
    image_id: str = "",
) -> tuple[AttributionMap, GroundTruthMask]:
    """Produce one (map, mask) pair; deterministic given spec and seed."""
    mask = _disk_mask(dims, spec.center, spec.radius)
    rng = PortableRng(spec.seed)
    values = _archetype_values(spec, mask, rng)
    method_id = spec.method_id or spec.kind
    return (
        AttributionMap(values, method_id=method_id, image_id=image_id),
        GroundTruthMask(mask, original_positive_pixels=int(mask.sum()), image_id=image_id),
    )


def generate_study(
    methods: list[ArchetypeSpec],
    n_images: int,
    out_dir: str | Path,
    *,
    dims: tuple[int, int] = (64, 64),
    radius_choices: tuple[int, ...] = (5, 9, 14),
    seed: int = 0,
    study_name: str = "synthetic-study",
) -> StudyManifest:
    """Write a full synthetic study (grids, masks, manifest) to ``out_dir``.

    Every method shares the per-image lesion geometry, so downstream
    statistics stay paired. The output tree is a pure function of the
    arguments; rerunning with the same seed reproduces it byte for byte.
    """
    if n_images < 1:
        raise ValidationError("n_images must be >= 1")
    if not methods:
        raise ValidationError("at least one archetype is required")
    method_ids = [spec.method_id or spec.kind for spec in methods]
    if len(set(method_ids)) != len(method_ids):
        raise ValidationError(f"method_ids must be unique, got {method_ids}")
    if not radius_choices or min(radius_choices) < 1:
        raise ValidationError("radius_choices must be nonempty with radii >= 1")
    max_radius = max(radius_choices)
    height, width = dims
    if 2 * max_radius + 1 > min(height, width):
        raise ValidationError("largest radius does not fit inside dims")

    out = Path(out_dir)
    (out / "masks").mkdir(parents=True, exist_ok=True)
    for method_id in method_ids:
        (out / "grids" / method_id).mkdir(parents=True, exist_ok=True)

    entries = []
    for i in range(n_images):
        image_id = f"img{i:04d}"
        geom = PortableRng(derive_seed(seed, i, 0))
        radius = radius_choices[geom.randint(len(radius_choices))]
        row = radius + geom.randint(height - 2 * radius)
        col = radius + geom.randint(width - 2 * radius)

        mask = _disk_mask(dims, (row, col), radius)
        mask_rel = f"masks/{image_id}.pgm"
        write_pgm(mask, out / mask_rel)

        grids = {}
        for k, (spec, method_id) in enumerate(zip(methods, method_ids)):
            per_image = replace(
                spec,
                center=(row, col),
                radius=radius,
                seed=derive_seed(seed, i, k + 1),
                method_id=method_id,
            )
            rng = PortableRng(per_image.seed)
            values = _archetype_values(per_image, mask, rng)
            grid_rel = f"grids/{method_id}/{image_id}.agrd"
            write_grid(AttributionMap(values, method_id=method_id, image_id=image_id), out / grid_rel)
            grids[method_id] = grid_rel

        entries.append(
            ImageEntry(
                image_id=image_id,
                mask=mask_rel,
                original_positive_pixels=int(mask.sum()),
                class_label="synthetic",
                grids=grids,
            )
        )

    manifest = StudyManifest(
        study_name=study_name,
        methods=tuple(method_ids),
        images=tuple(entries),
        base_dir=out,
        seed=seed,
    )
    save_manifest(manifest, out / "manifest.json")
    return manifest
