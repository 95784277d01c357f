"""Reading and writing attribution grids, masks, and study manifests.

On-disk formats:

* AGRD grid — 13-byte header (magic ``AGRD``, version byte ``1``, height and
  width as 32-bit little-endian unsigned) followed by ``height * width``
  IEEE-754 binary32 little-endian values, row-major.
* Mask — binary PGM (``P5``, maxval 255) or an AGRD grid binarized on read.
* Manifest — JSON: ``{study_name, methods, images:[{image_id, mask,
  original_positive_pixels, class_label, grids:{method_id: path}}]}`` with
  paths relative to the manifest's directory.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import CorruptedFileError, FormatError, ValidationError
from .validation import check_binary_grid, check_finite_grid

AGRD_MAGIC = b"AGRD"
AGRD_VERSION = 1
_HEADER = struct.Struct("<4sBII")  # magic, version, height, width

DEFAULT_MASK_THRESHOLD = 127


@dataclass(frozen=True)
class AttributionMap:
    """One continuous attribution grid for an (image, method) pair.

    Values are held as float64 in memory; the AGRD file format stores
    binary32, so grids read from disk are binary32-representable.
    """

    values: np.ndarray
    method_id: str = ""
    image_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", check_finite_grid(self.values, "attribution values"))

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class GroundTruthMask:
    """Binary relevance mask plus the positive-pixel count at source resolution."""

    bits: np.ndarray
    original_positive_pixels: int = 0
    image_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "bits", check_binary_grid(self.bits, "mask bits"))
        if self.original_positive_pixels < 0:
            raise ValidationError("original_positive_pixels must be >= 0")

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def positive_pixels(self) -> int:
        return int(np.count_nonzero(self.bits))


def write_grid(amap: AttributionMap, path: str | Path) -> None:
    """Serialize a map as AGRD. Values must fit binary32 without overflow."""
    payload = amap.values.astype("<f4")
    if not np.all(np.isfinite(payload)):
        raise ValidationError("attribution values overflow binary32 range")
    header = _HEADER.pack(AGRD_MAGIC, AGRD_VERSION, amap.height, amap.width)
    Path(path).write_bytes(header + payload.tobytes(order="C"))


def read_grid(path: str | Path, *, method_id: str = "", image_id: str = "") -> AttributionMap:
    """Parse an AGRD file into an :class:`AttributionMap`."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CorruptedFileError(f"{path}: file shorter than the 13-byte AGRD header")
    magic, version, height, width = _HEADER.unpack_from(data)
    if magic != AGRD_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {AGRD_MAGIC!r}")
    if version != AGRD_VERSION:
        raise FormatError(f"{path}: unsupported AGRD version {version}")
    if height < 1 or width < 1:
        raise ValidationError(f"{path}: dimensions must be >= 1, got {height}x{width}")
    expected = _HEADER.size + 4 * height * width
    if len(data) != expected:
        raise CorruptedFileError(f"{path}: expected {expected} bytes, found {len(data)}")
    values = np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(height, width)
    if not np.all(np.isfinite(values)):
        raise ValidationError(f"{path}: payload contains NaN or infinity")
    return AttributionMap(values.astype(np.float64), method_id=method_id, image_id=image_id)


def write_pgm(mask: GroundTruthMask | np.ndarray, path: str | Path) -> None:
    """Write a binary mask as PGM P5 with {0, 255} intensities."""
    bits = mask.bits if isinstance(mask, GroundTruthMask) else check_binary_grid(mask)
    header = f"P5\n{bits.shape[1]} {bits.shape[0]}\n255\n".encode("ascii")
    Path(path).write_bytes(header + (bits * np.uint8(255)).tobytes(order="C"))


def _read_pgm(path: Path) -> np.ndarray:
    """Parse a binary PGM (P5, maxval <= 255) into a uint8 intensity array."""
    data = path.read_bytes()
    if data[:2] != b"P5":
        raise FormatError(f"{path}: not a binary PGM (P5) file")

    # Header tokens may be separated by whitespace and '#' comments.
    pos = 2
    tokens: list[int] = []
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise CorruptedFileError(f"{path}: truncated PGM header")
        try:
            tokens.append(int(data[start:pos]))
        except ValueError as exc:
            raise FormatError(f"{path}: malformed PGM header token {data[start:pos]!r}") from exc
    width, height, maxval = tokens
    if maxval > 255 or maxval < 1:
        raise FormatError(f"{path}: only 8-bit PGM supported, got maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    payload = data[pos : pos + width * height]
    if len(payload) != width * height:
        raise CorruptedFileError(f"{path}: expected {width * height} pixels, found {len(payload)}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width)


def read_mask(
    path: str | Path,
    binarize_threshold: float = DEFAULT_MASK_THRESHOLD,
    *,
    inclusive: bool = False,
    image_id: str = "",
    original_positive_pixels: int | None = None,
) -> GroundTruthMask:
    """Read a mask file and binarize it.

    A pixel becomes 1 iff intensity > ``binarize_threshold`` (so 127 stays 0
    at the default); pass ``inclusive=True`` for >=. PGM intensities are
    compared as 8-bit values, AGRD payloads as raw floats. When
    ``original_positive_pixels`` is None, the mask's own positive count
    is used.
    """
    p = Path(path)
    head = p.open("rb").read(4)
    if head[:2] == b"P5":
        intensities = _read_pgm(p)
    elif head == AGRD_MAGIC:
        intensities = read_grid(p).values
    else:
        raise FormatError(f"{path}: unsupported mask format (want PGM P5 or AGRD)")
    bits = (intensities >= binarize_threshold) if inclusive else (intensities > binarize_threshold)
    bits = bits.astype(np.uint8)
    count = int(np.count_nonzero(bits)) if original_positive_pixels is None else original_positive_pixels
    return GroundTruthMask(bits, original_positive_pixels=count, image_id=image_id)


@dataclass(frozen=True)
class ImageEntry:
    """One evaluation image: its mask, per-method grids, and metadata."""

    image_id: str
    mask: str
    original_positive_pixels: int
    class_label: str
    grids: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class StudyManifest:
    """Declares the methods and images of one evaluation study.

    ``base_dir`` anchors the relative paths carried by the image entries;
    image and method order is preserved exactly as declared.
    """

    study_name: str
    methods: tuple[str, ...]
    images: tuple[ImageEntry, ...]
    base_dir: Path = Path(".")
    seed: int | None = None

    def mask_path(self, entry: ImageEntry) -> Path:
        return self.base_dir / entry.mask

    def grid_path(self, entry: ImageEntry, method_id: str) -> Path:
        return self.base_dir / entry.grids[method_id]

    def to_canonical_dict(self) -> dict:
        doc = {
            "study_name": self.study_name,
            "methods": list(self.methods),
            "images": [
                {
                    "image_id": e.image_id,
                    "mask": e.mask,
                    "original_positive_pixels": e.original_positive_pixels,
                    "class_label": e.class_label,
                    "grids": dict(e.grids),
                }
                for e in self.images
            ],
        }
        if self.seed is not None:
            doc["seed"] = self.seed
        return doc


def _require(doc: Mapping, key: str, path) -> object:
    if key not in doc:
        raise ValidationError(f"{path}: manifest entry missing required key {key!r}")
    return doc[key]


def load_manifest(path: str | Path, *, check_files: bool = True) -> StudyManifest:
    """Load and validate a study manifest.

    Checks id uniqueness, that every image carries exactly one grid per
    declared method, and (unless ``check_files=False``) that every
    referenced file exists.
    """
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON: {exc}") from exc

    methods = list(_require(doc, "methods", p))
    if len(set(methods)) != len(methods):
        raise ValidationError(f"{path}: duplicate method_ids in manifest")
    entries = []
    seen_images: set[str] = set()
    for raw in _require(doc, "images", p):
        image_id = str(_require(raw, "image_id", p))
        if image_id in seen_images:
            raise ValidationError(f"{path}: duplicate image_id {image_id!r}")
        seen_images.add(image_id)
        grids = dict(_require(raw, "grids", p))
        if set(grids) != set(methods):
            missing = set(methods) ^ set(grids)
            raise ValidationError(
                f"{path}: image {image_id!r} grids do not match declared methods "
                f"(difference: {sorted(missing)})"
            )
        entries.append(
            ImageEntry(
                image_id=image_id,
                mask=str(_require(raw, "mask", p)),
                original_positive_pixels=int(_require(raw, "original_positive_pixels", p)),
                class_label=str(_require(raw, "class_label", p)),
                grids=grids,
            )
        )

    manifest = StudyManifest(
        study_name=str(_require(doc, "study_name", p)),
        methods=tuple(methods),
        images=tuple(entries),
        base_dir=p.parent,
        seed=doc.get("seed"),
    )
    if check_files:
        for entry in manifest.images:
            mask_file = manifest.mask_path(entry)
            if not mask_file.is_file():
                raise FileNotFoundError(f"{path}: mask not found: {mask_file}")
            for method_id in manifest.methods:
                grid_file = manifest.grid_path(entry, method_id)
                if not grid_file.is_file():
                    raise FileNotFoundError(f"{path}: grid not found: {grid_file}")
    return manifest


def save_manifest(manifest: StudyManifest, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(manifest.to_canonical_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
