"""Entropy-based viewing score and score-driven region construction.

The score of a view is the entropy of its edge-orientation distribution
multiplied by the object-to-image area ratio: rich, varied edges seen
from close up score high, bland or distant views score low. Thresholded
view samples around an object are then folded into a sampled
diameter-bounded region.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, InsufficientCoverageError
from .geom import Point3, Region, Sampled, Shell, farthest_pair_distance

ORIENTATION_BINS = 360
DEFAULT_EDGE_FRACTION = 0.1
DEFAULT_SCORE_THRESHOLD = 0.3

# Built-in per-class diameter defaults (meters): mean max / mean min region
# diameter and the minimum viewing radius for unit-scale models.
@dataclass(frozen=True)
class DiameterProfile:
    d_max: float
    d_min: float
    unit_distance: float


DIAMETER_PROFILES: dict[str, DiameterProfile] = {
    "car": DiameterProfile(8.2, 5.4, 3.5),
    "bus": DiameterProfile(17.3, 13.4, 10.4),
    "piano": DiameterProfile(6.2, 4.5, 3.1),
    "table": DiameterProfile(5.6, 3.3, 2.5),
    "chair": DiameterProfile(3.4, 1.3, 0.5),
    "bed": DiameterProfile(5.2, 3.2, 2.0),
}


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major grayscale image with intensities in [0, 255]."""

    width: int
    height: int
    pixels: np.ndarray  # (height, width) float

    def __post_init__(self):
        arr = np.asarray(self.pixels, dtype=float)
        if arr.shape != (self.height, self.width):
            raise ContractError(
                f"pixel array {arr.shape} does not match {self.height}x{self.width}"
            )
        if self.width < 3 or self.height < 3:
            raise ContractError("image must be at least 3x3 for gradient windows")
        if arr.min() < 0.0 or arr.max() > 255.0:
            raise ContractError("intensities must lie in [0, 255]")
        object.__setattr__(self, "pixels", arr)
        arr.flags.writeable = False

    @staticmethod
    def from_array(arr) -> "GrayImage":
        arr = np.asarray(arr, dtype=float)
        return GrayImage(width=arr.shape[1], height=arr.shape[0], pixels=arr)


@dataclass(frozen=True, eq=False)
class ObjectMask:
    """Per-pixel object membership, dimensions matching the paired image."""

    width: int
    height: int
    bits: np.ndarray  # (height, width) bool

    def __post_init__(self):
        arr = np.asarray(self.bits).astype(bool)
        if arr.shape != (self.height, self.width):
            raise ContractError(
                f"mask array {arr.shape} does not match {self.height}x{self.width}"
            )
        object.__setattr__(self, "bits", arr)
        arr.flags.writeable = False

    @staticmethod
    def from_array(arr) -> "ObjectMask":
        arr = np.asarray(arr)
        return ObjectMask(width=arr.shape[1], height=arr.shape[0], bits=arr.astype(bool))


@dataclass(frozen=True, eq=False)
class OrientationHistogram:
    """Edge-orientation counts over 360 one-degree bins."""

    bins: np.ndarray  # (360,) int
    total_edge_pixels: int

    def __post_init__(self):
        arr = np.asarray(self.bins, dtype=int)
        if arr.shape != (ORIENTATION_BINS,):
            raise ContractError("histogram needs exactly 360 bins")
        if int(arr.sum()) != self.total_edge_pixels:
            raise ContractError("bin counts do not sum to total_edge_pixels")
        object.__setattr__(self, "bins", arr)
        arr.flags.writeable = False


_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=float)
_SOBEL_Y = _SOBEL_X.T


def _sobel_gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(gx, gy) on interior pixels; border pixels have no full 3x3 window."""
    h, w = img.shape
    gx = np.zeros((h - 2, w - 2))
    gy = np.zeros((h - 2, w - 2))
    for dr in range(3):
        for dc in range(3):
            block = img[dr : dr + h - 2, dc : dc + w - 2]
            gx += _SOBEL_X[dr, dc] * block
            gy += _SOBEL_Y[dr, dc] * block
    return gx, gy


def edge_orientation_histogram(
    image: GrayImage, edge_fraction: float = DEFAULT_EDGE_FRACTION
) -> OrientationHistogram:
    """Histogram of gradient orientations over the image's edge pixels.

    A pixel is an edge pixel when its gradient magnitude reaches
    ``edge_fraction`` times the maximum magnitude in the image; a constant
    image therefore yields an empty histogram. Orientations map to
    integer-degree bins, bin b covering [b, b+1) degrees.
    """
    if not (0.0 < edge_fraction <= 1.0):
        raise ContractError("edge_fraction must be in (0, 1]")
    gx, gy = _sobel_gradients(image.pixels)
    mag = np.hypot(gx, gy)
    peak = float(mag.max()) if mag.size else 0.0
    if peak == 0.0:
        return OrientationHistogram(bins=np.zeros(ORIENTATION_BINS, dtype=int), total_edge_pixels=0)
    edge = mag >= edge_fraction * peak
    deg = np.degrees(np.arctan2(gy[edge], gx[edge])) % 360.0
    idx = np.floor(deg).astype(int) % ORIENTATION_BINS
    bins = np.bincount(idx, minlength=ORIENTATION_BINS)
    return OrientationHistogram(bins=bins, total_edge_pixels=int(bins.sum()))


def histogram_entropy(hist: OrientationHistogram) -> float:
    """Natural-log entropy of the orientation distribution; 0 when empty."""
    if hist.total_edge_pixels == 0:
        return 0.0
    p = hist.bins[hist.bins > 0] / hist.total_edge_pixels
    return float(-np.sum(p * np.log(p))) + 0.0  # fold -0.0 to 0.0


def viewing_score(
    image: GrayImage, mask: ObjectMask, edge_fraction: float = DEFAULT_EDGE_FRACTION
) -> float:
    """Edge-orientation entropy times the object-to-image area ratio."""
    if (mask.width, mask.height) != (image.width, image.height):
        raise ContractError(
            f"mask {mask.width}x{mask.height} does not match image {image.width}x{image.height}"
        )
    hist = edge_orientation_histogram(image, edge_fraction)
    if hist.total_edge_pixels == 0:
        return 0.0
    object_pixels = int(mask.bits.sum())
    if object_pixels == 0:
        return 0.0
    ratio = object_pixels / (image.width * image.height)
    return histogram_entropy(hist) * ratio


# ------------------------------------------------------------------ view samples


@dataclass(frozen=True)
class ViewSample:
    """A scored view direction: spherical angles, range and score."""

    azimuth: float
    elevation: float
    distance: float
    score: float

    def __post_init__(self):
        if self.distance <= 0:
            raise ContractError("view sample distance must be positive")
        if self.score < 0:
            raise ContractError("view sample score must be non-negative")


def _sample_direction(s: ViewSample) -> np.ndarray:
    ce = math.cos(s.elevation)
    return np.array(
        [ce * math.cos(s.azimuth), ce * math.sin(s.azimuth), math.sin(s.elevation)]
    )


def build_region_from_scores(
    center: Point3, samples: list[ViewSample], threshold: float = DEFAULT_SCORE_THRESHOLD
) -> Region:
    """Fold thresholded view samples into a sampled diameter-bounded region.

    Samples scoring at least ``threshold`` become boundary points at their
    viewing distance about the object center, with outward radial normals.
    d_max is the farthest surviving pair; d_min is twice the smallest
    surviving radial distance.
    """
    if threshold <= 0:
        raise ContractError("threshold must be positive")
    if len(samples) < 8:
        raise InsufficientCoverageError(f"need >= 8 view samples, got {len(samples)}")
    kept = [s for s in samples if s.score >= threshold]
    if len(kept) < 8:
        raise InsufficientCoverageError(
            f"only {len(kept)} of {len(samples)} samples survive threshold {threshold}"
        )
    c = center.as_array()
    dirs = np.array([_sample_direction(s) for s in kept])
    radii = np.array([s.distance for s in kept])
    pts = c + dirs * radii[:, None]
    # d_max must also dominate twice the largest radial distance so the
    # region invariants hold even for lopsided survivor sets; for
    # well-spread survivors this equals the farthest pair.
    d_max = max(farthest_pair_distance(pts), 2.0 * float(radii.max()))
    d_min = 2.0 * float(radii.min())
    return Region(
        center=center,
        shape=Sampled(points=pts, normals=dirs, d_min=min(d_min, d_max), d_max=d_max),
    )


def region_from_profile(center: Point3, profile: str) -> Region:
    """Fallback region from the built-in class defaults (no imagery needed)."""
    key = profile.lower()
    if key not in DIAMETER_PROFILES:
        raise ContractError(
            f"unknown profile {profile!r}; choose from {sorted(DIAMETER_PROFILES)}"
        )
    p = DIAMETER_PROFILES[key]
    return Region(center=center, shape=Shell(inner_diameter=p.d_min, outer_diameter=p.d_max))


# ------------------------------------------------------------------ file formats


def read_pgm(path) -> GrayImage:
    """Read a binary portable graymap (magic P5, maxval <= 255)."""
    with open(path, "rb") as f:
        data = f.read()
    if not data.startswith(b"P5"):
        raise ContractError(f"{path}: not a binary PGM (P5) file")
    # header tokens: magic, width, height, maxval; '#' comments allowed
    tokens: list[bytes] = []
    i = 2
    while len(tokens) < 3:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < len(data) and not data[i : i + 1].isspace():
            i += 1
        tokens.append(data[start:i])
    i += 1  # single whitespace after maxval
    width, height, maxval = (int(t) for t in tokens)
    if maxval > 255:
        raise ContractError(f"{path}: maxval {maxval} unsupported (need <= 255)")
    raw = data[i : i + width * height]
    if len(raw) != width * height:
        raise ContractError(f"{path}: truncated pixel data")
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width).astype(float)
    return GrayImage(width=width, height=height, pixels=arr)


def write_pgm(path, image: GrayImage) -> None:
    arr = np.clip(np.rint(image.pixels), 0, 255).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (image.width, image.height))
        f.write(arr.tobytes())


def read_mask_pgm(path) -> ObjectMask:
    """Mask in PGM form: any nonzero pixel belongs to the object."""
    img = read_pgm(path)
    return ObjectMask(width=img.width, height=img.height, bits=img.pixels > 0)


SCORE_CSV_HEADER = ["azimuth_rad", "elevation_rad", "distance_m", "score"]


def read_score_csv(path) -> list[ViewSample]:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != SCORE_CSV_HEADER:
            raise ContractError(
                f"{path}: expected header {','.join(SCORE_CSV_HEADER)}, got {header}"
            )
        return [
            ViewSample(
                azimuth=float(r[0]), elevation=float(r[1]), distance=float(r[2]), score=float(r[3])
            )
            for r in reader
        ]


def write_score_csv(path, samples: list[ViewSample]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SCORE_CSV_HEADER)
        for s in samples:
            writer.writerow([repr(s.azimuth), repr(s.elevation), repr(s.distance), repr(s.score)])
