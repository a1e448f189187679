"""Reference-image analysis: loading, saliency, and palette quantization.

The saliency estimator is pluggable; the default scores each pixel by its
Lab contrast to the mean border color (a background prior), normalized to
[0, 1]. Quantization is a seeded k-means in Lab over the distinct input
colors weighted by their pixel counts, with centroids snapped back to
actual input colors.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from PIL import Image, UnidentifiedImageError

from .colors import LabColor, srgb_array_to_lab

DEFAULT_PIXEL_CAP = 512 * 512
DEFAULT_SALIENCY_THRESHOLD = 0.5
DEFAULT_PALETTE_SIZE = 64

KMEANS_MAX_ITER = 100
KMEANS_MOVE_TOL = 0.1  # delta E of centroid movement considered converged


class UnsupportedFormatError(ValueError):
    """File is not a PNG or JPEG."""


class ImageDecodeError(ValueError):
    """File claims a supported format but cannot be decoded."""


@dataclass(frozen=True)
class ImageRaster:
    """Decoded RGB image; pixels is an (h, w, 3) uint8 array."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("image must contain at least one pixel")
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError("pixel array does not match declared dimensions")


@dataclass(frozen=True)
class SaliencyMap:
    """Per-pixel saliency in [0, 1], same shape as the source image."""

    width: int
    height: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (self.height, self.width):
            raise ValueError("saliency array does not match declared dimensions")
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise ValueError("saliency values must lie in [0, 1]")


@dataclass(frozen=True)
class QuantizedPalette:
    """Distinct Lab colors with image proportions summing to 1."""

    entries: list[tuple[LabColor, float]]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("palette must not be empty")
        total = sum(p for _, p in self.entries)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"palette proportions sum to {total}, expected 1")

    @property
    def size(self) -> int:
        return len(self.entries)

    def colors_array(self) -> np.ndarray:
        return np.array([c.as_tuple() for c, _ in self.entries])

    def proportions_array(self) -> np.ndarray:
        return np.array([p for _, p in self.entries])


def load_image(path: str | Path, pixel_cap: int = DEFAULT_PIXEL_CAP) -> ImageRaster:
    """Decode a PNG or JPEG; images above pixel_cap are area-average downsampled."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(path)
    try:
        img = Image.open(path)
        fmt = img.format
    except UnidentifiedImageError as exc:
        raise ImageDecodeError(f"cannot decode {path}: {exc}") from exc
    if fmt not in ("PNG", "JPEG"):
        raise UnsupportedFormatError(f"{path}: format {fmt!r} is not PNG or JPEG")
    try:
        img = img.convert("RGB")
        img.load()
    except (OSError, SyntaxError) as exc:
        raise ImageDecodeError(f"cannot decode {path}: {exc}") from exc
    if img.width * img.height > pixel_cap:
        scale = (pixel_cap / (img.width * img.height)) ** 0.5
        new_w = max(1, int(img.width * scale))
        new_h = max(1, int(img.height * scale))
        img = img.resize((new_w, new_h), Image.BOX)
    pixels = np.asarray(img, dtype=np.uint8)
    return ImageRaster(width=img.width, height=img.height, pixels=pixels)


def border_contrast_saliency(img: ImageRaster) -> SaliencyMap:
    """Default estimator: Lab distance to the mean border color, max-normalized."""
    lab = srgb_array_to_lab(img.pixels)
    margin = max(1, min(img.width, img.height) // 16)
    border_mask = np.zeros((img.height, img.width), dtype=bool)
    border_mask[:margin, :] = True
    border_mask[-margin:, :] = True
    border_mask[:, :margin] = True
    border_mask[:, -margin:] = True
    border_mean = lab[border_mask].mean(axis=0)
    dist = np.sqrt(np.sum((lab - border_mean) ** 2, axis=-1))
    peak = dist.max()
    values = dist / peak if peak > 0 else np.zeros_like(dist)
    return SaliencyMap(width=img.width, height=img.height, values=values)


def compute_saliency(
    img: ImageRaster, estimator: Callable[[ImageRaster], SaliencyMap] | None = None
) -> SaliencyMap:
    """Estimate per-pixel saliency with the given (or default) estimator."""
    return (estimator or border_contrast_saliency)(img)


def extract_salient_colors(
    img: ImageRaster, sal: SaliencyMap, threshold: float = DEFAULT_SALIENCY_THRESHOLD
) -> list[LabColor]:
    """Lab colors of pixels at or above the saliency threshold.

    Falls back to all pixels when nothing passes the threshold, so that
    low-contrast references still yield a palette.
    """
    if (sal.width, sal.height) != (img.width, img.height):
        raise ValueError("saliency map dimensions do not match image")
    if not 0.0 <= threshold < 1.0:
        raise ValueError("threshold must lie in [0, 1)")
    mask = sal.values >= threshold
    if not mask.any():
        mask = np.ones_like(mask)
    lab = srgb_array_to_lab(img.pixels[mask])
    return [LabColor(float(L), float(a), float(b)) for L, a, b in lab]


def _kmeans_pp_init(
    points: np.ndarray, weights: np.ndarray, k: int, rng: np.random.Generator
) -> np.ndarray:
    """Seeded k-means++ over weighted points."""
    n = points.shape[0]
    first = rng.choice(n, p=weights / weights.sum())
    centers = [points[first]]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        probs = weights * d2
        total = probs.sum()
        if total <= 0:
            idx = int(rng.choice(n))
        else:
            idx = int(rng.choice(n, p=probs / total))
        centers.append(points[idx])
        d2 = np.minimum(d2, np.sum((points - centers[-1]) ** 2, axis=1))
    return np.array(centers)


def quantize_colors(colors: list[LabColor], M: int, seed: int = 0) -> QuantizedPalette:
    """Cluster Lab colors into at most M distinct palette entries with proportions.

    Clustering runs over the sorted distinct colors weighted by multiplicity,
    which makes the result independent of input order. Each centroid is
    snapped to the nearest actual input color; entries snapping to the same
    color are merged.
    """
    if not colors:
        raise ValueError("cannot quantize an empty color list")
    if M < 1:
        raise ValueError("M must be at least 1")
    arr = np.array([c.as_tuple() for c in colors])
    points, counts = np.unique(arr, axis=0, return_counts=True)
    weights = counts.astype(np.float64)
    total = weights.sum()
    k = min(M, points.shape[0])

    if k == points.shape[0]:
        labels = np.arange(points.shape[0])
    else:
        rng = np.random.default_rng(seed)
        centers = _kmeans_pp_init(points, weights, k, rng)
        for _ in range(KMEANS_MAX_ITER):
            d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
            labels = np.argmin(d2, axis=1)
            new_centers = centers.copy()
            for j in range(k):
                members = labels == j
                if members.any():
                    w = weights[members]
                    new_centers[j] = (points[members] * w[:, None]).sum(axis=0) / w.sum()
            movement = np.sqrt(np.sum((new_centers - centers) ** 2, axis=1)).max()
            centers = new_centers
            if movement < KMEANS_MOVE_TOL:
                break
        d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        labels = np.argmin(d2, axis=1)

    merged: dict[tuple[float, float, float], float] = {}
    for j in np.unique(labels):
        members = labels == j
        w = weights[members]
        centroid = (points[members] * w[:, None]).sum(axis=0) / w.sum()
        snap_idx = int(np.argmin(np.sum((points - centroid) ** 2, axis=1)))
        snap = tuple(points[snap_idx])
        merged[snap] = merged.get(snap, 0.0) + w.sum() / total
    entries = [(LabColor(*c), p) for c, p in sorted(merged.items())]
    return QuantizedPalette(entries=entries)
