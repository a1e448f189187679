"""Device-independent color math: sRGB <-> CIELab, color difference, harmony.

All conversions assume sRGB encoding with the D65 white point (2 degree
observer), which is what web-sourced reference images carry.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

# CIE constants for the Lab companding function.
_LAB_EPS = (6.0 / 29.0) ** 3
_LAB_KAPPA_INV = 1.0 / (3.0 * (6.0 / 29.0) ** 2)

# sRGB (IEC 61966-2-1) linear RGB -> XYZ, D65.
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.array(
    [
        [3.2404542, -1.5371385, -0.4985314],
        [-0.9692660, 1.8760108, 0.0415560],
        [0.0556434, -0.2040259, 1.0572252],
    ]
)
_WHITE_D65 = np.array([0.95047, 1.0, 1.08883])

# Colors with Lab chroma below this are treated as achromatic (no usable hue).
ACHROMATIC_CHROMA = 5.0


@dataclass(frozen=True)
class RgbColor:
    """8-bit sRGB color."""

    r: int
    g: int
    b: int

    def __post_init__(self) -> None:
        for name in ("r", "g", "b"):
            v = getattr(self, name)
            if not 0 <= v <= 255:
                raise ValueError(f"channel {name}={v} outside [0, 255]")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r, self.g, self.b)


@dataclass(frozen=True)
class LabColor:
    """CIELab color; L in [0, 100], a/b opponent axes."""

    L: float
    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.L) and math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("LabColor components must be finite")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.L, self.a, self.b)


# ---------------------------------------------------------------------------
# Array conversions (vectorized); the scalar API below wraps these.
# ---------------------------------------------------------------------------


def srgb_array_to_lab(rgb: np.ndarray) -> np.ndarray:
    """Convert an (..., 3) uint8/float array of sRGB values to Lab."""
    c = np.asarray(rgb, dtype=np.float64) / 255.0
    linear = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    xyz = linear @ _RGB_TO_XYZ.T
    t = xyz / _WHITE_D65
    f = np.where(t > _LAB_EPS, np.cbrt(t), t * _LAB_KAPPA_INV + 4.0 / 29.0)
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def lab_array_to_srgb(lab: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Convert an (..., 3) Lab array to 8-bit sRGB.

    Returns (rgb_uint8, out_of_gamut_mask); out-of-gamut values are clamped
    per channel after conversion.
    """
    lab = np.asarray(lab, dtype=np.float64)
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = fy + lab[..., 1] / 500.0
    fz = fy - lab[..., 2] / 200.0
    f = np.stack([fx, fy, fz], axis=-1)
    t = np.where(f > 6.0 / 29.0, f**3, (f - 4.0 / 29.0) / _LAB_KAPPA_INV)
    xyz = t * _WHITE_D65
    linear = xyz @ _XYZ_TO_RGB.T
    c = np.where(
        linear <= 0.0031308, 12.92 * linear, 1.055 * np.maximum(linear, 0.0) ** (1.0 / 2.4) - 0.055
    )
    scaled = c * 255.0
    out_of_gamut = np.any((scaled < -0.5) | (scaled > 255.5), axis=-1)
    rgb = np.clip(np.rint(scaled), 0, 255).astype(np.uint8)
    return rgb, out_of_gamut


# ---------------------------------------------------------------------------
# Scalar operations
# ---------------------------------------------------------------------------


def srgb_to_lab(c: RgbColor) -> LabColor:
    """Convert one sRGB color to CIELab (D65)."""
    lab = srgb_array_to_lab(np.array([[c.r, c.g, c.b]], dtype=np.float64))[0]
    return LabColor(float(lab[0]), float(lab[1]), float(lab[2]))


def lab_to_srgb(c: LabColor) -> RgbColor:
    """Convert CIELab to sRGB, clamping out-of-gamut channels."""
    rgb, _ = lab_array_to_srgb(np.array([[c.L, c.a, c.b]]))
    return RgbColor(int(rgb[0, 0]), int(rgb[0, 1]), int(rgb[0, 2]))


def lab_to_srgb_flagged(c: LabColor) -> tuple[RgbColor, bool]:
    """Like lab_to_srgb but also reports whether clamping occurred."""
    rgb, oog = lab_array_to_srgb(np.array([[c.L, c.a, c.b]]))
    return RgbColor(int(rgb[0, 0]), int(rgb[0, 1]), int(rgb[0, 2])), bool(oog[0])


def delta_e(c1: LabColor, c2: LabColor) -> float:
    """Euclidean distance in CIELab (the CIE76 delta E)."""
    return math.sqrt((c1.L - c2.L) ** 2 + (c1.a - c2.a) ** 2 + (c1.b - c2.b) ** 2)


def chroma_ratio(c: LabColor) -> float:
    """Chromaticity sqrt(a^2+b^2) / sqrt(L^2+a^2+b^2); the zero color maps to 0."""
    chroma_sq = c.a * c.a + c.b * c.b
    total_sq = c.L * c.L + chroma_sq
    if total_sq == 0.0:
        return 0.0
    return math.sqrt(chroma_sq / total_sq)


def hue_angle(c: LabColor) -> float:
    """Lab hue angle atan2(b, a) in degrees, in [0, 360)."""
    return math.degrees(math.atan2(c.b, c.a)) % 360.0


# ---------------------------------------------------------------------------
# Harmony scoring
# ---------------------------------------------------------------------------


class HarmonyScorer(ABC):
    """Scores how harmonious a palette is, in [0, 1]."""

    @abstractmethod
    def score(self, colors: list[LabColor]) -> float:
        raise NotImplementedError


# Hue-wheel templates as (center, width) sectors in degrees, after the eight
# classic wheel templates (the achromatic one is implicit: gray colors are
# exempt from hue penalties altogether).
_TEMPLATES: dict[str, tuple[tuple[float, float], ...]] = {
    "i": ((0.0, 18.0),),
    "V": ((0.0, 93.6),),
    "L": ((0.0, 18.0), (90.0, 79.2)),
    "I": ((0.0, 18.0), (180.0, 18.0)),
    "T": ((0.0, 180.0),),
    "Y": ((0.0, 93.6), (180.0, 18.0)),
    "X": ((0.0, 93.6), (180.0, 93.6)),
}


class TemplateHarmonyScorer(HarmonyScorer):
    """Default scorer: best fit over rotated hue-wheel sector templates.

    The minimal total deviation over rotations is exact: the deviation is
    piecewise linear in the rotation, so it suffices to test the rotations
    that align some hue with some sector edge or center.
    """

    def score(self, colors: list[LabColor]) -> float:
        if len(colors) < 2:
            raise ValueError("harmony needs at least 2 colors")
        hues = np.array(
            [hue_angle(c) for c in colors if math.hypot(c.a, c.b) >= ACHROMATIC_CHROMA]
        )
        if hues.size == 0:
            return 1.0
        best = math.inf
        for sectors in _TEMPLATES.values():
            edges: list[float] = []
            for center, width in sectors:
                edges.extend((center - width / 2.0, center + width / 2.0, center))
            rots = np.unique((hues[:, None] - np.array(edges)[None, :]).ravel() % 360.0)
            per_hue = np.full((hues.size, rots.size), 360.0)
            for center, width in sectors:
                d = np.abs(hues[:, None] - ((center + rots) % 360.0)[None, :]) % 360.0
                d = np.minimum(d, 360.0 - d)
                per_hue = np.minimum(per_hue, np.maximum(0.0, d - width / 2.0))
            best = min(best, float(per_hue.sum(axis=0).min()))
        max_dev = 180.0 * hues.size
        return max(0.0, min(1.0, 1.0 - best / max_dev))


_SCORER_REGISTRY: dict[str, type[HarmonyScorer]] = {"template": TemplateHarmonyScorer}


def register_harmony_scorer(name: str, scorer: type[HarmonyScorer]) -> None:
    _SCORER_REGISTRY[name] = scorer


def get_harmony_scorer(name: str = "template") -> HarmonyScorer:
    try:
        return _SCORER_REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown harmony scorer {name!r}") from None


def harmony_score(colors: list[LabColor], scorer: HarmonyScorer | None = None) -> float:
    """Score palette harmony in [0, 1] with the configured scorer."""
    if len(colors) < 2:
        raise ValueError("harmony needs at least 2 colors")
    return (scorer or TemplateHarmonyScorer()).score(colors)
