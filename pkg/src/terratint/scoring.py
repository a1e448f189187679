"""Scheme-level scores for hypsometric tint candidates.

Subjective side: continuity of lightness and chromaticity along elevation,
monotonicity of successive color differences (aerial perspective), and
proximity to conventional zone colors. Aesthetic side: alignment of the
scheme's colors to the reference image's dominant colors, weighted by
proportions, times palette harmony. All scores live in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .colors import HarmonyScorer, LabColor, chroma_ratio, delta_e, harmony_score
from .grid import DominantProfile, ramp_colors_array

DEFAULT_GAMMA = 10.0
DEFAULT_ALPHA = 10.0
DEFAULT_RAMP_SAMPLES = 64
DEFAULT_DELTA_MIN = 10.0

# Fits whose residual is this close to exact count as exact; keeps analytically
# polynomial schemes at R^2 == 1.0 despite least-squares rounding.
_R2_SNAP = 1e-12


class SchemeMode(str, Enum):
    GRADED = "graded"
    CONTINUOUS = "continuous"


@dataclass(frozen=True)
class TintScheme:
    """Ordered elevation colors, index 0 = lowest zone."""

    colors: list[LabColor]
    mode: SchemeMode = SchemeMode.GRADED

    def __post_init__(self) -> None:
        if len(self.colors) < 2:
            raise ValueError("a tint scheme needs at least 2 colors")

    @property
    def n(self) -> int:
        return len(self.colors)


@dataclass(frozen=True)
class ConventionSpec:
    """Conventional colors for a subset of elevation zones (1-based indices)."""

    assignments: dict[int, LabColor] = field(default_factory=dict)

    def validate(self, n: int) -> None:
        for zone in self.assignments:
            if not 1 <= zone <= n:
                raise ValueError(f"convention zone {zone} outside [1, {n}]")


@dataclass(frozen=True)
class ScoringParams:
    k: int = 3
    t: int = 1
    gamma: float = DEFAULT_GAMMA
    alpha: float = DEFAULT_ALPHA
    aerial_enabled: bool = True
    ramp_samples: int = DEFAULT_RAMP_SAMPLES

    def __post_init__(self) -> None:
        if self.k not in (1, 2, 3):
            raise ValueError("k must be 1, 2 or 3")
        if self.t not in (1, -1):
            raise ValueError("t must be +1 or -1")
        if self.gamma <= 0 or self.alpha <= 0:
            raise ValueError("gamma and alpha must be positive")
        if self.ramp_samples < 2:
            raise ValueError("ramp_samples must be at least 2")


@dataclass(frozen=True)
class ZoneAreas:
    """Proportion of terrain area per map color slot; sums to 1."""

    proportions: list[float]

    def __post_init__(self) -> None:
        if any(p < 0 for p in self.proportions):
            raise ValueError("area proportions must be non-negative")
        total = sum(self.proportions)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"area proportions sum to {total}, expected 1")


@lru_cache(maxsize=64)
def _hat_matrix(n: int, deg: int) -> np.ndarray:
    """Projection onto degree-deg polynomials over x = 1..n."""
    vander = np.vander(np.arange(1, n + 1, dtype=np.float64), deg + 1)
    return vander @ np.linalg.pinv(vander)


def _r_squared(y: np.ndarray, k: int) -> float:
    """R^2 of the least-squares degree-k polynomial fit over x = 1..n."""
    n = y.size
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0
    resid = y - _hat_matrix(n, min(k, n - 1)) @ y
    r2 = 1.0 - float(resid @ resid) / ss_tot
    if r2 > 1.0 - _R2_SNAP:
        return 1.0
    return max(0.0, r2)


def _lightness_trend(L: np.ndarray) -> float:
    """Slope of the degree-1 least-squares fit of the L sequence."""
    x = np.arange(1, L.size + 1, dtype=np.float64)
    xc = x - x.mean()
    return float(np.dot(xc, L - L.mean()) / np.dot(xc, xc))


def continuity_score(scheme: TintScheme, params: ScoringParams) -> float:
    """Goodness of polynomial fit of lightness and chromaticity, gated by the
    lightness direction: t=+1 demands lighter with elevation, t=-1 darker."""
    L = np.array([c.L for c in scheme.colors])
    ch = np.array([chroma_ratio(c) for c in scheme.colors])
    gate = 1.0 if _lightness_trend(L) * params.t > 0 else 0.0
    if gate == 0.0:
        return 0.0
    return _r_squared(L, params.k) * _r_squared(ch, params.k) * gate


def aerial_score(scheme: TintScheme, params: ScoringParams) -> float:
    """Share of increase in successive color differences toward high zones."""
    if not params.aerial_enabled or scheme.n < 3:
        return 1.0
    diffs = np.array(
        [delta_e(scheme.colors[i + 1], scheme.colors[i]) for i in range(scheme.n - 1)]
    )
    dd = np.diff(diffs)
    denom = float(np.sum(np.abs(dd)))
    if denom == 0.0:
        return 1.0
    return float(np.sum(np.maximum(0.0, dd)) / denom)


def convention_score(
    scheme: TintScheme, conventions: ConventionSpec, params: ScoringParams
) -> float:
    """Average proximity of convention-assigned zones to their standard color.

    Zones without an assigned convention neither score nor dilute; an empty
    assignment leaves the scheme unconstrained at 1.
    """
    conventions.validate(scheme.n)
    if not conventions.assignments:
        return 1.0
    scores = []
    for zone, target in conventions.assignments.items():
        d = delta_e(scheme.colors[zone - 1], target)
        scores.append(1.0 if d == 0.0 else min(1.0, params.gamma / d))
    return float(np.mean(scores))


def subjective_score(
    scheme: TintScheme, conventions: ConventionSpec, params: ScoringParams
) -> float:
    """Product of continuity, aerial perspective and convention scores."""
    return (
        continuity_score(scheme, params)
        * aerial_score(scheme, params)
        * convention_score(scheme, conventions, params)
    )


def _map_colors_and_proportions(
    scheme: TintScheme, areas: ZoneAreas, params: ScoringParams
) -> tuple[np.ndarray, np.ndarray]:
    """Materialize the map colors with their area mass for similarity.

    Graded: the n zone colors with per-zone areas. Continuous: ramp_samples
    piecewise-linear samples, each carrying the area mass of the elevation
    sliver it colors (see terrain.ramp_mass).
    """
    props = np.array(areas.proportions)
    if scheme.mode is SchemeMode.GRADED:
        if props.size != scheme.n:
            raise ValueError(f"expected {scheme.n} zone areas, got {props.size}")
        return np.array([c.as_tuple() for c in scheme.colors]), props
    S = params.ramp_samples
    if props.size != S:
        raise ValueError(f"expected {S} ramp masses, got {props.size}")
    ts = np.arange(S) / (S - 1)
    return ramp_colors_array(scheme.colors, ts), props


def similarity_score(
    scheme: TintScheme, profile: DominantProfile, areas: ZoneAreas, params: ScoringParams
) -> float:
    """Alignment of the scheme's colors to the image's dominant colors.

    Each map color is anchored to its nearest dominant; its area mass is
    discounted by min(1, alpha / delta E) and accumulated there. The score
    compares accumulated and image proportions per dominant by their ratio.
    """
    if profile.size == 0:
        raise ValueError("dominant profile must not be empty")
    map_colors, map_props = _map_colors_and_proportions(scheme, areas, params)
    dom_colors = np.array([c.as_tuple() for c, _ in profile.entries])
    dom_props = np.array([p for _, p in profile.entries])

    d = np.sqrt(np.sum((map_colors[:, None, :] - dom_colors[None, :, :]) ** 2, axis=2))
    anchor = np.argmin(d, axis=1)  # ties resolve to the lower dominant index
    anchor_d = d[np.arange(d.shape[0]), anchor]
    weight = np.ones_like(anchor_d)  # exact hits carry full mass
    pos = anchor_d > 0.0
    weight[pos] = np.minimum(1.0, params.alpha / anchor_d[pos])

    p_map = np.zeros(dom_props.size)
    np.add.at(p_map, anchor, map_props * weight)

    lo = np.minimum(p_map, dom_props)
    hi = np.maximum(p_map, dom_props)
    ratio = np.ones_like(hi)  # hi == 0 implies lo == 0: the 0/0 -> 1 convention
    nonzero = hi > 0.0
    ratio[nonzero] = lo[nonzero] / hi[nonzero]
    return float(np.sum(dom_props * ratio))


def aesthetic_score(
    scheme: TintScheme,
    profile: DominantProfile,
    areas: ZoneAreas,
    params: ScoringParams,
    scorer: HarmonyScorer | None = None,
) -> float:
    """Similarity to the reference's dominant colors times palette harmony."""
    return similarity_score(scheme, profile, areas, params) * harmony_score(
        scheme.colors, scorer
    )


def discrimination_check(scheme: TintScheme, delta_min: float = DEFAULT_DELTA_MIN) -> bool:
    """True iff every color pair is at least delta_min apart (inclusive)."""
    for i in range(scheme.n):
        for j in range(i + 1, scheme.n):
            if delta_e(scheme.colors[i], scheme.colors[j]) < delta_min:
                return False
    return True


def score_report(
    scheme: TintScheme,
    profile: DominantProfile,
    areas: ZoneAreas,
    conventions: ConventionSpec,
    params: ScoringParams,
    scorer: HarmonyScorer | None = None,
) -> dict:
    """All component and composite scores as the documented JSON object."""
    f_g = continuity_score(scheme, params)
    f_ap = aerial_score(scheme, params)
    f_c = convention_score(scheme, conventions, params)
    f_d = similarity_score(scheme, profile, areas, params)
    harmony = harmony_score(scheme.colors, scorer)
    return {
        "f_g": f_g,
        "f_ap": f_ap,
        "f_c": f_c,
        "F_s": f_g * f_ap * f_c,
        "f_d": f_d,
        "harmony": harmony,
        "F_a": f_d * harmony,
    }
