"""DEM ingestion, elevation zoning, hillshade, and tint rendering.

DEMs come from ESRI ASCII grids or 16-bit grayscale PNG heightmaps with a
JSON sidecar. Hillshade is Lambertian from central-difference normals,
averaged over multiple light azimuths; an optional aerial-perspective pass
collapses low-elevation contrast toward a bright haze. Rendering paints
graded zone colors or a continuous Lab ramp and composites shade by
modulating Lab lightness only.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .colors import LabColor, lab_array_to_srgb
from .grid import ramp_colors_array
from .scoring import SchemeMode, TintScheme, ZoneAreas

logger = logging.getLogger(__name__)

DEFAULT_AZIMUTHS = (225.0, 270.0, 315.0, 360.0)
DEFAULT_ALTITUDE = 45.0
DEFAULT_HAZE = 0.8
DEFAULT_AERIAL_STRENGTH = 0.6
DEFAULT_BACKGROUND = (255, 255, 255)

# Shade composite: L_out = L_tint * (SHADE_FLOOR + SHADE_SPAN * shade); the
# floor keeps shadowed tints readable instead of crushing them to black.
SHADE_FLOOR = 0.3
SHADE_SPAN = 0.7


class DemFormatError(ValueError):
    """Malformed DEM header or metadata."""


class DemDimensionError(ValueError):
    """Declared dimensions disagree with the data."""


class DemEmptyError(ValueError):
    """No valid (non-nodata) cells."""


@dataclass
class Dem:
    """Raster of ground elevations in meters."""

    rows: int
    cols: int
    cellsize: float
    nodata: float
    elevations: np.ndarray  # (rows, cols) float64; nodata cells hold the marker

    def __post_init__(self) -> None:
        if self.elevations.shape != (self.rows, self.cols):
            raise DemDimensionError(
                f"elevation array {self.elevations.shape} != ({self.rows}, {self.cols})"
            )
        if not self.valid_mask().any():
            raise DemEmptyError("DEM has no valid cells")

    def valid_mask(self) -> np.ndarray:
        if math.isnan(self.nodata):
            return ~np.isnan(self.elevations)
        return self.elevations != self.nodata

    def valid_values(self) -> np.ndarray:
        return self.elevations[self.valid_mask()]

    def normalized(self) -> np.ndarray:
        """Per-cell elevation scaled to [0, 1] over valid cells.

        A constant DEM normalizes to 1 everywhere (treated as the top).
        """
        mask = self.valid_mask()
        vals = self.elevations[mask]
        lo, hi = float(vals.min()), float(vals.max())
        out = np.ones_like(self.elevations, dtype=np.float64)
        if hi > lo:
            out = (self.elevations - lo) / (hi - lo)
        out[~mask] = 0.0
        return np.clip(out, 0.0, 1.0)


@dataclass
class ZoneMap:
    """Per-cell elevation zone indices with the zone boundaries."""

    n: int
    boundaries: list[float]
    zones: np.ndarray  # (rows, cols) int; -1 marks nodata

    def __post_init__(self) -> None:
        if len(self.boundaries) != self.n + 1:
            raise ValueError("need n+1 boundaries")
        if any(b2 <= b1 for b1, b2 in zip(self.boundaries, self.boundaries[1:])):
            raise ValueError("boundaries must be strictly ascending")


@dataclass
class Hillshade:
    values: np.ndarray  # (rows, cols) in [0, 1]

    def __post_init__(self) -> None:
        if self.values.size and (self.values.min() < 0.0 or self.values.max() > 1.0):
            raise ValueError("shade values must lie in [0, 1]")


@dataclass
class RenderedMap:
    pixels: np.ndarray  # (rows, cols, 3) uint8
    valid: np.ndarray  # (rows, cols) bool; False cells are background

    @property
    def has_nodata(self) -> bool:
        return bool((~self.valid).any())


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

_ASC_HEADER_KEYS = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"}


def _load_asc(path: Path) -> Dem:
    tokens = path.read_text().split()
    header: dict[str, float] = {}
    pos = 0
    while pos + 1 < len(tokens) and tokens[pos].lower() in _ASC_HEADER_KEYS:
        try:
            header[tokens[pos].lower()] = float(tokens[pos + 1])
        except ValueError as exc:
            raise DemFormatError(f"{path}: bad header value for {tokens[pos]}") from exc
        pos += 2
    for required in ("ncols", "nrows", "cellsize"):
        if required not in header:
            raise DemFormatError(f"{path}: missing header key {required}")
    rows, cols = int(header["nrows"]), int(header["ncols"])
    nodata = header.get("nodata_value", -9999.0)
    data = tokens[pos:]
    if len(data) != rows * cols:
        raise DemDimensionError(
            f"{path}: expected {rows * cols} values, found {len(data)}"
        )
    try:
        elevations = np.array(data, dtype=np.float64).reshape(rows, cols)
    except ValueError as exc:
        raise DemFormatError(f"{path}: non-numeric elevation data") from exc
    return Dem(rows=rows, cols=cols, cellsize=header["cellsize"], nodata=nodata, elevations=elevations)


def _load_png16(path: Path) -> Dem:
    sidecar_path = path.with_suffix(".json")
    if not sidecar_path.is_file():
        raise DemFormatError(f"{path}: missing sidecar {sidecar_path.name}")
    try:
        meta = json.loads(sidecar_path.read_text())
    except json.JSONDecodeError as exc:
        raise DemFormatError(f"{sidecar_path}: invalid JSON") from exc
    for required in ("min_elev", "max_elev", "cellsize"):
        if required not in meta:
            raise DemFormatError(f"{sidecar_path}: missing key {required}")
    img = Image.open(path)
    if img.mode not in ("I;16", "I"):
        raise DemFormatError(f"{path}: expected 16-bit grayscale PNG, got mode {img.mode!r}")
    gray = np.asarray(img, dtype=np.float64)
    lo, hi = float(meta["min_elev"]), float(meta["max_elev"])
    elevations = lo + (gray / 65535.0) * (hi - lo)
    nodata_gray = meta.get("nodata")
    if nodata_gray is not None:
        nodata = -1e38
        elevations[gray == float(nodata_gray)] = nodata
    else:
        nodata = -1e38
    return Dem(
        rows=gray.shape[0],
        cols=gray.shape[1],
        cellsize=float(meta["cellsize"]),
        nodata=nodata,
        elevations=elevations,
    )


def load_dem(path: str | Path) -> Dem:
    """Load an ESRI ASCII grid (.asc) or 16-bit PNG heightmap with sidecar."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(path)
    if path.suffix.lower() == ".asc":
        return _load_asc(path)
    if path.suffix.lower() == ".png":
        return _load_png16(path)
    raise DemFormatError(f"{path}: unsupported DEM format {path.suffix!r}")


# ---------------------------------------------------------------------------
# Zoning
# ---------------------------------------------------------------------------


def classify_zones(dem: Dem, n: int, method: str = "equal_interval") -> ZoneMap:
    """Split the elevation range into n zones (equal spans or equal mass).

    A constant DEM cannot support multiple zones and degrades to a single
    zone covering every valid cell.
    """
    if n < 2:
        raise ValueError("need at least 2 zones")
    if method not in ("equal_interval", "quantile"):
        raise ValueError(f"unknown zoning method {method!r}")
    vals = dem.valid_values()
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo:
        if method == "quantile":
            logger.warning("constant DEM: quantile zoning degraded to a single zone")
        boundaries = [lo, lo + 1.0]
    elif method == "equal_interval":
        boundaries = list(np.linspace(lo, hi, n + 1))
    else:
        qs = np.quantile(vals, np.linspace(0.0, 1.0, n + 1))
        boundaries = sorted(set(float(q) for q in qs))
        if len(boundaries) < 2:
            boundaries = [lo, lo + 1.0]
    n_eff = len(boundaries) - 1
    inner = np.array(boundaries[1:-1])
    zones = np.searchsorted(inner, dem.elevations, side="right").astype(int)
    zones[~dem.valid_mask()] = -1
    return ZoneMap(n=n_eff, boundaries=boundaries, zones=zones)


def zone_areas(zm: ZoneMap) -> ZoneAreas:
    """Valid-cell share per zone."""
    valid = zm.zones >= 0
    total = int(valid.sum())
    counts = np.bincount(zm.zones[valid], minlength=zm.n)
    return ZoneAreas(proportions=[float(c) / total for c in counts])


def zone_report(zm: ZoneMap) -> dict:
    return {
        "n": zm.n,
        "boundaries": [float(b) for b in zm.boundaries],
        "areas": zone_areas(zm).proportions,
    }


# ---------------------------------------------------------------------------
# Shading
# ---------------------------------------------------------------------------


def hillshade(
    dem: Dem,
    azimuths: tuple[float, ...] = DEFAULT_AZIMUTHS,
    altitude: float = DEFAULT_ALTITUDE,
) -> Hillshade:
    """Lambertian shade averaged over light azimuths (degrees from north,
    the direction the light comes from); altitude in (0, 90]."""
    if not azimuths:
        raise ValueError("need at least one azimuth")
    if not 0.0 < altitude <= 90.0:
        raise ValueError("altitude must lie in (0, 90]")
    elev = dem.elevations.astype(np.float64).copy()
    mask = dem.valid_mask()
    if not mask.all():
        elev[~mask] = float(dem.valid_values().mean())
    # np.gradient: central differences inside, one-sided at the borders.
    dz_dy_south = (
        np.gradient(elev, dem.cellsize, axis=0) if dem.rows > 1 else np.zeros_like(elev)
    )
    dz_dx = np.gradient(elev, dem.cellsize, axis=1) if dem.cols > 1 else np.zeros_like(elev)
    dz_dy = -dz_dy_south  # rows run north -> south
    norm = np.sqrt(dz_dx**2 + dz_dy**2 + 1.0)
    alt = math.radians(altitude)
    shade = np.zeros_like(elev)
    for az_deg in azimuths:
        az = math.radians(az_deg)
        lx = math.cos(alt) * math.sin(az)
        ly = math.cos(alt) * math.cos(az)
        lz = math.sin(alt)
        cos_theta = (-dz_dx * lx - dz_dy * ly + lz) / norm
        shade += np.maximum(0.0, cos_theta)
    shade /= len(azimuths)
    return Hillshade(values=np.clip(shade, 0.0, 1.0))


def aerial_modulate(
    hs: Hillshade,
    dem: Dem,
    strength: float = DEFAULT_AERIAL_STRENGTH,
    haze: float = DEFAULT_HAZE,
) -> Hillshade:
    """Collapse shade contrast toward the haze value at low elevations.

    With e the normalized elevation, shade' = haze + (shade - haze) *
    ((1 - strength) + strength * e): the top of the terrain keeps its
    shade, the bottom fades toward haze as strength approaches 1.
    """
    if not 0.0 <= strength <= 1.0:
        raise ValueError("strength must lie in [0, 1]")
    if not 0.0 <= haze <= 1.0:
        raise ValueError("haze must lie in [0, 1]")
    e = dem.normalized()
    factor = (1.0 - strength) + strength * e
    values = haze + (hs.values - haze) * factor
    return Hillshade(values=np.clip(values, 0.0, 1.0))


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def render(
    dem: Dem,
    zm: ZoneMap | None,
    scheme: TintScheme,
    hs: Hillshade | None = None,
    background: tuple[int, int, int] = DEFAULT_BACKGROUND,
) -> RenderedMap:
    """Paint the scheme over the DEM, optionally modulated by hillshade.

    Graded mode paints each zone its color (zone count must match the
    scheme); continuous mode evaluates the Lab ramp at each cell's
    normalized elevation. Shade scales Lab lightness only.
    """
    mask = dem.valid_mask()
    if scheme.mode is SchemeMode.GRADED:
        if zm is None:
            raise ValueError("graded rendering requires a zone map")
        if zm.n != scheme.n:
            raise ValueError(f"scheme has {scheme.n} colors but zone map has {zm.n} zones")
        anchor_arr = np.array([c.as_tuple() for c in scheme.colors], dtype=np.float64)
        zones = np.clip(zm.zones, 0, zm.n - 1)
        lab = anchor_arr[zones]
    else:
        t = dem.normalized().ravel()
        lab = ramp_colors_array(scheme.colors, t).reshape(dem.rows, dem.cols, 3)

    if hs is not None:
        lab = lab.copy()
        lab[..., 0] *= SHADE_FLOOR + SHADE_SPAN * hs.values

    rgb, _ = lab_array_to_srgb(lab)
    rgb[~mask] = background
    return RenderedMap(pixels=rgb, valid=mask)


def sliver_masses(dem: Dem, S: int) -> ZoneAreas:
    """Share of valid cells per elevation sliver [k/S, (k+1)/S), k = 0..S-1."""
    if S < 2:
        raise ValueError("need at least 2 slivers")
    t = dem.normalized()[dem.valid_mask()]
    slots = np.minimum((t * S).astype(int), S - 1)
    counts = np.bincount(slots, minlength=S)
    return ZoneAreas(proportions=[float(c) / counts.sum() for c in counts])


def ramp_mass(dem: Dem, scheme: TintScheme, S: int) -> list[tuple[LabColor, float]]:
    """Continuous-mode map colors with the area mass each ramp sample covers.

    Sample k sits at normalized elevation k/(S-1); its mass is the share of
    valid cells whose normalized elevation falls in [k/S, (k+1)/S).
    """
    if scheme.mode is not SchemeMode.CONTINUOUS:
        raise ValueError("ramp_mass applies to continuous schemes")
    if S < scheme.n:
        raise ValueError("need at least as many samples as anchors")
    props = sliver_masses(dem, S).proportions
    ts = np.arange(S) / (S - 1)
    colors = ramp_colors_array(scheme.colors, ts)
    return [(LabColor(*map(float, colors[k])), props[k]) for k in range(S)]


def write_png(rm: RenderedMap, path: str | Path) -> None:
    """Write the render as 8-bit PNG; RGBA with transparent nodata if present."""
    if rm.has_nodata:
        alpha = np.where(rm.valid, 255, 0).astype(np.uint8)
        data = np.dstack([rm.pixels, alpha])
        img = Image.fromarray(data, mode="RGBA")
    else:
        img = Image.fromarray(rm.pixels, mode="RGB")
    img.save(Path(path), format="PNG")
