"""End-to-end orchestration: image analysis, grid build, search, rendering.

run_transfer composes the full chain and returns both the Pareto archive
and a manifest that pins every parameter, seed and input digest needed to
reproduce the run bit for bit.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .colors import LabColor, lab_array_to_srgb
from .grid import (
    ColorGrid,
    DominantProfile,
    identify_dominants,
    ramp_colors_array,
    segment_regions,
    train_som,
)
from .image_colors import (
    DEFAULT_PALETTE_SIZE,
    DEFAULT_PIXEL_CAP,
    DEFAULT_SALIENCY_THRESHOLD,
    compute_saliency,
    extract_salient_colors,
    load_image,
    quantize_colors,
)
from .optimize import Candidate, OptimizerConfig, ParetoArchive, optimize, select_midpoint
from .scoring import ConventionSpec, SchemeMode, ScoringParams, TintScheme, ZoneAreas
from .terrain import (
    DEFAULT_AERIAL_STRENGTH,
    DEFAULT_ALTITUDE,
    DEFAULT_AZIMUTHS,
    DEFAULT_HAZE,
    Dem,
    Hillshade,
    RenderedMap,
    ZoneMap,
    aerial_modulate,
    classify_zones,
    hillshade,
    load_dem,
    render,
    sliver_masses,
    zone_areas,
)

SCHEMA_VERSION = "terratint/v1"


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


def _run_stage(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(stage, exc) from exc


@dataclass(frozen=True)
class AnalysisConfig:
    """Image-side knobs; the analysis seed drives quantization and the SOM."""

    pixel_cap: int = DEFAULT_PIXEL_CAP
    saliency_threshold: float = DEFAULT_SALIENCY_THRESHOLD
    palette_size: int = DEFAULT_PALETTE_SIZE
    grid_size: int = 16
    epochs: int = 200
    jncd: float = 2.3
    max_dominants: int = 6
    seed: int = 0


@dataclass(frozen=True)
class RenderConfig:
    azimuths: tuple[float, ...] = DEFAULT_AZIMUTHS
    altitude: float = DEFAULT_ALTITUDE
    aerial_shade: bool = True
    aerial_strength: float = DEFAULT_AERIAL_STRENGTH
    haze: float = DEFAULT_HAZE
    zone_method: str = "equal_interval"


@dataclass
class TransferResult:
    archive: ParetoArchive
    midpoint: Candidate
    profile: DominantProfile
    grid: ColorGrid
    manifest: dict
    dem: Dem
    zone_map: ZoneMap | None
    areas: ZoneAreas
    shade: Hillshade


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def analyze_image(image_path: str | Path, analysis: AnalysisConfig = AnalysisConfig()) -> ColorGrid:
    """Image half of the pipeline: saliency, palette, SOM grid, regions."""
    img = _run_stage("load_image", load_image, image_path, analysis.pixel_cap)
    sal = _run_stage("compute_saliency", compute_saliency, img)
    salient = _run_stage(
        "extract_salient_colors", extract_salient_colors, img, sal, analysis.saliency_threshold
    )
    palette = _run_stage(
        "quantize_colors", quantize_colors, salient, analysis.palette_size, analysis.seed
    )
    grid = _run_stage(
        "train_som", train_som, palette, analysis.grid_size, analysis.epochs, analysis.seed
    )
    return _run_stage("segment_regions", segment_regions, grid, analysis.jncd, analysis.max_dominants)


def build_manifest(
    image_path: Path,
    dem_path: Path,
    params: ScoringParams,
    conventions: ConventionSpec,
    opt_config: OptimizerConfig,
    analysis: AnalysisConfig,
    render_cfg: RenderConfig,
    mode: SchemeMode,
    n: int,
) -> dict:
    # content digests only: job-local copies of the same inputs must yield
    # identical manifests, so paths stay out
    inputs: dict[str, Any] = {
        "image": {"sha256": _sha256(image_path)},
        "dem": {"sha256": _sha256(dem_path)},
    }
    sidecar = dem_path.with_suffix(".json")
    if dem_path.suffix.lower() == ".png" and sidecar.is_file():
        inputs["dem_sidecar"] = {"sha256": _sha256(sidecar)}
    return {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "inputs": inputs,
        "mode": mode.value,
        "zones": n,
        "scoring": {
            "k": params.k,
            "t": params.t,
            "gamma": params.gamma,
            "alpha": params.alpha,
            "aerial_enabled": params.aerial_enabled,
            "ramp_samples": params.ramp_samples,
        },
        "conventions": [
            {"zone": z, "L": c.L, "a": c.a, "b": c.b}
            for z, c in sorted(conventions.assignments.items())
        ],
        "optimizer": asdict(opt_config),
        "analysis": asdict(analysis),
        "render": {**asdict(render_cfg), "azimuths": list(render_cfg.azimuths)},
        "seeds": {"analysis": analysis.seed, "optimizer": opt_config.seed},
    }


def manifest_digest(manifest: dict) -> str:
    canonical = json.dumps(manifest, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def run_transfer(
    image_path: str | Path,
    dem_path: str | Path,
    params: ScoringParams = ScoringParams(),
    conventions: ConventionSpec = ConventionSpec(),
    opt_config: OptimizerConfig = OptimizerConfig(),
    mode: SchemeMode = SchemeMode.GRADED,
    n: int = 9,
    analysis: AnalysisConfig = AnalysisConfig(),
    render_cfg: RenderConfig = RenderConfig(),
) -> TransferResult:
    """Full image-to-terrain transfer; deterministic given the two seeds."""
    image_path, dem_path = Path(image_path), Path(dem_path)
    grid = analyze_image(image_path, analysis)
    profile = _run_stage("identify_dominants", identify_dominants, grid)

    dem = _run_stage("load_dem", load_dem, dem_path)
    if mode is SchemeMode.GRADED:
        zm = _run_stage("classify_zones", classify_zones, dem, n, render_cfg.zone_method)
        areas = _run_stage("zone_areas", zone_areas, zm)
        n_effective = zm.n
    else:
        zm = None
        areas = _run_stage("ramp_mass", sliver_masses, dem, params.ramp_samples)
        n_effective = n

    archive = _run_stage(
        "optimize",
        optimize,
        grid,
        n_effective,
        profile,
        areas,
        conventions,
        params,
        opt_config,
        None,
        mode,
    )
    midpoint = _run_stage("select_midpoint", select_midpoint, archive)
    shade = _run_stage("hillshade", hillshade, dem, render_cfg.azimuths, render_cfg.altitude)
    if render_cfg.aerial_shade and params.aerial_enabled:
        shade = _run_stage(
            "aerial_modulate", aerial_modulate, shade, dem, render_cfg.aerial_strength, render_cfg.haze
        )

    manifest = build_manifest(
        image_path, dem_path, params, conventions, opt_config, analysis, render_cfg, mode, n
    )
    return TransferResult(
        archive=archive,
        midpoint=midpoint,
        profile=profile,
        grid=grid,
        manifest=manifest,
        dem=dem,
        zone_map=zm,
        areas=areas,
        shade=shade,
    )


def render_candidate(result: TransferResult, candidate: Candidate) -> RenderedMap:
    """Render one archive member over the run's DEM and shade."""
    return render(result.dem, result.zone_map, candidate.scheme, result.shade)


def run_from_manifest(
    manifest: dict, image_path: str | Path, dem_path: str | Path
) -> TransferResult:
    """Re-execute a recorded run; inputs must match the recorded digests."""
    image_path, dem_path = Path(image_path), Path(dem_path)
    if _sha256(image_path) != manifest["inputs"]["image"]["sha256"]:
        raise ValueError("image digest does not match manifest")
    if _sha256(dem_path) != manifest["inputs"]["dem"]["sha256"]:
        raise ValueError("DEM digest does not match manifest")
    sc = manifest["scoring"]
    params = ScoringParams(
        k=sc["k"],
        t=sc["t"],
        gamma=sc["gamma"],
        alpha=sc["alpha"],
        aerial_enabled=sc["aerial_enabled"],
        ramp_samples=sc["ramp_samples"],
    )
    conventions = ConventionSpec(
        assignments={
            int(e["zone"]): LabColor(e["L"], e["a"], e["b"]) for e in manifest["conventions"]
        }
    )
    opt_config = OptimizerConfig(**manifest["optimizer"])
    analysis = AnalysisConfig(**manifest["analysis"])
    rc = dict(manifest["render"])
    rc["azimuths"] = tuple(rc["azimuths"])
    render_cfg = RenderConfig(**rc)
    return run_transfer(
        image_path,
        dem_path,
        params=params,
        conventions=conventions,
        opt_config=opt_config,
        mode=SchemeMode(manifest["mode"]),
        n=manifest["zones"],
        analysis=analysis,
        render_cfg=render_cfg,
    )


def tint_strip(scheme: TintScheme, width: int = 512, height: int = 48) -> np.ndarray:
    """Horizontal preview strip: stepped blocks (graded) or a smooth ramp."""
    if scheme.mode is SchemeMode.GRADED:
        idx = np.minimum((np.arange(width) * scheme.n) // width, scheme.n - 1)
        lab = np.array([c.as_tuple() for c in scheme.colors])[idx]
    else:
        lab = ramp_colors_array(scheme.colors, np.arange(width) / (width - 1))
    rgb, _ = lab_array_to_srgb(lab)
    return np.tile(rgb[None, :, :], (height, 1, 1))


def palette_strip(profile: DominantProfile, width: int = 512, height: int = 48) -> np.ndarray:
    """Dominant colors as blocks sized by their image proportions."""
    lab_rows = []
    for color, proportion in profile.entries:
        span = max(1, int(round(proportion * width)))
        lab_rows.extend([color.as_tuple()] * span)
    lab = np.array(lab_rows[:width] if len(lab_rows) >= width else lab_rows)
    rgb, _ = lab_array_to_srgb(lab)
    return np.tile(rgb[None, :, :], (height, 1, 1))
