"""Shared synthetic fixtures: reference images, DEMs, hand-built grids."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from terratint.colors import LabColor
from terratint.grid import ColorGrid
from terratint.image_colors import QuantizedPalette


def write_asc(
    path: Path, z: np.ndarray, cellsize: float = 10.0, nodata: float = -9999.0
) -> Path:
    rows, cols = z.shape
    header = (
        f"ncols {cols}\nnrows {rows}\nxllcorner 0.0\nyllcorner 0.0\n"
        f"cellsize {cellsize}\nNODATA_value {nodata}\n"
    )
    body = "\n".join(" ".join(repr(float(v)) for v in row) for row in z)
    path.write_text(header + body + "\n")
    return path


def landscape_image(seed: int = 42, w: int = 192, h: int = 128) -> np.ndarray:
    """Sky band, green land, brown hill blob, mild noise."""
    rng = np.random.default_rng(seed)
    img = np.zeros((h, w, 3), np.uint8)
    img[: h // 3] = (120, 170, 220)
    img[h // 3 :] = (70, 120, 60)
    yy, xx = np.mgrid[0:h, 0:w]
    img[((yy - 2 * h // 3) ** 2 + (xx - w // 2) ** 2) < (h // 3) ** 2] = (140, 100, 60)
    noisy = img.astype(int) + rng.integers(-12, 13, img.shape)
    return np.clip(noisy, 0, 255).astype(np.uint8)


def sunset_image(seed: int = 7, w: int = 160, h: int = 120) -> np.ndarray:
    """Warm gradient with a dark foreground: broader hue range."""
    rng = np.random.default_rng(seed)
    yy = np.linspace(0.0, 1.0, h)[:, None]
    r = 240 - 160 * yy
    g = 140 - 90 * yy
    b = 90 + 40 * yy
    img = np.stack([np.broadcast_to(c, (h, w)) for c in (r, g, b)], axis=-1)
    img[int(0.7 * h) :] = (40, 45, 70)
    noisy = img.astype(int) + rng.integers(-10, 11, img.shape)
    return np.clip(noisy, 0, 255).astype(np.uint8)


def hill_dem(size: int = 80) -> np.ndarray:
    t = np.linspace(0.0, 1.0, size)
    X, Y = np.meshgrid(t, t)
    return 1000.0 * np.exp(-((X - 0.5) ** 2 + (Y - 0.5) ** 2) * 8.0) + 200.0 * X


@pytest.fixture(scope="session")
def fixtures_dir(tmp_path_factory) -> Path:
    return tmp_path_factory.mktemp("fixtures")


@pytest.fixture(scope="session")
def ref_image_path(fixtures_dir: Path) -> Path:
    path = fixtures_dir / "landscape.png"
    Image.fromarray(landscape_image()).save(path)
    return path


@pytest.fixture(scope="session")
def ref_image_path_2(fixtures_dir: Path) -> Path:
    path = fixtures_dir / "sunset.png"
    Image.fromarray(sunset_image()).save(path)
    return path


@pytest.fixture(scope="session")
def dem_asc_path(fixtures_dir: Path) -> Path:
    return write_asc(fixtures_dir / "hill.asc", hill_dem())


@pytest.fixture(scope="session")
def ramp_dem_path(fixtures_dir: Path) -> Path:
    """Row-ramp DEM, elevations 0..100 uniform over rows."""
    z = np.broadcast_to(np.linspace(0.0, 100.0, 50)[:, None], (50, 40)).copy()
    return write_asc(fixtures_dir / "ramp.asc", z)


def make_palette(colors: list[tuple[float, float, float]], props=None) -> QuantizedPalette:
    if props is None:
        props = [1.0 / len(colors)] * len(colors)
    return QuantizedPalette(entries=[(LabColor(*c), p) for c, p in zip(colors, props)])


def make_grid(
    cell_colors: np.ndarray, region_id: np.ndarray | None = None, palette=None
) -> ColorGrid:
    """Hand-built grid for tests that need exact cell layouts."""
    w = cell_colors.shape[0]
    if palette is None:
        uniq = np.unique(cell_colors.reshape(-1, 3), axis=0)
        palette = make_palette([tuple(c) for c in uniq])
    pal_arr = palette.colors_array()
    flat = cell_colors.reshape(-1, 3)
    d2 = np.sum((flat[:, None, :] - pal_arr[None, :, :]) ** 2, axis=2)
    grid = ColorGrid(
        w=w,
        cell_colors=cell_colors.astype(np.float64),
        palette_index=np.argmin(d2, axis=1).reshape(w, w),
        palette=palette,
        region_id=region_id,
    )
    if region_id is not None:
        from terratint.grid import _build_regions

        grid.regions = _build_regions(grid)
    return grid
