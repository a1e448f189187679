"""Self-organizing color grid: training, region segmentation, search moves.

A quantized palette is organized onto a w x w lattice by a SOM trained in
Lab, with every node snapped to its closest palette color (winner takes
all). Regions come from bottom-up average-linkage clustering under a just
noticeable color distance threshold, doubling the threshold until the
region count fits the dominant-color budget. Each region's medoid color is
its dominant color, carrying the region's accumulated image proportion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .colors import LabColor
from .image_colors import QuantizedPalette

DEFAULT_GRID_SIZE = 16
DEFAULT_EPOCHS = 200
DEFAULT_JNCD = 2.3
DEFAULT_MAX_DOMINANTS = 6

SOM_LEARN_START, SOM_LEARN_END = 0.5, 0.01
SOM_SIGMA_END = 0.5


@dataclass(frozen=True, order=True)
class GridCoord:
    row: int
    col: int


@dataclass(frozen=True)
class Region:
    id: int
    members: list[GridCoord]
    dominant: LabColor
    dominant_cell: GridCoord
    proportion: float


@dataclass(frozen=True)
class DominantProfile:
    """Dominant colors with their accumulated image proportions."""

    entries: list[tuple[LabColor, float]]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("dominant profile must not be empty")
        total = sum(p for _, p in self.entries)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"dominant proportions sum to {total}, expected 1")

    @property
    def size(self) -> int:
        return len(self.entries)


@dataclass
class ColorGrid:
    """w x w lattice of Lab cells; regions filled in by segment_regions."""

    w: int
    cell_colors: np.ndarray  # (w, w, 3) Lab
    palette_index: np.ndarray  # (w, w) int, source palette entry per cell
    palette: QuantizedPalette
    region_id: np.ndarray | None = None  # (w, w) int once segmented
    regions: list[Region] = field(default_factory=list)

    def color_at(self, at: GridCoord) -> LabColor:
        L, a, b = self.cell_colors[at.row, at.col]
        return LabColor(float(L), float(a), float(b))

    def region_at(self, at: GridCoord) -> int:
        if self.region_id is None:
            raise ValueError("grid is not segmented")
        return int(self.region_id[at.row, at.col])

    @property
    def segmented(self) -> bool:
        return self.region_id is not None


def train_som(
    palette: QuantizedPalette,
    w: int = DEFAULT_GRID_SIZE,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = 0,
) -> ColorGrid:
    """Train a w x w SOM over the palette colors in Lab, then snap each node
    to its closest palette color.

    Nodes are initialized from a seeded permutation of the palette so every
    color is represented when the palette is at least as large as the grid.
    Learning rate and neighborhood radius decay exponentially over epochs.
    """
    if w < 2:
        raise ValueError("grid side must be at least 2")
    colors = palette.colors_array()
    m = colors.shape[0]
    rng = np.random.default_rng(seed)

    order = rng.permutation(m)
    init_idx = np.resize(order, w * w)
    weights = colors[init_idx].astype(np.float64).reshape(w, w, 3)
    weights += rng.normal(0.0, 0.01, size=weights.shape)

    rows, cols = np.meshgrid(np.arange(w), np.arange(w), indexing="ij")
    sigma_start = w / 2.0
    for epoch in range(epochs):
        frac = epoch / max(1, epochs - 1)
        lr = SOM_LEARN_START * (SOM_LEARN_END / SOM_LEARN_START) ** frac
        sigma = sigma_start * (SOM_SIGMA_END / sigma_start) ** frac
        for i in rng.permutation(m):
            x = colors[i]
            d2 = np.sum((weights - x) ** 2, axis=2)
            bmu = np.unravel_index(np.argmin(d2), d2.shape)
            grid_d2 = (rows - bmu[0]) ** 2 + (cols - bmu[1]) ** 2
            influence = lr * np.exp(-grid_d2 / (2.0 * sigma * sigma))
            weights += influence[:, :, None] * (x - weights)

    flat = weights.reshape(-1, 3)
    d2 = np.sum((flat[:, None, :] - colors[None, :, :]) ** 2, axis=2)
    nearest = np.argmin(d2, axis=1).reshape(w, w)
    snapped = colors[nearest.ravel()].reshape(w, w, 3)
    return ColorGrid(w=w, cell_colors=snapped, palette_index=nearest, palette=palette)


def segment_regions(
    grid: ColorGrid, jncd: float = DEFAULT_JNCD, n_max: int = DEFAULT_MAX_DOMINANTS
) -> ColorGrid:
    """Cluster grid cells bottom-up by average-linkage delta E.

    Merging proceeds while the smallest linkage stays within the current
    threshold; whenever more regions than n_max remain, the threshold is
    doubled and clustering continues on the regions, as many times as needed.
    """
    if jncd <= 0:
        raise ValueError("jncd must be positive")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    w = grid.w
    cells = grid.cell_colors.reshape(-1, 3)
    n = cells.shape[0]
    pair_d = np.sqrt(np.sum((cells[:, None, :] - cells[None, :, :]) ** 2, axis=2))

    # Lance-Williams on average linkage: track summed pairwise distances and
    # sizes; linkage(A, B) = sum(A, B) / (|A| * |B|).
    sums = pair_d.copy()
    sizes = np.ones(n)
    members: list[list[int] | None] = [[i] for i in range(n)]
    active = np.ones(n, dtype=bool)
    threshold = jncd

    while True:
        while active.sum() > 1:
            idx = np.flatnonzero(active)
            link = sums[np.ix_(idx, idx)] / np.outer(sizes[idx], sizes[idx])
            np.fill_diagonal(link, np.inf)
            best = np.unravel_index(np.argmin(link), link.shape)
            if link[best] > threshold:
                break
            i, j = sorted((int(idx[best[0]]), int(idx[best[1]])))
            sums[i, :] += sums[j, :]
            sums[:, i] += sums[:, j]
            sizes[i] += sizes[j]
            members[i] = members[i] + members[j]  # type: ignore[operator]
            members[j] = None
            active[j] = False
        if active.sum() <= n_max:
            break
        threshold *= 2.0

    cluster_lists = [m for m in members if m is not None]
    cluster_lists.sort(key=min)
    region_id = np.empty(n, dtype=int)
    for rid, cluster in enumerate(cluster_lists):
        for cell in cluster:
            region_id[cell] = rid
    segmented = ColorGrid(
        w=w,
        cell_colors=grid.cell_colors,
        palette_index=grid.palette_index,
        palette=grid.palette,
        region_id=region_id.reshape(w, w),
    )
    segmented.regions = _build_regions(segmented)
    return segmented


def _build_regions(grid: ColorGrid) -> list[Region]:
    assert grid.region_id is not None
    w = grid.w
    cells = grid.cell_colors.reshape(-1, 3)
    rid_flat = grid.region_id.ravel()

    # Every palette entry contributes its proportion exactly once, to the
    # region of the nearest grid cell (exact matches win at distance 0), so
    # region proportions conserve the full palette mass.
    pal_colors = grid.palette.colors_array()
    pal_props = grid.palette.proportions_array()
    d2 = np.sum((pal_colors[:, None, :] - cells[None, :, :]) ** 2, axis=2)
    owner_cell = np.argmin(d2, axis=1)
    region_mass = np.zeros(int(rid_flat.max()) + 1)
    for entry, cell in enumerate(owner_cell):
        region_mass[rid_flat[cell]] += pal_props[entry]

    regions = []
    for rid in range(region_mass.size):
        member_idx = np.flatnonzero(rid_flat == rid)
        member_colors = cells[member_idx]
        dist = np.sqrt(
            np.sum((member_colors[:, None, :] - member_colors[None, :, :]) ** 2, axis=2)
        )
        medoid_local = int(np.argmin(dist.sum(axis=1)))  # ties: lowest flat index
        medoid_flat = int(member_idx[medoid_local])
        coords = [GridCoord(int(i // w), int(i % w)) for i in member_idx]
        regions.append(
            Region(
                id=rid,
                members=coords,
                dominant=LabColor(*map(float, cells[medoid_flat])),
                dominant_cell=GridCoord(medoid_flat // w, medoid_flat % w),
                proportion=float(region_mass[rid]),
            )
        )
    return regions


def identify_dominants(grid: ColorGrid) -> DominantProfile:
    """Dominant color and accumulated proportion per region, in region order."""
    if not grid.segmented:
        raise ValueError("grid must be segmented first")
    return DominantProfile(entries=[(r.dominant, r.proportion) for r in grid.regions])


def neighbors(grid: ColorGrid, at: GridCoord, radius: int = 1) -> list[GridCoord]:
    """Cells within Chebyshev distance radius, excluding at, clipped to bounds."""
    if radius < 1:
        raise ValueError("radius must be at least 1")
    if not (0 <= at.row < grid.w and 0 <= at.col < grid.w):
        raise ValueError("coordinate out of bounds")
    out = []
    for r in range(max(0, at.row - radius), min(grid.w, at.row + radius + 1)):
        for c in range(max(0, at.col - radius), min(grid.w, at.col + radius + 1)):
            if (r, c) != (at.row, at.col):
                out.append(GridCoord(r, c))
    return out


def region_jump(grid: ColorGrid, frm: GridCoord, rng: np.random.Generator) -> GridCoord:
    """Uniformly random cell from any region other than frm's region."""
    if not grid.segmented:
        raise ValueError("grid must be segmented first")
    if len(grid.regions) < 2:
        raise ValueError("region jump needs at least 2 regions")
    source = grid.region_at(frm)
    assert grid.region_id is not None
    foreign = np.flatnonzero(grid.region_id.ravel() != source)
    pick = int(foreign[rng.integers(foreign.size)])
    return GridCoord(pick // grid.w, pick % grid.w)


def interpolate_path(c_start: LabColor, c_end: LabColor, steps: int) -> list[LabColor]:
    """Linear Lab interpolation including both endpoints."""
    if steps < 2:
        raise ValueError("steps must be at least 2")
    a = np.array(c_start.as_tuple())
    b = np.array(c_end.as_tuple())
    ts = np.linspace(0.0, 1.0, steps)
    return [LabColor(*map(float, a + (b - a) * t)) for t in ts]


def interpolate_chain(anchors: list[LabColor], steps_per_segment: int) -> list[LabColor]:
    """Concatenated piecewise interpolation without duplicating shared anchors."""
    if len(anchors) < 2:
        raise ValueError("need at least 2 anchors")
    out: list[LabColor] = []
    for i in range(len(anchors) - 1):
        seg = interpolate_path(anchors[i], anchors[i + 1], steps_per_segment)
        out.extend(seg if i == 0 else seg[1:])
    return out


def ramp_color(anchors: list[LabColor], t: float) -> LabColor:
    """Piecewise-linear Lab evaluation over anchors at t in [0, 1]."""
    if len(anchors) < 2:
        raise ValueError("need at least 2 anchors")
    t = min(1.0, max(0.0, t))
    pos = t * (len(anchors) - 1)
    i = min(len(anchors) - 2, int(pos))
    frac = pos - i
    a = np.array(anchors[i].as_tuple())
    b = np.array(anchors[i + 1].as_tuple())
    return LabColor(*map(float, a + (b - a) * frac))


def ramp_colors_array(anchors: list[LabColor], ts: np.ndarray) -> np.ndarray:
    """Vectorized piecewise-linear Lab ramp evaluation; returns (len(ts), 3)."""
    pts = np.array([c.as_tuple() for c in anchors])
    ts = np.clip(np.asarray(ts, dtype=np.float64), 0.0, 1.0)
    pos = ts * (len(anchors) - 1)
    i = np.minimum(len(anchors) - 2, pos.astype(int))
    frac = (pos - i)[:, None]
    return pts[i] * (1.0 - frac) + pts[i + 1] * frac


def topology_ratio(grid: ColorGrid) -> float:
    """Mean adjacent-pair delta E divided by mean all-pair delta E.

    Low values mean neighboring cells carry similar colors, i.e. the SOM
    preserved palette topology on the lattice.
    """
    cells = grid.cell_colors
    w = grid.w
    adj = []
    horiz = np.sqrt(np.sum((cells[:, 1:] - cells[:, :-1]) ** 2, axis=2))
    vert = np.sqrt(np.sum((cells[1:, :] - cells[:-1, :]) ** 2, axis=2))
    adj_mean = float(np.concatenate([horiz.ravel(), vert.ravel()]).mean())
    flat = cells.reshape(-1, 3)
    pair = np.sqrt(np.sum((flat[:, None, :] - flat[None, :, :]) ** 2, axis=2))
    iu = np.triu_indices(flat.shape[0], k=1)
    all_mean = float(pair[iu].mean())
    if all_mean == 0.0:
        return 0.0
    return adj_mean / all_mean


def grid_to_json(grid: ColorGrid) -> dict:
    """Serialize a segmented grid to the documented JSON contract."""
    if not grid.segmented:
        raise ValueError("grid must be segmented first")
    assert grid.region_id is not None
    cells = []
    for r in range(grid.w):
        for c in range(grid.w):
            L, a, b = (float(v) for v in grid.cell_colors[r, c])
            cells.append(
                {"row": r, "col": c, "L": L, "a": a, "b": b, "region": int(grid.region_id[r, c])}
            )
    dominants = [
        {"L": reg.dominant.L, "a": reg.dominant.a, "b": reg.dominant.b, "proportion": reg.proportion}
        for reg in grid.regions
    ]
    return {"w": grid.w, "cells": cells, "dominants": dominants}


def save_grid_json(grid: ColorGrid, path: str | Path) -> None:
    Path(path).write_text(json.dumps(grid_to_json(grid), indent=2, sort_keys=True))
