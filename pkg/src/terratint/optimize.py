"""Dual-objective search for tint schemes over a color grid.

Candidates assign one grid cell per elevation zone. A (mu+mu) evolutionary
loop mutates candidates with the two grid moves (local neighborhood step,
cross-region jump) and feeds every evaluated candidate to a Pareto archive
of mutually non-dominated (F_s, F_a) solutions. For graded schemes, a
death penalty of (0, 0) enforces mutual color discrimination.
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .colors import HarmonyScorer, LabColor
from .grid import ColorGrid, DominantProfile, GridCoord, neighbors, region_jump
from .scoring import (
    DEFAULT_DELTA_MIN,
    ConventionSpec,
    SchemeMode,
    ScoringParams,
    TintScheme,
    ZoneAreas,
    aesthetic_score,
    discrimination_check,
    subjective_score,
)

logger = logging.getLogger(__name__)

EXHAUSTIVE_GUARD = 10**6


@dataclass(frozen=True)
class Candidate:
    """A zone-to-cell assignment with its derived scheme and scores."""

    coords: tuple[GridCoord, ...]
    scheme: TintScheme
    f_s: float
    f_a: float

    @property
    def scores(self) -> tuple[float, float]:
        return (self.f_s, self.f_a)


@dataclass(frozen=True)
class OptimizerConfig:
    population: int = 40
    iterations: int = 500
    local_move_probability: float = 0.7
    local_radius: int = 1
    seed: int = 0
    delta_min: float = DEFAULT_DELTA_MIN
    archive_capacity: int = 64

    def __post_init__(self) -> None:
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if not 0.0 <= self.local_move_probability <= 1.0:
            raise ValueError("local_move_probability must lie in [0, 1]")


def dominates(a: tuple[float, float], b: tuple[float, float]) -> bool:
    """Pareto dominance for maximization of both objectives."""
    return a[0] >= b[0] and a[1] >= b[1] and (a[0] > b[0] or a[1] > b[1])


@dataclass
class ParetoArchive:
    """Mutually non-dominated candidates, capacity-bounded by crowding."""

    capacity: int | None = None
    solutions: list[Candidate] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.solutions)

    def insert(self, candidate: Candidate) -> bool:
        """Add iff no member dominates it; drops members it dominates."""
        for member in self.solutions:
            if dominates(member.scores, candidate.scores):
                return False
            if member.scores == candidate.scores and member.coords == candidate.coords:
                return False
        self.solutions = [m for m in self.solutions if not dominates(candidate.scores, m.scores)]
        self.solutions.append(candidate)
        if self.capacity is not None and len(self.solutions) > self.capacity:
            self._evict_most_crowded()
        return True

    def _evict_most_crowded(self) -> None:
        crowding = _crowding_distances(self.solutions)
        victim = min(range(len(self.solutions)), key=lambda i: (crowding[i], i))
        del self.solutions[victim]

    def sorted_solutions(self) -> list[Candidate]:
        """Members ordered by ascending F_s, ties by descending F_a."""
        return sorted(self.solutions, key=lambda c: (c.f_s, -c.f_a))


def _crowding_distances(solutions: list[Candidate]) -> list[float]:
    n = len(solutions)
    dist = [0.0] * n
    for key in (lambda c: c.f_s, lambda c: c.f_a):
        order = sorted(range(n), key=lambda i: key(solutions[i]))
        lo, hi = key(solutions[order[0]]), key(solutions[order[-1]])
        dist[order[0]] = dist[order[-1]] = float("inf")
        if hi == lo:
            continue
        for pos in range(1, n - 1):
            gap = key(solutions[order[pos + 1]]) - key(solutions[order[pos - 1]])
            dist[order[pos]] += gap / (hi - lo)
    return dist


def make_candidate(coords: tuple[GridCoord, ...], grid: ColorGrid, mode: SchemeMode) -> TintScheme:
    return TintScheme(colors=[grid.color_at(c) for c in coords], mode=mode)


def _spread_assignment(
    grid: ColorGrid, n_zones: int, rng: np.random.Generator, t_sign: int
) -> tuple[GridCoord, ...]:
    """Farthest-point cell pick ordered by lightness along the t direction.

    Random assignments over an image-derived grid almost never satisfy the
    mutual-discrimination constraint for larger zone counts, which starves
    the death-penalty loop; spreading seeds keeps the search anchored in
    feasible space when the grid supports it.
    """
    cells = grid.cell_colors.reshape(-1, 3)
    start = int(rng.integers(cells.shape[0]))
    chosen = [start]
    d = np.sqrt(np.sum((cells - cells[start]) ** 2, axis=1))
    while len(chosen) < n_zones:
        nxt = int(np.argmax(d))
        chosen.append(nxt)
        d = np.minimum(d, np.sqrt(np.sum((cells - cells[nxt]) ** 2, axis=1)))
    chosen.sort(key=lambda i: (cells[i][0], i), reverse=t_sign < 0)
    return tuple(GridCoord(i // grid.w, i % grid.w) for i in chosen)


def evaluate(
    candidate_coords: tuple[GridCoord, ...],
    grid: ColorGrid,
    profile: DominantProfile,
    areas: ZoneAreas,
    conventions: ConventionSpec,
    params: ScoringParams,
    scorer: HarmonyScorer | None = None,
    mode: SchemeMode = SchemeMode.GRADED,
    delta_min: float = DEFAULT_DELTA_MIN,
) -> Candidate:
    """Score one assignment; graded schemes failing discrimination get (0, 0)."""
    scheme = make_candidate(candidate_coords, grid, mode)
    if mode is SchemeMode.GRADED and not discrimination_check(scheme, delta_min):
        return Candidate(coords=candidate_coords, scheme=scheme, f_s=0.0, f_a=0.0)
    f_s = subjective_score(scheme, conventions, params)
    f_a = aesthetic_score(scheme, profile, areas, params, scorer)
    return Candidate(coords=candidate_coords, scheme=scheme, f_s=f_s, f_a=f_a)


def pareto_insert(archive: ParetoArchive, candidate: Candidate) -> ParetoArchive:
    archive.insert(candidate)
    return archive


def optimize(
    grid: ColorGrid,
    n_zones: int,
    profile: DominantProfile,
    areas: ZoneAreas,
    conventions: ConventionSpec,
    params: ScoringParams,
    config: OptimizerConfig,
    scorer: HarmonyScorer | None = None,
    mode: SchemeMode = SchemeMode.GRADED,
) -> ParetoArchive:
    """Run the evolutionary loop and return the resulting Pareto archive."""
    if not grid.segmented:
        raise ValueError("grid must be segmented first")
    if n_zones < 2:
        raise ValueError("need at least 2 elevation zones")
    single_region = len(grid.regions) < 2
    if single_region:
        logger.warning("color grid has a single region; global moves disabled")

    rng = np.random.default_rng(config.seed)
    cache: dict[tuple[GridCoord, ...], Candidate] = {}

    def scored(coords: tuple[GridCoord, ...]) -> Candidate:
        hit = cache.get(coords)
        if hit is None:
            hit = evaluate(
                coords, grid, profile, areas, conventions, params, scorer, mode, config.delta_min
            )
            cache[coords] = hit
        return hit

    archive = ParetoArchive(capacity=config.archive_capacity)
    population: list[Candidate] = []
    for member in range(config.population):
        if member % 2 == 0:
            raw = rng.integers(0, grid.w, size=(n_zones, 2))
            coords = tuple(GridCoord(int(r), int(c)) for r, c in raw)
        else:
            coords = _spread_assignment(grid, n_zones, rng, params.t)
        cand = scored(coords)
        population.append(cand)
        archive.insert(cand)

    for _ in range(config.iterations):
        for idx in range(config.population):
            parent = population[idx]
            zone = int(rng.integers(n_zones))
            use_local = single_region or rng.random() < config.local_move_probability
            at = parent.coords[zone]
            if use_local:
                options = neighbors(grid, at, config.local_radius)
                new_coord = options[int(rng.integers(len(options)))]
            else:
                new_coord = region_jump(grid, at, rng)
            coords = parent.coords[:zone] + (new_coord,) + parent.coords[zone + 1 :]
            mutant = scored(coords)
            archive.insert(mutant)
            # keep the mutant unless the parent strictly dominates it; equal-
            # or-better on one axis lets lineages slide along the trade-off
            if not dominates(parent.scores, mutant.scores):
                population[idx] = mutant
    return archive


def select_midpoint(archive: ParetoArchive) -> Candidate:
    """The balanced pick: lower-median element of the F_s-sorted front."""
    if not archive.solutions:
        raise ValueError("archive is empty")
    ordered = archive.sorted_solutions()
    return ordered[(len(ordered) - 1) // 2]


def sample_front(archive: ParetoArchive, count: int) -> list[Candidate]:
    """Evenly spaced picks along the F_s-sorted front, extremes included."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if not archive.solutions:
        raise ValueError("archive is empty")
    ordered = archive.sorted_solutions()
    if count >= len(ordered):
        return ordered
    if count == 1:
        return [ordered[0]]
    idx = [round(i * (len(ordered) - 1) / (count - 1)) for i in range(count)]
    return [ordered[i] for i in idx]


def exhaustive_front(
    grid: ColorGrid,
    n_zones: int,
    profile: DominantProfile,
    areas: ZoneAreas,
    conventions: ConventionSpec,
    params: ScoringParams,
    scorer: HarmonyScorer | None = None,
    mode: SchemeMode = SchemeMode.GRADED,
    delta_min: float = DEFAULT_DELTA_MIN,
) -> ParetoArchive:
    """Exact Pareto front by enumerating every cell assignment (test oracle)."""
    total = (grid.w**2) ** n_zones
    if total > EXHAUSTIVE_GUARD:
        raise ValueError(f"instance too large for exhaustive search: {total} assignments")
    all_cells = [GridCoord(r, c) for r in range(grid.w) for c in range(grid.w)]
    archive = ParetoArchive(capacity=None)
    for combo in itertools.product(all_cells, repeat=n_zones):
        archive.insert(
            evaluate(combo, grid, profile, areas, conventions, params, scorer, mode, delta_min)
        )
    return archive


def solution_to_json(candidate: Candidate) -> dict:
    return {
        "coords": [[c.row, c.col] for c in candidate.coords],
        "colors": [{"L": c.L, "a": c.a, "b": c.b} for c in candidate.scheme.colors],
        "F_s": candidate.f_s,
        "F_a": candidate.f_a,
        "mode": candidate.scheme.mode.value,
    }


def solution_from_json(doc: dict) -> Candidate:
    coords = tuple(GridCoord(int(r), int(c)) for r, c in doc["coords"])
    colors = [LabColor(float(c["L"]), float(c["a"]), float(c["b"])) for c in doc["colors"]]
    scheme = TintScheme(colors=colors, mode=SchemeMode(doc["mode"]))
    return Candidate(coords=coords, scheme=scheme, f_s=float(doc["F_s"]), f_a=float(doc["F_a"]))


def archive_to_json(archive: ParetoArchive) -> dict:
    return {"solutions": [solution_to_json(c) for c in archive.sorted_solutions()]}


def save_archive_json(archive: ParetoArchive, path: str | Path) -> None:
    Path(path).write_text(json.dumps(archive_to_json(archive), indent=2, sort_keys=True))
