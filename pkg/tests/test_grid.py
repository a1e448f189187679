import json

import numpy as np
import pytest

from terratint.colors import LabColor, delta_e
from terratint.grid import (
    GridCoord,
    grid_to_json,
    identify_dominants,
    interpolate_chain,
    interpolate_path,
    neighbors,
    ramp_color,
    region_jump,
    save_grid_json,
    segment_regions,
    topology_ratio,
    train_som,
)

from conftest import make_grid, make_palette


class TestTrainSom:
    def test_single_color_palette(self):
        palette = make_palette([(42.0, 3.0, -5.0)])
        grid = train_som(palette, w=4, epochs=20, seed=0)
        assert np.allclose(grid.cell_colors, [42.0, 3.0, -5.0])

    def test_four_separated_colors_on_2x2(self):
        # pairwise delta E >= 60 by construction; an exhaustive check of the
        # 4-cell assignment just asks for all four palette colors present
        colors = [(20.0, 0.0, 0.0), (80.0, 0.0, 0.0), (50.0, 60.0, 0.0), (50.0, 0.0, 80.0)]
        for c1 in colors:
            for c2 in colors:
                if c1 != c2:
                    assert delta_e(LabColor(*c1), LabColor(*c2)) >= 60.0
        palette = make_palette(colors)
        grid = train_som(palette, w=2, epochs=100, seed=0)
        cells = {tuple(grid.cell_colors[r, c]) for r in range(2) for c in range(2)}
        assert cells == set(colors)

    def test_cells_are_palette_members(self):
        rng = np.random.default_rng(8)
        palette = make_palette(
            [(rng.uniform(0, 100), rng.uniform(-60, 60), rng.uniform(-60, 60)) for _ in range(20)]
        )
        grid = train_som(palette, w=6, epochs=50, seed=1)
        members = {tuple(c) for c in palette.colors_array()}
        for r in range(6):
            for c in range(6):
                assert tuple(grid.cell_colors[r, c]) in members

    def test_topology_preserved(self):
        rng = np.random.default_rng(3)
        palette = make_palette(
            [(rng.uniform(0, 100), rng.uniform(-60, 60), rng.uniform(-60, 60)) for _ in range(24)]
        )
        grid = train_som(palette, w=8, epochs=120, seed=0)
        assert topology_ratio(grid) < 0.7

    def test_deterministic(self):
        palette = make_palette([(10, 0, 0), (50, 20, 0), (90, 0, 20), (30, -20, 10)])
        g1 = train_som(palette, w=3, epochs=40, seed=9)
        g2 = train_som(palette, w=3, epochs=40, seed=9)
        assert np.array_equal(g1.cell_colors, g2.cell_colors)

    def test_w_too_small(self):
        with pytest.raises(ValueError):
            train_som(make_palette([(50, 0, 0)]), w=1)


class TestSegmentRegions:
    def test_identical_grid_single_region(self):
        cells = np.tile(np.array([50.0, 10.0, 10.0]), (4, 4, 1))
        grid = make_grid(cells)
        seg = segment_regions(grid, jncd=2.3, n_max=6)
        assert len(seg.regions) == 1
        assert (seg.region_id == 0).all()

    def test_two_blocks(self):
        cells = np.zeros((4, 4, 3))
        cells[:, :2] = [20.0, 0.0, 0.0]
        cells[:, 2:] = [70.0, 0.0, 0.0]
        seg = segment_regions(make_grid(cells), jncd=2.3, n_max=6)
        assert len(seg.regions) == 2

    def test_n_max_cap(self):
        rng = np.random.default_rng(1)
        cells = rng.uniform(-60, 60, (6, 6, 3)) + [50, 0, 0]
        cells[..., 0] = rng.uniform(5, 95, (6, 6))
        for n_max in (2, 3, 5):
            seg = segment_regions(make_grid(cells), jncd=2.3, n_max=n_max)
            assert 1 <= len(seg.regions) <= n_max

    def test_idempotent(self):
        rng = np.random.default_rng(2)
        cells = np.stack(
            [rng.uniform(5, 95, (5, 5)), rng.uniform(-50, 50, (5, 5)), rng.uniform(-50, 50, (5, 5))],
            axis=-1,
        )
        seg1 = segment_regions(make_grid(cells), jncd=4.0, n_max=4)
        seg2 = segment_regions(seg1, jncd=4.0, n_max=4)
        assert np.array_equal(seg1.region_id, seg2.region_id)

    def test_partition_covers_all_cells(self):
        rng = np.random.default_rng(7)
        cells = np.stack(
            [rng.uniform(5, 95, (5, 5)), rng.uniform(-50, 50, (5, 5)), rng.uniform(-50, 50, (5, 5))],
            axis=-1,
        )
        seg = segment_regions(make_grid(cells), jncd=2.3, n_max=6)
        seen = set()
        for region in seg.regions:
            for coord in region.members:
                assert coord not in seen
                seen.add(coord)
        assert len(seen) == 25
        assert sorted({r.id for r in seg.regions}) == list(range(len(seg.regions)))

    def test_bad_params(self):
        grid = make_grid(np.zeros((3, 3, 3)))
        with pytest.raises(ValueError):
            segment_regions(grid, jncd=0.0)
        with pytest.raises(ValueError):
            segment_regions(grid, n_max=1)


class TestDominants:
    def test_single_region_single_color(self):
        cells = np.tile(np.array([60.0, 5.0, 5.0]), (3, 3, 1))
        seg = segment_regions(make_grid(cells), jncd=2.3, n_max=6)
        profile = identify_dominants(seg)
        assert profile.size == 1
        color, proportion = profile.entries[0]
        assert color.as_tuple() == (60.0, 5.0, 5.0)
        assert proportion == pytest.approx(1.0)

    def test_medoid_of_collinear_colors(self):
        # distances 0, 10, 20 along L: middle minimizes 10+10 < 0+30
        cells = np.zeros((2, 2, 3))
        cells[0, 0] = [40.0, 0.0, 0.0]
        cells[0, 1] = [50.0, 0.0, 0.0]
        cells[1, 0] = [60.0, 0.0, 0.0]
        cells[1, 1] = [50.0, 0.0, 0.0]
        region_id = np.zeros((2, 2), dtype=int)
        grid = make_grid(cells, region_id=region_id)
        profile = identify_dominants(grid)
        assert profile.entries[0][0].L == 50.0

    def test_proportions_conserved(self):
        rng = np.random.default_rng(12)
        cells = np.stack(
            [rng.uniform(5, 95, (6, 6)), rng.uniform(-50, 50, (6, 6)), rng.uniform(-50, 50, (6, 6))],
            axis=-1,
        )
        seg = segment_regions(make_grid(cells), jncd=5.0, n_max=5)
        profile = identify_dominants(seg)
        assert sum(p for _, p in profile.entries) == pytest.approx(1.0, abs=1e-9)

    def test_unsegmented_grid_rejected(self):
        with pytest.raises(ValueError):
            identify_dominants(make_grid(np.zeros((3, 3, 3))))

    def test_dominant_cell_is_member(self):
        rng = np.random.default_rng(17)
        cells = np.stack(
            [rng.uniform(5, 95, (5, 5)), rng.uniform(-50, 50, (5, 5)), rng.uniform(-50, 50, (5, 5))],
            axis=-1,
        )
        seg = segment_regions(make_grid(cells), jncd=3.0, n_max=6)
        for region in seg.regions:
            assert region.dominant_cell in region.members
            cell_color = seg.color_at(region.dominant_cell)
            assert cell_color.as_tuple() == region.dominant.as_tuple()


class TestMoves:
    def test_moore_neighborhood(self):
        grid = make_grid(np.zeros((5, 5, 3)))
        assert len(neighbors(grid, GridCoord(2, 2), 1)) == 8

    def test_corner_clipping(self):
        grid = make_grid(np.zeros((5, 5, 3)))
        assert len(neighbors(grid, GridCoord(0, 0), 1)) == 3

    def test_radius_saturation(self):
        grid = make_grid(np.zeros((5, 5, 3)))
        assert len(neighbors(grid, GridCoord(2, 2), 5)) == 24

    def test_out_of_bounds(self):
        grid = make_grid(np.zeros((3, 3, 3)))
        with pytest.raises(ValueError):
            neighbors(grid, GridCoord(3, 0), 1)

    def _three_region_grid(self):
        cells = np.zeros((4, 4, 3))
        region_id = np.zeros((4, 4), dtype=int)
        cells[:2, :2] = [20, 0, 0]
        cells[:2, 2:] = [50, 40, 0]
        region_id[:2, 2:] = 1
        cells[2:, :] = [80, 0, 40]
        region_id[2:, :] = 2
        return make_grid(cells, region_id=region_id)

    def test_jump_leaves_region(self):
        grid = self._three_region_grid()
        rng = np.random.default_rng(0)
        src = GridCoord(0, 0)
        for _ in range(200):
            dest = region_jump(grid, src, rng)
            assert grid.region_at(dest) != grid.region_at(src)

    def test_jump_deterministic(self):
        grid = self._three_region_grid()
        a = region_jump(grid, GridCoord(0, 0), np.random.default_rng(77))
        b = region_jump(grid, GridCoord(0, 0), np.random.default_rng(77))
        assert a == b

    def test_jump_uniform_over_foreign_cells(self):
        grid = self._three_region_grid()
        rng = np.random.default_rng(123)
        hits = {1: 0, 2: 0}
        draws = 10_000
        for _ in range(draws):
            dest = region_jump(grid, GridCoord(0, 0), rng)
            hits[grid.region_at(dest)] += 1
        # foreign cells: region 1 has 4 of 12, region 2 has 8 of 12
        assert hits[1] / draws == pytest.approx(4 / 12, abs=0.05)
        assert hits[2] / draws == pytest.approx(8 / 12, abs=0.05)

    def test_jump_needs_two_regions(self):
        cells = np.zeros((3, 3, 3))
        grid = make_grid(cells, region_id=np.zeros((3, 3), dtype=int))
        with pytest.raises(ValueError):
            region_jump(grid, GridCoord(0, 0), np.random.default_rng(0))


class TestInterpolate:
    def test_two_steps_endpoints(self):
        a, b = LabColor(10, 5, -5), LabColor(90, -20, 30)
        assert interpolate_path(a, b, 2) == [a, b]

    def test_equal_endpoints_constant(self):
        c = LabColor(42, 1, 2)
        path = interpolate_path(c, c, 5)
        assert all(p == c for p in path)

    def test_l_sequence(self):
        path = interpolate_path(LabColor(0, 0, 0), LabColor(100, 0, 0), 5)
        assert [p.L for p in path] == [0.0, 25.0, 50.0, 75.0, 100.0]

    def test_chain_no_duplicate_anchors(self):
        anchors = [LabColor(0, 0, 0), LabColor(50, 0, 0), LabColor(100, 0, 0)]
        chain = interpolate_chain(anchors, steps_per_segment=3)
        assert [p.L for p in chain] == [0.0, 25.0, 50.0, 75.0, 100.0]

    def test_ramp_color_midpoint(self):
        anchors = [LabColor(0, 0, 0), LabColor(100, 20, -40)]
        mid = ramp_color(anchors, 0.5)
        assert mid.as_tuple() == (50.0, 10.0, -20.0)

    def test_steps_validation(self):
        with pytest.raises(ValueError):
            interpolate_path(LabColor(0, 0, 0), LabColor(1, 0, 0), 1)


class TestSerialization:
    def test_json_contract(self, tmp_path):
        cells = np.zeros((3, 3, 3))
        cells[:, :] = [30.0, 0.0, 0.0]
        cells[2, 2] = [90.0, 10.0, 10.0]
        seg = segment_regions(make_grid(cells), jncd=2.3, n_max=4)
        doc = grid_to_json(seg)
        assert doc["w"] == 3
        assert len(doc["cells"]) == 9
        assert {"row", "col", "L", "a", "b", "region"} <= set(doc["cells"][0])
        assert sum(d["proportion"] for d in doc["dominants"]) == pytest.approx(1.0)
        path = tmp_path / "grid.json"
        save_grid_json(seg, path)
        assert json.loads(path.read_text()) == json.loads(json.dumps(doc))
