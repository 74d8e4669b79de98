"""Scene generation, capture geometry, trajectories, and raster painting."""

import math

import numpy as np
import pytest

from pathcast.errors import ContractViolationError
from pathcast.synthdata.raster import GROUND_ALBEDO, ROAD_ALBEDO, render_scene_raster
from pathcast.synthdata.scene import (
    CAMERA_FOV_DEG,
    CROSSROAD_ROAD_WIDTH_M,
    SCENARIOS,
    WIDE_LANE_ROAD_WIDTH_M,
    Building,
    CaptureConfig,
    SceneSpec,
    fov_extent_for_altitude,
    generate_scene,
    make_capture,
    raster_pixel_centers,
    receiver_cell_centers,
    tx_trajectory,
)


class TestGenerateScene:
    def test_deterministic_per_seed(self):
        a = generate_scene(0, "crossroad", 200.0)
        b = generate_scene(0, "crossroad", 200.0)
        assert a == b

    def test_seed_changes_layout(self):
        assert generate_scene(0, "crossroad", 200.0) != generate_scene(1, "crossroad", 200.0)

    def test_scenarios_draw_independent_streams(self):
        a = generate_scene(0, "crossroad", 400.0)
        b = generate_scene(0, "wide_lane", 400.0)
        assert a.buildings != b.buildings

    def test_crossroad_seed0_has_at_least_four_buildings(self):
        scene = generate_scene(0, "crossroad", 200.0)
        assert len(scene.buildings) >= 4

    @pytest.mark.parametrize("scenario", SCENARIOS)
    @pytest.mark.parametrize("seed", [0, 1, 5])
    def test_building_dimensions_in_band(self, scenario, seed):
        scene = generate_scene(seed, scenario, 300.0)
        assert scene.buildings
        for b in scene.buildings:
            assert 8.0 <= b.x_max - b.x_min <= 28.0
            assert 8.0 <= b.y_max - b.y_min <= 28.0
            assert 10.0 <= b.height <= 45.0
            assert 0.0 <= b.x_min and b.x_max <= 300.0
            assert 0.0 <= b.y_min and b.y_max <= 300.0
            for chan, base in zip(b.albedo_rgb, (0.55, 0.38, 0.32)):
                assert abs(chan - base) <= 0.08 + 1e-12

    @pytest.mark.parametrize("scenario", SCENARIOS)
    def test_buildings_keep_clear_of_roads(self, scenario):
        scene = generate_scene(3, scenario, 300.0)
        half = 0.5 * scene.road_width_m
        c = 150.0
        for b in scene.buildings:
            off_lane = b.y_max < c - half or b.y_min > c + half
            assert off_lane
            if scenario == "crossroad":
                off_cross = b.x_max < c - half or b.x_min > c + half
                assert off_lane and off_cross
            # No interior sample point may sit on a road corridor.
            xs = np.linspace(b.x_min, b.x_max, 5)
            ys = np.linspace(b.y_min, b.y_max, 5)
            gx, gy = np.meshgrid(xs, ys)
            assert not scene.road_mask(gx, gy).any()

    def test_buildings_do_not_overlap(self):
        scene = generate_scene(2, "crossroad", 300.0)
        boxes = [(b.x_min, b.y_min, b.x_max, b.y_max) for b in scene.buildings]
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                ax0, ay0, ax1, ay1 = boxes[i]
                bx0, by0, bx1, by1 = boxes[j]
                disjoint = ax1 <= bx0 or bx1 <= ax0 or ay1 <= by0 or by1 <= ay0
                assert disjoint

    def test_rejects_bad_inputs(self):
        with pytest.raises(ContractViolationError):
            generate_scene(0, "crossroad", 0.0)
        with pytest.raises(ContractViolationError):
            generate_scene(0, "roundabout", 200.0)


class TestRoadGeometry:
    def test_widths(self):
        assert CROSSROAD_ROAD_WIDTH_M == 14.0
        assert WIDE_LANE_ROAD_WIDTH_M == 32.0
        assert WIDE_LANE_ROAD_WIDTH_M >= 2.0 * CROSSROAD_ROAD_WIDTH_M
        assert SceneSpec(0, "crossroad", 100.0).road_width_m == 14.0
        assert SceneSpec(0, "wide_lane", 100.0).road_width_m == 32.0

    def test_crossroad_mask_is_a_cross(self):
        scene = SceneSpec(0, "crossroad", 200.0)
        assert scene.road_mask(100.0, 30.0)  # vertical corridor
        assert scene.road_mask(30.0, 100.0)  # horizontal corridor
        assert not scene.road_mask(30.0, 30.0)
        assert scene.road_mask(100.0 + 6.9, 30.0)
        assert not scene.road_mask(100.0 + 7.1, 30.0)

    def test_wide_lane_mask_is_one_band(self):
        scene = SceneSpec(0, "wide_lane", 200.0)
        assert scene.road_mask(10.0, 100.0)
        assert scene.road_mask(190.0, 100.0 + 15.9)
        assert not scene.road_mask(100.0, 30.0)


class TestCaptureGeometry:
    def test_fov_law(self):
        assert CAMERA_FOV_DEG == 60.0
        for alt in (40.0, 70.0, 100.0):
            want = 2.0 * alt * math.tan(math.radians(30.0))
            assert fov_extent_for_altitude(alt) == pytest.approx(want, rel=1e-12)

    def test_make_capture_centres_footprint_on_tx(self):
        cfg = make_capture(70.0, 28e9, (120.0, 80.0), grid_n=8, image_hw=16)
        x0, y0, x1, y1 = cfg.footprint
        ext = fov_extent_for_altitude(70.0)
        assert (x0 + x1) / 2 == pytest.approx(120.0)
        assert (y0 + y1) / 2 == pytest.approx(80.0)
        assert x1 - x0 == pytest.approx(ext)
        assert cfg.tx_position == (120.0, 80.0, 70.0)

    def test_validation(self):
        with pytest.raises(ContractViolationError):
            make_capture(0.0, 1e9, (0, 0))
        with pytest.raises(ContractViolationError):
            make_capture(70.0, -1e9, (0, 0))
        with pytest.raises(ContractViolationError):
            CaptureConfig(70.0, 1e9, 0, (0, 0, 70.0), 80.0, 64)
        with pytest.raises(ContractViolationError):
            CaptureConfig(70.0, 1e9, 32, (0, 0, 70.0), 80.0, -4)

    @pytest.mark.parametrize("centers,n_attr", [(receiver_cell_centers, "grid_n"), (raster_pixel_centers, "image_hw")])
    def test_centers_tile_the_footprint(self, centers, n_attr):
        cfg = make_capture(70.0, 28e9, (50.0, 60.0), grid_n=8, image_hw=16)
        xs, ys = centers(cfg)
        n = getattr(cfg, n_attr)
        x0, y0, x1, y1 = cfg.footprint
        step = (x1 - x0) / n
        assert len(xs) == len(ys) == n
        assert xs[0] == pytest.approx(x0 + 0.5 * step)
        assert xs[-1] == pytest.approx(x1 - 0.5 * step)
        assert np.allclose(np.diff(xs), step)
        assert ys[0] == pytest.approx(y0 + 0.5 * step)


class TestTrajectory:
    def test_crossroad_follows_the_L(self):
        scene = SceneSpec(0, "crossroad", 200.0)
        pts = tx_trajectory(scene, 2)
        # Total arc 0.4*e; midpoints of two halves sit at s=0.1e and 0.3e.
        assert pts == pytest.approx(np.array([[80.0, 100.0], [100.0, 120.0]]))

    def test_single_snapshot_is_arc_midpoint(self):
        scene = SceneSpec(0, "crossroad", 200.0)
        pts = tx_trajectory(scene, 1)
        assert pts.shape == (1, 2)
        assert pts[0] == pytest.approx([100.0, 100.0])  # the corner

    def test_wide_lane_is_straight_and_uniform(self):
        scene = SceneSpec(0, "wide_lane", 300.0)
        pts = tx_trajectory(scene, 6)
        assert np.allclose(pts[:, 1], 150.0)
        assert np.allclose(np.diff(pts[:, 0]), pts[1, 0] - pts[0, 0])
        assert pts[0, 0] > 0.3 * 300.0 - 1e-9 and pts[-1, 0] < 0.7 * 300.0 + 1e-9

    def test_depends_only_on_scenario_and_extent(self):
        a = tx_trajectory(generate_scene(0, "crossroad", 200.0), 5)
        b = tx_trajectory(generate_scene(9, "crossroad", 200.0), 5)
        assert np.array_equal(a, b)

    def test_stays_in_central_band(self):
        for scenario in SCENARIOS:
            pts = tx_trajectory(SceneSpec(0, scenario, 500.0), 17)
            assert (pts >= 0.3 * 500.0 - 1e-9).all() and (pts <= 0.7 * 500.0 + 1e-9).all()

    def test_rejects_nonpositive_count(self):
        with pytest.raises(ContractViolationError):
            tx_trajectory(SceneSpec(0, "crossroad", 200.0), 0)


def rgb8(albedo):
    return tuple(int(v) for v in np.round(np.array(albedo) * 255.0))


class TestSceneRaster:
    def test_offroad_empty_scene_is_uniform_ground(self):
        scene = SceneSpec(0, "crossroad", 1000.0)
        cfg = make_capture(70.0, 28e9, (850.0, 850.0), grid_n=8, image_hw=16)
        img = render_scene_raster(scene, cfg)
        assert img.shape == (16, 16, 3)
        assert img.dtype == np.uint8
        assert set(map(tuple, img.reshape(-1, 3))) == {rgb8(GROUND_ALBEDO)}

    def test_road_band_painted(self):
        scene = SceneSpec(0, "wide_lane", 1000.0)
        cfg = make_capture(70.0, 28e9, (500.0, 500.0), grid_n=8, image_hw=16)
        img = render_scene_raster(scene, cfg)
        colors = set(map(tuple, img.reshape(-1, 3)))
        assert rgb8(ROAD_ALBEDO) in colors
        assert rgb8(GROUND_ALBEDO) in colors
        # Road rows span the full width; the centre row is road.
        assert set(map(tuple, img[8].reshape(-1, 3))) == {rgb8(ROAD_ALBEDO)}

    def test_quarter_footprint_building_covers_quarter_of_pixels(self):
        ext = fov_extent_for_altitude(70.0)
        x0 = 200.0 - 0.5 * ext
        b = Building(x0 - 5.0, 100.0, x0 + 0.25 * ext, 300.0, 20.0, (0.55, 0.38, 0.32))
        scene = SceneSpec(0, "crossroad", 1000.0, buildings=(b,))
        cfg = make_capture(70.0, 28e9, (200.0, 200.0), grid_n=8, image_hw=16)
        img = render_scene_raster(scene, cfg)
        frac = np.mean(np.all(img == rgb8(b.albedo_rgb), axis=-1))
        assert abs(frac - 0.25) <= 1.0 / 16 + 1e-12

    def test_higher_altitude_shrinks_building_fraction(self):
        b = Building(480.0, 480.0, 520.0, 520.0, 30.0, (0.6, 0.4, 0.3))
        scene = SceneSpec(0, "crossroad", 2000.0, buildings=(b,))
        fracs = []
        for alt in (60.0, 120.0):
            cfg = make_capture(alt, 28e9, (500.0, 500.0), grid_n=8, image_hw=32)
            img = render_scene_raster(scene, cfg)
            fracs.append(np.mean(np.all(img == rgb8(b.albedo_rgb), axis=-1)))
        assert fracs[1] < fracs[0]

    def test_roof_paints_over_road(self):
        b = Building(480.0, 480.0, 520.0, 520.0, 30.0, (0.6, 0.4, 0.3))
        scene = SceneSpec(0, "wide_lane", 1000.0, buildings=(b,))
        cfg = make_capture(60.0, 28e9, (500.0, 500.0), grid_n=8, image_hw=16)
        img = render_scene_raster(scene, cfg)
        assert tuple(img[8, 8]) == rgb8(b.albedo_rgb)

    def test_rejects_footprint_outside_world(self):
        scene = SceneSpec(0, "crossroad", 100.0)
        cfg = make_capture(70.0, 28e9, (10.0, 50.0), grid_n=8, image_hw=16)
        with pytest.raises(ContractViolationError):
            render_scene_raster(scene, cfg)

    def test_deterministic(self):
        scene = generate_scene(4, "crossroad", 320.0)
        cfg = make_capture(70.0, 28e9, (160.0, 160.0), grid_n=8, image_hw=16)
        assert np.array_equal(render_scene_raster(scene, cfg), render_scene_raster(scene, cfg))
