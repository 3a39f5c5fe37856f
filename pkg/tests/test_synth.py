"""Path enumeration, blockage, human scatter, CTF synthesis."""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isacsim import (
    BAND24,
    BAND60,
    Band,
    GeometryError,
    LinkId,
    PathKind,
    Person,
    Reflector,
    Scene,
    Side,
    blockage_attenuation,
    build_all_grids,
    compute_pdp,
    ctf_to_cir,
    default_scene,
    enumerate_paths,
    human_scatter_amplitude,
    scatter_cross_section,
    synthesize_ctf,
)
from isacsim.geometry import SPEED_OF_LIGHT, azimuth_of
from isacsim.scene import ScatterParams, SitePlacement, make_person
from isacsim.synth import knife_edge_loss_db

J_AT_ZERO_DB = 6.032852208563606  # 6.9 + 20 log10(sqrt(1.01) - 0.1)


def bare_scene(
    tx1=(0.0, 0.0, 1.0),
    rx2=(6.0, 0.0, 1.0),
    order=0,
    panels=(),
    persons=(),
    noise=None,
    wall_reflection=0.0,
    seed=5,
):
    """Minimal scene: absorbing walls unless wall_reflection is set."""
    positions = {
        "tx1": np.array(tx1, float),
        "rx2": np.array(rx2, float),
        "tx2": np.array([0.0, 4.0, 1.0]),
        "rx1": np.array([6.0, 4.0, 1.0]),
    }
    faces = {"tx1": "rx2", "rx2": "tx1", "tx2": "rx1", "rx1": "tx2"}
    sites = {
        name: SitePlacement(
            name, pos, azimuth_of(positions[faces[name]] - pos)
        )
        for name, pos in positions.items()
    }
    return Scene(
        room_min=np.array([-10.0, -10.0, 0.0]),
        room_max=np.array([16.0, 14.0, 3.0]),
        sites=sites,
        panels=tuple(panels),
        persons=tuple(persons),
        wall_reflection=wall_reflection,
        max_reflection_order=order,
        noise_floor_db=noise,
        seed=seed,
    )


def person_at(x, y, facing=0.0, radius=0.15, height=1.70):
    return Person(
        label="A",
        location_index=1,
        orientation_index=1,
        center=np.array([x, y, height / 2.0]),
        facing_azimuth=facing,
        cylinder_radius=radius,
        height=height,
    )


class TestEnumeratePaths:
    def test_empty_room_order0(self):
        scene = bare_scene(order=0)
        paths = enumerate_paths(scene, LinkId.TX1RX2, BAND60)
        assert len(paths) == 1
        (los,) = paths
        assert los.kind is PathKind.LOS
        assert los.delay == pytest.approx(6.0 / SPEED_OF_LIGHT, rel=1e-12)
        assert abs(los.amplitude) == pytest.approx(
            BAND60.wavelength / (4 * math.pi * 6.0), rel=1e-12
        )

    def test_one_wall_order1(self):
        panel = Reflector(
            "mirror",
            np.array([-2.0, 2.0, 0.0]),
            np.array([10.0, 0.0, 0.0]),
            np.array([0.0, 0.0, 3.0]),
            {Band.BAND24: 0.8, Band.BAND60: 0.8},
        )
        scene = bare_scene(order=1, panels=(panel,))
        paths = enumerate_paths(scene, LinkId.TX1RX2, BAND60)
        assert len(paths) == 2
        los, refl = paths
        assert refl.kind is PathKind.REFLECTION and refl.order == 1
        assert refl.delay > los.delay
        # image geometry: path length = |image(tx) - rx| with the image at y=4
        expected = math.hypot(6.0, 4.0) / SPEED_OF_LIGHT
        assert refl.delay == pytest.approx(expected, rel=1e-12)
        assert abs(refl.amplitude) == pytest.approx(
            0.8 * BAND60.wavelength / (4 * math.pi * math.hypot(6.0, 4.0)), rel=1e-12
        )

    def test_second_order_double_bounce(self):
        # two parallel mirrors above and below the link produce (among
        # others) up-down and down-up double bounces
        up = Reflector(
            "up",
            np.array([-2.0, 2.0, 0.0]),
            np.array([10.0, 0.0, 0.0]),
            np.array([0.0, 0.0, 3.0]),
            {Band.BAND60: 0.9, Band.BAND24: 0.9},
        )
        down = Reflector(
            "down",
            np.array([-2.0, -2.0, 0.0]),
            np.array([10.0, 0.0, 0.0]),
            np.array([0.0, 0.0, 3.0]),
            {Band.BAND60: 0.9, Band.BAND24: 0.9},
        )
        scene = bare_scene(order=2, panels=(up, down))
        paths = enumerate_paths(scene, LinkId.TX1RX2, BAND60)
        labels = {p.label for p in paths}
        assert "refl:up+down" in labels and "refl:down+up" in labels
        double = next(p for p in paths if p.label == "refl:up+down")
        assert double.order == 2
        assert abs(double.amplitude) == pytest.approx(
            0.81 * BAND60.wavelength
            / (4 * math.pi * double.delay * SPEED_OF_LIGHT),
            rel=1e-12,
        )

    def test_site_on_reflector_plane_raises(self):
        scene = bare_scene(tx1=(0.0, 0.0, 0.0), order=1, wall_reflection=0.3)
        with pytest.raises(GeometryError):
            enumerate_paths(scene, LinkId.TX1RX2, BAND60)

    def test_blockage_reduces_los_amplitude(self):
        scene = default_scene()
        base = enumerate_paths(scene, LinkId.TX1RX2, BAND60)
        blocked_scene = scene.with_persons((make_person(scene, "A", 1, 1),))
        blocked = enumerate_paths(blocked_scene, LinkId.TX1RX2, BAND60)
        los0 = next(p for p in base if p.kind is PathKind.LOS)
        los1 = next(p for p in blocked if p.kind is PathKind.LOS)
        assert abs(los1.amplitude) < abs(los0.amplitude)

    def test_reciprocity(self):
        person = person_at(2.5, 0.7, facing=1.0)
        scene = bare_scene(order=1, wall_reflection=0.4, persons=(person,))
        swapped = replace(
            scene,
            sites={
                **scene.sites,
                "tx1": replace(scene.sites["tx1"], position=scene.sites["rx2"].position),
                "rx2": replace(scene.sites["rx2"], position=scene.sites["tx1"].position),
            },
        )
        fwd = enumerate_paths(scene, LinkId.TX1RX2, BAND60)
        rev = enumerate_paths(swapped, LinkId.TX1RX2, BAND60)
        assert len(fwd) == len(rev)
        fwd.sort(key=lambda p: p.delay)
        rev.sort(key=lambda p: p.delay)
        for a, b in zip(fwd, rev):
            assert a.delay == pytest.approx(b.delay, rel=1e-12)
            assert abs(a.amplitude) == pytest.approx(abs(b.amplitude), rel=1e-9)
            assert a.azimuth_departure == pytest.approx(b.azimuth_arrival, abs=1e-12)
            assert a.azimuth_arrival == pytest.approx(b.azimuth_departure, abs=1e-12)


class TestBlockage:
    def path(self):
        return [np.array([0.0, 0.0, 1.0]), np.array([6.0, 0.0, 1.0])]

    def test_far_person_untouched(self):
        factor = blockage_attenuation(self.path(), person_at(3.0, 10.0), 0.005)
        assert factor == 1.0

    def test_knife_edge_at_grazing(self):
        assert knife_edge_loss_db(0.0) == pytest.approx(J_AT_ZERO_DB, abs=1e-12)

    def test_knife_edge_below_threshold(self):
        assert knife_edge_loss_db(-0.78) == 0.0
        assert knife_edge_loss_db(-5.0) == 0.0

    def test_knife_edge_never_negative(self):
        v = np.linspace(-0.78, 0.0, 200)
        assert all(knife_edge_loss_db(x) >= 0.0 for x in v)

    def test_centered_person_exceeds_12db(self):
        factor = blockage_attenuation(self.path(), person_at(3.0, 0.0), 0.005)
        assert -20 * math.log10(factor) > 12.0

    def test_path_above_head_untouched(self):
        high = [np.array([0.0, 0.0, 2.2]), np.array([6.0, 0.0, 2.2])]
        assert blockage_attenuation(high, person_at(3.0, 0.0), 0.005) == 1.0

    def test_foot_outside_segment_untouched(self):
        factor = blockage_attenuation(self.path(), person_at(-1.0, 0.0), 0.005)
        assert factor == 1.0

    def test_orientation_changes_silhouette(self):
        # facing along the path (gamma=90 deg) gives the narrow silhouette,
        # facing across it the wide one; wider blocks more
        narrow = blockage_attenuation(self.path(), person_at(3, 0, facing=0.0), 0.005)
        wide = blockage_attenuation(
            self.path(), person_at(3, 0, facing=math.pi / 2), 0.005
        )
        assert wide < narrow

    @settings(max_examples=60, deadline=None)
    @given(
        offset=st.floats(-0.4, 0.4),
        r1=st.floats(0.05, 0.30),
        growth=st.floats(1.01, 2.0),
        facing=st.floats(0, 2 * math.pi),
    )
    def test_monotone_in_radius(self, offset, r1, growth, facing):
        small = blockage_attenuation(
            self.path(), person_at(3.0, offset, facing=facing, radius=r1), 0.005
        )
        large = blockage_attenuation(
            self.path(),
            person_at(3.0, offset, facing=facing, radius=r1 * growth),
            0.005,
        )
        assert large <= small + 1e-12

    def test_multi_segment_polyline(self):
        # person shadows the second leg of a reflected path only
        vertices = [
            np.array([0.0, 0.0, 1.0]),
            np.array([3.0, 3.0, 1.0]),
            np.array([6.0, 0.0, 1.0]),
        ]
        blocker = person_at(4.5, 1.5)
        assert blockage_attenuation(vertices, blocker, 0.005) < 1.0
        assert blockage_attenuation(vertices, person_at(1.0, -2.0), 0.005) == 1.0


class TestScatter:
    params = ScatterParams()

    def test_facing_bisector_peaks(self):
        sigma = scatter_cross_section(
            facing_azimuth=math.pi / 2,
            incident_azimuth=math.pi / 2 - 0.4,
            scattered_azimuth=math.pi / 2 + 0.4,
            params=self.params,
        )
        assert sigma == pytest.approx(
            self.params.sigma_max + self.params.sigma_floor, rel=1e-12
        )

    def test_perpendicular_facing_floor(self):
        sigma = scatter_cross_section(
            facing_azimuth=0.0,
            incident_azimuth=math.pi / 2 - 0.4,
            scattered_azimuth=math.pi / 2 + 0.4,
            params=self.params,
        )
        # beta = 90 deg: cosine clamps to zero
        assert sigma == pytest.approx(self.params.sigma_floor, abs=1e-12)

    def test_antipodal_directions_floor(self):
        sigma = scatter_cross_section(0.3, 0.0, math.pi, self.params)
        assert sigma == self.params.sigma_floor

    def test_continuity_in_facing(self):
        facings = np.linspace(-math.pi, math.pi, 2000)
        sigmas = [
            scatter_cross_section(f, 0.5, 1.5, self.params) for f in facings
        ]
        assert np.abs(np.diff(sigmas)).max() < 0.01

    def test_inverse_distance_product(self):
        person = person_at(0, 0)
        a1 = human_scatter_amplitude(person, 0.2, 1.2, 2.0, 3.0, 0.005)
        a2 = human_scatter_amplitude(person, 0.2, 1.2, 4.0, 6.0, 0.005)
        assert abs(a1) == pytest.approx(4 * abs(a2), rel=1e-12)


class TestSynthesize:
    def grids(self, band):
        grids = build_all_grids()
        return grids[(band.band, Side.TX)], grids[(band.band, Side.RX)]

    def test_single_path_flat_magnitude(self):
        scene = bare_scene(order=0, noise=None)
        tx_grid, rx_grid = self.grids(BAND60)
        ctf = synthesize_ctf(scene, LinkId.TX1RX2, BAND60, tx_grid, rx_grid)
        mags = np.abs(ctf.values)
        spread = mags.max(axis=0) - mags.min(axis=0)
        assert spread.max() < 1e-12 * mags.max()

    @pytest.mark.parametrize("cfg", [BAND24, BAND60], ids=["band24", "band60"])
    def test_pdp_peak_at_geometric_bin(self, cfg):
        scene = bare_scene(rx2=(5.17, 0.0, 1.0), order=0, noise=None)
        tx_grid, rx_grid = self.grids(cfg)
        ctf = synthesize_ctf(scene, LinkId.TX1RX2, cfg, tx_grid, rx_grid)
        cir = ctf_to_cir(ctf)
        pdp = compute_pdp(cir)
        tau = 5.17 / SPEED_OF_LIGHT
        assert np.argmax(pdp) == round(tau / cir.delay_bin_width)

    def test_single_path_energy(self):
        scene = bare_scene(order=0, noise=None)
        tx_grid, rx_grid = self.grids(BAND60)
        ctf = synthesize_ctf(scene, LinkId.TX1RX2, BAND60, tx_grid, rx_grid)
        (path,) = enumerate_paths(scene, LinkId.TX1RX2, BAND60)
        # reconstruct the beam weights the synthesizer applied
        total = np.sum(np.abs(ctf.values) ** 2)
        per_pair = np.abs(ctf.values[0]) ** 2  # flat across tones
        expected = BAND60.n_tones * per_pair.sum()
        assert total == pytest.approx(expected, rel=1e-10)
        # strongest beam pair cannot exceed the raw path amplitude
        assert np.abs(ctf.values).max() <= abs(path.amplitude) * (1 + 1e-12)

    def test_determinism_and_seed_sensitivity(self):
        scene = bare_scene(order=1, wall_reflection=0.4, noise=-40.0, seed=9)
        tx_grid, rx_grid = self.grids(BAND60)
        a = synthesize_ctf(scene, LinkId.TX1RX2, BAND60, tx_grid, rx_grid)
        b = synthesize_ctf(scene, LinkId.TX1RX2, BAND60, tx_grid, rx_grid)
        assert a.values.tobytes() == b.values.tobytes()

        reseeded = scene.with_seed(10)
        c = synthesize_ctf(reseeded, LinkId.TX1RX2, BAND60, tx_grid, rx_grid)
        assert a.values.tobytes() != c.values.tobytes()
        # identical path sets: the difference is the noise realization only
        pa = enumerate_paths(scene, LinkId.TX1RX2, BAND60)
        pc = enumerate_paths(reseeded, LinkId.TX1RX2, BAND60)
        assert [p.delay for p in pa] == [p.delay for p in pc]
        assert [p.amplitude for p in pa] == [p.amplitude for p in pc]

    def test_noise_floor_scale(self):
        scene = bare_scene(order=0, noise=-40.0)
        tx_grid, rx_grid = self.grids(BAND60)
        noisy = synthesize_ctf(scene, LinkId.TX1RX2, BAND60, tx_grid, rx_grid)
        clean = synthesize_ctf(
            replace(scene, noise_floor_db=None), LinkId.TX1RX2, BAND60, tx_grid, rx_grid
        )
        noise = noisy.values - clean.values
        (path,) = enumerate_paths(scene, LinkId.TX1RX2, BAND60)
        sigma = 10 ** (-40 / 20) * abs(path.amplitude)
        measured = np.sqrt(np.mean(np.abs(noise) ** 2))
        assert measured == pytest.approx(sigma, rel=0.05)

    def test_links_differ(self):
        scene = default_scene()
        tx_grid, rx_grid = self.grids(BAND60)
        a = synthesize_ctf(scene, LinkId.TX1RX2, BAND60, tx_grid, rx_grid)
        b = synthesize_ctf(scene, LinkId.TX2RX1, BAND60, tx_grid, rx_grid)
        assert not np.allclose(a.values, b.values)
