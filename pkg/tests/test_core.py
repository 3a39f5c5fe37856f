"""Tensor transforms, Parseval, and Fresnel geometry."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isacsim import (
    BAND24,
    BAND60,
    Band,
    CirTensor,
    ConfigMismatch,
    CtfTensor,
    DomainError,
    LinkId,
    Window,
    cir_to_ctf,
    ctf_to_cir,
    first_fresnel_radius,
    point_in_first_fresnel,
)
from isacsim.sounder import build_multitone

LINK = LinkId.TX1RX2


def random_ctf(rng, band=BAND24, n_f=16, n_rx=2, n_tx=2):
    values = rng.standard_normal((n_f, n_rx, n_tx)) + 1j * rng.standard_normal(
        (n_f, n_rx, n_tx)
    )
    return CtfTensor(band.band, LINK, values)


def naive_forward_dft(values):
    """Independent O(N^2) forward DFT along axis 0 (oracle)."""
    n = values.shape[0]
    out = np.zeros_like(values, dtype=complex)
    for k in range(n):
        acc = np.zeros(values.shape[1:], dtype=complex)
        for m in range(n):
            acc = acc + values[m] * np.exp(-2j * np.pi * k * m / n)
        out[k] = acc
    return out


class TestBandConfigs:
    def test_tone_spacing_identical_across_bands(self):
        assert BAND24.tone_spacing == pytest.approx(390625.0, abs=0)
        assert BAND60.tone_spacing == pytest.approx(390625.0, abs=0)

    def test_max_measurable_delay(self):
        assert BAND24.max_delay == pytest.approx(2.56e-6, rel=1e-15)
        assert BAND60.max_delay == pytest.approx(2.56e-6, rel=1e-15)

    def test_delay_resolution(self):
        assert BAND24.delay_bin_width == pytest.approx(5e-9, rel=1e-15)
        assert BAND60.delay_bin_width == pytest.approx(2.5e-9, rel=1e-15)

    def test_waveform_constants(self):
        for cfg in (BAND24, BAND60):
            assert cfg.n_waveform_samples == 2048
            assert cfg.sample_rate == 800e6


class TestCtfToCir:
    def test_flat_spectrum_is_delta_at_zero(self):
        ctf = CtfTensor(Band.BAND24, LINK, np.ones((32, 1, 1)))
        cir = ctf_to_cir(ctf, Window.RECTANGULAR)
        mags = np.abs(cir.values[:, 0, 0])
        assert mags[0] == pytest.approx(1.0, abs=1e-12)
        assert mags[1:].max() < 1e-12

    def test_pure_delay_lands_in_its_bin(self):
        # Tone model of the band: a delay of 10 bins shows up as a single
        # peak at bin 10 (shift theorem; the symmetric tone offsets only
        # contribute a constant phase).
        n_f = 64
        spacing = BAND24.tone_spacing
        bin_width = 1.0 / (n_f * spacing)
        rel = (np.arange(n_f) - (n_f - 1) / 2.0) * spacing
        tau0 = 10 * bin_width
        h_freq = np.exp(-2j * np.pi * rel * tau0)
        ctf = CtfTensor(Band.BAND24, LINK, h_freq[:, None, None])
        cir = ctf_to_cir(ctf)
        mags = np.abs(cir.values[:, 0, 0])
        assert np.argmax(mags) == 10
        assert mags[10] == pytest.approx(1.0, abs=1e-10)
        off = np.delete(mags, 10)
        assert off.max() < 1e-10
        assert cir.delay_bin_width == pytest.approx(bin_width, rel=1e-15)

    def test_full_size_delay_bin_width(self):
        rng = np.random.default_rng(7)
        ctf = random_ctf(rng, BAND60, n_f=BAND60.n_tones, n_rx=2, n_tx=1)
        assert ctf_to_cir(ctf).delay_bin_width == pytest.approx(
            BAND60.delay_bin_width, rel=1e-15
        )

    def test_forward_matches_naive_dft_oracle(self):
        rng = np.random.default_rng(42)
        ctf = random_ctf(rng, n_f=16, n_rx=2, n_tx=2)
        cir = ctf_to_cir(ctf)
        expected = naive_forward_dft(cir.values)
        np.testing.assert_allclose(cir_to_ctf(cir).values, expected, rtol=0, atol=1e-10)

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        ctf = random_ctf(rng, n_f=16, n_rx=2, n_tx=2)
        back = cir_to_ctf(ctf_to_cir(ctf))
        err = np.abs(back.values - ctf.values).max() / np.abs(ctf.values).max()
        assert err < 1e-10

    def test_delta_round_trip_flat(self):
        values = np.zeros((8, 1, 1), dtype=complex)
        values[0, 0, 0] = 1.0
        cir = CirTensor(Band.BAND24, LINK, values, delay_bin_width=5e-9)
        ctf = cir_to_ctf(cir)
        np.testing.assert_allclose(ctf.values, np.ones((8, 1, 1)), atol=1e-12)

    def test_zero_tensor_round_trip(self):
        cir = CirTensor(Band.BAND24, LINK, np.zeros((8, 2, 2)), delay_bin_width=5e-9)
        assert np.all(cir_to_ctf(cir).values == 0)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**31), n_f=st.sampled_from([4, 8, 16, 32]))
    def test_parseval(self, seed, n_f):
        rng = np.random.default_rng(seed)
        ctf = random_ctf(rng, n_f=n_f, n_rx=3, n_tx=2)
        cir = ctf_to_cir(ctf)
        lhs = np.sum(np.abs(cir.values) ** 2)
        rhs = np.sum(np.abs(ctf.values) ** 2) / n_f
        assert abs(lhs - rhs) / rhs < 1e-10

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_linearity(self, seed):
        rng = np.random.default_rng(seed)
        a = random_ctf(rng, n_f=16)
        b = random_ctf(rng, n_f=16)
        alpha, beta = 1.7 - 0.3j, -0.25 + 2.0j
        combo = CtfTensor(a.band, LINK, alpha * a.values + beta * b.values)
        lhs = ctf_to_cir(combo).values
        rhs = alpha * ctf_to_cir(a).values + beta * ctf_to_cir(b).values
        np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-10)

    def test_hann_suppresses_leakage(self):
        # Off-grid delay: with a Hann window the far sidelobes drop by
        # orders of magnitude relative to the rectangular window.
        n_f = 128
        rel = build_multitone(BAND24).tone_frequencies[:n_f]
        spacing = BAND24.tone_spacing
        tau0 = 20.37 / (n_f * spacing)
        h_freq = np.exp(-2j * np.pi * rel * tau0)[:, None, None]
        ctf = CtfTensor(Band.BAND24, LINK, h_freq)
        rect = np.abs(ctf_to_cir(ctf, Window.RECTANGULAR).values[:, 0, 0])
        hann = np.abs(ctf_to_cir(ctf, Window.HANN).values[:, 0, 0])
        far = np.r_[0:10, 40:90]
        assert hann[far].max() < 0.01 * rect[far].max()
        assert abs(int(np.argmax(hann)) - 20) <= 1


class TestValidation:
    def test_dimension_mismatch(self):
        ctf = CtfTensor(Band.BAND24, LINK, np.ones((16, 2, 2)))
        with pytest.raises(ConfigMismatch):
            ctf.validate_against(BAND24, 5, 5)

    def test_band_mismatch(self):
        ctf = CtfTensor(Band.BAND60, LINK, np.ones((BAND60.n_tones, 12, 11)))
        with pytest.raises(ConfigMismatch):
            ctf.validate_against(BAND24, 12, 11)

    def test_full_size_validates(self):
        ctf = CtfTensor(Band.BAND60, LINK, np.ones((BAND60.n_tones, 12, 11)))
        ctf.validate_against(BAND60, 12, 11)

    def test_non_finite_rejected(self):
        values = np.ones((4, 1, 1), dtype=complex)
        values[2] = np.nan
        with pytest.raises(DomainError):
            CtfTensor(Band.BAND24, LINK, values)

    def test_wrong_rank_rejected(self):
        with pytest.raises(ConfigMismatch):
            CtfTensor(Band.BAND24, LINK, np.ones((4, 4)))


class TestFresnel:
    def test_radius_near_60ghz(self):
        # Frozen against an independent 40-digit evaluation.
        r = first_fresnel_radius(2.65, 2.65, 0.005)
        assert r == pytest.approx(0.08139410298049853, abs=1e-15)

    def test_radius_near_24ghz(self):
        r = first_fresnel_radius(3.0, 3.0, 0.0125)
        assert r == pytest.approx(0.13693063937629153, abs=1e-15)

    def test_small_d1_limit(self):
        assert first_fresnel_radius(1e-12, 5.0, 0.005) < 1e-6

    def test_nonpositive_rejected(self):
        with pytest.raises(DomainError):
            first_fresnel_radius(0.0, 1.0, 0.005)
        with pytest.raises(DomainError):
            first_fresnel_radius(1.0, 1.0, -0.005)

    @settings(max_examples=50, deadline=None)
    @given(
        d1=st.floats(0.01, 100),
        d2=st.floats(0.01, 100),
        lam=st.floats(1e-4, 1.0),
        scale=st.floats(1.01, 10.0),
    )
    def test_symmetry_and_wavelength_monotonicity(self, d1, d2, lam, scale):
        assert first_fresnel_radius(d1, d2, lam) == pytest.approx(
            first_fresnel_radius(d2, d1, lam), rel=1e-12
        )
        assert first_fresnel_radius(d1, d2, lam * scale) > first_fresnel_radius(
            d1, d2, lam
        )

    def test_midpoint_inside(self):
        tx, rx = [0, 0, 1], [5, 0, 1]
        assert point_in_first_fresnel(tx, rx, [2.5, 0, 1], 0.005)

    def test_one_meter_offset_outside(self):
        # Radius at the midpoint of a 5 m 60 GHz link is about 8 cm.
        tx, rx = [0, 0, 1], [5, 0, 1]
        assert not point_in_first_fresnel(tx, rx, [2.5, 1.0, 1], 0.005)

    def test_point_behind_endpoint_outside(self):
        tx, rx = [0, 0, 1], [5, 0, 1]
        assert not point_in_first_fresnel(tx, rx, [-0.5, 0.0, 1], 0.005)
        # Endpoints themselves are excluded (strict interior).
        assert not point_in_first_fresnel(tx, rx, [0.0, 0.0, 1], 0.005)
