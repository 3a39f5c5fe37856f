"""Sounder front-end emulation: tone grid, beam grids, patterns, TDM schedule.

The sounder scans a 90 degree azimuth sector at each link end with a fixed
set of steered beams per band (5x5 at 24 GHz, 11 Tx x 12 Rx at 60 GHz) and
interleaves one 24 GHz and one 60 GHz beam-pair measurement per TDM block.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from .core import Band, BandConfig
from .errors import ConfigMismatch
from .geometry import wrap_angle


class Side(enum.Enum):
    TX = "tx"
    RX = "rx"


# Azimuth beam counts per (band, side); the 60 GHz Rx grid drives the
# 11 x 12 = 132-block schedule.
BEAM_COUNTS = {
    (Band.BAND24, Side.TX): 5,
    (Band.BAND24, Side.RX): 5,
    (Band.BAND60, Side.TX): 11,
    (Band.BAND60, Side.RX): 12,
}

# Half-power beamwidths of the broadside patterns, radians.
HPBW_AZIMUTH = {
    Band.BAND24: math.radians(15.0),
    Band.BAND60: math.radians(6.0),
}
HPBW_ELEVATION = {
    (Band.BAND24, Side.TX): math.radians(45.0),
    (Band.BAND24, Side.RX): math.radians(45.0),
    (Band.BAND60, Side.TX): math.radians(45.0),
    (Band.BAND60, Side.RX): math.radians(18.0),
}

SCAN_SPAN = math.radians(90.0)  # end-to-end azimuth coverage per link end
DEFAULT_SIDELOBE_FLOOR_DB = -25.0


@dataclass(frozen=True)
class MultitoneWaveform:
    """Uniform multitone grid of one band, frequencies relative to center.

    The grid is symmetric about the band center (no DC tone: for an even
    tone count the tones sit at half-integer multiples of the spacing) and
    the spacing is identical across both bands.
    """

    band: Band
    tone_frequencies: np.ndarray  # Hz relative to band center
    n_samples: int
    sample_rate: float

    @property
    def tone_spacing(self) -> float:
        return float(self.tone_frequencies[1] - self.tone_frequencies[0])


def build_multitone(config: BandConfig) -> MultitoneWaveform:
    k = np.arange(config.n_tones)
    rel = (k - (config.n_tones - 1) / 2.0) * config.tone_spacing
    return MultitoneWaveform(
        band=config.band,
        tone_frequencies=rel,
        n_samples=config.n_waveform_samples,
        sample_rate=config.sample_rate,
    )


def absolute_tone_frequencies(config: BandConfig) -> np.ndarray:
    """Absolute tone frequencies in Hz for one band."""
    return config.center_frequency + build_multitone(config).tone_frequencies


@dataclass(frozen=True)
class BeamPattern:
    """Gaussian-mainlobe beam: quadratic-in-dB rolloff with a hard floor.

    gain_db(theta) = -3 * (2 * wrap(theta - boresight) / hpbw)^2, clamped
    from below at sidelobe_floor_db, so the half-power points land exactly
    at boresight +/- hpbw/2. A floor of -inf models an ideal pattern whose
    response underflows to zero far off boresight.
    """

    hpbw: float  # radians
    boresight: float  # radians
    sidelobe_floor_db: float = DEFAULT_SIDELOBE_FLOOR_DB


def beam_gain(pattern: BeamPattern, angle):
    """Linear amplitude gain of the pattern at the given azimuth(s)."""
    delta = wrap_angle(np.asarray(angle, dtype=float) - pattern.boresight)
    gain_db = -3.0 * (2.0 * delta / pattern.hpbw) ** 2
    amp = 10.0 ** (gain_db / 20.0)
    floor = 10.0 ** (pattern.sidelobe_floor_db / 20.0)  # 0.0 for -inf
    out = np.maximum(amp, floor)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BeamGrid:
    """Azimuth steering grid of one side of one band.

    Steering angles are relative to the array broadside (the site
    boresight); the grid spans exactly 90 degrees end to end.
    """

    side: Side
    band: Band
    steering_angles: np.ndarray  # radians, monotone increasing
    hpbw_azimuth: float
    hpbw_elevation: float
    sidelobe_floor_db: float = DEFAULT_SIDELOBE_FLOOR_DB

    @property
    def n_beams(self) -> int:
        return len(self.steering_angles)

    def pattern(self, beam_index: int) -> BeamPattern:
        return BeamPattern(
            hpbw=self.hpbw_azimuth,
            boresight=float(self.steering_angles[beam_index]),
            sidelobe_floor_db=self.sidelobe_floor_db,
        )


def build_beam_grid(
    config: BandConfig,
    side: Side,
    sidelobe_floor_db: float = DEFAULT_SIDELOBE_FLOOR_DB,
) -> BeamGrid:
    """Uniform steering grid centered on broadside, endpoints at +/-45 deg."""
    n = BEAM_COUNTS[(config.band, side)]
    angles = np.linspace(-SCAN_SPAN / 2.0, SCAN_SPAN / 2.0, n)
    return BeamGrid(
        side=side,
        band=config.band,
        steering_angles=angles,
        hpbw_azimuth=HPBW_AZIMUTH[config.band],
        hpbw_elevation=HPBW_ELEVATION[(config.band, side)],
        sidelobe_floor_db=sidelobe_floor_db,
    )


def build_all_grids(
    sidelobe_floor_db: float = DEFAULT_SIDELOBE_FLOOR_DB,
) -> dict[tuple[Band, Side], BeamGrid]:
    from .core import BAND_CONFIGS

    return {
        (band, side): build_beam_grid(BAND_CONFIGS[band], side, sidelobe_floor_db)
        for band in Band
        for side in Side
    }


@dataclass(frozen=True)
class ScheduleEntry:
    block: int
    band: Band
    tx_beam: int
    rx_beam: int
    active: bool


@dataclass(frozen=True)
class ScanSchedule:
    """Dual-band TDM scan: one 24 GHz and one 60 GHz slot per block."""

    entries: tuple[ScheduleEntry, ...]
    n_blocks: int

    def band_entries(self, band: Band, active_only: bool = False):
        return [
            e
            for e in self.entries
            if e.band is band and (e.active or not active_only)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("block,band,tx_beam,rx_beam,active\n")
        for e in self.entries:
            buf.write(
                f"{e.block},{e.band.value},{e.tx_beam},{e.rx_beam},{int(e.active)}\n"
            )
        return buf.getvalue()


def build_scan_schedule(grids: dict[tuple[Band, Side], BeamGrid]) -> ScanSchedule:
    """132-block schedule: tx-major over the 60 GHz 11x12 grid.

    The 25 24-GHz beam pairs (tx-major) ride in the 24 GHz slot of the
    first 25 blocks; the remaining blocks carry an inactive 24 GHz slot.
    """
    n_tx60 = grids[(Band.BAND60, Side.TX)].n_beams
    n_rx60 = grids[(Band.BAND60, Side.RX)].n_beams
    n_tx24 = grids[(Band.BAND24, Side.TX)].n_beams
    n_rx24 = grids[(Band.BAND24, Side.RX)].n_beams
    n_blocks = n_tx60 * n_rx60
    n_pairs24 = n_tx24 * n_rx24
    if n_pairs24 > n_blocks:
        raise ConfigMismatch("24 GHz grid has more pairs than the block count")

    entries = []
    for block in range(n_blocks):
        entries.append(
            ScheduleEntry(block, Band.BAND60, block // n_rx60, block % n_rx60, True)
        )
        if block < n_pairs24:
            entries.append(
                ScheduleEntry(
                    block, Band.BAND24, block // n_rx24, block % n_rx24, True
                )
            )
        else:
            entries.append(ScheduleEntry(block, Band.BAND24, 0, 0, False))
    return ScanSchedule(entries=tuple(entries), n_blocks=n_blocks)
