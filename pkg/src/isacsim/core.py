"""Channel tensor types and the frequency <-> delay transform.

A channel measurement for one link and one band is a complex tensor over
(frequency tone, Rx beam, Tx beam). Its delay-domain image over
(delay bin, Rx beam, Tx beam) is obtained by an inverse DFT along the
frequency axis.

DFT convention (fixed for the whole package): the forward DFT carries no
normalization and the inverse carries 1/N. With a rectangular window the
two transforms are exact inverses and Parseval reads

    sum |h|^2 = sum |H|^2 / N_f.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigMismatch, DomainError
from .geometry import SPEED_OF_LIGHT


class Band(enum.Enum):
    """The two sounding bands."""

    BAND24 = "band24"
    BAND60 = "band60"

    @property
    def code(self) -> int:
        """Integer code used in binary tensor headers."""
        return {Band.BAND24: 24, Band.BAND60: 60}[self]


class LinkId(enum.Enum):
    """The four distributed links of the 2x2 topology."""

    TX1RX1 = "tx1rx1"
    TX1RX2 = "tx1rx2"
    TX2RX1 = "tx2rx1"
    TX2RX2 = "tx2rx2"

    @property
    def tx_site(self) -> str:
        return self.value[:3]

    @property
    def rx_site(self) -> str:
        return self.value[3:]

    @property
    def code(self) -> int:
        """Integer code used in binary tensor headers (tx digit * 10 + rx)."""
        return int(self.value[2]) * 10 + int(self.value[5])


ALL_LINKS = (LinkId.TX1RX1, LinkId.TX1RX2, LinkId.TX2RX1, LinkId.TX2RX2)


class Window(enum.Enum):
    """Frequency-domain window applied before the inverse DFT."""

    RECTANGULAR = "rectangular"
    HANN = "hann"


@dataclass(frozen=True)
class BandConfig:
    """Per-band sounding parameters.

    The tone grid divides the bandwidth into n_tones uniform steps; the
    reciprocal of the tone spacing is the maximum measurable delay and the
    reciprocal of the bandwidth is the delay bin width.
    """

    band: Band
    center_frequency: float  # Hz
    bandwidth: float  # Hz
    n_tones: int
    n_waveform_samples: int = 2048
    sample_rate: float = 800e6  # samples/s

    def __post_init__(self):
        if self.bandwidth <= 0 or self.n_tones <= 0:
            raise DomainError("bandwidth and n_tones must be positive")

    @property
    def tone_spacing(self) -> float:
        return self.bandwidth / self.n_tones

    @property
    def max_delay(self) -> float:
        return 1.0 / self.tone_spacing

    @property
    def delay_bin_width(self) -> float:
        return 1.0 / self.bandwidth

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.center_frequency


BAND24 = BandConfig(Band.BAND24, center_frequency=24e9, bandwidth=200e6, n_tones=512)
BAND60 = BandConfig(Band.BAND60, center_frequency=60e9, bandwidth=400e6, n_tones=1024)

BAND_CONFIGS = {Band.BAND24: BAND24, Band.BAND60: BAND60}


def _as_tensor(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.complex128)
    if v.ndim != 3:
        raise ConfigMismatch(f"tensor must be 3-dimensional, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise DomainError("tensor contains non-finite entries")
    return v


@dataclass
class CtfTensor:
    """Channel transfer function over (tone, Rx beam, Tx beam) for one link."""

    band: Band
    link: LinkId
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = _as_tensor(self.values)

    @property
    def n_tones(self) -> int:
        return self.values.shape[0]

    @property
    def n_rx_beams(self) -> int:
        return self.values.shape[1]

    @property
    def n_tx_beams(self) -> int:
        return self.values.shape[2]

    def validate_against(self, config: BandConfig, n_rx_beams: int, n_tx_beams: int):
        """Raise ConfigMismatch unless dims match the band config and grids."""
        if self.band is not config.band:
            raise ConfigMismatch(f"tensor band {self.band} != config band {config.band}")
        expected = (config.n_tones, n_rx_beams, n_tx_beams)
        if self.values.shape != expected:
            raise ConfigMismatch(
                f"tensor shape {self.values.shape} does not match expected {expected}"
            )


@dataclass
class CirTensor:
    """Channel impulse response over (delay bin, Rx beam, Tx beam)."""

    band: Band
    link: LinkId
    values: np.ndarray = field(repr=False)
    delay_bin_width: float = 0.0  # seconds

    def __post_init__(self):
        self.values = _as_tensor(self.values)
        if self.delay_bin_width <= 0.0:
            raise DomainError("delay_bin_width must be positive")

    @property
    def n_delay_bins(self) -> int:
        return self.values.shape[0]

    @property
    def delays(self) -> np.ndarray:
        """Delay axis in seconds, n * delay_bin_width."""
        return np.arange(self.n_delay_bins) * self.delay_bin_width


def window_values(window: Window, n: int) -> np.ndarray:
    """Window samples for an n-point frequency axis.

    The Hann variant is the symmetric numpy window; it trades delay
    resolution for suppressed sidelobe leakage when path delays fall
    off the bin grid.
    """
    if window is Window.RECTANGULAR:
        return np.ones(n)
    if window is Window.HANN:
        return np.hanning(n)
    raise DomainError(f"unknown window {window!r}")


def ctf_to_cir(ctf: CtfTensor, window: Window = Window.RECTANGULAR) -> CirTensor:
    """Inverse-DFT a transfer function tensor into the delay domain.

    The transform runs independently per (Rx beam, Tx beam) column along the
    frequency axis, after multiplying the window. The delay bin width is
    1 / (n_tones * tone spacing of the band), which equals 1/bandwidth for
    full-size tensors.
    """
    config = BAND_CONFIGS[ctf.band]
    w = window_values(window, ctf.n_tones)
    shaped = ctf.values * w[:, None, None]
    cir_values = np.fft.ifft(shaped, axis=0)
    bin_width = 1.0 / (ctf.n_tones * config.tone_spacing)
    return CirTensor(ctf.band, ctf.link, cir_values, delay_bin_width=bin_width)


def cir_to_ctf(cir: CirTensor) -> CtfTensor:
    """Forward-DFT an impulse response tensor back to the frequency domain.

    Exact inverse of :func:`ctf_to_cir` with the rectangular window.
    """
    ctf_values = np.fft.fft(cir.values, axis=0)
    return CtfTensor(cir.band, cir.link, ctf_values)
