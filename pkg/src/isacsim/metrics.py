"""Delay- and angular-domain channel characterization.

All spectra are plain power sums of the squared impulse-response magnitudes:

- PDP: power vs delay, summed over all (Rx beam, Tx beam) pairs;
- ADPS: power vs (delay, one-side beam), summed over the other side;
- PAP: power vs one-side beam, summed over delay and the other side;
- RMS delay spread: second central moment of the thresholded PDP;
- ASD / ASA: power-weighted circular spread of the Tx / Rx PAP over the
  beam steering angles, sqrt(-2 ln |resultant|).

Reductions use numpy sums along the documented axes; marginalization
identities (sum of ADPS over beams = PDP, over delay = PAP) hold to within
floating-point reassociation of the same addends.

The noise threshold (default 30 dB below the PDP peak) applies to the RMS
delay spread only; angular profiles and spreads are computed from the raw
power sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Band, CirTensor, LinkId
from .errors import ConfigMismatch, DomainError, EmptyProfile
from .sounder import BeamGrid, Side

DEFAULT_THRESHOLD_DB = 30.0


def _power(cir: CirTensor) -> np.ndarray:
    return np.abs(cir.values) ** 2


def compute_pdp(cir: CirTensor) -> np.ndarray:
    """Power delay profile: sum of |h|^2 over all beam pairs, per delay bin."""
    return _power(cir).sum(axis=(1, 2))


def compute_adps(cir: CirTensor, side: Side) -> np.ndarray:
    """Angular-delay power spectrum for one side.

    Tx side: [delay, tx beam], summed over Rx beams.
    Rx side: [delay, rx beam], summed over Tx beams.
    """
    power = _power(cir)
    if side is Side.TX:
        return power.sum(axis=1)
    return power.sum(axis=2)


def compute_pap(cir: CirTensor, side: Side) -> np.ndarray:
    """Power angular profile: ADPS summed over delay."""
    return compute_adps(cir, side).sum(axis=0)


def compute_rms_ds(pdp, delay_bin_width: float, threshold_db: float) -> float:
    """RMS delay spread of a thresholded power delay profile.

    Bins at or below peak * 10^(-threshold_db/10) are discarded; a
    threshold of 0 dB therefore discards everything and raises
    EmptyProfile. Moments are taken about the mean delay (two-pass), which
    is algebraically the sqrt of E[tau^2] - E[tau]^2 but stable under large
    delay offsets.
    """
    pdp = np.asarray(pdp, dtype=float)
    if pdp.ndim != 1:
        raise DomainError("pdp must be one-dimensional")
    if np.any(pdp < 0.0) or not np.all(np.isfinite(pdp)):
        raise DomainError("pdp must be finite and nonnegative")
    if delay_bin_width <= 0.0:
        raise DomainError("delay_bin_width must be positive")

    peak = pdp.max(initial=0.0)
    cut = peak * 10.0 ** (-threshold_db / 10.0)
    kept = np.where(pdp > cut, pdp, 0.0)
    total = kept.sum()
    if total <= 0.0:
        raise EmptyProfile(
            f"no PDP bins survive a {threshold_db} dB cut below the peak"
        )
    delays = np.arange(len(pdp)) * delay_bin_width
    mean = (delays * kept).sum() / total
    var = (((delays - mean) ** 2) * kept).sum() / total
    return float(np.sqrt(max(var, 0.0)))


def compute_angular_spread(pap, angles) -> float:
    """Power-weighted circular spread over the beam angles.

    sigma = sqrt(-2 ln |sum_k PAP_k exp(j angle_k)| / sum_k PAP_k). Exactly
    zero when all power sits on a single angle (unit resultant, handled
    without trigonometric rounding); invariant under adding a constant to
    all angles and under positive scaling of the PAP.
    """
    pap = np.asarray(pap, dtype=float)
    angles = np.asarray(angles, dtype=float)
    if pap.shape != angles.shape or pap.ndim != 1:
        raise ConfigMismatch(
            f"pap shape {pap.shape} does not match angles shape {angles.shape}"
        )
    if np.any(pap < 0.0) or not np.all(np.isfinite(pap)):
        raise DomainError("pap must be finite and nonnegative")
    total = pap.sum()
    if total <= 0.0:
        raise EmptyProfile("power angular profile has zero total power")
    if np.count_nonzero(pap) == 1:
        return 0.0
    c = (pap * np.cos(angles)).sum()
    s = (pap * np.sin(angles)).sum()
    resultant = min(float(np.hypot(c, s)) / total, 1.0)
    return float(np.sqrt(-2.0 * np.log(resultant)))


@dataclass(eq=False)
class MetricSet:
    """All characterization outputs for one (link, band)."""

    band: Band
    link: LinkId
    pdp: np.ndarray = field(repr=False)
    rms_ds: float
    adps_tx: np.ndarray = field(repr=False)
    adps_rx: np.ndarray = field(repr=False)
    pap_tx: np.ndarray = field(repr=False)
    pap_rx: np.ndarray = field(repr=False)
    asd: float
    asa: float
    threshold_db: float
    delay_bin_width: float


def compute_metric_set(
    cir: CirTensor,
    tx_grid: BeamGrid,
    rx_grid: BeamGrid,
    threshold_db: float = DEFAULT_THRESHOLD_DB,
) -> MetricSet:
    """Full delay/angular characterization of one impulse-response tensor."""
    if tx_grid.band is not cir.band or rx_grid.band is not cir.band:
        raise ConfigMismatch("beam grids and tensor belong to different bands")
    n_tau, n_rx, n_tx = cir.values.shape
    if n_rx != rx_grid.n_beams or n_tx != tx_grid.n_beams:
        raise ConfigMismatch(
            f"tensor beams ({n_rx} rx, {n_tx} tx) do not match grids "
            f"({rx_grid.n_beams} rx, {tx_grid.n_beams} tx)"
        )
    pdp = compute_pdp(cir)
    adps_tx = compute_adps(cir, Side.TX)
    adps_rx = compute_adps(cir, Side.RX)
    pap_tx = adps_tx.sum(axis=0)
    pap_rx = adps_rx.sum(axis=0)
    return MetricSet(
        band=cir.band,
        link=cir.link,
        pdp=pdp,
        rms_ds=compute_rms_ds(pdp, cir.delay_bin_width, threshold_db),
        adps_tx=adps_tx,
        adps_rx=adps_rx,
        pap_tx=pap_tx,
        pap_rx=pap_rx,
        asd=compute_angular_spread(pap_tx, tx_grid.steering_angles),
        asa=compute_angular_spread(pap_rx, rx_grid.steering_angles),
        threshold_db=threshold_db,
        delay_bin_width=cir.delay_bin_width,
    )


@dataclass(eq=False)
class DeltaMetrics:
    """Differences between a with-person and a without-person MetricSet.

    Scalar deltas are (with - without); the ADPS deltas are epsilon-floored
    dB ratios (positive = power increase due to the person), bounded so
    heatmaps stay plottable. Antisymmetric under swapping the inputs.
    """

    band: Band
    link: LinkId
    d_rms_ds: float
    d_asd: float
    d_asa: float
    adps_tx_delta_db: np.ndarray = field(repr=False)
    adps_rx_delta_db: np.ndarray = field(repr=False)
    delay_bin_width: float = 0.0


_DELTA_EPS_SCALE = 1e-12


def _adps_delta_db(with_a: np.ndarray, without_a: np.ndarray) -> np.ndarray:
    gmax = max(with_a.max(initial=0.0), without_a.max(initial=0.0))
    if gmax == 0.0:
        return np.zeros_like(with_a)
    eps = _DELTA_EPS_SCALE * gmax
    return 10.0 * np.log10((with_a + eps) / (without_a + eps))


def delta_metrics(with_person: MetricSet, without: MetricSet) -> DeltaMetrics:
    if with_person.band is not without.band or with_person.link is not without.link:
        raise ConfigMismatch("delta inputs belong to different (link, band)")
    if with_person.threshold_db != without.threshold_db:
        raise ConfigMismatch("delta inputs used different noise thresholds")
    for name in ("pdp", "adps_tx", "adps_rx"):
        if getattr(with_person, name).shape != getattr(without, name).shape:
            raise ConfigMismatch(f"delta inputs have mismatched {name} shapes")
    return DeltaMetrics(
        band=with_person.band,
        link=with_person.link,
        d_rms_ds=with_person.rms_ds - without.rms_ds,
        d_asd=with_person.asd - without.asd,
        d_asa=with_person.asa - without.asa,
        adps_tx_delta_db=_adps_delta_db(with_person.adps_tx, without.adps_tx),
        adps_rx_delta_db=_adps_delta_db(with_person.adps_rx, without.adps_rx),
        delay_bin_width=with_person.delay_bin_width,
    )
