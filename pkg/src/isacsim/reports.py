"""CSV / JSON exports of metric sets, deltas and campaign aggregates.

All writers format floats with Python's shortest round-trip repr, so
re-running a deterministic pipeline reproduces byte-identical artifacts.
ADPS matrices are dense CSV (rows = delay bins, columns = beams); delta
heatmaps are truncated where the propagation distance c * tau exceeds
30 meters.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geometry import SPEED_OF_LIGHT
from .metrics import DeltaMetrics, MetricSet
from .sounder import BeamGrid

HEATMAP_MAX_DISTANCE_M = 30.0


def _fmt(x) -> str:
    return repr(float(x))


def _write_rows(path: Path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(_fmt(v) if not isinstance(v, str) else v for v in row)
                 for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _write_matrix(path: Path, matrix: np.ndarray) -> None:
    lines = [",".join(_fmt(v) for v in row) for row in np.atleast_2d(matrix)]
    path.write_text("\n".join(lines) + "\n")


def metric_file_stem(ms: MetricSet) -> str:
    return f"{ms.link.value}_{ms.band.value}"


def write_metric_exports(
    out_dir, ms: MetricSet, tx_grid: BeamGrid, rx_grid: BeamGrid
) -> list[Path]:
    """Write the per-(link, band) CSV artifacts; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = metric_file_stem(ms)
    written = []

    path = out / f"{stem}_pdp.csv"
    _write_rows(
        path,
        "bin,delay_s,power",
        ((str(i), i * ms.delay_bin_width, p) for i, p in enumerate(ms.pdp)),
    )
    written.append(path)

    for side, pap, grid in (
        ("tx", ms.pap_tx, tx_grid),
        ("rx", ms.pap_rx, rx_grid),
    ):
        path = out / f"{stem}_pap_{side}.csv"
        _write_rows(
            path,
            "beam,steering_angle_rad,power",
            (
                (str(i), float(grid.steering_angles[i]), p)
                for i, p in enumerate(pap)
            ),
        )
        written.append(path)

    for side, adps in (("tx", ms.adps_tx), ("rx", ms.adps_rx)):
        path = out / f"{stem}_adps_{side}.csv"
        _write_matrix(path, adps)
        written.append(path)
    return written


def summary_record(ms: MetricSet) -> dict:
    return {
        "link": ms.link.value,
        "band": ms.band.value,
        "rms_ds_s": float(ms.rms_ds),
        "asd_rad": float(ms.asd),
        "asa_rad": float(ms.asa),
        "threshold_db": float(ms.threshold_db),
    }


def write_summary_json(out_dir, records: list[dict]) -> Path:
    path = Path(out_dir) / "summary.json"
    ordered = sorted(records, key=lambda r: (r["link"], r["band"]))
    path.write_text(json.dumps(ordered, indent=2, sort_keys=True) + "\n")
    return path


def write_delta_exports(out_dir, deltas: list[DeltaMetrics]) -> list[Path]:
    """Delta summary CSV plus truncated ADPS-delta heatmap matrices."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "delta_summary.csv"
    ordered = sorted(deltas, key=lambda d: (d.link.value, d.band.value))
    _write_rows(
        path,
        "link,band,d_rms_ds_s,d_asd_rad,d_asa_rad",
        (
            (d.link.value, d.band.value, d.d_rms_ds, d.d_asd, d.d_asa)
            for d in ordered
        ),
    )
    written.append(path)

    for d in ordered:
        max_bins = int(
            np.floor(HEATMAP_MAX_DISTANCE_M / (SPEED_OF_LIGHT * d.delay_bin_width))
        ) + 1
        for side, matrix in (
            ("tx", d.adps_tx_delta_db),
            ("rx", d.adps_rx_delta_db),
        ):
            path = out / f"{d.link.value}_{d.band.value}_adps_delta_{side}.csv"
            _write_matrix(path, matrix[: min(max_bins, matrix.shape[0])])
            written.append(path)
    return written


def write_aggregate_csv(path, rows) -> Path:
    """Campaign aggregate: per-location orientation medians of the DS delta.

    rows: iterables of (location, link, band, n_orientations, median seconds).
    """
    path = Path(path)
    _write_rows(
        path,
        "location,link,band,n_orientations,median_d_rms_ds_s",
        ((str(loc), link, band, str(n), med) for loc, link, band, n, med in rows),
    )
    return path
