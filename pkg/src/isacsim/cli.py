"""Command-line interface: synth, analyze, diff, campaign, schedule,
register, parse-scenarios.

Exit codes: 0 ok; 2 configuration error; 3 I/O or file-format error;
4 numeric error (empty profile, degenerate geometry); 5 campaign finished
with per-scenario failures.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import ALL_LINKS, BAND_CONFIGS, Band, LinkId, ctf_to_cir
from .errors import (
    ConfigError,
    DegenerateConfiguration,
    DomainError,
    EmptyProfile,
    FileFormatError,
    GeometryError,
    IsacSimError,
    ScenarioParseError,
)
from .metrics import DEFAULT_THRESHOLD_DB, compute_metric_set, delta_metrics
from .registration import (
    apply_transform,
    fit_rigid_transform,
    read_xyz,
    write_transform,
    write_xyz,
)
from .reports import (
    summary_record,
    write_aggregate_csv,
    write_delta_exports,
    write_metric_exports,
    write_summary_json,
)
from .scenario import (
    ScenarioCode,
    bind_scenario,
    location_map_from_scene,
    parse_scenario_code,
    read_campaign_file,
)
from .scene import Scene, default_scene, load_scene_file, scene_digest
from .sounder import Side, build_all_grids, build_scan_schedule
from .synth import synthesize_ctf
from .tensorio import read_ctf, write_ctf

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_PARTIAL = 5

_CONFIG_ERRORS = (ConfigError, ScenarioParseError)
_IO_ERRORS = (FileFormatError, OSError)
_NUMERIC_ERRORS = (EmptyProfile, DomainError, GeometryError, DegenerateConfiguration)

ALL_BANDS = (Band.BAND24, Band.BAND60)


def tensor_filename(link: LinkId, band: Band) -> str:
    return f"{link.value}_{band.value}.ctf"


@dataclass
class RunManifest:
    """Reproducibility record for one synthesis run."""

    tool_version: str
    scene_digest: str
    seed: int
    scenario_code: str
    artifacts: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "tool_version": self.tool_version,
                "scene_digest": self.scene_digest,
                "seed": self.seed,
                "scenario_code": self.scenario_code,
                "artifacts": self.artifacts,
            },
            indent=2,
            sort_keys=True,
        )


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def verify_manifest(out_dir) -> None:
    """Check that every artifact a manifest lists exists with its digest."""
    out = Path(out_dir)
    data = json.loads((out / "manifest.json").read_text())
    for artifact in data["artifacts"]:
        path = out / artifact["path"]
        if not path.is_file():
            raise FileFormatError(f"manifest artifact missing: {path}")
        if _sha256(path) != artifact["sha256"]:
            raise FileFormatError(f"manifest digest mismatch: {path}")


def run_synth(scene: Scene, code: ScenarioCode, out_dir) -> Path:
    """Synthesize the 8 (link, band) tensors of one scenario; write manifest."""
    bound = bind_scenario(code, scene) if code.entries else scene
    grids = build_all_grids()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(
        tool_version=__version__,
        scene_digest=scene_digest(scene),
        seed=scene.seed,
        scenario_code=code.format(),
    )
    for link in ALL_LINKS:
        for band in ALL_BANDS:
            config = BAND_CONFIGS[band]
            ctf = synthesize_ctf(
                bound,
                link,
                config,
                grids[(band, Side.TX)],
                grids[(band, Side.RX)],
            )
            path = out / tensor_filename(link, band)
            write_ctf(path, ctf)
            manifest.artifacts.append(
                {"path": path.name, "sha256": _sha256(path)}
            )
    manifest_path = out / "manifest.json"
    manifest_path.write_text(manifest.to_json() + "\n")
    return manifest_path


def _read_scenario_tensors(in_dir) -> dict:
    grids = build_all_grids()
    tensors = {}
    for link in ALL_LINKS:
        for band in ALL_BANDS:
            path = Path(in_dir) / tensor_filename(link, band)
            if not path.is_file():
                raise FileNotFoundError(f"missing tensor file: {path}")
            ctf = read_ctf(path)
            config = BAND_CONFIGS[band]
            ctf.validate_against(
                config,
                grids[(band, Side.RX)].n_beams,
                grids[(band, Side.TX)].n_beams,
            )
            tensors[(link, band)] = ctf
    return tensors


def _metric_sets(tensors: dict, threshold_db: float) -> dict:
    grids = build_all_grids()
    sets = {}
    for (link, band), ctf in tensors.items():
        cir = ctf_to_cir(ctf)
        sets[(link, band)] = compute_metric_set(
            cir,
            grids[(band, Side.TX)],
            grids[(band, Side.RX)],
            threshold_db=threshold_db,
        )
    return sets


def run_analyze(in_dir, threshold_db: float, out_dir) -> Path:
    """Characterize the 8 tensors of a scenario directory."""
    tensors = _read_scenario_tensors(in_dir)
    sets = _metric_sets(tensors, threshold_db)
    grids = build_all_grids()
    records = []
    for (link, band), ms in sorted(
        sets.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)
    ):
        write_metric_exports(
            out_dir, ms, grids[(band, Side.TX)], grids[(band, Side.RX)]
        )
        records.append(summary_record(ms))
    return write_summary_json(out_dir, records)


def run_diff(dir_with, dir_without, threshold_db: float, out_dir) -> dict:
    """Delta metrics between two scenario tensor directories."""
    with_sets = _metric_sets(_read_scenario_tensors(dir_with), threshold_db)
    without_sets = _metric_sets(_read_scenario_tensors(dir_without), threshold_db)
    deltas = {
        key: delta_metrics(with_sets[key], without_sets[key])
        for key in with_sets
    }
    write_delta_exports(out_dir, list(deltas.values()))
    return deltas


def _campaign_scenario(scene, code, base_dir, baseline_dir, threshold_db):
    code_str = code.format()
    scen_dir = Path(base_dir) / code_str
    run_synth(scene, code, scen_dir / "tensors")
    run_analyze(scen_dir / "tensors", threshold_db, scen_dir / "metrics")
    deltas = run_diff(
        scen_dir / "tensors", baseline_dir, threshold_db, scen_dir / "delta"
    )
    return code_str, {key: d.d_rms_ds for key, d in deltas.items()}


def run_campaign(
    campaign_path,
    scene: Scene,
    threshold_db: float,
    out_dir,
    jobs: int = 1,
) -> int:
    """Run synth + analyze + diff per code against a shared baseline.

    Per-scenario failures are logged and the run continues; the aggregate
    CSV holds the per-location median of the DS delta across orientations
    for every single-person code. Returns the process exit code.
    """
    codes = read_campaign_file(campaign_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    baseline_dir = out / "baseline" / "tensors"
    run_synth(scene, ScenarioCode.empty(), baseline_dir)
    verify_manifest(baseline_dir)

    results: dict[str, dict] = {}
    failures: list[tuple[str, str]] = []

    def job(code):
        return _campaign_scenario(scene, code, out, baseline_dir, threshold_db)

    if jobs > 1 and len(codes) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(job, code): code for code in codes}
            for future in concurrent.futures.as_completed(futures):
                code = futures[future]
                try:
                    code_str, deltas = future.result()
                    results[code_str] = deltas
                except Exception as exc:  # logged, run continues
                    failures.append((code.format(), f"{type(exc).__name__}: {exc}"))
    else:
        for code in codes:
            try:
                code_str, deltas = job(code)
                results[code_str] = deltas
            except Exception as exc:
                failures.append((code.format(), f"{type(exc).__name__}: {exc}"))

    # Aggregate single-person scenarios by standing location.
    grouped: dict[tuple[int, LinkId, Band], list[float]] = {}
    for code_str, deltas in results.items():
        code = parse_scenario_code(code_str)
        if len(code.entries) != 1:
            continue
        loc = code.entries[0].location
        for (link, band), value in deltas.items():
            grouped.setdefault((loc, link, band), []).append(value)

    rows = []
    for loc in sorted({key[0] for key in grouped}):
        for link in ALL_LINKS:
            for band in ALL_BANDS:
                values = grouped.get((loc, link, band))
                if not values:
                    continue
                rows.append(
                    (loc, link.value, band.value, len(values), float(np.median(values)))
                )
    write_aggregate_csv(out / "aggregate.csv", rows)

    if failures:
        log = out / "errors.log"
        log.write_text(
            "".join(f"{code}: {msg}\n" for code, msg in sorted(failures))
        )
        return EXIT_PARTIAL
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def _load_scene(args) -> Scene:
    scene = load_scene_file(args.config) if args.config else default_scene()
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be nonnegative")
        scene = scene.with_seed(args.seed)
    return scene


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scene config YAML (default: built-in scene)")
    common.add_argument("--seed", type=int, default=None, help="override the scene seed")
    common.add_argument(
        "--threshold-db",
        type=float,
        default=DEFAULT_THRESHOLD_DB,
        help="noise cut below the PDP peak for delay-spread metrics",
    )
    common.add_argument("--jobs", type=int, default=1, help="parallel scenario workers")

    parser = argparse.ArgumentParser(
        prog="isacsim",
        description=(
            "Dual-band distributed-MIMO beam-scanning channel sounding "
            "simulator and analysis toolkit"
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="synthesize scenario tensors")
    p.add_argument("--code", default="", help="scenario code, e.g. A11 (empty = no person)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("analyze", parents=[common], help="characterize synthesized tensors")
    p.add_argument("--in", dest="in_dir", required=True, help="directory with 8 .ctf files")
    p.add_argument("--out", required=True)

    p = sub.add_parser("diff", parents=[common], help="with/without-person delta metrics")
    p.add_argument("--with", dest="with_dir", required=True, help="tensor dir with person")
    p.add_argument("--without", dest="without_dir", required=True, help="baseline tensor dir")
    p.add_argument("--out", required=True)

    p = sub.add_parser("campaign", parents=[common], help="run a scenario campaign")
    p.add_argument("campaign_file", help="newline-separated scenario codes, # comments")
    p.add_argument("--out", required=True)

    p = sub.add_parser("schedule", help="print the dual-band TDM scan schedule as CSV")
    p.add_argument("--out", help="write to a file instead of stdout")

    p = sub.add_parser("register", help="fit a rigid transform from marker files")
    p.add_argument("--local-markers", required=True, help="XYZ file, local marker centers")
    p.add_argument("--global-markers", required=True, help="XYZ file, global marker centers")
    p.add_argument("--cloud", help="optional XYZ cloud to transform into the global frame")
    p.add_argument("--out", required=True)

    p = sub.add_parser("parse-scenarios", help="validate a campaign file")
    p.add_argument("campaign_file")
    return parser


def _dispatch(args) -> int:
    if args.command == "synth":
        scene = _load_scene(args)
        code = parse_scenario_code(args.code) if args.code else ScenarioCode.empty()
        run_synth(scene, code, args.out)
        return EXIT_OK
    if args.command == "analyze":
        run_analyze(args.in_dir, args.threshold_db, args.out)
        return EXIT_OK
    if args.command == "diff":
        run_diff(args.with_dir, args.without_dir, args.threshold_db, args.out)
        return EXIT_OK
    if args.command == "campaign":
        scene = _load_scene(args)
        return run_campaign(
            args.campaign_file, scene, args.threshold_db, args.out, jobs=args.jobs
        )
    if args.command == "schedule":
        csv_text = build_scan_schedule(build_all_grids()).to_csv()
        if args.out:
            Path(args.out).write_text(csv_text)
        else:
            sys.stdout.write(csv_text)
        return EXIT_OK
    if args.command == "register":
        local = read_xyz(args.local_markers)
        global_ref = read_xyz(args.global_markers)
        transform, rms = fit_rigid_transform(local, global_ref)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_transform(out / "transform.txt", transform)
        if args.cloud:
            registered = apply_transform(transform, read_xyz(args.cloud))
            write_xyz(out / "registered.xyz", registered)
        print(f"residual_rms_m={rms!r}")
        return EXIT_OK
    if args.command == "parse-scenarios":
        for code in read_campaign_file(args.campaign_file):
            print(code.format())
        return EXIT_OK
    raise ConfigError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except _CONFIG_ERRORS as exc:
        print(f"isacsim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERIC_ERRORS as exc:
        print(f"isacsim: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _IO_ERRORS as exc:
        print(f"isacsim: io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except IsacSimError as exc:
        print(f"isacsim: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
