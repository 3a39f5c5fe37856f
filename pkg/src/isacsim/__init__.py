"""Dual-band distributed-MIMO beam-scanning channel sounding simulator.

Synthesizes beam-space channel tensors for a 24/60 GHz 2x2 distributed
link topology in a configurable indoor scene with standing persons, and
characterizes them in the delay and azimuth-angular domains.
"""

__version__ = "0.1.0"

from .core import (
    ALL_LINKS,
    BAND24,
    BAND60,
    BAND_CONFIGS,
    Band,
    BandConfig,
    CirTensor,
    CtfTensor,
    LinkId,
    Window,
    cir_to_ctf,
    ctf_to_cir,
)
from .errors import (
    ConfigError,
    ConfigMismatch,
    DegenerateConfiguration,
    DomainError,
    EmptyProfile,
    FileFormatError,
    GeometryError,
    IsacSimError,
    ScenarioParseError,
)
from .geometry import (
    SPEED_OF_LIGHT,
    first_fresnel_radius,
    point_in_first_fresnel,
    wrap_angle,
)
from .metrics import (
    DeltaMetrics,
    MetricSet,
    compute_adps,
    compute_angular_spread,
    compute_metric_set,
    compute_pap,
    compute_pdp,
    compute_rms_ds,
    delta_metrics,
)
from .registration import (
    MarkerTriple,
    RigidTransform,
    apply_transform,
    fit_rigid_transform,
    merge_clouds,
)
from .scenario import (
    LocationMap,
    ScenarioCode,
    ScenarioEntry,
    bind_scenario,
    catalog_codes,
    enumerate_single_person_campaign,
    format_scenario_code,
    location_map_from_scene,
    parse_scenario_code,
)
from .scene import Person, Reflector, Scene, default_scene, load_scene_file
from .sounder import (
    BeamGrid,
    BeamPattern,
    MultitoneWaveform,
    ScanSchedule,
    Side,
    beam_gain,
    build_all_grids,
    build_beam_grid,
    build_multitone,
    build_scan_schedule,
)
from .synth import (
    PathKind,
    PropagationPath,
    blockage_attenuation,
    enumerate_paths,
    human_scatter_amplitude,
    scatter_cross_section,
    synthesize_ctf,
)
from .tensorio import read_cir, read_ctf, write_cir, write_ctf
