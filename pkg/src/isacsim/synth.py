"""Deterministic geometric channel generator.

Produces the propagation paths of a scene for one (link, band) and renders
them into a beam-space channel transfer function tensor:

- line of sight, plus first/second-order specular reflections off the room
  walls and panels via the image method;
- one bistatic scatter path per person with an orientation-dependent
  equivalent cross section;
- a double knife-edge blockage factor applied to every path for every
  person whose body enters the path's Fresnel corridor;
- seeded complex white noise relative to the strongest path amplitude.

There is no inter-object occlusion beyond person blockage, no diffuse
scattering and no Doppler; reflections are capped at order 2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Band, BandConfig, CtfTensor, LinkId
from .errors import DomainError, GeometryError
from .geometry import (
    SPEED_OF_LIGHT,
    as_point,
    azimuth_of,
    elevation_of,
    first_fresnel_radius,
    wrap_angle,
)
from .scene import Person, Reflector, ScatterParams, Scene
from .sounder import BeamGrid, Side
from .sounder import absolute_tone_frequencies

# Knife-edge diffraction applies above this Fresnel parameter; below it the
# edge loss is zero.
_KNIFE_EDGE_V_MIN = -0.78

# Lateral clearance beyond this many Fresnel radii counts as unobstructed.
_CLEARANCE_RADII = 3.0

# Orientation-dependent silhouette: effective half-width of the torso as a
# fraction of the cylinder radius, between side-on and face-on.
_SILHOUETTE_BASE = 0.6
_SILHOUETTE_SWING = 0.4

_EPS_LENGTH = 1e-9


class PathKind(enum.Enum):
    LOS = "los"
    REFLECTION = "reflection"
    HUMAN_SCATTER = "human_scatter"


@dataclass(frozen=True, eq=False)
class PropagationPath:
    """One ray between the link ends, after blockage attenuation."""

    kind: PathKind
    order: int  # reflection order; 0 for LOS and scatter paths
    delay: float  # seconds
    amplitude: complex  # linear
    azimuth_departure: float
    azimuth_arrival: float
    elevation_departure: float
    elevation_arrival: float
    label: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.delay) and np.isfinite(self.amplitude)):
            raise DomainError("path delay/amplitude must be finite")


def knife_edge_loss_db(v: float) -> float:
    """Single knife-edge diffraction loss in dB at Fresnel parameter v.

    Zero below v = -0.78; the approximation is clamped at zero loss so the
    blockage factor never exceeds one.
    """
    if v <= _KNIFE_EDGE_V_MIN:
        return 0.0
    loss = 6.9 + 20.0 * math.log10(math.sqrt((v - 0.1) ** 2 + 1.0) + v - 0.1)
    return max(loss, 0.0)


def _silhouette_half_width(person: Person, path_dir_2d: np.ndarray) -> float:
    """Effective half-width of the body across a path (torso ellipticity)."""
    normal = np.array([-path_dir_2d[1], path_dir_2d[0]])
    facing = np.array(
        [math.cos(person.facing_azimuth), math.sin(person.facing_azimuth)]
    )
    cos_gamma = abs(float(np.dot(facing, normal)))
    return person.cylinder_radius * (_SILHOUETTE_BASE + _SILHOUETTE_SWING * cos_gamma)


def blockage_attenuation(vertices, person: Person, wavelength: float) -> float:
    """Linear amplitude factor (<= 1) from one person across a path polyline.

    Double knife-edge over the two lateral silhouette edges of the torso
    cylinder. Per edge, v = h_eff * sqrt(2 (d1 + d2) / (lambda d1 d2)) with
    d1/d2 the unfolded along-path distances to the crossing point; the two
    edge losses in dB add. Clearance beyond 3 Fresnel radii, a crossing
    above the person's head, or a foot of perpendicular outside the segment
    leave the path untouched.
    """
    pts = [as_point(p) for p in vertices]
    seg_lengths = [float(np.linalg.norm(b - a)) for a, b in zip(pts, pts[1:])]
    total = sum(seg_lengths)
    center2 = person.center[:2]

    loss_db = 0.0
    traveled = 0.0
    for (a, b), seg_len in zip(zip(pts, pts[1:]), seg_lengths):
        a2, b2 = a[:2], b[:2]
        horiz = b2 - a2
        horiz_len = float(np.linalg.norm(horiz))
        if horiz_len < _EPS_LENGTH or seg_len < _EPS_LENGTH:
            traveled += seg_len
            continue  # near-vertical segment: outside the model
        u = horiz / horiz_len
        rel = center2 - a2
        t = float(np.dot(rel, u)) / horiz_len
        if t <= 0.0 or t >= 1.0:
            traveled += seg_len
            continue
        z_cross = a[2] + t * (b[2] - a[2])
        if z_cross < 0.0 or z_cross > person.height:
            traveled += seg_len
            continue

        # Signed lateral offset of the body center from the ray.
        offset = float(u[0] * rel[1] - u[1] * rel[0])
        half_width = _silhouette_half_width(person, u)
        edge_lo = offset - half_width
        edge_hi = offset + half_width

        d1 = max(traveled + t * seg_len, _EPS_LENGTH)
        d2 = max(total - d1, _EPS_LENGTH)
        clearance = max(edge_lo, -edge_hi)  # > 0 iff the ray misses the body
        if clearance > _CLEARANCE_RADII * first_fresnel_radius(d1, d2, wavelength):
            traveled += seg_len
            continue

        k = math.sqrt(2.0 * (d1 + d2) / (wavelength * d1 * d2))
        loss_db += knife_edge_loss_db(-edge_lo * k)
        loss_db += knife_edge_loss_db(edge_hi * k)
        traveled += seg_len

    return 10.0 ** (-loss_db / 20.0)


def scatter_cross_section(
    facing_azimuth: float,
    incident_azimuth: float,
    scattered_azimuth: float,
    params: ScatterParams,
) -> float:
    """Equivalent bistatic cross section, orientation dependent.

    incident_azimuth points from the person toward the illuminating site,
    scattered_azimuth from the person toward the receiving site. The gain
    lobe peaks when the person faces the bisector of the two directions;
    for near-antipodal directions (grazing forward scatter) the bisector is
    undefined and the floor value applies.
    """
    cx = math.cos(incident_azimuth) + math.cos(scattered_azimuth)
    sy = math.sin(incident_azimuth) + math.sin(scattered_azimuth)
    if math.hypot(cx, sy) < 1e-12:
        return params.sigma_floor
    beta = wrap_angle(facing_azimuth - math.atan2(sy, cx))
    lobe = max(0.0, math.cos(beta)) ** params.exponent
    return params.sigma_max * lobe + params.sigma_floor


def human_scatter_amplitude(
    person: Person,
    incident_azimuth: float,
    scattered_azimuth: float,
    d_tx: float,
    d_rx: float,
    wavelength: float,
    params: ScatterParams = ScatterParams(),
) -> complex:
    """Bistatic point-scatterer amplitude at torso height."""
    if d_tx <= 0.0 or d_rx <= 0.0:
        raise DomainError("scatter distances must be positive")
    sigma = scatter_cross_section(
        person.facing_azimuth, incident_azimuth, scattered_azimuth, params
    )
    mag = math.sqrt(sigma / (4.0 * math.pi)) * wavelength / (4.0 * math.pi * d_tx * d_rx)
    return complex(mag, 0.0)


def _mirror(point: np.ndarray, reflector: Reflector) -> np.ndarray:
    n = reflector.normal
    dist = float(np.dot(point - reflector.origin, n))
    return point - 2.0 * dist * n


def _signed_distance(point: np.ndarray, reflector: Reflector) -> float:
    return float(np.dot(point - reflector.origin, reflector.normal))


def _plane_crossing(p0, p1, d0, d1):
    """Point where segment p0-p1 crosses the plane, given signed distances."""
    t = d0 / (d0 - d1)
    if not 0.0 < t < 1.0:
        return None
    return p0 + t * (p1 - p0)


def _path_from_vertices(kind, order, vertices, amplitude, label) -> PropagationPath:
    pts = [as_point(p) for p in vertices]
    length = sum(float(np.linalg.norm(b - a)) for a, b in zip(pts, pts[1:]))
    dep = pts[1] - pts[0]
    arr = pts[-2] - pts[-1]
    return PropagationPath(
        kind=kind,
        order=order,
        delay=length / SPEED_OF_LIGHT,
        amplitude=amplitude,
        azimuth_departure=azimuth_of(dep),
        azimuth_arrival=azimuth_of(arr),
        elevation_departure=elevation_of(dep),
        elevation_arrival=elevation_of(arr),
        label=label,
    )


def _free_space_amplitude(length: float, wavelength: float) -> float:
    if length < _EPS_LENGTH:
        raise GeometryError("path of zero length (coincident sites?)")
    return wavelength / (4.0 * math.pi * length)


def enumerate_paths(
    scene: Scene, link: LinkId, config: BandConfig
) -> list[PropagationPath]:
    """All propagation paths of one link at one band, blockage applied.

    Path order is deterministic: LOS, first-order reflections (walls in
    fixed face order then panels), second-order reflections (ordered
    reflector pairs), then one scatter path per person.
    """
    band = config.band
    wavelength = config.wavelength
    tx = scene.site(link.tx_site).position_for(band)
    rx = scene.site(link.rx_site).position_for(band)
    reflectors = scene.reflectors()

    candidates: list[tuple[list, PathKind, int, float, str, Person | None]] = []

    los_len = float(np.linalg.norm(rx - tx))
    if los_len < _EPS_LENGTH:
        raise GeometryError(f"link {link.value}: sites coincide")
    candidates.append(([tx, rx], PathKind.LOS, 0, 1.0, "los", None))

    # Reflectors with a zero coefficient at this band are absorbers: no path.
    active = [r for r in reflectors if r.reflection[band] != 0.0]

    if scene.max_reflection_order >= 1:
        for refl in active:
            d_tx = _signed_distance(tx, refl)
            d_rx = _signed_distance(rx, refl)
            if abs(d_tx) < _EPS_LENGTH or abs(d_rx) < _EPS_LENGTH:
                raise GeometryError(
                    f"site of link {link.value} lies on reflector {refl.name!r}"
                )
            if d_tx * d_rx < 0.0:
                continue  # opposite sides: no specular bounce
            image = _mirror(tx, refl)
            hit = _plane_crossing(image, rx, -d_tx, d_rx)
            if hit is None or not refl.contains_projection(hit):
                continue
            gamma = refl.reflection[band]
            candidates.append(
                ([tx, hit, rx], PathKind.REFLECTION, 1, gamma, f"refl:{refl.name}", None)
            )

    if scene.max_reflection_order >= 2:
        for r1 in active:
            d_tx1 = _signed_distance(tx, r1)
            if abs(d_tx1) < _EPS_LENGTH:
                raise GeometryError(
                    f"site of link {link.value} lies on reflector {r1.name!r}"
                )
            image1 = _mirror(tx, r1)
            for r2 in active:
                if r2 is r1:
                    continue
                d_i1 = _signed_distance(image1, r2)
                d_rx2 = _signed_distance(rx, r2)
                # The once-mirrored source and the receiver must share the
                # side of the second reflector.
                if abs(d_i1) < _EPS_LENGTH or d_i1 * d_rx2 < 0.0:
                    continue
                image2 = _mirror(image1, r2)
                hit2 = _plane_crossing(image2, rx, -d_i1, d_rx2)
                if hit2 is None or not r2.contains_projection(hit2):
                    continue
                d_h2 = _signed_distance(hit2, r1)
                if d_tx1 * d_h2 < 0.0 or abs(d_h2) < _EPS_LENGTH:
                    continue
                hit1 = _plane_crossing(image1, hit2, -d_tx1, d_h2)
                if hit1 is None or not r1.contains_projection(hit1):
                    continue
                if np.linalg.norm(hit2 - hit1) < _EPS_LENGTH:
                    continue
                gamma = r1.reflection[band] * r2.reflection[band]
                candidates.append(
                    (
                        [tx, hit1, hit2, rx],
                        PathKind.REFLECTION,
                        2,
                        gamma,
                        f"refl:{r1.name}+{r2.name}",
                        None,
                    )
                )

    for person in scene.persons:
        d_tx = float(np.linalg.norm(person.center - tx))
        d_rx = float(np.linalg.norm(person.center - rx))
        amp = human_scatter_amplitude(
            person,
            incident_azimuth=azimuth_of(tx - person.center),
            scattered_azimuth=azimuth_of(rx - person.center),
            d_tx=d_tx,
            d_rx=d_rx,
            wavelength=wavelength,
            params=scene.scatter,
        )
        candidates.append(
            (
                [tx, person.center, rx],
                PathKind.HUMAN_SCATTER,
                0,
                # carried through as the full amplitude below
                complex(amp),
                f"scatter:{person.label}",
                person,
            )
        )

    paths = []
    for vertices, kind, order, coeff, label, scatter_person in candidates:
        if kind is PathKind.HUMAN_SCATTER:
            amplitude = complex(coeff)
        else:
            pts = [as_point(p) for p in vertices]
            length = sum(
                float(np.linalg.norm(b - a)) for a, b in zip(pts, pts[1:])
            )
            amplitude = _free_space_amplitude(length, wavelength) * coeff
        for person in scene.persons:
            if person is scatter_person:
                continue
            amplitude *= blockage_attenuation(vertices, person, wavelength)
        paths.append(_path_from_vertices(kind, order, vertices, amplitude, label))
    return paths


def _gaussian_amplitude(delta, hpbw: float, floor_db: float):
    gain_db = -3.0 * (2.0 * np.asarray(delta) / hpbw) ** 2
    amp = 10.0 ** (gain_db / 20.0)
    return np.maximum(amp, 10.0 ** (floor_db / 20.0))


def synthesize_ctf_from_paths(
    paths: list[PropagationPath],
    link: LinkId,
    config: BandConfig,
    tx_grid: BeamGrid,
    rx_grid: BeamGrid,
    tx_boresight: float,
    rx_boresight: float,
    noise_floor_db: float | None,
    seed: int,
) -> CtfTensor:
    """Render a path list into a beam-space CTF tensor.

    H[f, phi_R, phi_T] sums, over paths, the Tx/Rx azimuth beam gains at the
    path's departure/arrival angles, the elevation gains (same Gaussian
    model, elevation is not scanned), the path amplitude, and the tone
    phasor exp(-j 2 pi f_abs tau). Complex white noise with per-sample
    standard deviation 10^(noise_floor_db/20) times the strongest raw path
    amplitude is added from a stream seeded by (seed, link, band).
    """
    f_abs = absolute_tone_frequencies(config)
    n_f = len(f_abs)
    n_rx = rx_grid.n_beams
    n_tx = tx_grid.n_beams

    if paths:
        dep = np.array([p.azimuth_departure for p in paths])
        arr = np.array([p.azimuth_arrival for p in paths])
        dep_el = np.array([p.elevation_departure for p in paths])
        arr_el = np.array([p.elevation_arrival for p in paths])
        amp = np.array([p.amplitude for p in paths], dtype=np.complex128)
        delay = np.array([p.delay for p in paths])

        tx_pointing = tx_boresight + tx_grid.steering_angles
        rx_pointing = rx_boresight + rx_grid.steering_angles
        g_tx = _gaussian_amplitude(
            wrap_angle(dep[:, None] - tx_pointing[None, :]),
            tx_grid.hpbw_azimuth,
            tx_grid.sidelobe_floor_db,
        )
        g_rx = _gaussian_amplitude(
            wrap_angle(arr[:, None] - rx_pointing[None, :]),
            rx_grid.hpbw_azimuth,
            rx_grid.sidelobe_floor_db,
        )
        g_el = _gaussian_amplitude(
            dep_el, tx_grid.hpbw_elevation, tx_grid.sidelobe_floor_db
        ) * _gaussian_amplitude(
            arr_el, rx_grid.hpbw_elevation, rx_grid.sidelobe_floor_db
        )

        weights = (amp * g_el)[:, None, None] * g_rx[:, :, None] * g_tx[:, None, :]
        phase = np.exp(-2j * np.pi * np.outer(delay, f_abs))  # [p, f]
        values = np.einsum("pf,pij->fij", phase, weights)
    else:
        values = np.zeros((n_f, n_rx, n_tx), dtype=np.complex128)

    if noise_floor_db is not None and paths:
        a_max = max(abs(p.amplitude) for p in paths)
        sigma = 10.0 ** (noise_floor_db / 20.0) * a_max
        rng = np.random.default_rng([seed, link.code, config.band.code])
        shape = (n_f, n_rx, n_tx)
        noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        values = values + noise * (sigma / math.sqrt(2.0))

    return CtfTensor(config.band, link, values)


def synthesize_ctf(
    scene: Scene,
    link: LinkId,
    config: BandConfig,
    tx_grid: BeamGrid,
    rx_grid: BeamGrid,
) -> CtfTensor:
    """Enumerate the scene's paths for one (link, band) and render them."""
    if tx_grid.side is not Side.TX or rx_grid.side is not Side.RX:
        raise DomainError("grids passed to synthesize_ctf have swapped sides")
    paths = enumerate_paths(scene, link, config)
    return synthesize_ctf_from_paths(
        paths,
        link,
        config,
        tx_grid,
        rx_grid,
        tx_boresight=scene.site(link.tx_site).boresight,
        rx_boresight=scene.site(link.rx_site).boresight,
        noise_floor_db=scene.noise_floor_db,
        seed=scene.seed,
    )
