"""Scene model: room, reflector panels, transceiver sites, persons.

A scene is the geometric input to the channel synthesizer. The default
scene is an office-like rectangular room with a metal cabinet panel on the
window wall, a whiteboard panel near Tx2 on the door wall, and four sites
forming two crossing line-of-sight links (Tx1 faces Rx2, Tx2 faces Rx1).
Tx1 and Rx1 sit near the window wall, Tx2 and Rx2 near the door wall. All
dimensions are configuration defaults, not ground truth.

Scene configs are YAML documents versioned ``scene/1``::

    version: scene/1
    seed: 1302
    room: {min: [0, 0, 0], max: [7.0, 6.4, 2.7]}
    wall_reflection: 0.3
    max_reflection_order: 2
    noise_floor_db: -40.0        # null disables noise
    scatter: {sigma_max: 0.6, sigma_floor: 0.05, exponent: 2.0}
    sites:
      tx1: {position: [1.2, 5.2, 1.0], face: rx2, band24_offset: [0, 0, 0.12]}
      ...                         # or boresight_deg: <azimuth in degrees>
    panels:
      - name: cabinet
        origin: [2.2, 6.35, 0.0]  # corner point
        edge_u: [2.4, 0.0, 0.0]   # two edge vectors spanning the rectangle
        edge_v: [0.0, 0.0, 2.0]
        reflection: {band24: 0.9, band60: 0.9}
    locations:                    # standing spots, floor coordinates
      1: [2.2, 4.2]
      ...
    persons:                      # optional; usually bound from a scenario code
      - {label: A, location: 1, orientation: 1}

Orientation rule: orientation 1 faces the Tx1 site; each increment turns
the person 45 degrees clockwise (floor-plan view, so clockwise means
decreasing azimuth).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .core import Band
from .errors import ConfigError
from .geometry import as_point, azimuth_of

SCENE_FORMAT_VERSION = "scene/1"

PERSON_RADIUS = 0.15  # m, torso cylinder
PERSON_HEIGHT = 1.70  # m

SITE_NAMES = ("tx1", "tx2", "rx1", "rx2")


@dataclass(frozen=True)
class Reflector:
    """Plane rectangle with a per-band amplitude reflection coefficient."""

    name: str
    origin: np.ndarray  # corner point
    edge_u: np.ndarray
    edge_v: np.ndarray
    reflection: dict[Band, float]

    @property
    def normal(self) -> np.ndarray:
        n = np.cross(self.edge_u, self.edge_v)
        norm = np.linalg.norm(n)
        if norm == 0.0:
            raise ConfigError(f"reflector {self.name!r} has degenerate edges")
        return n / norm

    def contains_projection(self, point: np.ndarray, tol: float = 1e-9) -> bool:
        """True if a point on the plane lies within the rectangle bounds."""
        rel = point - self.origin
        uu = float(np.dot(self.edge_u, self.edge_u))
        vv = float(np.dot(self.edge_v, self.edge_v))
        u = float(np.dot(rel, self.edge_u)) / uu
        v = float(np.dot(rel, self.edge_v)) / vv
        return -tol <= u <= 1.0 + tol and -tol <= v <= 1.0 + tol


@dataclass(frozen=True)
class SitePlacement:
    """One transceiver site: 60 GHz position plus the 24 GHz stacking offset."""

    name: str
    position: np.ndarray  # 60 GHz array position
    boresight: float  # azimuth of the array broadside, radians
    band24_offset: np.ndarray = field(
        default_factory=lambda: np.array([0.0, 0.0, 0.12])
    )

    def position_for(self, band: Band) -> np.ndarray:
        if band is Band.BAND24:
            return self.position + self.band24_offset
        return self.position


@dataclass(frozen=True)
class Person:
    """Standing person: vertical cylinder with a facing direction."""

    label: str
    location_index: int
    orientation_index: int
    center: np.ndarray  # torso center (x, y, height/2)
    facing_azimuth: float  # radians
    cylinder_radius: float = PERSON_RADIUS
    height: float = PERSON_HEIGHT


@dataclass(frozen=True)
class ScatterParams:
    """Orientation-dependent equivalent cross-section of a person.

    sigma_eq = sigma_max * max(0, cos(beta))^exponent + sigma_floor, where
    beta is the angle between the facing direction and the bisector of the
    incident and scattered directions. Modeling choices, not measured values.
    """

    sigma_max: float = 0.6  # m^2
    sigma_floor: float = 0.05  # m^2
    exponent: float = 2.0


@dataclass(frozen=True)
class Scene:
    room_min: np.ndarray
    room_max: np.ndarray
    sites: dict[str, SitePlacement]
    panels: tuple[Reflector, ...] = ()
    persons: tuple[Person, ...] = ()
    locations: dict[int, tuple[float, float]] = field(default_factory=dict)
    wall_reflection: float = 0.3
    max_reflection_order: int = 2
    noise_floor_db: float | None = -40.0
    scatter: ScatterParams = field(default_factory=ScatterParams)
    seed: int = 0

    def site(self, name: str) -> SitePlacement:
        try:
            return self.sites[name]
        except KeyError as exc:
            raise ConfigError(f"scene has no site {name!r}") from exc

    def wall_reflectors(self) -> tuple[Reflector, ...]:
        """The six box faces as reflectors, in a fixed deterministic order."""
        lo, hi = self.room_min, self.room_max
        size = hi - lo
        coeff = {Band.BAND24: self.wall_reflection, Band.BAND60: self.wall_reflection}

        def face(name, origin, u, v):
            return Reflector(name, np.array(origin, float), np.array(u, float),
                             np.array(v, float), coeff)

        return (
            face("wall_xmin", lo, [0, size[1], 0], [0, 0, size[2]]),
            face("wall_xmax", [hi[0], lo[1], lo[2]], [0, size[1], 0], [0, 0, size[2]]),
            face("wall_ymin", lo, [size[0], 0, 0], [0, 0, size[2]]),
            face("wall_ymax", [lo[0], hi[1], lo[2]], [size[0], 0, 0], [0, 0, size[2]]),
            face("floor", lo, [size[0], 0, 0], [0, size[1], 0]),
            face("ceiling", [lo[0], lo[1], hi[2]], [size[0], 0, 0], [0, size[1], 0]),
        )

    def reflectors(self) -> tuple[Reflector, ...]:
        return self.wall_reflectors() + self.panels

    def with_persons(self, persons: tuple[Person, ...]) -> "Scene":
        return replace(self, persons=persons)

    def with_seed(self, seed: int) -> "Scene":
        return replace(self, seed=seed)


def orientation_facing(scene: Scene, center, orientation_index: int) -> float:
    """Facing azimuth for an orientation index at a standing spot.

    Orientation 1 faces the Tx1 site; each increment is exactly 45 degrees
    clockwise (floor-plan view with azimuth counterclockwise-positive, so
    clockwise subtracts).
    """
    if not 1 <= orientation_index <= 8:
        raise ConfigError(f"orientation index {orientation_index} out of range 1-8")
    tx1 = scene.site("tx1").position
    toward_tx1 = azimuth_of(tx1 - as_point(center))
    return toward_tx1 - (orientation_index - 1) * math.pi / 4.0


def make_person(
    scene: Scene,
    label: str,
    location_index: int,
    orientation_index: int,
    cylinder_radius: float = PERSON_RADIUS,
    height: float = PERSON_HEIGHT,
) -> Person:
    """Place a person at a catalog location with a catalog orientation."""
    try:
        x, y = scene.locations[location_index]
    except KeyError as exc:
        raise ConfigError(
            f"scene defines no standing location {location_index}"
        ) from exc
    center = np.array([x, y, height / 2.0])
    facing = orientation_facing(scene, center, orientation_index)
    return Person(
        label=label,
        location_index=location_index,
        orientation_index=orientation_index,
        center=center,
        facing_azimuth=facing,
        cylinder_radius=cylinder_radius,
        height=height,
    )


def default_scene(seed: int = 1302) -> Scene:
    """Office-like default room; dimensions are documented approximations."""
    sites = {}
    positions = {
        "tx1": [1.2, 5.2, 1.0],
        "rx1": [5.8, 5.4, 1.0],
        "tx2": [1.6, 1.2, 1.0],
        "rx2": [5.4, 1.0, 1.0],
    }
    faces = {"tx1": "rx2", "rx2": "tx1", "tx2": "rx1", "rx1": "tx2"}
    for name, pos in positions.items():
        target = np.array(positions[faces[name]])
        boresight = azimuth_of(target - np.array(pos))
        sites[name] = SitePlacement(name, np.array(pos, float), boresight)

    panels = (
        Reflector(
            "cabinet",
            np.array([2.2, 6.35, 0.0]),
            np.array([2.4, 0.0, 0.0]),
            np.array([0.0, 0.0, 2.0]),
            {Band.BAND24: 0.9, Band.BAND60: 0.9},
        ),
        Reflector(
            "whiteboard",
            np.array([0.6, 0.05, 0.9]),
            np.array([2.0, 0.0, 0.0]),
            np.array([0.0, 0.0, 1.2]),
            {Band.BAND24: 0.7, Band.BAND60: 0.7},
        ),
    )

    # Locations 1-4 sit on the Tx1-Rx2 segment (the line x + y = 6.4);
    # 5-8 are deviated from both LOS lines.
    locations = {
        1: (2.2, 4.2),
        2: (2.9, 3.5),
        3: (3.6, 2.8),
        4: (4.4, 2.0),
        5: (3.2, 4.5),
        6: (4.2, 3.3),
        7: (2.0, 2.9),
        8: (4.9, 4.1),
    }

    return Scene(
        room_min=np.zeros(3),
        room_max=np.array([7.0, 6.4, 2.7]),
        sites=sites,
        panels=panels,
        locations=locations,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Config serialization


def scene_to_dict(scene: Scene) -> dict:
    d = {
        "version": SCENE_FORMAT_VERSION,
        "seed": scene.seed,
        "room": {
            "min": [float(v) for v in scene.room_min],
            "max": [float(v) for v in scene.room_max],
        },
        "wall_reflection": scene.wall_reflection,
        "max_reflection_order": scene.max_reflection_order,
        "noise_floor_db": scene.noise_floor_db,
        "scatter": {
            "sigma_max": scene.scatter.sigma_max,
            "sigma_floor": scene.scatter.sigma_floor,
            "exponent": scene.scatter.exponent,
        },
        "sites": {
            name: {
                "position": [float(v) for v in s.position],
                "boresight_deg": math.degrees(s.boresight),
                "band24_offset": [float(v) for v in s.band24_offset],
            }
            for name, s in scene.sites.items()
        },
        "panels": [
            {
                "name": p.name,
                "origin": [float(v) for v in p.origin],
                "edge_u": [float(v) for v in p.edge_u],
                "edge_v": [float(v) for v in p.edge_v],
                "reflection": {b.value: float(c) for b, c in p.reflection.items()},
            }
            for p in scene.panels
        ],
        "locations": {int(k): [float(v[0]), float(v[1])] for k, v in scene.locations.items()},
        "persons": [
            {
                "label": p.label,
                "location": p.location_index,
                "orientation": p.orientation_index,
                "radius": p.cylinder_radius,
                "height": p.height,
            }
            for p in scene.persons
        ],
    }
    return d


def scene_from_dict(data: dict) -> Scene:
    if not isinstance(data, dict):
        raise ConfigError("scene config must be a mapping")
    version = data.get("version")
    if version != SCENE_FORMAT_VERSION:
        raise ConfigError(
            f"unsupported scene config version {version!r} "
            f"(expected {SCENE_FORMAT_VERSION!r})"
        )
    try:
        room = data["room"]
        room_min = as_point(room["min"])
        room_max = as_point(room["max"])
        if not np.all(room_max > room_min):
            raise ConfigError("room max must exceed room min on every axis")

        raw_sites = data["sites"]
        missing = [n for n in SITE_NAMES if n not in raw_sites]
        if missing:
            raise ConfigError(f"scene config missing sites: {missing}")

        positions = {n: as_point(raw_sites[n]["position"]) for n in raw_sites}
        sites = {}
        for name, raw in raw_sites.items():
            if "boresight_deg" in raw:
                boresight = math.radians(float(raw["boresight_deg"]))
            elif "face" in raw:
                target = raw["face"]
                if target not in positions:
                    raise ConfigError(
                        f"site {name!r} faces unknown site {target!r}"
                    )
                boresight = azimuth_of(positions[target] - positions[name])
            else:
                raise ConfigError(
                    f"site {name!r} needs either 'face' or 'boresight_deg'"
                )
            offset = as_point(raw.get("band24_offset", [0.0, 0.0, 0.12]))
            sites[name] = SitePlacement(name, positions[name], boresight, offset)

        panels = []
        for raw in data.get("panels", []):
            refl = raw["reflection"]
            panels.append(
                Reflector(
                    name=str(raw.get("name", f"panel{len(panels)}")),
                    origin=as_point(raw["origin"]),
                    edge_u=as_point(raw["edge_u"]),
                    edge_v=as_point(raw["edge_v"]),
                    reflection={Band(b): float(c) for b, c in refl.items()},
                )
            )

        locations = {
            int(k): (float(v[0]), float(v[1]))
            for k, v in data.get("locations", {}).items()
        }

        scatter_raw = data.get("scatter", {})
        scatter = ScatterParams(
            sigma_max=float(scatter_raw.get("sigma_max", 0.6)),
            sigma_floor=float(scatter_raw.get("sigma_floor", 0.05)),
            exponent=float(scatter_raw.get("exponent", 2.0)),
        )

        noise = data.get("noise_floor_db", -40.0)
        order = int(data.get("max_reflection_order", 2))
        if order not in (0, 1, 2):
            raise ConfigError(f"max_reflection_order must be 0, 1 or 2, got {order}")

        scene = Scene(
            room_min=room_min,
            room_max=room_max,
            sites=sites,
            panels=tuple(panels),
            locations=locations,
            wall_reflection=float(data.get("wall_reflection", 0.3)),
            max_reflection_order=order,
            noise_floor_db=None if noise is None else float(noise),
            scatter=scatter,
            seed=int(data.get("seed", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid scene config: {exc!r}") from exc

    for name in SITE_NAMES:
        pos = scene.sites[name].position
        if not (np.all(pos >= scene.room_min) and np.all(pos <= scene.room_max)):
            raise ConfigError(f"site {name!r} lies outside the room")

    persons = []
    for raw in data.get("persons", []):
        persons.append(
            make_person(
                scene,
                label=str(raw["label"]),
                location_index=int(raw["location"]),
                orientation_index=int(raw["orientation"]),
                cylinder_radius=float(raw.get("radius", PERSON_RADIUS)),
                height=float(raw.get("height", PERSON_HEIGHT)),
            )
        )
    return scene.with_persons(tuple(persons))


def load_scene_file(path) -> Scene:
    try:
        data = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse scene config {path}: {exc}") from exc
    return scene_from_dict(data)


def dump_scene_yaml(scene: Scene) -> str:
    return yaml.safe_dump(scene_to_dict(scene), sort_keys=True)


def scene_digest(scene: Scene) -> str:
    """Stable content digest of a scene configuration."""
    canon = json.dumps(scene_to_dict(scene), sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()
