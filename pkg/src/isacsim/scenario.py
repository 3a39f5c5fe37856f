"""Scenario codes, the measurement catalog, and scene binding.

A scenario code names who stands where, facing which way: tokens like
``A25`` (person A, location 2, orientation 5) joined by underscores, e.g.
``A22_D76_E88``. Labels A-E must be unique within a code; locations and
orientations run 1-8; a code holds one to three entries.

The single-person campaign enumerates all 64 location/orientation
combinations for person A. The two- and three-person catalogs are fixed
code lists; they parse and bind like any other code, but the analysis
pipeline documents single-person acceptance only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, ScenarioParseError
from .scene import Person, Scene, make_person
from .geometry import segment_split

VALID_LABELS = "ABCDE"
MAX_ENTRIES = 3

_TOKEN = re.compile(r"^([A-E])([1-8])([1-8])$")


@dataclass(frozen=True)
class ScenarioEntry:
    label: str
    location: int
    orientation: int

    def format(self) -> str:
        return f"{self.label}{self.location}{self.orientation}"


@dataclass(frozen=True)
class ScenarioCode:
    entries: tuple[ScenarioEntry, ...] = ()

    def format(self) -> str:
        return "_".join(e.format() for e in self.entries)

    @classmethod
    def empty(cls) -> "ScenarioCode":
        """The no-person baseline. Not producible by the parser."""
        return cls(())


def parse_scenario_code(text: str) -> ScenarioCode:
    """Parse a scenario code, reporting defects with their byte offset."""
    entries = []
    seen = set()
    offset = 0
    tokens = text.split("_")
    for index, token in enumerate(tokens):
        if index >= MAX_ENTRIES:
            raise ScenarioParseError(
                f"too many entries (max {MAX_ENTRIES})", offset
            )
        match = _TOKEN.match(token)
        if match is None:
            raise ScenarioParseError(_describe_bad_token(token), offset + _bad_byte(token))
        label, loc, orient = match.group(1), int(match.group(2)), int(match.group(3))
        if label in seen:
            raise ScenarioParseError(f"duplicate person label {label!r}", offset)
        seen.add(label)
        entries.append(ScenarioEntry(label, loc, orient))
        offset += len(token) + 1  # account for the separator
    return ScenarioCode(tuple(entries))


def _describe_bad_token(token: str) -> str:
    if not token:
        return "empty scenario entry"
    if token[0] not in VALID_LABELS:
        return f"bad person label {token[0]!r} (expected one of {VALID_LABELS})"
    if len(token) != 3:
        return f"entry {token!r} must be label + location digit + orientation digit"
    if token[1] not in "12345678":
        return f"location {token[1]!r} out of range 1-8"
    return f"orientation {token[2]!r} out of range 1-8"


def _bad_byte(token: str) -> int:
    """Offset of the defective byte within a malformed token."""
    if not token or token[0] not in VALID_LABELS:
        return 0
    if len(token) >= 2 and token[1] not in "12345678":
        return 1
    if len(token) >= 3 and token[2] not in "12345678":
        return 2
    if len(token) > 3:
        return 3
    return 0


def format_scenario_code(code: ScenarioCode) -> str:
    return code.format()


def enumerate_single_person_campaign() -> list[ScenarioCode]:
    """All 64 single-person codes A11..A88, location-major."""
    return [
        ScenarioCode((ScenarioEntry("A", loc, orient),))
        for loc in range(1, 9)
        for orient in range(1, 9)
    ]


# Fixed catalog of the two- and three-person measurement codes.
TWO_PERSON_CODES = (
    "B21_C41", "B23_C43", "B25_C33", "B26_C37", "B26_C44",
    "B28_C38", "B32_C24", "B33_C28", "B38_C26", "B41_C24",
    "B43_C27", "B44_C27",
    "A21_C68", "A21_C71", "A22_C51", "A22_C71", "A23_C64",
    "A23_C72", "A23_C73", "A23_C76", "A25_C54", "A26_C56",
    "A26_C61", "A27_C73", "A51_C22", "A51_C24", "A51_C61",
    "A51_C71", "A52_C68", "A52_C78", "A53_C68", "A53_C72",
    "A53_C73", "A54_C62", "A54_C63", "A54_C73", "A55_C66",
    "A55_C75", "A56_C24", "A56_C78", "A61_C23", "A63_C21",
    "A68_C26", "A81_C21", "A81_C24", "A81_C71", "A82_C28",
    "A82_C72", "A83_C77", "A85_C27", "A86_C74", "A87_C23",
    "A87_C73", "A88_C26", "A88_C72", "A84_C77",
)

THREE_PERSON_CODES = (
    "A22_D76_E88", "A23_D67_E58", "A23_D78_E81",
    "A24_D61_E52", "A51_D24_E66", "A52_D23_E62",
    "A52_D68_E88", "A53_D68_E71", "A53_D85_E72",
    "A54_D66_E78", "A55_D61_E82", "A56_D82_E75",
    "A61_D52_E23", "A61_D82_E56", "A63_D53_E73",
    "A66_D58_E27", "A67_D55_E77", "A68_D86_E52",
    "A71_D66_E58", "A71_D87_E26", "A72_D54_E81",
    "A73_D56_E86", "A73_D68_E54", "A73_D68_E22",
    "A81_D67_E52", "A81_D71_E52", "A82_D22_E72",
    "A86_D66_E54", "A86_D77_E54", "A87_D28_E74",
)


def catalog_codes() -> list[str]:
    """The full 150-code measurement catalog (64 + 56 + 30)."""
    singles = [c.format() for c in enumerate_single_person_campaign()]
    return singles + list(TWO_PERSON_CODES) + list(THREE_PERSON_CODES)


# ---------------------------------------------------------------------------
# Location map and scene binding


@dataclass(frozen=True)
class LocationMap:
    """Standing spots 1-8; 1-4 sit on the direct Tx1-Rx2 path."""

    loc_coordinates: dict[int, tuple[float, float]]
    on_direct_path: frozenset = frozenset({1, 2, 3, 4})


def location_map_from_scene(scene: Scene, tolerance: float = 0.01) -> LocationMap:
    """Extract and validate the scene's standing locations.

    Locations 1-4 must lie on the Tx1-Rx2 segment within the lateral
    tolerance (1 cm default); 5-8 must not.
    """
    missing = [i for i in range(1, 9) if i not in scene.locations]
    if missing:
        raise ConfigError(f"scene defines no locations {missing}")
    tx1 = scene.site("tx1").position
    rx2 = scene.site("rx2").position
    locmap = LocationMap(dict(scene.locations))
    for index, (x, y) in scene.locations.items():
        point = np.array([x, y, tx1[2]])
        t, lateral = segment_split(tx1, rx2, point)
        on_path = 0.0 < t < 1.0 and lateral <= tolerance
        if index in locmap.on_direct_path and not on_path:
            raise ConfigError(
                f"location {index} must lie on the Tx1-Rx2 segment "
                f"(lateral offset {lateral:.3f} m)"
            )
        if index not in locmap.on_direct_path and on_path:
            raise ConfigError(
                f"location {index} must be deviated from the Tx1-Rx2 segment"
            )
    return locmap


def bind_scenario(
    code: ScenarioCode, base: Scene, locmap: LocationMap | None = None
) -> Scene:
    """Return the base scene with the code's persons standing in it."""
    if locmap is None:
        locmap = location_map_from_scene(base)
    existing = {p.label for p in base.persons}
    persons = list(base.persons)
    for entry in code.entries:
        if entry.label in existing:
            raise ConfigError(f"person label {entry.label!r} already bound")
        if entry.location not in locmap.loc_coordinates:
            raise ConfigError(f"unknown location index {entry.location}")
        existing.add(entry.label)
        persons.append(
            make_person(base, entry.label, entry.location, entry.orientation)
        )
    return base.with_persons(tuple(persons))


# ---------------------------------------------------------------------------
# Campaign files: newline-separated codes, '#' comments


def parse_campaign_text(text: str) -> list[ScenarioCode]:
    codes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            codes.append(parse_scenario_code(line))
        except ScenarioParseError as exc:
            raise ScenarioParseError(
                f"line {lineno}: {exc.message}", exc.offset
            ) from exc
    return codes


def read_campaign_file(path) -> list[ScenarioCode]:
    return parse_campaign_text(Path(path).read_text())
