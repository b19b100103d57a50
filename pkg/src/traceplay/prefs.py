"""Visualization preferences with XML persistence.

Schema: root ``<preferences version="1">`` with ``<colors>``,
``<terrain>``, ``<radioRange>``, ``<filters>``, ``<directories>`` and
``<playback>`` children. Unknown elements are ignored with a warning;
missing ones take defaults, so old files keep loading.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from xml.dom import minidom

from .errors import PrefsError

log = logging.getLogger(__name__)

DEFAULT_PALETTE = (
    (230, 25, 75),
    (60, 180, 75),
    (255, 225, 25),
    (0, 130, 200),
    (245, 130, 48),
    (145, 30, 180),
    (70, 240, 240),
    (240, 50, 230),
)


@dataclass(frozen=True)
class Colors:
    """Named RGB values for nodes, transmissions and partitions."""

    send: tuple[int, int, int] = (0, 90, 200)
    receive: tuple[int, int, int] = (0, 150, 60)
    forward: tuple[int, int, int] = (255, 140, 0)
    drop: tuple[int, int, int] = (220, 30, 30)
    broadcast: tuple[int, int, int] = (150, 40, 220)
    node_default: tuple[int, int, int] = (40, 60, 90)
    node_grayed: tuple[int, int, int] = (170, 170, 170)
    background: tuple[int, int, int] = (255, 255, 255)
    partition_palette: tuple[tuple[int, int, int], ...] = DEFAULT_PALETTE

    def by_key(self, key: str) -> tuple[int, int, int]:
        """Color for a style color key (send/receive/forward/drop/broadcast)."""
        return getattr(self, key)


@dataclass(frozen=True)
class Preferences:
    colors: Colors = Colors()
    terrain: tuple[float, float] = (1000.0, 1000.0)
    radio_range: float = 250.0
    show_routing: bool = True
    show_agent: bool = True
    screenshot_dir: str = "."
    playback_speed: float = 1.0

    def validate(self) -> None:
        width, height = self.terrain
        if width < 0:
            raise PrefsError("terrain@width must be >= 0")
        if height < 0:
            raise PrefsError("terrain@height must be >= 0")
        if self.radio_range < 0:
            raise PrefsError("radioRange must be >= 0")
        if not self.colors.partition_palette:
            raise PrefsError("colors/partitionPalette must hold at least one color")


# XML element names <-> Colors field names.
_COLOR_ELEMENTS = (
    ("send", "send"),
    ("receive", "receive"),
    ("forward", "forward"),
    ("drop", "drop"),
    ("broadcast", "broadcast"),
    ("nodeDefault", "node_default"),
    ("nodeGrayed", "node_grayed"),
    ("background", "background"),
)


def format_color(rgb: tuple[int, int, int]) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def parse_color(text: str, where: str) -> tuple[int, int, int]:
    value = text.strip()
    if len(value) != 7 or not value.startswith("#"):
        raise PrefsError(f"{where}: expected #rrggbb, got {text!r}")
    try:
        return tuple(int(value[i : i + 2], 16) for i in (1, 3, 5))  # type: ignore[return-value]
    except ValueError:
        raise PrefsError(f"{where}: expected #rrggbb, got {text!r}") from None


def save_prefs(prefs: Preferences, path) -> None:
    prefs.validate()
    root = ET.Element("preferences", version="1")
    colors = ET.SubElement(root, "colors")
    for element, attr in _COLOR_ELEMENTS:
        ET.SubElement(colors, element).text = format_color(getattr(prefs.colors, attr))
    palette = ET.SubElement(colors, "partitionPalette")
    for rgb in prefs.colors.partition_palette:
        ET.SubElement(palette, "color").text = format_color(rgb)
    ET.SubElement(root, "terrain", width=repr(prefs.terrain[0]), height=repr(prefs.terrain[1]))
    ET.SubElement(root, "radioRange").text = repr(prefs.radio_range)
    ET.SubElement(
        root,
        "filters",
        showRouting=_bool_text(prefs.show_routing),
        showAgent=_bool_text(prefs.show_agent),
    )
    ET.SubElement(root, "directories", screenshotDir=prefs.screenshot_dir)
    ET.SubElement(root, "playback", speed=repr(prefs.playback_speed))
    pretty = minidom.parseString(ET.tostring(root, encoding="unicode")).toprettyxml(indent="  ")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(pretty)


def _bool_text(value: bool) -> str:
    return "true" if value else "false"


def _parse_bool(text: str, where: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise PrefsError(f"{where}: expected true/false, got {text!r}")


def _parse_float(text: str, where: str) -> float:
    try:
        return float(text.strip())
    except ValueError:
        raise PrefsError(f"{where}: expected a number, got {text!r}") from None


def load_prefs(path) -> Preferences:
    """Load preferences; missing elements take defaults, unknown ones warn.

    Malformed XML raises with the line/column; out-of-range numbers raise
    naming the element path.
    """
    try:
        tree = ET.parse(path)
    except ET.ParseError as exc:
        line, column = exc.position
        raise PrefsError(f"{path}: malformed XML at line {line}, column {column}: {exc.msg}") from None
    except OSError as exc:
        raise PrefsError(f"{path}: {exc}") from None
    root = tree.getroot()
    if root.tag != "preferences":
        raise PrefsError(f"{path}: root element is <{root.tag}>, expected <preferences>")
    if root.get("version") != "1":
        raise PrefsError(f"{path}: unsupported preferences version {root.get('version')!r}")

    prefs = Preferences()
    colors = prefs.colors
    for child in root:
        if child.tag == "colors":
            updates = {}
            for element in child:
                matched = False
                for name, attr in _COLOR_ELEMENTS:
                    if element.tag == name:
                        updates[attr] = parse_color(element.text or "", f"colors/{name}")
                        matched = True
                        break
                if matched:
                    continue
                if element.tag == "partitionPalette":
                    palette = tuple(
                        parse_color(entry.text or "", "colors/partitionPalette/color")
                        for entry in element
                        if entry.tag == "color"
                    )
                    if not palette:
                        raise PrefsError("colors/partitionPalette must hold at least one color")
                    updates["partition_palette"] = palette
                else:
                    log.warning("%s: ignoring unknown element colors/%s", path, element.tag)
            colors = replace(colors, **updates)
        elif child.tag == "terrain":
            width = _parse_float(child.get("width", "1000"), "terrain@width")
            height = _parse_float(child.get("height", "1000"), "terrain@height")
            if width < 0:
                raise PrefsError("terrain@width must be >= 0")
            if height < 0:
                raise PrefsError("terrain@height must be >= 0")
            prefs = replace(prefs, terrain=(width, height))
        elif child.tag == "radioRange":
            radio_range = _parse_float(child.text or "", "radioRange")
            if radio_range < 0:
                raise PrefsError("radioRange must be >= 0")
            prefs = replace(prefs, radio_range=radio_range)
        elif child.tag == "filters":
            prefs = replace(
                prefs,
                show_routing=_parse_bool(child.get("showRouting", "true"), "filters@showRouting"),
                show_agent=_parse_bool(child.get("showAgent", "true"), "filters@showAgent"),
            )
        elif child.tag == "directories":
            prefs = replace(prefs, screenshot_dir=child.get("screenshotDir", "."))
        elif child.tag == "playback":
            prefs = replace(prefs, playback_speed=_parse_float(child.get("speed", "1.0"), "playback@speed"))
        else:
            log.warning("%s: ignoring unknown element %s", path, child.tag)
    prefs = replace(prefs, colors=colors)
    prefs.validate()
    return prefs


def prefs_to_payload(prefs: Preferences) -> dict:
    """JSON-shaped mirror of the XML schema, used by the HTTP interface."""
    return {
        "colors": {
            **{attr: format_color(getattr(prefs.colors, attr)) for _, attr in _COLOR_ELEMENTS},
            "partition_palette": [format_color(rgb) for rgb in prefs.colors.partition_palette],
        },
        "terrain": [prefs.terrain[0], prefs.terrain[1]],
        "radio_range": prefs.radio_range,
        "filters": {"show_routing": prefs.show_routing, "show_agent": prefs.show_agent},
        "screenshot_dir": prefs.screenshot_dir,
        "playback_speed": prefs.playback_speed,
    }


def prefs_from_payload(payload: dict) -> Preferences:
    prefs = Preferences()
    colors = prefs.colors
    if "colors" in payload:
        data = payload["colors"]
        updates = {
            attr: parse_color(data[attr], f"colors/{attr}")
            for _, attr in _COLOR_ELEMENTS
            if attr in data
        }
        if "partition_palette" in data:
            palette = tuple(parse_color(text, "colors/partition_palette") for text in data["partition_palette"])
            if not palette:
                raise PrefsError("colors/partition_palette must hold at least one color")
            updates["partition_palette"] = palette
        colors = replace(colors, **updates)
    if "terrain" in payload:
        width, height = payload["terrain"]
        prefs = replace(prefs, terrain=(float(width), float(height)))
    if "radio_range" in payload:
        prefs = replace(prefs, radio_range=float(payload["radio_range"]))
    if "filters" in payload:
        filters = payload["filters"]
        prefs = replace(
            prefs,
            show_routing=bool(filters.get("show_routing", True)),
            show_agent=bool(filters.get("show_agent", True)),
        )
    if "screenshot_dir" in payload:
        prefs = replace(prefs, screenshot_dir=str(payload["screenshot_dir"]))
    if "playback_speed" in payload:
        prefs = replace(prefs, playback_speed=float(payload["playback_speed"]))
    prefs = replace(prefs, colors=colors)
    prefs.validate()
    return prefs
