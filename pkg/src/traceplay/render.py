"""Headless deterministic frame renderer and PNG export.

No anti-aliasing anywhere: identical frame specs must produce
byte-identical rasters so golden-image tests stay stable.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass

from PIL import Image, ImageDraw, ImageFont

from .errors import TraceError
from .model import TraceEvent
from .partitions import PartitionSet, coverage_geometry
from .prefs import Preferences
from .state import NetworkState
from .styles import arrow_style

log = logging.getLogger(__name__)

NODE_RADIUS = 6
RING_RADIUS = 18
PARTITION_ALPHA = 70


@dataclass(frozen=True)
class Viewport:
    """Affine terrain-to-pixel mapping, y axis flipped to screen convention."""

    origin_x: float
    origin_y: float
    scale: float  # pixels per meter
    width_px: int
    height_px: int

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("viewport scale must be positive")

    def to_px(self, x: float, y: float) -> tuple[int, int]:
        return (
            round((x - self.origin_x) * self.scale),
            round(self.height_px - (y - self.origin_y) * self.scale),
        )

    def to_world(self, px: float, py: float) -> tuple[float, float]:
        return (
            px / self.scale + self.origin_x,
            (self.height_px - py) / self.scale + self.origin_y,
        )

    @classmethod
    def fit(cls, terrain: tuple[float, float], width_px: int = 800, height_px: int = 800) -> Viewport:
        """Viewport showing the whole terrain, zoom being a pure scale."""
        width, height = terrain
        if width <= 0 or height <= 0:
            return cls(0.0, 0.0, 1.0, width_px, height_px)
        return cls(0.0, 0.0, min(width_px / width, height_px / height), width_px, height_px)


@dataclass
class FrameSpec:
    """Everything one frame needs; rendering it twice gives identical bytes."""

    state: NetworkState
    prefs: Preferences
    viewport: Viewport
    event: TraceEvent | None = None
    partitions: PartitionSet | None = None


def render_frame(spec: FrameSpec, diagnostics: list[str] | None = None) -> Image.Image:
    """Draw one frame: background, partition disks, current-event glyph,
    nodes with id labels. Returns an 8-bit RGBA image."""
    prefs = spec.prefs
    viewport = spec.viewport
    base = Image.new("RGBA", (viewport.width_px, viewport.height_px), prefs.colors.background + (255,))

    if spec.partitions is not None:
        overlay = Image.new("RGBA", base.size, (0, 0, 0, 0))
        overlay_draw = ImageDraw.Draw(overlay)
        palette = prefs.colors.partition_palette
        for component in coverage_geometry(spec.partitions, spec.state):
            color = palette[component.color_key % len(palette)] + (PARTITION_ALPHA,)
            for disk in component.disks:
                cx, cy = viewport.to_px(disk.x, disk.y)
                radius = max(1, round(disk.radius * viewport.scale))
                overlay_draw.ellipse([cx - radius, cy - radius, cx + radius, cy + radius], fill=color)
        base = Image.alpha_composite(base, overlay)

    draw = ImageDraw.Draw(base)
    if spec.event is not None:
        _draw_transmission(draw, spec, diagnostics)

    font = ImageFont.load_default()
    for node_id in sorted(spec.state.nodes):
        node = spec.state.nodes[node_id]
        color = (prefs.colors.node_default if node.settled else prefs.colors.node_grayed) + (255,)
        cx, cy = viewport.to_px(node.pos[0], node.pos[1])
        draw.ellipse([cx - NODE_RADIUS, cy - NODE_RADIUS, cx + NODE_RADIUS, cy + NODE_RADIUS], fill=color)
        draw.text((cx + NODE_RADIUS + 2, cy - NODE_RADIUS - 2), str(node_id), fill=color, font=font)
    return base


def _draw_transmission(draw: ImageDraw.ImageDraw, spec: FrameSpec, diagnostics: list[str] | None) -> None:
    event = spec.event
    prefs = spec.prefs
    style = arrow_style(event.layer, event.action, broadcast=event.broadcast_next_hop)
    if style is None:
        return
    if event.layer.is_routing and not prefs.show_routing:
        return
    if event.layer.is_agent and not prefs.show_agent:
        return
    color = prefs.colors.by_key(style.color_key) + (255,)
    width = 4 if style.thickness == "fat" else 2

    if style.glyph in ("node-highlight", "ring"):
        node = spec.state.nodes.get(event.node_id)
        if node is None:
            _note(diagnostics, f"glyph for event {event.event_index} skipped: node {event.node_id} missing")
            return
        cx, cy = spec.viewport.to_px(node.pos[0], node.pos[1])
        radius = NODE_RADIUS + 4 if style.glyph == "node-highlight" else RING_RADIUS
        draw.ellipse([cx - radius, cy - radius, cx + radius, cy + radius], outline=color, width=width)
        return

    src = spec.state.nodes.get(event.hop_src) if event.hop_src is not None else None
    dst = spec.state.nodes.get(event.hop_dst) if event.hop_dst is not None else None
    if src is None or dst is None:
        _note(
            diagnostics,
            f"arrow for event {event.event_index} skipped: hop node missing from state",
        )
        return
    p0 = spec.viewport.to_px(src.pos[0], src.pos[1])
    p1 = spec.viewport.to_px(dst.pos[0], dst.pos[1])
    if style.dash == "dashed":
        _dashed_line(draw, p0, p1, color, width)
    else:
        draw.line([p0, p1], fill=color, width=width)
    _arrow_head(draw, p0, p1, color)


def _note(diagnostics: list[str] | None, message: str) -> None:
    log.debug(message)
    if diagnostics is not None:
        diagnostics.append(message)


def _dashed_line(draw, p0, p1, color, width, dash: float = 6.0, gap: float = 4.0) -> None:
    x0, y0 = p0
    x1, y1 = p1
    length = math.hypot(x1 - x0, y1 - y0)
    if length == 0:
        return
    ux, uy = (x1 - x0) / length, (y1 - y0) / length
    position = 0.0
    while position < length:
        end = min(position + dash, length)
        draw.line(
            [
                (round(x0 + ux * position), round(y0 + uy * position)),
                (round(x0 + ux * end), round(y0 + uy * end)),
            ],
            fill=color,
            width=width,
        )
        position = end + gap


def _arrow_head(draw, p0, p1, color, size: float = 9.0) -> None:
    x0, y0 = p0
    x1, y1 = p1
    length = math.hypot(x1 - x0, y1 - y0)
    if length == 0:
        return
    ux, uy = (x1 - x0) / length, (y1 - y0) / length
    bx, by = x1 - ux * size, y1 - uy * size
    px, py = -uy * size / 2, ux * size / 2
    draw.polygon(
        [p1, (round(bx + px), round(by + py)), (round(bx - px), round(by - py))],
        fill=color,
    )


def export_png(image: Image.Image, path) -> str:
    """Write the raster as PNG; decoding it back gives the identical image."""
    target = os.fspath(path)
    try:
        image.save(target, format="PNG")
    except OSError as exc:
        raise TraceError(f"cannot write PNG {target}: {exc}") from exc
    return target
