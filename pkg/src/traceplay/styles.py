"""Color and shape code for transmissions, shared by renderer and UI.

Agent traffic draws fat arrows, routing traffic slim ones; sends and
forwards are dashed, receives solid. Drops highlight the node instead of
drawing an arrow, and a broadcast next hop becomes a ring glyph.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .model import AGT, Action, Layer, LayerKind, RTR


@dataclass(frozen=True)
class ArrowStyle:
    thickness: str  # "fat" (agent) or "slim" (routing)
    dash: str       # "dashed", "solid" or "none"
    color_key: str  # preference color the glyph is drawn with
    glyph: str      # "arrow", "ring" (broadcast) or "node-highlight" (drop)


def arrow_style(layer: Layer, action: Action, broadcast: bool = False) -> ArrowStyle | None:
    """Style for one transmission, or None when the layer is not drawn."""
    if layer.kind is LayerKind.AGT:
        thickness = "fat"
    elif layer.kind is LayerKind.RTR:
        thickness = "slim"
    else:
        return None
    if action is Action.DROP:
        return ArrowStyle(thickness, "none", "drop", "node-highlight")
    dash = "dashed" if action in (Action.SEND, Action.FORWARD) else "solid"
    if broadcast:
        return ArrowStyle(thickness, dash, "broadcast", "ring")
    return ArrowStyle(thickness, dash, action.name.lower(), "arrow")


def style_table() -> dict[str, dict[str, str] | None]:
    """Full style map, exported at session open so clients cannot diverge.

    Keys are ``<layer>:<action letter>:<ucast|bcast>``.
    """
    table: dict[str, dict[str, str] | None] = {}
    for layer in (AGT, RTR):
        for action in Action:
            for broadcast in (False, True):
                key = f"{layer.raw}:{action.value}:{'bcast' if broadcast else 'ucast'}"
                style = arrow_style(layer, action, broadcast)
                table[key] = asdict(style) if style else None
    return table
