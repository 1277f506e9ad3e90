"""The virtual menu: normalized action regions, hit-testing, overlay drawing.

Regions live in normalized [0,1] coordinates so one layout works at any
capture resolution. Containment is half-open (low edge in, high edge out),
which makes abutting regions unambiguous. The overlay renderer uses a fixed
palette and fixed stroke rules so rendered frames are bit-exact: menu
outlines white, caption anchor ticks light gray (drawn on outline pixels),
hover highlight green, blob boxes yellow, crosshair red.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .control import PlayerAction
from .frame import Frame

OUTLINE_RGB = (255, 255, 255)
CAPTION_TICK_RGB = (192, 192, 192)
HOVER_RGB = (0, 255, 0)
CROSSHAIR_RGB = (255, 0, 0)
BLOB_BOX_RGB = (255, 255, 0)
_CROSSHAIR_ARM = 5


@dataclass(frozen=True)
class MenuRegion:
    id: str
    action: PlayerAction
    rect: tuple[float, float, float, float]  # x0, y0, x1, y1 normalized
    caption: str

    def __post_init__(self):
        x0, y0, x1, y1 = self.rect
        if not (0.0 < x0 < x1 < 1.0 and 0.0 < y0 < y1 < 1.0):
            raise ValueError(f"region {self.id!r}: rect must lie strictly inside the unit square")


def _rects_overlap(a: tuple, b: tuple) -> bool:
    # shared edges are fine; only interior intersection counts
    return not (a[2] <= b[0] or b[2] <= a[0] or a[3] <= b[1] or b[3] <= a[1])


@dataclass(frozen=True)
class MenuModel:
    regions: tuple[MenuRegion, ...]

    def __post_init__(self):
        ids = [r.id for r in self.regions]
        if len(set(ids)) != len(ids):
            raise ValueError("region ids must be unique")
        for i, a in enumerate(self.regions):
            for b in self.regions[i + 1 :]:
                if _rects_overlap(a.rect, b.rect):
                    raise ValueError(f"regions {a.id!r} and {b.id!r} overlap")

    def region(self, region_id: str) -> MenuRegion:
        for r in self.regions:
            if r.id == region_id:
                return r
        raise KeyError(region_id)

    def action_for(self, region_id: str) -> PlayerAction:
        return self.region(region_id).action


@dataclass(frozen=True)
class OverlaySpec:
    """Everything render_overlay draws on top of a frame."""

    menu: MenuModel
    pointer: Optional[tuple[float, float]] = None  # pixels
    hovered: Optional[str] = None
    dwell_progress: float = 0.0
    blobs: tuple[tuple[int, int, int, int], ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.dwell_progress <= 1.0:
            raise ValueError(f"dwell_progress must be in [0, 1], got {self.dwell_progress}")
        if self.hovered is not None:
            self.menu.region(self.hovered)  # raises KeyError if unknown


def hit_test(
    menu: MenuModel,
    point: tuple[float, float],
    inflate: float = 0.0,
    hovered: Optional[str] = None,
) -> Optional[str]:
    """Return the id of the region containing a normalized point, if any.

    Containment includes the low edge and excludes the high edge. When
    `hovered` is given, that region alone is inflated by `inflate` on every
    side and checked first, implementing hover hysteresis.
    """
    px, py = point
    if hovered is not None:
        x0, y0, x1, y1 = menu.region(hovered).rect
        if x0 - inflate <= px < x1 + inflate and y0 - inflate <= py < y1 + inflate:
            return hovered
    for r in menu.regions:
        if r.id == hovered:
            continue
        x0, y0, x1, y1 = r.rect
        if x0 <= px < x1 and y0 <= py < y1:
            return r.id
    return None


_DEFAULT_STRIP = (
    ("play_pause", PlayerAction.PLAY_PAUSE, "Play/Pause"),
    ("stop", PlayerAction.STOP, "Stop"),
    ("prev", PlayerAction.PREV, "Prev"),
    ("next", PlayerAction.NEXT, "Next"),
    ("vol_down", PlayerAction.VOL_DOWN, "Vol -"),
    ("vol_up", PlayerAction.VOL_UP, "Vol +"),
    ("mute", PlayerAction.MUTE, "Mute"),
)


def default_menu() -> MenuModel:
    """Seven action buttons in a vertical strip on the left edge."""
    regions = []
    for i, (rid, action, caption) in enumerate(_DEFAULT_STRIP):
        y0 = 0.05 + i * 0.135
        regions.append(MenuRegion(rid, action, (0.02, y0, 0.14, y0 + 0.09), caption))
    return MenuModel(tuple(regions))


def _rect_px(rect: tuple, width: int, height: int) -> tuple[int, int, int, int]:
    x0 = round(rect[0] * (width - 1))
    y0 = round(rect[1] * (height - 1))
    x1 = round(rect[2] * (width - 1))
    y1 = round(rect[3] * (height - 1))
    return x0, y0, x1, y1


def _draw_outline(img: np.ndarray, box: tuple, color: tuple) -> None:
    h, w = img.shape[:2]
    x0, y0, x1, y1 = box
    x0, x1 = max(x0, 0), min(x1, w - 1)
    y0, y1 = max(y0, 0), min(y1, h - 1)
    if x0 > x1 or y0 > y1:
        return
    img[y0, x0 : x1 + 1] = color
    img[y1, x0 : x1 + 1] = color
    img[y0 : y1 + 1, x0] = color
    img[y0 : y1 + 1, x1] = color


def render_overlay(frame: Frame, spec: OverlaySpec) -> Frame:
    """Compose the menu, hover state, blob boxes, and pointer onto a copy.

    Pixels outside drawn primitives are untouched; identical inputs give
    identical output bytes.
    """
    img = frame.pixels.copy()
    h, w = img.shape[:2]

    for r in spec.menu.regions:
        box = _rect_px(r.rect, w, h)
        is_hovered = r.id == spec.hovered
        _draw_outline(img, box, HOVER_RGB if is_hovered else OUTLINE_RGB)
        # caption anchor tick: first pixels of the top edge, on the outline
        x0, y0, x1, y1 = box
        tick_end = min(x0 + 2, x1)
        img[y0, x0 : tick_end + 1] = CAPTION_TICK_RGB
        if is_hovered:
            inner_w = x1 - x0 - 1
            inner_h = y1 - y0 - 1
            if inner_w > 0 and inner_h > 0:
                filled = int(spec.dwell_progress * inner_w + 0.5)
                if filled > 0:
                    bar_h = min(3, inner_h)
                    img[y1 - bar_h : y1, x0 + 1 : x0 + 1 + filled] = HOVER_RGB

    for bbox in spec.blobs:
        _draw_outline(img, tuple(bbox), BLOB_BOX_RGB)

    if spec.pointer is not None:
        cx = min(max(int(round(spec.pointer[0])), 0), w - 1)
        cy = min(max(int(round(spec.pointer[1])), 0), h - 1)
        img[cy, max(cx - _CROSSHAIR_ARM, 0) : min(cx + _CROSSHAIR_ARM, w - 1) + 1] = CROSSHAIR_RGB
        img[max(cy - _CROSSHAIR_ARM, 0) : min(cy + _CROSSHAIR_ARM, h - 1) + 1, cx] = CROSSHAIR_RGB

    return Frame(img, frame.timestamp_ms)
