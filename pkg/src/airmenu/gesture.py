"""Pointer smoothing and dwell-based selection.

Pure state-transition functions: (state, inputs) -> (state, events). There
is no gesture database anywhere -- the whole recognition state is one
smoothed pointer plus one dwell tracker, both flat value objects, so memory
stays constant no matter how long the stream runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .menu import MenuModel, hit_test


class EventKind(str, Enum):
    POINTER_MOVED = "pointer_moved"
    POINTER_LOST = "pointer_lost"
    HOVER_STARTED = "hover_started"
    HOVER_PROGRESS = "hover_progress"
    SELECTED = "selected"
    HOVER_CANCELLED = "hover_cancelled"


@dataclass(frozen=True)
class GestureEvent:
    kind: EventKind
    timestamp_ms: float
    region: Optional[str] = None
    progress: Optional[float] = None  # HOVER_PROGRESS only

    def __post_init__(self):
        if self.kind is EventKind.SELECTED and self.region is None:
            raise ValueError("selected events must carry a region")
        if self.kind in (EventKind.POINTER_MOVED, EventKind.POINTER_LOST) and self.region is not None:
            raise ValueError(f"{self.kind.value} events carry no region")


@dataclass(frozen=True)
class PointerState:
    """Smoothed pointer position in fractional pixels, or absent."""

    present: bool = False
    position: Optional[tuple[float, float]] = None
    last_seen_ms: float = 0.0

    def __post_init__(self):
        if self.present and self.position is None:
            raise ValueError("a present pointer needs a position")
        if not self.present and self.position is not None:
            raise ValueError("an absent pointer carries no position")

    @classmethod
    def absent(cls) -> "PointerState":
        return cls()


@dataclass(frozen=True)
class DwellTracker:
    """Hover/dwell bookkeeping between frames.

    pointer_present and last_position exist so PointerLost fires exactly once
    per loss and PointerMoved only on actual movement.
    """

    hovered_region: Optional[str] = None
    hover_elapsed_ms: float = 0.0
    cooldown_remaining_ms: float = 0.0
    pointer_present: bool = False
    last_position: Optional[tuple[float, float]] = None

    @classmethod
    def idle(cls) -> "DwellTracker":
        return cls()


@dataclass(frozen=True)
class DwellParams:
    dwell_ms: float = 800.0
    cooldown_ms: float = 1500.0
    hysteresis_margin: float = 0.02  # normalized, applied only while hovered


def update_pointer(
    prev: PointerState,
    observation: Optional[tuple[float, float]],
    alpha: float,
    now_ms: float,
    lost_timeout_ms: float = 250.0,
) -> PointerState:
    """Fold one blob-centroid observation into the smoothed pointer.

    With an observation the position moves by exponential smoothing
    (alpha * observation + (1-alpha) * previous; the first sample bootstraps
    directly). Without one the old position is held until the pointer has
    been unseen longer than lost_timeout_ms.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if observation is not None:
        ox, oy = observation
        if prev.present:
            px, py = prev.position
            pos = (alpha * ox + (1.0 - alpha) * px, alpha * oy + (1.0 - alpha) * py)
        else:
            pos = (ox, oy)
        return PointerState(True, pos, now_ms)
    if not prev.present:
        return prev
    if now_ms - prev.last_seen_ms > lost_timeout_ms:
        return PointerState(False, None, prev.last_seen_ms)
    return prev


def update_dwell(
    tracker: DwellTracker,
    pointer: PointerState,
    menu: MenuModel,
    frame_size: tuple[int, int],
    dt_ms: float,
    params: DwellParams,
    now_ms: float = 0.0,
) -> tuple[DwellTracker, list[GestureEvent]]:
    """Advance the dwell state machine by one frame and emit events.

    The pointer is hit-tested against the menu, with the currently hovered
    region inflated by the hysteresis margin so boundary jitter cannot cancel
    a hover. A region entered this frame starts accruing dwell time on this
    same frame. Selection fires when the accrued time reaches dwell_ms and no
    cooldown is pending; the cooldown only suppresses selection, hover events
    keep flowing.
    """
    if dt_ms < 0:
        raise ValueError(f"dt_ms must be non-negative, got {dt_ms}")
    events: list[GestureEvent] = []
    cooldown = max(0.0, tracker.cooldown_remaining_ms - dt_ms)

    if not pointer.present:
        if tracker.hovered_region is not None:
            events.append(
                GestureEvent(EventKind.HOVER_CANCELLED, now_ms, region=tracker.hovered_region)
            )
        if tracker.pointer_present:
            events.append(GestureEvent(EventKind.POINTER_LOST, now_ms))
        return DwellTracker(None, 0.0, cooldown, False, None), events

    pos = pointer.position
    width, height = frame_size
    point = (pos[0] / width, pos[1] / height)
    inflate = params.hysteresis_margin if tracker.hovered_region is not None else 0.0
    region = hit_test(menu, point, inflate=inflate, hovered=tracker.hovered_region)

    if pos != tracker.last_position:
        events.append(GestureEvent(EventKind.POINTER_MOVED, now_ms))

    hovered = tracker.hovered_region
    elapsed = tracker.hover_elapsed_ms
    if region != hovered:
        if hovered is not None:
            events.append(GestureEvent(EventKind.HOVER_CANCELLED, now_ms, region=hovered))
        hovered = region
        elapsed = 0.0
        if hovered is not None:
            events.append(GestureEvent(EventKind.HOVER_STARTED, now_ms, region=hovered))
    if hovered is not None:
        elapsed = min(elapsed + dt_ms, params.dwell_ms)
        progress = elapsed / params.dwell_ms
        events.append(
            GestureEvent(EventKind.HOVER_PROGRESS, now_ms, region=hovered, progress=progress)
        )
        if elapsed >= params.dwell_ms and cooldown == 0.0:
            events.append(GestureEvent(EventKind.SELECTED, now_ms, region=hovered))
            elapsed = 0.0
            cooldown = params.cooldown_ms
    return DwellTracker(hovered, elapsed, cooldown, True, pos), events
