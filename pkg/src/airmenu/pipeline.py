"""End-to-end frame loop: blur -> threshold -> blobs -> pointer -> dwell.

One logical owner (the caller's thread) advances all recognition state;
selected actions cross a bounded queue to a dispatcher thread so the frame
loop never blocks on the player socket, and snapshots go to sinks
(broadcast server, frame dumps) that must never stall recognition.
"""

from __future__ import annotations

import json
import logging
import os
import queue
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional, Protocol, Sequence

from .blob import Blob, filter_blobs, label_components, largest_blob
from .config import PipelineConfig
from .control import CommandRecord, PlayerAction, PlayerLink, TransportError
from .frame import Frame, write_ppm
from .gesture import (
    DwellParams,
    DwellTracker,
    EventKind,
    GestureEvent,
    PointerState,
    update_dwell,
    update_pointer,
)
from .menu import OverlaySpec, render_overlay
from .pixelops import box_blur, threshold_hsv
from .sources import FrameSource, SourceError

log = logging.getLogger(__name__)

EVENT_RING_SIZE = 32
COMMAND_QUEUE_CAPACITY = 32

Sink = Callable[["StateSnapshot", Frame], None]


class TuningIntake(Protocol):
    def poll_updates(self) -> list[dict]: ...


@dataclass(frozen=True)
class StateSnapshot:
    """Everything one processed frame produced, serializable as one JSON object."""

    frame_seq: int
    timestamp_ms: float
    blobs: tuple[Blob, ...]
    pointer: PointerState
    hovered: Optional[str]
    dwell_progress: float
    events: tuple[GestureEvent, ...]
    last_command: Optional[CommandRecord]
    latencies_us: dict[str, int]
    config: dict

    def to_dict(self) -> dict:
        pos = self.pointer.position
        cmd = self.last_command
        return {
            "frame_seq": self.frame_seq,
            "timestamp_ms": self.timestamp_ms,
            "blobs": [
                {"bbox": list(b.bbox), "area": b.area, "centroid": list(b.centroid)}
                for b in self.blobs
            ],
            "pointer": {
                "present": self.pointer.present,
                "x": None if pos is None else pos[0],
                "y": None if pos is None else pos[1],
            },
            "hovered": self.hovered,
            "dwell_progress": self.dwell_progress,
            "events": [
                {
                    "kind": e.kind.value,
                    "region": e.region,
                    "progress": e.progress,
                    "timestamp_ms": e.timestamp_ms,
                }
                for e in self.events
            ],
            "last_command": None
            if cmd is None
            else {
                "action": cmd.action.value,
                "seq": cmd.seq,
                "acked": cmd.acked,
                "sent_at_ms": cmd.sent_at_ms,
            },
            "latencies_us": dict(self.latencies_us),
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


class CommandDispatcher:
    """Feeds selected actions to the player off the frame-processing path.

    The queue is bounded; on overflow the oldest queued action is dropped
    with a warning -- interactivity beats completeness here. Transport
    errors are logged and swallowed so a dead player never stops the loop.
    """

    def __init__(self, link: PlayerLink, capacity: int = COMMAND_QUEUE_CAPACITY):
        self._link = link
        self._queue: queue.Queue = queue.Queue(maxsize=capacity)
        self._last: Optional[CommandRecord] = None
        self._lock = threading.Lock()
        self._thread = threading.Thread(target=self._run, name="command-dispatcher", daemon=True)
        self._thread.start()

    def submit(self, action: PlayerAction) -> None:
        while True:
            try:
                self._queue.put_nowait(action)
                return
            except queue.Full:
                try:
                    dropped = self._queue.get_nowait()
                    log.warning("command queue full, dropping oldest action %s", dropped.value)
                except queue.Empty:
                    pass

    def last_record(self) -> Optional[CommandRecord]:
        with self._lock:
            return self._last

    def _run(self) -> None:
        while True:
            action = self._queue.get()
            if action is None:
                return
            try:
                record = self._link.dispatch(action)
            except TransportError as exc:
                log.error("dispatch of %s failed: %s", action.value, exc)
                continue
            except Exception as exc:  # protocol errors must not kill the loop
                log.error("dispatch of %s failed: %s", action.value, exc)
                continue
            with self._lock:
                self._last = record

    def close(self, timeout: float = 5.0) -> None:
        """Drain queued commands, then stop the worker."""
        self._queue.put(None)
        self._thread.join(timeout=timeout)
        self._link.close()


class FrameDumpSink:
    """Writes every overlay frame as frame_%06d.ppm into a directory."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = os.fspath(directory)
        os.makedirs(self.directory, exist_ok=True)
        self.count = 0

    def __call__(self, snapshot: StateSnapshot, overlay: Frame) -> None:
        write_ppm(overlay, os.path.join(self.directory, f"frame_{self.count:06d}.ppm"))
        self.count += 1


def run_pipeline(
    config: PipelineConfig,
    source: FrameSource,
    sinks: Sequence[Sink] = (),
    *,
    dispatcher: Optional[CommandDispatcher] = None,
    tuning: Optional[TuningIntake] = None,
    stop: Optional[threading.Event] = None,
) -> int:
    """Run the recognition loop until the source ends or stop is set.

    Returns 0 on a clean end of stream, 1 after a source or sink failure.
    Every frame goes through the full state-machine update, in order; live
    tuning updates land atomically at frame boundaries.
    """
    pointer = PointerState.absent()
    tracker = DwellTracker.idle()
    ring: list[GestureEvent] = []
    prev_ts: Optional[float] = None
    seq = 0
    next_deadline: Optional[float] = None

    while stop is None or not stop.is_set():
        try:
            frame = source.next_frame()
        except SourceError as exc:
            log.error("frame source failed: %s", exc)
            return 1
        if frame is None:
            break

        if tuning is not None:
            for updates in tuning.poll_updates():
                config = config.with_updates(updates)
                log.info("applied live tuning update: %s", sorted(updates))

        menu = config.menu
        params = DwellParams(config.dwell_ms, config.cooldown_ms, config.hysteresis_margin)

        t0 = time.perf_counter_ns()
        blurred = box_blur(frame, config.blur_radius)
        t1 = time.perf_counter_ns()
        mask = threshold_hsv(blurred, config.hsv_range)
        t2 = time.perf_counter_ns()
        blobs = filter_blobs(label_components(mask, config.connectivity), config.min_area)
        target = largest_blob(blobs)
        t3 = time.perf_counter_ns()
        pointer = update_pointer(
            pointer,
            None if target is None else target.centroid,
            config.alpha,
            now_ms=frame.timestamp_ms,
            lost_timeout_ms=config.lost_timeout_ms,
        )
        dt = 0.0 if prev_ts is None else frame.timestamp_ms - prev_ts
        tracker, events = update_dwell(
            tracker,
            pointer,
            menu,
            (frame.width, frame.height),
            dt,
            params,
            now_ms=frame.timestamp_ms,
        )
        t4 = time.perf_counter_ns()

        if dispatcher is not None:
            for event in events:
                if event.kind is EventKind.SELECTED:
                    dispatcher.submit(menu.action_for(event.region))

        ring.extend(events)
        if len(ring) > EVENT_RING_SIZE:
            del ring[: len(ring) - EVENT_RING_SIZE]

        progress = (
            min(tracker.hover_elapsed_ms / params.dwell_ms, 1.0)
            if tracker.hovered_region is not None
            else 0.0
        )
        overlay = render_overlay(
            frame,
            OverlaySpec(
                menu=menu,
                pointer=pointer.position,
                hovered=tracker.hovered_region,
                dwell_progress=progress,
                blobs=tuple(b.bbox for b in blobs),
            ),
        )
        t5 = time.perf_counter_ns()

        snapshot = StateSnapshot(
            frame_seq=seq,
            timestamp_ms=frame.timestamp_ms,
            blobs=tuple(blobs),
            pointer=pointer,
            hovered=tracker.hovered_region,
            dwell_progress=progress,
            events=tuple(ring),
            last_command=None if dispatcher is None else dispatcher.last_record(),
            latencies_us={
                "blur": (t1 - t0) // 1000,
                "threshold": (t2 - t1) // 1000,
                "blob": (t3 - t2) // 1000,
                "track": (t4 - t3) // 1000,
                "overlay": (t5 - t4) // 1000,
                "total": (t5 - t0) // 1000,
            },
            config=config.tunables(),
        )
        try:
            for sink in sinks:
                sink(snapshot, overlay)
        except OSError as exc:
            log.error("sink failed: %s", exc)
            return 1

        prev_ts = frame.timestamp_ms
        seq += 1

        # live cameras pace themselves; everything else honors fps_cap
        if config.fps_cap > 0 and not getattr(source, "realtime", False):
            now = time.monotonic()
            if next_deadline is None:
                next_deadline = now
            next_deadline += 1.0 / config.fps_cap
            delay = next_deadline - now
            if delay > 0:
                time.sleep(delay)

    return 0


def bench_pipeline(
    frames: int, width: int, height: int, config: Optional[PipelineConfig] = None
) -> dict[str, list[int]]:
    """Per-stage latencies (microseconds) over a synthetic moving-disk run."""
    from .sources import DiskKeyframe, SyntheticScript, synthetic_source

    if config is None:
        config = PipelineConfig()
    fps = 30.0
    duration = frames * 1000.0 / fps
    radius = max(8.0, 0.05 * min(width, height))
    script = SyntheticScript(
        width=width,
        height=height,
        fps=fps,
        duration_ms=duration,
        background_rgb=(16, 16, 16),
        keyframes=(
            DiskKeyframe(0.0, (0.7, 0.1), radius, (0, 255, 0)),
            DiskKeyframe(duration, (0.2, 0.9), radius, (0, 255, 0)),
        ),
    )
    stages: dict[str, list[int]] = {}

    def collect(snapshot: StateSnapshot, overlay: Frame) -> None:
        for stage, us in snapshot.latencies_us.items():
            stages.setdefault(stage, []).append(us)

    status = run_pipeline(config, synthetic_source(script), [collect])
    if status != 0:
        raise RuntimeError("bench pipeline did not finish cleanly")
    return stages


def percentile(values: list[int], q: float) -> float:
    """Nearest-rank percentile, q in [0, 100]."""
    if not values:
        raise ValueError("no values")
    ordered = sorted(values)
    rank = max(1, int(round(q / 100.0 * len(ordered))))
    return float(ordered[min(rank, len(ordered)) - 1])
