"""Frame supply: synthetic scripts, PPM directories, and live cameras.

Every source honors the same contract: next_frame() returns frames with
strictly increasing timestamps and, once it has returned None, returns None
forever. Synthetic sources are fully deterministic -- the same script always
produces byte-identical frames -- which is what makes the pipeline testable
without a camera.
"""

from __future__ import annotations

import bisect
import math
import os
import time
from dataclasses import dataclass
from typing import Optional, Protocol, runtime_checkable

import numpy as np

from .frame import Frame, read_ppm


class SourceError(Exception):
    """A source cannot be constructed or cannot deliver frames."""


@runtime_checkable
class FrameSource(Protocol):
    fps: float

    def next_frame(self) -> Optional[Frame]: ...


def _check_rgb(rgb, what: str) -> tuple[int, int, int]:
    rgb = tuple(rgb)
    if len(rgb) != 3 or any(not isinstance(c, int) or not 0 <= c <= 255 for c in rgb):
        raise SourceError(f"{what} must be three bytes, got {rgb!r}")
    return rgb


@dataclass(frozen=True)
class DiskKeyframe:
    """Disk pose at one instant; poses between keyframes are interpolated."""

    t_ms: float
    center: tuple[float, float]  # normalized [0,1]^2
    radius_px: float
    rgb: tuple[int, int, int]


@dataclass(frozen=True)
class SyntheticScript:
    width: int
    height: int
    fps: float
    duration_ms: float
    background_rgb: tuple[int, int, int]
    keyframes: tuple[DiskKeyframe, ...]

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise SourceError(f"script dimensions must be positive, got {self.width}x{self.height}")
        if self.fps <= 0:
            raise SourceError(f"script fps must be positive, got {self.fps}")
        if self.duration_ms < 0:
            raise SourceError(f"script duration must be non-negative, got {self.duration_ms}")
        _check_rgb(self.background_rgb, "background_rgb")
        last_t = None
        for kf in self.keyframes:
            if last_t is not None and kf.t_ms <= last_t:
                raise SourceError("keyframes must be sorted by strictly increasing t_ms")
            last_t = kf.t_ms
            if kf.radius_px <= 0:
                raise SourceError(f"keyframe radius must be positive, got {kf.radius_px}")
            cx, cy = kf.center
            if not (0.0 <= cx <= 1.0 and 0.0 <= cy <= 1.0):
                raise SourceError(f"keyframe center must lie in the unit square, got {kf.center}")
            _check_rgb(kf.rgb, "keyframe rgb")

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticScript":
        try:
            keyframes = tuple(
                DiskKeyframe(
                    t_ms=float(k["t_ms"]),
                    center=(float(k["center"][0]), float(k["center"][1])),
                    radius_px=float(k["radius_px"]),
                    rgb=_check_rgb(k["rgb"], "keyframe rgb"),
                )
                for k in d.get("keyframes", [])
            )
            return cls(
                width=int(d["width"]),
                height=int(d["height"]),
                fps=float(d["fps"]),
                duration_ms=float(d["duration_ms"]),
                background_rgb=_check_rgb(d.get("background_rgb", (0, 0, 0)), "background_rgb"),
                keyframes=keyframes,
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise SourceError(f"bad synthetic script: {exc!r}") from exc

    def frame_count(self) -> int:
        return math.ceil(self.duration_ms * self.fps / 1000.0)

    def disk_at(self, t_ms: float) -> Optional[tuple[float, float, float, tuple[int, int, int]]]:
        """Interpolated (cx_px, cy_px, radius_px, rgb) at time t, or None."""
        kfs = self.keyframes
        if not kfs:
            return None
        times = [k.t_ms for k in kfs]
        i = bisect.bisect_right(times, t_ms)
        if i == 0:
            k = kfs[0]
            return (k.center[0] * self.width, k.center[1] * self.height, k.radius_px, k.rgb)
        if i == len(kfs):
            k = kfs[-1]
            return (k.center[0] * self.width, k.center[1] * self.height, k.radius_px, k.rgb)
        a, b = kfs[i - 1], kfs[i]
        f = (t_ms - a.t_ms) / (b.t_ms - a.t_ms)
        cx = a.center[0] + (b.center[0] - a.center[0]) * f
        cy = a.center[1] + (b.center[1] - a.center[1]) * f
        r = a.radius_px + (b.radius_px - a.radius_px) * f
        rgb = tuple(int(ca + (cb - ca) * f + 0.5) for ca, cb in zip(a.rgb, b.rgb))
        return (cx * self.width, cy * self.height, r, rgb)


class SyntheticSource:
    """Renders a SyntheticScript frame by frame."""

    realtime = False

    def __init__(self, script: SyntheticScript):
        self.script = script
        self.fps = script.fps
        self._i = 0
        self._n = script.frame_count()
        self._xs = np.arange(script.width, dtype=np.float64)[None, :]
        self._ys = np.arange(script.height, dtype=np.float64)[:, None]

    def next_frame(self) -> Optional[Frame]:
        if self._i >= self._n:
            return None
        t = self._i * (1000.0 / self.script.fps)
        self._i += 1
        s = self.script
        img = np.empty((s.height, s.width, 3), dtype=np.uint8)
        img[:, :] = s.background_rgb
        disk = s.disk_at(t)
        if disk is not None:
            cx, cy, r, rgb = disk
            inside = (self._xs - cx) ** 2 + (self._ys - cy) ** 2 <= r * r
            img[inside] = rgb
        return Frame(img, t)


def synthetic_source(script: SyntheticScript) -> SyntheticSource:
    return SyntheticSource(script)


class DirectorySource:
    """Replays the PPM files of a directory in lexicographic name order."""

    realtime = False

    def __init__(self, path: str | os.PathLike, fps: float):
        if fps <= 0:
            raise SourceError(f"fps must be positive, got {fps}")
        self.path = os.fspath(path)
        self.fps = fps
        if not os.path.isdir(self.path):
            raise SourceError(f"not a directory: {self.path}")
        self._files = sorted(
            os.path.join(self.path, name)
            for name in os.listdir(self.path)
            if name.endswith(".ppm")
        )
        if not self._files:
            raise SourceError(f"no .ppm files in {self.path}")
        self._i = 0
        self._done = False

    def next_frame(self) -> Optional[Frame]:
        if self._done or self._i >= len(self._files):
            self._done = True
            return None
        path = self._files[self._i]
        t = self._i * (1000.0 / self.fps)
        self._i += 1
        return read_ppm(path).with_timestamp(t)


def directory_source(path: str | os.PathLike, fps: float = 30.0) -> DirectorySource:
    return DirectorySource(path, fps)


class CameraSource:
    """Wraps a platform capture device behind the frame-source contract.

    The device's blocking read naturally delivers the freshest frame; where
    the backend supports it the internal buffer is pinned to one frame so
    stale frames are dropped rather than queued.
    """

    realtime = True

    def __init__(self, device: int | str, width: int = 640, height: int = 480, fps: float = 30.0):
        try:
            import cv2
        except ImportError:
            raise SourceError(
                "camera capture needs the opencv-python-headless package (pip install airmenu[camera])"
            ) from None
        self.fps = fps
        self._cap = cv2.VideoCapture(device)
        if not self._cap.isOpened():
            self._cap.release()
            raise SourceError(f"cannot open camera device {device!r}")
        self._cap.set(cv2.CAP_PROP_FRAME_WIDTH, width)
        self._cap.set(cv2.CAP_PROP_FRAME_HEIGHT, height)
        self._cap.set(cv2.CAP_PROP_FPS, fps)
        try:
            self._cap.set(cv2.CAP_PROP_BUFFERSIZE, 1)
        except Exception:
            pass
        self._t0: Optional[float] = None
        self._last_ts = -1.0
        self._done = False

    def next_frame(self) -> Optional[Frame]:
        if self._done:
            return None
        ok, bgr = self._cap.read()
        if not ok:
            self.release()
            return None
        now = time.monotonic()
        if self._t0 is None:
            self._t0 = now
        ts = (now - self._t0) * 1000.0
        if ts <= self._last_ts:
            ts = self._last_ts + 0.001
        self._last_ts = ts
        return Frame(np.ascontiguousarray(bgr[:, :, ::-1]), ts)

    def release(self) -> None:
        self._done = True
        if self._cap is not None:
            self._cap.release()
            self._cap = None


def camera_source(
    device: int | str, width: int = 640, height: int = 480, fps: float = 30.0
) -> CameraSource:
    return CameraSource(device, width, height, fps)
