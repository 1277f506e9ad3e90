"""airmenu: point at an on-screen menu, hold, and the media player obeys.

Camera frames are blurred, converted to HSV, thresholded to a binary mask,
and reduced to blobs; the largest blob drives a smoothed pointer that
selects virtual menu actions by dwelling on them. Selections go to a media
player over a local socket, and a WebSocket endpoint streams the augmented
feed plus structured state to operator UIs.
"""

from .blob import Blob, filter_blobs, label_components, largest_blob
from .config import ConfigError, PipelineConfig, load_config
from .control import (
    CommandRecord,
    MockPlayer,
    PlayerAction,
    PlayerLink,
    ProtocolError,
    TransportError,
    encode_command,
    parse_command,
)
from .frame import BinaryMask, FormatError, Frame, read_ppm, write_pgm, write_ppm
from .gesture import (
    DwellParams,
    DwellTracker,
    EventKind,
    GestureEvent,
    PointerState,
    update_dwell,
    update_pointer,
)
from .menu import MenuModel, MenuRegion, OverlaySpec, default_menu, hit_test, render_overlay
from .pipeline import CommandDispatcher, FrameDumpSink, StateSnapshot, run_pipeline
from .pixelops import HsvPixel, HsvRange, box_blur, rgb_to_hsv, threshold_hsv
from .sources import (
    DiskKeyframe,
    FrameSource,
    SourceError,
    SyntheticScript,
    camera_source,
    directory_source,
    synthetic_source,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryMask",
    "Blob",
    "CommandDispatcher",
    "CommandRecord",
    "ConfigError",
    "DiskKeyframe",
    "DwellParams",
    "DwellTracker",
    "EventKind",
    "FormatError",
    "Frame",
    "FrameDumpSink",
    "FrameSource",
    "GestureEvent",
    "HsvPixel",
    "HsvRange",
    "MenuModel",
    "MenuRegion",
    "MockPlayer",
    "OverlaySpec",
    "PipelineConfig",
    "PlayerAction",
    "PlayerLink",
    "PointerState",
    "ProtocolError",
    "SourceError",
    "StateSnapshot",
    "SyntheticScript",
    "TransportError",
    "box_blur",
    "camera_source",
    "default_menu",
    "directory_source",
    "encode_command",
    "filter_blobs",
    "hit_test",
    "label_components",
    "largest_blob",
    "load_config",
    "parse_command",
    "read_ppm",
    "render_overlay",
    "rgb_to_hsv",
    "run_pipeline",
    "synthetic_source",
    "threshold_hsv",
    "update_dwell",
    "update_pointer",
    "write_pgm",
    "write_ppm",
]
