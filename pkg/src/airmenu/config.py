"""Pipeline configuration: one strict JSON document holding every tunable.

Unknown keys are rejected at every level so a typo cannot silently fall back
to a default. The live-tunable subset (hsv_range, dwell_ms, blur_radius,
min_area, alpha) can be swapped at a frame boundary while running.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from typing import Optional, Union

from .control import PlayerAction
from .menu import MenuModel, MenuRegion, default_menu
from .pixelops import HsvRange

TUNABLE_KEYS = frozenset({"hsv_range", "dwell_ms", "blur_radius", "min_area", "alpha"})

_HSV_KEYS = ("h_lo", "h_hi", "s_lo", "s_hi", "v_lo", "v_hi")
_REGION_KEYS = {"id", "action", "rect", "caption"}
_ACTION_NAMES = {a.value for a in PlayerAction}


class ConfigError(ValueError):
    """A config document that cannot be used, with the offending key named."""


def _expect_int(value, key: str, minimum: int = 0) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {value}")
    return value


def _expect_number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return float(value)


def _parse_hsv_range(value) -> HsvRange:
    if not isinstance(value, dict):
        raise ConfigError(f"hsv_range must be an object, got {value!r}")
    unknown = set(value) - set(_HSV_KEYS)
    if unknown:
        raise ConfigError(f"hsv_range has unknown keys: {sorted(unknown)}")
    missing = set(_HSV_KEYS) - set(value)
    if missing:
        raise ConfigError(f"hsv_range is missing keys: {sorted(missing)}")
    fields = {k: _expect_number(value[k], f"hsv_range.{k}") for k in _HSV_KEYS}
    try:
        return HsvRange(**fields)
    except ValueError as exc:
        raise ConfigError(f"hsv_range: {exc}") from None


def _parse_menu(value) -> MenuModel:
    if value == "default":
        return default_menu()
    if not isinstance(value, list) or not value:
        raise ConfigError('menu must be "default" or a non-empty list of regions')
    regions = []
    for i, item in enumerate(value):
        if not isinstance(item, dict):
            raise ConfigError(f"menu[{i}] must be an object")
        unknown = set(item) - _REGION_KEYS
        if unknown:
            raise ConfigError(f"menu[{i}] has unknown keys: {sorted(unknown)}")
        missing = _REGION_KEYS - set(item)
        if missing:
            raise ConfigError(f"menu[{i}] is missing keys: {sorted(missing)}")
        if not isinstance(item["id"], str) or not item["id"]:
            raise ConfigError(f"menu[{i}].id must be a non-empty string")
        if item["action"] not in _ACTION_NAMES:
            raise ConfigError(f"menu[{i}].action must be one of {sorted(_ACTION_NAMES)}")
        rect = item["rect"]
        if not isinstance(rect, list) or len(rect) != 4:
            raise ConfigError(f"menu[{i}].rect must be [x0, y0, x1, y1]")
        if not isinstance(item["caption"], str):
            raise ConfigError(f"menu[{i}].caption must be a string")
        try:
            regions.append(
                MenuRegion(
                    id=item["id"],
                    action=PlayerAction(item["action"]),
                    rect=tuple(_expect_number(c, f"menu[{i}].rect") for c in rect),
                    caption=item["caption"],
                )
            )
        except ValueError as exc:
            raise ConfigError(f"menu[{i}]: {exc}") from None
    try:
        return MenuModel(tuple(regions))
    except ValueError as exc:
        raise ConfigError(f"menu: {exc}") from None


def _parse_listen_address(value) -> Optional[str]:
    if value is None:
        return None
    if not isinstance(value, str) or ":" not in value:
        raise ConfigError(f'listen_address must be "host:port", got {value!r}')
    host, _, port = value.rpartition(":")
    if not host:
        raise ConfigError(f'listen_address must be "host:port", got {value!r}')
    try:
        port_n = int(port)
    except ValueError:
        raise ConfigError(f"listen_address port must be an integer, got {port!r}") from None
    if not 0 <= port_n <= 65535:
        raise ConfigError(f"listen_address port out of range: {port_n}")
    return value


@dataclass(frozen=True)
class PipelineConfig:
    blur_radius: int = 1
    hsv_range: HsvRange = field(default_factory=lambda: HsvRange(100.0, 140.0, 0.6, 1.0, 0.5, 1.0))
    min_area: int = 200
    connectivity: int = 8
    alpha: float = 0.4
    dwell_ms: float = 800.0
    cooldown_ms: float = 1500.0
    hysteresis_margin: float = 0.02
    lost_timeout_ms: float = 250.0
    menu: MenuModel = field(default_factory=default_menu)
    player_socket_path: Optional[str] = None
    listen_address: Optional[str] = None
    fps_cap: float = 0.0  # 0 = process as fast as the source delivers

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        if not isinstance(doc, dict):
            raise ConfigError(f"config must be a JSON object, got {type(doc).__name__}")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        if "blur_radius" in doc:
            kwargs["blur_radius"] = _expect_int(doc["blur_radius"], "blur_radius")
        if "hsv_range" in doc:
            kwargs["hsv_range"] = _parse_hsv_range(doc["hsv_range"])
        if "min_area" in doc:
            kwargs["min_area"] = _expect_int(doc["min_area"], "min_area")
        if "connectivity" in doc:
            conn = doc["connectivity"]
            if conn not in (4, 8) or isinstance(conn, bool):
                raise ConfigError(f"connectivity must be 4 or 8, got {conn!r}")
            kwargs["connectivity"] = conn
        if "alpha" in doc:
            alpha = _expect_number(doc["alpha"], "alpha")
            if not 0.0 < alpha <= 1.0:
                raise ConfigError(f"alpha must be in (0, 1], got {alpha}")
            kwargs["alpha"] = alpha
        if "dwell_ms" in doc:
            dwell = _expect_number(doc["dwell_ms"], "dwell_ms")
            if dwell <= 0:
                raise ConfigError(f"dwell_ms must be positive, got {dwell}")
            kwargs["dwell_ms"] = dwell
        if "cooldown_ms" in doc:
            cooldown = _expect_number(doc["cooldown_ms"], "cooldown_ms")
            if cooldown < 0:
                raise ConfigError(f"cooldown_ms must be non-negative, got {cooldown}")
            kwargs["cooldown_ms"] = cooldown
        if "hysteresis_margin" in doc:
            margin = _expect_number(doc["hysteresis_margin"], "hysteresis_margin")
            if not 0.0 <= margin <= 0.5:
                raise ConfigError(f"hysteresis_margin must be in [0, 0.5], got {margin}")
            kwargs["hysteresis_margin"] = margin
        if "lost_timeout_ms" in doc:
            lost = _expect_number(doc["lost_timeout_ms"], "lost_timeout_ms")
            if lost < 0:
                raise ConfigError(f"lost_timeout_ms must be non-negative, got {lost}")
            kwargs["lost_timeout_ms"] = lost
        if "menu" in doc:
            kwargs["menu"] = _parse_menu(doc["menu"])
        if "player_socket_path" in doc:
            path = doc["player_socket_path"]
            if path is not None and not isinstance(path, str):
                raise ConfigError(f"player_socket_path must be a string or null, got {path!r}")
            kwargs["player_socket_path"] = path
        if "listen_address" in doc:
            kwargs["listen_address"] = _parse_listen_address(doc["listen_address"])
        if "fps_cap" in doc:
            cap = _expect_number(doc["fps_cap"], "fps_cap")
            if cap < 0:
                raise ConfigError(f"fps_cap must be non-negative, got {cap}")
            kwargs["fps_cap"] = cap
        return cls(**kwargs)

    def to_dict(self) -> dict:
        """Normalized, JSON-ready form; the default menu prints as "default"."""
        hsv = self.hsv_range
        menu: Union[str, list]
        if self.menu == default_menu():
            menu = "default"
        else:
            menu = [
                {
                    "id": r.id,
                    "action": r.action.value,
                    "rect": list(r.rect),
                    "caption": r.caption,
                }
                for r in self.menu.regions
            ]
        return {
            "blur_radius": self.blur_radius,
            "hsv_range": {k: getattr(hsv, k) for k in _HSV_KEYS},
            "min_area": self.min_area,
            "connectivity": self.connectivity,
            "alpha": self.alpha,
            "dwell_ms": self.dwell_ms,
            "cooldown_ms": self.cooldown_ms,
            "hysteresis_margin": self.hysteresis_margin,
            "lost_timeout_ms": self.lost_timeout_ms,
            "menu": menu,
            "player_socket_path": self.player_socket_path,
            "listen_address": self.listen_address,
            "fps_cap": self.fps_cap,
        }

    def tunables(self) -> dict:
        """The live-tunable subset, as echoed in every state snapshot."""
        hsv = self.hsv_range
        return {
            "blur_radius": self.blur_radius,
            "hsv_range": {k: getattr(hsv, k) for k in _HSV_KEYS},
            "min_area": self.min_area,
            "alpha": self.alpha,
            "dwell_ms": self.dwell_ms,
        }

    def with_updates(self, updates: dict) -> "PipelineConfig":
        """A copy with a validated tunable subset applied."""
        err = validate_updates(updates)
        if err is not None:
            raise ConfigError(err)
        merged = self.to_dict()
        merged.update(updates)
        new = PipelineConfig.from_dict(merged)
        return dataclasses.replace(
            self,
            blur_radius=new.blur_radius,
            hsv_range=new.hsv_range,
            min_area=new.min_area,
            alpha=new.alpha,
            dwell_ms=new.dwell_ms,
        )


def validate_updates(updates) -> Optional[str]:
    """Check a {"set": ...} payload; returns an error message or None if ok."""
    if not isinstance(updates, dict):
        return f"set payload must be an object, got {type(updates).__name__}"
    unknown = set(updates) - TUNABLE_KEYS
    if unknown:
        return f"not live-tunable: {sorted(unknown)}"
    if not updates:
        return "set payload is empty"
    try:
        PipelineConfig.from_dict(updates)
    except ConfigError as exc:
        return str(exc)
    return None


def load_config(path: str | os.PathLike) -> PipelineConfig:
    """Load and validate a JSON config file."""
    path = os.fspath(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return PipelineConfig.from_dict(doc)
