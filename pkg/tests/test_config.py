import copy
import json
import random

import pytest

from airmenu import ConfigError, PipelineConfig, default_menu, load_config
from airmenu.config import validate_updates

VALID_DOC = {
    "blur_radius": 1,
    "hsv_range": {"h_lo": 100.0, "h_hi": 140.0, "s_lo": 0.6, "s_hi": 1.0, "v_lo": 0.5, "v_hi": 1.0},
    "min_area": 200,
    "connectivity": 8,
    "alpha": 0.4,
    "dwell_ms": 800.0,
    "cooldown_ms": 1500.0,
    "hysteresis_margin": 0.02,
    "lost_timeout_ms": 250.0,
    "menu": "default",
    "player_socket_path": None,
    "listen_address": "127.0.0.1:8765",
    "fps_cap": 0.0,
}


class TestFromDict:
    def test_empty_doc_gives_defaults(self):
        cfg = PipelineConfig.from_dict({})
        assert cfg == PipelineConfig()
        assert cfg.menu == default_menu()

    def test_full_doc(self):
        cfg = PipelineConfig.from_dict(VALID_DOC)
        assert cfg.blur_radius == 1
        assert cfg.hsv_range.h_lo == 100.0
        assert cfg.listen_address == "127.0.0.1:8765"

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="blur_radis"):
            PipelineConfig.from_dict({"blur_radis": 1})

    def test_nested_unknown_key_rejected(self):
        doc = copy.deepcopy(VALID_DOC)
        doc["hsv_range"]["hue_low"] = 1.0
        with pytest.raises(ConfigError, match="hue_low"):
            PipelineConfig.from_dict(doc)

    @pytest.mark.parametrize(
        "key,value,msg",
        [
            ("blur_radius", -1, ">="),
            ("blur_radius", 1.5, "integer"),
            ("blur_radius", True, "integer"),
            ("min_area", "big", "integer"),
            ("connectivity", 6, "4 or 8"),
            ("alpha", 0.0, "alpha"),
            ("alpha", 1.5, "alpha"),
            ("dwell_ms", 0, "positive"),
            ("dwell_ms", -5, "positive"),
            ("cooldown_ms", -1, "non-negative"),
            ("hysteresis_margin", 0.7, "0.5"),
            ("lost_timeout_ms", -2, "non-negative"),
            ("fps_cap", -30, "non-negative"),
            ("player_socket_path", 5, "string"),
            ("listen_address", "nocolon", "host:port"),
            ("listen_address", "host:70000", "port"),
            ("menu", [], "menu"),
        ],
    )
    def test_domain_violations(self, key, value, msg):
        with pytest.raises(ConfigError, match=msg):
            PipelineConfig.from_dict({key: value})

    def test_custom_menu_layout(self):
        doc = {
            "menu": [
                {"id": "go", "action": "play_pause", "rect": [0.1, 0.1, 0.3, 0.2], "caption": "Go"},
                {"id": "halt", "action": "stop", "rect": [0.1, 0.3, 0.3, 0.4], "caption": "Halt"},
            ]
        }
        cfg = PipelineConfig.from_dict(doc)
        assert [r.id for r in cfg.menu.regions] == ["go", "halt"]

    def test_menu_overlap_rejected(self):
        doc = {
            "menu": [
                {"id": "a", "action": "stop", "rect": [0.1, 0.1, 0.3, 0.3], "caption": "A"},
                {"id": "b", "action": "mute", "rect": [0.2, 0.2, 0.4, 0.4], "caption": "B"},
            ]
        }
        with pytest.raises(ConfigError, match="overlap"):
            PipelineConfig.from_dict(doc)

    def test_menu_bad_action(self):
        doc = {"menu": [{"id": "a", "action": "warp", "rect": [0.1, 0.1, 0.3, 0.3], "caption": "A"}]}
        with pytest.raises(ConfigError, match="action"):
            PipelineConfig.from_dict(doc)


class TestNormalization:
    def test_roundtrip_is_stable(self):
        cfg = PipelineConfig.from_dict(VALID_DOC)
        d1 = cfg.to_dict()
        d2 = PipelineConfig.from_dict(d1).to_dict()
        assert d1 == d2
        json.dumps(d1)  # must be JSON-ready

    def test_default_menu_prints_as_default(self):
        assert PipelineConfig().to_dict()["menu"] == "default"

    def test_custom_menu_roundtrips(self):
        doc = {
            "menu": [
                {"id": "go", "action": "play_pause", "rect": [0.1, 0.1, 0.3, 0.2], "caption": "Go"}
            ]
        }
        out = PipelineConfig.from_dict(doc).to_dict()["menu"]
        assert out == doc["menu"]


class TestLiveUpdates:
    def test_valid_update_applies(self):
        cfg = PipelineConfig()
        new = cfg.with_updates({"dwell_ms": 1200.0, "blur_radius": 2})
        assert new.dwell_ms == 1200.0 and new.blur_radius == 2
        assert new.cooldown_ms == cfg.cooldown_ms
        assert new.menu is cfg.menu

    def test_non_tunable_key_rejected(self):
        assert "not live-tunable" in validate_updates({"connectivity": 4})
        with pytest.raises(ConfigError):
            PipelineConfig().with_updates({"connectivity": 4})

    def test_invalid_value_rejected(self):
        assert validate_updates({"dwell_ms": -5}) is not None
        assert validate_updates({"dwell_ms": 900.0}) is None

    def test_empty_update_rejected(self):
        assert validate_updates({}) is not None
        assert validate_updates(["dwell_ms"]) is not None

    def test_hsv_range_update(self):
        new_range = {"h_lo": 10.0, "h_hi": 20.0, "s_lo": 0.0, "s_hi": 1.0, "v_lo": 0.0, "v_hi": 1.0}
        cfg = PipelineConfig().with_updates({"hsv_range": new_range})
        assert cfg.hsv_range.h_lo == 10.0


class TestLoadConfig:
    def test_loads_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(VALID_DOC))
        assert load_config(path) == PipelineConfig.from_dict(VALID_DOC)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)


def _mutate(doc: dict, rnd: random.Random):
    """Schema-aware corruption: wrong types, bad domains, unknown keys."""
    doc = copy.deepcopy(doc)
    kind = rnd.randrange(6)
    if kind == 0:
        doc[rnd.choice("abcdefgh") + "_key"] = rnd.random()
    elif kind == 1:
        key = rnd.choice(list(doc))
        doc[key] = rnd.choice(["nope", None, [], {}, True])
    elif kind == 2:
        doc["hsv_range"] = {
            "h_lo": rnd.uniform(-720, 720), "h_hi": rnd.uniform(-720, 720),
            "s_lo": rnd.uniform(-2, 2), "s_hi": rnd.uniform(-2, 2),
            "v_lo": rnd.uniform(-2, 2), "v_hi": rnd.uniform(-2, 2),
        }
    elif kind == 3:
        doc["alpha"] = rnd.choice([-1.0, 0.0, 2.0, "half"])
    elif kind == 4:
        doc["menu"] = rnd.choice(
            [
                [],
                [{"id": "x"}],
                [{"id": "x", "action": "stop", "rect": [0.5, 0.5, 0.1, 0.1], "caption": ""}],
                "fancy",
                42,
            ]
        )
    else:
        doc["hsv_range"] = rnd.choice([[], "wide", 7])
    return doc


def test_fuzz_rejections_never_crash():
    rnd = random.Random(2024)
    rejected = 0
    for _ in range(10_000):
        doc = _mutate(VALID_DOC, rnd)
        try:
            PipelineConfig.from_dict(doc)
        except ConfigError as exc:
            assert str(exc)  # every rejection carries a message
            rejected += 1
    # the corruptions are genuinely invalid most of the time
    assert rejected > 9000
