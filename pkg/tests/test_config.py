import copy
import json

import pytest

from thzvsar.config import ConfigError, default_config_path, load_config, parse_config


@pytest.fixture
def doc():
    return json.loads(default_config_path().read_text())


def test_shipped_scenario_loads():
    cfg = load_config()
    assert cfg.radar_params().n_fast == 1040
    frames = cfg.frames()
    assert [f.n_pulses for f in frames] == [600, 600]
    assert frames[1].theta_k == pytest.approx(0.7853981633974483)
    assert len(cfg.scene_model()) == 9


def test_unknown_keys_are_reported_with_paths(doc):
    doc["radar"]["carrier_freq"] = 1.0
    doc["focus"]["tapz"] = 8
    with pytest.raises(ConfigError) as exc:
        parse_config(doc)
    joined = "\n".join(exc.value.errors)
    assert "radar.carrier_freq" in joined and "focus.tapz" in joined
    assert len(exc.value.errors) == 2


def test_all_problems_listed_at_once(doc):
    doc["radar"]["bandwidth_hz"] = -1
    doc["geometry"]["pulses_per_frame"] = 1
    with pytest.raises(ConfigError) as exc:
        parse_config(doc)
    paths = {e.split(":")[0] for e in exc.value.errors}
    assert {"radar.bandwidth_hz", "geometry.pulses_per_frame"} <= paths


def test_far_target_cites_the_radius_guard(doc):
    doc["scene"]["targets"].append({"x_m": 10000, "y_m": 0})
    with pytest.raises(ConfigError) as exc:
        parse_config(doc)
    (err,) = exc.value.errors
    assert err.startswith("scene.targets.9:") and "radius guard of 50 m" in err


def test_empty_scene_is_valid(doc):
    doc["scene"]["targets"] = []
    assert len(parse_config(doc).scene_model()) == 0


def test_odd_taps_rejected(doc):
    doc["focus"]["interp_taps"] = 7
    with pytest.raises(ConfigError, match="even"):
        parse_config(doc)


def test_defaults_fill_optional_sections(doc):
    slim = {k: copy.deepcopy(doc[k]) for k in ("radar", "geometry")}
    cfg = parse_config(slim)
    assert cfg.focus.method == "cs" and cfg.simulation.mode == "raw"
    assert len(cfg.scene_model()) == 0


def test_unreadable_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(bad)
