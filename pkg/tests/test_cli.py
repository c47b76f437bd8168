import json

import pytest

from thzvsar import cli


def small_config(tmp_path, targets=({"x_m": 0, "y_m": 0}, {"x_m": 12, "y_m": -7}), **focus):
    n = 64
    doc = {
        "radar": {"carrier_frequency_hz": 220e9, "bandwidth_hz": 1.2e9 * n / 1040,
                  "sampling_frequency_hz": 13e6 * n / 1040, "pulse_width_s": 80e-6,
                  "prf_hz": 6000, "propagation_speed_m_per_s": 3e8},
        "geometry": {"slant_range_m": 2500, "grazing_angle_deg": 45, "speed_m_per_s": 100,
                     "frame_azimuths_deg": [0, 45], "pulses_per_frame": 64},
        "scene": {"targets": list(targets)},
        "focus": {"out_rows": 128, "out_cols": 128, "sidelobe_extent_irw": 3, **focus},
        "outputs": {"figures": False},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return path


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.mark.parametrize("method", cli.METHODS)
def test_run_writes_every_frame(tmp_path, capsys, method):
    cfg = small_config(tmp_path)
    out = tmp_path / "out"
    assert run("run", "--config", cfg, "--out", out, "--method", method) == 0
    names = sorted(p.name for p in out.iterdir())
    for k in (0, 1):
        assert f"frame_{k}.vsarph1" in names
        for ext in ("vsarim1", "pgm", "csv", "json"):
            assert f"frame_{k}_{method}.{ext}" in names
    text = capsys.readouterr().out
    assert text.count(": ok") == 2


def test_empty_scene_run_succeeds(tmp_path):
    cfg = small_config(tmp_path, targets=())
    with pytest.warns(RuntimeWarning, match="all-zero"):
        assert run("run", "--config", cfg, "--out", tmp_path / "o") == 0


def test_stages_compose(tmp_path):
    cfg, out = small_config(tmp_path), tmp_path / "o"
    assert run("simulate", "--config", cfg, "--out", out) == 0
    assert run("focus", "--config", cfg, "--out", out, "--method", "interp") == 0
    assert run("analyze", "--config", cfg, "--out", out, "--method", "interp") == 0
    assert (out / "frame_1_interp.csv").exists()


def test_analyze_without_image_fails_the_frame(tmp_path, capsys):
    cfg = small_config(tmp_path)
    assert run("analyze", "--config", cfg, "--out", tmp_path / "o") == 1
    assert "FAILED" in capsys.readouterr().out


def test_config_error_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"radar": {}, "geometry": {}, "extra": 1}))
    assert run("run", "--config", path, "--out", tmp_path / "o") == 2
    err = capsys.readouterr().err
    assert "radar.carrier_frequency_hz" in err and "extra" in err


def test_bench_rejects_too_few_reps(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("bench", "--reps", 1, "--config", small_config(tmp_path))
    assert exc.value.code == 2
    with pytest.raises(ValueError):
        cli.bench(cli.load_config(small_config(tmp_path)), 2)


def test_bench_output_and_stable_counters(tmp_path, capsys):
    cfg = small_config(tmp_path)
    assert run("bench", "--reps", 3, "--config", cfg, "--out", tmp_path / "b") == 0
    res = json.loads((tmp_path / "b" / "bench.json").read_text())
    assert res["reps"] == 3 and res["ratio_cs_over_interp"] > 0
    for m in ("cs", "interp"):
        assert res[m]["counters_stable"]
        assert len(res[m]["times_s"]) == 3
    assert res["cs"]["counters"]["interp_kernel_evals"] == 0
    assert res["interp"]["counters"]["interp_kernel_evals"] > 0
    again = cli.bench(cli.load_config(cfg), 3)
    assert again["cs"]["counters"] == res["cs"]["counters"]
    assert again["interp"]["counters"] == res["interp"]["counters"]
    assert "cs/interp median ratio" in capsys.readouterr().out


def test_two_runs_are_byte_identical(tmp_path):
    cfg = small_config(tmp_path)
    doc = json.loads(cfg.read_text())
    doc["outputs"]["figures"] = True
    cfg.write_text(json.dumps(doc))
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("run", "--config", cfg, "--out", a, "--threads", 2) == 0
    assert run("run", "--config", cfg, "--out", b) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    assert any(n.endswith(".png") for n in names)
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n


def test_noise_follows_the_seed(tmp_path):
    cfg = small_config(tmp_path)
    doc = json.loads(cfg.read_text())
    doc["simulation"] = {"snr_db": 20}
    cfg.write_text(json.dumps(doc))
    outs = []
    for seed, name in ((1, "a"), (1, "b"), (2, "c")):
        assert run("simulate", "--config", cfg, "--out", tmp_path / name, "--seed", seed) == 0
        outs.append((tmp_path / name / "frame_0.vsarph1").read_bytes())
    assert outs[0] == outs[1] != outs[2]
