import math
from pathlib import Path

import numpy as np
import pytest

from conftest import small_geom, small_radar
from thzvsar.analysis import QualityReport, TargetQuality
from thzvsar.echo import RvpState, simulate
from thzvsar.fileio import (
    FormatError,
    atomic_write,
    decode_image,
    encode_image,
    read_image,
    read_phase_history,
    read_reports_csv,
    read_reports_json,
    render_magnitude,
    write_image,
    write_pgm,
    write_phase_history,
    write_reports_csv,
    write_reports_json,
)
from thzvsar.geometry import PointTarget
from thzvsar.image import ComplexImage

DATA = Path(__file__).parent / "data"
P = small_radar()


def test_phase_history_round_trip(tmp_path):
    ph = simulate([PointTarget(3, -2)], P, small_geom(P), "raw")
    path = write_phase_history(tmp_path / "a.ph", ph)
    back = read_phase_history(path)
    np.testing.assert_array_equal(back.data, ph.data.astype(np.complex64))
    assert back.params == ph.params and back.geom == ph.geom
    assert back.rvp_state is RvpState.RAW
    # a second pass is lossless once the samples are complex64
    again = read_phase_history(write_phase_history(tmp_path / "b.ph", back))
    np.testing.assert_array_equal(again.data, back.data)


def test_image_round_trip(tmp_path):
    rng = np.random.default_rng(3)
    data = (rng.standard_normal((5, 7)) + 1j * rng.standard_normal((5, 7))).astype(np.complex64)
    img = ComplexImage(data.astype(complex), 0.17, 0.21, math.pi / 4)
    back = read_image(write_image(tmp_path / "x.im", img))
    np.testing.assert_array_equal(back.data, data)
    assert (back.dx, back.dy, back.theta_k) == (0.17, 0.21, math.pi / 4)


def test_bad_magic_and_truncation():
    buf = encode_image(ComplexImage(np.ones((2, 2)), 1.0, 1.0, 0.0))
    with pytest.raises(FormatError, match="magic"):
        decode_image(b"XXXXXXXX" + buf[8:])
    with pytest.raises(FormatError, match="sample bytes"):
        decode_image(buf[:-1])
    with pytest.raises(FormatError, match="truncated"):
        decode_image(buf[:10])


def test_pgm_golden(tmp_path):
    # levels picked so the 16-bit values follow by hand from the linear dB map
    mag = np.array([[1.0, 10 ** (-15 / 20), 10 ** (-30 / 20)],
                    [0.0, 1e-4, 10 ** (-45 / 20)]])
    path = write_pgm(tmp_path / "t.pgm", mag * np.exp(1j * 0.3))
    assert path.read_bytes() == (DATA / "golden_tiny.pgm").read_bytes()


def test_pgm_extremes():
    data = np.zeros((4, 6), dtype=complex)
    data[1, 2] = 3.0
    data[2, 4] = 1e-6
    buf = render_magnitude(data)
    head = b"P5\n6 4\n65535\n"
    assert buf.startswith(head)
    pix = np.frombuffer(buf[len(head):], dtype=">u2").reshape(4, 6)
    assert pix[1, 2] == 65535
    assert pix.sum() == 65535


def test_pgm_all_zero_warns():
    with pytest.warns(RuntimeWarning, match="all-zero"):
        buf = render_magnitude(np.zeros((2, 2)))
    assert buf.endswith(b"\x00" * 8)


def test_pgm_floor_must_be_negative():
    with pytest.raises(ValueError):
        render_magnitude(np.ones((2, 2)), floor_db=0.0)


def _reports():
    ok = TargetQuality(0, "cs", 1.5, -2.0, 1.49, -2.01, -0.06, 0.05, 0.172, 0.171,
                       -13.2, -13.3, -10.1, -math.inf, None, "azimuth_truncated")
    bad = TargetQuality(1, "cs", 20.0, 20.0, error="no response near target")
    other = TargetQuality(0, "interp", 1.5, -2.0, 1.5, -2.0, 0.0, 0.0, 0.18, 0.18,
                          -13.0, -13.0, -9.9, -9.9)
    return [QualityReport("cs", 0.0, [ok, bad]), QualityReport("interp", math.pi / 4, [other])]


def test_reports_csv_round_trip(tmp_path):
    reps = _reports()
    assert read_reports_csv(write_reports_csv(tmp_path / "r.csv", reps)) == reps


def test_reports_json_round_trip(tmp_path):
    reps = _reports()
    path = write_reports_json(tmp_path / "r.json", reps)
    assert "-Infinity" in path.read_text()
    assert read_reports_json(path) == reps


def test_reports_csv_rejects_foreign_columns(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(FormatError):
        read_reports_csv(path)


def test_atomic_write_leaves_no_temporaries(tmp_path):
    target = tmp_path / "sub" / "f.bin"
    atomic_write(target, b"one")
    atomic_write(target, b"two")
    assert target.read_bytes() == b"two"
    assert [p.name for p in target.parent.iterdir()] == ["f.bin"]


def test_atomic_write_cleans_up_on_failure(tmp_path):
    with pytest.raises(TypeError):
        atomic_write(tmp_path / "f.bin", "not bytes")
    assert list(tmp_path.iterdir()) == []
