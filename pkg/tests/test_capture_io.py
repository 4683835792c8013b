import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modadc.capture_io import CaptureFormatError, read_capture, read_signal, write_capture, write_signal
from modadc.siggen import SignalSpec, gen_signal
from modadc.sim import AdcConfig, Capture, fold_hardware, fold_ideal

FS = 102400.0


def _same(a: Capture, b: Capture):
    return (
        np.array_equal(a.y, b.y)
        and np.array_equal(a.k, b.k)
        and np.array_equal(a.gate, b.gate)
        and a.fs_hz == b.fs_hz
        and a.lambda_volts == b.lambda_volts
        and a.adc == b.adc
        and a.meta == b.meta
    )


def test_hardware_round_trip(tmp_path):
    cfg = AdcConfig(delay_ticks=3, k_lag_samples=1)
    cap = fold_hardware(gen_signal(SignalSpec(amplitude_v=9), FS, 300, 16), cfg, FS)
    write_capture(tmp_path / "c.csv", cap)
    assert _same(read_capture(tmp_path / "c.csv"), cap)


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=50), st.floats(1.0, 1e7), st.floats(0.01, 10))
def test_ideal_round_trip(tmp_path_factory, g, fs, lam):
    path = tmp_path_factory.mktemp("cap") / "c.csv"
    cap = fold_ideal(np.array(g), lam, fs)
    write_capture(path, cap)
    assert _same(read_capture(path), cap)


def test_header_and_columns(tmp_path):
    write_capture(tmp_path / "c.csv", fold_ideal([0.5, 2.5], 1.0, FS))
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert "# fs_hz=102400.0" in lines and "# lambda_volts=1.0" in lines
    assert "index,t_seconds,y_volts,k_signed,gate" in lines
    assert lines[-1] == "1,9.765625e-06,0.5,-1,1"


def _write(tmp_path, body):
    p = tmp_path / "bad.csv"
    p.write_text("# fs_hz=1000.0\n# lambda_volts=1.0\n" + body)
    return p


def test_missing_gate_column(tmp_path):
    p = _write(tmp_path, "index,t_seconds,y_volts,k_signed\n0,0.0,0.1,0\n")
    with pytest.raises(CaptureFormatError, match="gate"):
        read_capture(p)


def test_malformed_row_reports_line(tmp_path):
    p = _write(tmp_path, "index,t_seconds,y_volts,k_signed,gate\n0,0.0,0.1,0,1\n1,0.001,abc,0,1\n")
    with pytest.raises(CaptureFormatError, match=":5:"):
        read_capture(p)
    p = _write(tmp_path, "index,t_seconds,y_volts,k_signed,gate\n0,0.0,0.1,0\n")
    with pytest.raises(CaptureFormatError, match=":4:"):
        read_capture(p)
    p = _write(tmp_path, "index,t_seconds,y_volts,k_signed,gate\n0,0.0,0.1,0,2\n")
    with pytest.raises(CaptureFormatError, match="gate"):
        read_capture(p)


def test_index_must_increase(tmp_path):
    p = _write(tmp_path, "index,t_seconds,y_volts,k_signed,gate\n0,0.0,0.1,0,1\n0,0.0,0.2,0,1\n")
    with pytest.raises(CaptureFormatError, match="increasing"):
        read_capture(p)


def test_missing_fs(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("# lambda_volts=1.0\nindex,t_seconds,y_volts,k_signed,gate\n0,0.0,0.1,0,1\n")
    with pytest.raises(CaptureFormatError, match="fs_hz"):
        read_capture(p)


def test_fs_mismatch_warns(tmp_path):
    p = _write(tmp_path, "index,t_seconds,y_volts,k_signed,gate\n0,0.0,0.1,0,1\n1,0.002,0.2,0,1\n")
    with pytest.warns(UserWarning, match="fs_hz"):
        cap = read_capture(p)
    assert len(cap) == 2


def test_signal_round_trip(tmp_path):
    g = gen_signal(SignalSpec(), FS, 40, oversample=4)
    write_signal(tmp_path / "s.csv", g, FS, 4)
    back, fs, m = read_signal(tmp_path / "s.csv")
    assert np.array_equal(back, g) and fs == FS and m == 4
