import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from modadc.core import AliasingError
from modadc.siggen import SignalSpec, add_noise, bit_sequence, gen_signal, samples_per_bit, to_fine_grid

FS = 102400.0


def test_sine_peak_within_one_period():
    g = gen_signal(SignalSpec("sine", 1500, amplitude_v=6.5), FS, 500)
    period = int(np.ceil(FS / 1500))
    assert np.max(np.abs(g[:period])) == pytest.approx(6.5, rel=2e-3)
    assert np.max(np.abs(g)) <= 6.5


def test_two_sine_starts_at_zero():
    g = gen_signal(SignalSpec("two_sine", 500, 2500, amplitude_v=6.5), FS, 500)
    assert g[0] == 0.0
    t = np.arange(500) / FS
    want = 3.25 * (np.sin(2 * np.pi * 500 * t) + np.sin(2 * np.pi * 2500 * t))
    assert np.allclose(g, want)


def test_fsk_segments():
    spec = SignalSpec("fsk", 500, 1500, amplitude_v=4.5, bits=(1, 0))
    g = gen_signal(spec, FS, 500)
    spb = samples_per_bit(FS, spec.baud_hz)
    t = np.arange(spb) / FS
    assert np.allclose(g[:spb], 4.5 * np.sin(2 * np.pi * 500 * t))
    assert np.allclose(g[spb : 2 * spb], 4.5 * np.sin(2 * np.pi * 1500 * t))
    assert np.max(np.abs(g[spb : 2 * spb])) == pytest.approx(4.5, rel=1e-2)


def test_fsk_phase_continuous_option():
    spec = SignalSpec("fsk", 500, 1500, amplitude_v=1.0, bits=(1, 0), phase_continuous=True)
    g = gen_signal(spec, FS, 600)
    # no jump larger than the largest per-sample slope
    assert np.max(np.abs(np.diff(g))) <= 2 * np.pi * 1500 / FS + 1e-12


def test_ask_amplitudes():
    spec = SignalSpec("ask", 1500, amplitude_v=4.5, amplitude2_v=2.5, bits=(1, 0))
    g = gen_signal(spec, FS, 410)
    spb = samples_per_bit(FS, spec.baud_hz)
    assert np.max(np.abs(g[:spb])) == pytest.approx(4.5, rel=1e-2)
    assert np.max(np.abs(g[spb : 2 * spb])) == pytest.approx(2.5, rel=1e-2)


def test_default_bits_alternate():
    spec = SignalSpec("fsk", 500, 1500)
    b = bit_sequence(spec, 1000, FS)
    spb = samples_per_bit(FS, 500)
    assert spb == 205
    assert b[0] == 1 and b[spb] == 0 and b[2 * spb] == 1
    boundaries = np.nonzero(np.diff(b))[0] + 1
    assert np.all(boundaries % spb == 0)


def test_aliasing_rejected():
    with pytest.raises(AliasingError):
        gen_signal(SignalSpec("sine", 60000), FS, 10)
    with pytest.raises(AliasingError):
        gen_signal(SignalSpec("two_sine", 100, 51200), FS, 10)


@pytest.mark.parametrize(
    "kw",
    [dict(family="square"), dict(f1_hz=-1), dict(amplitude_v=-1), dict(noise_pct=1.5), dict(bits=(0, 2))],
)
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        SignalSpec(**kw)


specs = st.builds(
    SignalSpec,
    family=st.sampled_from(["sine", "two_sine", "fsk", "ask"]),
    f1_hz=st.floats(0, 5000),
    f2_hz=st.floats(0, 5000),
    amplitude_v=st.floats(0, 20),
    amplitude2_v=st.floats(0, 20),
    phase_rad=st.floats(-4, 4),
    bits=st.none() | st.lists(st.integers(0, 1), min_size=1, max_size=6).map(tuple),
    baud_hz=st.floats(100, 5000),
)


@given(specs)
def test_generator_peak_bound(spec):
    g = gen_signal(spec, FS, 300)
    assert np.max(np.abs(g)) <= spec.peak_v + 1e-9


@given(specs, st.integers(1, 8))
def test_fine_grid_decimates_to_coarse(spec, m):
    coarse = gen_signal(spec, FS, 120)
    fine = gen_signal(spec, FS, 120, oversample=m)
    assert len(fine) == 120 * m
    assert np.allclose(fine[::m], coarse, atol=1e-9)


def test_add_noise_zero_is_identity():
    g = np.linspace(-1, 1, 11)
    out = add_noise(g, 0.0, 6.5, 3)
    assert np.array_equal(out, g) and out is not g


def test_add_noise_std():
    w = add_noise(np.zeros(100_000), 0.05, 6.5, 7)
    assert abs(np.std(w) - 0.325) < 0.0325
    assert abs(np.mean(w)) < 0.01


def test_add_noise_reproducible_and_validated():
    assert np.array_equal(add_noise(np.zeros(20), 0.1, 1.0, 5), add_noise(np.zeros(20), 0.1, 1.0, 5))
    assert not np.array_equal(add_noise(np.zeros(20), 0.1, 1.0, 5), add_noise(np.zeros(20), 0.1, 1.0, 6))
    with pytest.raises(ValueError):
        add_noise(np.zeros(3), -0.1, 1.0, 0)


def test_to_fine_grid():
    w = np.array([0.0, 1.0, -1.0])
    f = to_fine_grid(w, 4)
    assert len(f) == 12
    assert np.array_equal(f[::4], w)
    assert f[2] == 0.5
    assert np.array_equal(to_fine_grid(w, 1), w)
