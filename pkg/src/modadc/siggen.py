"""Test waveforms: sine, two-sine, FSK and ASK, plus additive Gaussian noise."""

from dataclasses import dataclass, field, fields, replace
from typing import Optional

import numpy as np

from .core import AliasingError

FAMILIES = ("sine", "two_sine", "fsk", "ask")


@dataclass(frozen=True)
class SignalSpec:
    family: str = "sine"
    f1_hz: float = 1500.0
    f2_hz: float = 0.0
    amplitude_v: float = 6.5
    amplitude2_v: float = 0.0
    phase_rad: float = 0.0
    bits: Optional[tuple] = None
    baud_hz: float = 500.0
    noise_pct: float = 0.0
    seed: int = 0
    phase_continuous: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown signal family {self.family!r}; expected one of {FAMILIES}")
        if self.f1_hz < 0 or self.f2_hz < 0:
            raise ValueError("frequencies must be non-negative")
        if self.amplitude_v < 0 or self.amplitude2_v < 0:
            raise ValueError("amplitudes must be non-negative")
        if not 0.0 <= self.noise_pct <= 1.0:
            raise ValueError(f"noise_pct must lie in [0, 1], got {self.noise_pct}")
        if self.family in ("fsk", "ask") and not self.baud_hz > 0:
            raise ValueError("baud_hz must be positive for fsk/ask")
        if self.bits is not None:
            bits = tuple(int(b) for b in self.bits)
            if any(b not in (0, 1) for b in bits) or not bits:
                raise ValueError("bits must be a non-empty 0/1 sequence")
            object.__setattr__(self, "bits", bits)

    @property
    def frequencies(self):
        if self.family == "sine" or self.family == "ask":
            return (self.f1_hz,)
        return (self.f1_hz, self.f2_hz)

    @property
    def bandwidth_hz(self):
        return max(self.frequencies)

    @property
    def peak_v(self):
        """Nominal peak amplitude (an upper bound on the noiseless signal)."""
        if self.family == "ask":
            return max(self.amplitude_v, self.amplitude2_v)
        return self.amplitude_v

    def with_(self, **kw):
        return replace(self, **kw)


def samples_per_bit(fs, baud_hz):
    return max(1, int(round(fs / baud_hz)))


def bit_sequence(spec, n, fs):
    """Per-sample message bit, with boundaries at multiples of round(fs/baud)."""
    spb = samples_per_bit(fs, spec.baud_hz)
    nbits = -(-n // spb)
    if spec.bits is None:
        pattern = np.arange(nbits) % 2 == 0
    else:
        pattern = np.resize(np.asarray(spec.bits, dtype=bool), nbits)
    return np.repeat(pattern, spb)[:n].astype(np.int8)


def _check_alias(spec, fs):
    for f in spec.frequencies:
        if f >= fs / 2:
            raise AliasingError(f"frequency {f} Hz is at or above fs/2 = {fs / 2} Hz")


def gen_signal(spec: SignalSpec, fs: float, n: int, oversample: int = 1):
    """Noiseless samples of the waveform described by ``spec``.

    With ``oversample=M`` the waveform is evaluated on a grid of rate ``M*fs``
    (``M*n`` points); every M-th point coincides with the ``fs`` grid. Bit
    boundaries stay aligned to the coarse grid.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if fs <= 0:
        raise ValueError("fs must be positive")
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    _check_alias(spec, fs)

    m = int(oversample)
    idx = np.arange(n * m)
    t = idx / (fs * m)
    A, ph = spec.amplitude_v, spec.phase_rad

    if spec.family == "sine":
        return A * np.sin(2 * np.pi * spec.f1_hz * t + ph)
    if spec.family == "two_sine":
        return 0.5 * A * (np.sin(2 * np.pi * spec.f1_hz * t + ph) + np.sin(2 * np.pi * spec.f2_hz * t + ph))

    bits = np.repeat(bit_sequence(spec, n, fs), m)
    spb = samples_per_bit(fs, spec.baud_hz) * m
    if spec.family == "fsk":
        freq = np.where(bits == 1, spec.f1_hz, spec.f2_hz)
        if spec.phase_continuous:
            phase = 2 * np.pi * np.concatenate(([0.0], np.cumsum(freq[:-1]))) / (fs * m)
        else:
            # each bit restarts its own sinusoid at local time zero
            t_local = (idx % spb) / (fs * m)
            phase = 2 * np.pi * freq * t_local
        return A * np.sin(phase + ph)
    # ask
    amp = np.where(bits == 1, spec.amplitude_v, spec.amplitude2_v)
    return amp * np.sin(2 * np.pi * spec.f1_hz * t + ph)


def add_noise(g, noise_pct, peak_v, seed):
    """Add zero-mean white Gaussian noise with std ``noise_pct * peak_v``."""
    if noise_pct < 0:
        raise ValueError("noise_pct must be non-negative")
    g = np.asarray(g, dtype=float)
    if noise_pct == 0:
        return g.copy()
    rng = np.random.default_rng(seed)
    return g + rng.normal(0.0, noise_pct * peak_v, size=g.shape)


def spec_fields():
    return [f.name for f in fields(SignalSpec)]


def to_fine_grid(w, m):
    """Linearly interpolate a coarse sequence onto an M-times finer grid.

    Point ``n*m`` of the result equals ``w[n]``; the tail after the last
    coarse sample is held flat.
    """
    w = np.asarray(w, dtype=float)
    if m == 1:
        return w.copy()
    fine_t = np.arange(len(w) * m) / m
    return np.interp(fine_t, np.arange(len(w)), w)
