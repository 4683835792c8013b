"""Behavioral model of the modulo ADC.

Two paths produce a :class:`Capture`:

* :func:`fold_ideal` applies the centered modulo sample by sample.
* :func:`fold_hardware` steps a comparator / fold-counter loop on a fine time
  grid, with a transport delay on the fold feedback, saturation of the
  counter, a gate-conditioned track-and-hold in front of the sampler, and a
  biased unipolar quantizer.

``k`` in a capture is the signed fold count that was applied to the signal,
``x = g + 2*lam*k``, so ``k = -eps`` in the ``g = y + 2*lam*eps`` convention.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import decompose


@dataclass(frozen=True)
class AdcConfig:
    lambda_volts: float = 1.0
    max_fold_count: int = 7
    delay_ticks: int = 2
    fine_grid_factor: int = 16
    bias_volts: float = 2.0
    adc_range: tuple = (0.0, 3.3)
    adc_bits: int = 12
    k_lag_samples: int = 0
    quantize: bool = True

    def __post_init__(self):
        if not self.lambda_volts > 0:
            raise ValueError("lambda_volts must be positive")
        if self.max_fold_count < 1:
            raise ValueError("max_fold_count must be >= 1")
        if self.delay_ticks < 0:
            raise ValueError("delay_ticks must be >= 0")
        if self.fine_grid_factor < 1:
            raise ValueError("fine_grid_factor must be >= 1")
        lo, hi = (float(v) for v in self.adc_range)
        if not lo < hi:
            raise ValueError("adc_range low must be below high")
        object.__setattr__(self, "adc_range", (lo, hi))
        if not 1 <= self.adc_bits <= 24:
            raise ValueError("adc_bits must lie in [1, 24]")
        if self.k_lag_samples < 0:
            raise ValueError("k_lag_samples must be >= 0")

    @property
    def input_range(self):
        """Voltage span the quantizer can represent, after removing the bias."""
        lo, hi = self.adc_range
        return lo - self.bias_volts, hi - self.bias_volts

    @property
    def lsb(self):
        lo, hi = self.adc_range
        return (hi - lo) / (2**self.adc_bits - 1)


@dataclass
class Capture:
    y: np.ndarray
    k: np.ndarray
    gate: np.ndarray
    fs_hz: float
    lambda_volts: float
    adc: Optional[AdcConfig] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        self.k = np.asarray(self.k, dtype=np.int64)
        self.gate = np.asarray(self.gate, dtype=np.int8)
        if not (len(self.y) == len(self.k) == len(self.gate)):
            raise ValueError("capture columns must have equal length")

    def __len__(self):
        return len(self.y)

    @property
    def eps(self):
        return -self.k


def fold_ideal(g, lam, fs_hz=1.0):
    y, eps = decompose(g, lam)
    return Capture(y=y, k=-eps, gate=np.ones(len(y), dtype=np.int8), fs_hz=fs_hz, lambda_volts=lam)


def quantize(x, cfg: AdcConfig):
    """Biased unipolar quantizer; returns ``(codes, dequantized_volts)``."""
    lo, hi = cfg.adc_range
    full = 2**cfg.adc_bits - 1
    x = np.asarray(x, dtype=float)
    codes = np.clip(np.rint((x + cfg.bias_volts - lo) / (hi - lo) * full), 0, full).astype(np.int64)
    deq = codes * (hi - lo) / full + lo - cfg.bias_volts
    if codes.ndim == 0:
        return int(codes), float(deq)
    return codes, deq


@dataclass
class HardwareTrace:
    """Per fine-tick internals of :func:`fold_hardware`, for diagnostics."""

    x: np.ndarray
    k_applied: np.ndarray
    k_counter: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    @property
    def s(self):
        return ~(self.d1 | self.d2)


def _run_loop(g_fine, cfg: AdcConfig):
    lam = cfg.lambda_volts
    two_lam = 2.0 * lam
    kmax = cfg.max_fold_count
    delay = cfg.delay_ticks
    n_ticks = len(g_fine)

    x_out = np.empty(n_ticks)
    k_app_out = np.empty(n_ticks, dtype=np.int64)
    k_cnt_out = np.empty(n_ticks, dtype=np.int64)
    d1_out = np.zeros(n_ticks, dtype=bool)
    d2_out = np.zeros(n_ticks, dtype=bool)

    counter = 0
    applied = 0
    in_flight = deque()
    for t in range(n_ticks):
        while in_flight and in_flight[0][0] <= t:
            applied = in_flight.popleft()[1]
        g = g_fine[t]
        x = g + two_lam * applied
        d1 = x > lam
        d2 = x < -lam
        # the counter only moves once the previous update has reached Q
        if (d1 or d2) and counter == applied:
            step = -1 if d1 else 1
            if abs(counter + step) <= kmax:
                counter += step
                if delay == 0:
                    applied = counter
                    x = g + two_lam * applied
                    d1 = x > lam
                    d2 = x < -lam
                else:
                    in_flight.append((t + delay, counter))
        x_out[t] = x
        k_app_out[t] = applied
        k_cnt_out[t] = counter
        d1_out[t] = d1
        d2_out[t] = d2
    return HardwareTrace(x_out, k_app_out, k_cnt_out, d1_out, d2_out)


def fold_hardware(g_fine, cfg: AdcConfig, fs_hz, return_trace=False):
    """Simulate the feedback folding loop and the gated sampler.

    ``g_fine`` is the input on the fine grid of rate ``M*fs_hz``
    (``M = cfg.fine_grid_factor``); coarse sample ``n`` is taken at fine tick
    ``n*M``. The sampler sees the comparator gate ``delay_ticks`` late. Its
    track-and-hold follows ``x`` (together with the fold count driving it)
    while that gate is open and freezes while it is closed.
    """
    g_fine = np.asarray(g_fine, dtype=float)
    m = cfg.fine_grid_factor
    if len(g_fine) == 0 or len(g_fine) % m:
        raise ValueError(f"fine-grid length {len(g_fine)} is not a positive multiple of M={m}")
    n = len(g_fine) // m
    trace = _run_loop(g_fine, cfg)
    s = trace.s

    d = cfg.delay_ticks
    s_seen = np.concatenate((np.full(d, s[0]), s[: len(s) - d])) if d else s

    # track-and-hold: index of the most recent tick at which the seen gate was open
    open_idx = np.where(s_seen, np.arange(len(s)), -1)
    last_open = np.maximum.accumulate(open_idx)
    last_open[last_open < 0] = 0

    instants = np.arange(n) * m
    held = last_open[instants]
    x_held = trace.x[held]
    k_rec = trace.k_applied[held]
    gate = s_seen[instants].astype(np.int8)

    if cfg.k_lag_samples:
        lag = cfg.k_lag_samples
        k_rec = np.concatenate((np.full(min(lag, n), k_rec[0]), k_rec[: max(n - lag, 0)]))

    if cfg.quantize:
        _, y = quantize(x_held, cfg)
    else:
        y = x_held.copy()

    cap = Capture(
        y=y,
        k=k_rec,
        gate=gate,
        fs_hz=fs_hz,
        lambda_volts=cfg.lambda_volts,
        adc=cfg,
        meta={"path": "hardware"},
    )
    if return_trace:
        return cap, trace
    return cap


def hw_reconstruct(cap: Capture, lam=None):
    """Unfold with the recorded fold counts: ``y - 2*lam*k``."""
    lam = cap.lambda_volts if lam is None else lam
    return cap.y - 2.0 * lam * cap.k
