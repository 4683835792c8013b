"""Linear-prediction unfolding.

A one-step predictor is fitted to a known autocovariance; each new sample is
predicted from the already-unfolded past and then snapped onto the fold
lattice of the observed modulo sample.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import NumericalFailure, centered_modulo
from .recon import ReconResult
from .siggen import SignalSpec, gen_signal

DEFAULT_TAPS = 12
DEFAULT_RIDGE_REL = 1e-8


@dataclass
class LpParams:
    taps: int = DEFAULT_TAPS
    autocov: Optional[np.ndarray] = None
    init_samples: Optional[np.ndarray] = None
    lam: float = 1.0
    ridge: Optional[float] = None

    def __post_init__(self):
        if self.taps < 1:
            raise ValueError("taps must be >= 1")
        if self.autocov is not None:
            self.autocov = np.asarray(self.autocov, dtype=float)
            if len(self.autocov) < self.taps + 1:
                raise ValueError(f"autocov needs at least {self.taps + 1} lags")
            if not self.autocov[0] > 0:
                raise ValueError("autocov[0] must be positive")
        if self.init_samples is not None:
            self.init_samples = np.asarray(self.init_samples, dtype=float)
            if len(self.init_samples) != self.taps:
                raise ValueError(f"init_samples must have exactly {self.taps} values")


def levinson_durbin(r, order):
    """Solve the order-``order`` Yule-Walker equations for autocovariance ``r``.

    Returns the predictor ``h`` (``x[n] ~ sum h[i] x[n-1-i]``) and the final
    prediction-error power.
    """
    r = np.asarray(r, dtype=float)
    h = np.zeros(order)
    err = r[0]
    for m in range(order):
        if not err > 0:
            raise NumericalFailure(f"prediction error power collapsed to {err:g} at order {m}")
        acc = r[m + 1] - np.dot(h[:m], r[m:0:-1])
        kappa = acc / err
        h[:m] = h[:m] - kappa * h[:m][::-1]
        h[m] = kappa
        err *= 1.0 - kappa * kappa
    return h, err


def lp_coeffs(autocov, taps, ridge=None):
    autocov = np.asarray(autocov, dtype=float)
    if len(autocov) < taps + 1:
        raise ValueError(f"autocov needs at least {taps + 1} lags, got {len(autocov)}")
    if ridge is None:
        ridge = DEFAULT_RIDGE_REL * autocov[0]
    r = autocov[: taps + 1].copy()
    r[0] += ridge
    h, err = levinson_durbin(r, taps)
    if not np.all(np.isfinite(h)) or not err > 0:
        raise NumericalFailure("predictor solve failed; increase ridge")
    return h


def _biased_autocov(x, lags):
    x = np.asarray(x, dtype=float)
    x = x - x.mean()
    n = len(x)
    return np.array([np.dot(x[: n - k], x[k:]) / n for k in range(lags + 1)])


def autocov_from_spec(spec: SignalSpec, fs, lags, noise_std=None, n_long=None):
    """Autocovariance at lags ``0..lags`` for the waveform family in ``spec``.

    Sine and two-sine use the random-phase closed form; FSK and ASK fall back
    to a long noiseless realization. ``noise_std`` (white, additive) is added
    at lag 0.
    """
    if lags < 1:
        raise ValueError("lags must be >= 1")
    k = np.arange(lags + 1)
    if spec.family == "sine":
        r = 0.5 * spec.amplitude_v**2 * np.cos(2 * np.pi * spec.f1_hz * k / fs)
    elif spec.family == "two_sine":
        half = 0.5 * spec.amplitude_v
        r = 0.5 * half**2 * (np.cos(2 * np.pi * spec.f1_hz * k / fs) + np.cos(2 * np.pi * spec.f2_hz * k / fs))
    else:
        n_long = n_long or max(64 * (lags + 1), 20000)
        r = _biased_autocov(gen_signal(spec.with_(noise_pct=0.0), fs, n_long), lags)
    if noise_std:
        r = r.copy()
        r[0] += noise_std**2
    return r


def lp_unfold(y, params: LpParams) -> ReconResult:
    y = np.asarray(y, dtype=float)
    P, lam = params.taps, params.lam
    if len(y) <= P:
        raise ValueError(f"need more than {P} samples for a {P}-tap predictor")
    if params.autocov is None:
        raise ValueError("lp_unfold needs an autocovariance")
    h = lp_coeffs(params.autocov, P, params.ridge)
    if params.init_samples is None:
        raise ValueError("lp_unfold needs the first P unfolded samples")

    g_hat = np.empty_like(y)
    g_hat[:P] = params.init_samples
    h_rev = h[::-1]
    for n in range(P, len(y)):
        pred = float(np.dot(h_rev, g_hat[n - P : n]))
        g_hat[n] = pred + centered_modulo(y[n] - pred, lam)

    eps = np.rint((g_hat - y) / (2.0 * lam)).astype(np.int64)
    return ReconResult(g_hat=g_hat, eps_hat=eps, algorithm="lp", info={"taps": P, "coeffs": h.tolist()})


def init_from_capture(y, gate, taps, lam, k=None):
    """First P unfolded samples taken from the capture itself.

    Valid only when the capture opens unfolded: the first ``taps`` samples
    must be gated, inside ``[-lam, lam)`` and (if fold counts are given) carry
    a zero fold count.
    """
    y = np.asarray(y, dtype=float)[:taps]
    ok = (np.asarray(gate)[:taps] == 1) & (np.abs(y) < lam)
    if k is not None:
        ok &= np.asarray(k)[:taps] == 0
    if len(y) < taps or not ok.all():
        raise ValueError(f"the first {taps} capture samples are not known to be unfolded")
    return y.copy()
