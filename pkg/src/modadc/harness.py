"""Experiment runner: generate, fold, recover, score, write plot-ready files."""

import dataclasses
import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import config as cfgtext
from .capture_io import write_capture, write_signal
from .core import beta_bound, oversampling_factor
from .lp import LpParams, autocov_from_spec, init_from_capture, lp_unfold
from .recon import ReconResult
from .siggen import SignalSpec, add_noise, gen_signal, to_fine_grid
from .sim import AdcConfig, Capture, fold_hardware, fold_ideal
from .usalg import UsalgParams, min_order, usalg_recover
from .uslse import UslseParams, uslse_unfold

ALGORITHMS = ("usalg", "lp", "uslse")
PATHS = ("ideal", "hardware")
NOISE_REFERENCES = ("adc_range", "peak")
NMSE_FLOOR_DB = -300.0


@dataclass(frozen=True)
class UsalgOptions:
    order: Optional[int] = None  # None: smallest order the bound allows


@dataclass(frozen=True)
class LpOptions:
    taps: int = 12
    ridge: Optional[float] = None
    init: str = "true"  # "true": first taps samples of g; "capture": unfolded head of y


@dataclass(frozen=True)
class UslseOptions:
    lattice_bound: int = 3
    markov_order: int = 2
    rounds: int = 3
    guard: float = 0.5
    omp_max_iter: Optional[int] = None
    band_hz: Optional[float] = None  # None: bandwidth of the signal spec


@dataclass(frozen=True)
class ExperimentConfig:
    signal: SignalSpec = field(default_factory=SignalSpec)
    fs_hz: float = 102400.0
    n_samples: int = 500
    adc: AdcConfig = field(default_factory=AdcConfig)
    adc_path: str = "ideal"
    algorithms: tuple = ALGORITHMS
    usalg: UsalgOptions = field(default_factory=UsalgOptions)
    lp: LpOptions = field(default_factory=LpOptions)
    uslse: UslseOptions = field(default_factory=UslseOptions)
    output_dir: Optional[str] = None
    seed: int = 0
    # noise std is signal.noise_pct times the nominal peak ("peak") or times 2*lambda ("adc_range")
    noise_reference: str = "peak"

    def __post_init__(self):
        algs = tuple(a.strip().lower() for a in self.algorithms)
        object.__setattr__(self, "algorithms", algs)
        bad = [a for a in algs if a not in ALGORITHMS]
        if bad:
            raise ValueError(f"unknown algorithm(s) {bad}; choose from {ALGORITHMS}")
        if self.adc_path not in PATHS:
            raise ValueError(f"adc_path must be one of {PATHS}")
        if self.noise_reference not in NOISE_REFERENCES:
            raise ValueError(f"noise_reference must be one of {NOISE_REFERENCES}")
        if self.n_samples < 8:
            raise ValueError("n_samples must be >= 8")
        if not self.fs_hz > 2 * self.signal.bandwidth_hz:
            raise ValueError("fs_hz must exceed twice the signal band")
        if self.lp.init not in ("true", "capture"):
            raise ValueError("lp.init must be 'true' or 'capture'")

    @property
    def lam(self):
        return self.adc.lambda_volts

    @property
    def noise_ref_v(self):
        return 2.0 * self.lam if self.noise_reference == "adc_range" else self.signal.peak_v

    @property
    def noise_std(self):
        return self.signal.noise_pct * self.noise_ref_v

    def with_(self, **kw):
        return dataclasses.replace(self, **kw)


def load_config(path) -> ExperimentConfig:
    return cfgtext.load(path, ExperimentConfig())


# ---------------------------------------------------------------- metrics


def align_constant(g_hat, g, lam):
    """Split ``g_hat - g`` into a multiple of 2*lam and a real offset.

    The multiple is taken from the median difference, so a few gross
    errors do not drag it. Returns ``(k, offset)`` with ``k`` an integer
    and ``offset`` the mean of what is left.
    """
    d = np.asarray(g_hat, dtype=float) - np.asarray(g, dtype=float)
    if len(d) == 0:
        return 0, 0.0
    k = int(np.rint(np.median(d) / (2.0 * lam)))
    return k, float(np.mean(d - 2.0 * lam * k))


def nmse_db(g_hat, g, align_constant_flag=True, lam=1.0):
    g_hat = np.asarray(g_hat, dtype=float)
    g = np.asarray(g, dtype=float)
    if g_hat.shape != g.shape:
        raise ValueError("g_hat and g must have equal length")
    energy = float(np.sum(g**2))
    if energy == 0:
        raise ValueError("nmse undefined for a zero-energy reference")
    if align_constant_flag:
        k, _ = align_constant(g_hat, g, lam)
        g_hat = g_hat - 2.0 * lam * k
    err = float(np.sum((g_hat - g) ** 2))
    if err == 0:
        return NMSE_FLOOR_DB
    return max(NMSE_FLOOR_DB, 10.0 * math.log10(err / energy))


def max_aligned_error(g_hat, g, lam):
    k, _ = align_constant(g_hat, g, lam)
    return float(np.max(np.abs(np.asarray(g_hat) - 2.0 * lam * k - np.asarray(g)))) if len(g) else 0.0


def success(g_hat, g, lam, threshold_v=None):
    """True when no sample is off by ``threshold_v`` (default lam/2) after alignment."""
    threshold_v = lam / 2.0 if threshold_v is None else threshold_v
    return max_aligned_error(g_hat, g, lam) < threshold_v


def score(result: ReconResult, g, lam, threshold_v=None) -> ReconResult:
    k, offset = align_constant(result.g_hat, g, lam)
    result.constant_ambiguity = 2.0 * lam * k
    result.info["residual_offset_v"] = offset
    result.max_abs_err_v = max_aligned_error(result.g_hat, g, lam)
    result.nmse_db = nmse_db(result.g_hat, g, True, lam)
    result.success = success(result.g_hat, g, lam, threshold_v)
    return result


# ---------------------------------------------------------------- pipeline


@dataclass
class Acquisition:
    """Everything produced before recovery."""

    clean: np.ndarray  # noiseless samples
    g: np.ndarray  # ADC input at the sample instants (noise included)
    capture: Capture


def acquire(cfg: ExperimentConfig) -> Acquisition:
    n, fs = cfg.n_samples, cfg.fs_hz
    noise = add_noise(np.zeros(n), cfg.signal.noise_pct, cfg.noise_ref_v, [cfg.seed, cfg.signal.seed])
    if cfg.adc_path == "ideal":
        clean = gen_signal(cfg.signal, fs, n)
        g = clean + noise
        cap = fold_ideal(g, cfg.lam, fs)
        cap.meta["path"] = "ideal"
    else:
        m = cfg.adc.fine_grid_factor
        clean_fine = gen_signal(cfg.signal, fs, n, oversample=m)
        g_fine = clean_fine + to_fine_grid(noise, m)
        clean, g = clean_fine[::m], g_fine[::m]
        cap = fold_hardware(g_fine, cfg.adc, fs)
    return Acquisition(clean=clean, g=g, capture=cap)


def usalg_params(cfg: ExperimentConfig) -> UsalgParams:
    order = cfg.usalg.order
    if order is None:
        beta = beta_bound(cfg.signal.peak_v, cfg.lam)
        order = min_order(cfg.lam, beta, oversampling_factor(cfg.fs_hz, cfg.signal.bandwidth_hz))
    return UsalgParams(order=order, lam=cfg.lam)


def lp_params(cfg: ExperimentConfig, acq: Acquisition):
    taps = min(cfg.lp.taps, cfg.n_samples - 1)
    autocov = autocov_from_spec(cfg.signal, cfg.fs_hz, taps, noise_std=cfg.noise_std)
    if cfg.lp.init == "true":
        init = acq.g[:taps]
    else:
        cap = acq.capture
        init = init_from_capture(cap.y, cap.gate, taps, cfg.lam, cap.k)
    return LpParams(taps=taps, autocov=autocov, init_samples=init, lam=cfg.lam, ridge=cfg.lp.ridge)


def uslse_params(cfg: ExperimentConfig) -> UslseParams:
    o = cfg.uslse
    return UslseParams(
        lam=cfg.lam,
        band_hz=o.band_hz if o.band_hz is not None else cfg.signal.bandwidth_hz,
        fs_hz=cfg.fs_hz,
        guard=o.guard,
        lattice_bound=o.lattice_bound,
        markov_order=o.markov_order,
        rounds=o.rounds,
        omp_max_iter=o.omp_max_iter,
    )


def recover(alg, cfg: ExperimentConfig, acq: Acquisition) -> ReconResult:
    y = acq.capture.y
    if alg == "usalg":
        return usalg_recover(y, usalg_params(cfg))
    if alg == "lp":
        return lp_unfold(y, lp_params(cfg, acq))
    if alg == "uslse":
        return uslse_unfold(y, uslse_params(cfg))
    raise ValueError(f"unknown algorithm {alg!r}")


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    acquisition: Acquisition
    results: dict  # algorithm -> ReconResult
    errors: dict  # algorithm -> message, for algorithms that raised

    def metrics(self) -> dict:
        cfg, cap = self.config, self.acquisition.capture
        out = {
            "n_samples": cfg.n_samples,
            "fs_hz": cfg.fs_hz,
            "adc_path": cfg.adc_path,
            "noise_std_v": cfg.noise_std,
            "max_abs_y_v": float(np.max(np.abs(cap.y))),
            "max_abs_k": int(np.max(np.abs(cap.k))),
        }
        for alg in cfg.algorithms:
            if alg in self.errors:
                out[f"{alg}.success"] = False
                out[f"{alg}.error"] = self.errors[alg]
                continue
            r = self.results[alg]
            out[f"{alg}.success"] = r.success
            out[f"{alg}.nmse_db"] = r.nmse_db
            out[f"{alg}.max_abs_err_v"] = r.max_abs_err_v
            out[f"{alg}.constant_ambiguity_v"] = r.constant_ambiguity
            out[f"{alg}.residual_offset_v"] = r.info.get("residual_offset_v", 0.0)
            if r.warnings:
                out[f"{alg}.warnings"] = " | ".join(r.warnings)
        return out


def run_experiment(cfg: ExperimentConfig, output_dir=None) -> ExperimentResult:
    """Run one configuration end to end.

    Each algorithm runs in isolation: an exception is recorded against that
    algorithm and the others still run. Files are written when an output
    directory is given (argument or ``cfg.output_dir``).
    """
    acq = acquire(cfg)
    results, errors = {}, {}
    for alg in cfg.algorithms:
        try:
            results[alg] = score(recover(alg, cfg, acq), acq.g, cfg.lam)
        except Exception as exc:  # noqa: BLE001 - isolate algorithm failures
            errors[alg] = f"{type(exc).__name__}: {exc}"
    res = ExperimentResult(cfg, acq, results, errors)
    out = output_dir or cfg.output_dir
    if out:
        write_artifacts(res, out)
    return res


def _fmt(v):
    return repr(float(v))


def write_metrics(path, metrics: dict):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in metrics.items():
            fh.write(f"{key}={cfgtext.format_value(value)}\n")


def write_recon(path, res: ReconResult, g, fs):
    aligned = res.g_hat - res.constant_ambiguity
    lines = ["index,t_seconds,g_volts,g_hat_volts,eps_hat,err_volts"]
    for i in range(len(g)):
        lines.append(
            f"{i},{_fmt(i / fs)},{_fmt(g[i])},{_fmt(res.g_hat[i])},{int(res.eps_hat[i])},{_fmt(aligned[i] - g[i])}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_artifacts(res: ExperimentResult, output_dir):
    os.makedirs(output_dir, exist_ok=True)
    cfg, acq = res.config, res.acquisition
    with open(os.path.join(output_dir, "config.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(cfgtext.dumps(cfg))
    write_signal(os.path.join(output_dir, "signal.csv"), acq.g, cfg.fs_hz)
    write_capture(os.path.join(output_dir, "capture.csv"), acq.capture)
    for alg, r in res.results.items():
        write_recon(os.path.join(output_dir, f"recon_{alg}.csv"), r, acq.g, cfg.fs_hz)
    write_metrics(os.path.join(output_dir, "metrics.txt"), res.metrics())
