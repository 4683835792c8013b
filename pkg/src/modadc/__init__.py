"""Modulo ADC simulation and unfolding algorithms."""

from .capture_io import CaptureFormatError, read_capture, write_capture
from .core import (
    AliasingError,
    NoValidOrderError,
    NumericalFailure,
    ResourceError,
    beta_bound,
    centered_modulo,
    decompose,
    oversampling_factor,
    recompose,
)
from .harness import ExperimentConfig, nmse_db, run_experiment, success
from .lp import LpParams, autocov_from_spec, lp_coeffs, lp_unfold
from .recon import ReconResult
from .siggen import SignalSpec, add_noise, gen_signal
from .sim import AdcConfig, Capture, fold_hardware, fold_ideal, hw_reconstruct, quantize
from .usalg import UsalgParams, antidiff, diff, min_order, usalg_recover
from .uslse import UslseParams, build_system, dp_solve, omp_refine, select_band, uslse_unfold

__version__ = "0.1.0"
