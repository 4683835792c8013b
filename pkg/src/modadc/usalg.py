"""Unfolding by higher-order differences (the unlimited sampling algorithm)."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import NoValidOrderError, centered_modulo
from .recon import ReconResult

ROUNDING_TOL = 0.25


@dataclass(frozen=True)
class UsalgParams:
    order: int = 2
    lam: float = 1.0
    beta_g: Optional[float] = None

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.beta_g is not None:
            ratio = self.beta_g / (2 * self.lam)
            if self.beta_g <= 0 or abs(ratio - round(ratio)) > 1e-9:
                raise ValueError("beta_g must be a positive multiple of 2*lam")


def diff(x, order=1):
    x = np.asarray(x)
    if order < 0:
        raise ValueError("order must be non-negative")
    if order >= len(x):
        raise ValueError(f"difference order {order} needs more than {len(x)} samples")
    return np.diff(x, n=order) if order else x.copy()


def antidiff(d, order=1, init=None):
    """Invert :func:`diff` by repeated cumulative sums.

    ``init[j]`` is the first value of the j-th difference of the output,
    so ``antidiff(diff(x, k), k, [diff(x, j)[0] for j in range(k)]) == x``.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if init is None:
        init = [0] * order
    init = np.atleast_1d(init)
    if len(init) != order:
        raise ValueError(f"need {order} initial values, got {len(init)}")
    out = np.asarray(d)
    for level in range(order - 1, -1, -1):
        out = np.concatenate(([init[level]], init[level] + np.cumsum(out)))
    return out


def min_order(lam, beta_g, gamma):
    """Smallest difference order that keeps the differenced signal within ``lam``."""
    if not gamma > math.pi * math.e:
        raise NoValidOrderError(f"oversampling factor {gamma:.3f} must exceed pi*e for a finite order")
    if not (lam > 0 and beta_g > 0):
        raise ValueError("lam and beta_g must be positive")
    val = (math.log(lam) - math.log(beta_g)) / math.log(math.pi * math.e / gamma)
    return max(1, math.ceil(val - 1e-12))


def usalg_recover(y, params: UsalgParams) -> ReconResult:
    y = np.asarray(y, dtype=float)
    lam, order = params.lam, params.order
    if len(y) <= order:
        raise ValueError(f"need more than {order} samples for difference order {order}")
    two_lam = 2.0 * lam

    y_d = diff(y, order)
    g_d = centered_modulo(y_d, lam)
    eps_d = np.rint((g_d - y_d) / two_lam).astype(np.int64)
    # eps_d is round(-y_d / 2 lam) under the premise that g_d is negligible;
    # |g_d| / 2 lam is the distance that rounding covered.
    worst = float(np.max(np.abs(g_d))) / two_lam if len(g_d) else 0.0
    warnings = []
    if worst > ROUNDING_TOL:
        warnings.append(f"difference fold counts off-integer by up to {worst:.3f}; noise-dominated")

    # Each cumulative sum leaves one integer constant open. For levels >= 1
    # the differenced signal of an oscillating waveform has ~zero mean, so pick
    # the constant that centres it; the last level is anchored at eps[0] = 0.
    eps = eps_d
    for level in range(order - 1, 0, -1):
        partial = np.concatenate(([0], np.cumsum(eps)))
        g_level = diff(y, level) + two_lam * partial
        c = int(np.rint(-np.mean(g_level) / two_lam))
        eps = partial + c
    eps = np.concatenate(([0], np.cumsum(eps))).astype(np.int64)

    return ReconResult(
        g_hat=y + two_lam * eps,
        eps_hat=eps,
        algorithm="usalg",
        warnings=warnings,
        info={"order": order, "max_rounding_residual": worst},
    )
