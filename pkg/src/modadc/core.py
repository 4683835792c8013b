"""Folding arithmetic and the ideal modulo measurement model.

Sequences are plain float numpy arrays; fold counts are int64 arrays. The
sign convention is ``g = y + 2*lam*eps``.
"""

import math

import numpy as np


class AliasingError(ValueError):
    pass


class NoValidOrderError(ValueError):
    pass


class NumericalFailure(ArithmeticError):
    pass


class ResourceError(RuntimeError):
    pass


def _check_lambda(lam):
    if not (np.isfinite(lam) and lam > 0):
        raise ValueError(f"lambda must be a positive finite number, got {lam!r}")


def centered_modulo(x, lam):
    """Fold ``x`` into ``[-lam, lam)``.

    Works elementwise on arrays; scalars in give a float back.
    """
    _check_lambda(lam)
    x_arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x_arr)):
        raise ValueError("centered_modulo: input contains non-finite values")
    out = x_arr - 2.0 * lam * np.floor(x_arr / (2.0 * lam) + 0.5)
    # x/(2 lam) + 1/2 can round up to an integer for x just below lam.
    out = np.where(out >= lam, out - 2.0 * lam, out)
    out = np.where(out < -lam, out + 2.0 * lam, out)
    if np.ndim(x) == 0:
        return float(out)
    return out


def decompose(g, lam):
    """Split samples into folded values and integer fold counts.

    Returns ``(y, eps)`` with ``y = centered_modulo(g)`` and
    ``g = y + 2*lam*eps``.
    """
    g = np.atleast_1d(np.asarray(g, dtype=float))
    y = centered_modulo(g, lam)
    eps = np.rint((g - y) / (2.0 * lam)).astype(np.int64)
    return y, eps


def recompose(y, eps, lam):
    _check_lambda(lam)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    eps = np.atleast_1d(np.asarray(eps))
    if y.shape != eps.shape:
        raise ValueError(f"length mismatch: y has {y.shape}, eps has {eps.shape}")
    return y + 2.0 * lam * eps


def oversampling_factor(fs, bandwidth):
    if not (fs > 0 and bandwidth > 0):
        raise ValueError("fs and bandwidth must both be positive")
    return fs / (2.0 * bandwidth)


def beta_bound(peak, lam):
    """Smallest member of 2*lam*Z that is >= ``peak``."""
    _check_lambda(lam)
    return 2.0 * lam * max(1, math.ceil(peak / (2.0 * lam) - 1e-12))
