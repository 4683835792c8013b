"""First stage of USLSE: integer estimation of the differenced fold sequence.

The differenced modulo samples are taken to the DFT domain. Out-of-band bins
should hold almost no energy for an oversampled bandlimited input, so the
fold jumps ``eps_d = diff(eps)`` are chosen on a bounded integer lattice to
cancel the energy there. The quadratic objective's Gram matrix is replaced
by its band of width ``p`` and solved exactly by dynamic programming, then
refined greedily against the exact objective.
"""

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import ResourceError
from .recon import ReconResult

DEFAULT_STATE_BUDGET = 2_000_000


@dataclass(frozen=True)
class UslseParams:
    lam: float = 1.0
    band_hz: Optional[float] = None
    fs_hz: Optional[float] = None
    guard: float = 0.5
    bins: Optional[tuple] = None
    lattice_bound: int = 3
    markov_order: int = 2
    rounds: int = 3
    omp_max_iter: Optional[int] = None
    state_budget: int = DEFAULT_STATE_BUDGET
    warm_start: bool = True
    periodize: bool = True

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.lattice_bound < 1:
            raise ValueError("lattice_bound must be >= 1")
        if self.markov_order < 1:
            raise ValueError("markov_order must be >= 1")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.bins is None and (self.band_hz is None or self.fs_hz is None):
            raise ValueError("give either explicit bins or band_hz together with fs_hz")


@dataclass
class DiffDftSystem:
    """Quadratic model of the out-of-band energy in ``eps_d``.

    ``gram[m]`` is ``sum_{k in S} exp(2j*pi*k*m/L)``, the (circulant) entry of
    ``F_S^H F_S`` at lag ``m``; the banded matrix keeps lags ``|m| <= p``.
    """

    y_tilde: np.ndarray
    bins: np.ndarray
    lam: float
    p: int
    gram: np.ndarray
    b: np.ndarray
    mask: np.ndarray = field(repr=False)

    @property
    def length(self):
        return len(self.y_tilde)

    @property
    def y_tilde_s(self):
        return self.y_tilde[self.bins]

    @property
    def band(self):
        """Entries ``A[i, i-m]`` for ``m = 0..p``."""
        return 4.0 * self.lam**2 * self.gram[: self.p + 1]

    def dense(self, p=None):
        """Banded Hermitian matrix ``A`` as a dense array (``p=None``: own band)."""
        p = self.p if p is None else p
        L = self.length
        lag = np.subtract.outer(np.arange(L), np.arange(L))
        full = 4.0 * self.lam**2 * self.gram[lag % L]
        return np.where(np.abs(lag) <= p, full, 0)

    def full_gram_times(self, v):
        """``4 lam^2 F_S^H F_S v`` for a real vector ``v``."""
        L = self.length
        return 4.0 * self.lam**2 * L * np.real(np.fft.ifft(self.mask * np.fft.fft(v)))

    def exact_objective(self, eps_d):
        r = self.y_tilde + 2.0 * self.lam * np.fft.fft(np.asarray(eps_d, dtype=float))
        return float(np.sum(np.abs(r[self.bins]) ** 2))

    def surrogate_objective(self, eps_d, linear=None, p=None):
        e = np.asarray(eps_d, dtype=float)
        lin = self.b.real if linear is None else linear
        quad = e @ np.real(self.dense(p)) @ e
        return float(quad + 2.0 * lin @ e)


def select_band(n, fs, signal_band_hz, guard=0.5):
    """DFT bins of the (n-1)-point differenced sequence lying above the guarded band."""
    if not signal_band_hz < fs / 2:
        raise ValueError("signal band must lie below fs/2")
    if guard <= 0:
        raise ValueError("guard must be positive")
    L = n - 1
    if L < 2:
        raise ValueError("need at least 3 samples")
    k = np.arange(1, L)
    freq = np.minimum(k, L - k) * fs / L
    bins = k[freq > signal_band_hz * (1.0 + guard)]
    if len(bins) == 0:
        raise ValueError("guard band leaves no out-of-band bins")
    return bins


def build_system(y, lam, bins, p=2, trend=None):
    """Difference + DFT model of ``y``.

    ``trend`` (optional, length N-1) is subtracted from ``diff(y)`` before the
    DFT; see :func:`wrap_trend`.
    """
    y = np.asarray(y, dtype=float)
    if len(y) < 3:
        raise ValueError("need at least 3 samples")
    L = len(y) - 1
    bins = np.unique(np.asarray(bins, dtype=int))
    if len(bins) == 0:
        raise ValueError("empty bin set")
    if bins.min() < 0 or bins.max() >= L:
        raise ValueError(f"bins must lie in [0, {L})")
    if p < 1:
        raise ValueError("p must be >= 1")

    d = np.diff(y)
    if trend is not None:
        d = d - trend
    y_tilde = np.fft.fft(d)
    mask = np.zeros(L)
    mask[bins] = 1.0
    # gram[m] = sum_{k in S} exp(2j pi k m / L) = L * ifft(mask)[m]
    gram = L * np.fft.ifft(mask)
    # b = 2 lam F_S^H y_S
    b = 2.0 * lam * L * np.fft.ifft(mask * y_tilde)
    return DiffDftSystem(y_tilde=y_tilde, bins=bins, lam=lam, p=p, gram=gram, b=b, mask=mask)


def dp_solve(system: DiffDftSystem, V, p=None, linear=None, state_budget=DEFAULT_STATE_BUDGET):
    """Exact minimizer of the banded surrogate over ``{-V..V}^L``.

    Viterbi recursion whose state is the last ``p`` lattice values (values
    before the start count as 0). Ties go to the smallest lattice value.
    ``linear`` overrides ``Re(b)`` as the linear coefficient.
    """
    p = system.p if p is None else p
    if V < 1 or p < 1:
        raise ValueError("V and p must be >= 1")
    K = 2 * V + 1
    if K ** (p + 1) > state_budget:
        raise ResourceError(
            f"DP table of {K}^{p + 1} entries exceeds the budget {state_budget}; lower markov_order or lattice_bound"
        )
    L = system.length
    lin = np.asarray(system.b.real if linear is None else linear, dtype=float)
    band = np.zeros(p + 1)
    lags = min(p, L - 1) + 1
    band[:lags] = 4.0 * system.lam**2 * np.real(system.gram[:lags])
    diag = band[0]
    vals = np.arange(-V, V + 1, dtype=float)

    # coupling[e_{i-1}, ..., e_{i-p}] = sum_m band[m] * e_{i-m}
    coupling = np.zeros((K,) * p)
    for m in range(1, p + 1):
        shape = [1] * p
        shape[m - 1] = K
        coupling = coupling + band[m] * vals.reshape(shape)

    cost = np.full((K,) * p, np.inf)
    cost[(V,) * p] = 0.0
    v_col = vals.reshape((K,) + (1,) * p)
    back = np.empty((L,) + (K,) * p, dtype=np.int16)
    for i in range(L):
        total = cost[None] + diag * v_col**2 + 2.0 * lin[i] * v_col + 2.0 * v_col * coupling[None]
        back[i] = np.argmin(total, axis=-1)
        cost = np.take_along_axis(total, back[i][..., None], axis=-1)[..., 0]

    state = list(np.unravel_index(int(np.argmin(cost)), cost.shape))
    out = np.empty(L, dtype=np.int64)
    for i in range(L - 1, -1, -1):
        out[i] = state[0]
        oldest = int(back[i][tuple(state)])
        state = state[1:] + [oldest]
    return out - V


def omp_refine(eps_init, system: DiffDftSystem, V, max_iter=None, return_history=False):
    """Greedy integer refinement of the exact out-of-band objective.

    Each iteration picks the coordinate with the largest residual
    correlation, moves it to its best lattice value, then re-fits the
    coordinates touched so far one at a time. Only strictly improving moves
    are taken, so the objective never increases.
    """
    eps = np.array(eps_init, dtype=np.int64)
    L = system.length
    if np.any(np.abs(eps) > V):
        raise ValueError("eps_init lies outside the lattice")
    max_iter = 2 * (L + 1) if max_iter is None else max_iter
    lam = system.lam
    a = 4.0 * lam**2 * len(system.bins)
    col = 8.0 * lam**2 * np.real(system.gram)  # gradient change per unit move, by lag

    # gradient of the exact objective: 2*(A_full e + Re b)
    grad = 2.0 * (system.full_gram_times(eps.astype(float)) + system.b.real)
    obj = system.exact_objective(eps)
    history = [obj]
    tol = 1e-12 * max(obj, 1.0)

    def best_move(i):
        d = int(np.clip(np.rint(-grad[i] / (2.0 * a)), -V - eps[i], V - eps[i]))
        return d, a * d * d + grad[i] * d

    def apply(i, d):
        eps[i] += d
        grad[:] += d * np.roll(col, i)

    support = []
    for _ in range(max_iter):
        i = int(np.argmax(np.abs(grad)))
        d, gain = best_move(i)
        if not gain < -tol:
            steps = np.clip(np.rint(-grad / (2.0 * a)), -V - eps, V - eps)
            gains = a * steps**2 + grad * steps
            i = int(np.argmin(gains))
            d, gain = int(steps[i]), gains[i]
            if not gain < -tol:
                break
        apply(i, d)
        if i not in support:
            support.append(i)
        for j in support:
            dj, gj = best_move(j)
            if gj < -tol:
                apply(j, dj)
        history.append(system.exact_objective(eps))

    if return_history:
        return eps, history
    return eps


def wrap_trend(slope, edge=5):
    """Ramp that removes the end-to-start jump of a slope sequence.

    The DFT treats the differenced sequence as periodic; the jump between
    its last and first values leaks into every out-of-band bin and biases
    the fold estimates next to the ends. The ramp is smooth, so it adds
    almost nothing out of band itself.
    """
    slope = np.asarray(slope, dtype=float)
    L = len(slope)
    # the outermost samples are the least reliable ones; fit just inside them
    skip = 2
    k = min(edge, (L - 2 * skip) // 2)
    if k < 2:
        return np.zeros(L)
    idx = np.arange(L)
    head = np.polyfit(idx[skip : skip + k], slope[skip : skip + k], 1)
    tail = np.polyfit(idx[L - skip - k : L - skip], slope[L - skip - k : L - skip], 1)
    # value one step past the end, where the periodic copy restarts
    jump = np.polyval(tail, L) - np.polyval(head, 0)
    return jump * idx / L


def _wrap(x):
    return x - np.rint(x)


def track_phase(meas, alpha=0.25, beta=0.45, init_len=5):
    """Unwrap a noisy sequence known only modulo 1 with an alpha-beta tracker.

    The tracked value follows a locally linear trend; each innovation is the
    measurement minus the prediction, reduced to ``[-1/2, 1/2)``.
    """
    meas = np.asarray(meas, dtype=float)
    out = np.empty(len(meas))
    if len(meas) == 0:
        return out
    out[0] = meas[0]
    rate = float(np.mean(_wrap(np.diff(meas[: init_len + 1])))) if len(meas) > 1 else 0.0
    for i in range(1, len(meas)):
        pred = out[i - 1] + rate
        innov = _wrap(meas[i] - pred)
        out[i] = pred + alpha * innov
        rate += beta * innov
    return out


def warm_start(system: DiffDftSystem, y):
    """Integer starting point for the DP rounds that carries the in-band part.

    The out-of-band least-squares residual ``r`` fixes ``eps_d`` only up to a
    slowly varying real sequence ``ell``. Since ``eps_d`` is integer,
    ``ell = -r`` modulo 1, and ``ell`` is recovered by tracking that
    sequence. The leftover integer offset is chosen so the recovered signal
    has zero mean slope.
    """
    lam = system.lam
    r = -np.real(np.fft.ifft(system.mask * system.y_tilde)) / (2.0 * lam)
    eps_d = np.rint(r + track_phase(-r))
    slope = np.diff(np.asarray(y, dtype=float)) + 2.0 * lam * eps_d
    eps_d -= np.rint(np.mean(slope) / (2.0 * lam))
    return eps_d.astype(np.int64)


def uslse_unfold(y, params: UslseParams) -> ReconResult:
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 3:
        raise ValueError("need at least 3 samples")
    if params.bins is not None:
        bins = np.asarray(params.bins, dtype=int)
    else:
        bins = select_band(n, params.fs_hz, params.band_hz, params.guard)
    V, p = params.lattice_bound, params.markov_order
    max_iter = params.omp_max_iter if params.omp_max_iter is not None else 2 * n

    system = build_system(y, params.lam, bins, p)
    if params.warm_start:
        start = np.clip(warm_start(system, y), -V, V)
    else:
        start = np.zeros(system.length, dtype=np.int64)
    if params.periodize:
        slope = np.diff(y) + 2.0 * params.lam * start
        system = build_system(y, params.lam, bins, p, trend=wrap_trend(slope))
    best, best_obj, objectives = _dp_omp_rounds(system, params, max_iter, start)

    eps = np.concatenate(([0], np.cumsum(best))).astype(np.int64)
    return ReconResult(
        g_hat=y + 2.0 * params.lam * eps,
        eps_hat=eps,
        algorithm="uslse",
        info={"objective": best_obj, "round_objectives": objectives, "n_bins": int(len(bins))},
    )


def _dp_omp_rounds(system, params, max_iter, start):
    V, p = params.lattice_bound, params.markov_order
    current = np.asarray(start, dtype=np.int64)
    best, best_obj = current, system.exact_objective(current)
    objectives = []
    for _ in range(params.rounds):
        # linearize the Gram entries dropped from the band at the current estimate
        linear = system.b.real + system.full_gram_times(current.astype(float)) - _band_times(system, p, current)
        cand = dp_solve(system, V, p, linear=linear, state_budget=params.state_budget)
        cand = omp_refine(cand, system, V, max_iter)
        obj = system.exact_objective(cand)
        objectives.append(obj)
        if obj < best_obj:
            best, best_obj = cand, obj
        if np.array_equal(cand, current):
            break
        current = cand
    return best, best_obj, objectives


def _band_times(system, p, v):
    band = 4.0 * system.lam**2 * np.real(system.gram[: p + 1])
    out = band[0] * v.astype(float)
    for m in range(1, p + 1):
        out[m:] += band[m] * v[:-m]
        out[:-m] += band[m] * v[m:]
    return out
