"""Result container shared by the recovery algorithms."""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ReconResult:
    g_hat: np.ndarray
    eps_hat: np.ndarray
    algorithm: str = ""
    constant_ambiguity: float = 0.0
    nmse_db: float = float("nan")
    max_abs_err_v: float = float("nan")
    success: bool = False
    warnings: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.g_hat = np.asarray(self.g_hat, dtype=float)
        self.eps_hat = np.asarray(self.eps_hat, dtype=np.int64)
        if len(self.g_hat) != len(self.eps_hat):
            raise ValueError("g_hat and eps_hat must have equal length")
