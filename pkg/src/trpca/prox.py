"""Closed-form proximal operators for the two solver subproblems.

``tsvt`` is the prox of the tensor nuclear norm (per-spectral-slice singular
value shrinkage); ``soft_threshold`` is the prox of the elementwise l1 norm.
Under the unnormalized-forward / 1/n3-inverse DFT convention, the per-slice
shrinkage threshold equals tau itself: the 1/n3 in the nuclear norm
definition and the 1/n3 from Parseval on the Frobenius term cancel.
"""

from __future__ import annotations

import numpy as np

from .t_algebra import _half, dft3, idft3
from .tensor_core import as_tensor, norm_fro

__all__ = ["tsvt", "soft_threshold"]


def tsvt(Y: np.ndarray, tau: float) -> np.ndarray:
    """Minimizer of tau*||L||_tnn + (1/2)*||L - Y||_F^2.

    Each spectral slice gets a matrix SVT with threshold tau; conjugate
    symmetry lets us process only the first half of the slices.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    Y = as_tensor(Y)
    n3 = Y.shape[2]
    Ybar = dft3(Y)
    Lbar = np.empty_like(Ybar)
    for k in range(_half(n3)):
        U, s, Vh = np.linalg.svd(Ybar[:, :, k], full_matrices=False)
        s = np.maximum(s - tau, 0.0)
        nz = int(np.count_nonzero(s))
        Lbar[:, :, k] = (U[:, :nz] * s[:nz]) @ Vh[:nz, :]
    for k in range(_half(n3), n3):
        Lbar[:, :, k] = Lbar[:, :, n3 - k].conj()
    return idft3(Lbar, scale=max(norm_fro(Y), 1.0))


def soft_threshold(Y: np.ndarray, tau: float) -> np.ndarray:
    """Minimizer of tau*||E||_1 + (1/2)*||E - Y||_F^2, entrywise shrinkage."""
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    Y = np.asarray(Y, dtype=np.float64)
    return np.sign(Y) * np.maximum(np.abs(Y) - tau, 0.0)
