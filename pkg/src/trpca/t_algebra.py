"""The t-product algebra: DFT layer, block-circulant operators, t-SVD, ranks
and the tensor nuclear / spectral norms.

All tensor-tensor operations work slicewise in the Fourier domain along the
third axis.  DFT convention: unnormalized forward transform, 1/n3 on the
inverse (numpy's default), which makes the tensor nuclear norm equal
``norm_* (bcirc(A)) / n3`` exactly.

For real inputs the spectrum is conjugate-symmetric across frontal slices
(slice k pairs with slice n3-k, 0-based), so per-slice SVD work is done only
for the first ``n3 // 2 + 1`` slices and mirrored to the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor_core import TensorDims, as_tensor, norm_fro

__all__ = [
    "TSvd",
    "dft3",
    "idft3",
    "bcirc",
    "unfold",
    "fold",
    "tprod",
    "tprod_oracle",
    "ttranspose",
    "identity_tensor",
    "is_orthogonal",
    "tsvd",
    "skinny_tsvd",
    "multi_rank",
    "tubal_rank",
    "tnn",
    "spectral_norm",
    "average_rank",
]

DEFAULT_RANK_TOL = 1e-8

# slices that must be computed before conjugate mirroring fills the rest
def _half(n3: int) -> int:
    return n3 // 2 + 1


@dataclass(frozen=True)
class TSvd:
    """Factor triple A = U * S * V^T with f-diagonal S.

    ``U`` is n1 x rho x n3, ``S`` is rho x rho x n3, ``V`` is n2 x rho x n3
    where rho = min(n1, n2) for the full factorization or the requested
    rank for the skinny one.
    """

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray
    skinny: bool = False

    @property
    def rho(self) -> int:
        return self.U.shape[1]

    def compose(self) -> np.ndarray:
        """Reassemble U * S * V^T."""
        return tprod(tprod(self.U, self.S), ttranspose(self.V))


def dft3(A: np.ndarray) -> np.ndarray:
    """Forward DFT of every tube, returning the complex spectral tensor."""
    return np.fft.fft(np.asarray(A, dtype=np.float64), axis=2)


def idft3(Abar: np.ndarray, scale: float | None = None) -> np.ndarray:
    """Inverse DFT of every tube; the result must come out real.

    Raises ValueError when the imaginary residue exceeds ``1e-8`` times the
    data scale, which indicates a spectrum that is not conjugate-symmetric.
    """
    A = np.fft.ifft(np.asarray(Abar, dtype=np.complex128), axis=2)
    if scale is None:
        scale = max(float(np.abs(A.real).max(initial=0.0)), 1.0)
    residue = float(np.abs(A.imag).max(initial=0.0))
    if residue > 1e-8 * scale:
        raise ValueError(
            f"imaginary residue {residue:.3e} exceeds tolerance; "
            "spectral tensor is not conjugate-symmetric"
        )
    return np.ascontiguousarray(A.real)


def bcirc(A: np.ndarray) -> np.ndarray:
    """Block-circulant matricization of size (n1*n3) x (n2*n3).

    Block row r, column c holds frontal slice (r - c) mod n3.
    """
    A = as_tensor(A)
    n1, n2, n3 = A.shape
    M = np.empty((n1 * n3, n2 * n3))
    for r in range(n3):
        for c in range(n3):
            M[r * n1 : (r + 1) * n1, c * n2 : (c + 1) * n2] = A[:, :, (r - c) % n3]
    return M


def unfold(A: np.ndarray) -> np.ndarray:
    """Stack frontal slices vertically into an (n1*n3) x n2 matrix."""
    A = as_tensor(A)
    n1, n2, n3 = A.shape
    return np.moveaxis(A, 2, 0).reshape(n3 * n1, n2)


def fold(M: np.ndarray, n3: int) -> np.ndarray:
    """Inverse of :func:`unfold` for the given third extent."""
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] % n3 != 0:
        raise ValueError(f"cannot fold shape {M.shape} with n3={n3}")
    n1 = M.shape[0] // n3
    return np.ascontiguousarray(np.moveaxis(M.reshape(n3, n1, M.shape[1]), 0, 2))


def _check_tprod_shapes(A: np.ndarray, B: np.ndarray) -> None:
    if A.ndim != 3 or B.ndim != 3:
        raise ValueError("t-product requires 3-way tensors")
    if A.shape[1] != B.shape[0] or A.shape[2] != B.shape[2]:
        raise ValueError(f"t-product shape mismatch: {A.shape} * {B.shape}")


def tprod(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """t-product via slicewise matrix products in the Fourier domain."""
    _check_tprod_shapes(A, B)
    Abar = dft3(A)
    Bbar = dft3(B)
    Cbar = np.einsum("ipk,pjk->ijk", Abar, Bbar)
    return idft3(Cbar, scale=max(norm_fro(A) * norm_fro(B), 1.0))


def tprod_oracle(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Reference t-product through the dense block-circulant definition.

    Quadratic in n3; intended for tests only.
    """
    _check_tprod_shapes(A, B)
    return fold(bcirc(A) @ unfold(B), A.shape[2])


def ttranspose(A: np.ndarray) -> np.ndarray:
    """Tensor transpose: each slice transposed, slices 1..n3-1 reversed."""
    A = np.asarray(A, dtype=np.float64)
    At = np.transpose(A, (1, 0, 2))
    out = np.empty_like(At)
    out[:, :, 0] = At[:, :, 0]
    out[:, :, 1:] = At[:, :, :0:-1]
    return out


def identity_tensor(n: int, n3: int) -> np.ndarray:
    """Identity of the t-product: first slice I_n, remaining slices zero."""
    TensorDims(n, n, n3).validate()
    I = np.zeros((n, n, n3))
    I[:, :, 0] = np.eye(n)
    return I


def is_orthogonal(Q: np.ndarray, tol: float = 1e-9) -> bool:
    """True when Q^T * Q and Q * Q^T both equal the identity tensor."""
    Q = as_tensor(Q)
    n1, n2, n3 = Q.shape
    if n1 != n2:
        raise ValueError(f"orthogonality requires square frontal slices, got {Q.shape}")
    I = identity_tensor(n1, n3)
    Qt = ttranspose(Q)
    scale = np.sqrt(n1 * n3)
    return (
        norm_fro(tprod(Qt, Q) - I) <= tol * scale
        and norm_fro(tprod(Q, Qt) - I) <= tol * scale
    )


def _spectral_svds(Abar: np.ndarray):
    """Per-slice SVDs of the first half of the spectrum.

    Returns lists (Us, ss, Vhs) of length n3 where entries for mirrored
    slices are the conjugates of their partners.
    """
    n3 = Abar.shape[2]
    h = _half(n3)
    Us: list = [None] * n3
    ss: list = [None] * n3
    Vhs: list = [None] * n3
    for k in range(h):
        try:
            Us[k], ss[k], Vhs[k] = np.linalg.svd(Abar[:, :, k], full_matrices=False)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                f"SVD failed to converge on spectral slice {k}"
            ) from exc
    for k in range(h, n3):
        Us[k] = Us[n3 - k].conj()
        ss[k] = ss[n3 - k]
        Vhs[k] = Vhs[n3 - k].conj()
    return Us, ss, Vhs


def tsvd(A: np.ndarray, rank: int | None = None) -> TSvd:
    """t-SVD of A: orthogonal U, V and f-diagonal S with A = U * S * V^T.

    With ``rank`` given, returns the skinny factorization truncated to that
    many columns; otherwise rho = min(n1, n2).
    """
    A = as_tensor(A)
    n1, n2, n3 = A.shape
    rho = min(n1, n2)
    skinny = rank is not None
    if skinny:
        if not 1 <= rank <= rho:
            raise ValueError(f"rank {rank} out of range [1, {rho}]")
        rho = rank
    Us, ss, Vhs = _spectral_svds(dft3(A))
    Ubar = np.empty((n1, rho, n3), dtype=np.complex128)
    Sbar = np.zeros((rho, rho, n3), dtype=np.complex128)
    Vbar = np.empty((n2, rho, n3), dtype=np.complex128)
    for k in range(n3):
        Ubar[:, :, k] = Us[k][:, :rho]
        Sbar[:, :, k] = np.diag(ss[k][:rho])
        Vbar[:, :, k] = Vhs[k][:rho, :].conj().T
    scale = max(norm_fro(A), 1.0)
    return TSvd(
        U=idft3(Ubar, scale=scale),
        S=idft3(Sbar, scale=scale),
        V=idft3(Vbar, scale=scale),
        skinny=skinny,
    )


def skinny_tsvd(A: np.ndarray, r: int) -> TSvd:
    """t-SVD truncated to r singular tubes."""
    return tsvd(A, rank=r)


def _spectral_singular_values(A: np.ndarray) -> np.ndarray:
    """Matrix of singular values, shape (n3, min(n1, n2)), mirrored halves."""
    A = as_tensor(A)
    n3 = A.shape[2]
    Abar = dft3(A)
    h = _half(n3)
    sv = np.empty((n3, min(A.shape[0], A.shape[1])))
    for k in range(h):
        sv[k] = np.linalg.svd(Abar[:, :, k], compute_uv=False)
    for k in range(h, n3):
        sv[k] = sv[n3 - k]
    return sv


def multi_rank(A: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Per-spectral-slice matrix ranks, relative to the global largest
    singular value."""
    if tol < 0:
        raise ValueError("rank tolerance must be nonnegative")
    sv = _spectral_singular_values(A)
    cutoff = tol * sv.max(initial=0.0)
    return (sv > cutoff).sum(axis=1).astype(int)


def tubal_rank(A: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> int:
    """Largest entry of the multi rank."""
    return int(multi_rank(A, tol).max())


def average_rank(A: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> float:
    """Mean of the multi rank entries."""
    return float(multi_rank(A, tol).mean())


def tnn(A: np.ndarray) -> float:
    """Tensor nuclear norm: mean of the spectral slices' nuclear norms."""
    return float(_spectral_singular_values(A).sum() / A.shape[2])


def spectral_norm(A: np.ndarray) -> float:
    """Tensor spectral norm: largest singular value across spectral slices."""
    return float(_spectral_singular_values(A).max())
