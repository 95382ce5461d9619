"""Dense complex-matrix kernels used by every other module.

Matrices are plain ``numpy.ndarray`` values with dtype complex128.  All
functions validate their inputs (shape coherence, finiteness) and are pure:
no argument is mutated and results are freshly allocated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BranchCutError, DimensionError, NumericError, ParameterError

# Relative singular-value cutoff: sigma_i <= max(rows, cols) * 2**-40 * sigma_max
# is treated as zero when deciding ranks and consistency.
RANK_CUTOFF_FACTOR = 2.0 ** -40


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce ``m`` to a 2-D complex128 array, rejecting non-finite entries.

    Scalars become 1x1, one-dimensional sequences become column vectors.
    """
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise DimensionError(f"{name} must be at most 2-dimensional, got ndim={arr.ndim}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise NumericError(f"{name} contains NaN or Inf entries")
    return arr.copy()


def require_square(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def frob(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def vec(x: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization (fixed project-wide)."""
    return np.asarray(x).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int, cols: int) -> np.ndarray:
    return np.asarray(v).reshape((rows, cols), order="F")


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of one square matrix plus basic conditioning evidence.

    ``condition_estimate`` is the condition number of the eigenvector basis
    (large for defective matrices), capped at 1e300.
    """

    eigenvalues: np.ndarray
    min_real_part: float
    condition_estimate: float

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", np.atleast_1d(np.asarray(self.eigenvalues, dtype=np.complex128)))


def _eigvec_condition(vecs: np.ndarray) -> float:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        try:
            c = np.linalg.cond(vecs)
        except np.linalg.LinAlgError:
            return 1e300
    return float(min(c, 1e300)) if np.isfinite(c) else 1e300


def eigenvalues(m) -> SpectrumReport:
    """Eigenvalues of a square matrix as an unordered multiset.

    Exactly the diagonal for triangular input; otherwise LAPACK.
    """
    m = require_square(as_complex_matrix(m))
    n = m.shape[0]
    is_triangular = n == 1 or not np.any(np.tril(m, k=-1)) or not np.any(np.triu(m, k=1))
    if is_triangular:
        vals = m.diagonal().copy()
        if n == 1:
            cond = 1.0
        else:
            try:
                _, vecs = np.linalg.eig(m)
                cond = _eigvec_condition(vecs)
            except np.linalg.LinAlgError:
                cond = 1e300
    else:
        try:
            vals, vecs = np.linalg.eig(m)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"eigenvalue iteration failed: {exc}") from exc
        cond = _eigvec_condition(vecs)
    if not np.all(np.isfinite(vals)):
        raise NumericError("eigenvalue computation produced non-finite values")
    return SpectrumReport(
        eigenvalues=vals,
        min_real_part=float(np.min(vals.real)),
        condition_estimate=cond,
    )


def mat_exp(m) -> np.ndarray:
    """Matrix exponential (scaling-and-squaring with Pade); exp(0) = I exactly."""
    m = require_square(as_complex_matrix(m))
    if not np.any(m):
        return np.eye(m.shape[0], dtype=np.complex128)
    result = scipy.linalg.expm(m)
    if not np.all(np.isfinite(result)):
        raise NumericError("matrix exponential overflowed")
    return np.asarray(result, dtype=np.complex128)


def principal_sqrt(m) -> np.ndarray:
    """Principal matrix square root: s with s @ s = m, spectrum in the open
    right half-plane.

    Raises :class:`BranchCutError` when an eigenvalue of ``m`` lies on the
    closed negative real axis (the caller must shift first).
    """
    m = require_square(as_complex_matrix(m))
    spectrum = eigenvalues(m)
    scale = max(frob(m), 1.0)
    for lam in spectrum.eigenvalues:
        if lam.real <= 0 and abs(lam.imag) <= 1e-13 * scale:
            raise BranchCutError(
                f"eigenvalue {lam} lies on the closed negative real axis; "
                "shift the matrix before taking the principal square root"
            )
    s = scipy.linalg.sqrtm(m)
    s = np.asarray(s, dtype=np.complex128)
    if not np.all(np.isfinite(s)):
        raise NumericError("matrix square root produced non-finite values")
    return s


def kron_vec_operator(a, b, sign: int) -> np.ndarray:
    """Matrix of x |-> a x + sign * (x b) under column-stacking vectorization.

    For a of shape (n, n) and b of shape (m, m) returns the (nm, nm) matrix K
    with K @ vec(x) = vec(a x + sign * x b) for every n x m matrix x.
    """
    a = require_square(as_complex_matrix(a, "a"), "a")
    b = require_square(as_complex_matrix(b, "b"), "b")
    if sign not in (1, -1):
        raise ParameterError(f"sign must be +1 or -1, got {sign}")
    n, m = a.shape[0], b.shape[0]
    return np.kron(np.eye(m), a) + sign * np.kron(b.T, np.eye(n))


@dataclass(frozen=True)
class LstsqResult:
    """Minimum-norm least-squares solve with an explicit rank decision."""

    solution: np.ndarray
    residual_norm: float
    rank: int
    cutoff: float
    near_cutoff: bool  # a singular value landed within 10x of the cutoff


def lstsq_solve(K, rhs, rank_cutoff_factor: float | None = None,
                scale_reference: float = 0.0) -> LstsqResult:
    """Minimum-norm least-squares solution of K x = rhs via SVD.

    The rank is the number of singular values above
    ``rank_cutoff_factor * max(K.shape) * max(sigma_max, scale_reference)``
    (factor defaults to :data:`RANK_CUTOFF_FACTOR`); solves are flagged
    ``near_cutoff`` when a singular value falls within a factor 10 of the
    cutoff.  ``scale_reference`` lets callers judge rank at the scale of the
    data the operator was built from, which matters when the operator itself
    nearly vanishes.
    """
    K = as_complex_matrix(K, "K")
    rhs = np.asarray(rhs, dtype=np.complex128).reshape(-1)
    if rhs.shape[0] != K.shape[0]:
        raise DimensionError(f"rhs length {rhs.shape[0]} does not match K rows {K.shape[0]}")
    factor = RANK_CUTOFF_FACTOR if rank_cutoff_factor is None else rank_cutoff_factor
    U, s, Vh = np.linalg.svd(K, full_matrices=False)
    sigma_max = float(s[0]) if s.size else 0.0
    cutoff = factor * max(K.shape) * max(sigma_max, float(scale_reference))
    rank = int(np.sum(s > cutoff))
    near = bool(np.any((s > cutoff / 10.0) & (s <= cutoff * 10.0))) if s.size else False
    if rank:
        coeffs = (U[:, :rank].conj().T @ rhs) / s[:rank]
        solution = Vh[:rank].conj().T @ coeffs
    else:
        solution = np.zeros(K.shape[1], dtype=np.complex128)
    residual = float(np.linalg.norm(K @ solution - rhs))
    return LstsqResult(solution=solution, residual_norm=residual, rank=rank,
                       cutoff=cutoff, near_cutoff=near)
