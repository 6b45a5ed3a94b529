"""Dense complex linear algebra kernels.

Conventions used throughout the package:

* Matrices are plain ``numpy.ndarray`` of dtype complex128, row-major.
* Vectorization is column-stacking, ``vec(M)[i + d*j] = M[i, j]``, so that
  ``vec(A X B) = (B^T kron A) vec(X)``.
* Hermiticity is checked relative to ``max(1, ||M||_F)`` with tolerance
  ``HERMITICITY_TOL``; positivity verdicts use ``eps_pos(M)`` uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NonHermitian, NonSquare, SolverFailure

#: Relative Hermiticity tolerance (single knob shared by all callers).
HERMITICITY_TOL = 1e-10

#: Relative positivity tolerance; absolute cutoff is eps_pos(M).
POSITIVITY_TOL = 1e-9

#: Residual tolerance of the similarity-to-transpose solver.
SIMILARITY_TOL = 1e-8

#: Determinant floor for accepting a similarity candidate (spectral norm 1).
_DET_FLOOR = 1e-10

#: Seed used when no RNG is supplied, keeping library calls deterministic.
DEFAULT_SEED = 0x5EED


def fro_norm(m: np.ndarray) -> float:
    """Frobenius norm as a plain float."""
    return float(np.linalg.norm(m))


def eps_pos(m: np.ndarray) -> float:
    """Absolute positivity tolerance for verdicts about ``m``."""
    return POSITIVITY_TOL * max(1.0, fro_norm(m))


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array; reject NaN/Inf entries."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise NonSquare(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.real)) or not np.all(np.isfinite(arr.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def require_square(m, name: str = "matrix") -> np.ndarray:
    arr = as_complex_matrix(m, name)
    if arr.shape[0] != arr.shape[1]:
        raise NonSquare(f"{name} must be square, got shape {arr.shape}")
    return arr


def hermiticity_deviation(m: np.ndarray) -> float:
    """Relative deviation ``||M - M^dagger||_F / max(1, ||M||_F)``."""
    return fro_norm(m - m.conj().T) / max(1.0, fro_norm(m))


def require_hermitian(m, name: str = "matrix", tol: float = HERMITICITY_TOL) -> np.ndarray:
    arr = require_square(m, name)
    dev = hermiticity_deviation(arr)
    if dev > tol:
        raise NonHermitian(f"{name} deviates from Hermiticity by {dev:.3e} (tol {tol:.1e})")
    return arr


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral data of a Hermitian matrix.

    ``eigenvalues`` are real and ascending; ``eigenvectors`` holds the
    corresponding orthonormal columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_eig(m, tol: float = HERMITICITY_TOL) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    The input is symmetrized before the LAPACK call so that roundoff in the
    caller cannot leak into the spectrum; deviations beyond ``tol`` raise
    :class:`NonHermitian` instead.
    """
    arr = require_hermitian(m, tol=tol)
    herm = (arr + arr.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(herm)
    return EigenDecomposition(eigenvalues=vals, eigenvectors=vecs)


def min_eigenvalue(m, tol: float = HERMITICITY_TOL) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    arr = require_hermitian(m, tol=tol)
    herm = (arr + arr.conj().T) / 2.0
    return float(np.linalg.eigvalsh(herm)[0])


def matrix_exp(m) -> np.ndarray:
    """Matrix exponential ``e^M`` (scaling-and-squaring, Pade kernel)."""
    arr = require_square(m)
    if not arr.any():
        return np.eye(arr.shape[0], dtype=complex)
    return scipy.linalg.expm(arr)


def _transpose_commutant_basis(w: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ``{X : W X = X W^T}`` as a stack of matrices.

    The equation is vectorized (column stacking) into
    ``(I kron W - W kron I) vec(X) = 0`` and the nullspace read off an SVD.
    The solution set is never empty: every square matrix is similar to its
    transpose, so it even contains invertible elements.
    """
    d = w.shape[0]
    eye = np.eye(d)
    system = np.kron(eye, w) - np.kron(w, eye)
    _, sing, vh = np.linalg.svd(system)
    cutoff = max(sing[0], 1.0) * 1e-12 if sing.size else 0.0
    null_rows = vh[sing <= cutoff] if sing.size else vh
    if null_rows.size == 0:
        # Guaranteed nonempty in exact arithmetic; keep the best candidate.
        null_rows = vh[-1:]
    return null_rows.conj().reshape(-1, d, d).transpose(0, 2, 1)


def similarity_to_transpose(
    w,
    rng: np.random.Generator | None = None,
    tol: float = SIMILARITY_TOL,
) -> np.ndarray:
    """Invertible ``P`` with ``P^{-1} W P = W^T`` in the standard basis.

    Numerical Jordan forms are avoided: random complex combinations of the
    nullspace basis of ``W X = X W^T`` are generically invertible, so the
    solver samples combinations (budget 64, then a denser 256-draw phase)
    and keeps the best-conditioned candidate that passes the determinant
    floor and the residual bound ``||P^{-1} W P - W^T||_F <= tol * max(1,
    ||W||_F)``.
    """
    w_arr = require_square(w, "W")
    d = w_arr.shape[0]
    if not w_arr.any():
        return np.eye(d, dtype=complex)

    scale = max(1.0, fro_norm(w_arr))
    basis = _transpose_commutant_basis(w_arr)
    k = basis.shape[0]
    if rng is None:
        rng = np.random.default_rng(DEFAULT_SEED)

    target = w_arr.T
    best: np.ndarray | None = None
    best_sigma_min = 0.0
    valid_found = 0
    for draw in range(64 + 256):
        coeff = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        if draw >= 64:
            # Densify: widen the sampling spread to escape unlucky regions.
            coeff *= np.exp(rng.uniform(-2.0, 2.0, size=k))
        cand = np.tensordot(coeff, basis, axes=1)
        sigma = np.linalg.svd(cand, compute_uv=False)
        if sigma[0] <= 0.0:
            continue
        cand = cand / sigma[0]
        if abs(np.linalg.det(cand)) <= _DET_FLOOR:
            continue
        residual = fro_norm(np.linalg.solve(cand, w_arr @ cand) - target)
        if residual > tol * scale:
            continue
        sigma_min = sigma[-1] / sigma[0]
        if sigma_min > best_sigma_min:
            best_sigma_min = sigma_min
            best = cand
        valid_found += 1
        # A handful of valid draws is enough to pick a well-conditioned one.
        if valid_found >= 8 and draw >= 7:
            break
    if best is None:
        raise SolverFailure(
            f"no invertible similarity found for a {d}x{d} matrix after the retry budget"
        )
    return best


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec` for square matrices."""
    arr = np.asarray(v).reshape(-1)
    if dim is None:
        dim = int(round(np.sqrt(arr.size)))
    if dim * dim != arr.size:
        raise NonSquare(f"cannot reshape length-{arr.size} vector into a square matrix")
    return arr.reshape(dim, dim, order="F")
