"""Semigroup evolution, tensor-pair extension and complete positivity.

The one-parameter family ``exp(t L)`` realizes the dynamics of a generator
``L``; two identical, non-interacting copies evolve under the extension
``L kron I + I kron L``.  Complete positivity is decided by the exact
coefficient-matrix criterion (smallest eigenvalue of ``C``), with Choi
spectra of ``exp(t L)`` at sampled times serving as a consistency check;
the two criteria must agree or :class:`InconsistentVerdict` is raised.

The Choi matrix convention is unnormalized, ``sum_ij E_ij kron m[E_ij]``
over matrix units, so integer fixtures stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentVerdict, InvalidState, NegativeTime, ShapeMismatch, ZeroVector
from .generator import (
    GKSGenerator,
    Superoperator,
    _dissipator_superop,
    _hamiltonian_superop,
    superoperator_of,
)
from .linalg import (
    POSITIVITY_TOL,
    eps_pos,
    fro_norm,
    hermiticity_deviation,
    matrix_exp,
    min_eigenvalue,
    require_hermitian,
)

#: Times at which Choi spectra cross-check the coefficient criterion.
DEFAULT_TIME_SAMPLES = (0.01, 0.1, 1.0)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        arr = require_hermitian(self.matrix, "density matrix")
        if arr.shape != (self.dim, self.dim):
            raise ShapeMismatch(f"state must be {self.dim}x{self.dim}, got {arr.shape}")
        trace = complex(np.trace(arr))
        if abs(trace - 1.0) > 1e-10:
            raise InvalidState(f"density matrix trace is {trace:.12g}, expected 1")
        low = min_eigenvalue(arr)
        if low < -eps_pos(arr):
            raise InvalidState(f"density matrix has eigenvalue {low:.3e} below -eps_pos")
        object.__setattr__(self, "matrix", arr)

    @classmethod
    def from_pure(cls, vector) -> "DensityMatrix":
        v = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm <= 0.0:
            raise ZeroVector("cannot build a state from the zero vector")
        v = v / norm
        return cls(dim=v.size, matrix=np.outer(v, v.conj()))


@dataclass(frozen=True)
class ChoiMatrix:
    """Unnormalized Choi matrix of a map on ``dim x dim`` matrices."""

    dim: int
    matrix: np.ndarray

    def hermiticity_deviation(self) -> float:
        return hermiticity_deviation(self.matrix)

    def min_eigenvalue(self) -> float:
        return min_eigenvalue(self.matrix)


@dataclass(frozen=True)
class CPVerdict:
    """Outcome of the complete-positivity test."""

    is_cp: bool
    min_choi_eigenvalue: float
    min_coeff_eigenvalue: float
    tolerance: float

    def __post_init__(self):
        if self.is_cp != (self.min_choi_eigenvalue >= -self.tolerance):
            raise InconsistentVerdict(
                "verdict does not match the recorded Choi eigenvalue and tolerance"
            )


@dataclass(frozen=True)
class PositivitySampleReport:
    """Worst case found while sampling a map on random pure states."""

    min_eigenvalue: float
    worst_input: np.ndarray
    num_samples: int
    seed: int


def evolution_map(g: GKSGenerator, t: float) -> Superoperator:
    """The map ``exp(t L)`` as a superoperator; identity at ``t = 0``."""
    if t < 0:
        raise NegativeTime(f"evolution time must be nonnegative, got {t}")
    base = superoperator_of(g)
    return Superoperator(dim=g.dim, matrix=matrix_exp(t * base.matrix))


def tensor_extension(g: GKSGenerator) -> Superoperator:
    """Generator of two identical copies, ``L kron I + I kron L``.

    Built directly from the extended operator sets ``F_a kron I`` and
    ``I kron F_a`` (same coefficient matrix), which realizes each one-sided
    term of the generator acting on one tensor factor only.
    """
    d = g.dim
    eye = np.eye(d)
    h_ext = np.kron(g.hamiltonian, eye) + np.kron(eye, g.hamiltonian)
    left = np.stack([np.kron(f, eye) for f in g.basis.elements])
    right = np.stack([np.kron(eye, f) for f in g.basis.elements])
    mat = _hamiltonian_superop(h_ext)
    mat += _dissipator_superop(g.coeff, left)
    mat += _dissipator_superop(g.coeff, right)
    return Superoperator(dim=d * d, matrix=mat)


def choi_matrix(m: Superoperator) -> ChoiMatrix:
    """``sum_ij E_ij kron m[E_ij]`` over the matrix units ``E_ij``."""
    d = m.dim
    out = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            unit = np.zeros((d, d), dtype=complex)
            unit[i, j] = 1.0
            out += np.kron(unit, m.apply(unit))
    return ChoiMatrix(dim=d, matrix=out)


def is_completely_positive(
    g: GKSGenerator,
    t_samples=DEFAULT_TIME_SAMPLES,
    tol: float = POSITIVITY_TOL,
) -> CPVerdict:
    """Decide complete positivity of the semigroup generated by ``g``.

    The coefficient-matrix eigenvalue test is exact and authoritative; Choi
    spectra of ``exp(t L)`` at the sampled times guard against
    implementation bugs.  Near-boundary generators (smallest coefficient
    eigenvalue within roughly ``tol`` of zero) can legitimately trip the
    consistency check because the Choi negativity grows only linearly in
    ``t``.
    """
    times = tuple(float(t) for t in t_samples)
    if not times:
        raise NegativeTime("t_samples must be nonempty")
    if any(t < 0 for t in times):
        raise NegativeTime(f"t_samples must be nonnegative, got {times}")

    min_coeff = min_eigenvalue(g.coeff)
    coeff_ok = min_coeff >= -tol * max(1.0, fro_norm(g.coeff))

    base = superoperator_of(g)
    min_choi = np.inf
    choi_scale = 1.0
    for t in times:
        propagator = Superoperator(dim=g.dim, matrix=matrix_exp(t * base.matrix))
        choi = choi_matrix(propagator)
        min_choi = min(min_choi, choi.min_eigenvalue())
        choi_scale = max(choi_scale, fro_norm(choi.matrix))
    choi_tol = tol * choi_scale
    choi_ok = min_choi >= -choi_tol

    if coeff_ok != choi_ok:
        raise InconsistentVerdict(
            f"coefficient criterion (min eig {min_coeff:.6e}) and Choi sampling "
            f"(min eig {min_choi:.6e}, tol {choi_tol:.1e}) disagree"
        )
    return CPVerdict(
        is_cp=coeff_ok,
        min_choi_eigenvalue=float(min_choi),
        min_coeff_eigenvalue=float(min_coeff),
        tolerance=float(choi_tol),
    )


def haar_state_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unit vector (normalized complex normal)."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def positivity_preserving_sampled(
    m: Superoperator,
    n: int,
    seed: int = 0,
    include=(),
) -> PositivitySampleReport:
    """Probe a map with random pure states and report the worst eigenvalue.

    ``include`` may carry extra state vectors (e.g. a constructed witness)
    that are checked before the ``n`` Haar samples.  Sampling can certify a
    negative but never prove positivity.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    worst_value = np.inf
    worst_input = None
    vectors = [np.asarray(v, dtype=complex).reshape(-1) for v in include]
    vectors += [haar_state_vector(m.dim, rng) for _ in range(n)]
    for v in vectors:
        if v.size != m.dim:
            raise ShapeMismatch(f"sample vector has length {v.size}, expected {m.dim}")
        norm = np.linalg.norm(v)
        if norm <= 0.0:
            raise ZeroVector("cannot sample the zero vector")
        v = v / norm
        out = m.apply(np.outer(v, v.conj()))
        low = float(np.linalg.eigvalsh((out + out.conj().T) / 2.0)[0])
        if low < worst_value:
            worst_value = low
            worst_input = v
    return PositivitySampleReport(
        min_eigenvalue=worst_value,
        worst_input=worst_input,
        num_samples=n,
        seed=seed,
    )
