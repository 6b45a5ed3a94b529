"""Entangled witness states for non-CP semigroup generators.

Given a direction ``w`` in ``C^{d^2-1}``, the traceless operator
``W = 1/2 sum_a w_a F_a`` and any invertible ``P`` with ``P^{-1} W P = W^T``
define coefficient matrices ``Phi = P`` and ``Psi^dagger = P^{-1} W`` of an
orthogonal vector pair ``(phi, psi)`` in ``C^d kron C^d``.  The overlap
rate

    d/dt <phi| exp(t(L kron I + I kron L))[|psi><psi|] |phi>  at t = 0

then evaluates to exactly ``(w^dagger C w) / 2``, so the eigenvector of the
most negative eigenvalue of ``C`` certifies that the doubled dynamics loses
positivity in a neighborhood of ``t = 0``.  The coefficients ``w_a`` enter
``W`` without conjugation; this is the convention under which the rate is
the plain quadratic form of ``C`` (a conjugated contraction flips sign
guarantees once ``C`` has complex entries).

The sign freedom ``Psi^dagger Phi = -W^T`` (e.g. with the fixed d = 2
rotation ``Phi``) is invisible to the rate, which is quadratic in each
coefficient matrix; candidates carry the realized sign.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import OperatorBasis
from .dynamics import tensor_extension
from .errors import (
    DegenerateW,
    InconsistentVerdict,
    InvalidGrid,
    NotOrthogonal,
    ShapeMismatch,
    TraceConditionViolated,
    ZeroVector,
)
from .generator import GKSGenerator
from .linalg import (
    POSITIVITY_TOL,
    eps_pos,
    fro_norm,
    hermitian_eig,
    matrix_exp,
    require_square,
    similarity_to_transpose,
    unvec,
    vec,
)

#: Default scan grid; negativity is guaranteed only near t = 0, so the
#: spacing is logarithmic.
DEFAULT_SCAN_GRID = tuple(np.geomspace(1e-4, 1.0, 30))

_PAIR_TOL = 1e-8


@dataclass(frozen=True)
class WitnessCandidate:
    """Certificate that the doubled dynamics fails positivity.

    ``phi``/``psi`` are stored unnormalized exactly as built from the
    coefficient matrices; positive rescaling cannot change any verdict.
    ``transpose_sign`` records whether ``psi_matrix^dagger phi_matrix``
    realizes ``+W^T`` or ``-W^T``.
    """

    direction: np.ndarray
    direction_operator: np.ndarray
    phi_matrix: np.ndarray
    psi_matrix: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    value: float
    quadratic_form: float
    transpose_sign: int

    def __post_init__(self):
        w_op = self.direction_operator
        scale = max(1.0, fro_norm(w_op))
        overlap = abs(np.vdot(self.phi, self.psi))
        if overlap > 1e-10 * max(1.0, np.linalg.norm(self.phi) * np.linalg.norm(self.psi)):
            raise NotOrthogonal(f"stored pair has |<phi|psi>| = {overlap:.3e}")
        psi_dag = self.psi_matrix.conj().T
        if fro_norm(self.phi_matrix @ psi_dag - w_op) > _PAIR_TOL * scale:
            raise InconsistentVerdict("phi_matrix @ psi_matrix^dagger does not reproduce W")
        signed = psi_dag @ self.phi_matrix
        if fro_norm(signed - self.transpose_sign * w_op.T) > _PAIR_TOL * scale:
            raise InconsistentVerdict("psi_matrix^dagger @ phi_matrix does not reproduce +-W^T")
        if abs(self.quadratic_form) > 1e-8 and np.sign(self.value) != np.sign(self.quadratic_form):
            raise InconsistentVerdict(
                f"overlap rate {self.value:.3e} and quadratic form "
                f"{self.quadratic_form:.3e} disagree in sign"
            )


@dataclass(frozen=True)
class NoNegativeDirection:
    """The coefficient matrix is PSD; no witness exists."""

    min_coeff_eigenvalue: float


@dataclass(frozen=True)
class NotApplicable:
    """Hypotheses of the symmetric-case shortcut are not met."""

    reason: str


@dataclass(frozen=True)
class NegativityScan:
    """Evolution of the witness state over a time grid."""

    times: np.ndarray
    min_eigenvalues: np.ndarray
    overlap_values: np.ndarray
    first_negative_time: float | None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.size == 0 or np.any(t < 0) or np.any(np.diff(t) <= 0):
            raise InvalidGrid("times must be nonnegative and strictly increasing")
        if not (t.size == len(self.min_eigenvalues) == len(self.overlap_values)):
            raise InvalidGrid("scan arrays must share a length")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "min_eigenvalues", np.asarray(self.min_eigenvalues, dtype=float))
        object.__setattr__(self, "overlap_values", np.asarray(self.overlap_values, dtype=float))


def _pair_vectors(phi, psi, dim_sq: int):
    phi_v = np.asarray(phi, dtype=complex).reshape(-1)
    psi_v = np.asarray(psi, dtype=complex).reshape(-1)
    if phi_v.size != dim_sq or psi_v.size != dim_sq:
        raise ShapeMismatch(
            f"pair vectors must have length {dim_sq}, got {phi_v.size} and {psi_v.size}"
        )
    if np.linalg.norm(psi_v) <= 0.0 or np.linalg.norm(phi_v) <= 0.0:
        raise ZeroVector("pair vectors must be nonzero")
    return phi_v, psi_v


def overlap_rate(g: GKSGenerator, phi, psi) -> float:
    """``<phi| (L kron I + I kron L)[|psi><psi|] |phi>`` for orthogonal vectors.

    This is the t = 0 derivative of the phi-overlap of the evolved
    projector; Hermiticity preservation makes it real.
    """
    phi_v, psi_v = _pair_vectors(phi, psi, g.dim * g.dim)
    overlap = abs(np.vdot(phi_v, psi_v))
    if overlap > 1e-10 * max(1.0, np.linalg.norm(phi_v) * np.linalg.norm(psi_v)):
        raise NotOrthogonal(f"|<phi|psi>| = {overlap:.3e}, pair must be orthogonal")
    ext = tensor_extension(g)
    image = ext.apply(np.outer(psi_v, psi_v.conj()))
    return float(np.vdot(phi_v, image @ phi_v).real)


def overlap_rate_trace_form(coeff, basis: OperatorBasis, phi_matrix, psi_matrix) -> float:
    """Trace-polynomial form of :func:`overlap_rate`.

    Valid whenever ``Tr(Psi Phi^dagger) = 0`` (the matrix statement of the
    orthogonality of the pair):

        sum_ab c_ab [ Tr(Psi Phi^+ F_a) Tr(Phi Psi^+ F_b^+)
                      + Tr((Phi^+ Psi)^T F_a) Tr((Psi^+ Phi)^T F_b^+) ]
    """
    c = np.asarray(coeff, dtype=complex)
    phi_m = require_square(phi_matrix, "phi_matrix")
    psi_m = require_square(psi_matrix, "psi_matrix")
    if phi_m.shape != (basis.dim, basis.dim) or psi_m.shape != (basis.dim, basis.dim):
        raise ShapeMismatch("coefficient matrices must match the basis dimension")
    cross = complex(np.trace(psi_m @ phi_m.conj().T))
    if abs(cross) > 1e-10 * max(1.0, fro_norm(phi_m) * fro_norm(psi_m)):
        raise TraceConditionViolated(f"|Tr(Psi Phi^dagger)| = {abs(cross):.3e}, expected 0")
    f = basis.elements
    m1 = psi_m @ phi_m.conj().T
    m2 = phi_m @ psi_m.conj().T
    n1 = (phi_m.conj().T @ psi_m).T
    n2 = (psi_m.conj().T @ phi_m).T
    t1 = np.einsum("ij,aji->a", m1, f)
    s1 = np.einsum("ij,bij->b", m2, f.conj())
    t2 = np.einsum("ij,aji->a", n1, f)
    s2 = np.einsum("ij,bij->b", n2, f.conj())
    return float((t1 @ c @ s1 + t2 @ c @ s2).real)


def direction_operator(w, basis: OperatorBasis) -> np.ndarray:
    """``W = 1/2 sum_a w_a F_a`` (coefficients enter unconjugated)."""
    w_arr = np.asarray(w, dtype=complex).reshape(-1)
    if w_arr.size != basis.size:
        raise ShapeMismatch(f"direction must have length {basis.size}, got {w_arr.size}")
    return 0.5 * np.tensordot(w_arr, basis.elements, axes=1)


def _candidate_from_direction(
    g: GKSGenerator,
    w: np.ndarray,
    rng: np.random.Generator | None,
    phi_matrix: np.ndarray | None,
) -> WitnessCandidate:
    w_op = direction_operator(w, g.basis)
    if fro_norm(w_op) <= 1e-14:
        raise DegenerateW("direction produced a vanishing operator")
    if phi_matrix is None:
        phi_m = similarity_to_transpose(w_op, rng=rng)
    else:
        phi_m = require_square(phi_matrix, "phi_matrix")
    psi_dag = np.linalg.solve(phi_m, w_op)
    psi_m = psi_dag.conj().T
    phi_v = phi_m.reshape(-1)
    psi_v = psi_m.reshape(-1)
    value = overlap_rate(g, phi_v, psi_v)
    quad = float(np.vdot(w, np.asarray(g.coeff) @ w).real)
    signed = psi_dag @ phi_m
    sign = 1 if fro_norm(signed - w_op.T) <= fro_norm(signed + w_op.T) else -1
    return WitnessCandidate(
        direction=np.asarray(w, dtype=complex),
        direction_operator=w_op,
        phi_matrix=phi_m,
        psi_matrix=psi_m,
        phi=phi_v,
        psi=psi_v,
        value=value,
        quadratic_form=quad,
        transpose_sign=sign,
    )


def construct_witness(
    g: GKSGenerator,
    rng: np.random.Generator | None = None,
    tol: float = POSITIVITY_TOL,
    phi_matrix=None,
):
    """Build a witness for the most negative direction of the coefficient matrix.

    Returns :class:`NoNegativeDirection` when the coefficient matrix is PSD
    within ``tol * max(1, ||C||_F)``.  ``phi_matrix`` overrides the
    similarity solver with a fixed coefficient matrix (it must conjugate
    ``W`` into ``+-W^T``); ties between degenerate eigenvalues resolve to
    the first column of the ascending eigendecomposition.
    """
    decomp = hermitian_eig(g.coeff)
    cutoff = tol * max(1.0, fro_norm(g.coeff))
    if decomp.eigenvalues[0] >= -cutoff:
        return NoNegativeDirection(min_coeff_eigenvalue=float(decomp.eigenvalues[0]))
    w = decomp.eigenvectors[:, 0]
    return _candidate_from_direction(g, w, rng, phi_matrix)


def symmetric_case_witness(g: GKSGenerator, tol: float = POSITIVITY_TOL):
    """Witness via the fixed choice ``Phi = I/d``, valid for the real case.

    Requires every basis element Hermitian and a real (symmetric)
    coefficient matrix; then the negative direction can be taken real, ``W``
    is Hermitian, and in its eigenbasis ``W^T = W``, so no similarity solve
    is needed.  Returns :class:`NotApplicable` when the hypotheses fail and
    :class:`NoNegativeDirection` for a PSD coefficient matrix.
    """
    f = g.basis.elements
    herm_dev = float(np.max(np.abs(f - f.conj().transpose(0, 2, 1))))
    if herm_dev > 1e-10:
        return NotApplicable(reason=f"basis elements deviate from Hermiticity by {herm_dev:.3e}")
    imag_dev = float(np.max(np.abs(g.coeff.imag)))
    if imag_dev > 1e-10 * max(1.0, fro_norm(g.coeff)):
        return NotApplicable(reason=f"coefficient matrix has imaginary entries up to {imag_dev:.3e}")

    c_real = g.coeff.real
    vals, vecs = np.linalg.eigh(c_real)
    cutoff = tol * max(1.0, fro_norm(g.coeff))
    if vals[0] >= -cutoff:
        return NoNegativeDirection(min_coeff_eigenvalue=float(vals[0]))
    w = vecs[:, 0].astype(complex)
    w_op = direction_operator(w, g.basis)
    d = g.dim
    w_vals, u = np.linalg.eigh(w_op)
    phi_m = (u @ u.T) / d
    psi_dag = d * (u.conj() * w_vals) @ u.conj().T
    psi_m = psi_dag.conj().T
    phi_v = phi_m.reshape(-1)
    psi_v = psi_m.reshape(-1)
    value = overlap_rate(g, phi_v, psi_v)
    quad = float(np.vdot(w, g.coeff @ w).real)
    return WitnessCandidate(
        direction=w,
        direction_operator=w_op,
        phi_matrix=phi_m,
        psi_matrix=psi_m,
        phi=phi_v,
        psi=psi_v,
        value=value,
        quadratic_form=quad,
        transpose_sign=1,
    )


def bell_phi_matrix() -> np.ndarray:
    """Coefficient matrix of the d = 2 singlet, ``(|01> - |10>)/sqrt(2)``.

    As a fixed ``Phi`` it conjugates every traceless 2x2 ``W`` into
    ``-W^T``; the sign is not felt by the overlap rate.
    """
    return np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex) / np.sqrt(2.0)


def negativity_scan(
    g: GKSGenerator,
    psi,
    phi,
    t_grid=None,
    tol: float = POSITIVITY_TOL,
) -> NegativityScan:
    """Evolve ``|psi><psi|`` under the doubled dynamics over a time grid.

    ``psi`` is normalized before forming the projector; ``phi`` enters the
    overlap values unnormalized.  ``first_negative_time`` is the earliest
    grid time whose evolved state has an eigenvalue below ``-eps_pos``.
    """
    if t_grid is None:
        t_grid = DEFAULT_SCAN_GRID
    times = np.asarray(tuple(t_grid), dtype=float)
    if times.size == 0 or np.any(times < 0) or np.any(np.diff(times) <= 0):
        raise InvalidGrid("time grid must be nonempty, nonnegative and strictly increasing")
    phi_v, psi_v = _pair_vectors(phi, psi, g.dim * g.dim)
    psi_v = psi_v / np.linalg.norm(psi_v)
    rho0 = np.outer(psi_v, psi_v.conj())
    ext = tensor_extension(g).matrix
    rho0_vec = vec(rho0)

    min_eigs = np.empty(times.size)
    overlaps = np.empty(times.size)
    first_negative = None
    for idx, t in enumerate(times):
        rho_t = unvec(matrix_exp(t * ext) @ rho0_vec, g.dim * g.dim)
        herm = (rho_t + rho_t.conj().T) / 2.0
        low = float(np.linalg.eigvalsh(herm)[0])
        min_eigs[idx] = low
        overlaps[idx] = float(np.vdot(phi_v, herm @ phi_v).real)
        if first_negative is None and low < -tol * max(1.0, fro_norm(herm)):
            first_negative = float(t)
    return NegativityScan(
        times=times,
        min_eigenvalues=min_eigs,
        overlap_values=overlaps,
        first_negative_time=first_negative,
    )
