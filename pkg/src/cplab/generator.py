"""Dissipative semigroup generators and their matrix representations.

A generator acts on density matrices as

    L[rho] = -i [H, rho] + sum_ab c_ab (F_a rho F_b^dagger
                                        - 1/2 {F_b^dagger F_a, rho})

with traceless Hermitian ``H``, Hermitian coefficient matrix ``C = [c_ab]``
and an orthonormal traceless operator basis ``{F_a}``.  The equivalent jump
form uses operators ``V_r``; both directions of the conversion go through
the expansion of the jump operators over the basis.

Superoperators use column stacking: ``vec(A rho B) = (B^T kron A) vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import OperatorBasis
from .errors import NonTraceless, NonTracelessJump, NotCompletelyPositive, ShapeMismatch
from .linalg import (
    HERMITICITY_TOL,
    as_complex_matrix,
    eps_pos,
    fro_norm,
    hermitian_eig,
    require_hermitian,
    require_square,
    unvec,
    vec,
)


def _require_traceless(
    m: np.ndarray, name: str, error=NonTraceless, tol: float = HERMITICITY_TOL
) -> np.ndarray:
    trace = abs(complex(np.trace(m)))
    if trace > tol * max(1.0, fro_norm(m)):
        raise error(f"{name} has |trace| = {trace:.3e}, expected 0")
    return m


@dataclass(frozen=True)
class GKSGenerator:
    """Generator in coefficient-matrix form.

    ``hamiltonian`` must be Hermitian and traceless; ``coeff`` Hermitian of
    size ``(d^2-1) x (d^2-1)``.  A trace component in ``hamiltonian`` is
    rejected rather than projected out, so caller bugs stay visible.
    """

    dim: int
    hamiltonian: np.ndarray
    coeff: np.ndarray
    basis: OperatorBasis

    def __post_init__(self):
        h = require_hermitian(self.hamiltonian, "hamiltonian")
        if h.shape != (self.dim, self.dim):
            raise ShapeMismatch(f"hamiltonian must be {self.dim}x{self.dim}, got {h.shape}")
        _require_traceless(h, "hamiltonian")
        c = require_hermitian(self.coeff, "coeff")
        n = self.dim * self.dim - 1
        if c.shape != (n, n):
            raise ShapeMismatch(f"coeff must be {n}x{n} for d={self.dim}, got {c.shape}")
        if self.basis.dim != self.dim:
            raise ShapeMismatch(f"basis dimension {self.basis.dim} != generator dimension {self.dim}")
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "coeff", c)


@dataclass(frozen=True)
class LindbladGenerator:
    """Generator in jump-operator form; every ``V_r`` must be traceless."""

    dim: int
    hamiltonian: np.ndarray
    jump_ops: tuple = field(default_factory=tuple)

    def __post_init__(self):
        h = require_hermitian(self.hamiltonian, "hamiltonian")
        if h.shape != (self.dim, self.dim):
            raise ShapeMismatch(f"hamiltonian must be {self.dim}x{self.dim}, got {h.shape}")
        _require_traceless(h, "hamiltonian")
        ops = []
        for r, op in enumerate(self.jump_ops):
            arr = require_square(op, f"jump_ops[{r}]")
            if arr.shape != (self.dim, self.dim):
                raise ShapeMismatch(
                    f"jump_ops[{r}] must be {self.dim}x{self.dim}, got {arr.shape}"
                )
            _require_traceless(arr, f"jump_ops[{r}]", error=NonTracelessJump)
            ops.append(arr)
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jump_ops", tuple(ops))


@dataclass(frozen=True)
class Superoperator:
    """Matrix of a linear map on vectorized ``dim x dim`` matrices."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        arr = as_complex_matrix(self.matrix, "superoperator matrix")
        n = self.dim * self.dim
        if arr.shape != (n, n):
            raise ShapeMismatch(f"superoperator for dim={self.dim} must be {n}x{n}, got {arr.shape}")
        object.__setattr__(self, "matrix", arr)

    def apply(self, rho) -> np.ndarray:
        arr = require_square(rho, "rho")
        if arr.shape != (self.dim, self.dim):
            raise ShapeMismatch(f"state must be {self.dim}x{self.dim}, got {arr.shape}")
        return unvec(self.matrix @ vec(arr), self.dim)


def apply_generator(g: GKSGenerator, rho) -> np.ndarray:
    """Evaluate the generator on a state without building its matrix."""
    arr = require_square(rho, "rho")
    if arr.shape != (g.dim, g.dim):
        raise ShapeMismatch(f"rho must be {g.dim}x{g.dim}, got {arr.shape}")
    h = g.hamiltonian
    out = -1j * (h @ arr - arr @ h)
    f = g.basis.elements
    # sum_ab c_ab F_a rho F_b^dagger
    out += np.einsum("ab,aij,jk,blk->il", g.coeff, f, arr, f.conj(), optimize=True)
    # anticommutator part through G = sum_ab c_ab F_b^dagger F_a
    gmat = np.einsum("ab,bki,akj->ij", g.coeff, f.conj(), f, optimize=True)
    out -= 0.5 * (gmat @ arr + arr @ gmat)
    return out


def lindblad_to_gks(l: LindbladGenerator, basis: OperatorBasis) -> GKSGenerator:
    """Expand jump operators over ``basis``; the resulting ``C`` is PSD."""
    if basis.dim != l.dim:
        raise ShapeMismatch(f"basis dimension {basis.dim} != generator dimension {l.dim}")
    n = l.dim * l.dim - 1
    coeff = np.zeros((n, n), dtype=complex)
    for op in l.jump_ops:
        v = basis.expansion_coefficients(op)
        coeff += np.outer(v, v.conj())
    return GKSGenerator(dim=l.dim, hamiltonian=l.hamiltonian, coeff=coeff, basis=basis)


def gks_to_lindblad(g: GKSGenerator, tol: float | None = None) -> LindbladGenerator:
    """Factor ``C`` and return the jump-operator form.

    The factorization goes through the Hermitian eigendecomposition rather
    than Cholesky, which fails on the semidefinite boundary.  Eigenvalues in
    ``[-eps_pos, 0]`` are clamped to zero; anything lower raises
    :class:`NotCompletelyPositive` (the conversion is undefined there).
    """
    cutoff = eps_pos(g.coeff) if tol is None else tol
    decomp = hermitian_eig(g.coeff)
    if decomp.eigenvalues[0] < -cutoff:
        raise NotCompletelyPositive(
            f"coefficient matrix has eigenvalue {decomp.eigenvalues[0]:.6e} < -{cutoff:.1e}"
        )
    drop = 1e-12 * max(1.0, float(decomp.eigenvalues[-1]))
    jump_ops = []
    for lam, col in zip(decomp.eigenvalues, decomp.eigenvectors.T):
        if lam <= drop:
            continue
        v = np.sqrt(lam) * np.tensordot(col, g.basis.elements, axes=1)
        jump_ops.append(v)
    return LindbladGenerator(dim=g.dim, hamiltonian=g.hamiltonian, jump_ops=tuple(jump_ops))


def _hamiltonian_superop(h: np.ndarray) -> np.ndarray:
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def _dissipator_superop(coeff: np.ndarray, ops: np.ndarray) -> np.ndarray:
    """Superoperator of ``sum_ab c_ab (A_a . A_b^dagger - 1/2 {A_b^dagger A_a, .})``."""
    d = ops.shape[1]
    eye = np.eye(d)
    sandwich = np.einsum("ab,aij,bkl->kilj", coeff, ops, ops.conj(), optimize=True)
    out = sandwich.reshape(d * d, d * d)
    gmat = np.einsum("ab,bki,akj->ij", coeff, ops.conj(), ops, optimize=True)
    out -= 0.5 * (np.kron(eye, gmat) + np.kron(gmat.T, eye))
    return out


def superoperator_of(g: GKSGenerator) -> Superoperator:
    """Matrix representation of the generator under column stacking."""
    mat = _hamiltonian_superop(g.hamiltonian)
    mat += _dissipator_superop(g.coeff, g.basis.elements)
    return Superoperator(dim=g.dim, matrix=mat)
