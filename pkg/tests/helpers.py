"""Shared random-object builders for the test suite."""

import numpy as np

from cplab import GKSGenerator, standard_basis


def random_hermitian(d, rng, scale=1.0):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (m + m.conj().T) / 2.0


def random_traceless_hermitian(d, rng, scale=1.0):
    h = random_hermitian(d, rng, scale)
    return h - np.trace(h) / d * np.eye(d)


def random_psd(n, rng, rank=None):
    rank = n if rank is None else rank
    b = rng.standard_normal((rank, n)) + 1j * rng.standard_normal((rank, n))
    return b.conj().T @ b


def random_generator(d, rng, coeff=None, hamiltonian=None):
    """Generator with random traceless Hermitian H and Hermitian C."""
    basis = standard_basis(d)
    n = d * d - 1
    if hamiltonian is None:
        hamiltonian = random_traceless_hermitian(d, rng)
    if coeff is None:
        coeff = random_hermitian(n, rng)
    return GKSGenerator(dim=d, hamiltonian=hamiltonian, coeff=coeff, basis=basis)


def random_density(d, rng):
    """Full-rank random mixed state."""
    m = random_psd(d, rng)
    return m / np.trace(m)


def random_pure_vector(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def pair_reorder_matrix(d):
    """Permutation aligning ``kron(vec(A), vec(B))`` with ``vec(A kron B)``.

    Column index convention: compound matrix element ``(i1 i2, j1 j2)`` sits
    at vec index ``(i1 d + i2) + d^2 (j1 d + j2)``; the kron of the two
    single-system vecs puts it at ``(i1 + d j1) d^2 + (i2 + d j2)``.
    """
    dd = d * d
    perm = np.zeros((dd * dd, dd * dd))
    for i1 in range(d):
        for i2 in range(d):
            for j1 in range(d):
                for j2 in range(d):
                    compound = (i1 * d + i2) + dd * (j1 * d + j2)
                    split = (i1 + d * j1) * dd + (i2 + d * j2)
                    perm[split, compound] = 1.0
    return perm


def tensor_square_superop(s, d):
    """Superoperator of the map ``m kron m`` given the superoperator of ``m``."""
    perm = pair_reorder_matrix(d)
    return perm.T @ np.kron(s, s) @ perm


def transpose_superop(d):
    """Superoperator of matrix transposition (column-stacking convention)."""
    t = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            t[i + d * j, j + d * i] = 1.0
    return t.astype(complex)
