"""Dense complex linear algebra used by the channel and metric code.

All composite indices are row-major: for a bipartite space of dimensions
``(dim_a, dim_b)`` the basis vector ``|a, b>`` sits at index ``a * dim_b + b``.
Functions that take square matrices also accept stacks of shape
``(..., n, n)`` unless stated otherwise.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_ATOL = 1e-9
PSD_ATOL = 1e-10

_EPS = np.finfo(float).eps


class HermitianEigensystem(NamedTuple):
    """Eigenvalues in ascending order and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues[..., None, :]) @ dagger(v)


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def _square(m, name="matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def hermitian_defect(m: np.ndarray) -> float:
    """Largest absolute entry of ``m - m^dagger``."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - dagger(m))))


def kron(a, b) -> np.ndarray:
    """Kronecker product; ``(a kron b)[i*P + k, j*Q + l] = a[i, j] * b[k, l]``."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def hadamard(a, b) -> np.ndarray:
    """Element-wise (Schur) product of two equally shaped matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a * b


def partial_trace(m, dim_a: int, dim_b: int, over: str = "B") -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    Parameters
    ----------
    m : array_like, shape (..., dim_a*dim_b, dim_a*dim_b)
    dim_a, dim_b : int
        Factor dimensions; row index ``r = a * dim_b + b``.
    over : {"A", "B"}
        The subsystem that is traced out.
    """
    m = _square(m)
    n = dim_a * dim_b
    if m.shape[-1] != n:
        raise ValueError(f"expected {n}x{n} operator for dims ({dim_a}, {dim_b}), got {m.shape[-2:]}")
    t = m.reshape(m.shape[:-2] + (dim_a, dim_b, dim_a, dim_b))
    if over in ("B", "b", 1):
        return np.einsum("...ijkj->...ik", t)
    if over in ("A", "a", 0):
        return np.einsum("...ijil->...jl", t)
    raise ValueError(f"over must be 'A' or 'B', got {over!r}")


def _root_dim(size: int) -> int:
    n = int(round(np.sqrt(size)))
    if n * n != size:
        raise ValueError(f"dimension {size} is not a perfect square")
    return n


def reshuffle(m, n: int | None = None) -> np.ndarray:
    """Realignment ``out[(i,j),(k,l)] = m[(i,k),(j,l)]`` on an n^2 x n^2 matrix.

    This is an involution, and it maps the superoperator of the identity channel
    (the n^2 identity) to the unnormalized maximally entangled projector.
    """
    m = _square(m)
    if n is None:
        n = _root_dim(m.shape[-1])
    elif m.shape[-1] != n * n:
        raise ValueError(f"expected {n * n}x{n * n} matrix, got {m.shape[-2:]}")
    lead = m.shape[:-2]
    t = m.reshape(lead + (n, n, n, n))
    # axes (i, k, j, l) -> (i, j, k, l)
    t = np.swapaxes(t, -3, -2)
    return t.reshape(lead + (n * n, n * n)).copy()


def eigh(m, atol: float = HERMITIAN_ATOL) -> HermitianEigensystem:
    """Eigendecomposition of a hermitian matrix (symmetrized before solving)."""
    m = _square(m)
    defect = hermitian_defect(m)
    if defect > atol:
        raise ValueError(f"matrix is not hermitian (max |m - m^dagger| = {defect:.3e})")
    try:
        w, v = np.linalg.eigh(0.5 * (m + dagger(m)))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ArithmeticError(f"eigensolver did not converge: {exc}") from exc
    return HermitianEigensystem(w, v)


def noise_floor(eigenvalues: np.ndarray) -> np.ndarray:
    """Rank tolerance ``n * eps * max|lambda|`` for each matrix in a stack."""
    w = np.asarray(eigenvalues)
    return w.shape[-1] * _EPS * np.max(np.abs(w), axis=-1, keepdims=True)


def psd_spectrum(m, atol: float = PSD_ATOL, floor: bool = True) -> np.ndarray:
    """Eigenvalues of a PSD matrix with round-off removed.

    Eigenvalues in ``[-atol, 0)`` are clamped to zero and, with ``floor``, values
    below the rank tolerance are set to zero as well.
    """
    w = eigh(m).eigenvalues
    return _clean_spectrum(w, atol, floor)


def _clean_spectrum(w, atol, floor):
    lowest = float(np.min(w)) if w.size else 0.0
    if lowest < -atol:
        raise ValueError(f"matrix is not positive semidefinite (min eigenvalue {lowest:.3e})")
    w = np.clip(w, 0.0, None)
    if floor:
        w = np.where(w > noise_floor(w), w, 0.0)
    return w


def psd_sqrt(m, atol: float = PSD_ATOL, floor: bool = False) -> np.ndarray:
    """Hermitian PSD square root.

    Negative eigenvalues within ``atol`` of zero are clamped; anything more
    negative raises ``ValueError``. ``floor`` additionally zeroes eigenvalues
    under the rank tolerance, which keeps square roots of rank-deficient
    inputs from picking up ``sqrt(eps)``-sized garbage.
    """
    w, v = eigh(m)
    w = _clean_spectrum(w, atol, floor)
    return (v * np.sqrt(w)[..., None, :]) @ dagger(v)


def trace_norm(m) -> float | np.ndarray:
    """Sum of absolute eigenvalues of a hermitian matrix."""
    w = eigh(m).eigenvalues
    out = np.sum(np.abs(w), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def permutation_matrix(perm) -> np.ndarray:
    """Matrix ``P`` with ``P[perm[i], i] = 1``, i.e. ``P e_i = e_{perm[i]}``."""
    perm = np.asarray(perm)
    p = np.zeros((perm.size, perm.size))
    p[perm, np.arange(perm.size)] = 1.0
    return p


def subsystem_permutation(dims, order) -> np.ndarray:
    """Index map sending basis states of ``dims`` to the reordered tensor ``order``.

    ``order[k]`` names which original factor lands in position ``k``. The result
    ``perm`` satisfies ``new_index = perm[old_index]``.
    """
    dims = tuple(int(d) for d in dims)
    total = int(np.prod(dims))
    old = np.arange(total).reshape(dims)
    new_positions = np.transpose(old, order).reshape(-1)
    perm = np.empty(total, dtype=int)
    perm[new_positions] = np.arange(total)
    return perm
