"""Quantum channels and the conversions between their representations.

Conventions (row-major throughout):

* ``vec(A)[i*n + j] = A[i, j]``.
* Superoperator ``M = sum_k E_k kron conj(E_k)`` so that ``vec(Phi(rho)) = M vec(rho)``.
* Dynamical (Choi) matrix ``D = reshuffle(M) = sum_k vec(E_k) vec(E_k)^dagger``.
  Its first tensor factor is the channel *output* and the second the input,
  ``D[(i, j), (k, l)] = <i| Phi(|j><l|) |k>``.
* Jamiolkowski state ``rho_Phi = D / n``.

``compose(later, earlier)`` applies ``earlier`` first, i.e. it is ``later o earlier``.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .linalg import dagger

CHANNEL_ATOL = 1e-8
KRAUS_CUTOFF = 1e-10


class ChannelValidationError(ValueError):
    """Raised when a map that must be CP-TP fails validation."""

    def __init__(self, report: "ValidationReport", message: str | None = None):
        self.report = report
        super().__init__(message or f"channel is not CP-TP: {report.summary()}")


@dataclass(frozen=True)
class ValidationReport:
    """Measured defects of a dynamical matrix.

    ``hermiticity_defect`` is ``max |D - D^dagger|``, ``min_eigenvalue`` the
    smallest eigenvalue of D, ``trace_defect`` is ``|tr D - n|`` and ``tp_defect``
    the Frobenius norm of ``tr_out D - I``.
    """

    dim: int
    hermiticity_defect: float
    min_eigenvalue: float
    trace_defect: float
    tp_defect: float
    atol: float = CHANNEL_ATOL

    @property
    def hermitian(self) -> bool:
        return self.hermiticity_defect <= self.atol

    @property
    def completely_positive(self) -> bool:
        return self.min_eigenvalue >= -self.atol

    @property
    def trace_preserving(self) -> bool:
        return self.tp_defect <= self.atol

    @property
    def ok(self) -> bool:
        return self.hermitian and self.completely_positive and self.trace_preserving

    def summary(self) -> str:
        return (
            f"hermiticity_defect={self.hermiticity_defect:.3e}, "
            f"min_eigenvalue={self.min_eigenvalue:.3e}, "
            f"trace_defect={self.trace_defect:.3e}, tp_defect={self.tp_defect:.3e}"
        )

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "hermiticity_defect": self.hermiticity_defect,
            "min_eigenvalue": self.min_eigenvalue,
            "trace_defect": self.trace_defect,
            "tp_defect": self.tp_defect,
            "hermitian": self.hermitian,
            "completely_positive": self.completely_positive,
            "trace_preserving": self.trace_preserving,
            "ok": self.ok,
        }


# ----------------------------------------------------------------------------
# Representation conversions on raw arrays
# ----------------------------------------------------------------------------


def vec(a) -> np.ndarray:
    return np.asarray(a, dtype=complex).reshape(-1)


def unvec(v, n: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if n is None:
        n = linalg._root_dim(v.size)
    return v.reshape(n, n)


def _check_kraus(operators) -> list[np.ndarray]:
    ops = [np.asarray(e, dtype=complex) for e in operators]
    if not ops:
        raise ValueError("a Kraus set needs at least one operator")
    shape = ops[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ValueError(f"Kraus operators must be square, got {shape}")
    for e in ops:
        if e.shape != shape:
            raise ValueError(f"inconsistent Kraus operator shapes {shape} vs {e.shape}")
    return ops


def kraus_to_superoperator(operators: Sequence) -> np.ndarray:
    """``M = sum_k E_k kron conj(E_k)``."""
    ops = _check_kraus(operators)
    return sum(linalg.kron(e, np.conj(e)) for e in ops)


def kraus_to_dynamical(operators: Sequence) -> np.ndarray:
    ops = _check_kraus(operators)
    vs = np.stack([vec(e) for e in ops], axis=1)
    return vs @ dagger(vs)


def superoperator_to_dynamical(m) -> np.ndarray:
    return linalg.reshuffle(m)


def dynamical_to_superoperator(d) -> np.ndarray:
    return linalg.reshuffle(d)


def dynamical_to_kraus(d, cutoff: float = KRAUS_CUTOFF) -> list[np.ndarray]:
    """Canonical Kraus operators from the eigendecomposition of D.

    Eigenpairs with eigenvalue above ``cutoff`` each give one operator
    ``sqrt(lambda) * unvec(v)``, largest eigenvalue first. The phase of each
    eigenvector is fixed so that its largest-magnitude entry is real positive.
    """
    w, v = linalg.eigh(d, atol=CHANNEL_ATOL)
    n = linalg._root_dim(np.shape(d)[-1])
    keep = np.nonzero(w > cutoff)[0][::-1]
    if keep.size == 0:
        return [np.zeros((n, n), dtype=complex)]
    out = []
    for i in keep:
        col = v[:, i]
        pivot = col[np.argmax(np.abs(col))]
        out.append(np.sqrt(w[i]) * unvec(col * (abs(pivot) / pivot), n))
    return out


def interleave_permutation(dim_a: int, dim_b: int) -> np.ndarray:
    """Index map from ``(out_a, in_a, out_b, in_b)`` to ``(out_a, out_b, in_a, in_b)``.

    ``D_{a (x) b} = P (D_a kron D_b) P^T`` with ``P = permutation_matrix(perm)``.
    """
    return linalg.subsystem_permutation((dim_a, dim_a, dim_b, dim_b), (0, 2, 1, 3))


# ----------------------------------------------------------------------------
# Channel object
# ----------------------------------------------------------------------------


class Channel:
    """An immutable quantum operation on ``dim``-dimensional states.

    The dynamical matrix is the canonical form and is stored eagerly; the
    superoperator and Kraus set are derived on first access under a lock.
    Construct with one of the ``from_*`` class methods.
    """

    __slots__ = ("_dim", "_dynamical", "_source", "_kraus", "_superoperator", "_lock")

    def __init__(self, dynamical, source: str = "dynamical", kraus=None):
        d = linalg._square(dynamical, "dynamical matrix").copy()
        if d.ndim != 2:
            raise ValueError("dynamical matrix must be two-dimensional")
        self._dim = linalg._root_dim(d.shape[0])
        d.setflags(write=False)
        self._dynamical = d
        self._source = source
        self._kraus = None if kraus is None else tuple(kraus)
        self._superoperator = None
        self._lock = threading.Lock()

    @classmethod
    def from_kraus(cls, operators: Sequence) -> "Channel":
        ops = _check_kraus(operators)
        return cls(kraus_to_dynamical(ops), source="kraus", kraus=ops)

    @classmethod
    def from_superoperator(cls, m) -> "Channel":
        return cls(superoperator_to_dynamical(m), source="superoperator")

    @classmethod
    def from_dynamical(cls, d) -> "Channel":
        return cls(d, source="dynamical")

    @classmethod
    def from_jamiolkowski(cls, rho) -> "Channel":
        rho = linalg._square(rho, "Jamiolkowski state")
        n = linalg._root_dim(rho.shape[0])
        return cls(n * rho, source="jamiolkowski")

    @classmethod
    def from_unitary(cls, u) -> "Channel":
        return cls.from_kraus([u])

    @classmethod
    def identity(cls, dim: int) -> "Channel":
        return cls.from_kraus([np.eye(dim)])

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def source(self) -> str:
        """Name of the representation the channel was built from."""
        return self._source

    @property
    def dynamical(self) -> np.ndarray:
        return self._dynamical

    @property
    def superoperator(self) -> np.ndarray:
        with self._lock:
            if self._superoperator is None:
                m = dynamical_to_superoperator(self._dynamical)
                m.setflags(write=False)
                self._superoperator = m
            return self._superoperator

    @property
    def kraus(self) -> tuple[np.ndarray, ...]:
        with self._lock:
            if self._kraus is None:
                self._kraus = tuple(dynamical_to_kraus(self._dynamical))
            return self._kraus

    def jamiolkowski(self, check: bool = True) -> np.ndarray:
        return jamiolkowski(self, check=check)

    def validate(self, atol: float = CHANNEL_ATOL) -> ValidationReport:
        return validate(self, atol)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def __repr__(self) -> str:
        return f"Channel(dim={self._dim}, source={self._source!r})"


def validate(c: Channel, atol: float = CHANNEL_ATOL) -> ValidationReport:
    """Measure hermiticity, complete positivity and trace preservation of ``c``."""
    d = c.dynamical
    n = c.dim
    herm = linalg.hermitian_defect(d)
    w = np.linalg.eigvalsh(0.5 * (d + dagger(d)))
    reduced = linalg.partial_trace(d, n, n, over="A")
    return ValidationReport(
        dim=n,
        hermiticity_defect=herm,
        min_eigenvalue=float(w[0]),
        trace_defect=float(abs(np.trace(d) - n)),
        tp_defect=float(np.linalg.norm(reduced - np.eye(n))),
        atol=atol,
    )


def require_valid(c: Channel, atol: float = CHANNEL_ATOL) -> ValidationReport:
    report = validate(c, atol)
    if not report.ok:
        raise ChannelValidationError(report)
    return report


def jamiolkowski(c: Channel, check: bool = True) -> np.ndarray:
    """Jamiolkowski state ``D / n``; validates the channel first unless ``check=False``."""
    if check:
        require_valid(c)
    return c.dynamical / c.dim


def apply(c: Channel, rho) -> np.ndarray:
    """Action of the channel on an operator: unvec(M vec(rho))."""
    rho = linalg._square(rho, "state")
    if rho.shape[-1] != c.dim:
        raise ValueError(f"state dimension {rho.shape[-1]} does not match channel dimension {c.dim}")
    return unvec(c.superoperator @ vec(rho), c.dim)


def compose(later: Channel, earlier: Channel) -> Channel:
    """The channel ``later o earlier``: ``earlier`` acts first."""
    if later.dim != earlier.dim:
        raise ValueError(f"dimension mismatch: {later.dim} vs {earlier.dim}")
    return Channel.from_superoperator(later.superoperator @ earlier.superoperator)


def tensor(a: Channel, b: Channel) -> Channel:
    """Product channel ``a (x) b`` on the ``a.dim * b.dim`` space."""
    perm = interleave_permutation(a.dim, b.dim)
    joint = linalg.kron(a.dynamical, b.dynamical)
    d = np.empty_like(joint)
    d[np.ix_(perm, perm)] = joint
    return Channel(d, source="tensor")


def channel_distance(a: Channel, b: Channel) -> float:
    """Frobenius distance between dynamical matrices."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return float(np.linalg.norm(a.dynamical - b.dynamical))
