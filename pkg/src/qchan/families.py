"""Named channel families and closed-form superfidelity/fidelity expressions.

The closed forms exist to be checked against the generic pipeline in
:mod:`qchan.metrics`; constructors build channels through the general
:class:`~qchan.channel.Channel` machinery so the two routes stay independent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .channel import Channel

PARAM_ATOL = 1e-12
RADICAND_ATOL = 1e-10


def _sqrt_nonneg(x, what: str):
    x = float(np.real(x))
    if x < -RADICAND_ATOL:
        raise ValueError(f"negative radicand {x:.3e} in {what}; parameters do not describe a valid channel")
    return np.sqrt(max(x, 0.0))


# ----------------------------------------------------------------------------
# One-qubit channels in the affine (kappa, eta) parametrization
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class AffineQubit:
    """Translation ``kappa`` and distortion ``eta`` of the Bloch ball.

    :meth:`dynamical` reproduces the published 4x4 matrix entry for entry. That
    matrix is written in the transposed index convention, so in this library's
    convention the channel maps a Bloch vector ``r`` to
    ``eta * r + (kappa_x, -kappa_y, kappa_z)``. Every similarity measure is
    invariant under transposing both states, so the closed forms are unaffected.
    """

    kappa: tuple = (0.0, 0.0, 0.0)
    eta: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        k = tuple(float(v) for v in self.kappa)
        e = tuple(float(v) for v in self.eta)
        if len(k) != 3 or len(e) != 3:
            raise ValueError("kappa and eta must be real 3-vectors")
        object.__setattr__(self, "kappa", k)
        object.__setattr__(self, "eta", e)

    @property
    def unital(self) -> bool:
        return max(abs(v) for v in self.kappa) <= PARAM_ATOL

    def dynamical(self) -> np.ndarray:
        kx, ky, kz = self.kappa
        ex, ey, ez = self.eta
        kp = kx + 1j * ky
        km = kx - 1j * ky
        d = np.array(
            [
                [ez + kz + 1, 0, kp, ex + ey],
                [0, -ez + kz + 1, ex - ey, kp],
                [km, ex - ey, -ez - kz + 1, 0],
                [ex + ey, km, 0, ez - kz + 1],
            ],
            dtype=complex,
        )
        return d / 2


def affine_qubit_channel(a: AffineQubit) -> Channel:
    """Qubit channel with the affine dynamical matrix of ``a`` (CP is not checked)."""
    return Channel(a.dynamical(), source="affine")


def affine_superfidelity(a: AffineQubit, b: AffineQubit) -> float:
    ka, ea = np.array(a.kappa), np.array(a.eta)
    kb, eb = np.array(b.kappa), np.array(b.eta)
    ra = _sqrt_nonneg(3 - ka @ ka - ea @ ea, "affine superfidelity")
    rb = _sqrt_nonneg(3 - kb @ kb - eb @ eb, "affine superfidelity")
    return float((1 + ka @ kb + ea @ eb + ra * rb) / 4)


def _require_unital(*channels: AffineQubit):
    for c in channels:
        if not c.unital:
            raise ValueError(f"unital formula needs kappa = 0, got kappa = {c.kappa}")


def unital_qubit_fidelity(a: AffineQubit, b: AffineQubit) -> float:
    _require_unital(a, b)
    (xa, ya, za), (xb, yb, zb) = a.eta, b.eta
    products = (
        (xa - ya - za + 1) * (xb - yb - zb + 1),
        (xa + ya - za - 1) * (xb + yb - zb - 1),
        (xa - ya + za - 1) * (xb - yb + zb - 1),
        (xa + ya + za + 1) * (xb + yb + zb + 1),
    )
    s = sum(_sqrt_nonneg(p, "unital fidelity") for p in products)
    return float(s * s / 16)


def unital_qubit_trace_distance(a: AffineQubit, b: AffineQubit) -> float:
    _require_unital(a, b)
    (xa, ya, za), (xb, yb, zb) = a.eta, b.eta
    dx, dy, dz = xa - xb, ya - yb, za - zb
    return float((abs(dx + dy + dz) + abs(dx - dy + dz) + abs(dx + dy - dz) + abs(dx - dy - dz)) / 8)


# ----------------------------------------------------------------------------
# Depolarizing and Werner-Holevo channels
# ----------------------------------------------------------------------------


def _check_dim(d):
    if int(d) != d or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d}")
    return int(d)


def _check_depolarizing_p(p):
    if not -PARAM_ATOL <= p <= 1 + PARAM_ATOL:
        raise ValueError(f"depolarizing parameter p={p} outside [0, 1]")


def werner_holevo_range(d: int) -> tuple[float, float]:
    """Admissible ``p`` for the transpose depolarizing channel: ``[-1/(d-1), 1/(d+1)]``."""
    return -1.0 / (d - 1), 1.0 / (d + 1)


def _check_wh_p(d, p):
    lo, hi = werner_holevo_range(d)
    if p < lo - PARAM_ATOL:
        raise ValueError(f"Werner-Holevo parameter p={p} below the lower bound -1/(d-1) = {lo:.6g} for d={d}")
    if p > hi + PARAM_ATOL:
        raise ValueError(f"Werner-Holevo parameter p={p} above the upper bound 1/(d+1) = {hi:.6g} for d={d}")


def _identity_dynamical(d):
    v = np.eye(d, dtype=complex).reshape(-1)
    return np.outer(v, v)


def _swap(d):
    return linalg.permutation_matrix(linalg.subsystem_permutation((d, d), (1, 0))).astype(complex)


def depolarizing(d: int, p: float) -> Channel:
    """``rho -> p rho + (1 - p) tr(rho) I / d`` for ``p`` in [0, 1]."""
    d = _check_dim(d)
    _check_depolarizing_p(p)
    dyn = p * _identity_dynamical(d) + (1 - p) / d * np.eye(d * d)
    return Channel(dyn, source="depolarizing")


def werner_holevo(d: int, p: float) -> Channel:
    """``rho -> p rho^T + (1 - p) tr(rho) I / d`` for ``p`` in ``[-1/(d-1), 1/(d+1)]``."""
    d = _check_dim(d)
    _check_wh_p(d, p)
    dyn = p * _swap(d) + (1 - p) / d * np.eye(d * d)
    return Channel(dyn, source="werner_holevo")


def _commuting_pair_formula(d, cross, p, q):
    n2 = d * d
    rad = _sqrt_nonneg((1 - p * p) * (1 - q * q), "superfidelity")
    return float((1 + cross * p * q + (n2 - 1) * rad) / n2)


def depolarizing_superfidelity(d: int, p: float, q: float) -> float:
    d = _check_dim(d)
    _check_depolarizing_p(p)
    _check_depolarizing_p(q)
    return _commuting_pair_formula(d, d * d - 1, p, q)


def werner_holevo_superfidelity(d: int, p: float, q: float) -> float:
    d = _check_dim(d)
    _check_wh_p(d, p)
    _check_wh_p(d, q)
    return _commuting_pair_formula(d, d * d - 1, p, q)


def cross_superfidelity_dep_wh(d: int, p: float, q: float) -> float:
    """Superfidelity between ``depolarizing(d, p)`` and ``werner_holevo(d, q)``."""
    d = _check_dim(d)
    _check_depolarizing_p(p)
    _check_wh_p(d, q)
    return _commuting_pair_formula(d, d - 1, p, q)


# ----------------------------------------------------------------------------
# Generalized Pauli channels
# ----------------------------------------------------------------------------


def shift_matrix(d: int) -> np.ndarray:
    """``X_d = sum_j |j-1 mod d><j|``."""
    x = np.zeros((d, d), dtype=complex)
    j = np.arange(d)
    x[(j - 1) % d, j] = 1
    return x


def clock_matrix(d: int) -> np.ndarray:
    """``Z_d = diag(1, w, ..., w^{d-1})`` with ``w = exp(2 pi i / d)``."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def check_pauli_probabilities(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError(f"Pauli probability matrix must be square, got shape {p.shape}")
    if np.min(p) < -PARAM_ATOL or np.max(p) > 1 + PARAM_ATOL:
        raise ValueError("Pauli probabilities must lie in [0, 1]")
    if abs(p.sum() - 1) > 1e-10:
        raise ValueError(f"Pauli probabilities must sum to 1, got {p.sum():.12g}")
    return p


def generalized_pauli(d: int, p) -> Channel:
    """``rho -> sum_ij p_ij X^i Z^j rho (X^i Z^j)^dagger`` for a ``d x d`` probability matrix."""
    d = _check_dim(d)
    p = check_pauli_probabilities(p)
    if p.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} probability matrix, got shape {p.shape}")
    x, z = shift_matrix(d), clock_matrix(d)
    ops = []
    for i in range(d):
        xi = np.linalg.matrix_power(x, i)
        for j in range(d):
            if p[i, j] > 0:
                ops.append(np.sqrt(p[i, j]) * xi @ np.linalg.matrix_power(z, j))
    return Channel.from_kraus(ops)


def pauli_superfidelity(p, q) -> float:
    p = check_pauli_probabilities(p)
    q = check_pauli_probabilities(q)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {q.shape}")
    ra = _sqrt_nonneg(1 - np.trace(p @ p.T), "Pauli superfidelity")
    rb = _sqrt_nonneg(1 - np.trace(q @ q.T), "Pauli superfidelity")
    return float(np.trace(p @ q.T) + ra * rb)


# ----------------------------------------------------------------------------
# Dephasing channels
# ----------------------------------------------------------------------------


def dephasing_qubit(f: complex) -> Channel:
    """Pure decoherence ``rho_01 -> f rho_01`` with populations untouched.

    In the ``sum_k E_k rho E_k^dagger`` convention the Kraus operators are
    ``diag(1, conj(f))`` and ``diag(0, sqrt(1 - |f|^2))``; they are the
    adjoints of ``diag(1, f)`` and ``diag(0, sqrt(1 - |f|^2))`` acting as
    ``E^dagger rho E``.
    """
    f = complex(f)
    if abs(f) > 1 + PARAM_ATOL:
        raise ValueError(f"dephasing factor |f| = {abs(f):.6g} exceeds 1")
    rest = np.sqrt(max(0.0, 1 - abs(f) ** 2))
    return Channel.from_kraus([np.diag([1, np.conj(f)]), np.diag([0, rest])])


def check_dephasing_matrix(F) -> np.ndarray:
    F = np.asarray(F, dtype=complex)
    if F.ndim != 2 or F.shape[0] != F.shape[1]:
        raise ValueError(f"dephasing matrix must be square, got shape {F.shape}")
    if linalg.hermitian_defect(F) > PARAM_ATOL:
        raise ValueError("dephasing matrix must be hermitian")
    if np.max(np.abs(np.diag(F) - 1)) > PARAM_ATOL:
        raise ValueError("dephasing matrix must have unit diagonal")
    return F


def dephasing_qudit(F) -> Channel:
    """Hadamard-product channel ``rho -> F o rho``; requires ``F`` to be PSD."""
    F = check_dephasing_matrix(F)
    lowest = float(np.linalg.eigvalsh(F)[0])
    if lowest < -RADICAND_ATOL:
        raise ValueError(f"dephasing matrix is not positive semidefinite (min eigenvalue {lowest:.3e})")
    d = F.shape[0]
    dyn = np.zeros((d * d, d * d), dtype=complex)
    diag = np.arange(d) * (d + 1)
    dyn[np.ix_(diag, diag)] = F
    return Channel(dyn, source="dephasing")


def dephasing_matrix(f: complex) -> np.ndarray:
    """Qubit dephasing matrix ``[[1, f], [conj f, 1]]``."""
    f = complex(f)
    return np.array([[1, f], [np.conj(f), 1]], dtype=complex)


def dephasing_superfidelity(f: complex, g: complex) -> float:
    f, g = complex(f), complex(g)
    for x in (f, g):
        if abs(x) > 1 + PARAM_ATOL:
            raise ValueError(f"dephasing factor |f| = {abs(x):.6g} exceeds 1")
    rf = _sqrt_nonneg(1 - abs(f) ** 2, "dephasing superfidelity")
    rg = _sqrt_nonneg(1 - abs(g) ** 2, "dephasing superfidelity")
    return float(0.5 + 0.5 * (f * g.conjugate()).real + 0.5 * rf * rg)


def dephasing_conjugate_superfidelity(f: complex) -> float:
    """``G(f, conj f) = 1 - (|f^2| - Re f^2) / 2``."""
    f = complex(f)
    if abs(f) > 1 + PARAM_ATOL:
        raise ValueError(f"dephasing factor |f| = {abs(f):.6g} exceeds 1")
    return float(1 - (abs(f * f) - (f * f).real) / 2)


def dephasing_qudit_superfidelity(F, G) -> float:
    """``(f^dagger g + sqrt(d^2 - |f|^2) sqrt(d^2 - |g|^2)) / d^2`` with ``f = vec(F)``.

    Holds for any hermitian ``F``, ``G`` with unit diagonal.
    """
    F = check_dephasing_matrix(F)
    G = check_dephasing_matrix(G)
    if F.shape != G.shape:
        raise ValueError(f"dimension mismatch: {F.shape} vs {G.shape}")
    d = F.shape[0]
    f, g = F.reshape(-1), G.reshape(-1)
    inner = np.vdot(f, g)
    if abs(inner.imag) > 1e-10:
        raise ValueError("f^dagger g has a non-negligible imaginary part")
    rf = _sqrt_nonneg(_dephasing_radicand(F), "qudit dephasing superfidelity")
    rg = _sqrt_nonneg(_dephasing_radicand(G), "qudit dephasing superfidelity")
    return float((inner.real + rf * rg) / (d * d))


def _dephasing_radicand(F) -> float:
    """``d^2 - |f|^2`` as ``2 sum_{i<j} lambda_i lambda_j`` over the spectrum of ``F``.

    Uses ``tr F = d``; the pairwise sum avoids cancelling two numbers near
    ``d^2`` when ``F`` is close to rank one.
    """
    w = np.linalg.eigvalsh(F)
    w = np.where(np.abs(w) > linalg.noise_floor(w), w, 0.0)
    c = np.cumsum(w)
    return float(2.0 * np.sum(w[1:] * c[:-1]))


def dephasing_qudit_conjugate_superfidelity(F) -> float:
    """``G(f, conj f) = 1 - (|f|^2 - f^dagger conj(f)) / d^2``."""
    F = check_dephasing_matrix(F)
    d = F.shape[0]
    f = F.reshape(-1)
    val = np.vdot(f, f).real - np.vdot(f, f.conj())
    if abs(val.imag) > 1e-10:
        raise ValueError("f^dagger conj(f) has a non-negligible imaginary part")
    return float(1 - val.real / (d * d))
