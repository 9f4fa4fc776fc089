"""Similarity and distance measures between density matrices and channels.

Every state-level function accepts either a pair of ``(n, n)`` matrices or a
pair of stacks ``(..., n, n)`` and returns a float or an array accordingly.

Superfidelity is evaluated through the identity

    1 - G(rho, sigma) = (sqrt(m_rho) - sqrt(m_sigma))**2 / 2 + ||rho - sigma||_F**2 / 2

with ``m = 1 - tr rho**2`` taken from the (round-off floored) spectrum. It is
algebraically the usual ``tr(rho sigma) + sqrt(m_rho) sqrt(m_sigma)`` but is
exactly symmetric, exactly 1 on identical inputs and does not lose
``sqrt(eps)`` of accuracy on pure states.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .channel import Channel, jamiolkowski
from .linalg import dagger

DENSITY_ATOL = 1e-9
IMAG_ATOL = 1e-10


def _as_float(x):
    return float(x) if np.ndim(x) == 0 else x


def _pair(rho, sigma):
    rho = linalg._square(rho, "rho")
    sigma = linalg._square(sigma, "sigma")
    if rho.shape[-1] != sigma.shape[-1]:
        raise ValueError(f"dimension mismatch: {rho.shape[-1]} vs {sigma.shape[-1]}")
    return rho, sigma


def check_density_matrix(rho, atol: float = DENSITY_ATOL) -> np.ndarray:
    """Return ``rho`` as a complex array after checking it is a density matrix."""
    rho = linalg._square(rho, "density matrix")
    defect = linalg.hermitian_defect(rho)
    if defect > atol:
        raise ValueError(f"density matrix is not hermitian (defect {defect:.3e})")
    w = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))
    if np.min(w) < -atol:
        raise ValueError(f"density matrix has negative eigenvalue {np.min(w):.3e}")
    tr = np.trace(rho, axis1=-2, axis2=-1)
    if np.max(np.abs(tr - 1)) > atol:
        raise ValueError(f"density matrix trace deviates from 1 by {np.max(np.abs(tr - 1)):.3e}")
    return rho


def purity(rho):
    """``Re tr rho^2`` (for hermitian input this is the squared Frobenius norm)."""
    rho = linalg._square(rho)
    tr = np.einsum("...ij,...ji->...", rho, rho)
    if np.max(np.abs(tr.imag)) > IMAG_ATOL:
        raise ValueError("tr rho^2 has a non-negligible imaginary part; input is not hermitian")
    return _as_float(tr.real)


def mixedness(rho):
    """``1 - tr rho^2`` evaluated as ``2 sum_{i<j} lambda_i lambda_j / (tr rho)^2``.

    Using the floored spectrum makes this exactly zero for rank-one input and
    free of cancellation elsewhere.
    """
    w = linalg.psd_spectrum(rho, atol=DENSITY_ATOL)
    c = np.cumsum(w, axis=-1)
    total = c[..., -1]
    pairs = np.sum(w[..., 1:] * c[..., :-1], axis=-1)
    return _as_float(2.0 * pairs / total**2)


def overlap(rho, sigma):
    """``Re tr(rho sigma)``; the imaginary part must be below 1e-10."""
    rho, sigma = _pair(rho, sigma)
    t1 = np.einsum("...ij,...ji->...", rho, sigma)
    t2 = np.einsum("...ij,...ji->...", sigma, rho)
    if max(np.max(np.abs(t1.imag)), np.max(np.abs(t2.imag))) > IMAG_ATOL:
        raise ValueError("tr(rho sigma) has a non-negligible imaginary part; inputs are not hermitian")
    return _as_float(0.5 * (t1.real + t2.real))


def superinfidelity(rho, sigma):
    """``1 - G(rho, sigma)`` computed without cancellation (see module docstring)."""
    rho, sigma = _pair(rho, sigma)
    overlap(rho, sigma)  # hermiticity assertion on tr(rho sigma)
    m1, m2 = mixedness(rho), mixedness(sigma)
    diff = rho - sigma
    hs = np.sum(diff.real**2 + diff.imag**2, axis=(-2, -1))
    out = 0.5 * (np.sqrt(m1) - np.sqrt(m2)) ** 2 + 0.5 * hs
    return _as_float(out)


def superfidelity(rho, sigma, *, clamp: bool = True):
    """Superfidelity ``G = tr(rho sigma) + sqrt(1 - tr rho^2) sqrt(1 - tr sigma^2)``."""
    g = 1.0 - np.asarray(superinfidelity(rho, sigma))
    if clamp:
        g = np.clip(g, 0.0, 1.0)
    return _as_float(g)


def superfidelity_commuting(lam, mu) -> float:
    """Superfidelity of two commuting states from their joint spectra.

    ``lam . mu + sqrt((1 - |lam|^2)(1 - |mu|^2))`` for probability vectors
    ``lam`` and ``mu`` listed in a common eigenbasis.
    """
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if lam.shape != mu.shape or lam.ndim != 1:
        raise ValueError("spectra must be 1-d vectors of equal length")
    for name, p in (("lambda", lam), ("mu", mu)):
        if np.min(p) < -DENSITY_ATOL or abs(np.sum(p) - 1) > DENSITY_ATOL:
            raise ValueError(f"{name} is not a probability vector")
    rad = max(0.0, 1 - lam @ lam) * max(0.0, 1 - mu @ mu)
    return float(lam @ mu + np.sqrt(rad))


def fidelity(rho, sigma, *, clamp: bool = True):
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``.

    Eigenvalues below the rank tolerance are zeroed both in ``sqrt(rho)`` and
    in the inner product before the square roots are taken.
    """
    rho, sigma = _pair(rho, sigma)
    root = linalg.psd_sqrt(rho, atol=DENSITY_ATOL, floor=True)
    inner = root @ sigma @ root
    w = linalg.psd_spectrum(inner, atol=DENSITY_ATOL, floor=True)
    f = np.sum(np.sqrt(w), axis=-1) ** 2
    if clamp:
        f = np.clip(f, 0.0, 1.0)
    return _as_float(f)


def trace_distance(rho, sigma):
    """``tr|rho - sigma| / 2``."""
    rho, sigma = _pair(rho, sigma)
    return _as_float(0.5 * np.asarray(linalg.trace_norm(rho - sigma)))


class DerivedMetrics(NamedTuple):
    angle: float  # A_X = arccos sqrt(X)
    bures: float  # B_X = sqrt(2 - 2 sqrt(X))
    root: float  # C_X = sqrt(1 - X)


def derived_metrics(x) -> DerivedMetrics:
    """Bures-angle, Bures-distance and root-infidelity style transforms of a similarity ``x``."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    s = np.sqrt(x)
    return DerivedMetrics(
        _as_float(np.arccos(s)),
        _as_float(np.sqrt(np.clip(2 - 2 * s, 0.0, None))),
        _as_float(np.sqrt(1 - x)),
    )


def root_superinfidelity(rho, sigma):
    """Metric ``C_G = sqrt(1 - G)``."""
    return _as_float(np.sqrt(np.clip(superinfidelity(rho, sigma), 0.0, 1.0)))


def superfidelity_angle(rho, sigma):
    """Metric ``A_{G^2} = arccos G``, evaluated as ``2 arcsin(C_G / sqrt 2)``."""
    return _as_float(2.0 * np.arcsin(np.asarray(root_superinfidelity(rho, sigma)) / np.sqrt(2.0)))


@dataclass(frozen=True)
class MetricReport:
    """All pairwise measures for one pair of states (or channels).

    ``bures_BG`` is reported for completeness; it is not a metric.
    ``raw_fidelity`` and ``raw_superfidelity`` are the values before clamping.
    """

    fidelity: float
    superfidelity: float
    trace_distance: float
    bures_BF: float
    root_infidelity_CF: float
    root_superinfidelity_CG: float
    angle_AG2: float
    bures_BG: float
    raw_fidelity: float
    raw_superfidelity: float

    def as_dict(self) -> dict:
        return asdict(self)


REPORT_FIELDS = (
    "fidelity",
    "superfidelity",
    "trace_distance",
    "bures_BF",
    "root_infidelity_CF",
    "root_superinfidelity_CG",
    "angle_AG2",
    "bures_BG",
)


def metric_arrays(rho, sigma) -> dict:
    """Every report field for a pair of states or stacks of states."""
    rho, sigma = _pair(rho, sigma)
    raw_f = np.asarray(fidelity(rho, sigma, clamp=False))
    raw_sinf = np.asarray(superinfidelity(rho, sigma))
    sinf = np.clip(raw_sinf, 0.0, 1.0)
    raw_g = 1.0 - raw_sinf
    f = np.clip(raw_f, 0.0, 1.0)
    g = 1.0 - sinf
    c_g = np.sqrt(sinf)
    fields = {
        "fidelity": f,
        "superfidelity": g,
        "trace_distance": np.clip(np.asarray(trace_distance(rho, sigma)), 0.0, 1.0),
        "bures_BF": derived_metrics(f).bures,
        "root_infidelity_CF": derived_metrics(f).root,
        "root_superinfidelity_CG": c_g,
        "angle_AG2": 2.0 * np.arcsin(c_g / np.sqrt(2.0)),
        "bures_BG": derived_metrics(g).bures,
        "raw_fidelity": raw_f,
        "raw_superfidelity": raw_g,
    }
    return {k: _as_float(np.asarray(v)) for k, v in fields.items()}


def state_metrics(rho, sigma, validate: bool = True) -> MetricReport:
    if validate:
        check_density_matrix(rho)
        check_density_matrix(sigma)
    return MetricReport(**metric_arrays(rho, sigma))


def process_metrics(a: Channel, b: Channel, validate: bool = True) -> MetricReport:
    """State measures evaluated on the Jamiolkowski states of two channels."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return state_metrics(jamiolkowski(a, check=validate), jamiolkowski(b, check=validate), validate=False)


def process_superfidelity(a: Channel, b: Channel, validate: bool = True) -> float:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return superfidelity(jamiolkowski(a, check=validate), jamiolkowski(b, check=validate))
