"""Interferometric (SWAP-test) estimation of process overlaps and superfidelity.

Each channel acts on one half of a maximally entangled pair, which prepares a
copy of its Jamiolkowski state. A Hadamard / controlled-SWAP / Hadamard
interferometer on the two copies yields ``P0 = (1 + tr(rho_a rho_b)) / 2``
for the control qubit. Running it on ``(a, b)``, ``(a, a)`` and ``(b, b)``
gives the overlap and both purities, which is all the superfidelity needs.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import linalg
from .channel import Channel, jamiolkowski
from .metrics import overlap, purity, superfidelity
from .random import RandomSource, as_generator

GATE_LEVEL_MAX_DIM = 3
PURE_ATOL = 1e-8


@dataclass
class ShotPlan:
    """Shot counts per experiment; a count of 0 means "use the exact probability"."""

    shots_overlap: int = 0
    shots_purity_a: int = 0
    shots_purity_b: int = 0
    src: RandomSource | None = None

    def __post_init__(self):
        for name in ("shots_overlap", "shots_purity_a", "shots_purity_b"):
            if int(getattr(self, name)) < 0:
                raise ValueError(f"{name} must be >= 0")

    @classmethod
    def uniform(cls, shots: int, seed: int = 0) -> "ShotPlan":
        return cls(shots, shots, shots, RandomSource(seed))


@dataclass(frozen=True)
class EstimateReport:
    overlap_estimate: float
    purity_a: float
    purity_b: float
    superfidelity_estimate: float
    raw_superfidelity_estimate: float
    exact_overlap: float
    exact_purity_a: float
    exact_purity_b: float
    exact_superfidelity: float
    se_overlap: float
    se_purity_a: float
    se_purity_b: float
    shots_overlap: int
    shots_purity_a: int
    shots_purity_b: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RegisterFootprint:
    """Resources of the interferometer for channels on ``subsystem_dim``-level systems.

    ``hilbert_dim`` is the full register dimension ``2 * d^4``; ``qubits`` is only
    defined when ``d`` is a power of two. ``additive_count`` is the ``2 + 4 d``
    tally, which adds subsystem dimensions instead of multiplying them and is
    kept for comparison only.
    """

    control_qubits: int
    subsystems: int
    subsystem_dim: int
    hilbert_dim: int
    qubits: int | None
    additive_count: int


def required_register(dim: int) -> RegisterFootprint:
    if dim < 2:
        raise ValueError("dim must be >= 2")
    log2 = int(round(np.log2(dim)))
    qubits = 1 + 4 * log2 if 2**log2 == dim else None
    return RegisterFootprint(1, 4, dim, 2 * dim**4, qubits, 2 + 4 * dim)


def _states(a: Channel, b: Channel, validate: bool):
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return jamiolkowski(a, check=validate), jamiolkowski(b, check=validate)


def swap_operator(n: int) -> np.ndarray:
    """SWAP on ``C^n (x) C^n``."""
    return linalg.permutation_matrix(linalg.subsystem_permutation((n, n), (1, 0)))


def _p0_trace(ra, rb):
    return 0.5 * (1.0 + overlap(ra, rb))


def _p0_swap(ra, rb):
    n = ra.shape[0]
    joint = linalg.kron(ra, rb)
    val = np.einsum("ij,ji->", swap_operator(n), joint)
    return 0.5 * (1.0 + float(val.real))


def entangled_branch_state(c: Channel) -> np.ndarray:
    """``(I (x) c)(|psi+><psi+|)``: the channel acts on the second half of the pair."""
    d = c.dim
    psi = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    proj = np.outer(psi, psi.conj())
    out = np.zeros_like(proj)
    for e in c.kraus:
        k = linalg.kron(np.eye(d), e)
        out += k @ proj @ k.conj().T
    return out


def gate_level_p0(a: Channel, b: Channel) -> float:
    """Density-matrix simulation of H, two controlled-SWAPs and H on ``2 d^4`` levels.

    Register order: control, A1, A2, B1, B2 with ``a`` applied to A2 and ``b``
    to B2. The first controlled-SWAP exchanges A1 and B1, the second A2 and B2.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    d = a.dim
    if d > GATE_LEVEL_MAX_DIM:
        raise ValueError(f"gate-level simulation is limited to d <= {GATE_LEVEL_MAX_DIM}")
    n = d**4
    rho = linalg.kron(np.diag([1.0, 0.0]), linalg.kron(entangled_branch_state(a), entangled_branch_state(b)))

    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    hadamard = linalg.kron(h, np.eye(n))
    dims = (d, d, d, d)
    swap_1 = linalg.permutation_matrix(linalg.subsystem_permutation(dims, (2, 1, 0, 3)))
    swap_2 = linalg.permutation_matrix(linalg.subsystem_permutation(dims, (0, 3, 2, 1)))
    p0_proj = np.diag([1.0, 0.0])
    p1_proj = np.diag([0.0, 1.0])

    def controlled(u):
        return linalg.kron(p0_proj, np.eye(n)) + linalg.kron(p1_proj, u)

    for gate in (hadamard, controlled(swap_1), controlled(swap_2), hadamard):
        rho = gate @ rho @ gate.conj().T
    return float(np.trace(rho[:n, :n]).real)


def exact_p0(a: Channel, b: Channel, method: str = "trace", validate: bool = True) -> float:
    """Probability of reading 0 on the control qubit.

    ``method`` selects the route: ``"trace"`` uses ``tr(rho_a rho_b)``,
    ``"swap"`` evaluates ``tr(SWAP (rho_a (x) rho_b))`` on the doubled register,
    and ``"gates"`` runs :func:`gate_level_p0`.
    """
    if method == "gates":
        if validate:
            _states(a, b, True)
        return gate_level_p0(a, b)
    ra, rb = _states(a, b, validate)
    if method == "trace":
        return _p0_trace(ra, rb)
    if method == "swap":
        return _p0_swap(ra, rb)
    raise ValueError(f"unknown method {method!r}")


def _binomial_estimate(exact: float, shots: int, rng):
    """Estimate ``exact = 2 P0 - 1`` from ``shots`` runs; returns ``(estimate, standard error)``."""
    if shots == 0:
        return exact, 0.0
    p0 = min(max(0.5 * (1.0 + exact), 0.0), 1.0)
    count = rng.binomial(shots, p0)
    p_hat = count / shots
    return 2.0 * p_hat - 1.0, 2.0 * np.sqrt(p_hat * (1.0 - p_hat) / shots)


def _assemble(ov, pa, pb):
    pa = min(max(pa, 0.0), 1.0)
    pb = min(max(pb, 0.0), 1.0)
    return ov + np.sqrt(1.0 - pa) * np.sqrt(1.0 - pb)


def estimate_superfidelity(a: Channel, b: Channel, plan: ShotPlan | None = None, validate: bool = True) -> EstimateReport:
    """Estimate ``G(rho_a, rho_b)`` from three binomial interferometer experiments.

    Purity estimates are clamped to [0, 1] before the square roots are formed
    and the assembled estimate is clamped to [0, 1]; the unclamped value is in
    ``raw_superfidelity_estimate``.
    """
    plan = plan or ShotPlan()
    ra, rb = _states(a, b, validate)
    exact_ov = overlap(ra, rb)
    exact_pa, exact_pb = purity(ra), purity(rb)
    exact_g = superfidelity(ra, rb)
    rng = as_generator(plan.src if plan.src is not None else RandomSource(0))

    ov, se_ov = _binomial_estimate(exact_ov, int(plan.shots_overlap), rng)
    pa, se_pa = _binomial_estimate(exact_pa, int(plan.shots_purity_a), rng)
    pb, se_pb = _binomial_estimate(exact_pb, int(plan.shots_purity_b), rng)

    shots = (int(plan.shots_overlap), int(plan.shots_purity_a), int(plan.shots_purity_b))
    if shots == (0, 0, 0):
        raw = exact_g
    else:
        raw = float(_assemble(ov, pa, pb))
    return EstimateReport(
        overlap_estimate=float(ov),
        purity_a=float(pa),
        purity_b=float(pb),
        superfidelity_estimate=float(min(max(raw, 0.0), 1.0)),
        raw_superfidelity_estimate=float(raw),
        exact_overlap=float(exact_ov),
        exact_purity_a=float(exact_pa),
        exact_purity_b=float(exact_pb),
        exact_superfidelity=float(exact_g),
        se_overlap=float(se_ov),
        se_purity_a=float(se_pa),
        se_purity_b=float(se_pb),
        shots_overlap=shots[0],
        shots_purity_a=shots[1],
        shots_purity_b=shots[2],
    )


def estimate_unitary_fidelity(ideal: Channel, actual: Channel, shots: int = 0, src=None) -> tuple[float, float]:
    """Fidelity between a unitary channel and an arbitrary one from the overlap run alone.

    The Jamiolkowski state of ``ideal`` must be pure, in which case fidelity and
    superfidelity coincide with ``tr(rho_ideal rho_actual)``. Returns
    ``(estimate, standard error)``.
    """
    ra, rb = _states(ideal, actual, True)
    if abs(purity(ra) - 1.0) > PURE_ATOL:
        raise ValueError("the reference channel is not unitary (its Jamiolkowski state is not pure)")
    rng = as_generator(src if src is not None else RandomSource(0))
    est, se = _binomial_estimate(overlap(ra, rb), int(shots), rng)
    return float(est), float(se)
