"""Self-checking suites over the library's numerical claims.

Each suite returns a list of :class:`CheckResult`. ``slack`` is the margin by
which a check passed (negative when it failed), so a report shows how close
every assertion came to its tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import families, io
from .channel import Channel, compose, jamiolkowski, tensor
from .metrics import fidelity, metric_arrays, superfidelity, superinfidelity, trace_distance
from .random import (
    RandomSource,
    as_generator,
    random_channel,
    random_density,
    random_jamiolkowski,
    random_unitary_channel,
)

EXACT_ATOL = 1e-12
BOUND_ATOL = 1e-8
STABILITY_ATOL = 1e-9
ANALYTIC_ATOL = 1e-10
METRIC_ATOL = 1e-9
PROPERTY_ATOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    slack: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.detail} (slack {self.slack:+.3e})"

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "slack": self.slack, "detail": self.detail}


def _equal(name: str, value: float, target: float, atol: float = EXACT_ATOL) -> CheckResult:
    err = abs(value - target)
    return CheckResult(name, err <= atol, atol - err, f"{value!r} vs {target!r}, |diff| = {err:.3e} <= {atol:g}")


def _greater(name: str, lhs: float, rhs: float) -> CheckResult:
    margin = lhs - rhs
    return CheckResult(name, margin > 0, margin, f"{lhs:.15g} > {rhs:.15g}")


def _worst(name: str, errors, atol: float, what: str) -> CheckResult:
    """Pass when every entry of ``errors`` is at most ``atol``."""
    errors = np.asarray(errors, dtype=float).ravel()
    worst = float(np.max(errors))
    ok = bool(np.all(errors <= atol))
    return CheckResult(name, ok, atol - worst, f"max {what} = {worst:.3e} over {errors.size} cases, tolerance {atol:g}")


# ----------------------------------------------------------------------------
# chaining counterexample
# ----------------------------------------------------------------------------


def counterexample_channels() -> dict[str, Channel]:
    return {name: io.load_fixture(name) for name in ("phi1", "phi2", "psi1", "psi2")}


def chaining_counterexample(n: int | None = None, seed: int = 0) -> list[CheckResult]:
    """Superfidelity metrics violate the chaining rule on the shipped fixtures."""
    ch = counterexample_channels()
    rho = {k: jamiolkowski(c) for k, c in ch.items()}
    # psi acts after phi
    first = jamiolkowski(compose(ch["psi1"], ch["phi1"]))
    second = jamiolkowski(compose(ch["psi2"], ch["phi2"]))

    g_phi = superfidelity(rho["phi1"], rho["phi2"])
    g_psi = superfidelity(rho["psi1"], rho["psi2"])
    g_comp = superfidelity(first, second)
    cg_comp = math.sqrt(superinfidelity(first, second))
    cg_sum = math.sqrt(superinfidelity(rho["phi1"], rho["phi2"])) + math.sqrt(superinfidelity(rho["psi1"], rho["psi2"]))
    ang_comp = math.acos(g_comp)
    ang_sum = math.acos(g_phi) + math.acos(g_psi)

    return [
        _equal("composed state 1", float(np.max(np.abs(first - np.diag([0.5, 0.5, 0, 0])))), 0.0),
        _equal("composed state 2", float(np.max(np.abs(second - np.diag([0, 0, 0.5, 0.5])))), 0.0),
        _equal("G(phi1, phi2)", g_phi, 1.0),
        _equal("G(psi1, psi2)", g_psi, 0.75),
        _equal("G(composed pair)", g_comp, 0.5),
        _equal("C_G composed", cg_comp, 1 / math.sqrt(2)),
        _equal("C_G sum", cg_sum, 0.5),
        _equal("arccos G composed", ang_comp, math.pi / 3),
        _equal("arccos G sum", ang_sum, math.acos(0.75)),
        _greater("C_G chaining violated", cg_comp, cg_sum),
        _greater("arccos G chaining violated", ang_comp, ang_sum),
    ]


# ----------------------------------------------------------------------------
# random-channel suites
# ----------------------------------------------------------------------------


def _pairs_of_channels(d: int, n: int, src: RandomSource):
    return random_jamiolkowski(d, None, src, size=n), random_jamiolkowski(d, None, src, size=n)


def bounds(n: int | None = None, seed: int = 0, dims=(2, 3, 4)) -> list[CheckResult]:
    """``F <= G`` and ``1 - D_tr <= G`` on random channel pairs."""
    n = 10_000 if n is None else n
    out = []
    root = RandomSource(seed)
    for d in dims:
        rho, sigma = _pairs_of_channels(d, n, root.derive(d))
        m = metric_arrays(rho, sigma)
        g, f, dtr = m["raw_superfidelity"], m["raw_fidelity"], m["trace_distance"]
        out.append(_worst(f"F <= G + tol at d={d}", f - g, BOUND_ATOL, "F - G"))
        out.append(_worst(f"1 - D_tr <= G + tol at d={d}", 1 - dtr - g, BOUND_ATOL, "1 - D_tr - G"))
    return out


def pure_equality(n: int | None = None, seed: int = 0) -> list[CheckResult]:
    """``F = G`` for qubit states and when one Jamiolkowski state is pure."""
    n = 1000 if n is None else n
    root = RandomSource(seed)
    src = root.derive(0)
    rho, sigma = random_density(2, src, n), random_density(2, src, n)
    diff = np.abs(np.asarray(fidelity(rho, sigma)) - np.asarray(superfidelity(rho, sigma)))
    out = [_worst("F = G for qubit states", diff, BOUND_ATOL, "|F - G|")]
    for d in (2, 3):
        src = root.derive(d)
        errs = []
        for _ in range(n):
            u = jamiolkowski(random_unitary_channel(d, src))
            c = jamiolkowski(random_channel(d, None, src))
            errs.append(abs(fidelity(u, c) - superfidelity(u, c)))
        out.append(_worst(f"F = G for unitary vs channel at d={d}", errs, BOUND_ATOL, "|F - G|"))
    return out


def stability(n: int | None = None, seed: int = 0, d: int = 2) -> list[CheckResult]:
    """Tensoring both channels with the same unitary channel leaves G unchanged."""
    n = 100 if n is None else n
    src = RandomSource(seed).derive(d)
    errs = []
    for _ in range(n):
        tau = random_unitary_channel(d, src)
        psi, phi = random_channel(d, None, src), random_channel(d, None, src)
        lhs = superfidelity(jamiolkowski(tensor(tau, psi)), jamiolkowski(tensor(tau, phi)))
        rhs = superfidelity(jamiolkowski(psi), jamiolkowski(phi))
        errs.append(abs(lhs - rhs))
    return [_worst(f"G(tau x psi, tau x phi) = G(psi, phi) at d={d}", errs, STABILITY_ATOL, "|difference|")]


# ----------------------------------------------------------------------------
# metric axioms
# ----------------------------------------------------------------------------


def _root_sinf(a, b):
    return np.sqrt(np.clip(np.asarray(superinfidelity(a, b)), 0.0, 1.0))


def _angle(a, b):
    return 2.0 * np.arcsin(_root_sinf(a, b) / math.sqrt(2.0))


def metric_axioms(n: int | None = None, seed: int = 0, dims=(2, 4)) -> list[CheckResult]:
    """Triangle inequality, symmetry and identity for ``C_G`` and ``arccos G``."""
    n = 10_000 if n is None else n
    out = []
    root = RandomSource(seed)
    for d in dims:
        src = root.derive(d)
        a, b, c = (random_density(d, src, n) for _ in range(3))
        for label, dist in (("C_G", _root_sinf), ("arccos G", _angle)):
            ab, bc, ac = dist(a, b), dist(b, c), dist(a, c)
            out.append(_worst(f"{label} triangle inequality at d={d}", ac - ab - bc, METRIC_ATOL, "d(a,c) - d(a,b) - d(b,c)"))
            asym = np.abs(ab - dist(b, a))
            out.append(_worst(f"{label} symmetry at d={d}", asym, 0.0, "|d(a,b) - d(b,a)|"))
            out.append(_worst(f"{label} d(a,a) = 0 at d={d}", dist(a, a), EXACT_ATOL, "d(a,a)"))
            out.append(CheckResult(
                f"{label} positive on distinct states at d={d}",
                bool(np.all(ab > 0)),
                float(np.min(ab)),
                f"min d(a,b) = {float(np.min(ab)):.3e}",
            ))
    return out


def bg_not_metric_search(n: int | None = None, seed: int = 0) -> list[CheckResult]:
    """Look for a triangle violation of ``B_G``; reports, never fails."""
    n = 20_000 if n is None else n
    rng = as_generator(RandomSource(seed).derive(3))
    d = 3
    probs = rng.dirichlet(np.full(d, 0.3), size=(n, 3))
    states = np.zeros((n, 3, d, d))
    idx = np.arange(d)
    states[:, :, idx, idx] = probs

    def bures_g(x, y):
        g = np.asarray(superfidelity(x, y))
        return np.sqrt(np.clip(2 - 2 * np.sqrt(g), 0.0, None))

    a, b, c = states[:, 0], states[:, 1], states[:, 2]
    excess = bures_g(a, c) - bures_g(a, b) - bures_g(b, c)
    i = int(np.argmax(excess))
    if excess[i] > METRIC_ATOL:
        detail = (
            f"violation found: B_G(a,c) - B_G(a,b) - B_G(b,c) = {excess[i]:.6f} for diagonal states "
            f"a={np.round(probs[i, 0], 6).tolist()}, b={np.round(probs[i, 1], 6).tolist()}, "
            f"c={np.round(probs[i, 2], 6).tolist()}"
        )
    else:
        detail = f"none found in {n} trials"
    return [CheckResult("B_G triangle search", True, float(excess[i]), detail)]


# ----------------------------------------------------------------------------
# closed forms against the generic pipeline
# ----------------------------------------------------------------------------


def _random_unital(rng) -> families.AffineQubit:
    while True:
        eta = rng.uniform(-1, 1, 3)
        x, y, z = eta
        if abs(x + y) <= 1 + z and abs(x - y) <= 1 - z:
            return families.AffineQubit((0, 0, 0), eta)


def _random_affine(rng) -> families.AffineQubit:
    while True:
        a = families.AffineQubit(rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3))
        if np.linalg.eigvalsh(a.dynamical())[0] >= 0:
            return a


def _random_pauli(rng, d):
    p = rng.dirichlet(np.full(d * d, 0.5)).reshape(d, d)
    if rng.random() < 0.2:
        p = np.zeros((d, d))
        p[rng.integers(d), rng.integers(d)] = 1.0
    return p


def _random_dephasing_matrix(rng, d):
    r = int(rng.integers(1, d + 1))
    v = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    F = v @ v.conj().T
    np.fill_diagonal(F, 1.0)
    return 0.5 * (F + F.conj().T)


def _random_disc(rng):
    return math.sqrt(rng.random()) * np.exp(2j * math.pi * rng.random())


def _g(a: Channel, b: Channel) -> float:
    return superfidelity(jamiolkowski(a), jamiolkowski(b))


def analytic_cases(rng) -> dict[str, Callable[[], float]]:
    """One callable per closed form; each returns ``|formula - generic|`` for a fresh draw."""

    def affine():
        a, b = _random_affine(rng), _random_affine(rng)
        ca, cb = families.affine_qubit_channel(a), families.affine_qubit_channel(b)
        return abs(families.affine_superfidelity(a, b) - _g(ca, cb))

    def unital_f():
        a, b = _random_unital(rng), _random_unital(rng)
        ra = jamiolkowski(families.affine_qubit_channel(a))
        rb = jamiolkowski(families.affine_qubit_channel(b))
        return abs(families.unital_qubit_fidelity(a, b) - fidelity(ra, rb))

    def unital_d():
        a, b = _random_unital(rng), _random_unital(rng)
        ra = jamiolkowski(families.affine_qubit_channel(a))
        rb = jamiolkowski(families.affine_qubit_channel(b))
        return abs(families.unital_qubit_trace_distance(a, b) - trace_distance(ra, rb))

    def depolarizing():
        d = int(rng.integers(2, 5))
        p, q = rng.random(2)
        return abs(families.depolarizing_superfidelity(d, p, q) - _g(families.depolarizing(d, p), families.depolarizing(d, q)))

    def werner_holevo():
        d = int(rng.integers(2, 5))
        p, q = rng.uniform(*families.werner_holevo_range(d), 2)
        return abs(families.werner_holevo_superfidelity(d, p, q) - _g(families.werner_holevo(d, p), families.werner_holevo(d, q)))

    def cross():
        d = int(rng.integers(2, 5))
        p = rng.random()
        q = rng.uniform(*families.werner_holevo_range(d))
        return abs(families.cross_superfidelity_dep_wh(d, p, q) - _g(families.depolarizing(d, p), families.werner_holevo(d, q)))

    def pauli():
        d = int(rng.integers(2, 5))
        p, q = _random_pauli(rng, d), _random_pauli(rng, d)
        return abs(families.pauli_superfidelity(p, q) - _g(families.generalized_pauli(d, p), families.generalized_pauli(d, q)))

    def dephasing():
        f, g = _random_disc(rng), _random_disc(rng)
        err = abs(families.dephasing_superfidelity(f, g) - _g(families.dephasing_qubit(f), families.dephasing_qubit(g)))
        conj = abs(
            families.dephasing_conjugate_superfidelity(f)
            - _g(families.dephasing_qubit(f), families.dephasing_qubit(np.conj(f)))
        )
        return max(err, conj)

    def dephasing_qudit():
        d = int(rng.integers(2, 5))
        F, G = _random_dephasing_matrix(rng, d), _random_dephasing_matrix(rng, d)
        err = abs(families.dephasing_qudit_superfidelity(F, G) - _g(families.dephasing_qudit(F), families.dephasing_qudit(G)))
        conj = abs(
            families.dephasing_qudit_conjugate_superfidelity(F)
            - _g(families.dephasing_qudit(F), families.dephasing_qudit(F.conj()))
        )
        return max(err, conj)

    return {
        "affine G": affine,
        "unital F": unital_f,
        "unital D_tr": unital_d,
        "depolarizing G": depolarizing,
        "Werner-Holevo G": werner_holevo,
        "depolarizing vs Werner-Holevo G": cross,
        "generalized Pauli G": pauli,
        "qubit dephasing G": dephasing,
        "qudit dephasing G": dephasing_qudit,
    }


def analytic_vs_generic(n: int | None = None, seed: int = 0) -> list[CheckResult]:
    n = 1000 if n is None else n
    rng = as_generator(RandomSource(seed).derive(5))
    return [
        _worst(f"{name} formula vs generic", [case() for _ in range(n)], ANALYTIC_ATOL, "|formula - generic|")
        for name, case in analytic_cases(rng).items()
    ]


# ----------------------------------------------------------------------------
# concavity and supermultiplicativity
# ----------------------------------------------------------------------------


def _mix(lam, a, b):
    lam = lam[:, None, None]
    return lam * a + (1 - lam) * b


def concavity(n: int | None = None, seed: int = 0, d: int = 3) -> list[CheckResult]:
    """Concavity, joint concavity and supermultiplicativity of G on random states."""
    n = 10_000 if n is None else n
    src = RandomSource(seed).derive(9)
    rng = as_generator(src)
    r1, r2, s1, s2 = (random_density(d, src, n) for _ in range(4))
    lam = rng.random(n)

    mixed = np.asarray(superfidelity(r1, _mix(lam, s1, s2)))
    split = lam * superfidelity(r1, s1) + (1 - lam) * superfidelity(r1, s2)
    joint = np.asarray(superfidelity(_mix(lam, r1, r2), _mix(lam, s1, s2)))
    joint_split = lam * superfidelity(r1, s1) + (1 - lam) * superfidelity(r2, s2)

    q = 2
    a, b = random_density(q, src, n), random_density(q, src, n)
    prod_l = np.einsum("nij,nkl->nikjl", r1, a).reshape(n, d * q, d * q)
    prod_r = np.einsum("nij,nkl->nikjl", s1, b).reshape(n, d * q, d * q)
    tensor_g = np.asarray(superfidelity(prod_l, prod_r))
    product_g = np.asarray(superfidelity(r1, s1)) * np.asarray(superfidelity(a, b))

    return [
        _worst("concavity in the second argument", split - mixed, PROPERTY_ATOL, "shortfall"),
        _worst("joint concavity", joint_split - joint, PROPERTY_ATOL, "shortfall"),
        _worst("supermultiplicativity", product_g - tensor_g, PROPERTY_ATOL, "shortfall"),
    ]


SUITES: dict[str, Callable[..., list[CheckResult]]] = {
    "stability": stability,
    "chaining-counterexample": chaining_counterexample,
    "bounds": bounds,
    "metric-axioms": metric_axioms,
    "analytic-vs-generic": analytic_vs_generic,
    "bg-not-metric-search": bg_not_metric_search,
    "pure-equality": pure_equality,
    "concavity": concavity,
}


def run_suite(name: str, n: int | None = None, seed: int = 0) -> list[CheckResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name](n=n, seed=seed)
