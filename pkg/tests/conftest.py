import numpy as np
import pytest
from hypothesis import settings, strategies as st

from qchan.random import RandomSource

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)
small_dims = st.integers(min_value=2, max_value=4)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def src(seed, *idx):
    return RandomSource(seed).derive(*idx)


def ket_projector(*amplitudes):
    v = np.asarray(amplitudes, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def brute_dynamical(kraus):
    """D[(i,j),(k,l)] = <i| Phi(|j><l|) |k>, by applying the Kraus operators to matrix units."""
    n = kraus[0].shape[0]
    d = np.zeros((n * n, n * n), dtype=complex)
    for j in range(n):
        for l in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[j, l] = 1
            out = sum(e @ unit @ e.conj().T for e in kraus)
            for i in range(n):
                for k in range(n):
                    d[i * n + j, k * n + l] = out[i, k]
    return d


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
