import numpy as np
import pytest
from hypothesis import given, strategies as st

from qchan.channel import jamiolkowski, validate
from qchan.metrics import purity
from qchan.random import (
    RandomSource,
    as_generator,
    random_channel,
    random_density,
    random_dynamical,
    random_unitary,
)

from conftest import seeds, src

# upper 1% point of the chi-square distribution with 19 degrees of freedom
CHI2_19_99 = 36.191


def test_source_is_deterministic():
    a = RandomSource(42).generator.standard_normal(5)
    b = RandomSource(42).generator.standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, RandomSource(43).generator.standard_normal(5))
    assert not np.array_equal(a, RandomSource(42).derive(0).generator.standard_normal(5))
    other = RandomSource(42, algorithm="Philox").generator.standard_normal(5)
    assert not np.array_equal(a, other)
    with pytest.raises(ValueError):
        RandomSource(1, algorithm="NotAGenerator").generator


def test_derived_streams_are_reproducible_and_distinct():
    root = RandomSource(7)
    a = root.derive(3, 1).generator.random(4)
    assert np.array_equal(a, RandomSource(7).derive(3, 1).generator.random(4))
    assert not np.array_equal(a, root.derive(1, 3).generator.random(4))


def test_random_channel_fixed_seed_is_bit_identical():
    assert np.array_equal(random_channel(2, None, RandomSource(42)).dynamical, random_channel(2, None, RandomSource(42)).dynamical)


@pytest.mark.parametrize("d", range(2, 10))
def test_random_channels_validate(d):
    for k in sorted({1, d, d * d}):
        c = random_channel(d, k, RandomSource(d).derive(k))
        report = validate(c)
        assert report.ok, report.summary()
        assert report.min_eigenvalue >= -1e-8 and report.tp_defect <= 1e-8
        assert np.all(np.isfinite(c.dynamical))
        assert np.linalg.matrix_rank(c.dynamical, tol=1e-8) == k


@given(seeds, st.integers(2, 4))
def test_rank_one_channels_are_unitary(seed, d):
    c = random_channel(d, 1, src(seed))
    assert abs(purity(jamiolkowski(c)) - 1) < 1e-8
    (u,) = c.kraus
    assert np.allclose(u.conj().T @ u, np.eye(d), atol=1e-8)


def test_random_channel_rejects_bad_rank():
    with pytest.raises(ValueError):
        random_channel(2, 5)
    with pytest.raises(ValueError):
        random_channel(2, 0)
    with pytest.raises(ValueError):
        random_channel(1)


def test_random_dynamical_stack_is_trace_preserving():
    d = random_dynamical(3, None, 5, size=20)
    blocks = d.reshape(20, 3, 3, 3, 3)
    reduced = np.einsum("nijil->njl", blocks)
    assert np.max(np.abs(reduced - np.eye(3))) < 1e-12


@given(seeds, st.integers(1, 6))
def test_random_density_is_a_state(seed, d):
    rho = random_density(d, src(seed))
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.linalg.eigvalsh(rho)[0] >= -1e-12
    assert np.max(np.abs(rho - rho.conj().T)) == 0


def test_hilbert_schmidt_mean_purity():
    # E tr rho^2 = 2N / (N^2 + 1) for the Hilbert-Schmidt ensemble, 0.8 for N = 2
    rho = random_density(2, RandomSource(2024), size=100_000)
    assert np.mean(purity(rho)) == pytest.approx(0.8, abs=0.005)


def test_jamiolkowski_purity_mean_is_stable_across_seeds():
    means = []
    for seed in range(10):
        d = random_dynamical(2, 4, RandomSource(seed), size=10_000) / 2
        means.append(np.mean(purity(d)))
    assert np.std(means) / np.mean(means) < 0.01


@given(seeds, st.integers(1, 6))
def test_unitary_is_unitary(seed, d):
    u = random_unitary(d, src(seed))
    assert np.linalg.norm(u.conj().T @ u - np.eye(d)) < 1e-10
    assert abs(abs(np.linalg.det(u)) - 1) < 1e-10


def test_haar_eigenphases_are_uniform():
    u = random_unitary(2, RandomSource(99), size=10_000)
    phases = np.angle(np.linalg.eigvals(u)).ravel()
    counts, _ = np.histogram(phases, bins=20, range=(-np.pi, np.pi))
    expected = phases.size / 20
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    assert chi2 < CHI2_19_99


def test_as_generator_accepts_several_inputs():
    g = np.random.default_rng(0)
    assert as_generator(g) is g
    assert np.array_equal(as_generator(5).random(3), RandomSource(5).generator.random(3))
    assert np.array_equal(as_generator(None).random(3), RandomSource(0).generator.random(3))
