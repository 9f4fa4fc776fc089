"""Seedable samplers for random states, unitaries and channels.

A :class:`RandomSource` wraps one numpy ``Generator``. It is not meant to be
shared between threads; use :meth:`RandomSource.derive` to give every worker
its own reproducible stream.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import Channel
from .linalg import dagger

Y_FLOOR = 1e-12
MAX_RESAMPLES = 10


@dataclass
class RandomSource:
    """Deterministic random stream identified by ``(seed, algorithm, spawn_key)``."""

    seed: int = 0
    algorithm: str = "PCG64"
    spawn_key: tuple = ()
    _generator: np.random.Generator | None = field(default=None, init=False, repr=False, compare=False)

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            bitgen = getattr(np.random, self.algorithm, None)
            if bitgen is None or not isinstance(bitgen, type) or not issubclass(bitgen, np.random.BitGenerator):
                raise ValueError(f"unknown bit generator {self.algorithm!r}")
            ss = np.random.SeedSequence(int(self.seed) & (2**64 - 1), spawn_key=self.spawn_key)
            self._generator = np.random.Generator(bitgen(ss))
        return self._generator

    def derive(self, *index: int) -> "RandomSource":
        """Independent child stream for worker/chunk ``index``."""
        return RandomSource(self.seed, self.algorithm, self.spawn_key + tuple(int(i) for i in index))


def as_generator(src) -> np.random.Generator:
    if isinstance(src, RandomSource):
        return src.generator
    if isinstance(src, np.random.Generator):
        return src
    return RandomSource(0 if src is None else int(src)).generator


def ginibre(shape, src) -> np.ndarray:
    """Matrix of i.i.d. standard complex Gaussians (``E|z|^2 = 1``)."""
    rng = as_generator(src)
    shape = tuple(shape)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_density(d: int, src=None, size: int | None = None) -> np.ndarray:
    """Hilbert-Schmidt distributed density matrix ``G G^dagger / tr(G G^dagger)``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    lead = () if size is None else (size,)
    g = ginibre(lead + (d, d), src)
    w = g @ dagger(g)
    w = 0.5 * (w + dagger(w))
    tr = np.trace(w, axis1=-2, axis2=-1).real
    return w / tr[..., None, None]


def random_pure_state(d: int, src=None) -> np.ndarray:
    psi = ginibre((d,), src)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_unitary(d: int, src=None, size: int | None = None) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    if d < 1:
        raise ValueError("d must be >= 1")
    lead = () if size is None else (size,)
    q, r = np.linalg.qr(ginibre(lead + (d, d), src))
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[..., None, :]


def random_dynamical(d: int, k: int | None = None, src=None, size: int | None = None) -> np.ndarray:
    """Dynamical matrices of random CP-TP maps (Ginibre construction).

    With ``X`` a ``d^2 x k`` Ginibre matrix, ``Y = tr_out(X X^dagger)`` and
    ``Z = (I (x) Y^{-1/2}) X`` the result is ``D = Z Z^dagger``, which equals
    ``(I (x) Y^{-1/2}) X X^dagger (I (x) Y^{-1/2})`` but is PSD with exact rank
    ``k`` by construction.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    k = d * d if k is None else int(k)
    if not 1 <= k <= d * d:
        raise ValueError(f"Kraus rank k must lie in [1, {d * d}], got {k}")
    rng = as_generator(src)
    lead = () if size is None else (size,)
    for _ in range(MAX_RESAMPLES):
        x = ginibre(lead + (d * d, k), rng)
        blocks = x.reshape(lead + (d, d, k))  # (out, in, k)
        y = np.einsum("...ijk,...ilk->...jl", blocks, blocks.conj())
        w, v = np.linalg.eigh(0.5 * (y + dagger(y)))
        if np.min(w) > Y_FLOOR:
            break
    else:
        raise ArithmeticError("partial trace of the Ginibre sample stayed singular; giving up")
    y_isqrt = (v / np.sqrt(w)[..., None, :]) @ dagger(v)
    # (I (x) Y^{-1/2}) acts on the input index of each block
    z = np.einsum("...jl,...ilk->...ijk", y_isqrt, blocks).reshape(lead + (d * d, k))
    return z @ dagger(z)


def random_channel(d: int, k: int | None = None, src=None) -> Channel:
    """Random CP-TP channel with Kraus rank ``k`` (default ``d^2``)."""
    return Channel.from_dynamical(random_dynamical(d, k, src))


def random_unitary_channel(d: int, src=None) -> Channel:
    return Channel.from_unitary(random_unitary(d, src))


def random_jamiolkowski(d: int, k: int | None = None, src=None, size: int | None = None) -> np.ndarray:
    return random_dynamical(d, k, src, size) / d


__all__ = [
    "RandomSource",
    "as_generator",
    "ginibre",
    "random_density",
    "random_pure_state",
    "random_unitary",
    "random_dynamical",
    "random_channel",
    "random_unitary_channel",
    "random_jamiolkowski",
]
