"""Network-form parameters and exact enumeration of binary ``+/-1`` models.

The joint probability of a configuration ``x`` in ``{-1, +1}^n`` is
proportional to ``exp(sum_i x_i delta_i + sum_{i<j} x_i x_j sigma_ij)``.
Only the off-diagonal couplings matter: the diagonal of ``sigma`` is carried
through untouched but never enters any probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._enum import accumulate_pmf, config_block
from .errors import DimensionMismatchError

SYMMETRY_TOL = 1e-12


def _as_float_array(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_binary_config(x, n: int) -> np.ndarray:
    """Validate a single configuration: length ``n``, entries exactly ``+1`` or ``-1``."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape != (n,):
        raise DimensionMismatchError(
            f"configuration has shape {arr.shape}, expected ({n},)"
        )
    if not np.all(np.abs(arr) == 1.0):
        raise ValueError("configuration entries must be exactly +1 or -1")
    return arr


@dataclass(frozen=True)
class ModelSpec:
    """Main effects ``delta`` and symmetric pairwise couplings ``sigma``.

    ``sigma`` must be symmetric to within 1e-12 and is stored exactly
    symmetrized.  Its diagonal is preserved as given but ignored by every
    probability computation.
    """

    delta: np.ndarray
    sigma: np.ndarray

    def __post_init__(self) -> None:
        delta = _as_float_array(self.delta, "delta")
        if delta.ndim != 1:
            raise ValueError(f"delta must be a vector, got shape {delta.shape}")
        n = delta.shape[0]
        sigma = _as_float_array(self.sigma, "sigma")
        if sigma.shape != (n, n):
            raise DimensionMismatchError(
                f"sigma has shape {sigma.shape}, expected ({n}, {n})"
            )
        gap = np.abs(sigma - sigma.T)
        if gap.size and gap.max() > SYMMETRY_TOL:
            i, j = np.unravel_index(np.argmax(gap), gap.shape)
            raise ValueError(
                f"sigma is not symmetric: sigma[{i}][{j}] and sigma[{j}][{i}] "
                f"differ by {gap[i, j]:.3g} (tolerance {SYMMETRY_TOL:g})"
            )
        sigma = (sigma + sigma.T) / 2.0
        delta.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "sigma", sigma)

    @property
    def n(self) -> int:
        return self.delta.shape[0]

    def coupling_offdiag(self) -> np.ndarray:
        """The coupling matrix with its (probability-irrelevant) diagonal zeroed."""
        out = self.sigma.copy()
        np.fill_diagonal(out, 0.0)
        return out


@dataclass(frozen=True)
class Pmf:
    """An exhaustive probability table over all ``2**n`` configurations.

    ``probs[k]`` is the probability of the configuration whose index is ``k``
    (bit ``i`` of ``k`` set means ``x_i = +1``).  ``log_z`` records the log
    normalizer of the weights the table was built from, so that
    ``probs[k] == exp(log_weight(k) - log_z)``.
    """

    n: int
    probs: np.ndarray
    log_z: float

    def __post_init__(self) -> None:
        probs = _as_float_array(self.probs, "probs")
        if probs.shape != (1 << self.n,):
            raise DimensionMismatchError(
                f"probability table has shape {probs.shape}, expected ({1 << self.n},)"
            )
        if np.any(probs < 0.0):
            raise ValueError("probabilities must be non-negative")
        total = probs.sum()
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total!r}, expected 1 within 1e-12")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)


@dataclass(frozen=True)
class PmfDistance:
    """Total-variation, maximum-absolute, and Kullback-Leibler gaps between tables."""

    tv: float
    max_abs: float
    kl: float


def ising_log_weight(spec: ModelSpec, x) -> float:
    """Unnormalized log weight ``sum_i x_i delta_i + sum_{i<j} x_i x_j sigma_ij``."""
    x = as_binary_config(x, spec.n)
    iu = np.triu_indices(spec.n, k=1)
    pair = (np.outer(x, x) * spec.sigma)[iu].sum()
    return float(x @ spec.delta + pair)


def _ising_block_weights(spec: ModelSpec):
    sigma0 = spec.coupling_offdiag()
    delta = spec.delta

    def block(configs: np.ndarray) -> np.ndarray:
        # Row-wise 0.5 * x' sigma0 x reproduces the i<j pair sum because the
        # diagonal is zero and each pair is counted twice.
        return configs @ delta + 0.5 * np.einsum(
            "bi,ij,bj->b", configs, sigma0, configs
        )

    return block


def ising_pmf(spec: ModelSpec, workers: int | None = None) -> Pmf:
    """Exact probability table of the pairwise model by full enumeration."""
    probs, log_z = accumulate_pmf(spec.n, _ising_block_weights(spec), workers)
    return Pmf(spec.n, probs, log_z)


def curie_weiss_pmf(n: int, delta, workers: int | None = None) -> Pmf:
    """Exact table of the exchangeable-coupling model ``exp(x.delta + (sum x)^2 / 2)``."""
    delta = _as_float_array(delta, "delta")
    if delta.shape != (n,):
        raise DimensionMismatchError(f"delta has shape {delta.shape}, expected ({n},)")

    def block(configs: np.ndarray) -> np.ndarray:
        return configs @ delta + 0.5 * configs.sum(axis=1) ** 2

    probs, log_z = accumulate_pmf(n, block, workers)
    return Pmf(n, probs, log_z)


def pmf_distance(a: Pmf, b: Pmf) -> PmfDistance:
    """Distance summary between two tables over the same configuration space."""
    if a.n != b.n:
        raise DimensionMismatchError(f"tables have different sizes: n = {a.n} vs {b.n}")
    diff = np.abs(a.probs - b.probs)
    tv = 0.5 * diff.sum()
    max_abs = diff.max() if diff.size else 0.0
    support = a.probs > 0.0
    if np.any(b.probs[support] == 0.0):
        kl = np.inf
    else:
        ratio = a.probs[support] / b.probs[support]
        kl = float(np.sum(a.probs[support] * np.log(ratio)))
    return PmfDistance(tv=float(tv), max_abs=float(max_abs), kl=kl)


def pmf_moments(pmf: Pmf) -> tuple[np.ndarray, np.ndarray]:
    """First moments ``E[x_i]`` and second moments ``E[x_i x_j]`` of a table."""
    n = pmf.n
    first = np.zeros(n)
    second = np.zeros((n, n))
    total = 1 << n
    step = 1 << 14
    for lo in range(0, total, step):
        hi = min(lo + step, total)
        block = config_block(n, lo, hi)
        w = pmf.probs[lo:hi]
        first += w @ block
        second += block.T @ (block * w[:, None])
    return first, second
