"""Eigenvalue form of the coupling matrix and the PMF computed through it.

Shifting the zero-diagonal coupling matrix by ``c`` times the identity changes
every configuration's log weight by the constant ``c * n / 2`` and therefore
leaves the PMF untouched.  The canonical shift is the smallest ``c >= 0``
making the shifted matrix positive semidefinite, so all eigenvalues used
downstream are non-negative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._enum import accumulate_pmf
from .core import ModelSpec, Pmf, as_binary_config
from .errors import DimensionMismatchError, EigendecompositionError

# Eigenvalues within this tolerance of zero are treated as exactly zero.
RANK_TOL = 1e-10


@dataclass(frozen=True)
class SpectralForm:
    """Shift ``c``, eigenvalues (descending), orthonormal eigenvectors, and loadings.

    ``loadings`` scales each eigenvector column by the square root of its
    eigenvalue, so the shifted coupling matrix equals ``loadings @ loadings.T``
    when no eigenvalue has been zeroed.  Zeroing trailing eigenvalues yields a
    lower-rank form that defines a model in its own right rather than
    reproducing the original couplings.
    """

    c: float
    lambdas: np.ndarray
    q: np.ndarray
    loadings: np.ndarray

    def __post_init__(self) -> None:
        lambdas = np.asarray(self.lambdas, dtype=np.float64)
        q = np.asarray(self.q, dtype=np.float64)
        loadings = np.asarray(self.loadings, dtype=np.float64)
        n = lambdas.shape[0]
        if q.shape != (n, n) or loadings.shape != (n, n):
            raise DimensionMismatchError(
                f"eigenvector/loading shapes {q.shape}/{loadings.shape} "
                f"do not match {n} eigenvalues"
            )
        if np.any(lambdas < 0.0):
            raise ValueError("eigenvalues must be non-negative after the shift")
        if np.any(np.diff(lambdas) > 0.0):
            raise ValueError("eigenvalues must be sorted in descending order")
        for arr in (lambdas, q, loadings):
            arr.setflags(write=False)
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "loadings", loadings)

    @property
    def n(self) -> int:
        return self.lambdas.shape[0]

    @property
    def rank(self) -> int:
        """Number of strictly positive eigenvalues."""
        return int(np.sum(self.lambdas > RANK_TOL))


def to_spectral(spec: ModelSpec, extra_shift: float = 0.0) -> SpectralForm:
    """Eigendecompose the zero-diagonal couplings after the canonical PSD shift.

    ``extra_shift`` adds on top of the minimal shift; it changes ``c``, the
    eigenvalues, and the loadings but never the PMF.  Eigenvector columns get a
    deterministic sign: the entry of largest magnitude (first such on ties) is
    made positive.
    """
    if extra_shift < 0.0:
        raise ValueError(f"extra_shift must be non-negative, got {extra_shift}")
    sigma0 = spec.coupling_offdiag()
    try:
        evals, vecs = np.linalg.eigh(sigma0)
    except np.linalg.LinAlgError as exc:
        raise EigendecompositionError(
            f"eigendecomposition of the coupling matrix failed: {exc}"
        ) from exc
    c = max(0.0, -float(evals.min())) + float(extra_shift)
    lambdas = evals + c
    lambdas[np.abs(lambdas) < RANK_TOL] = 0.0
    order = np.argsort(-lambdas, kind="stable")
    lambdas = lambdas[order]
    vecs = vecs[:, order].copy()
    for col in range(vecs.shape[1]):
        lead = np.argmax(np.abs(vecs[:, col]))
        if vecs[lead, col] < 0.0:
            vecs[:, col] = -vecs[:, col]
    loadings = vecs * np.sqrt(lambdas)
    return SpectralForm(c=c, lambdas=lambdas, q=vecs, loadings=loadings)


def truncate_spectral(form: SpectralForm, max_rank: int) -> SpectralForm:
    """Zero all but the ``max_rank`` largest eigenvalues.

    The result is a standalone low-rank model; it does not reproduce the
    couplings the original form came from.
    """
    if max_rank < 0:
        raise ValueError(f"max_rank must be non-negative, got {max_rank}")
    lambdas = form.lambdas.copy()
    lambdas[max_rank:] = 0.0
    return SpectralForm(
        c=form.c, lambdas=lambdas, q=form.q, loadings=form.q * np.sqrt(lambdas)
    )


def spectral_log_weight(form: SpectralForm, delta, x) -> float:
    """Log weight ``x.delta + sum_r lambda_r (q_r . x)^2 / 2``.

    Exceeds the network-form log weight of the same model by exactly
    ``c * n / 2``, uniformly over configurations.
    """
    delta = np.asarray(delta, dtype=np.float64)
    if delta.shape != (form.n,):
        raise DimensionMismatchError(
            f"delta has shape {delta.shape}, expected ({form.n},)"
        )
    x = as_binary_config(x, form.n)
    scores = form.q.T @ x
    return float(x @ delta + 0.5 * np.sum(form.lambdas * scores**2))


def spectral_pmf(form: SpectralForm, delta, workers: int | None = None) -> Pmf:
    """Exact probability table computed through the eigenvalue representation."""
    delta = np.asarray(delta, dtype=np.float64)
    if delta.shape != (form.n,):
        raise DimensionMismatchError(
            f"delta has shape {delta.shape}, expected ({form.n},)"
        )
    q = form.q
    lambdas = form.lambdas

    def block(configs: np.ndarray) -> np.ndarray:
        scores = configs @ q
        return configs @ delta + 0.5 * (scores**2 * lambdas).sum(axis=1)

    probs, log_z = accumulate_pmf(form.n, block, workers)
    return Pmf(form.n, probs, log_z)
