"""Pseudo-likelihood estimation of the network form from ``+/-1`` data.

The pseudo-log-likelihood of a weighted configuration table is

    sum_m w_m sum_i log logistic(2 x_mi (delta_i + sum_{j != i} sigma_ij x_mj))

with weights summing to one (equal weights for raw samples, probabilities for
a population table).  The objective is concave in ``(delta, sigma)``, so
gradient ascent with a backtracking line search converges to the maximizer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._enum import accumulate_pmf, config_matrix
from .core import ModelSpec, Pmf
from .errors import DimensionMismatchError, EnumerationLimitError, LineSearchError
from .sampling import SampleSet

FULL_LOGLIK_LIMIT = 12


@dataclass(frozen=True)
class FitResult:
    """Estimate plus the ascent trajectory that produced it."""

    spec_hat: ModelSpec
    objective_trace: np.ndarray
    grad_norm_final: float
    iterations: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "n": self.spec_hat.n,
            "delta": self.spec_hat.delta.tolist(),
            "sigma": self.spec_hat.sigma.tolist(),
            "converged": self.converged,
            "iterations": self.iterations,
            "grad_norm_final": self.grad_norm_final,
            "objective_trace": self.objective_trace.tolist(),
        }


def weighted_configs(data) -> tuple[np.ndarray, np.ndarray]:
    """Normalize any accepted data form to ``(configs, weights summing to 1)``.

    Accepts a `SampleSet`, an enumerated table (`Pmf`), a raw ``(m, n)``
    matrix of ``+/-1`` rows, or an explicit ``(configs, weights)`` pair.
    """
    weights = None
    if isinstance(data, SampleSet):
        configs = data.draws.astype(np.float64)
    elif isinstance(data, Pmf):
        configs = config_matrix(data.n)
        weights = data.probs.astype(np.float64)
    elif isinstance(data, tuple) and len(data) == 2:
        configs = np.asarray(data[0], dtype=np.float64)
        weights = np.asarray(data[1], dtype=np.float64)
    else:
        configs = np.asarray(data, dtype=np.float64)

    if configs.ndim != 2 or configs.shape[0] == 0 or configs.shape[1] == 0:
        raise ValueError(f"data must be a non-empty matrix, got shape {configs.shape}")
    if not np.all(np.abs(configs) == 1.0):
        raise ValueError("data entries must be exactly +1 or -1")
    if weights is None:
        weights = np.full(configs.shape[0], 1.0 / configs.shape[0])
    else:
        if weights.shape != (configs.shape[0],):
            raise DimensionMismatchError(
                f"weights have shape {weights.shape}, expected ({configs.shape[0]},)"
            )
        if np.any(weights < 0.0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite and non-negative")
        total = weights.sum()
        if total <= 0.0:
            raise ValueError("weights must not all be zero")
        weights = weights / total
    return configs, weights


def _pack(delta: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    n = delta.shape[0]
    iu = np.triu_indices(n, k=1)
    return np.concatenate((delta, sigma[iu]))


def _unpack(vec: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    delta = vec[:n]
    sigma = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    sigma[iu] = vec[n:]
    sigma += sigma.T
    return delta, sigma


def _objective_and_grad(
    vec: np.ndarray, configs: np.ndarray, weights: np.ndarray
) -> tuple[float, np.ndarray]:
    n = configs.shape[1]
    delta, sigma = _unpack(vec, n)
    fields = configs @ sigma + delta
    margins = 2.0 * configs * fields
    value = -float(weights @ np.logaddexp(0.0, -margins).sum(axis=1))
    resid = configs - np.tanh(fields)
    grad_delta = weights @ resid
    cross = resid.T @ (configs * weights[:, None])
    cross += cross.T
    iu = np.triu_indices(n, k=1)
    return value, np.concatenate((grad_delta, cross[iu]))


def pseudo_loglik(spec: ModelSpec, data) -> float:
    """Weighted pseudo-log-likelihood of the data under ``spec``."""
    configs, weights = weighted_configs(data)
    if configs.shape[1] != spec.n:
        raise DimensionMismatchError(
            f"data has {configs.shape[1]} columns, expected {spec.n}"
        )
    value, _ = _objective_and_grad(
        _pack(spec.delta, spec.coupling_offdiag()), configs, weights
    )
    return value


def pseudo_loglik_grad(spec: ModelSpec, data) -> np.ndarray:
    """Gradient of the pseudo-log-likelihood over ``(delta, upper-triangle sigma)``.

    Packed as ``delta`` first, then ``sigma[i][j]`` for ``i < j`` in row-major
    order.
    """
    configs, weights = weighted_configs(data)
    if configs.shape[1] != spec.n:
        raise DimensionMismatchError(
            f"data has {configs.shape[1]} columns, expected {spec.n}"
        )
    _, grad = _objective_and_grad(
        _pack(spec.delta, spec.coupling_offdiag()), configs, weights
    )
    return grad


def fit_pseudo_likelihood(
    data,
    init: ModelSpec | None = None,
    *,
    grad_tol: float = 1e-6,
    max_iter: int = 5000,
    armijo_c: float = 1e-4,
    initial_step: float = 1.0,
    max_halvings: int = 60,
) -> FitResult:
    """Maximize the pseudo-log-likelihood by backtracking gradient ascent.

    Each iteration starts from ``initial_step`` and halves until the Armijo
    condition ``f(new) >= f(old) + c * step * |g|^2`` holds; more than
    ``max_halvings`` halvings raises `LineSearchError`.  Stops when the
    gradient norm drops below ``grad_tol`` or after ``max_iter`` accepted
    steps, whichever comes first.
    """
    configs, weights = weighted_configs(data)
    n = configs.shape[1]
    if init is None:
        vec = np.zeros(n + n * (n - 1) // 2)
    else:
        if init.n != n:
            raise DimensionMismatchError(
                f"initial spec has n = {init.n}, data has {n} columns"
            )
        vec = _pack(init.delta, init.coupling_offdiag())

    value, grad = _objective_and_grad(vec, configs, weights)
    trace = [value]
    grad_norm = float(np.linalg.norm(grad))
    iterations = 0
    while grad_norm >= grad_tol and iterations < max_iter:
        step = initial_step
        for _ in range(max_halvings + 1):
            candidate = vec + step * grad
            cand_value, cand_grad = _objective_and_grad(candidate, configs, weights)
            if np.isfinite(cand_value) and cand_value >= value + armijo_c * step * grad_norm**2:
                break
            step *= 0.5
        else:
            raise LineSearchError(
                f"no acceptable step after {max_halvings} halvings "
                f"(gradient norm {grad_norm:.3e})"
            )
        vec, value, grad = candidate, cand_value, cand_grad
        grad_norm = float(np.linalg.norm(grad))
        iterations += 1
        trace.append(value)

    delta, sigma = _unpack(vec, n)
    return FitResult(
        spec_hat=ModelSpec(delta=delta, sigma=sigma),
        objective_trace=np.array(trace),
        grad_norm_final=grad_norm,
        iterations=iterations,
        converged=bool(grad_norm < grad_tol),
    )


def full_loglik(spec: ModelSpec, data) -> float:
    """Weighted full log-likelihood, via exact enumeration of the normalizer.

    A cross-check for the pseudo-likelihood machinery; limited to
    ``n <= 12``.
    """
    if spec.n > FULL_LOGLIK_LIMIT:
        raise EnumerationLimitError(
            f"full likelihood evaluation is limited to n <= {FULL_LOGLIK_LIMIT}, "
            f"got n = {spec.n}"
        )
    configs, weights = weighted_configs(data)
    if configs.shape[1] != spec.n:
        raise DimensionMismatchError(
            f"data has {configs.shape[1]} columns, expected {spec.n}"
        )
    sigma0 = spec.coupling_offdiag()

    def block(rows: np.ndarray) -> np.ndarray:
        return rows @ spec.delta + 0.5 * np.einsum("bi,ij,bj->b", rows, sigma0, rows)

    _, log_z = accumulate_pmf(spec.n, block, workers=1)
    return float(weights @ block(configs)) - log_z
