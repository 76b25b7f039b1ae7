"""Samplers for the three representations, plus CSV serialization of draws.

Every sampler takes an integer seed and is fully reproducible: the same seed
always yields the same draws, independent of machine parallelism.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._enum import config_block
from .collider import ColliderForm
from .core import ModelSpec, Pmf, as_binary_config
from .errors import (
    ConditioningTooSevereError,
    QuadratureResolutionError,
    RankLimitError,
)
from .latent import (
    LatentForm,
    QuadratureRule,
    _log_2cosh,
    _log_latent_norm,
    _log_sigmoid,
)

# Rejection sampling gives up once at least this many proposals have produced
# an acceptance rate below MIN_ACCEPT_RATE.
PROBE_PROPOSALS = 1_000_000
MIN_ACCEPT_RATE = 1e-6

# Relative mass drift (coarse vs. doubled rule) tolerated by the latent-first
# sampler's resolution guard; matches the quadrature marginalizer.
_MASS_TOL = 1e-6

_SWEEP_CHUNK = 4096


@dataclass(frozen=True)
class SampleSet:
    """Draws as an ``(m, n)`` matrix of ``+/-1`` int8 values, with provenance."""

    draws: np.ndarray
    seed: int
    method: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        draws = np.asarray(self.draws)
        if draws.ndim != 2:
            raise ValueError(f"draws must be a matrix, got shape {draws.shape}")
        if draws.shape[0] < 1:
            raise ValueError("a sample set must contain at least one draw")
        if not np.all(np.abs(draws.astype(np.int64)) == 1):
            raise ValueError("draws must contain only +1 and -1")
        draws = draws.astype(np.int8)
        draws.setflags(write=False)
        object.__setattr__(self, "draws", draws)

    @property
    def m(self) -> int:
        return self.draws.shape[0]

    @property
    def n(self) -> int:
        return self.draws.shape[1]


def _require_positive_m(m: int) -> None:
    if m < 1:
        raise ValueError(f"sample count must be at least 1, got {m}")


def empirical_frequencies(sample: SampleSet) -> np.ndarray:
    """Relative frequency of each configuration index in a sample."""
    bits = (sample.draws > 0).astype(np.int64)
    idx = bits @ (1 << np.arange(sample.n, dtype=np.int64))
    counts = np.bincount(idx, minlength=1 << sample.n)
    return counts / sample.m


def sample_exact(pmf: Pmf, m: int, seed: int) -> SampleSet:
    """Independent draws from an enumerated table by inverse-CDF lookup."""
    _require_positive_m(m)
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(pmf.probs)
    idx = np.searchsorted(cdf, rng.random(m), side="right")
    idx = np.minimum(idx, (1 << pmf.n) - 1).astype(np.int64)
    signs = 2.0 * ((idx[:, None] >> np.arange(pmf.n, dtype=np.int64)) & 1) - 1.0
    return SampleSet(draws=signs.astype(np.int8), seed=seed, method="exact")


def gibbs_conditional(spec: ModelSpec, x, i: int) -> float:
    """Exact single-site conditional ``p(x_i = +1 | rest)`` used by the sweep."""
    x = as_binary_config(x, spec.n)
    if not 0 <= i < spec.n:
        raise ValueError(f"site index {i} out of range for n = {spec.n}")
    h = float(spec.delta[i] + spec.coupling_offdiag()[i] @ x)
    return float(np.exp(_log_sigmoid(np.asarray(2.0 * h))))


def sample_gibbs(
    spec: ModelSpec,
    m: int,
    seed: int,
    *,
    burn_in: int = 1000,
    thin: int = 1,
) -> SampleSet:
    """Systematic-scan Gibbs sampling of the pairwise model.

    Each sweep resamples sites ``0..n-1`` in order from their exact
    conditionals ``p(x_i = +1 | rest) = logistic(2 (delta_i + sigma_i . x))``.
    The first ``burn_in`` sweeps are discarded, then every ``thin``-th sweep is
    recorded until ``m`` draws are collected.
    """
    _require_positive_m(m)
    if burn_in < 0:
        raise ValueError(f"burn_in must be non-negative, got {burn_in}")
    if thin < 1:
        raise ValueError(f"thin must be at least 1, got {thin}")
    n = spec.n
    rng = np.random.default_rng(seed)
    sigma0 = spec.coupling_offdiag()
    rows = [sigma0[i].copy() for i in range(n)]
    delta = [float(d) for d in spec.delta]
    x = (2.0 * rng.integers(0, 2, n) - 1.0).astype(np.float64)

    draws = np.empty((m, n), dtype=np.int8)
    total_sweeps = burn_in + m * thin
    recorded = 0
    done = 0
    while done < total_sweeps:
        chunk = min(_SWEEP_CHUNK, total_sweeps - done)
        u = rng.random((chunk, n))
        for s in range(chunk):
            us = u[s]
            for i in range(n):
                h = delta[i] + float(rows[i] @ x)
                if h > 30.0:
                    p = 1.0
                elif h < -30.0:
                    p = 0.0
                else:
                    p = 1.0 / (1.0 + math.exp(-2.0 * h))
                x[i] = 1.0 if us[i] < p else -1.0
            post = done + s - burn_in + 1  # 1-based sweep count past burn-in
            if post >= 1 and post % thin == 0:
                draws[recorded] = x
                recorded += 1
        done += chunk
    return SampleSet(
        draws=draws,
        seed=seed,
        method="gibbs",
        meta={"burn_in": burn_in, "thin": thin},
    )


def sample_collider_rejection(cf: ColliderForm, m: int, seed: int) -> SampleSet:
    """Draws from the conditioned collider by rejection.

    Causes are proposed from their independent marginals and kept with
    probability equal to the product of effect acceptances, which is exactly
    the conditioning event's likelihood.  Aborts with
    `ConditioningTooSevereError` once ``PROBE_PROPOSALS`` proposals have shown
    an acceptance rate below ``MIN_ACCEPT_RATE``.
    """
    _require_positive_m(m)
    n = cf.n
    rng = np.random.default_rng(seed)
    p_plus = np.exp(_log_sigmoid(2.0 * cf.delta))
    lams = np.array([eff.lam for eff in cf.effects])
    sups = np.array([eff.log_sup for eff in cf.effects])
    dirs = (
        np.stack([eff.q for eff in cf.effects], axis=1)
        if cf.effects
        else np.zeros((n, 0))
    )

    kept: list[np.ndarray] = []
    n_acc = 0
    n_prop = 0
    while n_acc < m:
        rate = n_acc / n_prop if n_prop else 1.0
        need = m - n_acc
        batch = int(min(max(8192, 1.2 * need / max(rate, 1e-4)), 4_000_000))
        proposals = np.where(rng.random((batch, n)) < p_plus, 1.0, -1.0)
        scores = proposals @ dirs
        log_acc = (0.5 * lams * scores**2 - sups).sum(axis=1)
        keep = rng.random(batch) < np.exp(log_acc)
        kept.append(proposals[keep].astype(np.int8))
        n_acc += int(keep.sum())
        n_prop += batch
        if n_acc < m and n_prop >= PROBE_PROPOSALS and n_acc / n_prop < MIN_ACCEPT_RATE:
            raise ConditioningTooSevereError(
                f"acceptance rate {n_acc}/{n_prop} ~ {n_acc / n_prop:.2e} is below "
                f"{MIN_ACCEPT_RATE:g}; conditioning is too severe for rejection "
                f"sampling"
            )
    draws = np.concatenate(kept, axis=0)[:m]
    return SampleSet(
        draws=draws,
        seed=seed,
        method="collider-rejection",
        meta={
            "proposals": n_prop,
            "accepted": n_acc,
            "rejected": n_prop - n_acc,
            "acceptance_rate": n_acc / n_prop,
        },
    )


def sample_latent_first(
    lf: LatentForm,
    rule: QuadratureRule | None,
    m: int,
    seed: int,
    *,
    grid_points: int = 4097,
) -> SampleSet:
    """Draw the latent value first, then the items, for a rank-1 latent form.

    The latent value is drawn by inverse CDF on a dense uniform grid covering
    the density's support; items are then independent logistic coins given the
    draw.  The quadrature rule guards resolution: if it disagrees with its
    doubled reference on the density's normalizer by more than the mass
    tolerance, the model is outside the trustworthy regime and a
    `QuadratureResolutionError` is raised.
    """
    _require_positive_m(m)
    if lf.r != 1:
        raise RankLimitError(
            f"latent-first sampling supports exactly one latent dimension, "
            f"got r = {lf.r}"
        )
    if grid_points < 16:
        raise ValueError(f"grid_points must be at least 16, got {grid_points}")
    rule = QuadratureRule.gauss_hermite() if rule is None else rule
    a = lf.loadings[:, 0]
    delta = lf.delta

    def log_shape(t: np.ndarray) -> np.ndarray:
        return _log_2cosh(t[:, None] * a + delta).sum(axis=1) - 0.5 * t**2

    # Normalizer agreement between the rule and its doubled reference.
    loadings = a[:, None]
    drift = abs(
        math.exp(
            _log_latent_norm(delta, loadings, rule)
            - _log_latent_norm(delta, loadings, rule.refined())
        )
        - 1.0
    )
    if drift > _MASS_TOL:
        raise QuadratureResolutionError(
            f"quadrature rule disagrees with its doubled reference on the "
            f"latent normalizer by {drift:.2e}; refine the rule (more nodes)"
        )

    half_width = max(float(rule.nodes.max()), float(np.abs(a).sum()) + 8.0)
    grid = np.linspace(-half_width, half_width, grid_points)
    log_f = log_shape(grid)
    f = np.exp(log_f - log_f.max())
    cdf = np.concatenate(([0.0], np.cumsum(0.5 * (f[1:] + f[:-1]))))
    cdf /= cdf[-1]

    rng = np.random.default_rng(seed)
    thetas = np.interp(rng.random(m), cdf, grid)
    p_plus = np.exp(_log_sigmoid(2.0 * (thetas[:, None] * a + delta)))
    draws = np.where(rng.random((m, lf.n)) < p_plus, 1, -1).astype(np.int8)
    return SampleSet(
        draws=draws,
        seed=seed,
        method="latent-first",
        meta={"grid_points": grid_points, "grid_halfwidth": half_width},
    )


def sidecar_path(csv_path) -> Path:
    """Path of the JSON sidecar accompanying a sample CSV."""
    return Path(csv_path).with_suffix(".meta.json")


def save_sample_set(sample: SampleSet, csv_path) -> None:
    """Write draws as CSV (columns ``x_1..x_n``) plus a JSON metadata sidecar."""
    csv_path = Path(csv_path)
    header = ",".join(f"x_{i + 1}" for i in range(sample.n))
    lines = [header]
    lines.extend(",".join(str(int(v)) for v in row) for row in sample.draws)
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    side = {
        "method": sample.method,
        "seed": sample.seed,
        "m": sample.m,
        "n": sample.n,
        "meta": sample.meta,
    }
    sidecar_path(csv_path).write_text(
        json.dumps(side, indent=2) + "\n", encoding="utf-8"
    )


def load_sample_set(csv_path) -> SampleSet:
    """Read a sample CSV and its sidecar back into a `SampleSet`."""
    csv_path = Path(csv_path)
    side_path = sidecar_path(csv_path)
    if not side_path.exists():
        raise ValueError(f"missing sample metadata sidecar {side_path}")
    side = json.loads(side_path.read_text(encoding="utf-8"))
    rows = csv_path.read_text(encoding="utf-8").strip().split("\n")
    if len(rows) < 2:
        raise ValueError(f"sample file {csv_path} contains no draws")
    draws = np.array(
        [[int(v) for v in row.split(",")] for row in rows[1:]], dtype=np.int8
    )
    return SampleSet(
        draws=draws,
        seed=int(side["seed"]),
        method=str(side["method"]),
        meta=dict(side.get("meta", {})),
    )
