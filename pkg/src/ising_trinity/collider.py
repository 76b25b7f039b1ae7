"""Common-effect (collider) form: independent causes, binary effects, conditioning.

Causes ``x_i`` are independent ``+/-1`` variables with
``p(x_i = +1) = logistic(2 delta_i)``.  Each effect ``r`` turns on with
probability ``exp(lambda_r (q_r . x)^2 / 2 - log_sup_r)``, scaled so the
largest possible value is exactly one.  Conditioning on every effect being
present recovers the pairwise model's PMF exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._enum import accumulate_pmf
from .core import Pmf, as_binary_config
from .errors import DimensionMismatchError
from .spectral import RANK_TOL, SpectralForm

UNIT_TOL = 1e-8


def _log_2cosh(t: np.ndarray) -> np.ndarray:
    a = np.abs(t)
    return a + np.log1p(np.exp(-2.0 * a))


@dataclass(frozen=True)
class ColliderEffect:
    """One effect: strength ``lam`` and a unit direction ``q`` over the causes.

    ``log_sup`` is the log of the largest value ``exp(lam (q . x)^2 / 2)``
    attains over ``+/-1`` configurations, reached by ``x_i = sign(q_i)``
    (zero entries contribute nothing either way):
    ``log_sup = lam (sum_i |q_i|)^2 / 2``.
    """

    lam: float
    q: np.ndarray
    log_sup: float = field(init=False)

    def __post_init__(self) -> None:
        if not np.isfinite(self.lam) or self.lam < 0.0:
            raise ValueError(f"effect strength must be finite and >= 0, got {self.lam!r}")
        q = np.asarray(self.q, dtype=np.float64)
        if q.ndim != 1:
            raise ValueError(f"effect direction must be a vector, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("effect direction must be finite")
        norm = np.linalg.norm(q)
        if abs(norm - 1.0) > UNIT_TOL:
            raise ValueError(
                f"effect direction must be a unit vector (norm {norm!r})"
            )
        q.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(
            self, "log_sup", float(0.5 * self.lam * np.abs(q).sum() ** 2)
        )


@dataclass(frozen=True)
class ColliderForm:
    """Cause intercepts plus any number of effects over the same causes."""

    delta: np.ndarray
    effects: tuple[ColliderEffect, ...]

    def __post_init__(self) -> None:
        delta = np.asarray(self.delta, dtype=np.float64)
        if delta.ndim != 1:
            raise ValueError(f"delta must be a vector, got shape {delta.shape}")
        if not np.all(np.isfinite(delta)):
            raise ValueError("delta must be finite")
        effects = tuple(self.effects)
        for k, eff in enumerate(effects):
            if eff.q.shape != delta.shape:
                raise DimensionMismatchError(
                    f"effect {k} direction has shape {eff.q.shape}, "
                    f"expected {delta.shape}"
                )
        delta.setflags(write=False)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "effects", effects)

    @property
    def n(self) -> int:
        return self.delta.shape[0]

    @property
    def r(self) -> int:
        return len(self.effects)


def simple_collider(delta) -> ColliderForm:
    """Single-effect form whose acceptance exponent is ``(sum_i x_i)^2 / 2``.

    Parameterized with the unit direction ``ones / sqrt(n)`` and strength
    ``n``, which gives exactly the same acceptance function as an
    unnormalized all-ones direction with strength one.  Conditioned on the
    effect, this reproduces the exchangeable-coupling model.
    """
    delta = np.asarray(delta, dtype=np.float64)
    n = delta.shape[0]
    if n == 0:
        raise ValueError("simple_collider requires at least one cause")
    q = np.ones(n) / np.sqrt(n)
    return ColliderForm(delta=delta, effects=(ColliderEffect(lam=float(n), q=q),))


def spectral_to_collider(form: SpectralForm, delta) -> ColliderForm:
    """One effect per strictly positive eigenvalue, along its eigenvector."""
    delta = np.asarray(delta, dtype=np.float64)
    if delta.shape != (form.n,):
        raise DimensionMismatchError(
            f"delta has shape {delta.shape}, expected ({form.n},)"
        )
    effects = tuple(
        ColliderEffect(lam=float(lam), q=form.q[:, k])
        for k, lam in enumerate(form.lambdas)
        if lam > RANK_TOL
    )
    return ColliderForm(delta=delta, effects=effects)


def cause_marginal_pmf(cf: ColliderForm, workers: int | None = None) -> Pmf:
    """Joint table of the causes alone: independent ``logistic(2 delta_i)`` coins."""
    delta = cf.delta

    def block(configs: np.ndarray) -> np.ndarray:
        return configs @ delta

    probs, log_z = accumulate_pmf(cf.n, block, workers)
    return Pmf(cf.n, probs, log_z)


def effect_acceptance(cf: ColliderForm, x) -> np.ndarray:
    """Per-effect on-probabilities for a cause configuration, each in ``(0, 1]``."""
    x = as_binary_config(x, cf.n)
    out = np.empty(cf.r)
    for k, eff in enumerate(cf.effects):
        score = float(eff.q @ x)
        out[k] = np.exp(0.5 * eff.lam * score**2 - eff.log_sup)
    return out


def collider_joint(cf: ColliderForm, x, e) -> float:
    """Joint probability of causes ``x`` (``+/-1``) and effect states ``e`` (0/1)."""
    x = as_binary_config(x, cf.n)
    e = np.asarray(e)
    if e.shape != (cf.r,):
        raise DimensionMismatchError(
            f"effect pattern has shape {e.shape}, expected ({cf.r},)"
        )
    if not np.all((e == 0) | (e == 1)):
        raise ValueError("effect states must be 0 or 1")
    log_cause = float(x @ cf.delta - _log_2cosh(cf.delta).sum())
    acc = effect_acceptance(cf, x)
    e = e.astype(np.float64)
    return float(np.exp(log_cause) * np.prod(acc**e * (1.0 - acc) ** (1.0 - e)))


def conditioned_pmf(cf: ColliderForm, workers: int | None = None) -> Pmf:
    """Cause table conditioned on every effect being present.

    The table's ``log_z`` is the log probability of that conditioning event
    under the joint, i.e. the log of the expected acceptance rate.
    """
    delta = cf.delta
    base = _log_2cosh(delta).sum()
    lams = np.array([eff.lam for eff in cf.effects])
    sups = np.array([eff.log_sup for eff in cf.effects])
    dirs = (
        np.stack([eff.q for eff in cf.effects], axis=1)
        if cf.effects
        else np.zeros((cf.n, 0))
    )

    def block(configs: np.ndarray) -> np.ndarray:
        scores = configs @ dirs
        return configs @ delta - base + (0.5 * lams * scores**2 - sups).sum(axis=1)

    probs, log_z = accumulate_pmf(cf.n, block, workers)
    return Pmf(cf.n, probs, log_z)
