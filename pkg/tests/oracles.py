"""Brute-force oracles written in plain Python, independent of the package.

Everything here enumerates configurations with explicit loops and scalar math
so that agreement with the package's vectorized, log-space code is meaningful.
Index order matches the package convention: bit ``i`` of the index gives the
sign of ``x_i``.
"""

import math


def all_configs(n):
    return [
        tuple(1 if (k >> i) & 1 else -1 for i in range(n)) for k in range(2**n)
    ]


def ising_table(delta, sigma):
    n = len(delta)
    weights = []
    for x in all_configs(n):
        w = sum(x[i] * delta[i] for i in range(n))
        for i in range(n):
            for j in range(i + 1, n):
                w += x[i] * x[j] * sigma[i][j]
        weights.append(math.exp(w))
    z = sum(weights)
    return [w / z for w in weights]


def curie_weiss_table(delta):
    n = len(delta)
    weights = []
    for x in all_configs(n):
        s = sum(x)
        weights.append(math.exp(sum(x[i] * delta[i] for i in range(n)) + 0.5 * s * s))
    z = sum(weights)
    return [w / z for w in weights]


def spectral_table(delta, lambdas, q_columns):
    """Table of the model with weight x.delta + sum_r lambda_r (q_r . x)^2 / 2."""
    n = len(delta)
    weights = []
    for x in all_configs(n):
        w = sum(x[i] * delta[i] for i in range(n))
        for lam, q in zip(lambdas, q_columns):
            score = sum(q[i] * x[i] for i in range(n))
            w += 0.5 * lam * score * score
        weights.append(math.exp(w))
    z = sum(weights)
    return [w / z for w in weights]


def cause_table(delta):
    n = len(delta)
    weights = [
        math.exp(sum(x[i] * delta[i] for i in range(n))) for x in all_configs(n)
    ]
    z = sum(weights)
    return [w / z for w in weights]


def effect_sup_by_scan(lam, q):
    """Largest acceptance exponent, found by scanning every configuration."""
    n = len(q)
    return max(
        0.5 * lam * sum(q[i] * x[i] for i in range(n)) ** 2 for x in all_configs(n)
    )


def conditioned_collider_table(delta, effects):
    """Conditioned-on-all-effects table; ``effects`` is a list of (lam, q).

    Returns ``(table, acceptance_probability)``.  The sup in each acceptance
    factor is found by brute scan, not by any closed form.
    """
    n = len(delta)
    sups = [effect_sup_by_scan(lam, q) for lam, q in effects]
    cause_norm = math.prod(2.0 * math.cosh(d) for d in delta)
    joint = []
    for x in all_configs(n):
        p = math.exp(sum(x[i] * delta[i] for i in range(n))) / cause_norm
        for (lam, q), sup in zip(effects, sups):
            score = sum(q[i] * x[i] for i in range(n))
            p *= math.exp(0.5 * lam * score * score - sup)
        joint.append(p)
    z = sum(joint)
    return [p / z for p in joint], z


def table_moments(table, n):
    """First and second moments of a configuration table."""
    first = [0.0] * n
    second = [[0.0] * n for _ in range(n)]
    for p, x in zip(table, all_configs(n)):
        for i in range(n):
            first[i] += p * x[i]
            for j in range(n):
                second[i][j] += p * x[i] * x[j]
    return first, second
