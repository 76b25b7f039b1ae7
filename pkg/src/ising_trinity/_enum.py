"""Configuration indexing and log-space enumeration shared by the exact PMF builders.

Index convention: bit ``i`` of the configuration index encodes variable ``i``,
with a set bit meaning ``x_i = +1``.  Index 0 is therefore the all ``-1``
configuration and index ``2**n - 1`` the all ``+1`` one.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

from .errors import EnumerationLimitError

ENUMERATION_LIMIT = 20

# Configurations materialized per block: 2**14 rows keeps a float64 block under
# 3 MB even at the enumeration limit.
_BLOCK = 1 << 14

THREADS_ENV_VAR = "ISING_TRINITY_THREADS"

# Parallel block fill only pays off once there are many blocks to go around.
_PARALLEL_MIN_N = 16


def worker_count() -> int:
    """Worker cap from the ``ISING_TRINITY_THREADS`` environment variable.

    Defaults to the machine's CPU count; malformed values fall back to 1 with
    a warning rather than failing the computation.
    """
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is not None:
        try:
            return max(1, int(raw))
        except ValueError:
            warnings.warn(
                f"ignoring non-integer {THREADS_ENV_VAR}={raw!r}; running single-threaded"
            )
            return 1
    return os.cpu_count() or 1


def config_block(n: int, start: int, stop: int) -> np.ndarray:
    """The ``+/-1`` configurations with indices in ``[start, stop)`` as a float matrix."""
    idx = np.arange(start, stop, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return (2.0 * bits - 1.0).astype(np.float64)


def config_matrix(n: int) -> np.ndarray:
    """All ``2**n`` configurations, row ``k`` holding the configuration with index ``k``."""
    if n > ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            f"n = {n} is too large for exact enumeration (limit {ENUMERATION_LIMIT})"
        )
    return config_block(n, 0, 1 << n)


def index_to_config(k: int, n: int) -> np.ndarray:
    """The configuration with index ``k`` as a length-``n`` ``+/-1`` vector."""
    if not 0 <= k < (1 << n):
        raise ValueError(f"configuration index {k} out of range for n = {n}")
    return config_block(n, k, k + 1)[0]


def config_to_index(x: np.ndarray) -> int:
    """The index whose bit pattern encodes the ``+/-1`` configuration ``x``."""
    bits = (np.asarray(x) > 0).astype(np.int64)
    return int((bits << np.arange(len(bits), dtype=np.int64)).sum())


def accumulate_pmf(
    n: int,
    block_log_weight: Callable[[np.ndarray], np.ndarray],
    workers: int | None = None,
) -> tuple[np.ndarray, float]:
    """Enumerate all configurations of ``n`` variables and normalize in log space.

    ``block_log_weight`` maps a ``(b, n)`` block of configurations to ``b`` log
    weights.  Blocks are processed by index range, optionally across threads;
    the normalization pass is serial, so the result does not depend on the
    worker count.  Returns ``(probs, log_z)`` with ``probs`` summing to one.
    """
    if n > ENUMERATION_LIMIT:
        raise EnumerationLimitError(
            f"n = {n} is too large for exact enumeration (limit {ENUMERATION_LIMIT})"
        )
    total = 1 << n
    log_w = np.empty(total)
    spans = [(s, min(s + _BLOCK, total)) for s in range(0, total, _BLOCK)]

    def fill(span: tuple[int, int]) -> None:
        lo, hi = span
        log_w[lo:hi] = block_log_weight(config_block(n, lo, hi))

    n_workers = worker_count() if workers is None else max(1, workers)
    if n_workers > 1 and n >= _PARALLEL_MIN_N and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(fill, spans))
    else:
        for span in spans:
            fill(span)

    peak = log_w.max()
    scaled = np.exp(log_w - peak)
    norm = scaled.sum()
    return scaled / norm, float(peak + np.log(norm))
