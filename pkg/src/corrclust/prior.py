"""Prior on the number of clusters implied by a uniform prior on partitions.

With every partition of ``n`` points equally likely,
``Pr(k) = S(n, k) / B(n)`` where ``S`` is the Stirling number of the
second kind and ``B`` the Bell number. Everything is computed in log space;
``S(n, k)`` overflows a double long before ``n`` reaches the sizes of
interest.
"""

from functools import lru_cache

import numpy as np

__all__ = ["log_stirling2", "log_bell", "neg_log_prior", "prior_mode"]


@lru_cache(maxsize=8)
def _stirling_row(n):
    """``log S(n, k)`` for ``k = 0..n`` (``-inf`` where ``S = 0``)."""
    row = np.full(n + 1, -np.inf)
    row[0] = 0.0
    log_k = np.log(np.arange(1, n + 1, dtype=np.float64))
    for m in range(1, n + 1):
        new = np.full(n + 1, -np.inf)
        # S(m, k) = k S(m-1, k) + S(m-1, k-1)
        new[1 : m + 1] = np.logaddexp(log_k[:m] + row[1 : m + 1], row[0:m])
        row = new
    row.setflags(write=False)
    return row


def log_stirling2(n, k):
    """Natural log of the Stirling number of the second kind ``S(n, k)``."""
    n, k = int(n), int(k)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    return float(_stirling_row(n)[k])


def log_bell(n):
    """Natural log of the Bell number ``B(n)``, the number of partitions."""
    n = int(n)
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    row = _stirling_row(n)[1:]
    top = row.max()
    return float(top + np.log(np.exp(row - top).sum()))


def neg_log_prior(n):
    """``-log Pr(k)`` for ``k = 1..n``; entry ``k - 1`` belongs to ``k``."""
    n = int(n)
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    return log_bell(n) - _stirling_row(n)[1:]


def prior_mode(n):
    """Most probable number of clusters (smallest ``k`` on ties)."""
    return int(np.argmin(neg_log_prior(n))) + 1
