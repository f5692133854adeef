"""Player-side statistics: per-arm symbol counts and plug-in estimators."""

from __future__ import annotations

import math

import numpy as np
from numba.extending import register_jitable

from .dist import Pmf

DENSE_LIMIT = 4096


class ArmStats:
    """Symbol counts for one arm.

    Counts live in a dense array when ``alphabet_size <= 4096`` and in a dict
    otherwise, so large told-alphabets (kappa up to 1e5) never scan empty
    cells. A running sum of squared counts keeps ``zeta_hat`` O(1).
    """

    __slots__ = ("alphabet_size", "n", "_dense", "_sparse", "_sum_sq")

    def __init__(self, alphabet_size: int):
        if alphabet_size < 1:
            raise ValueError("alphabet_size must be positive")
        self.alphabet_size = int(alphabet_size)
        self.n = 0
        self._sum_sq = 0
        if self.alphabet_size <= DENSE_LIMIT:
            self._dense = np.zeros(self.alphabet_size, dtype=np.int64)
            self._sparse = None
        else:
            self._dense = None
            self._sparse = {}

    @classmethod
    def from_counts(cls, counts, alphabet_size: int | None = None) -> "ArmStats":
        """Build from a mapping ``symbol -> count`` or a sequence of counts."""
        if not hasattr(counts, "items"):
            counts = dict(enumerate(counts))
        if alphabet_size is None:
            alphabet_size = max(counts, default=0) + 1
        stats = cls(alphabet_size)
        for symbol, c in counts.items():
            if c < 0:
                raise ValueError("counts must be nonnegative")
            stats._add(int(symbol), int(c))
        return stats

    @classmethod
    def from_samples(cls, samples, alphabet_size: int) -> "ArmStats":
        stats = cls(alphabet_size)
        for y in samples:
            stats.update(int(y))
        return stats

    def _add(self, symbol: int, k: int) -> None:
        if not 0 <= symbol < self.alphabet_size:
            raise ValueError(
                f"symbol {symbol} outside alphabet of size {self.alphabet_size}"
            )
        if k == 0:
            return
        if self._dense is not None:
            c = int(self._dense[symbol])
            self._dense[symbol] = c + k
        else:
            c = self._sparse.get(symbol, 0)
            self._sparse[symbol] = c + k
        self._sum_sq += (c + k) * (c + k) - c * c
        self.n += k

    def update(self, symbol: int) -> "ArmStats":
        """Record one observation in place and return ``self``."""
        self._add(symbol, 1)
        return self

    def count(self, symbol: int) -> int:
        if self._dense is not None:
            return int(self._dense[symbol])
        return self._sparse.get(symbol, 0)

    def nonzero(self) -> tuple[np.ndarray, np.ndarray]:
        """Observed symbols in increasing order and their counts."""
        if self._dense is not None:
            idx = np.flatnonzero(self._dense)
            return idx, self._dense[idx].copy()
        keys = np.array(sorted(self._sparse), dtype=np.int64)
        return keys, np.array([self._sparse[k] for k in keys], dtype=np.int64)

    @property
    def counts(self) -> dict[int, int]:
        symbols, counts = self.nonzero()
        return {int(a): int(c) for a, c in zip(symbols, counts)}

    @property
    def sum_sq_counts(self) -> int:
        return self._sum_sq

    def copy(self) -> "ArmStats":
        other = ArmStats(self.alphabet_size)
        for a, c in self.counts.items():
            other._add(a, c)
        return other

    def __repr__(self) -> str:
        return f"ArmStats(n={self.n}, alphabet_size={self.alphabet_size}, distinct={self.support_hat()})"

    # estimators as methods for convenience
    def plugin_entropy(self) -> float:
        return plugin_entropy(self)

    def zeta_hat(self) -> float:
        return zeta_hat(self)

    def support_hat(self) -> int:
        return support_hat(self)


def update(stats: ArmStats, symbol: int) -> ArmStats:
    return stats.update(symbol)


def _require_samples(stats: ArmStats) -> None:
    if stats.n < 1:
        raise ValueError("no samples observed yet (n = 0)")


def empirical_pmf(stats: ArmStats) -> Pmf:
    _require_samples(stats)
    probs = np.zeros(stats.alphabet_size)
    symbols, counts = stats.nonzero()
    probs[symbols] = counts / stats.n
    return Pmf(probs)


def plugin_entropy(stats: ArmStats) -> float:
    """Entropy of the empirical pmf, summed over observed symbols only.

    Summation order matches ``entropy(empirical_pmf(stats))`` so the two are
    bit-identical.
    """
    _require_samples(stats)
    _, counts = stats.nonzero()
    n = stats.n
    h = 0.0
    for c in counts:
        p = c / n
        h -= p * math.log(p)
    return max(h, 0.0)


def bias_term(n: int, alphabet_size: int) -> float:
    """Upper bound ``log(1 + (|Y| - 1)/n)`` on the plug-in estimator's negative bias."""
    if n < 1:
        raise ValueError("bias_term needs n >= 1")
    if alphabet_size < 1:
        raise ValueError("alphabet_size must be positive")
    return math.log1p((alphabet_size - 1) / n)


def zeta_hat(stats: ArmStats) -> float:
    _require_samples(stats)
    n = stats.n
    return max(0.0, 1.0 - stats.sum_sq_counts / (n * n))


def support_hat(stats: ArmStats) -> int:
    """Number of distinct symbols seen so far."""
    if stats._dense is not None:
        return int(np.count_nonzero(stats._dense))
    return len(stats._sparse)


def support_upper(stats: ArmStats, delta: float, kappa: float) -> float:
    """High-probability upper bound on the true support size.

    Valid when every positive source probability is at least ``1/kappa``.
    Returned as a real: flooring would change downstream bias arithmetic.
    """
    _require_samples(stats)
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    return _support_upper_raw(support_hat(stats), delta, stats.n, kappa)


@register_jitable
def _support_upper_raw(s_hat: float, delta: float, n: float, kappa: float) -> float:
    slack = math.sqrt(0.5 * math.log(1.0 / delta))
    return (s_hat + slack) / -math.expm1(-n / kappa)
