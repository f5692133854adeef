"""Finite-alphabet distributions and the information functionals used by the bandit.

All logarithms are natural; entropies are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PROB_SUM_TOL = 1e-12


def _xlogx(p: float) -> float:
    if p == 0.0:
        return 0.0
    return p * math.log(p)


def _build_alias(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vose's alias table: column j keeps itself w.p. prob[j], else jumps to alias[j]."""
    m = len(probs)
    scaled = probs * m
    prob = np.ones(m, dtype=np.float64)
    alias = np.arange(m, dtype=np.int64)
    small = [j for j in range(m) if scaled[j] < 1.0]
    large = [j for j in range(m) if scaled[j] >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            small.append(g)
        else:
            large.append(g)
    # leftovers are 1 up to rounding
    for j in large + small:
        prob[j] = 1.0
        alias[j] = j
    return prob, alias


@dataclass(frozen=True, eq=False)
class Pmf:
    """A probability mass function over symbols ``0 .. alphabet_size - 1``.

    Zero-probability symbols are allowed, so the support may be a strict
    subset of the alphabet. Inputs whose sum is within ``1e-12`` of one are
    stored as given (so empirical pmfs keep exact ``count / n`` entries);
    anything further off is rejected.
    """

    probs: np.ndarray
    _alias_prob: np.ndarray = field(init=False, repr=False)
    _alias_idx: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64).ravel()
        if p.size == 0:
            raise ValueError("a Pmf needs at least one symbol")
        if not np.all(np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        total = math.fsum(p)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        prob, alias = _build_alias(p)
        prob.setflags(write=False)
        alias.setflags(write=False)
        object.__setattr__(self, "_alias_prob", prob)
        object.__setattr__(self, "_alias_idx", alias)

    @classmethod
    def bernoulli(cls, p1: float) -> "Pmf":
        """Binary source emitting symbol 1 with probability ``p1``."""
        return cls([1.0 - p1, p1])

    @classmethod
    def point_mass(cls, symbol: int, alphabet_size: int) -> "Pmf":
        probs = np.zeros(alphabet_size)
        probs[symbol] = 1.0
        return cls(probs)

    @classmethod
    def uniform(cls, alphabet_size: int) -> "Pmf":
        return cls(np.full(alphabet_size, 1.0 / alphabet_size))

    @property
    def alphabet_size(self) -> int:
        return int(self.probs.size)

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.probs))

    @property
    def alias_table(self) -> tuple[np.ndarray, np.ndarray]:
        return self._alias_prob, self._alias_idx

    def __len__(self) -> int:
        return self.alphabet_size

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pmf):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)

    def __hash__(self) -> int:
        return hash(self.probs.tobytes())

    def __repr__(self) -> str:
        if self.alphabet_size <= 6:
            return f"Pmf({self.probs.tolist()})"
        return f"Pmf(alphabet_size={self.alphabet_size}, support={self.support_size})"

    def sample(self, rng: np.random.Generator) -> int:
        return sample(self, rng)


def entropy(p: Pmf) -> float:
    """Shannon entropy in nats, with 0 log 0 = 0."""
    h = 0.0
    for x in p.probs:
        if x > 0.0:
            h -= x * math.log(x)
    return max(h, 0.0)


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"binary_entropy needs p in [0, 1], got {p!r}")
    return -_xlogx(p) - _xlogx(1.0 - p)


def kl_bernoulli(p: float, q: float) -> float:
    """Binary KL divergence D(p || q) in nats; +inf when q is 0 or 1 and p != q."""
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValueError(f"kl_bernoulli needs p, q in [0, 1], got {p!r}, {q!r}")
    if p == q:
        return 0.0
    if q == 0.0 or q == 1.0:
        return math.inf
    d = 0.0
    if p > 0.0:
        d += p * math.log(p / q)
    if p < 1.0:
        d += (1.0 - p) * math.log((1.0 - p) / (1.0 - q))
    return max(d, 0.0)


def zeta(p: Pmf) -> float:
    """``1 - sum p(y)^2``; small values mean the pmf sits near a simplex vertex."""
    return float(max(0.0, 1.0 - math.fsum(p.probs * p.probs)))


def tv_distance(p: Pmf, q: Pmf) -> float:
    """Sum of absolute differences. Note: no 1/2 factor, so the range is [0, 2]."""
    if p.alphabet_size != q.alphabet_size:
        raise ValueError(
            f"alphabet mismatch: {p.alphabet_size} vs {q.alphabet_size}"
        )
    return float(math.fsum(np.abs(p.probs - q.probs)))


def alias_draw(prob: np.ndarray, alias: np.ndarray, u: float) -> int:
    """Map one uniform ``u`` in [0, 1) to a symbol through an alias table."""
    m = len(prob)
    scaled = u * m
    j = int(scaled)
    if j >= m:
        j = m - 1
    if scaled - j < prob[j]:
        return j
    return int(alias[j])


def sample(p: Pmf, rng: np.random.Generator) -> int:
    """Draw one symbol; consumes exactly one ``rng.random()``."""
    prob, alias = p.alias_table
    return alias_draw(prob, alias, rng.random())


def make_spiked_pmf(alphabet_size: int, tail_mass: float,
                    rng: np.random.Generator) -> Pmf:
    """Random pmf with ``tail_mass`` spread over the first ``alphabet_size - 1``
    symbols (iid uniform weights, normalized) and the rest on the last symbol."""
    if alphabet_size < 2:
        raise ValueError("alphabet_size must be at least 2")
    if not 0.0 < tail_mass < 1.0:
        raise ValueError(f"tail_mass must lie in (0, 1), got {tail_mass!r}")
    w = rng.random(alphabet_size - 1)
    while w.sum() == 0.0:  # pragma: no cover - measure zero
        w = rng.random(alphabet_size - 1)
    probs = np.empty(alphabet_size)
    probs[:-1] = tail_mass * w / w.sum()
    probs[-1] = 1.0 - tail_mass
    return Pmf(probs)


@dataclass(frozen=True)
class ArmInstance:
    """Ground truth for one arm plus its cached functionals."""

    pmf: Pmf
    entropy_nats: float = field(init=False)
    zeta: float = field(init=False)
    support_size: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "entropy_nats", entropy(self.pmf))
        object.__setattr__(self, "zeta", zeta(self.pmf))
        object.__setattr__(self, "support_size", self.pmf.support_size)

    @property
    def alphabet_size(self) -> int:
        return self.pmf.alphabet_size
