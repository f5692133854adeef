"""The generic UCB loop over K entropy arms and pseudo-regret accounting.

Rounds ``1 .. K * init_rounds_per_arm`` play the arms round-robin in blocks
(arm 0 three times, then arm 1, ...). Afterwards every round plays the arm
with the largest ``plugin_entropy + UCD`` index; ties go to the lowest arm id.
Each round consumes exactly one uniform from ``default_rng(seed)``, which the
played arm's alias table maps to a symbol.

``run`` uses a numba kernel. ``run_reference`` drives the same loop through
:class:`ArmStats` and :class:`UcdPolicy` in plain Python; it is slow and
exists to cross-check the kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .dist import ArmInstance, alias_draw
from .estimators import ArmStats
from .ucd import (
    UcdKind,
    UcdPolicy,
    _bias_raw,
    _binary_min_raw,
    _schedule_raw,
    _se_raw,
    _tv_raw,
)

SEED_MASK = (1 << 64) - 1


def checkpoint_schedule(horizon: int, growth: float = 1.25,
                        decades: bool = True) -> np.ndarray:
    """Rounds ``ceil(growth**k)`` for k >= 0, plus powers of ten and ``horizon``."""
    if horizon < 1:
        raise ValueError("horizon must be positive")
    if not growth > 1.0:
        raise ValueError("growth must exceed 1")
    ts = {horizon}
    k = 0
    while True:
        t = math.ceil(growth ** k)
        if t > horizon:
            break
        ts.add(t)
        k += 1
    if decades:
        t = 1
        while t <= horizon:
            ts.add(t)
            t *= 10
    return np.array(sorted(ts), dtype=np.int64)


@dataclass(frozen=True)
class BanditRunConfig:
    arms: Sequence[ArmInstance]
    policy: UcdPolicy
    horizon: int
    seed: int = 0
    init_rounds_per_arm: int = 3
    checkpoints: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "arms", tuple(self.arms))
        k = len(self.arms)
        if k < 2:
            raise ValueError("need at least two arms")
        if self.init_rounds_per_arm < 1:
            raise ValueError("init_rounds_per_arm must be >= 1")
        if self.horizon < k * self.init_rounds_per_arm:
            raise ValueError(
                f"horizon {self.horizon} shorter than the warm start "
                f"({k} arms x {self.init_rounds_per_arm} rounds)"
            )
        for arm in self.arms:
            if arm.alphabet_size > self.policy.kappa:
                raise ValueError(
                    f"arm alphabet {arm.alphabet_size} exceeds kappa {self.policy.kappa}"
                )
        if self.checkpoints is None:
            cps = checkpoint_schedule(self.horizon)
        else:
            cps = np.unique(np.asarray(self.checkpoints, dtype=np.int64))
            if cps.size == 0 or cps[0] < 1 or cps[-1] > self.horizon:
                raise ValueError("checkpoints must lie in [1, horizon]")
        object.__setattr__(self, "checkpoints", cps)

    @property
    def gaps(self) -> np.ndarray:
        return arm_gaps(self.arms)


@dataclass(frozen=True, eq=False)
class RegretTrace:
    """Pull counts and pseudo-regret (nats) at each checkpoint round."""

    t: np.ndarray
    pulls: np.ndarray
    pseudo_regret: np.ndarray

    @property
    def checkpoints(self) -> list[tuple[int, tuple[int, ...], float]]:
        return [
            (int(t), tuple(int(x) for x in row), float(r))
            for t, row, r in zip(self.t, self.pulls, self.pseudo_regret)
        ]

    @property
    def final_regret(self) -> float:
        return float(self.pseudo_regret[-1])

    def at(self, t: int) -> float:
        i = np.searchsorted(self.t, t)
        if i >= len(self.t) or self.t[i] != t:
            raise KeyError(f"round {t} is not a checkpoint")
        return float(self.pseudo_regret[i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RegretTrace):
            return NotImplemented
        return (np.array_equal(self.t, other.t)
                and np.array_equal(self.pulls, other.pulls)
                and np.array_equal(self.pseudo_regret, other.pseudo_regret))


def arm_gaps(arms: Sequence[ArmInstance]) -> np.ndarray:
    h = np.array([a.entropy_nats for a in arms])
    return h.max() - h


def pseudo_regret(pull_counts, arms: Sequence[ArmInstance]) -> float:
    """Sum of ``N_i * gap_i`` over arms with a positive gap."""
    counts = np.asarray(pull_counts)
    if counts.shape[-1] != len(arms):
        raise ValueError("one pull count per arm expected")
    gaps = arm_gaps(arms)
    total = 0.0
    for n_i, g in zip(counts, gaps):
        if g > 0.0:
            total += float(n_i) * g
    return total


def _regret_from_pulls(pulls: np.ndarray, gaps: np.ndarray) -> np.ndarray:
    out = np.zeros(pulls.shape[0])
    for i, g in enumerate(gaps):
        if g > 0.0:
            out += pulls[:, i] * g
    return out


def _uniforms(seed: int, horizon: int) -> np.ndarray:
    return np.random.default_rng(int(seed) & SEED_MASK).random(horizon)


def _alias_tables(arms: Sequence[ArmInstance]):
    width = max(a.alphabet_size for a in arms)
    prob = np.ones((len(arms), width))
    idx = np.zeros((len(arms), width), dtype=np.int64)
    sizes = np.empty(len(arms), dtype=np.int64)
    for i, arm in enumerate(arms):
        p, a = arm.pmf.alias_table
        m = len(p)
        prob[i, :m] = p
        idx[i, :m] = a
        sizes[i] = m
    return prob, idx, sizes


@njit(cache=True)
def _kernel(kind, alpha, kappa, clamp, init_rounds, alias_prob, alias_idx,
            sizes, uniforms, checkpoints, out_pulls):
    n_arms = sizes.shape[0]
    horizon = uniforms.shape[0]
    counts = np.zeros((n_arms, kappa), dtype=np.int64)
    # observed symbols per arm, kept sorted so entropy sums run in symbol order
    seen = np.zeros((n_arms, kappa), dtype=np.int64)
    n_seen = np.zeros(n_arms, dtype=np.int64)
    n = np.zeros(n_arms, dtype=np.int64)
    sum_sq = np.zeros(n_arms, dtype=np.int64)
    h_hat = np.zeros(n_arms)
    pulls = np.zeros(n_arms, dtype=np.int64)
    log_kappa = math.log(kappa)
    warm = n_arms * init_rounds
    next_cp = 0
    for t in range(1, horizon + 1):
        if t <= warm:
            arm = (t - 1) // init_rounds
        else:
            arm = 0
            best = -np.inf
            for i in range(n_arms):
                ni = n[i]
                if kind == 0:
                    u = _bias_raw(_schedule_raw(1.0, alpha, t), ni, kappa)
                elif kind == 3:
                    c1 = counts[i, 1]
                    if 2 * c1 > ni:
                        c1 = ni - c1
                    u = _binary_min_raw(c1 / ni, alpha, t, ni)
                elif kind == 4:
                    z = 1.0 - sum_sq[i] / (ni * ni)
                    if z < 0.0:
                        z = 0.0
                    u = _tv_raw(z, kappa, _schedule_raw(1.0, alpha, t), ni)
                else:
                    u = _se_raw(n_seen[i], _schedule_raw(1.0, alpha, t), ni, kappa)
                idx = h_hat[i] + u
                if clamp and idx > log_kappa:
                    idx = log_kappa
                if idx > best:
                    best = idx
                    arm = i
        # draw one symbol from the played arm
        m = sizes[arm]
        scaled = uniforms[t - 1] * m
        j = int(scaled)
        if j >= m:
            j = m - 1
        if scaled - j < alias_prob[arm, j]:
            y = j
        else:
            y = alias_idx[arm, j]
        c = counts[arm, y]
        if c == 0:
            k = n_seen[arm]
            while k > 0 and seen[arm, k - 1] > y:
                seen[arm, k] = seen[arm, k - 1]
                k -= 1
            seen[arm, k] = y
            n_seen[arm] += 1
        counts[arm, y] = c + 1
        sum_sq[arm] += 2 * c + 1
        n[arm] += 1
        pulls[arm] += 1
        na = n[arm]
        h = 0.0
        for s in range(n_seen[arm]):
            p = counts[arm, seen[arm, s]] / na
            h -= p * math.log(p)
        h_hat[arm] = h if h > 0.0 else 0.0
        while next_cp < checkpoints.shape[0] and checkpoints[next_cp] == t:
            for i in range(n_arms):
                out_pulls[next_cp, i] = pulls[i]
            next_cp += 1


def run(config: BanditRunConfig) -> RegretTrace:
    """Play one bandit run; deterministic given ``config.seed``."""
    policy = config.policy
    prob, idx, sizes = _alias_tables(config.arms)
    cps = config.checkpoints
    out = np.zeros((len(cps), len(config.arms)), dtype=np.int64)
    _kernel(int(policy.kind), float(policy.alpha), int(policy.kappa),
            bool(policy.clamp_to_max_entropy), int(config.init_rounds_per_arm),
            prob, idx, sizes, _uniforms(config.seed, config.horizon), cps, out)
    return RegretTrace(cps.copy(), out, _regret_from_pulls(out, config.gaps))


def run_reference(config: BanditRunConfig) -> RegretTrace:
    """Same loop as :func:`run` through the public ArmStats/UcdPolicy API."""
    policy = config.policy
    arms = config.arms
    k = len(arms)
    stats = [ArmStats(policy.kappa) for _ in arms]
    uniforms = _uniforms(config.seed, config.horizon)
    cps = set(int(c) for c in config.checkpoints)
    rows = []
    warm = k * config.init_rounds_per_arm
    for t in range(1, config.horizon + 1):
        if t <= warm:
            arm = (t - 1) // config.init_rounds_per_arm
        else:
            scores = [policy.index(s, t) for s in stats]
            arm = int(np.argmax(scores))  # first maximizer
        prob, alias = arms[arm].pmf.alias_table
        stats[arm].update(alias_draw(prob, alias, uniforms[t - 1]))
        if t in cps:
            rows.append([s.n for s in stats])
    pulls = np.array(rows, dtype=np.int64)
    return RegretTrace(config.checkpoints.copy(), pulls,
                       _regret_from_pulls(pulls, config.gaps))


__all__ = [
    "BanditRunConfig",
    "RegretTrace",
    "UcdKind",
    "arm_gaps",
    "checkpoint_schedule",
    "pseudo_regret",
    "run",
    "run_reference",
]
