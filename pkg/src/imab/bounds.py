"""Regret-bound apparatus: sample-count thresholds, theorem bounds and the
Lai-Robbins constant.

Notation: ``lambda_k(s, k) = s * log(s)**k``. Each ``gamma_*`` returns the
number of samples beyond which the matching UCD falls below half the gap.
All quantities are in nats.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .dist import ArmInstance, kl_bernoulli

BETA_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))

# proven constants of the polylog inversion, keyed by r
_POLYLOG_CONST = {1.0: 2.0, 4.0 / 3.0: 3.0, 2.0: 15.0}

THEOREMS = ("thm1", "thm2", "thm4", "thm5", "thm6")


def lambda_k(s: float, k: float) -> float:
    """``s * log(s)**k``. Fractional ``k`` needs ``s >= 1``."""
    if not s > 0.0:
        raise ValueError(f"lambda_k needs s > 0, got {s!r}")
    ls = math.log(s)
    if ls < 0.0 and k != int(k):
        raise ValueError(f"lambda_k with fractional k={k} needs s >= 1, got {s!r}")
    return s * ls ** k


def _lam(s: float, k: float) -> float:
    # s = 0 happens at t = 1 where log t vanishes; the limit is 0
    return 0.0 if s == 0.0 else lambda_k(s, k)


def _match_r(r: float) -> float:
    for key in _POLYLOG_CONST:
        if abs(r - key) < 1e-12:
            return key
    raise ValueError(f"no proven constant for r={r!r}; use 1, 4/3 or 2")


def polylog_inverse_threshold(r: float, y: float) -> float:
    """Smallest proven ``x`` with ``log(x')**r / x' <= y`` for all ``x' >= x``.

    Returns 0 when ``y >= (r/e)**r``, where the inequality holds everywhere.
    """
    r = _match_r(r)
    if not y > 0.0:
        raise ValueError(f"y must be positive, got {y!r}")
    if y >= (r / math.e) ** r:
        return 0.0
    return _POLYLOG_CONST[r] * lambda_k(1.0 / y, r)


def _check(alpha: float, gap: float, t: float, beta: float | None = None) -> None:
    if not alpha > 2.0:
        raise ValueError(f"alpha must exceed 2, got {alpha!r}")
    if not gap > 0.0:
        raise ValueError(f"gap must be positive, got {gap!r}")
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t!r}")
    if beta is not None and not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta!r}")


def _deviation_threshold(alpha, beta, gap, t):
    return 15.0 * _lam(8.0 * (math.log(2.0) + alpha * math.log(t))
                       / ((1.0 - beta) ** 2 * gap ** 2), 2)


def gamma_bias(alpha: float, beta: float, alphabet_size: int, gap: float, t: float) -> float:
    _check(alpha, gap, t, beta)
    first = (alphabet_size - 1) / math.expm1(beta * gap / 2.0)
    return max(first, _deviation_threshold(alpha, beta, gap, t))


def gamma_ber(alpha: float, beta: float, q: float, gap: float, t: float) -> float:
    _check(alpha, gap, t, beta)
    lt = alpha * math.log(t)
    b2 = beta * beta * gap * gap
    return max(
        6.0 * _lam(36.0 * lt / ((1.0 - beta) * gap), 1),
        5120.0 * q * lt / b2 * math.log(48.0 / b2) ** 2,
        88.0 * math.sqrt(lt) / (beta * gap) * math.log(48.0 / b2),
    )


def gamma_ber_tilde(alpha: float, beta: float, q: float, gap: float, t: float) -> float:
    """Simplified threshold for ``ucd_ber`` with a known ``q`` at ``delta = 4 t^-alpha``."""
    _check(alpha, gap, t, beta)
    lt = alpha * math.log(t)
    b2 = beta * beta * gap * gap
    return max(
        2.0 * _lam(36.0 * lt / ((1.0 - beta) * gap), 1),
        960.0 * q * lt / b2 * math.log(48.0 / b2) ** 2,
    )


def _tv_shared(alpha, alphabet_size, gap, t):
    y = float(alphabet_size)
    lt = alpha * math.log(t)
    third = 135.0 / y ** 2 * _lam(9.0 * y * y * lt / gap ** 2, 2)
    fourth = 3.0 / y ** (2.0 / 3.0) * _lam(
        27.0 * y ** (4.0 / 3.0) * lt ** (1.0 / 3.0) / gap ** (4.0 / 3.0), 4.0 / 3.0)
    return lt, lambda_k(2.0 * y / (3.0 * gap), 1), third, fourth


def gamma_tv(alpha: float, zeta: float, alphabet_size: int, gap: float, t: float) -> float:
    _check(alpha, gap, t)
    y = float(alphabet_size)
    lt, lam1, third, fourth = _tv_shared(alpha, alphabet_size, gap, t)
    return max(
        288.0 * zeta / y * lam1 ** 2,
        36230.0 * lt ** (1.0 / 3.0) / y ** (2.0 / 3.0) * math.pow(lam1, 4.0 / 3.0),
        third,
        fourth,
        30.0 * (math.log(2.0) + lt),
        119.0 * zeta * y,
    )


def gamma_tv_tilde(alpha: float, zeta: float, alphabet_size: int, gap: float, t: float) -> float:
    """Simplified threshold for ``ucd_tv`` with a known ``zeta`` at ``delta = 2 t^-alpha``."""
    _check(alpha, gap, t)
    _, lam1, third, fourth = _tv_shared(alpha, alphabet_size, gap, t)
    return max(144.0 * zeta / alphabet_size * lam1 ** 2, third, fourth)


def gamma_se(alpha: float, beta: float, support: int, kappa: float, gap: float,
             t: float, denominator: str = "min") -> float:
    """Threshold for the support-estimating rule.

    ``denominator="min"`` uses ``min(x, sqrt(x))`` with ``x = e^{beta gap/2} - 1``,
    the larger and provably sufficient choice; ``"max"`` gives the alternative
    ``max(x, sqrt(x))`` form for comparison.
    """
    _check(alpha, gap, t, beta)
    if support < 1 or support > kappa:
        raise ValueError("need 1 <= support <= kappa")
    x = math.expm1(beta * gap / 2.0)
    if denominator == "min":
        d = min(x, math.sqrt(x))
    elif denominator == "max":
        d = max(x, math.sqrt(x))
    else:
        raise ValueError("denominator must be 'min' or 'max'")
    first = (2.0 * math.sqrt(kappa)
             * (math.sqrt(support) + (alpha * math.log(t) / 2.0) ** 0.25) / d)
    return max(first, _deviation_threshold(alpha, beta, gap, t))


# -- theorem bounds ------------------------------------------------------

def _gaps(arms: Sequence[ArmInstance]) -> np.ndarray:
    h = np.array([a.entropy_nats for a in arms])
    return h.max() - h


def _binary_q(arm: ArmInstance) -> float:
    if arm.alphabet_size != 2:
        raise ValueError("theorem needs binary arms")
    p1 = float(arm.pmf.probs[1])
    return min(p1, 1.0 - p1)


def _best_over_beta(f, beta, beta_grid):
    if beta is not None:
        return f(beta)
    return min(f(b) for b in beta_grid)


def regret_bound(theorem: str, arms: Sequence[ArmInstance], alpha: float, t: float,
                 beta: float | None = None, *, kappa: int | None = None,
                 beta_grid: Sequence[float] = BETA_GRID,
                 se_denominator: str = "min") -> float:
    """Right-hand side of a pseudo-regret upper bound at round ``t``.

    ``theorem`` is one of ``thm1`` (bias rule), ``thm2`` (binary Bernstein
    rule), ``thm4`` (binary, p near 1/2), ``thm5`` (tv rule), ``thm6``
    (support-estimating rule). ``kappa`` is the alphabet size the player is
    told; it defaults to the largest arm alphabet. With ``beta=None`` the
    per-arm bound is minimized over ``beta_grid`` (any beta is valid).
    """
    key = str(theorem).lower().replace(" ", "")
    if key not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")
    if not alpha > 2.0:
        raise ValueError(f"alpha must exceed 2, got {alpha!r}")
    if t < 1:
        raise ValueError("t must be >= 1")
    arms = list(arms)
    if len(arms) < 2:
        raise ValueError("need at least two arms")
    if kappa is None:
        kappa = max(a.alphabet_size for a in arms)
    gaps = _gaps(arms)
    tail = (alpha - 1.0) / (alpha - 2.0)

    if key == "thm4":
        if len(arms) != 2:
            raise ValueError("thm4 is stated for two arms")
        qs = [_binary_q(a) for a in arms]
        if not all(0.4 <= q <= 0.5 for q in qs):
            raise ValueError("thm4 needs p(1) in [0.4, 0.5] (after folding)")
        worse = int(np.argmax(gaps))
        gap = float(gaps[worse])
        if gap <= 0.0:
            raise ValueError("thm4 needs distinct arm entropies")
        p2 = qs[worse]
        lt = alpha * math.log(t)
        return (784.0 * (0.5 - p2) ** 2 * lt / gap + 60.0 * lt
                + 8.0 * tail * gap)

    if key == "thm2":
        for a in arms:
            _binary_q(a)

    total = 0.0
    for arm, gap in zip(arms, gaps):
        gap = float(gap)
        if gap <= 0.0:
            continue
        if key == "thm1":
            term = _best_over_beta(
                lambda b: gamma_bias(alpha, b, kappa, gap, t) * gap, beta, beta_grid)
            total += term + 2.0 * tail * gap
        elif key == "thm2":
            q = _binary_q(arm)
            term = _best_over_beta(
                lambda b: gamma_ber(alpha, b, q, gap, t) * gap, beta, beta_grid)
            total += term + 16.0 * tail * gap
        elif key == "thm5":
            total += gamma_tv(alpha, arm.zeta, kappa, gap, t) * gap + 4.0 * tail * gap
        else:
            s = arm.support_size
            term = _best_over_beta(
                lambda b: gamma_se(alpha, b, s, kappa, gap, t, se_denominator) * gap,
                beta, beta_grid)
            total += term + 4.0 * tail * gap
    return total


def lai_robbins_constant(arms: Sequence[ArmInstance]) -> float:
    """``sum_i gap_i / KL(p_i(1) || p_best(1))`` over suboptimal binary arms."""
    arms = list(arms)
    if any(a.alphabet_size != 2 for a in arms):
        raise ValueError("Lai-Robbins constant is defined here for binary arms only")
    h = np.array([a.entropy_nats for a in arms])
    best = int(np.argmax(h))
    if np.count_nonzero(h == h[best]) > 1:
        raise ValueError("entropy maximizer must be unique")
    p_best = float(arms[best].pmf.probs[1])
    total = 0.0
    for i, arm in enumerate(arms):
        if i == best:
            continue
        d = kl_bernoulli(float(arm.pmf.probs[1]), p_best)
        total += (h[best] - h[i]) / d
    return total
