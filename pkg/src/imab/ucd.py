"""Upper-confidence-deviation (UCD) functions and their confidence schedules.

Each ``_*_raw`` function holds one formula and uses only :mod:`math`, so the
engine can JIT-compile the very same source. The public wrappers validate
arguments first.

Below a rule's validity regime (see :func:`validity_threshold`) the formulas
are still evaluated. Individual terms whose logarithm goes negative at tiny
``n`` are clamped at zero, which keeps every UCD nonnegative.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from numba.extending import register_jitable

from .estimators import ArmStats, plugin_entropy, support_hat, zeta_hat, _support_upper_raw


class UcdKind(enum.IntEnum):
    BIAS = 0
    BER = 1
    BER_HALF = 2
    BER_MIN = 3
    TV = 4
    SUPPORT_EST = 5


# multiplier c in delta = min(c * t^-alpha, 1)
_SCHEDULE_CONST = {
    UcdKind.BIAS: 1.0,
    UcdKind.BER: 6.0,
    UcdKind.BER_HALF: 4.0,
    UcdKind.TV: 1.0,
    UcdKind.SUPPORT_EST: 1.0,
}


def delta_schedule(kind: UcdKind, alpha: float, t: int) -> float:
    """Confidence level used at round ``t``, capped at 1."""
    if t < 1:
        raise ValueError("t must be >= 1")
    kind = UcdKind(kind)
    if kind is UcdKind.BER_MIN:
        raise ValueError(
            "BER_MIN combines two schedules; ask for BER and BER_HALF separately"
        )
    return _schedule_raw(_SCHEDULE_CONST[kind], alpha, t)


@register_jitable
def _schedule_raw(const: float, alpha: float, t: float) -> float:
    return min(const * t ** (-alpha), 1.0)


# -- raw formulas ----------------------------------------------------------

@register_jitable
def _deviation_raw(delta: float, n: float) -> float:
    ln = math.log(n)
    return math.sqrt(2.0 * ln * ln * math.log(2.0 / delta) / n)


@register_jitable
def _bias_raw(delta: float, n: float, alphabet_size: float) -> float:
    return math.log1p((alphabet_size - 1.0) / n) + _deviation_raw(delta, n)


@register_jitable
def _ber_raw(q: float, delta: float, n: float) -> float:
    lg = math.log(6.0 / delta)
    first = 0.0
    if q > 0.0:
        first = math.sqrt(12.0 * q * lg / n) * math.log(n / (q * lg))
        if first < 0.0:
            first = 0.0
    return first + 18.0 * lg * math.log(n) / n


@register_jitable
def _ber_half_raw(q: float, delta: float, n: float) -> float:
    lg = math.log(4.0 / delta)
    return 7.0 * abs(0.5 - q) * math.sqrt(lg / n) + 9.0 * lg / n


@register_jitable
def _binary_min_raw(q: float, alpha: float, t: float, n: float) -> float:
    a = _ber_raw(q, _schedule_raw(6.0, alpha, t), n)
    b = _ber_half_raw(q, _schedule_raw(4.0, alpha, t), n)
    return a if a < b else b


@register_jitable
def _tv_terms_raw(z: float, size: float, delta: float, n: float):
    lg = math.log(2.0 / delta)
    first = 0.0
    if z > 0.0:
        first = 3.0 * math.sqrt(z * size / n) * math.log(n * size / (36.0 * z))
        if first < 0.0:
            first = 0.0
    second = 1.5 * math.sqrt(lg / n) * math.log(n * size * size / 9.0)
    if second < 0.0:
        second = 0.0
    third = (2.0 * math.sqrt(size) * lg ** 0.25 * math.log(n * size ** (2.0 / 3.0))
             / n ** 0.75)
    if third < 0.0:
        third = 0.0
    return first, second, third


@register_jitable
def _tv_raw(z: float, size: float, delta: float, n: float) -> float:
    a, b, c = _tv_terms_raw(z, size, delta, n)
    return a + b + c


@register_jitable
def _se_bias_raw(s_hat: float, delta: float, n: float, kappa: float) -> float:
    upper = _support_upper_raw(s_hat, delta, n, kappa)
    return math.log1p((upper - 1.0) / n)


@register_jitable
def _se_raw(s_hat: float, delta: float, n: float, kappa: float) -> float:
    return _se_bias_raw(s_hat, delta, n, kappa) + _deviation_raw(delta, n)


# -- validated wrappers ----------------------------------------------------

def _check_open_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")


def _check_half_open_delta(delta: float) -> None:
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta!r}")


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")


def _check_unit(name: str, x: float) -> None:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")


def ucd_bias(delta: float, n: int, alphabet_size: int) -> float:
    """Bias bound plus a McDiarmid deviation term; needs no data beyond ``n``."""
    _check_open_delta(delta)
    _check_n(n)
    if alphabet_size < 1:
        raise ValueError("alphabet_size must be positive")
    return _bias_raw(delta, n, alphabet_size)


def ucd_ber(q_hat: float, delta: float, n: int) -> float:
    """Data-dependent deviation for binary arms; tight when ``q_hat`` is small.

    The ``q_hat -> 0`` limit of the first term is 0.
    """
    _check_unit("q_hat", q_hat)
    _check_half_open_delta(delta)
    _check_n(n)
    return _ber_raw(q_hat, delta, n)


def ucd_ber_half(q_hat: float, delta: float, n: int) -> float:
    """Deviation for binary arms near p = 1/2, where binary entropy is flat."""
    _check_unit("q_hat", q_hat)
    _check_half_open_delta(delta)
    _check_n(n)
    return _ber_half_raw(q_hat, delta, n)


def ucd_binary_min(q_hat: float, alpha: float, t: int, n: int) -> float:
    """Pointwise minimum of the two binary rules, each on its own schedule
    (``6 t^-alpha`` and ``4 t^-alpha``)."""
    _check_unit("q_hat", q_hat)
    _check_n(n)
    if t < 1:
        raise ValueError("t must be >= 1")
    return _binary_min_raw(q_hat, alpha, t, n)


def ucd_tv(zeta_hat: float, alphabet_size: int, delta: float, n: int) -> float:
    _check_unit("zeta_hat", zeta_hat)
    _check_half_open_delta(delta)
    _check_n(n)
    if alphabet_size < 1:
        raise ValueError("alphabet_size must be positive")
    return _tv_raw(zeta_hat, alphabet_size, delta, n)


def ucd_se(stats: ArmStats, delta: float, n: int, kappa: float) -> float:
    """Bias-corrected deviation with the alphabet size replaced by an upper
    confidence bound on the support size estimated from ``stats``."""
    _check_open_delta(delta)
    _check_n(n)
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    return _se_raw(support_hat(stats), delta, n, kappa)


def se_bias(stats: ArmStats, delta: float, n: int, kappa: float) -> float:
    _check_open_delta(delta)
    _check_n(n)
    return _se_bias_raw(support_hat(stats), delta, n, kappa)


def minority_fraction(stats: ArmStats) -> float:
    """Empirical probability of symbol 1 folded into [0, 1/2]."""
    c = stats.count(1)
    return min(c, stats.n - c) / stats.n


def validity_threshold(kind: UcdKind, delta: float) -> float:
    """Smallest ``n`` for which the matching coverage guarantee is proven."""
    kind = UcdKind(kind)
    if kind in (UcdKind.BIAS, UcdKind.SUPPORT_EST):
        return 2.0
    if kind is UcdKind.BER:
        return 200.0 * math.log(4.0 / delta)
    if kind is UcdKind.BER_HALF:
        return 60.0 * math.log(4.0 / delta)
    if kind is UcdKind.TV:
        return 112.0 * math.log(2.0 / delta)
    raise ValueError(f"no single validity threshold for {kind.name}")


_POLICY_KINDS = (UcdKind.BIAS, UcdKind.BER_MIN, UcdKind.TV, UcdKind.SUPPORT_EST)


@dataclass(frozen=True)
class UcdPolicy:
    """Which deviation rule the player uses, and with what parameters.

    ``kappa`` is the alphabet size (or support bound) the player is told; it
    applies to every arm.
    """

    kind: UcdKind
    alpha: float = 2.1
    kappa: int = 2
    clamp_to_max_entropy: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", UcdKind(self.kind))
        if self.kind not in _POLICY_KINDS:
            raise ValueError(f"{self.kind.name} is not a playable policy")
        if not self.alpha > 2.0:
            raise ValueError(f"alpha must exceed 2, got {self.alpha!r}")
        if self.kappa < 2:
            raise ValueError(f"kappa must be >= 2, got {self.kappa!r}")

    @classmethod
    def from_name(cls, name: str, alpha: float, kappa: int,
                  clamp_to_max_entropy: bool = False) -> "UcdPolicy":
        """Map a CLI policy name to a rule: ``tv`` means the binary min-rule
        when ``kappa == 2`` and the general rule otherwise."""
        name = name.lower()
        if name == "bias":
            kind = UcdKind.BIAS
        elif name == "se":
            kind = UcdKind.SUPPORT_EST
        elif name == "tv":
            kind = UcdKind.BER_MIN if kappa == 2 else UcdKind.TV
        else:
            raise ValueError(f"unknown policy {name!r}; expected bias, tv or se")
        return cls(kind, alpha, kappa, clamp_to_max_entropy)

    def ucd(self, stats: ArmStats, t: int) -> float:
        n = stats.n
        if self.kind is UcdKind.BIAS:
            return _bias_raw(_schedule_raw(1.0, self.alpha, t), n, self.kappa)
        if self.kind is UcdKind.BER_MIN:
            return _binary_min_raw(minority_fraction(stats), self.alpha, t, n)
        if self.kind is UcdKind.TV:
            return _tv_raw(zeta_hat(stats), self.kappa,
                           _schedule_raw(1.0, self.alpha, t), n)
        return _se_raw(support_hat(stats), _schedule_raw(1.0, self.alpha, t),
                       n, self.kappa)

    def index(self, stats: ArmStats, t: int) -> float:
        """Optimistic entropy estimate used to rank arms at round ``t``."""
        value = plugin_entropy(stats) + self.ucd(stats, t)
        if self.clamp_to_max_entropy:
            value = min(value, math.log(self.kappa))
        return value
