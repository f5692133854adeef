"""Built-in experiment setups.

Setups 1-3 pair two Bernoulli arms, setups 4-6 pair two ternary arms of the
form ``(a, a, 1 - 2a)``, and setup 7 pairs two random 10^4-symbol pmfs that
put almost all mass on the last symbol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import ArmInstance, Pmf, make_spiked_pmf

BINARY_KAPPAS = (2, 10, 1000, 100000)
TERNARY_KAPPAS = (3, 10, 1000, 100000)
SPIKED_SIZE = 10_000
SPIKED_TAILS = (5e-3, 1e-4)
# stream tag separating setup-7 pmf draws from engine seeds
PMF_STREAM_TAG = 0x706D66

_BINARY = {1: (0.25, 0.01), 2: (0.1, 0.01), 3: (0.3, 0.15)}
_TERNARY = {4: (0.125, 0.005), 5: (0.05, 0.005), 6: (0.15, 0.075)}

SETUP_IDS = (1, 2, 3, 4, 5, 6, 7)


@dataclass(frozen=True)
class Setup:
    setup_id: int | str
    arms: tuple[ArmInstance, ...]
    kappa_values: tuple[int, ...]
    policies: tuple[str, ...]
    description: str

    @property
    def n_arms(self) -> int:
        return len(self.arms)


def ternary_pmf(a: float) -> Pmf:
    return Pmf([a, a, 1.0 - 2.0 * a])


def spiked_arms(master_seed: int, replication: int = 0) -> tuple[ArmInstance, ...]:
    """Setup-7 arms; a deterministic function of ``(master_seed, replication)``."""
    ss = np.random.SeedSequence([int(master_seed), 7, PMF_STREAM_TAG, int(replication)])
    rng = np.random.default_rng(ss)
    return tuple(ArmInstance(make_spiked_pmf(SPIKED_SIZE, m, rng)) for m in SPIKED_TAILS)


def builtin_setup(setup_id: int, master_seed: int = 0, replication: int = 0) -> Setup:
    """Arms, default kappa values and default policies of a numbered setup.

    ``master_seed`` and ``replication`` matter only for setup 7, whose pmfs
    are redrawn for every replication.
    """
    try:
        setup_id = int(setup_id)
    except (TypeError, ValueError):
        raise ValueError(f"unknown setup {setup_id!r}; expected 1..7") from None
    if setup_id in _BINARY:
        p1, p2 = _BINARY[setup_id]
        arms = (ArmInstance(Pmf.bernoulli(p1)), ArmInstance(Pmf.bernoulli(p2)))
        return Setup(setup_id, arms, BINARY_KAPPAS, ("bias", "tv", "se"),
                     f"Bernoulli({p1}) vs Bernoulli({p2})")
    if setup_id in _TERNARY:
        a1, a2 = _TERNARY[setup_id]
        arms = (ArmInstance(ternary_pmf(a1)), ArmInstance(ternary_pmf(a2)))
        return Setup(setup_id, arms, TERNARY_KAPPAS, ("bias", "tv", "se"),
                     f"ternary ({a1}, {a1}, {1 - 2 * a1:g}) vs ({a2}, {a2}, {1 - 2 * a2:g})")
    if setup_id == 7:
        return Setup(7, spiked_arms(master_seed, replication), (SPIKED_SIZE,), ("tv",),
                     f"{SPIKED_SIZE}-symbol spiked pmfs, tail masses "
                     f"{SPIKED_TAILS[0]:g} and {SPIKED_TAILS[1]:g}")
    raise ValueError(f"unknown setup {setup_id!r}; expected 1..7")


def custom_setup(arm_probs, kappa_values=None, policies=("bias", "tv", "se")) -> Setup:
    arms = tuple(ArmInstance(Pmf(p)) for p in arm_probs)
    if len(arms) < 2:
        raise ValueError("a custom setup needs at least two arms")
    if kappa_values is None:
        kappa_values = (max(2, max(a.alphabet_size for a in arms)),)
    return Setup("custom", arms, tuple(int(k) for k in kappa_values),
                 tuple(policies), f"custom ({len(arms)} arms)")
