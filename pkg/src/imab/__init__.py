"""Entropy-reward (informational) multi-armed bandits."""

__version__ = "0.1.0"

from .dist import (
    ArmInstance,
    Pmf,
    binary_entropy,
    entropy,
    kl_bernoulli,
    make_spiked_pmf,
    sample,
    tv_distance,
    zeta,
)
from .estimators import ArmStats, empirical_pmf, plugin_entropy, support_hat, support_upper, zeta_hat
from .ucd import UcdKind, UcdPolicy, delta_schedule
from .engine import BanditRunConfig, RegretTrace, pseudo_regret, run
from .bounds import lai_robbins_constant, regret_bound
from .setups import builtin_setup
from .harness import ExperimentConfig, coverage_diagnostic, run_experiment
