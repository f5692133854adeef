"""Monte Carlo experiment driver: seeds, parallel replications, CSV/JSON output
and confidence-coverage diagnostics.

Engine seeds come from :func:`engine_seed`, which feeds
``(master_seed, setup code, policy code, kappa, replication)`` to
``numpy.random.SeedSequence`` and keeps the first 64-bit word of its state.
SeedSequence hashing is stable across numpy versions and platforms.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import binomtest

from .dist import Pmf, entropy
from .engine import BanditRunConfig, checkpoint_schedule, run
from .setups import Setup, builtin_setup, custom_setup
from .ucd import (
    UcdKind,
    UcdPolicy,
    _ber_half_raw,
    _ber_raw,
    _bias_raw,
    _se_raw,
    _tv_raw,
    validity_threshold,
)

POLICY_CODES = {"bias": 1, "tv": 2, "se": 3}
PRESETS = {
    "desk": {"horizon": 200_000, "replications": 50},
    "paper": {"horizon": 1_500_000, "replications": 100},
}
RAW_COLUMNS = ("setup_id", "policy", "kappa", "replication", "t", "pseudo_regret_nats")
AGGREGATE_COLUMNS = ("setup_id", "policy", "kappa", "t", "mean_pseudo_regret_nats",
                     "stderr_nats", "replications")
SEED_MASK = (1 << 64) - 1


def fmt(x) -> str:
    """Locale-free number formatting used in every output file."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.9g" % x


def engine_seed(master_seed: int, setup_id, policy: str, kappa: int,
                replication: int) -> int:
    setup_code = 0 if setup_id == "custom" else int(setup_id)
    words = [int(master_seed) & SEED_MASK, setup_code, POLICY_CODES[policy],
             int(kappa), int(replication)]
    state = np.random.SeedSequence(words).generate_state(1, dtype=np.uint64)
    return int(state[0])


@dataclass
class ExperimentConfig:
    setup_id: int | str = 1
    policies: list[str] | None = None
    kappa_values: list[int] | None = None
    horizon: int = 1_500_000
    replications: int = 100
    alpha: float = 2.1
    master_seed: int = 0
    checkpoint_growth: float = 1.25
    output_path: str | None = None
    arms: list[list[float]] | None = None  # probabilities, for setup_id "custom"
    clamp_to_max_entropy: bool = False
    init_rounds_per_arm: int = 3

    def __post_init__(self):
        if self.setup_id != "custom":
            try:
                self.setup_id = int(self.setup_id)
            except (TypeError, ValueError):
                raise ValueError(f"setup_id must be 1..7 or 'custom', got {self.setup_id!r}") from None
            if not 1 <= self.setup_id <= 7:
                raise ValueError(f"setup_id must be 1..7 or 'custom', got {self.setup_id!r}")
        elif not self.arms:
            raise ValueError("a custom setup needs 'arms'")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.horizon < 6:
            raise ValueError("horizon must be >= 6")
        if not self.alpha > 2.0:
            raise ValueError("alpha must exceed 2")
        if not 0 <= int(self.master_seed) <= SEED_MASK:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if not self.checkpoint_growth > 1.0:
            raise ValueError("checkpoint_growth must exceed 1")
        if self.policies is not None:
            bad = [p for p in self.policies if p not in POLICY_CODES]
            if bad or not self.policies:
                raise ValueError(f"policies must be a nonempty subset of {sorted(POLICY_CODES)}")
            self.policies = list(dict.fromkeys(self.policies))
        if self.kappa_values is not None:
            if not self.kappa_values or any(int(k) < 2 for k in self.kappa_values):
                raise ValueError("kappa values must be integers >= 2")
            self.kappa_values = list(dict.fromkeys(int(k) for k in self.kappa_values))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def setup(self, replication: int = 0) -> Setup:
        if self.setup_id == "custom":
            return custom_setup(self.arms, self.kappa_values)
        return builtin_setup(self.setup_id, self.master_seed, replication)

    def resolved(self) -> tuple[list[str], list[int]]:
        base = self.setup()
        policies = self.policies or list(base.policies)
        kappas = self.kappa_values or list(base.kappa_values)
        return policies, kappas


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    n_arms: int
    raw_rows: list[tuple] = field(repr=False)
    aggregate_rows: list[tuple] = field(repr=False)

    @property
    def raw_header(self) -> tuple[str, ...]:
        return RAW_COLUMNS + tuple(f"pulls_arm_{i}" for i in range(self.n_arms))

    def raw_csv(self) -> str:
        return _to_csv(self.raw_header, self.raw_rows)

    def aggregate_csv(self) -> str:
        return _to_csv(AGGREGATE_COLUMNS, self.aggregate_rows)

    def raw_json(self) -> str:
        return _to_json(self.raw_header, self.raw_rows)

    def aggregate_json(self) -> str:
        return _to_json(AGGREGATE_COLUMNS, self.aggregate_rows)

    def final_regrets(self, policy: str, kappa: int) -> np.ndarray:
        """Pseudo-regret at the horizon, one value per replication."""
        return self.regrets_at(policy, kappa, self.config.horizon)

    def regrets_at(self, policy: str, kappa: int, t: int) -> np.ndarray:
        vals = [float(r[5]) for r in self.raw_rows
                if r[1] == policy and int(r[2]) == kappa and int(r[4]) == t]
        if not vals:
            raise KeyError(f"no rows for ({policy}, {kappa}, t={t})")
        return np.array(vals)

    def mean_at(self, policy: str, kappa: int, t: int) -> float:
        for r in self.aggregate_rows:
            if r[1] == policy and int(r[2]) == kappa and int(r[3]) == t:
                return float(r[4])
        raise KeyError(f"no aggregate row for ({policy}, {kappa}, t={t})")


def _to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _to_json(header, rows) -> str:
    records = []
    for row in rows:
        rec = {}
        for k, v in zip(header, row):
            if k in ("setup_id", "policy"):
                rec[k] = v
            else:
                rec[k] = int(v) if v.lstrip("-").isdigit() else float(v)
        records.append(rec)
    return json.dumps(records, indent=1) + "\n"


def _run_task(task):
    config, policy, kappa, rep = task
    setup = config.setup(rep)
    pol = UcdPolicy.from_name(policy, config.alpha, kappa, config.clamp_to_max_entropy)
    seed = engine_seed(config.master_seed, config.setup_id, policy, kappa, rep)
    run_cfg = BanditRunConfig(
        setup.arms, pol, config.horizon, seed=seed,
        init_rounds_per_arm=config.init_rounds_per_arm,
        checkpoints=checkpoint_schedule(config.horizon, config.checkpoint_growth),
    )
    trace = run(run_cfg)
    sid = str(config.setup_id)
    rows = []
    for t, pulls, r in zip(trace.t, trace.pulls, trace.pseudo_regret):
        rows.append((sid, policy, fmt(kappa), fmt(rep), fmt(t), fmt(float(r)))
                    + tuple(fmt(x) for x in pulls))
    return (policy, kappa, rep), rows


def aggregate(raw_rows: Sequence[tuple]) -> list[tuple]:
    """Mean and standard error over replications, from the formatted raw values."""
    groups: dict[tuple, list[float]] = {}
    for row in raw_rows:
        key = (row[0], row[1], int(row[2]), int(row[4]))
        groups.setdefault(key, []).append(float(row[5]))
    out = []
    for (sid, policy, kappa, t) in sorted(groups, key=lambda k: (k[1], k[2], k[3])):
        vals = np.array(groups[(sid, policy, kappa, t)])
        r = len(vals)
        mean = math.fsum(vals) / r
        stderr = float(np.std(vals, ddof=1) / math.sqrt(r)) if r > 1 else 0.0
        out.append((sid, policy, fmt(kappa), fmt(t), fmt(mean), fmt(stderr), fmt(r)))
    return out


def _validate_arms(config: ExperimentConfig, kappas) -> int:
    setup = config.setup()
    width = max(a.alphabet_size for a in setup.arms)
    small = [k for k in kappas if k < width]
    if small:
        raise ValueError(f"kappa {small} below the arm alphabet size {width}")
    if config.horizon < len(setup.arms) * config.init_rounds_per_arm:
        raise ValueError("horizon shorter than the warm start")
    return len(setup.arms)


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run every (policy, kappa, replication) and aggregate.

    Output is independent of ``workers``: results are sorted by
    (policy, kappa, replication, t) before anything is written.
    """
    policies, kappas = config.resolved()
    n_arms = _validate_arms(config, kappas)
    tasks = [(config, p, k, r) for p in policies for k in kappas
             for r in range(config.replications)]
    if workers <= 1:
        results = [_run_task(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=chunk))
    results.sort(key=lambda item: item[0])
    raw_rows = [row for _, rows in results for row in rows]
    result = ExperimentResult(config, n_arms, raw_rows, aggregate(raw_rows))
    if config.output_path:
        write_outputs(result, config.output_path)
    return result


def write_outputs(result: ExperimentResult, out_dir, fmt_name: str = "csv") -> list[str]:
    """Write ``raw.csv`` and ``aggregate.csv`` (plus JSON mirrors when asked)."""
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise ValueError(f"cannot create output directory {out_dir!r}: {exc}") from exc
    files = {"raw.csv": result.raw_csv(), "aggregate.csv": result.aggregate_csv()}
    if fmt_name == "json":
        files["raw.json"] = result.raw_json()
        files["aggregate.json"] = result.aggregate_json()
    written = []
    for name, text in files.items():
        path = os.path.join(out_dir, name)
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ValueError(f"cannot write {path!r}: {exc}") from exc
        written.append(path)
    return written


# -- coverage diagnostic -------------------------------------------------

_KIND_NAMES = {
    "bias": UcdKind.BIAS,
    "ber": UcdKind.BER,
    "ber_half": UcdKind.BER_HALF,
    "tv": UcdKind.TV,
    "se": UcdKind.SUPPORT_EST,
}


@dataclass(frozen=True)
class CoverageResult:
    kind: str
    n: int
    delta: float
    trials: int
    violations: int
    ci_low: float
    ci_high: float
    in_regime: bool

    @property
    def fraction(self) -> float:
        return self.violations / self.trials


def in_validity_regime(kind: UcdKind, pmf: Pmf, n: int, delta: float) -> bool:
    if n < validity_threshold(kind, delta):
        return False
    if kind is UcdKind.BER and not delta <= 0.5:
        return False
    if kind is UcdKind.BER_HALF:
        if pmf.alphabet_size != 2 or not delta <= 0.5:
            return False
        p1 = float(pmf.probs[1])
        return 0.4 <= min(p1, 1.0 - p1) <= 0.5
    if kind is UcdKind.TV:
        return delta <= 0.2
    return True


def coverage_diagnostic(kind, pmf: Pmf, n: int, delta: float, trials: int,
                        seed: int = 0, alphabet_size: int | None = None,
                        kappa: float | None = None, require_regime: bool = False,
                        confidence: float = 0.95) -> CoverageResult:
    """Fraction of ``trials`` samples of size ``n`` for which the plug-in entropy
    misses the true entropy by more than the UCD.

    ``alphabet_size`` (bias and tv rules) and ``kappa`` (support-estimating
    rule) default to the pmf's alphabet size. The binomial interval is
    Clopper-Pearson.
    """
    kind = _KIND_NAMES[kind] if isinstance(kind, str) else UcdKind(kind)
    if kind is UcdKind.BER_MIN:
        raise ValueError("coverage is defined per rule; pick ber or ber_half")
    if kind in (UcdKind.BER, UcdKind.BER_HALF) and pmf.alphabet_size != 2:
        raise ValueError(f"{kind.name.lower()} needs a binary pmf")
    if n < 2 or trials < 1:
        raise ValueError("need n >= 2 and trials >= 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    size = alphabet_size or pmf.alphabet_size
    kap = kappa or pmf.alphabet_size
    regime = in_validity_regime(kind, pmf, n, delta)
    if require_regime and not regime:
        raise ValueError(f"n={n}, delta={delta} is outside the validity regime of {kind.name}")

    h_true = entropy(pmf)
    probs = np.asarray(pmf.probs)
    rng = np.random.default_rng(seed)
    batch = max(1, 2_000_000 // probs.size)
    violations = 0
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        counts = rng.multinomial(n, probs, size=m)
        p_hat = counts / n
        with np.errstate(divide="ignore", invalid="ignore"):
            h_hat = -np.where(counts > 0, p_hat * np.log(p_hat), 0.0).sum(axis=1)
        if kind is UcdKind.BIAS:
            ucd = np.full(m, _bias_raw(delta, n, size))
        elif kind is UcdKind.BER:
            q = np.minimum(counts[:, 1], n - counts[:, 1]) / n
            ucd = np.array([_ber_raw(x, delta, n) for x in q])
        elif kind is UcdKind.BER_HALF:
            q = np.minimum(counts[:, 1], n - counts[:, 1]) / n
            ucd = np.array([_ber_half_raw(x, delta, n) for x in q])
        elif kind is UcdKind.TV:
            z = np.maximum(0.0, 1.0 - (counts.astype(np.float64) ** 2).sum(axis=1) / (n * n))
            ucd = np.array([_tv_raw(x, size, delta, n) for x in z])
        else:
            s_hat = np.count_nonzero(counts, axis=1)
            ucd = np.array([_se_raw(s, delta, n, kap) for s in s_hat])
        violations += int(np.count_nonzero(np.abs(h_hat - h_true) > ucd))
        done += m
    ci = binomtest(violations, trials).proportion_ci(confidence, method="exact")
    return CoverageResult(kind.name.lower(), n, delta, trials, violations,
                          float(ci.low), float(ci.high), regime)
