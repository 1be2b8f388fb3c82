"""Seeded end-to-end recovery experiments with CSV output."""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

from .instances import random_model
from .junta import Junta, label_samples, random_junta
from .learner import (
    LearnerConfig,
    ThresholdTooLowError,
    default_threshold,
    disagreement,
    learn_with_report,
)
from .mrf import MrfModel, derive_seed
from .oracle import calibrated_threshold
from .sampling import (
    ENUMERATION_CAP,
    GibbsConfig,
    enumerate_distribution,
    gibbs_sample,
    sample_exact,
)

CSV_COLUMNS = (
    "trial", "seed", "n", "k", "d", "sigma", "lambda", "N", "threshold",
    "recovered_exact", "rel_superset", "rel_size", "test_error", "runtime_ms",
)
HELDOUT_SIZE = 100_000
THRESHOLD_MODES = ("theoretical", "explicit", "calibrated")
SAMPLERS = ("exact", "gibbs")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    k: int
    d: int
    sigma: float
    lam: float
    N: int
    trials: int = 1
    seed: int = 0
    threshold_mode: str = "theoretical"
    tau: Optional[float] = None
    sampler: str = "exact"
    delta: float = 0.1
    gibbs_chains: int = 4

    def __post_init__(self):
        problems = []
        if not 1 <= self.k <= self.n:
            problems.append("need 1 <= k <= n")
        if not 0 <= self.d <= self.n - 1:
            problems.append("need 0 <= d <= n - 1")
        if not 0 < self.sigma < 0.5:
            problems.append("sigma must lie in (0, 1/2)")
        if self.lam < 0:
            problems.append("lambda must be non-negative")
        if self.N < 1 or self.trials < 1:
            problems.append("N and trials must be positive")
        if self.threshold_mode not in THRESHOLD_MODES:
            problems.append(f"threshold_mode must be one of {THRESHOLD_MODES}")
        if self.threshold_mode == "explicit" and not (self.tau and self.tau > 0):
            problems.append("explicit threshold mode needs tau > 0")
        if self.sampler not in SAMPLERS:
            problems.append(f"sampler must be one of {SAMPLERS}")
        if self.sampler == "exact" and self.n > ENUMERATION_CAP:
            problems.append(f"exact sampler needs n <= {ENUMERATION_CAP}")
        if self.threshold_mode == "calibrated" and self.n > ENUMERATION_CAP:
            problems.append(f"calibrated threshold needs n <= {ENUMERATION_CAP}")
        if problems:
            raise ValueError("; ".join(problems))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")
        return cls(**data)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["lambda"] = out.pop("lam")
        return out


@dataclass
class TrialResult:
    trial: int
    seed: int
    threshold: float
    recovered_exact: bool
    rel_superset: bool
    rel_size: int
    test_error: float
    runtime_ms: int
    diagnostics: list[str] = field(default_factory=list)


def generate_instance(config: ExperimentConfig, seed: int) -> tuple[MrfModel, Junta]:
    """Random degree-bounded smoothed MRF and a random k-junta on it."""
    model = random_model(config.n, config.d, config.lam, config.sigma, derive_seed(seed, 0))
    return model, random_junta(config.n, config.k, derive_seed(seed, 1))


def choose_threshold(config: ExperimentConfig, model: MrfModel, f: Junta, exact=None) -> float:
    if config.threshold_mode == "explicit":
        return float(config.tau)
    if config.threshold_mode == "theoretical":
        return float(default_threshold(config.delta, config.k, config.d, config.sigma, config.lam))
    dist = exact if exact is not None else enumerate_distribution(model)
    return float(calibrated_threshold(dist, f, model.graph))


def run_trial(config: ExperimentConfig, trial: int, model=None, junta=None) -> TrialResult:
    seed = derive_seed(config.seed, trial)
    start = time.perf_counter()
    diagnostics: list[str] = []
    if model is None:
        model, junta = generate_instance(config, seed)
    dist = enumerate_distribution(model) if model.n <= ENUMERATION_CAP else None
    tau = float("nan")
    try:
        tau = choose_threshold(config, model, junta, dist)
        if config.sampler == "exact":
            samples = sample_exact(dist, config.N, derive_seed(seed, 2))
        else:
            gcfg = GibbsConfig.default(model.n, config.gibbs_chains)
            samples = gibbs_sample(model, config.N, gcfg, derive_seed(seed, 2))
        samples = label_samples(junta, samples)
        report = learn_with_report(samples, model.graph, LearnerConfig(tau, config.delta, config.k))
        diagnostics.extend(report.diagnostics)
        rel = set(report.rel)
        truth = set(junta.relevant)
        if dist is not None:
            err = disagreement(report.hypothesis, junta, dist.probabilities)
        else:
            gcfg = GibbsConfig.default(model.n, config.gibbs_chains)
            held = gibbs_sample(model, HELDOUT_SIZE, gcfg, derive_seed(seed, 3))
            err = float((report.hypothesis.evaluate(held.x) != junta.evaluate(held.x)).mean())
        result = (rel == truth, rel >= truth, len(rel), err)
    except (ThresholdTooLowError, ValueError) as exc:
        diagnostics.append(f"trial failed: {exc}")
        result = (False, False, 0, float("nan"))
    runtime = int(round((time.perf_counter() - start) * 1000))
    return TrialResult(trial, seed, tau, *result, runtime_ms=runtime, diagnostics=diagnostics)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trials: list[TrialResult]

    @property
    def recovery_rate(self) -> float:
        return sum(t.recovered_exact for t in self.trials) / len(self.trials)

    @property
    def mean_test_error(self) -> float:
        errs = [t.test_error for t in self.trials if not math.isnan(t.test_error)]
        return sum(errs) / len(errs) if errs else float("nan")

    def summary(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "trials": len(self.trials),
            "recovery_rate": self.recovery_rate,
            "mean_test_error": self.mean_test_error,
            "failed_trials": sum(1 for t in self.trials if any(d.startswith("trial failed") for d in t.diagnostics)),
        }

    def to_csv(self, timing: bool = False) -> str:
        """One row per trial. ``runtime_ms`` is written as 0 unless ``timing``,
        which keeps repeated runs byte-identical."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        c = self.config
        for t in self.trials:
            w.writerow([
                t.trial, t.seed, c.n, c.k, c.d, repr(c.sigma), repr(c.lam), c.N, repr(t.threshold),
                int(t.recovered_exact), int(t.rel_superset), t.rel_size, repr(t.test_error),
                t.runtime_ms if timing else 0,
            ])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {"summary": self.summary(), "trials": [asdict(t) for t in self.trials]}, indent=2, default=str
        )


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    return ExperimentResult(config, [run_trial(config, t) for t in range(config.trials)])
