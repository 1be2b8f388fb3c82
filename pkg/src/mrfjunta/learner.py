"""Relevant-variable selection by neighborhood-conditioned correlation, and ERM over it."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .junta import Junta, _table_index, junta_to_dict
from .mrf import DependencyGraph
from .polynomial import cube
from .sampling import Restriction, SampleSet, restrictions_on

log = logging.getLogger(__name__)


class ThresholdTooLowError(RuntimeError):
    """Selected more relevant variables than the configured cap allows."""


@dataclass(frozen=True)
class StatisticRecord:
    i: int
    rho: Restriction
    value: float
    support_count: int

    def to_dict(self) -> dict:
        return {"i": self.i, "rho": str(self.rho), "value": self.value, "support_count": self.support_count}


@dataclass(frozen=True)
class LearnerConfig:
    tau: float
    delta: float = 0.1
    k_bound: Optional[int] = None
    default_label: int = 0

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")

    @property
    def rel_cap(self) -> Optional[int]:
        return None if self.k_bound is None else 2 * self.k_bound


def _check_rho(i: int, rho: Restriction, graph: Optional[DependencyGraph]) -> None:
    if i in rho.support:
        raise ValueError(f"pivot {i} lies inside the restriction support")
    if graph is not None and set(rho.support) != set(graph.neighbors(i)):
        raise ValueError(f"support {rho.support} differs from the neighborhood {graph.neighbors(i)} of {i}")


def _covariance(xi: np.ndarray, y: np.ndarray) -> float:
    m = xi.shape[0]
    if m == 0:
        return 0.0
    exy = np.count_nonzero(xi & y) / m
    return abs(exy - (np.count_nonzero(y) / m) * (np.count_nonzero(xi) / m))


def empirical_statistic(
    samples: SampleSet, i: int, rho: Restriction, graph: Optional[DependencyGraph] = None
) -> StatisticRecord:
    """|E[y x_i] - E[y] E[x_i]| over the examples agreeing with ``rho``.

    An empty subsample yields 0. When ``graph`` is given the support of
    ``rho`` must equal the neighborhood of ``i``.
    """
    _check_rho(i, rho, graph)
    mask = rho.mask(samples.x)
    xi = samples.x[mask, i]
    y = samples.y[mask]
    return StatisticRecord(i, rho, _covariance(xi, y), int(xi.shape[0]))


def relevance_scan(samples: SampleSet, graph: DependencyGraph) -> list[StatisticRecord]:
    """Statistics for every vertex and every assignment of its neighborhood."""
    if graph.n != samples.n:
        raise ValueError("graph and samples disagree on n")
    return [
        empirical_statistic(samples, i, rho)
        for i in range(samples.n)
        for rho in restrictions_on(samples.n, graph.neighbors(i))
    ]


def select_relevant(records: Sequence[StatisticRecord], tau: float) -> tuple[int, ...]:
    # strict: a statistic exactly at tau does not select
    return tuple(sorted({r.i for r in records if r.value > tau}))


def find_relevant_variables(samples: SampleSet, graph: DependencyGraph, tau: float) -> tuple[int, ...]:
    if not tau > 0:
        raise ValueError("tau must be positive")
    return select_relevant(relevance_scan(samples, graph), tau)


@dataclass
class ErmResult:
    hypothesis: Junta
    unseen: int
    inconsistent: int


def erm_truth_table(samples: SampleSet, rel: Sequence[int], default_label: int = 0) -> ErmResult:
    """Majority label per assignment of ``rel``; ties and unseen rows get ``default_label``."""
    rel = tuple(rel)
    rows = _table_index(samples.x, rel)
    size = 1 << len(rel)
    ones = np.bincount(rows, weights=samples.y.astype(np.float64), minlength=size)
    total = np.bincount(rows, minlength=size).astype(np.float64)
    zeros = total - ones
    table = np.where(ones > zeros, 1, np.where(zeros > ones, 0, default_label)).astype(np.uint8)
    unseen = int(np.count_nonzero(total == 0))
    inconsistent = int(np.count_nonzero((ones > 0) & (zeros > 0)))
    return ErmResult(Junta(samples.n, rel, table), unseen, inconsistent)


def learn_junta(
    samples: SampleSet,
    graph: DependencyGraph,
    tau: float,
    default_label: int = 0,
    rel_cap: Optional[int] = None,
) -> Junta:
    return learn_with_report(samples, graph, LearnerConfig(tau, default_label=default_label), rel_cap=rel_cap).hypothesis


@dataclass
class LearnerReport:
    tau: float
    rel: tuple[int, ...]
    hypothesis: Junta
    records: list[StatisticRecord]
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "records": [r.to_dict() for r in self.records if r.value > self.tau / 2],
            "rel": list(self.rel),
            "hypothesis": junta_to_dict(self.hypothesis),
            "diagnostics": list(self.diagnostics),
        }


def learn_with_report(
    samples: SampleSet, graph: DependencyGraph, config: LearnerConfig, rel_cap: Optional[int] = None
) -> LearnerReport:
    records = relevance_scan(samples, graph)
    rel = select_relevant(records, config.tau)
    diagnostics = []
    empty = sum(1 for r in records if r.support_count == 0)
    if empty:
        diagnostics.append(f"{empty} restriction(s) with no matching examples")
    cap = config.rel_cap if rel_cap is None else rel_cap
    if cap is not None and len(rel) > cap:
        raise ThresholdTooLowError(f"selected {len(rel)} variables, cap is {cap}; threshold {config.tau:g} is too low")
    erm = erm_truth_table(samples, rel, config.default_label)
    if erm.unseen:
        diagnostics.append(f"{erm.unseen} assignment(s) of the relevant set never observed")
    if erm.inconsistent:
        diagnostics.append(f"{erm.inconsistent} assignment(s) with conflicting labels")
    for d in diagnostics:
        log.warning(d)
    return LearnerReport(config.tau, rel, erm.hypothesis, records, diagnostics)


def default_threshold(delta: float, k: int, d: int, sigma: float, lam: float) -> float:
    """tau with 2 tau = (delta / (k 2^d))^2 (sigma e^-lambda / 16)^(k+2)."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    if k < 1 or d < 0:
        raise ValueError("need k >= 1 and d >= 0")
    if not sigma > 0 or lam < 0:
        raise ValueError("need sigma > 0 and lambda >= 0")
    return 0.5 * (delta / (k * 2**d)) ** 2 * (sigma * math.exp(-lam) / 16) ** (k + 2)


def baseline_product_statistic(samples: SampleSet, i: int) -> float:
    """Unconditional |E[y x_i] - E[y] E[x_i]|."""
    if not 0 <= i < samples.n:
        raise IndexError(f"index {i} outside [0, {samples.n})")
    return _covariance(samples.x[:, i], samples.y)


def disagreement(hypothesis: Junta, target: Junta, probabilities: Optional[np.ndarray] = None) -> float:
    """Probability mass of the cube where the two functions differ (uniform if no weights)."""
    diff = hypothesis.evaluate(cube(target.n)) != target.cube_values()
    if probabilities is None:
        return float(diff.mean())
    return float(np.asarray(probabilities) @ diff)
