"""Brute-force ground truth for the statistics and bounds the learner relies on.

Everything here works on fully enumerated distributions, so it is limited to
the enumeration cap. The functions compute each quantity directly from the
probability table and never call into the learner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.special import expit, logsumexp

from .junta import Junta, decompose
from .mrf import DependencyGraph, MrfModel, SmoothingVector, rng_for
from .polynomial import MultilinearPolynomial, cube
from .sampling import (
    ExactDistribution,
    Restriction,
    distribution_from_polynomial,
    enumerate_distribution,
    restrictions_on,
)


def _conditional(dist: ExactDistribution, rho: Restriction) -> np.ndarray:
    mask = rho.mask(dist.bits)
    mass = dist.probabilities[mask].sum()
    if not mass > 0:
        raise ValueError(f"restriction {rho} has zero probability")
    return np.where(mask, dist.probabilities, 0.0) / mass


def _check_support(i: int, rho: Restriction, graph: Optional[DependencyGraph]) -> None:
    if i in rho.support:
        raise ValueError(f"pivot {i} lies inside the restriction support")
    if graph is not None and set(rho.support) != set(graph.neighbors(i)):
        raise ValueError(f"support {rho.support} differs from the neighborhood of {i}")


def exact_statistic(
    dist: ExactDistribution, f: Junta, i: int, rho: Restriction, graph: Optional[DependencyGraph] = None
) -> float:
    """Population |E[y x_i] - E[y] E[x_i]| under the distribution conditioned on ``rho``."""
    _check_support(i, rho, graph)
    p = _conditional(dist, rho)
    y = f.cube_values().astype(np.float64)
    xi = dist.bits[:, i].astype(np.float64)
    return float(abs(p @ (y * xi) - (p @ y) * (p @ xi)))


def exact_baseline_statistic(dist: ExactDistribution, f: Junta, i: int) -> float:
    return exact_statistic(dist, f, i, Restriction.free(dist.n))


@dataclass(frozen=True)
class FactorizationResiduals:
    factorization: float
    independence: float

    @property
    def worst(self) -> float:
        return max(self.factorization, self.independence)


def verify_eq3(
    dist: ExactDistribution, f: Junta, i: int, rho: Restriction, graph: Optional[DependencyGraph] = None
) -> FactorizationResiduals:
    """Residuals of the covariance factorization and of x_i being independent of h_i.

    The factorization compares the statistic with
    |E[x_i](1 - E[x_i])| * |E[g_i]|, all under the conditioned table. Without
    a graph the restriction is not checked against the neighborhood, which is
    how under-conditioned negative controls are run.
    """
    _check_support(i, rho, graph)
    p = _conditional(dist, rho)
    bits = dist.bits
    dec = decompose(f, i)
    g = dec.g_values(bits).astype(np.float64)
    h = dec.h_values(bits).astype(np.float64)
    xi = bits[:, i].astype(np.float64)
    ex = p @ xi
    lhs = exact_statistic(dist, f, i, rho)
    rhs = abs(ex * (1 - ex)) * abs(p @ g)
    if ex > 0:
        h_given_1 = (p * xi) @ h / ex
    else:
        h_given_1 = p @ h
    return FactorizationResiduals(float(abs(lhs - rhs)), float(abs(h_given_1 - p @ h)))


@dataclass(frozen=True)
class DerivedModel:
    """The base MRF with the external field removed on the far relevant coordinates.

    ``far`` holds the relevant coordinates other than the pivot that lie
    outside its neighborhood; ``psi_far_free`` is psi minus their smoothing
    terms, so its distribution does not depend on how they were perturbed.
    """

    base: MrfModel
    junta: Junta
    i: int
    far: tuple[int, ...]
    joint: tuple[int, ...]
    psi_far_free: MultilinearPolynomial
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @cached_property
    def dist(self) -> ExactDistribution:
        return enumerate_distribution(self.base)

    @cached_property
    def dist_far_free(self) -> ExactDistribution:
        return distribution_from_polynomial(self.psi_far_free)

    def far_marginal(self, dist: ExactDistribution, rho: Restriction) -> np.ndarray:
        """Pr[x_far = z | rho] for z in cube order over ``far``."""
        p = _conditional(dist, rho)
        k = len(self.far)
        if k == 0:
            return np.array([1.0])
        weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
        idx = dist.bits[:, list(self.far)].astype(np.int64) @ weights
        return np.bincount(idx, weights=p, minlength=1 << k)

    def restricted_g(self, rho: Restriction) -> np.ndarray:
        """g_i with the neighborhood fixed by ``rho``, tabulated over ``far``."""
        zs = cube(len(self.far))
        x = np.zeros((zs.shape[0], self.base.n), dtype=np.uint8)
        for j, b in zip(rho.support, rho.values):
            x[:, j] = b
        x[:, list(self.far)] = zs
        return decompose(self.junta, self.i).g_values(x).astype(np.float64)

    def ratio_parts(self, rho: Restriction) -> tuple[np.ndarray, np.ndarray, float]:
        """Far marginals under both models and log of the shared factor, cached per ``rho``."""
        key = rho.pattern
        if key not in self._cache:
            mask = rho.mask(self.dist.bits)
            log_shared = float(
                logsumexp(self.dist_far_free.log_weights[mask]) - logsumexp(self.dist.log_weights[mask])
            )
            self._cache[key] = (
                self.far_marginal(self.dist, rho),
                self.far_marginal(self.dist_far_free, rho),
                log_shared,
            )
        return self._cache[key]

    def h_bar(self, rho: Restriction) -> np.ndarray:
        return self.far_marginal(self.dist_far_free, rho) * self.restricted_g(rho)


def build_derived_model(model: MrfModel, f: Junta, i: int) -> DerivedModel:
    nbrs = set(model.graph.neighbors(i))
    far = tuple(sorted(set(f.relevant) - {i} - nbrs))
    joint = tuple(sorted(nbrs)) + far
    delta = model.delta
    shift = MultilinearPolynomial(model.n, {(j,): -delta[j] for j in far})
    return DerivedModel(model, f, i, far, joint, model.psi + shift)


@dataclass(frozen=True)
class RatioCheck:
    residual: float
    enumerated: float
    closed_form: float
    shared_factor: float
    floor: float

    @property
    def factor_ok(self) -> bool:
        return self.shared_factor >= self.floor


def verify_density_ratio(derived: DerivedModel, rho: Restriction, z) -> RatioCheck:
    """Compare the far-coordinate density ratio by enumeration and in closed form.

    Enumerated: Pr_rho[x_far = z] / Pr'_rho[x_far = z], with Pr' the
    far-field-free model. Closed form: exp(sum_j delta_j z_j) times the ratio
    of the two models' partition sums over the neighborhood event. The shared
    factor must be at least 2^-k.
    """
    z = np.asarray(z, dtype=np.int64).reshape(-1)
    far = derived.far
    if z.shape[0] != len(far):
        raise ValueError(f"z must have length {len(far)}")
    zi = int(z @ (1 << np.arange(len(far) - 1, -1, -1))) if len(far) else 0
    num, den, log_shared = derived.ratio_parts(rho)
    enumerated = float(num[zi] / den[zi])
    shared = math.exp(log_shared)
    delta = derived.base.delta
    closed = math.exp(sum(delta[j] * zj for j, zj in zip(far, z))) * shared
    return RatioCheck(abs(enumerated - closed), enumerated, closed, shared, 2.0 ** (-derived.junta.k))


def anticoncentration_bound(ell: int, epsilon: float) -> float:
    return 2.0**ell * math.sqrt(epsilon)


def anticoncentration_trial(
    p: MultilinearPolynomial,
    c: float,
    ell: int,
    sigma: float,
    epsilon: float,
    trials: int,
    seed: int,
    batch: int = 100_000,
) -> float:
    """Fraction of x ~ Unif[-sigma, sigma]^n with |p(x)| <= c sigma^ell epsilon."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if p.degree != ell:
        raise ValueError(f"polynomial has degree {p.degree}, expected {ell}")
    if not any(len(k) == ell and abs(v) >= c for k, v in p.terms.items()):
        raise ValueError(f"no degree-{ell} coefficient of magnitude >= {c}")
    rng = rng_for(seed)
    thresh = c * sigma**ell * epsilon
    hits, done = 0, 0
    while done < trials:
        m = min(batch, trials - done)
        x = rng.uniform(-sigma, sigma, size=(m, p.n))
        hits += int(np.count_nonzero(np.abs(p.evaluate(x)) <= thresh))
        done += m
    return hits / trials


def unbiasedness_scan(model: MrfModel) -> tuple[float, tuple[int, tuple[int, ...]]]:
    """Smallest single-site conditional min(p, 1 - p) over all sites and contexts."""
    best = math.inf
    where = (0, ())
    bits = cube(model.n)
    for i, d in enumerate(model.derivatives):
        p1 = expit(d.cube_values())
        m = np.minimum(p1, 1.0 - p1)
        r = int(np.argmin(m))
        if m[r] < best:
            best = float(m[r])
            where = (i, tuple(np.delete(bits[r], i).tolist()))
    return best, where


@dataclass(frozen=True)
class FloorScan:
    """Smallest observed-to-floor ratios; both must be >= 1."""

    joint_ratio: float
    site_ratio: float
    restrictions: int


def conditional_floor_scan(dist: ExactDistribution, delta: float, max_support: int = 3) -> FloorScan:
    """Check conditionals against powers of the unbiasedness level ``delta``.

    For every restriction with at most ``max_support`` fixed coordinates, each
    point of the conditioned table must carry mass >= delta^(free coords), and
    each free coordinate must take either value with probability >= delta.
    """
    n = dist.n
    bits = dist.bits
    fbits = bits.astype(np.float64)
    joint, site, count = math.inf, math.inf, 0
    for t in range(min(max_support, n) + 1):
        for supp in combinations(range(n), t):
            free = [j for j in range(n) if j not in supp]
            for rho in restrictions_on(n, supp):
                p = _conditional(dist, rho)
                mask = rho.mask(bits)
                count += 1
                joint = min(joint, float(p[mask].min()) / delta ** len(free))
                if free:
                    m = p @ fbits[:, free]
                    site = min(site, float(np.minimum(m, 1 - m).min()) / delta)
    return FloorScan(joint, site, count)


def completeness_bound(gamma: float, sigma: float, lam: float, k: int) -> float:
    return gamma**2 * (sigma * math.exp(-lam) / 16) ** (k + 2)


def best_restriction_statistic(dist: ExactDistribution, f: Junta, i: int, graph: DependencyGraph) -> float:
    return max(exact_statistic(dist, f, i, rho, graph) for rho in restrictions_on(dist.n, graph.neighbors(i)))


@dataclass(frozen=True)
class CompletenessResult:
    successes: int
    trials: int
    bound: float

    @property
    def fraction(self) -> float:
        return self.successes / self.trials


def claim34_experiment(
    psi_bar: MultilinearPolynomial,
    graph: DependencyGraph,
    lam: float,
    sigma: float,
    f: Junta,
    i: int,
    gamma: float,
    smoothing_trials: int,
    seed: int,
) -> CompletenessResult:
    """Over fresh smoothings, how often the best neighborhood statistic of ``i`` clears the bound."""
    if i not in f.relevant:
        raise ValueError(f"index {i} is irrelevant to the junta")
    bound = completeness_bound(gamma, sigma, lam, f.k)
    base = MrfModel(psi_bar, graph, lam)
    wins = 0
    for t in range(smoothing_trials):
        rng = rng_for(seed, t)
        alpha = rng.uniform(-sigma, sigma, size=psi_bar.n)
        model = MrfModel(psi_bar, graph, lam, SmoothingVector(alpha, sigma))
        if best_restriction_statistic(enumerate_distribution(model), f, i, base.graph) >= bound:
            wins += 1
    return CompletenessResult(wins, smoothing_trials, bound)


def calibrated_threshold(dist: ExactDistribution, f: Junta, graph: DependencyGraph) -> float:
    """Half of the weakest relevant variable's best neighborhood statistic."""
    if not f.relevant:
        raise ValueError("constant junta: no relevant variable to calibrate against")
    return 0.5 * min(best_restriction_statistic(dist, f, i, graph) for i in f.relevant)
