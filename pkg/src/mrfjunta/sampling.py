"""Exact and Gibbs sampling from MRFs, restrictions and sample files."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from .mrf import MrfModel, rng_for
from .polynomial import MultilinearPolynomial, cube

ENUMERATION_CAP = 20


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ExactDistribution:
    """Probability table over {0,1}^n in :func:`cube` row order."""

    n: int
    log_weights: np.ndarray
    probabilities: np.ndarray

    @property
    def bits(self) -> np.ndarray:
        return cube(self.n)

    def expectation(self, values: np.ndarray) -> float:
        return float(self.probabilities @ values)

    def marginal(self, i: int) -> float:
        return self.expectation(self.bits[:, i])


def distribution_from_polynomial(psi: MultilinearPolynomial, cap: int = ENUMERATION_CAP) -> ExactDistribution:
    if psi.n > cap:
        raise ValueError(f"n={psi.n} exceeds the enumeration cap {cap}")
    logw = psi.cube_values()
    probs = np.exp(logw - logsumexp(logw))
    return ExactDistribution(psi.n, _frozen(logw), _frozen(probs))


def enumerate_distribution(model: MrfModel, cap: int = ENUMERATION_CAP) -> ExactDistribution:
    """Normalized exp(psi) over the whole cube, via a max-shifted log-sum-exp."""
    return distribution_from_polynomial(model.psi, cap)


@dataclass(frozen=True)
class Restriction:
    """A partial assignment in {0, 1, *}^n."""

    pattern: tuple[Optional[int], ...]

    def __post_init__(self):
        pat = tuple(None if p is None else int(p) for p in self.pattern)
        if any(p not in (None, 0, 1) for p in pat):
            raise ValueError("restriction symbols must be 0, 1 or None")
        object.__setattr__(self, "pattern", pat)

    @classmethod
    def parse(cls, text: str) -> "Restriction":
        return cls(tuple(None if c == "*" else int(c) for c in text))

    @classmethod
    def free(cls, n: int) -> "Restriction":
        return cls((None,) * n)

    @classmethod
    def from_assignment(cls, n: int, assignment: Mapping[int, int]) -> "Restriction":
        pat: list[Optional[int]] = [None] * n
        for j, b in assignment.items():
            pat[j] = b
        return cls(tuple(pat))

    @property
    def n(self) -> int:
        return len(self.pattern)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(j for j, p in enumerate(self.pattern) if p is not None)

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(p for p in self.pattern if p is not None)

    def __len__(self) -> int:
        return len(self.support)

    def __str__(self) -> str:
        return "".join("*" if p is None else str(p) for p in self.pattern)

    def mask(self, x: np.ndarray) -> np.ndarray:
        """Rows of the binary matrix ``x`` that agree with the restriction."""
        if x.shape[1] != self.n:
            raise ValueError(f"dimension mismatch: restriction has n={self.n}, data has {x.shape[1]}")
        supp = list(self.support)
        if not supp:
            return np.ones(x.shape[0], dtype=bool)
        return np.all(x[:, supp] == np.asarray(self.values, dtype=x.dtype), axis=1)


def restrictions_on(n: int, support: Sequence[int]) -> Iterator[Restriction]:
    """Every restriction with the given support, lexicographic in the support order."""
    support = tuple(support)
    for vals in product((0, 1), repeat=len(support)):
        yield Restriction.from_assignment(n, dict(zip(support, vals)))


@dataclass(frozen=True)
class SampleSet:
    """Labeled examples: ``x`` is an (N, n) uint8 matrix, ``y`` an (N,) uint8 vector."""

    x: np.ndarray
    y: np.ndarray = field(default=None)

    def __post_init__(self):
        x = np.array(self.x, dtype=np.uint8, copy=True)
        if x.ndim != 2:
            raise ValueError("x must be a 2-D array")
        y = np.zeros(x.shape[0], dtype=np.uint8) if self.y is None else np.array(self.y, dtype=np.uint8, copy=True)
        if y.shape != (x.shape[0],):
            raise ValueError("y must have one label per example")
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "y", _frozen(y))

    @property
    def n(self) -> int:
        return self.x.shape[1]

    def __len__(self) -> int:
        return self.x.shape[0]

    def with_labels(self, y: np.ndarray) -> "SampleSet":
        return SampleSet(self.x, y)

    def subset(self, rows: Union[np.ndarray, slice]) -> "SampleSet":
        return SampleSet(self.x[rows], self.y[rows])


def restrict_samples(samples: SampleSet, rho: Restriction) -> SampleSet:
    """Examples agreeing with ``rho`` on its support, in their original order."""
    return samples.subset(rho.mask(samples.x))


def conditional_exact(dist: ExactDistribution, rho: Restriction) -> ExactDistribution:
    """Condition the table on the event fixed by ``rho``; zero mass elsewhere."""
    mask = rho.mask(dist.bits)
    mass = dist.probabilities[mask].sum()
    if not mass > 0:
        raise ValueError(f"restriction {rho} has zero probability")
    probs = np.where(mask, dist.probabilities / mass, 0.0)
    logw = np.where(mask, dist.log_weights, -np.inf)
    return ExactDistribution(dist.n, _frozen(logw), _frozen(probs))


def sample_exact(dist: ExactDistribution, count: int, seed: int) -> SampleSet:
    """Inverse-CDF draws from the table; labels are left at 0."""
    if count < 1:
        raise ValueError("count must be positive")
    cdf = np.cumsum(dist.probabilities)
    u = rng_for(seed).random(count) * cdf[-1]
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), cdf.shape[0] - 1)
    return SampleSet(dist.bits[idx])


@dataclass(frozen=True)
class GibbsConfig:
    """Burn-in and thinning are counted in full sweeps over all n sites."""

    burn_in: int
    thinning: int
    chains: int = 4

    def __post_init__(self):
        if self.burn_in < 1 or self.thinning < 1 or self.chains < 1:
            raise ValueError("burn_in, thinning and chains must all be >= 1")

    @classmethod
    def default(cls, n: int, chains: int = 4) -> "GibbsConfig":
        # 200*n sweeps of burn-in; 10*n site updates between kept states.
        return cls(burn_in=200 * n, thinning=10, chains=chains)


class _ConditionalField:
    """Vectorized d psi / d x_i over a batch of states."""

    def __init__(self, model: MrfModel):
        self.terms = []
        for d in model.derivatives:
            const = d.terms.get((), 0.0)
            rest = [(list(k), c) for k, c in d.terms.items() if k]
            self.terms.append((const, rest))

    def logit(self, i: int, states: np.ndarray) -> np.ndarray:
        const, rest = self.terms[i]
        out = np.full(states.shape[0], const)
        for vars_, c in rest:
            if len(vars_) == 1:
                out += c * states[:, vars_[0]]
            else:
                out += c * np.all(states[:, vars_], axis=1)
        return out


def gibbs_sample(model: MrfModel, count: int, config: GibbsConfig, seed: int) -> SampleSet:
    """Systematic-scan Gibbs sampling with independent chains.

    Each chain draws its randomness from the stream keyed by (seed, chain).
    After ``burn_in`` sweeps a state is kept every ``thinning`` sweeps, and the
    kept states are interleaved round-robin across chains.
    """
    if count < 1:
        raise ValueError("count must be positive")
    n, chains = model.n, config.chains
    per_chain = -(-count // chains)
    field_ = _ConditionalField(model)
    gens = [rng_for(seed, c) for c in range(chains)]
    states = np.stack([g.integers(0, 2, size=n) for g in gens]).astype(bool)
    kept = np.empty((per_chain, chains, n), dtype=np.uint8)

    total_sweeps = config.burn_in + per_chain * config.thinning
    block = 64
    sweep = 0
    while sweep < total_sweeps:
        nb = min(block, total_sweeps - sweep)
        u = np.stack([g.random((nb, n)) for g in gens], axis=1)
        for b in range(nb):
            for i in range(n):
                p1 = 1.0 / (1.0 + np.exp(-field_.logit(i, states)))
                states[:, i] = u[b, :, i] < p1
            sweep += 1
            after = sweep - config.burn_in
            if after > 0 and after % config.thinning == 0:
                kept[after // config.thinning - 1] = states
    return SampleSet(kept.reshape(per_chain * chains, n)[:count])


def empirical_distribution(samples: SampleSet) -> np.ndarray:
    """Frequencies of each cube point in :func:`cube` row order."""
    n = samples.n
    weights = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)
    idx = samples.x.astype(np.int64) @ weights
    return np.bincount(idx, minlength=1 << n) / len(samples)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def write_samples(samples: SampleSet, path) -> None:
    with open(path, "w") as fh:
        for row, label in zip(samples.x, samples.y):
            fh.write(json.dumps({"x": "".join(map(str, row.tolist())), "y": int(label)}) + "\n")


def read_samples(path) -> SampleSet:
    xs: list[list[int]] = []
    ys: list[int] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        rec = json.loads(line)
        bits = rec["x"]
        if set(bits) - {"0", "1"}:
            raise ValueError(f"line {lineno}: x must be a bitstring")
        if xs and len(bits) != len(xs[0]):
            raise ValueError(f"line {lineno}: dimension mismatch")
        xs.append([int(c) for c in bits])
        ys.append(int(rec.get("y", 0)))
    if not xs:
        raise ValueError("empty samples file")
    return SampleSet(np.array(xs, dtype=np.uint8), np.array(ys, dtype=np.uint8))
