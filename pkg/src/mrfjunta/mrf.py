"""Dependency graphs, smoothed external fields and MRF models."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.special import expit

from .polynomial import MultilinearPolynomial

WIDTH_TOL = 1e-9
SEED_MASK = (1 << 64) - 1


class ModelValidationError(ValueError):
    """Raised when an MRF violates its width or clique constraints."""


def rng_for(*key: int) -> np.random.Generator:
    """Counter-based generator keyed by a tuple of integers.

    Streams with different keys are independent and reproducible no matter in
    which order they are created.
    """
    ss = np.random.SeedSequence([int(k) & SEED_MASK for k in key])
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(*key: int) -> int:
    """A 64-bit seed derived deterministically from an integer key."""
    ss = np.random.SeedSequence([int(k) & SEED_MASK for k in key])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class DependencyGraph:
    n: int
    adjacency: tuple[frozenset, ...]

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ValueError("adjacency must list one neighbor set per vertex")
        for i, nbrs in enumerate(self.adjacency):
            for j in nbrs:
                if j == i:
                    raise ValueError(f"self-loop at vertex {i}")
                if not 0 <= j < self.n:
                    raise ValueError(f"neighbor {j} of {i} out of range")
                if i not in self.adjacency[j]:
                    raise ValueError(f"edge ({i}, {j}) is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "DependencyGraph":
        adj: list[set] = [set() for _ in range(n)]
        for e in edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            adj[i].add(j)
            adj[j].add(i)
        return cls(n, tuple(frozenset(a) for a in adj))

    @classmethod
    def empty(cls, n: int) -> "DependencyGraph":
        return cls(n, tuple(frozenset() for _ in range(n)))

    @classmethod
    def path(cls, n: int) -> "DependencyGraph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    def neighbors(self, i: int) -> tuple[int, ...]:
        """Sorted neighbor indices of ``i``."""
        return tuple(sorted(self.adjacency[i]))

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((i, j) for i in range(self.n) for j in self.adjacency[i] if i < j)

    def is_clique(self, vars_: Iterable[int]) -> bool:
        return all(b in self.adjacency[a] for a, b in combinations(vars_, 2))

    def cliques(self, max_size: Optional[int] = None) -> list[tuple[int, ...]]:
        """All cliques of size >= 2 (up to ``max_size``), found by extension."""
        out: list[tuple[int, ...]] = []
        frontier = [e for e in self.edges()]
        while frontier:
            out.extend(frontier)
            if max_size is not None and len(frontier[0]) >= max_size:
                break
            nxt = []
            for c in frontier:
                common = set.intersection(*(set(self.adjacency[v]) for v in c))
                nxt.extend(c + (v,) for v in sorted(common) if v > c[-1])
            frontier = nxt
        return out


@dataclass(frozen=True)
class SmoothingVector:
    """Multiplicative external-field perturbation: delta_i = ln(1 + alpha_i)."""

    alpha: np.ndarray
    sigma: float
    delta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 0.0 < self.sigma < 0.5:
            raise ValueError(f"sigma must lie in (0, 1/2), got {self.sigma}")
        alpha = np.array(self.alpha, dtype=np.float64)
        if alpha.ndim != 1:
            raise ValueError("alpha must be a vector")
        if np.any(np.abs(alpha) > self.sigma):
            raise ValueError("alpha entries must lie in [-sigma, sigma]")
        alpha.setflags(write=False)
        delta = np.log1p(alpha)
        delta.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "delta", delta)

    @property
    def n(self) -> int:
        return self.alpha.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SmoothingVector):
            return NotImplemented
        return self.sigma == other.sigma and np.array_equal(self.alpha, other.alpha)

    __hash__ = None


def draw_smoothing(n: int, sigma: float, seed: int) -> SmoothingVector:
    """alpha_i ~ Unif[-sigma, sigma], one stream per (seed, coordinate)."""
    alpha = np.array([rng_for(seed, i).uniform(-sigma, sigma) for i in range(n)])
    return SmoothingVector(alpha, sigma)


@dataclass(frozen=True)
class MrfModel:
    """A (sigma, lambda)-smooth MRF, or an unsmoothed one when ``smoothing`` is None.

    ``nominal_sigma`` records the declared radius of unsmoothed models so that
    files round-trip; it never enters the density.
    """

    psi_bar: MultilinearPolynomial
    graph: DependencyGraph
    lam: float
    smoothing: Optional[SmoothingVector] = None
    nominal_sigma: Optional[float] = None

    def __post_init__(self):
        n = self.psi_bar.n
        if self.graph.n != n:
            raise ModelValidationError(f"graph has {self.graph.n} vertices, polynomial has {n}")
        if self.lam < 0:
            raise ModelValidationError("lambda must be non-negative")
        for i in range(n):
            w = self.psi_bar.width(i)
            if w > self.lam + WIDTH_TOL:
                raise ModelValidationError(f"width of variable {i} is {w:.6g} > lambda={self.lam:.6g}")
        for vars_ in self.psi_bar.terms:
            if len(vars_) >= 2 and not self.graph.is_clique(vars_):
                raise ModelValidationError(f"term {vars_} is not a clique of the dependency graph")
        if self.smoothing is not None and self.smoothing.n != n:
            raise ModelValidationError("smoothing vector length differs from n")

    @property
    def n(self) -> int:
        return self.psi_bar.n

    @property
    def sigma(self) -> Optional[float]:
        return self.smoothing.sigma if self.smoothing is not None else self.nominal_sigma

    @property
    def delta(self) -> np.ndarray:
        if self.smoothing is None:
            return np.zeros(self.n)
        return self.smoothing.delta

    @cached_property
    def psi(self) -> MultilinearPolynomial:
        """Full factorization: psi_bar plus the smoothed external field."""
        if self.smoothing is None:
            return self.psi_bar
        return self.psi_bar + MultilinearPolynomial.linear(self.smoothing.delta)

    @cached_property
    def derivatives(self) -> tuple[MultilinearPolynomial, ...]:
        return tuple(self.psi.partial_derivative(i) for i in range(self.n))

    def with_alpha(self, alpha: Sequence[float], sigma: Optional[float] = None) -> "MrfModel":
        sigma = self.sigma if sigma is None else sigma
        return MrfModel(self.psi_bar, self.graph, self.lam, SmoothingVector(np.asarray(alpha), sigma))

    def unsmoothed(self) -> "MrfModel":
        return MrfModel(self.psi_bar, self.graph, self.lam, None, self.sigma)


def apply_smoothing(
    psi_bar: MultilinearPolynomial,
    graph: DependencyGraph,
    lam: float,
    sigma: float,
    seed: int,
) -> MrfModel:
    if not 0.0 < sigma < 0.5:
        raise ValueError(f"sigma must lie in (0, 1/2), got {sigma}")
    return MrfModel(psi_bar, graph, lam, draw_smoothing(psi_bar.n, sigma, seed))


def conditional_probability(model: MrfModel, i: int, x_rest: Sequence[int]) -> float:
    """Pr[x_i = 1 | x_{-i} = x_rest], the logistic of d psi / d x_i."""
    x_rest = np.asarray(x_rest)
    if x_rest.shape != (model.n - 1,):
        raise ValueError(f"x_rest must have length {model.n - 1}")
    if not 0 <= i < model.n:
        raise IndexError(f"variable index {i} outside [0, {model.n})")
    x = np.insert(x_rest.astype(np.float64), i, 0.0)
    return float(expit(model.derivatives[i].evaluate(x)))


def model_to_dict(model: MrfModel) -> dict:
    out = {
        "n": model.n,
        "lambda": model.lam,
        "sigma": model.sigma,
        "edges": [list(e) for e in model.graph.edges()],
        "psi_bar": [{"vars": list(k), "coeff": c} for k, c in model.psi_bar.terms.items()],
    }
    if model.smoothing is not None:
        out["alpha"] = model.smoothing.alpha.tolist()
    return out


def model_from_dict(data: dict) -> MrfModel:
    try:
        n = int(data["n"])
        lam = float(data["lambda"])
        sigma = data.get("sigma")
        graph = DependencyGraph.from_edges(n, data.get("edges", []))
        psi_bar = MultilinearPolynomial(n, [(t["vars"], t["coeff"]) for t in data.get("psi_bar", [])])
    except (KeyError, TypeError) as exc:
        raise ModelValidationError(f"malformed model document: {exc}") from exc
    smoothing = None
    if data.get("alpha") is not None:
        if sigma is None:
            raise ModelValidationError("alpha given without sigma")
        smoothing = SmoothingVector(np.asarray(data["alpha"], dtype=np.float64), float(sigma))
    return MrfModel(psi_bar, graph, lam, smoothing, None if sigma is None else float(sigma))


def save_model(model: MrfModel, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n")


def load_model(path) -> MrfModel:
    return model_from_dict(json.loads(Path(path).read_text()))
