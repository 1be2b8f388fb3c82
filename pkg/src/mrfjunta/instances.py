"""Random and hand-built MRF instances for experiments and oracle batteries."""
from __future__ import annotations

from itertools import combinations
from typing import Optional

import numpy as np

from .junta import Junta
from .mrf import DependencyGraph, MrfModel, apply_smoothing, derive_seed, rng_for
from .polynomial import MultilinearPolynomial


def random_bounded_degree_graph(n: int, d: int, rng: np.random.Generator) -> DependencyGraph:
    """Random graph built by scanning shuffled vertex pairs and keeping those under the degree cap."""
    if d >= n:
        raise ValueError(f"degree bound d={d} infeasible for n={n}")
    pairs = list(combinations(range(n), 2))
    order = rng.permutation(len(pairs))
    deg = [0] * n
    edges = []
    for idx in order:
        a, b = pairs[idx]
        if deg[a] < d and deg[b] < d:
            edges.append((a, b))
            deg[a] += 1
            deg[b] += 1
    return DependencyGraph.from_edges(n, edges)


def rescale_to_width(p: MultilinearPolynomial, lam: float) -> MultilinearPolynomial:
    """Scale uniformly so the largest per-variable width equals ``lam``."""
    top = max((p.width(i) for i in range(p.n)), default=0.0)
    if lam == 0 or top == 0:
        return MultilinearPolynomial.zero(p.n)
    # shave one ulp-scale factor so rounding never pushes a width above lam
    return p.scale(lam / top * (1 - 1e-12))


def random_potentials(
    graph: DependencyGraph, lam: float, rng: np.random.Generator, max_clique: int = 3
) -> MultilinearPolynomial:
    """Uniform[-1, 1] coefficients on every vertex and clique, rescaled to width lam."""
    n = graph.n
    terms = {(i,): rng.uniform(-1, 1) for i in range(n)}
    for c in graph.cliques(max_clique):
        terms[c] = rng.uniform(-1, 1)
    return rescale_to_width(MultilinearPolynomial(n, terms), lam)


def random_model(n: int, d: int, lam: float, sigma: float, seed: int) -> MrfModel:
    rng = rng_for(derive_seed(seed, 1))
    graph = random_bounded_degree_graph(n, d, rng)
    psi_bar = random_potentials(graph, lam, rng)
    return apply_smoothing(psi_bar, graph, lam, sigma, derive_seed(seed, 2))


def ising_chain(n: int, lam: float, sigma: Optional[float], seed: int) -> MrfModel:
    """Path-graph Ising model with random fields and couplings."""
    rng = rng_for(derive_seed(seed, 1))
    graph = DependencyGraph.path(n)
    terms = {(i,): rng.uniform(-1, 1) for i in range(n)}
    terms.update({e: rng.uniform(-1, 1) for e in graph.edges()})
    psi_bar = rescale_to_width(MultilinearPolynomial(n, terms), lam)
    if sigma is None:
        return MrfModel(psi_bar, graph, lam)
    return apply_smoothing(psi_bar, graph, lam, sigma, derive_seed(seed, 2))


CONFOUNDER = 0


def chain_confounder(sigma: float, seed: int) -> tuple[MrfModel, Junta]:
    """Six-vertex path where irrelevant x0 is tightly coupled to relevant x1.

    The label is AND(x1, x3) and x3 is pushed strongly toward 1, so x3 has
    little unconditional covariance with the label while x0 inherits most of
    x1's. Conditioning on x0's only neighbor, x1, removes that covariance.
    """
    n = 6
    graph = DependencyGraph.path(n)
    psi_bar = MultilinearPolynomial(
        n,
        {
            (0, 1): 2.5,
            (0,): -1.25,
            (1,): -1.25,
            (1, 2): 0.2,
            (2, 3): 0.2,
            (3,): 3.0,
            (3, 4): 0.2,
            (4, 5): 0.3,
            (4,): 0.1,
            (5,): -0.2,
        },
    )
    lam = 4.0
    model = apply_smoothing(psi_bar, graph, lam, sigma, seed)
    return model, Junta.from_function(n, (1, 3), lambda a, b: a & b)


def three_chain() -> tuple[MrfModel, Junta]:
    """Strongly coupled path 0 - 1 - 2 with label x2, for under-conditioning controls."""
    psi_bar = MultilinearPolynomial(3, {(0, 1): 2.0, (1, 2): 2.0, (0,): -1.0, (1,): -2.0, (2,): -1.0})
    model = MrfModel(psi_bar, DependencyGraph.path(3), 6.0)
    return model, Junta.dictator(3, 2)
