import numpy as np
import pytest

from mrfjunta.instances import ising_chain, random_model
from mrfjunta.polynomial import MultilinearPolynomial


@pytest.fixture
def small_model():
    return random_model(6, 2, 0.8, 0.3, seed=11)


@pytest.fixture
def chain6():
    return ising_chain(6, 1.0, 0.3, seed=5)


@pytest.fixture
def cubic():
    # 3x0 + 2x0x1 - x0x1x2
    return MultilinearPolynomial(3, {(0,): 3.0, (0, 1): 2.0, (0, 1, 2): -1.0})


def brute_force_probs(psi, n):
    """Normalized exp(psi) over the cube, by a plain Python loop."""
    w = []
    for idx in range(2**n):
        x = [(idx >> (n - 1 - j)) & 1 for j in range(n)]
        w.append(np.exp(sum(c * np.prod([x[v] for v in vs]) for vs, c in psi.terms.items())))
    w = np.array(w)
    return w / w.sum()
