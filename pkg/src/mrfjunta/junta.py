"""k-juntas, their pivot decompositions and multilinear expansions."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .mrf import rng_for
from .polynomial import MultilinearPolynomial, cube, mobius_coefficients
from .sampling import SampleSet


def _table_index(x: np.ndarray, variables: Sequence[int]) -> np.ndarray:
    """Row index into a truth table over ``variables`` (first listed = MSB)."""
    k = len(variables)
    if k == 0:
        return np.zeros(x.shape[0], dtype=np.int64)
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
    return x[:, list(variables)].astype(np.int64) @ weights


def _influential(table: np.ndarray, k: int) -> list[int]:
    """Positions (0..k-1) whose flip changes the table on some row."""
    idx = np.arange(1 << k)
    return [p for p in range(k) if np.any(table != table[idx ^ (1 << (k - 1 - p))])]


def _project(table: np.ndarray, k: int, keep: Sequence[int]) -> np.ndarray:
    """Table restricted to positions ``keep``; other positions are read at 0."""
    bits = cube(len(keep))
    rows = np.zeros(bits.shape[0], dtype=np.int64)
    for col, p in enumerate(keep):
        rows |= bits[:, col].astype(np.int64) << (k - 1 - p)
    return table[rows]


class Junta:
    """Boolean function of the coordinates ``relevant`` out of ``n``.

    Declared coordinates that never affect the output are dropped, so
    ``relevant`` is always the true relevant set.
    """

    __slots__ = ("n", "relevant", "table")

    def __init__(self, n: int, relevant: Sequence[int], table: Sequence[int]):
        relevant = tuple(int(r) for r in relevant)
        if len(set(relevant)) != len(relevant):
            raise ValueError("relevant indices must be distinct")
        if any(not 0 <= r < n for r in relevant):
            raise ValueError(f"relevant index out of range for n={n}")
        table = np.asarray(table, dtype=np.uint8)
        k = len(relevant)
        if table.shape != (1 << k,):
            raise ValueError(f"table must have 2^{k} entries")
        if np.any(table > 1):
            raise ValueError("table entries must be bits")
        keep = _influential(table, k)
        if len(keep) < k:
            table = _project(table, k, keep)
            relevant = tuple(relevant[p] for p in keep)
        table = table.copy()
        table.setflags(write=False)
        self.n = n
        self.relevant = relevant
        self.table = table

    @property
    def k(self) -> int:
        return len(self.relevant)

    @classmethod
    def constant(cls, n: int, value: int) -> "Junta":
        return cls(n, (), [value])

    @classmethod
    def dictator(cls, n: int, i: int) -> "Junta":
        return cls(n, (i,), [0, 1])

    @classmethod
    def from_function(cls, n: int, relevant: Sequence[int], fn) -> "Junta":
        bits = cube(len(relevant))
        return cls(n, relevant, [int(fn(*row)) for row in bits])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Junta):
            return NotImplemented
        return (self.n, self.relevant) == (other.n, other.relevant) and np.array_equal(self.table, other.table)

    def __repr__(self) -> str:
        return f"Junta(n={self.n}, relevant={list(self.relevant)}, table={''.join(map(str, self.table))!r})"

    def evaluate(self, x) -> np.ndarray:
        """Labels for each row of ``x`` (or a single bit for a 1-D ``x``)."""
        arr = np.asarray(x)
        single = arr.ndim == 1
        arr = np.atleast_2d(arr)
        if arr.shape[1] != self.n:
            raise ValueError(f"dimension mismatch: junta has n={self.n}, input has {arr.shape[1]}")
        out = self.table[_table_index(arr, self.relevant)]
        return int(out[0]) if single else out

    __call__ = evaluate

    def cube_values(self) -> np.ndarray:
        return self.evaluate(cube(self.n))


def eval_junta(f: Junta, x) -> int:
    return f.evaluate(x)


@dataclass(frozen=True)
class Decomposition:
    """f(x) = x_i * g(x_{-i}) + h(x_{-i}), with g and h tabulated over ``variables``.

    ``variables`` lists the relevant coordinates other than the pivot, in the
    order of ``Junta.relevant``. ``g`` takes values in {-1, 0, 1}.
    """

    n: int
    i: int
    variables: tuple[int, ...]
    g: np.ndarray
    h: np.ndarray

    def g_values(self, x: np.ndarray) -> np.ndarray:
        return self.g[_table_index(np.atleast_2d(x), self.variables)]

    def h_values(self, x: np.ndarray) -> np.ndarray:
        return self.h[_table_index(np.atleast_2d(x), self.variables)]

    @property
    def g_is_zero(self) -> bool:
        return not np.any(self.g)


def decompose(f: Junta, i: int) -> Decomposition:
    if not 0 <= i < f.n:
        raise IndexError(f"pivot {i} outside [0, {f.n})")
    rest = tuple(r for r in f.relevant if r != i)
    bits = cube(len(rest))
    full = np.zeros((bits.shape[0], f.n), dtype=np.uint8)
    full[:, list(rest)] = bits
    full[:, i] = 0
    f0 = f.evaluate(full).astype(np.int8)
    full[:, i] = 1
    f1 = f.evaluate(full).astype(np.int8)
    g, h = f1 - f0, f0
    g.setflags(write=False)
    h.setflags(write=False)
    return Decomposition(f.n, i, rest, g, h)


def multilinear_expansion(n: int, variables: Sequence[int], table) -> MultilinearPolynomial:
    """Unique multilinear polynomial in the ambient n variables agreeing with ``table``.

    For integer tables the coefficients are integers; a {-1, 0, 1}-valued
    table therefore cannot produce a nonzero coefficient below 2^-k, and this
    is checked rather than assumed.
    """
    variables = tuple(variables)
    table = np.asarray(table, dtype=np.int64)
    k = len(variables)
    coeffs = mobius_coefficients(table)
    terms = {}
    for m in np.flatnonzero(coeffs):
        vars_ = tuple(variables[p] for p in range(k) if (m >> (k - 1 - p)) & 1)
        terms[vars_] = float(coeffs[m])
    if set(np.unique(table)) <= {-1, 0, 1}:
        floor = 2.0 ** (-k)
        small = [c for c in terms.values() if abs(c) < floor]
        if small:
            raise ArithmeticError(f"coefficient {small[0]} below 2^-{k}")
    return MultilinearPolynomial(n, terms)


def junta_polynomial(f: Junta) -> MultilinearPolynomial:
    return multilinear_expansion(f.n, f.relevant, f.table)


def label_samples(f: Junta, samples: SampleSet) -> SampleSet:
    return samples.with_labels(f.evaluate(samples.x))


def random_junta(n: int, k: int, seed: int, max_tries: int = 10_000) -> Junta:
    """Uniform over functions depending on exactly k of the n coordinates."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    rng = rng_for(seed)
    relevant = tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
    for _ in range(max_tries):
        table = rng.integers(0, 2, size=1 << k).astype(np.uint8)
        if len(_influential(table, k)) == k:
            return Junta(n, relevant, table)
    raise RuntimeError("could not draw a table with all coordinates relevant")


def junta_to_dict(f: Junta) -> dict:
    return {"n": f.n, "relevant": list(f.relevant), "table": "".join(map(str, f.table.tolist()))}


def junta_from_dict(data: dict) -> Junta:
    return Junta(int(data["n"]), data["relevant"], [int(c) for c in data["table"]])


def save_junta(f: Junta, path) -> None:
    Path(path).write_text(json.dumps(junta_to_dict(f)) + "\n")


def load_junta(path) -> Junta:
    return junta_from_dict(json.loads(Path(path).read_text()))
