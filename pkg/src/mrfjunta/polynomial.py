"""Sparse multilinear polynomials over n variables.

Monomials are keyed by sorted tuples of 0-based variable indices. The same
class carries the log-density of an MRF, its clique potentials, and the
real-valued expansions of boolean functions.
"""
from __future__ import annotations

from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

TermsLike = Union[Mapping[Iterable[int], float], Iterable[tuple[Iterable[int], float]]]


@lru_cache(maxsize=32)
def cube(n: int) -> np.ndarray:
    """All points of {0,1}^n as a read-only (2^n, n) uint8 array.

    Row ``r`` is the binary expansion of ``r`` with variable 0 as the most
    significant bit, so a row equals the bitstring ``format(r, f"0{n}b")``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    rows = np.arange(1 << n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = ((rows[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    bits.setflags(write=False)
    return bits


def point_index(x: Sequence[int]) -> int:
    """Row of :func:`cube` holding the binary vector ``x``."""
    idx = 0
    for b in x:
        idx = (idx << 1) | int(b)
    return idx


class MultilinearPolynomial:
    """Immutable sparse multilinear polynomial ``sum_S c_S prod_{i in S} x_i``.

    Duplicate index sets passed to the constructor are summed, and terms whose
    coefficient is exactly zero are dropped.
    """

    __slots__ = ("_n", "_terms")

    def __init__(self, n: int, terms: TermsLike = ()):
        if n < 0:
            raise ValueError("n must be non-negative")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, ...], float] = {}
        for vars_, coeff in items:
            key = tuple(sorted(int(v) for v in vars_))
            if len(set(key)) != len(key):
                raise ValueError(f"repeated variable in monomial {key}")
            if key and (key[0] < 0 or key[-1] >= n):
                raise ValueError(f"monomial {key} has an index outside [0, {n})")
            c = float(coeff)
            if not np.isfinite(c):
                raise ValueError(f"non-finite coefficient for {key}")
            acc[key] = acc.get(key, 0.0) + c
        self._n = n
        self._terms = MappingProxyType({k: v for k, v in sorted(acc.items()) if v != 0.0})

    @classmethod
    def zero(cls, n: int) -> "MultilinearPolynomial":
        return cls(n)

    @classmethod
    def linear(cls, coeffs: Sequence[float]) -> "MultilinearPolynomial":
        return cls(len(coeffs), {(i,): c for i, c in enumerate(coeffs)})

    @property
    def n(self) -> int:
        return self._n

    @property
    def terms(self) -> Mapping[tuple[int, ...], float]:
        return self._terms

    @property
    def degree(self) -> int:
        return max((len(k) for k in self._terms), default=0)

    def coefficient(self, vars_: Iterable[int]) -> float:
        return self._terms.get(tuple(sorted(vars_)), 0.0)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultilinearPolynomial):
            return NotImplemented
        return self._n == other._n and dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        return hash((self._n, tuple(self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return f"MultilinearPolynomial(n={self._n}, 0)"
        parts = []
        for k, c in self._terms.items():
            mono = "*".join(f"x{i}" for i in k)
            parts.append(f"{c:g}" + (f"*{mono}" if mono else ""))
        return f"MultilinearPolynomial(n={self._n}, " + " + ".join(parts) + ")"

    def __add__(self, other: "MultilinearPolynomial") -> "MultilinearPolynomial":
        if not isinstance(other, MultilinearPolynomial):
            return NotImplemented
        if other._n != self._n:
            raise ValueError("dimension mismatch")
        return MultilinearPolynomial(self._n, list(self._terms.items()) + list(other._terms.items()))

    def __sub__(self, other: "MultilinearPolynomial") -> "MultilinearPolynomial":
        return self + other.scale(-1.0)

    def scale(self, factor: float) -> "MultilinearPolynomial":
        return MultilinearPolynomial(self._n, {k: factor * c for k, c in self._terms.items()})

    def evaluate(self, x) -> Union[float, np.ndarray]:
        """Evaluate at a point (1-D) or at each row of a 2-D array.

        Inputs may be binary or real; the polynomial is multilinear either way.
        """
        arr = np.asarray(x, dtype=np.float64)
        if arr.shape[-1:] != (self._n,) or arr.ndim not in (1, 2):
            raise ValueError(f"expected trailing dimension {self._n}, got shape {arr.shape}")
        if arr.ndim == 1:
            total = 0.0
            for k, c in self._terms.items():
                total += c * float(np.prod(arr[list(k)])) if k else c
            return total
        out = np.zeros(arr.shape[0])
        for k, c in self._terms.items():
            if k:
                out += c * np.prod(arr[:, list(k)], axis=1)
            else:
                out += c
        return out

    __call__ = evaluate

    def cube_values(self) -> np.ndarray:
        """Values on every point of {0,1}^n, in :func:`cube` row order."""
        bits = cube(self._n).astype(bool)
        out = np.zeros(1 << self._n)
        for k, c in self._terms.items():
            if k:
                out[np.all(bits[:, list(k)], axis=1)] += c
            else:
                out += c
        return out

    def _check_index(self, i: int) -> None:
        if not 0 <= i < self._n:
            raise IndexError(f"variable index {i} outside [0, {self._n})")

    def partial_derivative(self, i: int) -> "MultilinearPolynomial":
        """Terms containing ``i`` with ``i`` deleted; the result never mentions ``i``."""
        self._check_index(i)
        return MultilinearPolynomial(
            self._n,
            [(tuple(v for v in k if v != i), c) for k, c in self._terms.items() if i in k],
        )

    def width(self, i: int) -> float:
        """l1 norm of the coefficients of the partial derivative in ``i``."""
        self._check_index(i)
        return float(sum(abs(c) for k, c in self._terms.items() if i in k))

    def drop_linear(self, indices: Iterable[int]) -> "MultilinearPolynomial":
        drop = {(int(j),) for j in indices}
        return MultilinearPolynomial(self._n, {k: c for k, c in self._terms.items() if k not in drop})


def eval_poly(p: MultilinearPolynomial, x) -> float:
    return p.evaluate(x)


def partial_derivative(p: MultilinearPolynomial, i: int) -> MultilinearPolynomial:
    return p.partial_derivative(i)


def width(p: MultilinearPolynomial, i: int) -> float:
    return p.width(i)


def mobius_coefficients(table: np.ndarray) -> np.ndarray:
    """Coefficients of the multilinear interpolant of a function on {0,1}^k.

    ``table`` is indexed like :func:`cube` rows; entry ``m`` of the result is
    the coefficient of the monomial whose variable set is the bit pattern of
    ``m``. Computed by the subset-difference (Mobius) transform, exact for
    integer tables.
    """
    coeffs = np.array(table, copy=True)
    size = coeffs.shape[0]
    k = size.bit_length() - 1
    if size != 1 << k:
        raise ValueError("table length must be a power of two")
    for bit in range(k):
        step = 1 << bit
        for start in range(0, size, step << 1):
            hi = slice(start + step, start + 2 * step)
            lo = slice(start, start + step)
            coeffs[hi] = coeffs[hi] - coeffs[lo]
    return coeffs
