import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mrfjunta.polynomial import (
    MultilinearPolynomial,
    cube,
    eval_poly,
    mobius_coefficients,
    partial_derivative,
    point_index,
    width,
)


@st.composite
def polynomials(draw, n=4):
    keys = draw(st.lists(st.frozensets(st.integers(0, n - 1), max_size=n), max_size=8))
    coeffs = draw(st.lists(st.floats(-5, 5, allow_nan=False), min_size=len(keys), max_size=len(keys)))
    return MultilinearPolynomial(n, {tuple(sorted(k)): c for k, c in zip(keys, coeffs)})


class TestCube:
    def test_row_order(self):
        np.testing.assert_array_equal(cube(2), [[0, 0], [0, 1], [1, 0], [1, 1]])

    def test_point_index_inverts_rows(self):
        for idx, row in enumerate(cube(4)):
            assert point_index(row) == idx

    def test_read_only(self):
        with pytest.raises(ValueError):
            cube(3)[0, 0] = 1


class TestConstruction:
    def test_zero_coefficients_dropped(self):
        p = MultilinearPolynomial(3, {(0,): 0.0, (1, 2): 1.5})
        assert len(p) == 1
        assert p.coefficient((2, 1)) == 1.5

    def test_duplicate_keys_merge(self):
        p = MultilinearPolynomial(3, [((0, 1), 1.0), ((1, 0), 2.0)])
        assert p.coefficient((0, 1)) == 3.0

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            MultilinearPolynomial(2, {(2,): 1.0})
        with pytest.raises(IndexError):
            MultilinearPolynomial(2, {(0,): 1.0}).partial_derivative(5)

    def test_degree_and_equality(self, cubic):
        assert cubic.degree == 3
        assert cubic == MultilinearPolynomial(3, {(1, 0, 2): -1.0, (0,): 3.0, (1, 0): 2.0})
        assert MultilinearPolynomial.zero(3).is_zero


class TestEvaluate:
    def test_zero(self):
        assert eval_poly(MultilinearPolynomial.zero(3), [1, 0, 1]) == 0.0

    def test_monomial(self):
        p = MultilinearPolynomial(2, {(0, 1): 1.0})
        assert p([1, 1]) == 1.0
        assert p([1, 0]) == 0.0

    def test_sum_of_active_terms(self):
        p = MultilinearPolynomial(3, {(0,): 0.5, (0, 1, 2): 2.0})
        assert p([1, 1, 1]) == pytest.approx(2.5)

    def test_batch_matches_loop(self, cubic):
        pts = cube(3)
        np.testing.assert_allclose(cubic.evaluate(pts), [cubic(x) for x in pts])
        np.testing.assert_allclose(cubic.cube_values(), cubic.evaluate(pts))

    def test_real_inputs(self, cubic):
        x = np.array([0.5, -2.0, 0.25])
        assert cubic(x) == pytest.approx(3 * 0.5 + 2 * 0.5 * -2.0 - 0.5 * -2.0 * 0.25)

    def test_dimension_mismatch(self, cubic):
        with pytest.raises(ValueError):
            cubic([1, 0])


class TestDerivative:
    def test_monomial(self):
        p = MultilinearPolynomial(3, {(0, 1): 1.0})
        assert partial_derivative(p, 0) == MultilinearPolynomial(3, {(1,): 1.0})

    def test_absent_variable(self):
        p = MultilinearPolynomial(3, {(1, 2): 1.0})
        assert partial_derivative(p, 0).is_zero

    def test_cubic_example(self, cubic):
        expected = MultilinearPolynomial(3, {(): 3.0, (1,): 2.0, (1, 2): -1.0})
        assert cubic.partial_derivative(0) == expected

    @given(polynomials(), st.integers(0, 3))
    @settings(max_examples=60, deadline=None)
    def test_finite_difference(self, p, i):
        pts = cube(p.n)
        hi, lo = pts.copy(), pts.copy()
        hi[:, i], lo[:, i] = 1, 0
        np.testing.assert_allclose(p.partial_derivative(i).evaluate(pts), p.evaluate(hi) - p.evaluate(lo), atol=1e-9)

    @given(polynomials(), st.integers(0, 3))
    @settings(max_examples=60, deadline=None)
    def test_derivative_is_free_of_variable(self, p, i):
        d = p.partial_derivative(i)
        assert all(i not in k for k in d.terms)


class TestWidth:
    def test_zero(self):
        assert width(MultilinearPolynomial.zero(2), 0) == 0.0

    def test_cubic(self, cubic):
        assert width(cubic, 0) == pytest.approx(6.0)

    def test_absent(self):
        assert width(MultilinearPolynomial(3, {(1, 2): 1.0}), 0) == 0.0

    @given(polynomials(), st.floats(-3, 3, allow_nan=False), st.integers(0, 3))
    @settings(max_examples=40, deadline=None)
    def test_homogeneous(self, p, s, i):
        assert p.scale(s).width(i) == pytest.approx(abs(s) * p.width(i), abs=1e-9)


class TestArithmetic:
    @given(polynomials(), polynomials())
    @settings(max_examples=40, deadline=None)
    def test_add_pointwise(self, p, q):
        np.testing.assert_allclose((p + q).cube_values(), p.cube_values() + q.cube_values(), atol=1e-9)
        np.testing.assert_allclose((p - q).cube_values(), p.cube_values() - q.cube_values(), atol=1e-9)

    def test_drop_linear(self, cubic):
        p = cubic + MultilinearPolynomial.linear([0.0, 4.0, 1.0])
        assert p.drop_linear([1]) == cubic + MultilinearPolynomial(3, {(2,): 1.0})


class TestMobius:
    @given(polynomials())
    @settings(max_examples=40, deadline=None)
    def test_recovers_coefficients(self, p):
        coeffs = mobius_coefficients(p.cube_values())
        for m, c in enumerate(coeffs):
            vars_ = tuple(j for j in range(p.n) if (m >> (p.n - 1 - j)) & 1)
            assert c == pytest.approx(p.coefficient(vars_), abs=1e-9)
