"""
*-polynomials: algebra, evaluation against operator contexts, serialization.
"""

import numpy as np
import pytest

from errors import MissingSymbolError, ShapeMismatchError, StarredSymbolError
from ncpoly import (
    NcPolynomial,
    adjoint,
    apply,
    as_linear_operator,
    evaluate,
    from_json,
    hermitian_substitution,
    l1_norm,
    lipschitz_check,
    parse_poly,
    self_adjoint_context,
    star_context,
    symbol,
    to_json,
)


def _random_matrix(n, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


class TestAlgebra:
    def test_zero_terms_pruned(self):
        p = parse_poly("X_a - X_a + 0*X_b")
        assert p.is_zero()

    def test_degree_and_vertices(self):
        p = parse_poly("X_b*X_a* + 2")
        assert p.degree == 2
        assert p.vertices() == ["b", "a"]

    def test_adjoint(self):
        p = parse_poly("(1+2i)*X_a*X_b*")
        q = adjoint(p)
        assert q.terms == {(symbol("b"), symbol("a", True)): 1 - 2j}
        assert adjoint(q) == p

    def test_multiply_is_noncommutative(self):
        a, b = NcPolynomial.variable("a"), NcPolynomial.variable("b")
        assert a * b != b * a
        assert (a * b - b * a).degree == 2

    def test_l1_norm(self):
        assert l1_norm(parse_poly("3*X_a - 4i*X_b")) == pytest.approx(7.0)

    def test_hermitian_substitution(self):
        q = hermitian_substitution(parse_poly("X_a*X_b"))
        assert len(q.terms) == 4
        assert all(c == 1 for c in q.terms.values())

    def test_hermitian_substitution_rejects_stars(self):
        with pytest.raises(StarredSymbolError):
            hermitian_substitution(parse_poly("X_a*"))

    def test_json_roundtrip(self):
        p = parse_poly("(0.5-1i)*X_a*X_b* + 3")
        assert from_json(to_json(p)) == p


class TestEvaluation:
    def test_evaluate_matches_dense_arithmetic(self):
        A, B = _random_matrix(5, 1), _random_matrix(5, 2)
        p = parse_poly("X_a*X_b* - 2*X_b + 1")
        value = evaluate(p, star_context({"a": A, "b": B}), np.eye(5))
        expected = A @ B.conj().T - 2 * B + np.eye(5)
        assert np.allclose(value, expected)

    def test_apply_matches_evaluate(self):
        A, B = _random_matrix(4, 3), _random_matrix(4, 4)
        p = parse_poly("X_a*X_a*X_b + (2i)*X_b*")
        ctx = star_context({"a": A, "b": B})
        x = np.arange(4, dtype=np.complex128)
        assert np.allclose(apply(p, ctx, x), evaluate(p, ctx, np.eye(4)) @ x)

    def test_apply_on_blocks_of_vectors(self):
        A = _random_matrix(3, 5)
        p = parse_poly("X_a*X_a")
        x = np.eye(3, dtype=np.complex128)
        assert np.allclose(apply(p, star_context({"a": A}), x), A @ A)

    def test_linear_operator_adjoint(self):
        A = _random_matrix(4, 6)
        p = parse_poly("X_a*X_a* + X_a")
        op = as_linear_operator(p, star_context({"a": A}), 4)
        dense = A @ A.conj().T + A
        x = np.ones(4, dtype=np.complex128)
        assert np.allclose(op.matvec(x), dense @ x)
        assert np.allclose(op.rmatvec(x), dense.conj().T @ x)

    def test_self_adjoint_context(self):
        H = np.diag([1.0, -2.0])
        ctx = self_adjoint_context({"a": H})
        assert np.allclose(evaluate(parse_poly("X_a*X_a"), ctx, np.eye(2)), H @ H)

    def test_missing_symbol(self):
        with pytest.raises(MissingSymbolError):
            evaluate(parse_poly("X_z"), star_context({"a": np.eye(2)}), np.eye(2))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            evaluate(parse_poly("X_a"), star_context({"a": np.eye(3)}), np.eye(2))

    def test_lipschitz_bound(self):
        rng = np.random.default_rng(7)
        A = rng.standard_normal((6, 6))
        A = A / np.linalg.norm(A, 2)
        p = parse_poly("X_a*X_a + X_a*")
        q = parse_poly("X_a*X_a + 0.9*X_a*")
        lhs, rhs = lipschitz_check(p, q, star_context({"a": A}), np.eye(6), 1.0)
        assert lhs <= rhs + 1e-12
