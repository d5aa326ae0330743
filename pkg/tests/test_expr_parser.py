"""
Text grammars: words, group algebra sums and *-polynomials.
"""

import pytest

from errors import ExpressionSyntaxError
from expr_parser import parse_algebra_text, parse_poly_text, parse_word_text
from graph_core import SimpleGraph


class TestWords:
    def test_letters_and_inverses(self):
        assert parse_word_text("a b' c") == [("a", 1), ("b", -1), ("c", 1)]

    def test_empty_word(self):
        assert parse_word_text("   ") == []

    def test_bad_token_position(self):
        with pytest.raises(ExpressionSyntaxError) as err:
            parse_word_text("a ''")
        assert err.value.position == 2


class TestAlgebra:
    def test_terms_and_signs(self):
        terms = parse_algebra_text("1*[a] - 2*[a b'] + [ ]")
        assert terms == [(1.0, [("a", 1)]), (-2.0, [("a", 1), ("b", -1)]), (1.0, [])]

    def test_complex_coefficient(self):
        ((coeff, letters),) = parse_algebra_text("(0.5-2i)*[a]")
        assert coeff == pytest.approx(0.5 - 2j)
        assert letters == [("a", 1)]

    def test_unterminated_bracket(self):
        with pytest.raises(ExpressionSyntaxError):
            parse_algebra_text("1*[a")

    def test_missing_star(self):
        with pytest.raises(ExpressionSyntaxError):
            parse_algebra_text("2[a]")

    def test_empty(self):
        with pytest.raises(ExpressionSyntaxError):
            parse_algebra_text("")


class TestPolynomials:
    def test_product_and_adjoint(self):
        terms = parse_poly_text("X_a*X_b + 2*X_c*")
        assert terms == {(("a", False), ("b", False)): 1.0, (("c", True),): 2.0}

    def test_parentheses_distribute(self):
        terms = parse_poly_text("(X_a + X_b)*(X_a - X_b)")
        assert terms[(("a", False), ("a", False))] == 1.0
        assert terms[(("b", False), ("a", False))] == 1.0
        assert terms[(("a", False), ("b", False))] == -1.0
        assert terms[(("b", False), ("b", False))] == -1.0

    def test_star_followed_by_operand_is_a_product(self):
        assert parse_poly_text("X_a*X_a*") == {(("a", False), ("a", True)): 1.0}

    def test_constant(self):
        assert parse_poly_text("3") == {(): 3.0}

    def test_juxtaposition_rejected(self):
        with pytest.raises(ExpressionSyntaxError):
            parse_poly_text("X_a X_b")

    def test_trailing_garbage(self):
        with pytest.raises(ExpressionSyntaxError):
            parse_poly_text("X_a + ")


class TestVertexNames:
    def test_hyphenated_variable(self):
        assert parse_poly_text("X_v-1*X_b") == {(("v-1", False), ("b", False)): 1.0}

    def test_hyphen_before_variable_is_subtraction(self):
        assert parse_poly_text("X_a-X_b") == {(("a", False),): 1.0, (("b", False),): -1.0}

    def test_spaced_minus_is_subtraction(self):
        assert parse_poly_text("X_a - 1") == {(("a", False),): 1.0, (): -1.0}

    def test_hyphenated_letter(self):
        assert parse_word_text("v-1' b") == [("v-1", -1), ("b", 1)]

    @pytest.mark.parametrize("name", ["v-1", "a.b", "x_2", "node-a-3", "v[1]"])
    def test_graph_names_are_parseable(self, name):
        g = SimpleGraph([name, "b"])
        assert parse_poly_text(f"X_{name}*X_b") == {((g.vertices[0], False), ("b", False)): 1.0}
        assert parse_poly_text(f"X_{name}*") == {((name, True),): 1.0}

    @pytest.mark.parametrize("name", ["v-1", "a.b", "node-a-3", "v*"])
    def test_word_letters_take_graph_names(self, name):
        assert parse_word_text(f"{name}' b") == [(name, -1), ("b", 1)]
