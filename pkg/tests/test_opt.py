"""Operator tree conversion: precedence, associativity, named structures."""

import pytest

from formulabench.errors import OptFailureError
from formulabench.latex.normalize import normalize_tokens
from formulabench.latex.opt import serialize_opt, slt_to_opt
from formulabench.latex.slt import parse_slt
from formulabench.latex.tokens import tokenize_latex


def opt(src):
    return slt_to_opt(parse_slt(normalize_tokens(tokenize_latex(src))))


def oser(src):
    return serialize_opt(opt(src))


def test_single_operand():
    assert oser("x") == "D!x"
    assert oser("42") == "D!42"


def test_pythagoras_operator_tree():
    assert oser("a^2 + b^2 = c^2") == (
        "O!=(O!+(O!^(D!a,D!2),O!^(D!b,D!2)),O!^(D!c,D!2))"
    )


def test_relations_bind_loosest():
    assert oser("a+b=c") == "O!=(O!+(D!a,D!b),D!c)"
    assert oser("a<b+c") == "O!<(D!a,O!+(D!b,D!c))"


def test_multiplication_binds_tighter_than_addition():
    assert oser("a+b c") == "O!+(D!a,O!times(D!b,D!c))"
    assert oser(r"a \cdot b + c") == "O!+(O!cdot(D!a,D!b),D!c)"


def test_implicit_multiplication_inserted():
    assert oser("2b^2") == "O!times(D!2,O!^(D!b,D!2))"
    assert oser("a b") == "O!times(D!a,D!b)"
    assert oser("2(x+1)") == "O!times(D!2,O!+(D!x,D!1))"


def test_left_associativity():
    assert oser("a-b-c") == "O!-(O!-(D!a,D!b),D!c)"
    assert oser("a+b+c+d") == "O!+(O!+(O!+(D!a,D!b),D!c),D!d)"
    assert oser("a b c") == "O!times(O!times(D!a,D!b),D!c)"


def test_unary_prefix_minus():
    assert oser("-a") == "O!-(D!a)"
    assert oser("-a+b") == "O!+(O!-(D!a),D!b)"
    assert oser("a+-b") == "O!+(D!a,O!-(D!b))"
    assert oser("-a b") == "O!-(O!times(D!a,D!b))"


def test_postfix_factorial():
    assert oser("n!") == "O!!(D!n)"
    assert oser("n!+1") == "O!+(O!!(D!n),D!1)"
    assert oser("a b!") == "O!times(D!a,O!!(D!b))"


def test_fraction_and_binom():
    assert oser(r"\frac{a+1}{b}") == "O!/(O!+(D!a,D!1),D!b)"
    assert oser(r"\binom{n}{k}") == "O!binom(D!n,D!k)"
    assert oser(r"\frac{n}{k}") != oser(r"\binom{n}{k}")


def test_radicals():
    assert oser(r"\sqrt{x+1}") == "O!sqrt(O!+(D!x,D!1))"
    assert oser(r"\sqrt[3]{x+1}") == "O!root(D!3,O!+(D!x,D!1))"


def test_parens_only_shape_grouping():
    assert oser("(a+b) c") == "O!times(O!+(D!a,D!b),D!c)"
    assert oser("(a)") == "D!a"
    assert oser("((a+b))") == oser("(a+b)")


def test_function_application():
    assert oser(r"\sin x") == "A!sin(D!x)"
    assert oser(r"\sin(x+y)") == "A!sin(O!+(D!x,D!y))"
    assert oser(r"\log n + 1") == "O!+(A!log(D!n),D!1)"


def test_scripts_stay_outside_function_application():
    # sin^2 x applies sin first, the power second
    assert oser(r"\sin^2 x") == "O!^(A!sin(D!x),D!2)"


def test_big_operator_fixed_arity():
    assert oser(r"\sum_{i=1}^{n} i^2") == "O!sum(O!=(D!i,D!1),D!n,O!^(D!i,D!2))"
    # missing limits become empty operands so placement differences never collide
    assert oser(r"\sum_{i} x") == "O!sum(D!i,D!,D!x)"
    assert oser(r"\sum^{n} x") != oser(r"\sum_{n} x")


def test_big_operator_spans_rest_of_expression():
    s = oser(r"\sum_{i=1}^{n} i + 1")
    # the + 1 belongs to the summand, not to the sum
    assert s.startswith("O!sum(")


def test_integral():
    s = oser(r"\int_0^1 x")
    assert s.startswith("O!int(D!0,D!1,")


def test_scripts_on_operands():
    assert oser("x_i") == "O!_(D!x,D!i)"
    assert oser("x_i^2") == "O!^(O!_(D!x,D!i),D!2)"


def test_dangling_infix_operator_fails():
    with pytest.raises(OptFailureError):
        opt("a+")
    with pytest.raises(OptFailureError):
        opt("+")
    with pytest.raises(OptFailureError):
        opt("a+=b")


def test_decimal_point_fails_conversion():
    # "3.14" reads as 3 . 14 on the layout line; the operator pass rejects it.
    with pytest.raises(OptFailureError):
        opt("3.14")


def test_wildcard_operand():
    assert oser("*1*+x") == "O!+(W!1,D!x)"


def test_conversion_is_deterministic():
    for src in ("a+b=c", r"\frac{a}{b}", r"\sum_{i=1}^n i", "2b^2"):
        assert oser(src) == oser(src)


def test_distinct_layouts_same_operator_tree():
    # extra parens and explicit multiplication glyph collapse differently:
    assert oser("(a+b)") == oser("a+b")
    assert oser("a(b)") == oser("a b")
