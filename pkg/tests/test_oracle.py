import math
import random
from fractions import Fraction

import pytest
import sympy

from analytica.geometry import PoleError
from analytica.oracle import (
    Const,
    OracleError,
    ParseError,
    Var,
    builtin_counterexample,
    degree_bound,
    evaluate_oracle,
    is_polynomial,
    oracle_from_text,
    parse_expression,
    substitute,
    to_text,
    translate,
)

from conftest import rand_point


def test_parser_arithmetic():
    cases = [
        ("x1^2+x2*x3", (2, 3, 5), 2**2 + 3 * 5),
        ("2*x1+3", (7,), 17),
        ("2*(x1+3)", (7,), 20),
        ("-x1^2", (3,), -9),
        ("(-x1)^2", (3,), 9),
        ("x1 - x2 - x3", (10, 3, 2), 5),
        ("x1/2 + 1/2", (3,), 2),
        ("x1^2^3", (2,), 2**8),
        ("3/4*x1", (8,), 6),
    ]
    for text, point, expect in cases:
        f = oracle_from_text(text, len(point))
        assert f.evaluate(point) == expect, text


def test_parser_reports_position():
    with pytest.raises(ParseError, match=r"offset 6"):
        parse_expression("x1^2 ++ x2", 3)
    with pytest.raises(ParseError):
        parse_expression("x9 + 1", 3)
    with pytest.raises(ParseError):
        parse_expression("(x1 + 2", 3)
    with pytest.raises(ParseError):
        parse_expression("x1 $ 2", 3)


def test_exact_and_float_modes_agree():
    rng = random.Random(301)
    f = oracle_from_text("(x1^2 - x2/3) / (2 + x3^2)", 3)
    for _ in range(40):
        p = rand_point(rng, 3, bound=9)
        exact = evaluate_oracle(f, p)
        approx = evaluate_oracle(f, tuple(map(float, p)), mode="float")
        assert math.isclose(float(exact), approx, rel_tol=1e-12, abs_tol=1e-12)


def test_pole_error_carries_point():
    f = oracle_from_text("1/(x1 - 1)", 2)
    with pytest.raises(PoleError) as err:
        f.evaluate((1, 5))
    assert err.value.point == (1, 5)


def test_guard_value_wins_at_its_point():
    f = oracle_from_text("x1*x2/(x1^2+x2^2)", 2, guard=((0, 0), 0))
    assert f.evaluate((0, 0)) == 0
    assert evaluate_oracle(f, (0.0, 0.0), mode="float") == 0.0
    # off the guard the expression rules
    assert f.evaluate((1, 1)) == Fraction(1, 2)


def test_guard_dimension_checked():
    with pytest.raises(OracleError):
        oracle_from_text("x1", 2, guard=((0, 0, 0), 0))


def test_translate_shifts_argument():
    rng = random.Random(302)
    f = oracle_from_text("x1^3 - x2*x3 + 1/(2+x1)", 3)
    b = (Fraction(1, 2), Fraction(-2, 3), Fraction(5))
    g = translate(f, b)
    for _ in range(25):
        p = rand_point(rng, 3, bound=8)
        try:
            expect = f.evaluate(tuple(x + y for x, y in zip(p, b)))
        except PoleError:
            continue
        assert g.evaluate(p) == expect


def test_translate_moves_guard():
    f = oracle_from_text("x1/x1", 1, guard=((0,), 1))
    g = translate(f, (Fraction(3),))
    assert g.guard == ((Fraction(-3),), Fraction(1))
    assert g.evaluate((-3,)) == 1


def test_substitute_is_composition():
    rng = random.Random(303)
    f = parse_expression("x1^2 + 3*x2", 2)
    sub = {1: parse_expression("x1 + x2", 2), 2: parse_expression("x1*x2", 2)}
    g = substitute(f, sub)
    for _ in range(25):
        a, b = rand_point(rng, 2, bound=9)
        got = oracle_from_text(to_text(g), 2).evaluate((a, b))
        assert got == (a + b) ** 2 + 3 * (a * b)


def test_degree_bound_and_polynomial_flag():
    assert degree_bound(parse_expression("x1^2*x2 + x3", 3)) == 3
    assert degree_bound(parse_expression("(x1+1)^4", 3)) == 4
    assert degree_bound(parse_expression("x1/2", 3)) == 1
    assert degree_bound(parse_expression("1/(1+x1)", 3)) is None
    assert is_polynomial(parse_expression("x1*x2", 3))
    assert not is_polynomial(parse_expression("x1/(x2)", 3))


def test_to_text_round_trip():
    rng = random.Random(304)
    texts = [
        "x1^2+x2*x3",
        "1/(1-x1)",
        "-(x1 - x2)/(x3^2 + 1/4)",
        "x1^2^2 - 5",
        "(x1*x2*x3)/(x1^6+x2^6+x3^6)",
    ]
    for text in texts:
        e = parse_expression(text, 3)
        again = parse_expression(to_text(e), 3)
        for _ in range(10):
            p = rand_point(rng, 3, bound=7)
            try:
                lhs = oracle_from_text(text, 3).evaluate(p)
            except PoleError:
                continue
            assert oracle_from_text(to_text(again), 3).evaluate(p) == lhs


# ---------------------------------------------------------------------------
# builtin counterexamples, cross-checked against sympy


def _sympy_oracle(f):
    xs = sympy.symbols(f"x1:{f.dimension + 1}")
    expr = sympy.sympify(
        to_text(f.expression).replace("^", "**"), locals={s.name: s for s in xs}
    )
    return xs, expr


def test_hartogs_builtin_values():
    f = builtin_counterexample("hartogs-f")
    assert f.guard == ((0, 0, 0), 0)
    xs, expr = _sympy_oracle(f)
    rng = random.Random(305)
    for _ in range(20):
        p = rand_point(rng, 3, bound=9)
        if all(x == 0 for x in p):
            continue
        expect = sympy.Rational(expr.subs(dict(zip(xs, [sympy.Rational(x) for x in p]))))
        assert f.evaluate(p) == Fraction(int(expect.p), int(expect.q))
    # the diagonal collapses to 1/(3 t^3)
    for k in range(1, 6):
        t = Fraction(1, k)
        assert f.evaluate((t, t, t)) == 1 / (3 * t**3)
    assert f.evaluate((0, 0, 0)) == 0


def test_curve_builtin_values():
    g = builtin_counterexample("curve-g")
    assert g.guard == ((0, 0, 0), 0)
    rng = random.Random(306)
    xs, expr = _sympy_oracle(g)
    for _ in range(12):
        p = rand_point(rng, 3, bound=5)
        if all(x == 0 for x in p):
            continue
        expect = sympy.Rational(expr.subs(dict(zip(xs, [sympy.Rational(x) for x in p]))))
        assert g.evaluate(p) == Fraction(int(expect.p), int(expect.q))
    # hand-derived restrictions: axis t^4/(1+t^6), cusp (1+t^36)/(2 t^6)
    for t in (Fraction(1, 2), Fraction(1, 10), Fraction(1, 100)):
        assert g.evaluate((t, 0, 0)) == t**4 / (1 + t**6)
        assert g.evaluate((t**3, t**2, t**15)) == (1 + t**36) / (2 * t**6)


def test_curve_axis_vs_cusp_separation():
    g = builtin_counterexample("curve-g")
    t = Fraction(1, 2)
    assert g.evaluate((t**3, t**2, t**15)) == 32 * (1 + Fraction(1, 2**36))


def test_builtin_rejects_unknown_name_and_bad_dimension():
    with pytest.raises(OracleError):
        builtin_counterexample("nope")
    with pytest.raises(OracleError):
        builtin_counterexample("curve-g", 4)
