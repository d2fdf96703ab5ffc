"""Function oracles: rational expressions over named variables x1..xn,
with an optional single guard value covering a removable-singularity
point.

Grammar (whitespace between tokens is ignored):

    expr     := term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := '-' factor | base ('^' factor)?
    base     := rational | var | '(' expr ')'
    var      := 'x' digits
    rational := digits ('/' digits)? | digits '.' digits

Power binds tighter than unary minus and is right-associative; the other
binary operators are left-associative.  A rational literal uses maximal
munch: "2/3" with no intervening whitespace is one literal, so "2/3^2"
is (2/3)^2, while "2 / 3^2" divides by 3^2.  Exponents must fold to
non-negative integers at parse time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from ._linalg import frac
from .geometry import PoleError


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    arg: "Expression"


@dataclass(frozen=True)
class Add:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Sub:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Mul:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Div:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Pow:
    base: "Expression"
    exponent: int


Expression = Union[Const, Var, Neg, Add, Sub, Mul, Div, Pow]


# ---------------------------------------------------------------------------
# lexer / parser

_DIGITS = set("0123456789")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> tuple[str, int]:
        """Returns (kind, position) without consuming; kind is one of
        'number', 'var', an operator character, or 'end'."""
        self._skip_ws()
        if self.pos >= len(self.text):
            return "end", self.pos
        ch = self.text[self.pos]
        if ch in _DIGITS:
            return "number", self.pos
        if ch == "x":
            return "var", self.pos
        if ch in "+-*/^()":
            return ch, self.pos
        return "bad", self.pos

    def take_op(self, expected: str) -> int:
        kind, pos = self.peek()
        if kind != expected:
            raise ParseError(f"expected '{expected}'", pos)
        self.pos = pos + 1
        return pos

    def _digits(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in _DIGITS:
            self.pos += 1
        return self.text[start:self.pos]

    def take_number(self) -> tuple[Fraction, int]:
        kind, pos = self.peek()
        if kind != "number":
            raise ParseError("expected a number", pos)
        self.pos = pos
        whole = self._digits()
        if self.pos < len(self.text) and self.text[self.pos] == ".":
            self.pos += 1
            fracpart = self._digits()
            if not fracpart:
                raise ParseError("expected digits after decimal point", self.pos)
            return Fraction(f"{whole}.{fracpart}"), pos
        # maximal munch for p/q with no intervening whitespace
        if (
            self.pos + 1 < len(self.text)
            and self.text[self.pos] == "/"
            and self.text[self.pos + 1] in _DIGITS
        ):
            self.pos += 1
            denom = self._digits()
            if int(denom) == 0:
                raise ParseError("rational literal with zero denominator", pos)
            return Fraction(int(whole), int(denom)), pos
        return Fraction(int(whole)), pos

    def take_var(self) -> tuple[int, int]:
        kind, pos = self.peek()
        if kind != "var":
            raise ParseError("expected a variable", pos)
        self.pos = pos + 1
        digits = self._digits()
        if not digits:
            raise ParseError("expected a variable index after 'x'", self.pos)
        return int(digits), pos


class _Parser:
    def __init__(self, text: str, dimension: int):
        self.lex = _Lexer(text)
        self.n = dimension

    def parse(self) -> Expression:
        e = self.expr()
        kind, pos = self.lex.peek()
        if kind != "end":
            raise ParseError("unexpected trailing input", pos)
        return e

    def expr(self) -> Expression:
        e = self.term()
        while True:
            kind, _ = self.lex.peek()
            if kind == "+":
                self.lex.take_op("+")
                e = Add(e, self.term())
            elif kind == "-":
                self.lex.take_op("-")
                e = Sub(e, self.term())
            else:
                return e

    def term(self) -> Expression:
        e = self.factor()
        while True:
            kind, _ = self.lex.peek()
            if kind == "*":
                self.lex.take_op("*")
                e = Mul(e, self.factor())
            elif kind == "/":
                self.lex.take_op("/")
                e = Div(e, self.factor())
            else:
                return e

    def factor(self) -> Expression:
        kind, _ = self.lex.peek()
        if kind == "-":
            self.lex.take_op("-")
            return Neg(self.factor())
        base = self.base()
        kind, pos = self.lex.peek()
        if kind == "^":
            self.lex.take_op("^")
            exp_pos = self.lex.peek()[1]
            exponent = self.factor()
            value = constant_value(exponent)
            if value is None:
                raise ParseError("exponent must be a constant", exp_pos)
            if value.denominator != 1 or value < 0:
                raise ParseError("exponent must be a non-negative integer", exp_pos)
            return Pow(base, int(value))
        return base

    def base(self) -> Expression:
        kind, pos = self.lex.peek()
        if kind == "number":
            value, _ = self.lex.take_number()
            return Const(value)
        if kind == "var":
            index, vpos = self.lex.take_var()
            if index < 1:
                raise ParseError("variable indices start at x1", vpos)
            if index > self.n:
                raise ParseError(
                    f"variable x{index} exceeds dimension {self.n}", vpos
                )
            return Var(index)
        if kind == "(":
            self.lex.take_op("(")
            e = self.expr()
            self.lex.take_op(")")
            return e
        if kind == "bad":
            raise ParseError("unknown identifier", pos)
        raise ParseError("expected an operand", pos)


def parse_expression(text: str, dimension: int) -> Expression:
    if dimension < 1:
        raise OracleError("dimension must be at least 1")
    return _Parser(text, dimension).parse()


# ---------------------------------------------------------------------------
# printing

_LEVEL_ADD, _LEVEL_MUL, _LEVEL_NEG, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _level(e: Expression) -> int:
    if isinstance(e, (Add, Sub)):
        return _LEVEL_ADD
    if isinstance(e, (Mul, Div)):
        return _LEVEL_MUL
    if isinstance(e, Neg):
        return _LEVEL_NEG
    if isinstance(e, Pow):
        return _LEVEL_POW
    if isinstance(e, Const) and e.value.denominator != 1:
        return _LEVEL_MUL  # prints as p/q
    return _LEVEL_ATOM


def to_text(e: Expression) -> str:
    """Canonical rendering; parsing the output reproduces any parser-built
    tree.  Division is spaced ("a / b") so it never fuses with adjacent
    digits into a rational literal; only literals print as "p/q"."""

    def wrap(child: Expression, minimum: int) -> str:
        s = to_text(child)
        return f"({s})" if _level(child) < minimum else s

    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Neg):
        return "-" + wrap(e.arg, _LEVEL_NEG)
    if isinstance(e, Add):
        return f"{wrap(e.left, _LEVEL_ADD)} + {wrap(e.right, _LEVEL_MUL)}"
    if isinstance(e, Sub):
        return f"{wrap(e.left, _LEVEL_ADD)} - {wrap(e.right, _LEVEL_MUL)}"
    if isinstance(e, Mul):
        return f"{wrap(e.left, _LEVEL_MUL)} * {wrap(e.right, _LEVEL_NEG)}"
    if isinstance(e, Div):
        return f"{wrap(e.left, _LEVEL_MUL)} / {wrap(e.right, _LEVEL_NEG)}"
    if isinstance(e, Pow):
        return f"{wrap(e.base, _LEVEL_ATOM)}^{e.exponent}"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# analysis and evaluation

def constant_value(e: Expression) -> Fraction | None:
    """Fold to a rational constant, or None when variables occur or a
    constant subexpression divides by zero."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return None
    if isinstance(e, Neg):
        v = constant_value(e.arg)
        return None if v is None else -v
    if isinstance(e, Pow):
        v = constant_value(e.base)
        return None if v is None else v ** e.exponent
    if isinstance(e, (Add, Sub, Mul, Div)):
        a = constant_value(e.left)
        b = constant_value(e.right)
        if a is None or b is None:
            return None
        if isinstance(e, Add):
            return a + b
        if isinstance(e, Sub):
            return a - b
        if isinstance(e, Mul):
            return a * b
        if b == 0:
            return None
        return a / b
    raise TypeError(f"not an expression node: {e!r}")


def degree_bound(e: Expression) -> int | None:
    """Total-degree bound when e is polynomial (all divisors fold to nonzero
    constants); None otherwise."""
    if isinstance(e, Const):
        return 0
    if isinstance(e, Var):
        return 1
    if isinstance(e, Neg):
        return degree_bound(e.arg)
    if isinstance(e, Pow):
        d = degree_bound(e.base)
        return None if d is None else d * e.exponent
    if isinstance(e, (Add, Sub)):
        a, b = degree_bound(e.left), degree_bound(e.right)
        return None if a is None or b is None else max(a, b)
    if isinstance(e, Mul):
        a, b = degree_bound(e.left), degree_bound(e.right)
        return None if a is None or b is None else a + b
    if isinstance(e, Div):
        denom = constant_value(e.right)
        if denom is None or denom == 0:
            return None
        return degree_bound(e.left)
    raise TypeError(f"not an expression node: {e!r}")


def is_polynomial(e: Expression) -> bool:
    return degree_bound(e) is not None


def _eval(e: Expression, point: Sequence, exact: bool):
    if isinstance(e, Const):
        return e.value if exact else float(e.value)
    if isinstance(e, Var):
        return point[e.index - 1]
    if isinstance(e, Neg):
        return -_eval(e.arg, point, exact)
    if isinstance(e, Add):
        return _eval(e.left, point, exact) + _eval(e.right, point, exact)
    if isinstance(e, Sub):
        return _eval(e.left, point, exact) - _eval(e.right, point, exact)
    if isinstance(e, Mul):
        return _eval(e.left, point, exact) * _eval(e.right, point, exact)
    if isinstance(e, Div):
        denom = _eval(e.right, point, exact)
        if denom == 0:
            raise PoleError("division by zero", point)
        return _eval(e.left, point, exact) / denom
    if isinstance(e, Pow):
        return _eval(e.base, point, exact) ** e.exponent
    raise TypeError(f"not an expression node: {e!r}")


def substitute(e: Expression, mapping: dict[int, Expression]) -> Expression:
    """Replace variables by expressions (indices absent from the mapping are
    kept)."""
    if isinstance(e, Const):
        return e
    if isinstance(e, Var):
        return mapping.get(e.index, e)
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, mapping))
    if isinstance(e, Add):
        return Add(substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, Sub):
        return Sub(substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, Mul):
        return Mul(substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, Div):
        return Div(substitute(e.left, mapping), substitute(e.right, mapping))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, mapping), e.exponent)
    raise TypeError(f"not an expression node: {e!r}")


@dataclass(frozen=True)
class FunctionOracle:
    """A rational expression in n variables with an optional guard: a single
    point where the expression may be undefined but the function value is
    pinned explicitly."""

    expression: Expression
    dimension: int
    guard: tuple[tuple[Fraction, ...], Fraction] | None = None

    def __post_init__(self) -> None:
        if self.guard is not None:
            point, value = self.guard
            point = tuple(frac(x) for x in point)
            if len(point) != self.dimension:
                raise OracleError("guard point dimension mismatch")
            object.__setattr__(self, "guard", (point, frac(value)))

    def evaluate(self, point: Sequence, mode: str = "exact"):
        return evaluate_oracle(self, point, mode)

    def __call__(self, point: Sequence):
        return evaluate_oracle(self, point, "exact")


def oracle_from_text(text: str, dimension: int, guard=None) -> FunctionOracle:
    expr = parse_expression(text, dimension)
    return FunctionOracle(expr, dimension, guard)


def evaluate_oracle(f: FunctionOracle, point: Sequence, mode: str = "exact"):
    """Evaluate with the guard applied first.  Exact mode coerces the point
    to Fractions and returns a Fraction; float mode works in binary64 and
    matches the guard on exact input bits."""
    if len(point) != f.dimension:
        raise OracleError(
            f"point has length {len(point)}, oracle dimension is {f.dimension}"
        )
    if mode == "exact":
        p = tuple(frac(x) for x in point)
        if f.guard is not None and p == f.guard[0]:
            return f.guard[1]
        return _eval(f.expression, p, exact=True)
    if mode == "float":
        p = tuple(float(x) for x in point)
        if f.guard is not None and p == tuple(float(x) for x in f.guard[0]):
            return float(f.guard[1])
        return _eval(f.expression, p, exact=False)
    raise OracleError(f"unknown evaluation mode {mode!r}")


def translate(f: FunctionOracle, base: Sequence) -> FunctionOracle:
    """The oracle g(x) = f(base + x); the guard point moves with it."""
    b = tuple(frac(x) for x in base)
    if len(b) != f.dimension:
        raise OracleError("translation vector dimension mismatch")
    mapping = {
        i + 1: (Add(Var(i + 1), Const(b[i])) if b[i] != 0 else Var(i + 1))
        for i in range(f.dimension)
    }
    expr = substitute(f.expression, mapping)
    guard = None
    if f.guard is not None:
        point, value = f.guard
        guard = (tuple(x - y for x, y in zip(point, b)), value)
    return FunctionOracle(expr, f.dimension, guard)


def builtin_counterexample(name: str, dimension: int = 3) -> FunctionOracle:
    """The two standard stress oracles.

    "hartogs-f" (any n >= 2): product of coordinates over the sum of 2n-th
    powers, guarded to 0 at the origin.  Restricted to any translate of a
    coordinate hyperplane it is real analytic, yet it is unbounded near the
    origin along the diagonal.

    "curve-g" (n = 3): analytic along every nonsingular analytic curve but
    discontinuous at the origin, blowing up along a cusp.
    """
    if name == "hartogs-f":
        n = dimension
        if n < 2:
            raise OracleError("hartogs-f needs dimension at least 2")
        num = "*".join(f"x{i}" for i in range(1, n + 1))
        den = " + ".join(f"x{i}^{2 * n}" for i in range(1, n + 1))
        return oracle_from_text(f"({num})/({den})", n, guard=((0,) * n, 0))
    if name == "curve-g":
        if dimension != 3:
            raise OracleError("curve-g is defined in dimension 3")
        text = (
            "(x1^8 + x2*(x1^2 - x2^3)^2 + x3^4)"
            "/(x1^10 + (x1^2 - x2^3)^2 + x3^2)"
        )
        return oracle_from_text(text, 3, guard=((0, 0, 0), 0))
    raise OracleError(f"unknown builtin oracle {name!r}")
