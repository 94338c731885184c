import math
import random

import pytest

from freefall.errors import DomainError, LexError, MetricSpecError, SyntaxParseError, UnboundNameError
from freefall.exprparse import (
    FUNCTIONS,
    ZERO,
    BinOp,
    Call,
    Const,
    Name,
    Neg,
    Num,
    evaluate,
    evaluate_constant,
    format_expr,
    format_metric_spec,
    free_names,
    parse_expr,
    parse_metric_spec,
    tokenize,
)
from freefall.metrics import BUILTIN_METRICS, builtin_spec_text

SCHWARZSCHILD = """\
coords = t,r,theta,phi
param rs = 1.0
g[0][0] = 1 - rs/r
g[1][1] = -1/(1 - rs/r)
g[2][2] = -r^2
g[3][3] = -r^2*sin(theta)^2
"""


def value(source, **bindings):
    return evaluate(parse_expr(source), bindings)


# Tokenizer
def test_tokenize_kinds_and_offsets():
    tokens = tokenize("2*r")
    assert [t.kind for t in tokens] == ["num", "op", "ident"]
    assert tokens[0].value == 2.0
    assert [t.offset for t in tokens] == [0, 1, 2]


def test_tokenize_scientific_literal():
    (tok,) = tokenize("1.5e-3")
    assert tok.kind == "num"
    assert tok.value == 0.0015


def test_tokenize_illegal_character_reports_offset():
    with pytest.raises(LexError) as exc:
        tokenize("r @ 2")
    assert exc.value.offset == 2


def test_tokenize_offsets_are_bytes():
    with pytest.raises(LexError) as exc:
        tokenize("θ")
    assert exc.value.offset == 0
    with pytest.raises(LexError) as exc:
        tokenize("r+θ")
    assert exc.value.offset == 2


# Precedence and associativity
def test_precedence_table():
    assert value("2+3*4") == 14
    assert value("2^3^2") == 512
    assert value("-2^2") == -4
    assert value("1-2-3") == -4
    assert value("8/4/2") == 1
    assert value("2*-3") == -6
    assert value("2^-1") == 0.5


def test_eval_examples():
    assert value("1 - rs/r", rs=1.0, r=2.0) == 0.5
    assert value("sin(pi/2)") == 1.0
    with pytest.raises(DomainError):
        value("sqrt(-1)")


def test_domain_errors_name_the_subexpression():
    with pytest.raises(DomainError) as exc:
        value("1 + log(x - 1)", x=1.0)
    assert exc.value.expr == "log(x - 1)"
    with pytest.raises(DomainError):
        value("1/(r - 2)", r=2.0)
    with pytest.raises(DomainError):
        value("exp(1000)")
    with pytest.raises(DomainError):
        value("(-8)^(1/3)")


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_non_finite_bindings_are_rejected(bad):
    with pytest.raises(DomainError) as exc:
        value("r", r=bad)
    assert exc.value.expr == "r"
    with pytest.raises(DomainError):
        value("0*r + 1", r=bad)


def test_unbound_identifier():
    with pytest.raises(UnboundNameError):
        value("r + 1")


def test_parse_errors():
    with pytest.raises(SyntaxParseError, match="unbalanced"):
        parse_expr("(1 + 2")
    with pytest.raises(SyntaxParseError, match="unbalanced"):
        parse_expr("1 + 2)")
    with pytest.raises(SyntaxParseError, match="unknown function"):
        parse_expr("foo(1)")
    with pytest.raises(SyntaxParseError, match="arity"):
        parse_expr("sin(1, 2)")
    with pytest.raises(SyntaxParseError, match="arity"):
        parse_expr("cos()")
    with pytest.raises(SyntaxParseError):
        parse_expr("")
    with pytest.raises(SyntaxParseError) as exc:
        parse_expr("1 + * 2")
    assert exc.value.offset == 4


def test_pi_is_reserved_and_names_are_case_sensitive():
    assert parse_expr("pi") == Const("pi")
    assert parse_expr("Pi") == Name("Pi")
    assert free_names(parse_expr("R*r + pi")) == {"R", "r"}


def test_evaluate_constant():
    assert evaluate_constant("pi/2") == math.pi / 2
    assert evaluate_constant("1.5e-3") == 0.0015
    with pytest.raises(SyntaxParseError):
        evaluate_constant("r/2")


# Round trip
NAMES = ["t", "r", "theta", "rs", "a"]
OPS = ["+", "-", "*", "/", "^"]


def random_ast(rng, depth):
    if depth <= 0 or rng.random() < 0.25:
        kind = rng.randrange(3)
        if kind == 0:
            return Num(rng.choice([0.0, 1.0, 2.0, 0.5, 1e-05, 3.25, 1e20, rng.random() * 10]))
        if kind == 1:
            return Name(rng.choice(NAMES))
        return Const("pi")
    kind = rng.randrange(3)
    if kind == 0:
        return Neg(random_ast(rng, depth - 1))
    if kind == 1:
        return Call(rng.choice(sorted(FUNCTIONS)), random_ast(rng, depth - 1))
    return BinOp(rng.choice(OPS), random_ast(rng, depth - 1), random_ast(rng, depth - 1))


def test_round_trip_random_asts():
    rng = random.Random(1234)
    for _ in range(1000):
        ast = random_ast(rng, 6)
        text = format_expr(ast)
        assert parse_expr(text) == ast, text


def test_round_trip_evaluation_is_bit_exact():
    rng = random.Random(99)
    checked = 0
    for _ in range(2000):
        ast = random_ast(rng, 4)
        env = {n: rng.uniform(0.1, 3.0) for n in NAMES}
        try:
            expected = evaluate(ast, env)
        except (DomainError, UnboundNameError):
            continue
        assert evaluate(parse_expr(format_expr(ast)), env) == expected
        checked += 1
    assert checked > 200


def test_format_uses_minimal_parentheses():
    assert format_expr(parse_expr("(1 - rs/r)")) == "1 - rs/r"
    assert format_expr(parse_expr("-(r^2)")) == "-r^2"
    assert format_expr(parse_expr("(-r)^2")) == "(-r)^2"
    assert format_expr(parse_expr("a - (b - c)")) == "a - (b - c)"
    assert format_expr(parse_expr("(a^b)^c")) == "(a^b)^c"
    assert format_expr(parse_expr("a^b^c")) == "a^b^c"


# Metric specs
def test_parse_schwarzschild_spec():
    spec = parse_metric_spec(SCHWARZSCHILD)
    assert spec.coords == ("t", "r", "theta", "phi")
    assert spec.params == {"rs": 1.0}
    assert spec.component(0, 0) == parse_expr("1 - rs/r")
    assert spec.component(0, 1) == ZERO
    assert spec.is_diagonal()


def test_symmetric_assignment():
    spec = parse_metric_spec("coords = t,x,y,z\ng[1][0] = 0.5\ng[0][0] = 1\n")
    assert spec.component(0, 1) == spec.component(1, 0) == Num(0.5)
    g = spec.metric_at([0, 0, 0, 0])
    assert g[0, 1] == g[1, 0] == 0.5
    assert not spec.is_diagonal()


def test_comments_and_blank_lines_are_skipped():
    spec = parse_metric_spec("# header\n\ncoords = t,x,y,z  # chart\ng[0][0] = 1 # time\n")
    assert spec.component(0, 0) == Num(1.0)


@pytest.mark.parametrize(
    "source, message",
    [
        (SCHWARZSCHILD + "g[0][0] = 1\n", "duplicate"),
        ("coords = t,r\n", "4 names"),
        ("param a = 1\ng[0][0] = 1\n", "missing coords"),
        ("coords = t,x,y,z\ng[0][4] = 1\n", "outside 0..3"),
        ("coords = t,x,y,z\ng[0][0] = 1 + q\n", "undeclared"),
        ("coords = t,x,t,z\n", "distinct"),
        ("coords = t,x,y,z\nparam x = 1\n", "both"),
        ("coords = t,x,y,z\nparam a = 1\nparam a = 2\n", "duplicate parameter"),
        ("coords = t,x,y,z\nmetric = flat\n", "unrecognized"),
    ],
)
def test_metric_spec_errors(source, message):
    with pytest.raises(MetricSpecError, match=message):
        parse_metric_spec(source)


def test_metric_spec_errors_carry_line_numbers():
    with pytest.raises(MetricSpecError) as exc:
        parse_metric_spec(SCHWARZSCHILD + "g[0][0] = 1\n")
    assert exc.value.line == 7
    with pytest.raises(MetricSpecError) as exc:
        parse_metric_spec("coords = t,x,y,z\ng[0][0] = 1 +\n")
    assert exc.value.line == 2


def test_with_params_overrides_declared_parameters_only():
    spec = parse_metric_spec(SCHWARZSCHILD)
    heavier = spec.with_params({"rs": 2.0})
    assert heavier.params == {"rs": 2.0}
    assert spec.params == {"rs": 1.0}
    with pytest.raises(MetricSpecError):
        spec.with_params({"mass": 1.0})


@pytest.mark.parametrize("name", sorted(BUILTIN_METRICS))
def test_builtin_specs_round_trip(name):
    spec = parse_metric_spec(builtin_spec_text(name))
    again = parse_metric_spec(format_metric_spec(spec))
    assert again == spec
