"""
exprparse.py: A small expression language for metric components.

Grammar (highest binding first):

    atom    := number | identifier | pi | func "(" expr ")" | "(" expr ")"
    power   := atom ["^" unary]            right-associative
    unary   := "-" unary | power           so -2^2 == -(2^2) == -4
    term    := unary (("*" | "/") unary)*  left-associative
    expr    := term (("+" | "-") term)*    left-associative

Numbers are IEEE doubles (decimal or scientific notation). Identifiers are
case-sensitive; `pi` is reserved. Functions take exactly one argument:
sin cos tan sinh cosh tanh exp log sqrt abs.

Metric-spec files are line oriented, `#` starts a comment:

    coords = t,r,theta,phi
    param rs = 1.0
    g[0][0] = 1 - rs/r
    g[1][1] = -1/(1 - rs/r)

Indices are 0-based positions in the coords list. Writing g[0][1] also sets
g[1][0]; omitted components are zero.

Everything here is a pure function over immutable values.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DomainError,
    LexError,
    MetricSpecError,
    ParseError,
    SyntaxParseError,
    UnboundNameError,
)

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value) or math.copysign(1.0, self.value) < 0:
            raise ValueError(f"numeric literal must be finite and non-negative, got {self.value!r}")


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Const:
    name: str = "pi"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Name, Const, Neg, BinOp, Call]

ZERO = Num(0.0)

CONSTANTS: Dict[str, float] = {"pi": math.pi}


def _checked_log(x: float) -> float:
    if x <= 0.0:
        raise ValueError("log of non-positive value")
    return math.log(x)


def _checked_sqrt(x: float) -> float:
    if x < 0.0:
        raise ValueError("sqrt of negative value")
    return math.sqrt(x)


FUNCTIONS: Dict[str, Callable[[float], float]] = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sinh": math.sinh,
    "cosh": math.cosh,
    "tanh": math.tanh,
    "exp": math.exp,
    "log": _checked_log,
    "sqrt": _checked_sqrt,
    "abs": abs,
}

# ---------------------------------------------------------------------------
# Lexer


@dataclass(frozen=True)
class Token:
    kind: str  # num | ident | op | lparen | rparen | comma
    text: str
    offset: int  # byte offset into the UTF-8 source
    value: Optional[float] = None


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
    |(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    |(?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<op>[-+*/^])
    |(?P<lparen>\()
    |(?P<rparen>\))
    |(?P<comma>,)
    """,
    re.VERBOSE | re.ASCII,
)


def _byte_offset(source: str, pos: int) -> int:
    return len(source[:pos].encode("utf-8"))


def tokenize(source: str) -> List[Token]:
    """Split `source` into tokens; whitespace is dropped."""
    tokens: List[Token] = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if not m:
            raise LexError(f"unexpected character {source[pos]!r}", offset=_byte_offset(source, pos))
        kind = m.lastgroup
        text = m.group(kind)
        offset = _byte_offset(source, pos)
        pos = m.end()
        if kind == "ws":
            continue
        if kind == "num":
            value = float(text)
            if not math.isfinite(value):
                raise LexError(f"numeric literal {text!r} out of range", offset=offset)
            tokens.append(Token(kind, text, offset, value))
        else:
            tokens.append(Token(kind, text, offset))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens: Sequence[Token]):
        self.tokens = list(tokens)
        self.pos = 0
        self.end_offset = (self.tokens[-1].offset + len(self.tokens[-1].text.encode("utf-8"))) if self.tokens else 0

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_op(self, *ops: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "op" and tok.text in ops

    def fail(self, message: str, tok: Optional[Token] = None) -> SyntaxParseError:
        offset = tok.offset if tok is not None else self.end_offset
        return SyntaxParseError(message, offset=offset)

    def parse(self) -> Expr:
        if not self.tokens:
            raise self.fail("empty expression")
        node = self.expr()
        tok = self.peek()
        if tok is not None:
            if tok.kind == "rparen":
                raise self.fail("unbalanced parentheses: unexpected ')'", tok)
            raise self.fail(f"unexpected token {tok.text!r}", tok)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.at_op("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at_op("^"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise self.fail("unexpected end of expression")
        if tok.kind == "num":
            self.advance()
            return Num(tok.value)
        if tok.kind == "lparen":
            self.advance()
            node = self.expr()
            closing = self.peek()
            if closing is None or closing.kind != "rparen":
                raise self.fail("unbalanced parentheses: expected ')'", closing)
            self.advance()
            return node
        if tok.kind == "ident":
            self.advance()
            nxt = self.peek()
            if nxt is not None and nxt.kind == "lparen":
                return self.call(tok)
            if tok.text in FUNCTIONS:
                raise self.fail(f"function {tok.text!r} must be called with an argument", tok)
            if tok.text in CONSTANTS:
                return Const(tok.text)
            return Name(tok.text)
        raise self.fail(f"unexpected token {tok.text!r}", tok)

    def call(self, name: Token) -> Expr:
        if name.text not in FUNCTIONS:
            raise self.fail(f"unknown function {name.text!r}", name)
        self.advance()  # (
        args: List[Expr] = []
        if self.peek() is not None and self.peek().kind == "rparen":
            raise self.fail(f"wrong arity: {name.text} takes 1 argument, got 0", name)
        while True:
            args.append(self.expr())
            tok = self.peek()
            if tok is not None and tok.kind == "comma":
                self.advance()
                continue
            break
        closing = self.peek()
        if closing is None or closing.kind != "rparen":
            raise self.fail("unbalanced parentheses: expected ')'", closing)
        self.advance()
        if len(args) != 1:
            raise self.fail(f"wrong arity: {name.text} takes 1 argument, got {len(args)}", name)
        return Call(name.text, args[0])


def parse(tokens: Sequence[Token]) -> Expr:
    return _Parser(tokens).parse()


def parse_expr(source: str) -> Expr:
    return parse(tokenize(source))


# ---------------------------------------------------------------------------
# Printer

_BINARY_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3
_ATOM_PREC = 5


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _BINARY_PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    return _ATOM_PREC


def _wrap(node: Expr, parens: bool) -> str:
    text = format_expr(node)
    return f"({text})" if parens else text


def format_expr(node: Expr) -> str:
    """Render `node` with the fewest parentheses that re-parse to the same tree."""
    match node:
        case Num(value):
            return repr(value)
        case Name(id):
            return id
        case Const(name):
            return name
        case Call(func, arg):
            return f"{func}({format_expr(arg)})"
        case Neg(operand):
            return "-" + _wrap(operand, _prec(operand) < _NEG_PREC)
        case BinOp(op, left, right):
            p = _BINARY_PREC[op]
            if op == "^":
                lhs = _wrap(left, _prec(left) <= p)
                rhs = _wrap(right, _prec(right) < _NEG_PREC)
                return f"{lhs}^{rhs}"
            lhs = _wrap(left, _prec(left) < p)
            rhs = _wrap(right, _prec(right) <= p)
            sep = f" {op} " if op in "+-" else op
            return f"{lhs}{sep}{rhs}"
    raise TypeError(f"not an expression node: {node!r}")


# ---------------------------------------------------------------------------
# Evaluator


def free_names(node: Expr) -> set:
    match node:
        case Name(id):
            return {id}
        case Neg(operand) | Call(_, operand):
            return free_names(operand)
        case BinOp(_, left, right):
            return free_names(left) | free_names(right)
    return set()


def _finite(value: float, node: Expr) -> float:
    if not math.isfinite(value):
        raise DomainError("non-finite result", format_expr(node))
    return value


def evaluate(node: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate `node` in double precision; the result is always finite."""
    match node:
        case Num(value):
            return value
        case Const(name):
            return CONSTANTS[name]
        case Name(id):
            try:
                value = float(bindings[id])
            except KeyError:
                raise UnboundNameError(f"unbound identifier {id!r}") from None
            if not math.isfinite(value):
                raise DomainError(f"non-finite value {value!r} bound to", id)
            return value
        case Neg(operand):
            return -evaluate(operand, bindings)
        case Call(func, arg):
            x = evaluate(arg, bindings)
            try:
                return _finite(FUNCTIONS[func](x), node)
            except (ValueError, OverflowError) as exc:
                raise DomainError(str(exc), format_expr(node)) from None
        case BinOp(op, left, right):
            a = evaluate(left, bindings)
            b = evaluate(right, bindings)
            if op == "+":
                return _finite(a + b, node)
            if op == "-":
                return _finite(a - b, node)
            if op == "*":
                return _finite(a * b, node)
            if op == "/":
                if b == 0.0:
                    raise DomainError("division by zero", format_expr(node))
                return _finite(a / b, node)
            try:
                return _finite(math.pow(a, b), node)
            except ValueError:
                raise DomainError("power outside the real domain", format_expr(node)) from None
            except OverflowError:
                raise DomainError("power overflow", format_expr(node)) from None
    raise TypeError(f"not an expression node: {node!r}")




def evaluate_constant(source: str) -> float:
    """Evaluate an identifier-free expression such as `pi/2` or `1.5e-3`."""
    node = parse_expr(source)
    names = free_names(node)
    if names:
        raise SyntaxParseError(f"constant expression may not reference {sorted(names)}")
    return evaluate(node, {})


# ---------------------------------------------------------------------------
# Metric specs


@dataclass(frozen=True)
class MetricSpec:
    """g_mu_nu(x) as expressions; only the upper triangle (mu <= nu) is stored."""

    coords: Tuple[str, ...]
    params: Dict[str, float] = field(default_factory=dict)
    components: Dict[Tuple[int, int], Expr] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.coords) != 4:
            raise MetricSpecError(f"coords needs exactly 4 names, got {len(self.coords)}")
        if len(set(self.coords)) != 4:
            raise MetricSpecError(f"coordinate names must be distinct: {list(self.coords)}")
        reserved = (set(self.coords) | set(self.params)) & (set(CONSTANTS) | set(FUNCTIONS))
        if reserved:
            raise MetricSpecError(f"reserved names used as coordinate or parameter: {sorted(reserved)}")
        clash = set(self.coords) & set(self.params)
        if clash:
            raise MetricSpecError(f"names used both as coordinate and parameter: {sorted(clash)}")
        known = set(self.coords) | set(self.params)
        for (mu, nu), expr in self.components.items():
            if not (0 <= mu <= nu <= 3):
                raise MetricSpecError(f"component key ({mu}, {nu}) is not an upper-triangle index pair")
            unknown = free_names(expr) - known
            if unknown:
                raise MetricSpecError(f"g[{mu}][{nu}] references undeclared names {sorted(unknown)}")

    def component(self, mu: int, nu: int) -> Expr:
        key = (mu, nu) if mu <= nu else (nu, mu)
        return self.components.get(key, ZERO)

    def bindings(self, x: Sequence[float]) -> Dict[str, float]:
        values = dict(self.params)
        values.update(zip(self.coords, (float(v) for v in x)))
        return values

    def metric_at(self, x: Sequence[float]) -> np.ndarray:
        env = self.bindings(x)
        g = np.zeros((4, 4))
        for (mu, nu), expr in self.components.items():
            g[mu, nu] = g[nu, mu] = evaluate(expr, env)
        return g

    def is_diagonal(self) -> bool:
        return all(mu == nu or expr == ZERO for (mu, nu), expr in self.components.items())

    def with_params(self, overrides: Mapping[str, float]) -> "MetricSpec":
        unknown = set(overrides) - set(self.params)
        if unknown:
            raise MetricSpecError(f"--set references undeclared parameters {sorted(unknown)}")
        params = dict(self.params)
        params.update({k: float(v) for k, v in overrides.items()})
        return MetricSpec(self.coords, params, dict(self.components))


_COORDS_LINE = re.compile(r"^coords\s*=\s*(.*)$")
_PARAM_LINE = re.compile(r"^param\s+(\S+)\s*=\s*(.+)$")
_COMPONENT_LINE = re.compile(r"^g\s*\[\s*([^\]]*?)\s*\]\s*\[\s*([^\]]*?)\s*\]\s*=\s*(.+)$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _index(text: str, lineno: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise MetricSpecError(f"index {text!r} is not an integer", line=lineno) from None
    if not 0 <= value <= 3:
        raise MetricSpecError(f"index {value} outside 0..3", line=lineno)
    return value


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_metric_spec(source: str) -> MetricSpec:
    coords: Optional[Tuple[str, ...]] = None
    params: Dict[str, float] = {}
    components: Dict[Tuple[int, int], Expr] = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if m := _COORDS_LINE.match(line):
            if coords is not None:
                raise MetricSpecError("duplicate coords line", line=lineno)
            names = tuple(part.strip() for part in m.group(1).split(","))
            bad = [n for n in names if not _IDENT.match(n)]
            if bad:
                raise MetricSpecError(f"invalid coordinate names {bad}", line=lineno)
            if len(names) != 4:
                raise MetricSpecError(f"coords needs exactly 4 names, got {len(names)}", line=lineno)
            coords = names
        elif m := _PARAM_LINE.match(line):
            name, value = m.group(1), m.group(2)
            if not _IDENT.match(name):
                raise MetricSpecError(f"invalid parameter name {name!r}", line=lineno)
            if name in params:
                raise MetricSpecError(f"duplicate parameter {name!r}", line=lineno)
            try:
                params[name] = evaluate_constant(value)
            except ParseError as exc:
                raise MetricSpecError(f"parameter {name!r}: {exc}", line=lineno) from exc
        elif m := _COMPONENT_LINE.match(line):
            mu, nu = _index(m.group(1), lineno), _index(m.group(2), lineno)
            key = (min(mu, nu), max(mu, nu))
            if key in components:
                raise MetricSpecError(f"duplicate assignment of g[{mu}][{nu}]", line=lineno)
            try:
                components[key] = parse_expr(m.group(3))
            except ParseError as exc:
                raise MetricSpecError(f"g[{mu}][{nu}]: {exc}", line=lineno) from exc
        else:
            raise MetricSpecError(f"unrecognized line {line!r}", line=lineno)
    if coords is None:
        raise MetricSpecError("missing coords line")
    return MetricSpec(coords, params, components)


def format_metric_spec(spec: MetricSpec, header: Iterable[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines.append("coords = " + ",".join(spec.coords))
    for name, value in spec.params.items():
        lines.append(f"param {name} = {value!r}")
    for mu, nu in sorted(spec.components):
        lines.append(f"g[{mu}][{nu}] = {format_expr(spec.components[(mu, nu)])}")
    return "\n".join(lines) + "\n"
