"""
errors.py: Exception hierarchy for freefall.

Every error carries the process exit code the CLI reports for it:
0 ok, 2 usage/parse, 3 domain/signature, 4 residual, 5 convergence,
6 property failure.
"""

from typing import Optional


class FreefallError(Exception):
    exit_code = 1


class ParseError(FreefallError, ValueError):
    """Lexing, parsing or metric-spec failure. `offset` is a byte offset."""

    exit_code = 2

    def __init__(self, message: str, offset: Optional[int] = None, line: Optional[int] = None):
        self.offset = offset
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class LexError(ParseError):
    pass


class SyntaxParseError(ParseError):
    pass


class MetricSpecError(ParseError):
    pass


class PreconditionError(FreefallError, ValueError):
    exit_code = 2


class EvalError(FreefallError, ArithmeticError):
    exit_code = 3


class UnboundNameError(EvalError):
    pass


class DomainError(EvalError):
    """Evaluation left the real domain; `expr` is the offending sub-expression text."""

    def __init__(self, message: str, expr: Optional[str] = None):
        self.expr = expr
        super().__init__(f"{message}: {expr}" if expr else message)


class PoleError(DomainError):
    pass


class ChirpRangeError(DomainError):
    pass


class GeometryError(FreefallError):
    exit_code = 3


class SignatureError(GeometryError):
    pass


class DegenerateChartError(GeometryError):
    pass


class ResidualError(FreefallError):
    exit_code = 4


class ConvergenceError(FreefallError):
    exit_code = 5

    def __init__(self, message: str, estimate: float = float("nan")):
        self.estimate = estimate
        super().__init__(f"{message} (achieved error estimate {estimate!r})")


class PropertyFailure(FreefallError):
    exit_code = 6

    def __init__(self, message: str, seed: Optional[int] = None):
        self.seed = seed
        super().__init__(f"{message} (seed {seed})" if seed is not None else message)
