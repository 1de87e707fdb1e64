"""Exception hierarchy shared by every autoform package."""

from typing import Any, Iterable, Optional


class AutoformError(Exception):
    """Root of all autoform errors."""


class SchemaError(AutoformError):
    """Malformed serialized input (formulation JSON, dataset line, config)."""

    def __init__(self, message: str, path: str = "$", line: Optional[int] = None):
        self.message = message
        self.path = path
        self.line = line
        location = f"line {line}: " if line is not None else ""
        super().__init__(f"{location}{path}: {message}")


class ParseError(AutoformError):
    """Expression text does not match the expression grammar."""

    def __init__(self, message: str, offset: int, expected: Iterable[str] = ()):
        self.offset = offset
        self.expected = frozenset(expected)
        hint = f" (expected one of {sorted(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at byte {offset}{hint}")


class GroundError(AutoformError):
    """Comprehension or index could not be resolved against the parameters."""


class NonLinearError(AutoformError):
    """An expression is not affine in the decision variables."""

    def __init__(self, message: str, subexpression: str):
        self.subexpression = subexpression
        super().__init__(f"{message}: {subexpression}")


class EvalError(AutoformError):
    """Numeric evaluation failed (missing binding, division by zero)."""


class DomainMismatch(AutoformError):
    """Two systems are not defined over the same variable table."""


class BackendError(AutoformError):
    """Generator backend transport failure after the retry budget."""


class MalformedResponse(AutoformError):
    """A structured LLM response could not be parsed."""

    def __init__(self, message: str, response: str = ""):
        self.response = response
        super().__init__(message)


class MalformedRank(MalformedResponse):
    """Ranking response is not a permutation of the candidates."""


class MalformedGroups(MalformedResponse):
    """Grouping response is not a partition of the candidates."""


class ExpansionEmpty(AutoformError):
    """No parseable candidate survived an expansion."""

    def __init__(self, depth: int, detail: str = ""):
        self.depth = depth
        super().__init__(f"expansion at depth {depth} produced no candidates{': ' + detail if detail else ''}")


class LoweringError(AutoformError):
    """A complete formulation could not be lowered to a computational model."""

    def __init__(self, entry: str, cause: Any):
        self.entry = entry
        self.cause = cause
        super().__init__(f"{entry}: {type(cause).__name__}: {cause}")
