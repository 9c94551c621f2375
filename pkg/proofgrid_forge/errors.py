"""
Exception hierarchy for ProofGrid Forge

Checker verdicts are returned as values. Exceptions are reserved for
malformed inputs (syntax, schema) and for resource limits of the oracle.
"""

from typing import Optional


class ForgeError(Exception):
    """Base class for all toolkit errors"""


class FormulaSyntaxError(ForgeError):
    """
    Malformed formula text

    Args:
        message: What went wrong
        offset: Character offset into the input
        expected: Hint about the token that would have been accepted
    """

    def __init__(self, message: str, offset: int = 0, expected: Optional[str] = None,
                 line: int = 1, column: int = 1):
        self.offset = offset
        self.expected = expected
        self.line = line
        self.column = column
        hint = f" (expected {expected})" if expected else ""
        super().__init__(f"{message} at offset {offset}{hint}")


class ProofSyntaxError(FormulaSyntaxError):
    """Malformed proof text (NDL, NDL0 or Hilbert)"""


class MissingAtom(ForgeError):
    def __init__(self, atom: str):
        self.atom = atom
        super().__init__(f"No truth value assigned to atom {atom}")


class AtomBudgetExceeded(ForgeError):
    def __init__(self, count: int, budget: int):
        self.count = count
        self.budget = budget
        super().__init__(f"{count} atoms exceed the truth-table budget of {budget}")


class InvalidPosition(ForgeError):
    def __init__(self, position):
        self.position = list(position)
        super().__init__(f"Invalid position {self.position}")


class TermSyntaxError(ForgeError):
    """Unbalanced parentheses or stray tokens in a term"""


class TermTypeError(ForgeError):
    """Function symbol applied to the wrong number of arguments"""


class CitationCapExceeded(ForgeError):
    def __init__(self, step: int, cited: int, cap: int):
        self.step = step
        self.cited = cited
        self.cap = cap
        super().__init__(f"Step {step} cites {cited} equations (cap {cap})")


class GenerationExhausted(ForgeError):
    def __init__(self, family: str, attempts: int):
        self.family = family
        self.attempts = attempts
        super().__init__(f"Generator {family} found no valid instance in {attempts} attempts")


class SchemaError(ForgeError):
    def __init__(self, message: str, index: Optional[int] = None, key: Optional[str] = None):
        self.index = index
        self.key = key
        where = []
        if index is not None:
            where.append(f"record {index}")
        if key is not None:
            where.append(f"key '{key}'")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class NonConvergence(ForgeError):
    def __init__(self, iterations: int, change: float):
        self.iterations = iterations
        self.change = change
        super().__init__(f"No convergence after {iterations} iterations (relative change {change:.3g})")
