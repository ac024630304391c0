"""Exception hierarchy.

``ValidationError`` covers bad user input (CLI exit status 1);
``InvariantError`` means a computed object broke a mathematical guarantee
and signals a bug (CLI exit status 2).
"""


class StrongMultError(Exception):
    pass


class ValidationError(StrongMultError, ValueError):
    pass


class GeneratorLimitError(ValidationError):
    def __init__(self, bound, limit):
        super().__init__(f"bound {bound} exceeds generator limit {limit}")
        self.bound = bound
        self.limit = limit


class RangeError(ValidationError):
    pass


class FormatError(ValidationError):
    """Problem in an eigenvalue exchange file; ``line`` is 1-based."""

    reason = "malformed file"

    def __init__(self, line, detail=""):
        msg = f"{self.reason}, line {line}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.line = line


class MalformedHeaderError(FormatError):
    reason = "malformed header"


class MalformedRowError(FormatError):
    reason = "malformed row"


class NonPrimeIndexError(FormatError):
    reason = "index not prime"


class DuplicatePrimeError(FormatError):
    reason = "duplicate prime"


class OrderError(FormatError):
    reason = "primes not ascending"


class RamifiedPrimeError(FormatError):
    reason = "prime divides level"


class DeligneBoundError(FormatError):
    reason = "Deligne bound violated"


class MissingPrimeError(FormatError):
    reason = "missing unramified prime"


class InvariantError(StrongMultError, AssertionError):
    pass
