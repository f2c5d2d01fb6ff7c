"""Exception types shared across the package."""


class KLSolveError(Exception):
    """Base class for all klsolve errors."""


class ValidationError(KLSolveError):
    """A system (or its raw data) violates a structural requirement.

    Carries the full list of problems so callers can report them all at once.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ParseError(KLSolveError):
    """Malformed input file; the message names the offending JSON path."""


class StructureNotFoundError(KLSolveError):
    """No degree structure could be detected for the system."""


class GenerationError(KLSolveError):
    """Instance generation exhausted its resampling budget."""
