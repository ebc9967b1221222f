"""Exception types shared across the engine."""


class CoachError(Exception):
    """Base class for all engine errors."""


class InputError(CoachError):
    """Caller violated an operation precondition (bad argument, bad file)."""


class GrammarLoadError(CoachError):
    """A grammar source failed to load. Carries a machine-readable report."""

    def __init__(self, kind, detail, line=None, column=None):
        self.kind = kind
        self.detail = detail
        self.line = line
        self.column = column
        loc = f" at line {line}" if line is not None else ""
        super().__init__(f"{kind}{loc}: {detail}")

    def report(self):
        location = ""
        if self.line is not None:
            location = f"line {self.line}"
            if self.column is not None:
                location += f", col {self.column}"
        return {"kind": self.kind, "location": location, "detail": self.detail}


class InvariantError(CoachError):
    """An internal consistency check failed; indicates a bug, not bad input."""
