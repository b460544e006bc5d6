"""Exception types shared across the package."""


class StackyBrauerError(Exception):
    """Base class for all errors raised by this package."""


class ResourceCapError(StackyBrauerError):
    """An input would exceed the configured size budget."""

    def __init__(self, needed, cap, what=""):
        self.needed = needed
        self.cap = cap
        self.what = what
        msg = f"size {needed} exceeds resource cap {cap}"
        if what:
            msg += f" ({what})"
        super().__init__(msg)


class ValidationError(StackyBrauerError):
    """A constructed object violates one of its invariants."""


class TamenessError(ValidationError):
    """The base characteristic divides a stabilizer order or the gerbe modulus."""


class ChainCompositionError(StackyBrauerError):
    """Two consecutive differentials do not compose to zero."""


class NotChainCompatibleError(StackyBrauerError):
    """An ambient map fails to send cycles to cycles or boundaries to boundaries."""


class MissingDataError(StackyBrauerError):
    """Required input (typically an H^1 override) was not supplied."""

    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


class InvariantViolationError(StackyBrauerError):
    """An internal consistency check that must hold mathematically has failed."""


class InputFormatError(StackyBrauerError):
    """A parse or semantic error in an input document, with position data."""

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
