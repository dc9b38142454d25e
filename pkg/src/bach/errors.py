"""Exception hierarchy shared by every module of the package."""


class BachError(Exception):
    """Base class for all errors raised by this package."""


class TermError(BachError, ValueError):
    """Malformed si-term construction (bad identifier, empty argument list)."""


class NonGroundTermError(BachError, ValueError):
    """A term containing binder variables reached the store."""


class ModelError(BachError):
    """Base class for model validation failures."""


class UnknownProcedure(ModelError):
    def __init__(self, name):
        super().__init__(f"unknown procedure {name!r}")
        self.name = name


class ArityError(ModelError):
    def __init__(self, name, expected, got):
        super().__init__(f"procedure {name!r} expects {expected} argument(s), got {got}")
        self.name = name
        self.expected = expected
        self.got = got


class UnguardedRecursion(ModelError):
    def __init__(self, name):
        super().__init__(f"procedure {name!r} may call itself before executing a primitive")
        self.name = name


class UnguardedFormula(ModelError):
    def __init__(self, name):
        super().__init__(f"formula {name!r} may unfold itself before consuming a basic formula")
        self.name = name


class UnknownFormulaVariable(ModelError):
    def __init__(self, name):
        super().__init__(f"unknown formula variable {name!r}")
        self.name = name


class DuplicateDefinition(ModelError):
    def __init__(self, kind, name):
        super().__init__(f"duplicate {kind} definition {name!r}")
        self.kind = kind
        self.name = name


class EmptyDomain(ModelError):
    def __init__(self, binder):
        super().__init__(f"generalized sum over {binder!r} has an empty domain")
        self.binder = binder


class BinderError(ModelError):
    """A binder shadows an enclosing binder/formal, or a variable is unbound."""


class ParseError(BachError):
    def __init__(self, message, line, column):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
