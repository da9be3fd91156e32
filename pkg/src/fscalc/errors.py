"""Exception hierarchy shared by the compiler, the algebra and the CLI."""


class FscError(Exception):
    """Base class for every error raised by fscalc."""


class ArityError(FscError):
    pass


class RelationOperandError(FscError):
    """A language-only operator received a transducer."""


class RegexSyntaxError(FscError):
    def __init__(self, message: str, pos: int | None = None, src: str | None = None):
        self.pos = pos
        self.src = src
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)


class UnbalancedBracket(RegexSyntaxError):
    pass


class UnknownOperator(RegexSyntaxError):
    pass


class UnboundVariable(FscError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"undefined network: {name}")


class TokenizationError(FscError):
    pass
