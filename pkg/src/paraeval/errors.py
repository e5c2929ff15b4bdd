"""Exception types shared across the toolkit."""


class ParaevalError(Exception):
    """Base class for all toolkit errors."""


class ChatParseError(ParaevalError):
    """A CHAT transcript line could not be parsed.

    Carries the source file and 1-based line number when known.
    """

    def __init__(self, message: str, source_file: str = "<string>", line_number: int | None = None):
        self.source_file = source_file
        self.line_number = line_number
        where = source_file if line_number is None else f"{source_file}:{line_number}"
        super().__init__(f"{where}: {message}")


class ConversionError(ParaevalError):
    """An IPA string could not be converted to a pseudo-word."""

    def __init__(self, message: str, symbol: str | None = None, offset: int | None = None):
        self.symbol = symbol
        self.offset = offset
        super().__init__(message)


class FormatError(ParaevalError):
    """A model-output line violates its declared format.

    ``token_index`` locates the offending whitespace token within the line,
    when applicable.
    """

    def __init__(self, message: str, token_index: int | None = None):
        self.token_index = token_index
        if token_index is not None:
            message = f"{message} (token {token_index})"
        super().__init__(message)


class CorpusError(ParaevalError):
    """Corpus-level problem: duplicate ids, unpairable files, bad manifests."""
