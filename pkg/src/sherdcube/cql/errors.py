from __future__ import annotations


class CqlError(Exception):
    pass


class UnexpectedChar(CqlError):
    def __init__(self, offset: int, message: str):
        self.offset = offset
        super().__init__(f"at byte {offset}: {message}")


class ParseError(CqlError):
    def __init__(self, span, expected: frozenset, message: str):
        self.span = span
        self.expected = expected
        super().__init__(message)


class SemanticError(CqlError):
    def __init__(self, message: str, span=None):
        self.span = span
        super().__init__(message)
