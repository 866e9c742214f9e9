from __future__ import annotations

from dataclasses import dataclass

from .errors import UnexpectedChar

KEYWORDS = frozenset({"MEASURE", "OF", "IN", "WHERE", "CONTAINS", "GROUP", "BY", "AT"})

_PUNCT = {
    "(": "LPAREN",
    ")": "RPAREN",
    "{": "LBRACE",
    "}": "RBRACE",
    ",": "COMMA",
    ".": "DOT",
    "=": "EQ",
    ";": "SEMI",
}

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets [start, end) into the UTF-8 encoding of the input."""

    start: int
    end: int


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    value: str
    span: SourceSpan


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def lex(text: str) -> list[Token]:
    """Tokenize CQL text.

    Keywords are matched case-insensitively but their original spelling is
    preserved in the lexeme, so concatenating lexemes and the skipped
    whitespace reproduces the input exactly.
    """
    tokens: list[Token] = []
    i = 0
    byte_pos = 0
    n = len(text)

    def advance(chunk: str) -> int:
        nonlocal byte_pos
        start = byte_pos
        byte_pos += len(chunk.encode("utf-8"))
        return start

    while i < n:
        ch = text[i]
        if ch.isspace():
            advance(ch)
            i += 1
            continue
        if ch in _PUNCT:
            start = advance(ch)
            tokens.append(Token(_PUNCT[ch], ch, ch, SourceSpan(start, byte_pos)))
            i += 1
            continue
        if ch == '"':
            j = i + 1
            value_parts: list[str] = []
            while True:
                if j >= n:
                    raise UnexpectedChar(byte_pos, "unterminated string literal")
                cj = text[j]
                if cj == '"':
                    j += 1
                    break
                if cj == "\\":
                    if j + 1 >= n:
                        raise UnexpectedChar(byte_pos, "unterminated escape in string literal")
                    esc = text[j + 1]
                    if esc not in _ESCAPES:
                        offending = byte_pos + len(text[i:j].encode("utf-8"))
                        raise UnexpectedChar(offending, f"unsupported escape '\\{esc}'")
                    value_parts.append(_ESCAPES[esc])
                    j += 2
                    continue
                value_parts.append(cj)
                j += 1
            lexeme = text[i:j]
            start = advance(lexeme)
            tokens.append(Token("STRING", lexeme, "".join(value_parts), SourceSpan(start, byte_pos)))
            i = j
            continue
        if _is_ident_start(ch):
            j = i
            while j < n and _is_ident(text[j]):
                j += 1
            lexeme = text[i:j]
            start = advance(lexeme)
            upper = lexeme.upper()
            if upper in KEYWORDS:
                tokens.append(Token("KEYWORD", lexeme, upper, SourceSpan(start, byte_pos)))
            else:
                tokens.append(Token("IDENT", lexeme, lexeme, SourceSpan(start, byte_pos)))
            i = j
            continue
        raise UnexpectedChar(byte_pos, f"unexpected character {ch!r}")
    return tokens
