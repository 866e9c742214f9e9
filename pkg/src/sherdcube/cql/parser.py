"""Hand-written recursive-descent parser; one token of lookahead suffices."""

from __future__ import annotations

from .errors import ParseError
from .lexer import SourceSpan, Token, lex
from .nodes import FilterClause, GroupClause, MeasureClause, OverClause, QueryAst


class _Parser:
    def __init__(self, tokens: list[Token], end_offset: int):
        self.tokens = tokens
        self.pos = 0
        self.end_offset = end_offset

    def peek(self) -> "Token | None":
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _fail(self, expected: frozenset, found: "Token | None"):
        if found is None:
            span = SourceSpan(self.end_offset, self.end_offset)
            what = "end of input"
        else:
            span = found.span
            what = repr(found.lexeme)
        wanted = ", ".join(sorted(expected))
        raise ParseError(span, expected, f"expected {wanted}, found {what}")

    def take(self, kind: str, value: "str | None" = None) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind or (value is not None and tok.value != value):
            self._fail(frozenset({value or kind}), tok)
        self.pos += 1
        return tok

    def at(self, kind: str, value: "str | None" = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind and (value is None or tok.value == value)

    def ident(self, what: str) -> Token:
        # name positions also accept keyword spellings (a level named "group",
        # the element symbol "In"); the original lexeme is the name
        tok = self.peek()
        if tok is None or tok.kind not in ("IDENT", "KEYWORD"):
            self._fail(frozenset({what}), tok)
        self.pos += 1
        return tok

    def string(self) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != "STRING":
            self._fail(frozenset({"string literal"}), tok)
        self.pos += 1
        return tok

    # ------------------------------------------------------------- clauses

    def query(self) -> QueryAst:
        measure = self.measure_clause()
        filters: list[FilterClause] = []
        while self.at("KEYWORD", "WHERE"):
            filters.append(self.filter_clause())
        groups: list[GroupClause] = []
        grouped_dims: set[str] = set()
        while self.at("KEYWORD", "GROUP"):
            clause = self.group_clause()
            if clause.dim in grouped_dims:
                raise ParseError(
                    clause.span,
                    frozenset({"distinct dimension"}),
                    f"dimension {clause.dim!r} appears twice in GROUP BY",
                )
            grouped_dims.add(clause.dim)
            groups.append(clause)
        self.take("SEMI")
        return QueryAst(measure=measure, filters=tuple(filters), group_by=tuple(groups))

    def measure_clause(self) -> MeasureClause:
        start = self.take("KEYWORD", "MEASURE")
        name = self.ident("measure name")
        args: list[str] = []
        end_span = name.span
        if self.at("LPAREN"):
            self.take("LPAREN")
            args.append(self.ident("measure argument").lexeme)
            while self.at("COMMA"):
                self.take("COMMA")
                args.append(self.ident("measure argument").lexeme)
            end_span = self.take("RPAREN").span
        over = None
        if self.at("KEYWORD", "OF"):
            of_tok = self.take("KEYWORD", "OF")
            technique = self.ident("technique")
            self.take("DOT")
            component = self.ident("component")
            unit = None
            end_span = component.span
            if self.at("KEYWORD", "IN"):
                self.take("KEYWORD", "IN")
                unit_tok = self.ident("unit")
                unit = unit_tok.lexeme
                end_span = unit_tok.span
            over = OverClause(
                technique.lexeme, component.lexeme, unit,
                span=SourceSpan(of_tok.span.start, end_span.end),
            )
        return MeasureClause(
            name=name.lexeme,
            args=tuple(args),
            over=over,
            span=SourceSpan(start.span.start, end_span.end),
        )

    def filter_clause(self) -> FilterClause:
        start = self.take("KEYWORD", "WHERE")
        dim = self.ident("dimension")
        level = None
        if self.at("DOT"):
            self.take("DOT")
            level = self.ident("level").lexeme
        tok = self.peek()
        if self.at("EQ"):
            self.take("EQ")
            value = self.string()
            return FilterClause(
                dim.lexeme, level, "eq", (value.value,),
                span=SourceSpan(start.span.start, value.span.end),
            )
        if self.at("KEYWORD", "IN"):
            self.take("KEYWORD", "IN")
            self.take("LBRACE")
            values = [self.string().value]
            while self.at("COMMA"):
                self.take("COMMA")
                values.append(self.string().value)
            end = self.take("RBRACE")
            return FilterClause(
                dim.lexeme, level, "in", tuple(values),
                span=SourceSpan(start.span.start, end.span.end),
            )
        if self.at("KEYWORD", "CONTAINS"):
            self.take("KEYWORD", "CONTAINS")
            value = self.string()
            return FilterClause(
                dim.lexeme, level, "contains", (value.value,),
                span=SourceSpan(start.span.start, value.span.end),
            )
        self._fail(frozenset({"=", "IN", "CONTAINS"}), tok)

    def group_clause(self) -> GroupClause:
        start = self.take("KEYWORD", "GROUP")
        self.take("KEYWORD", "BY")
        dim = self.ident("dimension")
        level = None
        end_span = dim.span
        if self.at("KEYWORD", "AT"):
            self.take("KEYWORD", "AT")
            level_tok = self.ident("level")
            level = level_tok.lexeme
            end_span = level_tok.span
        return GroupClause(dim.lexeme, level, span=SourceSpan(start.span.start, end_span.end))


def parse_query(tokens: list[Token], end_offset: "int | None" = None) -> QueryAst:
    """Parse exactly one query from a token list."""
    if end_offset is None:
        end_offset = tokens[-1].span.end if tokens else 0
    parser = _Parser(tokens, end_offset)
    ast = parser.query()
    trailing = parser.peek()
    if trailing is not None:
        raise ParseError(
            trailing.span, frozenset({"end of input"}),
            f"unexpected {trailing.lexeme!r} after query",
        )
    return ast


def parse(text: str) -> QueryAst:
    """Lex and parse one query."""
    return parse_query(lex(text), len(text.encode("utf-8")))


def parse_script(text: str) -> list[QueryAst]:
    """Parse a sequence of semicolon-terminated queries."""
    tokens = lex(text)
    end_offset = len(text.encode("utf-8"))
    parser = _Parser(tokens, end_offset)
    queries = []
    while parser.peek() is not None:
        queries.append(parser.query())
    return queries
