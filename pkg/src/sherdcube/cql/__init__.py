"""CQL, the small query language over cubes.

A query names one measure, zero or more WHERE filters and zero or more
GROUP BY clauses, and ends with a semicolon:

    MEASURE count(samples)
        WHERE dating.period = "Medieval"
        WHERE description CONTAINS "Zeuxippus"
        GROUP BY provenance AT country;
"""

from .errors import CqlError, ParseError, SemanticError, UnexpectedChar
from .lexer import Token, SourceSpan, lex
from .nodes import FilterClause, GroupClause, MeasureClause, OverClause, QueryAst, pretty_print
from .parser import parse, parse_query, parse_script
from .planner import ResultTable, plan_and_execute

__all__ = [
    "CqlError",
    "ParseError",
    "SemanticError",
    "UnexpectedChar",
    "Token",
    "SourceSpan",
    "lex",
    "FilterClause",
    "GroupClause",
    "MeasureClause",
    "OverClause",
    "QueryAst",
    "pretty_print",
    "parse",
    "parse_query",
    "parse_script",
    "ResultTable",
    "plan_and_execute",
]
