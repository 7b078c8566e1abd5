from .desugar import desugar
from .lexer import PhpSyntaxError
from .parser import parse_expression, parse_file
from .printer import print_ast, print_expr

__all__ = ["PhpSyntaxError", "desugar", "parse_expression", "parse_file", "print_ast", "print_expr"]
