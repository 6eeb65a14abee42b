"""Lexing, parsing, and querying of Terraform HCL files."""

from .ast import (
    Attribute,
    Block,
    BoolLit,
    ConfigFile,
    Diagnostic,
    ExpressionValue,
    ListValue,
    MapValue,
    NumberLit,
    Opaque,
    Reference,
    StringLit,
    TemplateString,
    nodes_equal,
)
from .lexer import SourceSpan, Token, TokenKind, detokenize, span_text, tokenize
from .parser import find_blocks, get_attribute, get_attribute_node, parse

__all__ = [
    "Attribute",
    "Block",
    "BoolLit",
    "ConfigFile",
    "Diagnostic",
    "ExpressionValue",
    "ListValue",
    "MapValue",
    "NumberLit",
    "Opaque",
    "Reference",
    "SourceSpan",
    "StringLit",
    "TemplateString",
    "Token",
    "TokenKind",
    "detokenize",
    "find_blocks",
    "get_attribute",
    "get_attribute_node",
    "nodes_equal",
    "parse",
    "span_text",
    "tokenize",
]
