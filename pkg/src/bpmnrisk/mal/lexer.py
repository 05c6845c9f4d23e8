"""Tokenizer for the threat-modeling language.

Recognizes the subset grammar: ``category``/``asset``/``extends`` blocks,
OR/AND/defense step markers, target arrows, bracketed distributions, and the
``associations`` section.  ``//`` starts a line comment.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..errors import MalParseError


class TokenType(Enum):
    IDENT = "identifier"
    NUMBER = "number"
    LBRACE = "{"
    RBRACE = "}"
    LBRACKET = "["
    RBRACKET = "]"
    LPAREN = "("
    RPAREN = ")"
    PIPE = "|"
    AMP = "&"
    HASH = "#"
    ARROW = "->"
    LARROW = "<-"
    COMMA = ","
    DOT = "."
    STAR = "*"
    PLUS_ARROW = "+>"
    BANG = "!"
    AT = "@"
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    type: TokenType
    value: str
    line: int
    column: int


_SINGLE = {
    "{": TokenType.LBRACE,
    "}": TokenType.RBRACE,
    "[": TokenType.LBRACKET,
    "]": TokenType.RBRACKET,
    "(": TokenType.LPAREN,
    ")": TokenType.RPAREN,
    "|": TokenType.PIPE,
    "&": TokenType.AMP,
    "#": TokenType.HASH,
    ",": TokenType.COMMA,
    ".": TokenType.DOT,
    "*": TokenType.STAR,
    "!": TokenType.BANG,
    "@": TokenType.AT,
}


def tokenize(text: str, origin: str = "<mal>") -> list[Token]:
    tokens: list[Token] = []
    line = 1
    col = 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("->", i):
            tokens.append(Token(TokenType.ARROW, "->", line, col))
            i += 2
            col += 2
            continue
        if text.startswith("<-", i):
            tokens.append(Token(TokenType.LARROW, "<-", line, col))
            i += 2
            col += 2
            continue
        if text.startswith("+>", i):
            tokens.append(Token(TokenType.PLUS_ARROW, "+>", line, col))
            i += 2
            col += 2
            continue
        if ch in _SINGLE:
            tokens.append(Token(_SINGLE[ch], ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            start = i
            start_col = col
            while i < n and (text[i].isdigit() or text[i] == "."):
                # stop before a '..' multiplicity range so the parser can reject it
                if text[i] == "." and text.startswith("..", i):
                    break
                i += 1
                col += 1
            tokens.append(Token(TokenType.NUMBER, text[start:i], line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            start_col = col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
                col += 1
            tokens.append(Token(TokenType.IDENT, text[start:i], line, start_col))
            continue
        raise MalParseError(f"unexpected character {ch!r}", origin, line, col)
    tokens.append(Token(TokenType.EOF, "", line, col))
    return tokens
