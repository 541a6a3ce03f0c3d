"""Lexical layer for model files and property formulae."""
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple, Union

from stabmc.diagnostics import Diagnostic, error


class TokenKind(Enum):
    IDENT = "identifier"
    INT = "integer literal"
    REAL = "real literal"
    # keywords
    KW_PROGRAM = "program"
    KW_ENDPROGRAM = "endprogram"
    KW_VAR = "var"
    KW_PROCESS = "process"
    KW_BEGIN = "begin"
    KW_END = "end"
    KW_INTEGER = "integer"
    KW_BOOL = "bool"
    KW_REAL = "real"
    KW_QUBIT = "qubit"
    KW_CHANNEL = "channel"
    KW_OF = "of"
    KW_NEWQUBIT = "newqubit"
    KW_MEAS = "meas"
    KW_HAD = "had"
    KW_PH = "ph"
    KW_X = "X"
    KW_CNOT = "cnot"
    KW_IF = "if"
    KW_FI = "fi"
    KW_DO = "do"
    KW_OD = "od"
    KW_SKIP = "skip"
    KW_TRUE = "true"
    KW_FALSE = "false"
    KW_NOT = "not"
    KW_AND = "and"
    KW_OR = "or"
    KW_IMP = "imp"
    KW_FINALSTATEPROPERTY = "finalstateproperty"
    KW_PROPERTY = "property"
    # property language
    KW_QB = "qb"
    KW_RE = "re"
    KW_IM = "im"
    KW_UNENTANGLED = "unentangled"
    KW_AG = "AG"
    KW_AF = "AF"
    KW_AX = "AX"
    KW_EG = "EG"
    KW_EF = "EF"
    KW_EX = "EX"
    KW_A = "A"
    KW_E = "E"
    KW_U = "U"
    # punctuation
    SEMI = ";"
    COMMA = ","
    COLON = ":"
    DOT = "."
    ASSIGN = ":="
    BANG = "!"
    QUESTION = "?"
    GUARD = "::"
    ARROW = "->"
    LPAREN = "("
    RPAREN = ")"
    LBRACKET = "["
    RBRACKET = "]"
    EQ = "=="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    PLUS = "+"
    MINUS = "-"
    STAR = "*"


KEYWORDS = {kind.value: kind for kind in TokenKind if kind.name.startswith("KW_")}

# Longest match first
_SYMBOLS = [
    (":=", TokenKind.ASSIGN), ("::", TokenKind.GUARD), ("->", TokenKind.ARROW),
    ("==", TokenKind.EQ), ("!=", TokenKind.NE), ("<=", TokenKind.LE), (">=", TokenKind.GE),
    (";", TokenKind.SEMI), (",", TokenKind.COMMA), (":", TokenKind.COLON), (".", TokenKind.DOT),
    ("!", TokenKind.BANG), ("?", TokenKind.QUESTION), ("(", TokenKind.LPAREN), (")", TokenKind.RPAREN),
    ("[", TokenKind.LBRACKET), ("]", TokenKind.RBRACKET), ("=", TokenKind.EQ), ("<", TokenKind.LT),
    (">", TokenKind.GT), ("+", TokenKind.PLUS), ("-", TokenKind.MINUS), ("*", TokenKind.STAR),
]

INT64_MAX = 2 ** 63 - 1


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    line: int
    column: int
    offset: int

    @property
    def end(self) -> int:
        return self.offset + len(self.lexeme)

    def __str__(self) -> str:
        if self.kind in (TokenKind.IDENT, TokenKind.INT, TokenKind.REAL):
            return f"{self.kind.name}({self.lexeme})"
        return self.kind.name


def _is_ident_start(ch: str) -> bool:
    return ch.isascii() and ch.isalpha()


def _is_ident_char(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch == "_")


def tokenize(source: Union[str, bytes]) -> Tuple[List[Token], List[Diagnostic]]:
    """Split source text into tokens; comments `{ ... }` are dropped.

    Lexical errors are reported as diagnostics and scanning continues after the
    offending character.
    """
    diagnostics: List[Diagnostic] = []
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as e:
            return [], [error(1, 1, f"source is not valid UTF-8 (byte {e.start})")]

    tokens: List[Token] = []
    i, line, col = 0, 1, 1
    length = len(source)

    def advance(count: int) -> None:
        nonlocal i, line, col
        for ch in source[i:i + count]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += count

    while i < length:
        ch = source[i]
        if ch.isspace():
            advance(1)
            continue
        if ch == "{":
            close = source.find("}", i + 1)
            if close == -1:
                diagnostics.append(error(line, col, "unterminated comment"))
                break
            advance(close + 1 - i)
            continue

        start, start_line, start_col = i, line, col
        if _is_ident_start(ch):
            j = i + 1
            while j < length and _is_ident_char(source[j]):
                j += 1
            word = source[i:j]
            tokens.append(Token(KEYWORDS.get(word, TokenKind.IDENT), word, start_line, start_col, start))
            advance(j - i)
            continue
        if ch.isascii() and ch.isdigit():
            j = i + 1
            while j < length and source[j].isascii() and source[j].isdigit():
                j += 1
            kind = TokenKind.INT
            if j + 1 < length and source[j] == "." and source[j + 1].isascii() and source[j + 1].isdigit():
                j += 1
                while j < length and source[j].isascii() and source[j].isdigit():
                    j += 1
                kind = TokenKind.REAL
            tokens.append(Token(kind, source[i:j], start_line, start_col, start))
            advance(j - i)
            continue
        for text, kind in _SYMBOLS:
            if source.startswith(text, i):
                tokens.append(Token(kind, text, start_line, start_col, start))
                advance(len(text))
                break
        else:
            diagnostics.append(error(line, col, f"illegal character {ch!r}"))
            advance(1)
    return tokens, diagnostics
