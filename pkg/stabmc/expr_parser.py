"""Token cursor and expression grammar shared by the model and property parsers."""
import math
from typing import List, Optional, Sequence

from stabmc.diagnostics import Diagnostic, error
from stabmc.lexer import INT64_MAX, Token, TokenKind
from stabmc.syntax import BinaryOp, BoolLit, IntLit, Location, RealLit, UnaryOp, VarRef

_COMPARISONS = {
    TokenKind.EQ: "==", TokenKind.NE: "!=", TokenKind.LT: "<",
    TokenKind.LE: "<=", TokenKind.GT: ">", TokenKind.GE: ">=",
}


class ParseFailure(Exception):
    def __init__(self, diagnostic: Diagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


class TokenStream:
    def __init__(self, tokens: Sequence[Token], end: Optional[Location] = None):
        self.tokens = list(tokens)
        self.pos = 0
        if end is None:
            if self.tokens:
                last = self.tokens[-1]
                end = Location(last.line, last.column + len(last.lexeme))
            else:
                end = Location(1, 1)
        self.end = end

    def peek(self, k: int = 0) -> Optional[Token]:
        i = self.pos + k
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, *kinds: TokenKind) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind in kinds

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input")
        self.pos += 1
        return tok

    def accept(self, kind: TokenKind) -> Optional[Token]:
        if self.at(kind):
            return self.advance()
        return None

    def expect(self, kind: TokenKind, what: Optional[str] = None) -> Token:
        if self.at(kind):
            return self.advance()
        self.fail(f"expected {what or repr(kind.value)}, found {self.describe()}")

    def describe(self) -> str:
        tok = self.peek()
        return "end of input" if tok is None else repr(tok.lexeme)

    def location(self, tok: Optional[Token] = None) -> Location:
        tok = tok or self.peek()
        if tok is None:
            return self.end
        return Location(tok.line, tok.column)

    def fail(self, message: str, tok: Optional[Token] = None):
        loc = self.location(tok)
        raise ParseFailure(error(loc.line, loc.column, message))


class ExprParser(TokenStream):
    """Precedence climbing: imp < or < and < not < comparison < +,- < * < unary minus."""

    def parse_expr(self):
        left = self.parse_or()
        tok = self.accept(TokenKind.KW_IMP)
        if tok:
            return BinaryOp("imp", left, self.parse_expr(), self.location(tok))
        return left

    def parse_or(self):
        left = self.parse_and()
        while self.at(TokenKind.KW_OR):
            tok = self.advance()
            left = BinaryOp("or", left, self.parse_and(), self.location(tok))
        return left

    def parse_and(self):
        left = self.parse_not()
        while self.at(TokenKind.KW_AND):
            tok = self.advance()
            left = BinaryOp("and", left, self.parse_not(), self.location(tok))
        return left

    def parse_not(self):
        tok = self.accept(TokenKind.KW_NOT)
        if tok:
            return UnaryOp("not", self.parse_not(), self.location(tok))
        return self.parse_comparison()

    def parse_comparison(self):
        left = self.parse_arith()
        tok = self.peek()
        if tok is not None and tok.kind in _COMPARISONS:
            self.advance()
            return BinaryOp(_COMPARISONS[tok.kind], left, self.parse_arith(), self.location(tok))
        return left

    def parse_arith(self):
        left = self.parse_mul()
        while self.at(TokenKind.PLUS, TokenKind.MINUS):
            tok = self.advance()
            left = BinaryOp(tok.lexeme, left, self.parse_mul(), self.location(tok))
        return left

    def parse_mul(self):
        left = self.parse_unary()
        while self.at(TokenKind.STAR):
            tok = self.advance()
            left = BinaryOp("*", left, self.parse_unary(), self.location(tok))
        return left

    def parse_unary(self):
        tok = self.accept(TokenKind.MINUS)
        if tok:
            return UnaryOp("-", self.parse_unary(), self.location(tok))
        return self.parse_primary()

    def parse_primary(self):
        tok = self.peek()
        if tok is None:
            self.fail("expected an expression, found end of input")
        loc = self.location(tok)
        if tok.kind is TokenKind.INT:
            self.advance()
            value = int(tok.lexeme)
            if value > INT64_MAX:
                self.fail(f"integer literal {tok.lexeme} does not fit in 64 bits", tok)
            return IntLit(value, loc)
        if tok.kind is TokenKind.REAL:
            self.advance()
            value = float(tok.lexeme)
            if math.isinf(value):
                self.fail(f"real literal {tok.lexeme[:20]}... does not fit in a double", tok)
            return RealLit(value, tok.lexeme, loc)
        if tok.kind in (TokenKind.KW_TRUE, TokenKind.KW_FALSE):
            self.advance()
            return BoolLit(tok.kind is TokenKind.KW_TRUE, loc)
        extension = self.parse_extension_primary()
        if extension is not None:
            return extension
        if tok.kind is TokenKind.IDENT:
            return self.parse_ref()
        if tok.kind is TokenKind.LPAREN:
            self.advance()
            inner = self.parse_expr()
            self.expect(TokenKind.RPAREN, "')'")
            return inner
        self.fail(f"expected an expression, found {self.describe()}")

    def parse_extension_primary(self):
        return None

    def parse_ref(self) -> VarRef:
        first = self.expect(TokenKind.IDENT, "an identifier")
        if self.at(TokenKind.DOT) and self.peek(1) is not None and self.peek(1).kind is TokenKind.IDENT:
            self.advance()
            name = self.advance()
            return VarRef(name.lexeme, first.lexeme, self.location(first))
        return VarRef(first.lexeme, None, self.location(first))

    def parse_ref_list(self) -> List[VarRef]:
        refs = [self.parse_ref()]
        while self.accept(TokenKind.COMMA):
            refs.append(self.parse_ref())
        return refs
