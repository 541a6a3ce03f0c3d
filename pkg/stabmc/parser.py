"""
Recursive-descent parser for model files.

program  := "program" IDENT ";" [shared] process+ "endprogram" "." propdecl*
shared   := "var" vardecl (";" vardecl)* ";"
process  := "process" IDENT ";" ["var" vardecl (";" vardecl)* ";"] "begin" stmt* "end" ";"

Errors inside a statement are recorded and parsing resumes at the next statement
boundary, so one run reports several problems.
"""
import logging
from typing import List, Optional, Sequence, Tuple

from stabmc.diagnostics import Diagnostic, error, has_errors
from stabmc.expr_parser import ExprParser, ParseFailure
from stabmc.formula_parser import parse_formula
from stabmc.lexer import Token, TokenKind
from stabmc.syntax import (
    BOOL, INTEGER, QUBIT, REAL, Assign, Branch, CNot, DataType, Gate, GateKind, GuardedDo, GuardedIf,
    Location, Measure, NewQubit, ProcessDecl, Program, PropertyDecl, PropertyKind, Receive, Send, Skip,
    VarDecl, channel_of,
)

logger = logging.getLogger(__name__)

_BASE_TYPES = {
    TokenKind.KW_INTEGER: INTEGER,
    TokenKind.KW_BOOL: BOOL,
    TokenKind.KW_REAL: REAL,
    TokenKind.KW_QUBIT: QUBIT,
}

_GATES = {TokenKind.KW_HAD: GateKind.HAD, TokenKind.KW_PH: GateKind.PH, TokenKind.KW_X: GateKind.X}

# where statement-level recovery may resume
_STMT_STARTERS = (TokenKind.IDENT, TokenKind.KW_HAD, TokenKind.KW_PH, TokenKind.KW_X, TokenKind.KW_CNOT,
                  TokenKind.KW_IF, TokenKind.KW_DO, TokenKind.KW_SKIP)
_BLOCK_END = (TokenKind.KW_END, TokenKind.KW_FI, TokenKind.KW_OD, TokenKind.GUARD,
              TokenKind.KW_PROCESS, TokenKind.KW_ENDPROGRAM)


class ProgramParser(ExprParser):

    def __init__(self, tokens: Sequence[Token], source: Optional[str] = None):
        super().__init__(tokens)
        self.source = source
        self.diagnostics: List[Diagnostic] = []

    def report(self, failure: ParseFailure) -> None:
        self.diagnostics.append(failure.diagnostic)

    # ==================== DECLARATIONS ====================

    def parse_program(self) -> Optional[Program]:
        start = self.peek()
        try:
            self.expect(TokenKind.KW_PROGRAM, "'program'")
            name = self.expect(TokenKind.IDENT, "a program name").lexeme
            self.expect(TokenKind.SEMI, "';'")
        except ParseFailure as e:
            self.report(e)
            return None

        shared: List[VarDecl] = []
        if self.accept(TokenKind.KW_VAR):
            shared = self.parse_decl_section()

        processes: List[ProcessDecl] = []
        while self.at(TokenKind.KW_PROCESS):
            proc = self.parse_process()
            if proc is not None:
                processes.append(proc)

        try:
            self.expect(TokenKind.KW_ENDPROGRAM, "'process' or 'endprogram'")
            self.expect(TokenKind.DOT, "'.' after endprogram")
        except ParseFailure as e:
            self.report(e)
            return None

        properties = self.parse_properties()
        program = Program(name, shared, processes, properties, self.location(start))
        if not processes:
            loc = program.loc
            self.diagnostics.append(error(loc.line, loc.column, "program declares no process"))
        self.check_duplicates(program)
        self.number_statements(program)
        return program

    def parse_decl_section(self) -> List[VarDecl]:
        """vardecl (";" vardecl)* ";" -- stops before 'process' / 'begin'."""
        decls: List[VarDecl] = []
        while True:
            try:
                decls.extend(self.parse_vardecl())
                self.expect(TokenKind.SEMI, "';'")
            except ParseFailure as e:
                self.report(e)
                self.skip_past(TokenKind.SEMI, stop=(TokenKind.KW_BEGIN, TokenKind.KW_PROCESS,
                                                     TokenKind.KW_ENDPROGRAM))
            if not self.at(TokenKind.IDENT):
                return decls

    def parse_vardecl(self) -> List[VarDecl]:
        names = [self.expect(TokenKind.IDENT, "a variable name")]
        while self.accept(TokenKind.COMMA):
            names.append(self.expect(TokenKind.IDENT, "a variable name"))
        self.expect(TokenKind.COLON, "':'")
        dtype = self.parse_type()
        return [VarDecl(tok.lexeme, dtype, self.location(tok)) for tok in names]

    def parse_type(self) -> DataType:
        tok = self.peek()
        if tok is not None and tok.kind in _BASE_TYPES:
            self.advance()
            return _BASE_TYPES[tok.kind]
        if self.accept(TokenKind.KW_CHANNEL):
            self.expect(TokenKind.KW_OF, "'of'")
            base = self.peek()
            if base is None or base.kind not in _BASE_TYPES:
                self.fail(f"expected a channel base type, found {self.describe()}")
            self.advance()
            return channel_of(_BASE_TYPES[base.kind])
        self.fail(f"expected a type, found {self.describe()}")

    def parse_process(self) -> Optional[ProcessDecl]:
        start = self.advance()
        try:
            name = self.expect(TokenKind.IDENT, "a process name").lexeme
            self.expect(TokenKind.SEMI, "';'")
        except ParseFailure as e:
            self.report(e)
            self.skip_past(TokenKind.KW_END, stop=(TokenKind.KW_PROCESS, TokenKind.KW_ENDPROGRAM))
            self.accept(TokenKind.SEMI)
            return None
        decls: List[VarDecl] = []
        if self.accept(TokenKind.KW_VAR):
            decls = self.parse_decl_section()
        try:
            self.expect(TokenKind.KW_BEGIN, "'begin'")
        except ParseFailure as e:
            self.report(e)
        body = self.parse_block(TokenKind.KW_END)
        try:
            self.expect(TokenKind.KW_END, "'end'")
            self.expect(TokenKind.SEMI, "';' after end")
        except ParseFailure as e:
            self.report(e)
            self.skip_until(TokenKind.KW_PROCESS, TokenKind.KW_ENDPROGRAM)
        return ProcessDecl(name, decls, body, self.location(start))

    def parse_properties(self) -> List[PropertyDecl]:
        properties: List[PropertyDecl] = []
        while not self.at_end():
            tok = self.peek()
            try:
                if tok.kind is TokenKind.KW_FINALSTATEPROPERTY:
                    kind = PropertyKind.FINAL_STATE
                elif tok.kind is TokenKind.KW_PROPERTY:
                    kind = PropertyKind.TEMPORAL
                else:
                    self.fail(f"expected 'finalstateproperty' or 'property', found {self.describe()}")
                self.advance()
                properties.append(self.parse_property(kind, tok))
                self.accept(TokenKind.SEMI)
            except ParseFailure as e:
                self.report(e)
                self.skip_until(TokenKind.KW_FINALSTATEPROPERTY, TokenKind.KW_PROPERTY)
        return properties

    def parse_property(self, kind: PropertyKind, keyword: Token) -> PropertyDecl:
        open_tok = self.expect(TokenKind.LPAREN, f"'(' after {keyword.lexeme}")
        depth, start = 1, self.pos
        while depth:
            tok = self.advance()
            if tok.kind is TokenKind.LPAREN:
                depth += 1
            elif tok.kind is TokenKind.RPAREN:
                depth -= 1
        close_tok = self.tokens[self.pos - 1]
        inner = self.tokens[start:self.pos - 1]
        if self.source is not None:
            text = self.source[open_tok.end:close_tok.offset].strip()
        else:
            text = " ".join(t.lexeme for t in inner)
        formula, diags = parse_formula(inner, kind, end=Location(close_tok.line, close_tok.column))
        self.diagnostics.extend(diags)
        return PropertyDecl(kind, text, formula, self.location(keyword))

    # ==================== STATEMENTS ====================

    def parse_block(self, *terminators: TokenKind) -> list:
        body = []
        while not self.at_end() and not self.at(*terminators) and not self.at(*_BLOCK_END):
            try:
                body.append(self.parse_statement())
            except ParseFailure as e:
                self.report(e)
                self.recover_statement()
        return body

    def parse_statement(self):
        tok = self.peek()
        loc = self.location(tok)
        kind = tok.kind
        if kind is TokenKind.KW_SKIP:
            self.advance()
            self.expect(TokenKind.SEMI, "';'")
            return Skip(loc)
        if kind in _GATES:
            self.advance()
            qubit = self.expect(TokenKind.IDENT, "a qubit variable").lexeme
            self.expect(TokenKind.SEMI, "';'")
            return Gate(_GATES[kind], qubit, loc)
        if kind is TokenKind.KW_CNOT:
            self.advance()
            control = self.expect(TokenKind.IDENT, "a control qubit").lexeme
            self.accept(TokenKind.COMMA)
            target = self.expect(TokenKind.IDENT, "a target qubit").lexeme
            self.expect(TokenKind.SEMI, "';'")
            return CNot(control, target, loc)
        if kind in (TokenKind.KW_IF, TokenKind.KW_DO):
            return self.parse_guarded(kind)
        if kind is TokenKind.IDENT:
            self.advance()
            name = tok.lexeme
            if self.accept(TokenKind.BANG):
                expr = self.parse_expr()
                self.expect(TokenKind.SEMI, "';'")
                return Send(name, expr, loc)
            if self.accept(TokenKind.QUESTION):
                target = self.expect(TokenKind.IDENT, "a receiving variable").lexeme
                self.expect(TokenKind.SEMI, "';'")
                return Receive(name, target, loc)
            self.expect(TokenKind.ASSIGN, "':=', '!' or '?'")
            if self.accept(TokenKind.KW_NEWQUBIT):
                self.expect(TokenKind.SEMI, "';'")
                return NewQubit(name, loc)
            if self.accept(TokenKind.KW_MEAS):
                qubit = self.expect(TokenKind.IDENT, "a qubit variable").lexeme
                self.expect(TokenKind.SEMI, "';'")
                return Measure(name, qubit, loc)
            expr = self.parse_expr()
            self.expect(TokenKind.SEMI, "';'")
            return Assign(name, expr, loc)
        self.fail(f"expected a statement, found {self.describe()}")

    def parse_guarded(self, kind: TokenKind):
        start = self.advance()
        closer = TokenKind.KW_FI if kind is TokenKind.KW_IF else TokenKind.KW_OD
        branches: List[Branch] = []
        if not self.at(TokenKind.GUARD):
            self.fail(f"expected '::' after {start.lexeme}")
        while self.at(TokenKind.GUARD):
            guard_tok = self.advance()
            try:
                guard = self.parse_expr()
                self.expect(TokenKind.ARROW, "'->'")
            except ParseFailure as e:
                self.report(e)
                self.skip_past(TokenKind.ARROW, stop=(TokenKind.GUARD, closer, TokenKind.KW_END))
                guard = None
            body = self.parse_block(closer)
            if guard is not None:
                branches.append(Branch(guard, body, self.location(guard_tok)))
        self.expect(closer, f"'::' or '{closer.value}'")
        self.accept(TokenKind.SEMI)
        loc = self.location(start)
        return GuardedIf(branches, loc) if kind is TokenKind.KW_IF else GuardedDo(branches, loc)

    # ==================== RECOVERY ====================

    def recover_statement(self) -> None:
        """Skip to just after the next ';' or to a block boundary."""
        while not self.at_end():
            if self.at(*_BLOCK_END):
                return
            if self.advance().kind is TokenKind.SEMI:
                return

    def skip_past(self, kind: TokenKind, stop: Tuple[TokenKind, ...] = ()) -> None:
        while not self.at_end() and not self.at(*stop):
            if self.advance().kind is kind:
                return

    def skip_until(self, *kinds: TokenKind) -> None:
        while not self.at_end() and not self.at(*kinds):
            self.advance()

    # ==================== STATIC CHECKS ====================

    def check_duplicates(self, program: Program) -> None:
        def check(decls: List[VarDecl], where: str) -> None:
            seen = set()
            for decl in decls:
                if decl.name in seen:
                    self.diagnostics.append(error(decl.loc.line, decl.loc.column,
                                                  f"duplicate declaration of '{decl.name}' in {where}"))
                seen.add(decl.name)

        check(program.shared, "the shared scope")
        names = set()
        for proc in program.processes:
            if proc.name in names:
                self.diagnostics.append(error(proc.loc.line, proc.loc.column,
                                              f"duplicate process name '{proc.name}'"))
            names.add(proc.name)
            check(proc.decls, f"process {proc.name}")

    @staticmethod
    def number_statements(program: Program) -> None:
        for sid, stmt in enumerate(program.statements(), start=1):
            stmt.sid = sid


def parse_program(tokens: Sequence[Token], source: Optional[str] = None) -> Tuple[Optional[Program], List[Diagnostic]]:
    """Parse a token list into a Program.

    The Program is None only when the header or the `endprogram.` trailer cannot
    be parsed; otherwise it is returned together with any diagnostics so callers
    can inspect partial results. `source` supplies the verbatim property texts.
    """
    parser = ProgramParser(tokens, source)
    program = parser.parse_program()
    if has_errors(parser.diagnostics):
        logger.debug(f"[PARSE] {len(parser.diagnostics)} diagnostic(s)")
    return program, parser.diagnostics
