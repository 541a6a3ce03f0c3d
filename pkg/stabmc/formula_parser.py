"""
Property formula parser.

Parsing is done in two passes. The surface pass follows the concrete syntax and
keeps every connective the user wrote; the lowering pass sorts each piece into
its layer (classical, state, temporal) and expands derived connectives into the
primitive forms of `stabmc.formula`. A maximal subformula without temporal
operators, probability or amplitude terms and entanglement atoms is classical
and gets lifted as a whole.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from stabmc import formula as F
from stabmc.diagnostics import Diagnostic, error
from stabmc.expr_parser import ExprParser, ParseFailure
from stabmc.lexer import Token, TokenKind, tokenize
from stabmc.syntax import BinaryOp, BoolLit, IntLit, Location, PropertyKind, RealLit, UnaryOp, VarRef

logger = logging.getLogger(__name__)


# ==================== SURFACE SYNTAX ====================

@dataclass
class ProbExpr:
    formula: object
    loc: Optional[Location] = field(default=None, compare=False)


@dataclass
class AmpExpr:
    part: str  # "re" | "im"
    qubits: List[VarRef]
    formula: object
    loc: Optional[Location] = field(default=None, compare=False)


@dataclass
class SExpr:
    expr: object
    loc: Optional[Location] = None


@dataclass
class SQb:
    ref: VarRef
    loc: Optional[Location] = None


@dataclass
class SUnentangled:
    refs: List[VarRef]
    loc: Optional[Location] = None


@dataclass
class SNot:
    arg: object
    loc: Optional[Location] = None


@dataclass
class SBinary:
    op: str  # "and" | "or" | "imp"
    left: object
    right: object
    loc: Optional[Location] = None


@dataclass
class STemporal:
    op: str  # EX AX AF AG EF EG EU AU
    args: List[object]
    loc: Optional[Location] = None


_UNARY_TEMPORAL = {
    TokenKind.KW_EX: "EX", TokenKind.KW_AX: "AX", TokenKind.KW_AF: "AF",
    TokenKind.KW_AG: "AG", TokenKind.KW_EF: "EF", TokenKind.KW_EG: "EG",
}

# tokens that may follow a complete atom
_ATOM_FOLLOW = (TokenKind.RPAREN, TokenKind.KW_AND, TokenKind.KW_OR, TokenKind.KW_IMP,
                TokenKind.KW_U, TokenKind.RBRACKET)


class FormulaParser(ExprParser):

    def parse_formula(self):
        left = self.parse_formula_or()
        tok = self.accept(TokenKind.KW_IMP)
        if tok:
            return SBinary("imp", left, self.parse_formula(), self.location(tok))
        return left

    def parse_formula_or(self):
        left = self.parse_formula_and()
        while self.at(TokenKind.KW_OR):
            tok = self.advance()
            left = SBinary("or", left, self.parse_formula_and(), self.location(tok))
        return left

    def parse_formula_and(self):
        left = self.parse_formula_unary()
        while self.at(TokenKind.KW_AND):
            tok = self.advance()
            left = SBinary("and", left, self.parse_formula_unary(), self.location(tok))
        return left

    def parse_formula_unary(self):
        tok = self.peek()
        if tok is None:
            self.fail("expected a formula, found end of input")
        loc = self.location(tok)
        if tok.kind is TokenKind.KW_NOT:
            self.advance()
            return SNot(self.parse_formula_unary(), loc)
        if tok.kind in _UNARY_TEMPORAL:
            self.advance()
            return STemporal(_UNARY_TEMPORAL[tok.kind], [self.parse_formula_unary()], loc)
        if tok.kind in (TokenKind.KW_E, TokenKind.KW_A):
            self.advance()
            self.expect(TokenKind.LBRACKET, "'[' after path quantifier")
            left = self.parse_formula()
            self.expect(TokenKind.KW_U, "'U'")
            right = self.parse_formula()
            self.expect(TokenKind.RBRACKET, "']'")
            return STemporal("EU" if tok.kind is TokenKind.KW_E else "AU", [left, right], loc)
        return self.parse_atom()

    def parse_atom(self):
        tok = self.peek()
        loc = self.location(tok)
        if tok.kind is TokenKind.KW_QB:
            self.advance()
            self.expect(TokenKind.LPAREN, "'(' after qb")
            ref = self.parse_ref()
            self.expect(TokenKind.RPAREN, "')'")
            return SQb(ref, loc)
        if tok.kind is TokenKind.KW_UNENTANGLED:
            self.advance()
            self.expect(TokenKind.LPAREN, "'(' after unentangled")
            refs = self.parse_ref_list()
            self.expect(TokenKind.RPAREN, "')'")
            return SUnentangled(refs, loc)
        if tok.kind is TokenKind.LPAREN:
            # `( expr ) cmp ...` and `( formula )` share a prefix: try the expression first
            start = self.pos
            try:
                expr = self.parse_comparison()
                if self.at_end() or self.at(*_ATOM_FOLLOW):
                    return SExpr(expr, loc)
            except ParseFailure:
                pass
            self.pos = start
            self.advance()
            inner = self.parse_formula()
            self.expect(TokenKind.RPAREN, "')'")
            return inner
        return SExpr(self.parse_comparison(), loc)

    def parse_extension_primary(self):
        tok = self.peek()
        loc = self.location(tok)
        # P is an ordinary identifier unless it opens a probability term
        if tok.kind is TokenKind.IDENT and tok.lexeme == "P" and self.peek(1) is not None \
                and self.peek(1).kind is TokenKind.LPAREN:
            self.advance()
            self.advance()
            inner = self.parse_formula()
            self.expect(TokenKind.RPAREN, "')'")
            return ProbExpr(inner, loc)
        if tok.kind in (TokenKind.KW_RE, TokenKind.KW_IM):
            self.advance()
            self.expect(TokenKind.LBRACKET, f"'[' after {tok.lexeme}")
            refs = self.parse_ref_list()
            self.expect(TokenKind.RBRACKET, "']'")
            self.expect(TokenKind.LPAREN, "'('")
            inner = self.parse_formula()
            self.expect(TokenKind.RPAREN, "')'")
            return AmpExpr(tok.lexeme, refs, inner, loc)
        return None


# ==================== LOWERING ====================

def _has_quantum_term(expr) -> bool:
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, (ProbExpr, AmpExpr)):
            return True
        if isinstance(e, UnaryOp):
            stack.append(e.operand)
        elif isinstance(e, BinaryOp):
            stack.extend((e.left, e.right))
    return False


def _is_state(s) -> bool:
    if isinstance(s, STemporal):
        return False
    if isinstance(s, SNot):
        return _is_state(s.arg)
    if isinstance(s, SBinary):
        return _is_state(s.left) and _is_state(s.right)
    return True


def _is_classical(s) -> bool:
    if isinstance(s, SExpr):
        return not _has_quantum_term(s.expr)
    if isinstance(s, SQb):
        return True
    if isinstance(s, SNot):
        return _is_classical(s.arg)
    if isinstance(s, SBinary):
        return _is_classical(s.left) and _is_classical(s.right)
    return False


def _fail(message: str, loc: Optional[Location]):
    loc = loc or Location(1, 1)
    raise ParseFailure(error(loc.line, loc.column, message))


def _connective(op: str, left, right, implies, negate):
    if op == "imp":
        return implies(left, right)
    if op == "or":
        return implies(negate(left), right)
    return negate(implies(left, negate(right)))


def _t_and(a, b):
    return F.t_not(F.TImplies(a, F.t_not(b)))


def lower_temporal(s) -> F.Temporal:
    if _is_state(s):
        return F.State(lower_state(s))
    if isinstance(s, SNot):
        return F.t_not(lower_temporal(s.arg))
    if isinstance(s, SBinary):
        return _connective(s.op, lower_temporal(s.left), lower_temporal(s.right), F.TImplies, F.t_not)
    op = s.op
    args = [lower_temporal(a) for a in s.args]
    if op == "EX":
        return F.EX(args[0])
    if op == "AX":
        return F.t_not(F.EX(F.t_not(args[0])))
    if op == "AF":
        return F.AF(args[0])
    if op == "EF":
        return F.EU(F.TRUE, args[0])
    if op == "AG":
        return F.t_not(F.EU(F.TRUE, F.t_not(args[0])))
    if op == "EG":
        return F.t_not(F.AF(F.t_not(args[0])))
    if op == "EU":
        return F.EU(args[0], args[1])
    # A[f U g] = not E[not g U (not f and not g)] and AF g
    f, g = args
    return _t_and(F.t_not(F.EU(F.t_not(g), _t_and(F.t_not(f), F.t_not(g)))), F.AF(g))


def lower_state(s) -> F.StateFormula:
    if _is_classical(s):
        return F.Lifted(lower_classical(s))
    if isinstance(s, SExpr):
        return _lower_state_expr(s.expr)
    if isinstance(s, SUnentangled):
        names = [str(r) for r in s.refs]
        if len(set(names)) != len(names):
            _fail("unentangled lists a qubit twice", s.loc)
        return F.Unentangled(tuple(s.refs))
    if isinstance(s, SNot):
        return F.s_not(lower_state(s.arg))
    if isinstance(s, SBinary):
        return _connective(s.op, lower_state(s.left), lower_state(s.right), F.QImplies, F.s_not)
    _fail(f"temporal operator {s.op} is not allowed in a state formula", s.loc)


def _lower_state_expr(e) -> F.StateFormula:
    if not _has_quantum_term(e):
        return F.Lifted(_lower_classical_expr(e))
    if isinstance(e, UnaryOp) and e.op == "not":
        return F.s_not(_lower_state_expr(e.operand))
    if isinstance(e, BinaryOp) and e.op in ("and", "or", "imp"):
        return _connective(e.op, _lower_state_expr(e.left), _lower_state_expr(e.right), F.QImplies, F.s_not)
    if isinstance(e, BinaryOp) and e.op in ("<=", ">=", "<", ">", "==", "!="):
        left, right = lower_term(e.left), lower_term(e.right)
        if e.op == "<=":
            return F.Leq(left, right)
        if e.op == ">=":
            return F.Leq(right, left)
        if e.op == "<":
            return F.s_not(F.Leq(right, left))
        if e.op == ">":
            return F.s_not(F.Leq(left, right))
        both = F.s_not(F.QImplies(F.Leq(left, right), F.s_not(F.Leq(right, left))))
        return both if e.op == "==" else F.s_not(both)
    _fail("a probability or amplitude term must be compared with another term", getattr(e, "loc", None))


def lower_term(e) -> F.Term:
    if isinstance(e, IntLit):
        return F.TLit(Fraction(e.value))
    if isinstance(e, RealLit):
        return F.TLit(Fraction(e.text) if e.text else Fraction(e.value))
    if isinstance(e, VarRef):
        return F.TVar(e)
    if isinstance(e, ProbExpr):
        return F.Prob(_lower_selector(e.formula, "P(...)"))
    if isinstance(e, AmpExpr):
        selector = _lower_selector(e.formula, f"{e.part}[...](...)")
        cls = F.ReAmp if e.part == "re" else F.ImAmp
        return cls(tuple(e.qubits), selector)
    if isinstance(e, UnaryOp) and e.op == "-":
        return F.TProd(F.TLit(Fraction(-1)), lower_term(e.operand))
    if isinstance(e, BinaryOp) and e.op == "+":
        return F.TSum(lower_term(e.left), lower_term(e.right))
    if isinstance(e, BinaryOp) and e.op == "*":
        return F.TProd(lower_term(e.left), lower_term(e.right))
    if isinstance(e, BinaryOp) and e.op == "-":
        return F.TSum(lower_term(e.left), F.TProd(F.TLit(Fraction(-1)), lower_term(e.right)))
    _fail("expected a numeric term", getattr(e, "loc", None))


def _lower_selector(s, where: str) -> F.Classical:
    if not _is_classical(s):
        _fail(f"the argument of {where} must be a classical formula", getattr(s, "loc", None))
    return lower_classical(s)


def lower_classical(s) -> F.Classical:
    if isinstance(s, SExpr):
        return _lower_classical_expr(s.expr)
    if isinstance(s, SQb):
        return F.QubitAtom(s.ref)
    if isinstance(s, SNot):
        return F.c_not(lower_classical(s.arg))
    return _connective(s.op, lower_classical(s.left), lower_classical(s.right), F.Implies, F.c_not)


def _lower_classical_expr(e) -> F.Classical:
    if isinstance(e, BoolLit):
        return F.TOP_CLASSICAL if e.value else F.BOT
    return F.ClassicalAtom(e)


# ==================== ENTRY POINT ====================

def parse_formula(source: Union[str, Sequence[Token]], kind: PropertyKind = PropertyKind.TEMPORAL,
                  end: Optional[Location] = None) -> Tuple[Optional[object], List[Diagnostic]]:
    """Parse and lower a property formula.

    Returns a temporal formula for `property` and a state formula for
    `finalstateproperty`, or None with error diagnostics.
    """
    if isinstance(source, str):
        tokens, diagnostics = tokenize(source)
        if diagnostics:
            return None, diagnostics
    else:
        tokens = list(source)
    parser = FormulaParser(tokens, end)
    try:
        if parser.at_end():
            parser.fail("empty formula")
        surface = parser.parse_formula()
        if not parser.at_end():
            parser.fail(f"unexpected {parser.describe()} after formula")
        if kind is PropertyKind.FINAL_STATE:
            if not _is_state(surface):
                parser.fail("temporal operators are not allowed in a finalstateproperty", tokens[0])
            result = lower_state(surface)
        else:
            result = lower_temporal(surface)
    except ParseFailure as e:
        logger.debug(f"[PARSE] formula rejected: {e.diagnostic}")
        return None, [e.diagnostic]
    except RecursionError:
        first = tokens[0]
        return None, [error(first.line, first.column, "formula nested too deeply")]
    return result, []
