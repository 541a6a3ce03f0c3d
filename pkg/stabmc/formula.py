"""
Layered property formulae.

Classical formulae are evaluated against one valuation of the qubits and the
classical stores; terms denote numbers; state formulae hold or fail at a single
configuration; temporal formulae are evaluated over the execution tree. Only the
primitive connectives exist here: derived forms are expanded by the formula parser.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union

from stabmc.printer import format_expr
from stabmc.syntax import Expr, VarRef


# ==================== CLASSICAL ====================

@dataclass(frozen=True)
class Bottom:
    """Falsity; shared by the classical and the state layer."""


@dataclass(frozen=True)
class QubitAtom:
    ref: VarRef


@dataclass(frozen=True)
class ClassicalAtom:
    """A boolean expression over the classical stores."""
    expr: Expr


@dataclass(frozen=True)
class Implies:
    left: "Classical"
    right: "Classical"


Classical = Union[Bottom, QubitAtom, ClassicalAtom, Implies]

BOT = Bottom()


def c_not(a: Classical) -> Classical:
    return Implies(a, BOT)


TOP_CLASSICAL = c_not(BOT)


# ==================== TERMS ====================

@dataclass(frozen=True)
class TVar:
    ref: VarRef


@dataclass(frozen=True)
class TLit:
    value: Fraction


@dataclass(frozen=True)
class TSum:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class TProd:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class ReAmp:
    """Real part of the amplitude of the valuation of `qubits` selected by `selector`."""
    qubits: Tuple[VarRef, ...]
    selector: Classical


@dataclass(frozen=True)
class ImAmp:
    qubits: Tuple[VarRef, ...]
    selector: Classical


@dataclass(frozen=True)
class Prob:
    formula: Classical


Term = Union[TVar, TLit, TSum, TProd, ReAmp, ImAmp, Prob]


# ==================== STATE ====================

@dataclass(frozen=True)
class Leq:
    left: Term
    right: Term


@dataclass(frozen=True)
class QImplies:
    left: "StateFormula"
    right: "StateFormula"


@dataclass(frozen=True)
class Lifted:
    """Holds iff the classical formula holds on every support valuation."""
    formula: Classical


@dataclass(frozen=True)
class Unentangled:
    qubits: Tuple[VarRef, ...]


StateFormula = Union[Leq, Bottom, QImplies, Lifted, Unentangled]


def s_not(g: StateFormula) -> StateFormula:
    return QImplies(g, BOT)


# ==================== TEMPORAL ====================

@dataclass(frozen=True)
class State:
    formula: StateFormula


@dataclass(frozen=True)
class TImplies:
    left: "Temporal"
    right: "Temporal"


@dataclass(frozen=True)
class EX:
    formula: "Temporal"


@dataclass(frozen=True)
class EU:
    left: "Temporal"
    right: "Temporal"


@dataclass(frozen=True)
class AF:
    formula: "Temporal"


Temporal = Union[State, TImplies, EX, EU, AF]

FALSE = State(BOT)


def t_not(f: Temporal) -> Temporal:
    return TImplies(f, FALSE)


TRUE = t_not(FALSE)


def is_false(f) -> bool:
    return f == FALSE or f == BOT


# ==================== TRAVERSAL ====================

def qubit_refs(alpha: Classical) -> List[VarRef]:
    """References under qb(...) atoms, in first-occurrence order."""
    out: List[VarRef] = []
    stack = [alpha]
    while stack:
        item = stack.pop()
        if isinstance(item, QubitAtom):
            out.append(item.ref)
        elif isinstance(item, Implies):
            stack.append(item.right)
            stack.append(item.left)
    return out


def format_formula(node) -> str:
    """Render a lowered formula in primitive notation (used in logs and reports)."""
    if isinstance(node, Bottom):
        return "false"
    if isinstance(node, QubitAtom):
        return f"qb({node.ref})"
    if isinstance(node, ClassicalAtom):
        return format_expr(node.expr)
    if isinstance(node, (Implies, QImplies, TImplies)):
        if is_false(node.right):
            return f"not {format_formula(node.left)}"
        return f"({format_formula(node.left)} imp {format_formula(node.right)})"
    if isinstance(node, TVar):
        return str(node.ref)
    if isinstance(node, TLit):
        return str(node.value)
    if isinstance(node, TSum):
        return f"({format_formula(node.left)} + {format_formula(node.right)})"
    if isinstance(node, TProd):
        return f"({format_formula(node.left)} * {format_formula(node.right)})"
    if isinstance(node, (ReAmp, ImAmp)):
        part = "re" if isinstance(node, ReAmp) else "im"
        qubits = ", ".join(str(q) for q in node.qubits)
        return f"{part}[{qubits}]({format_formula(node.selector)})"
    if isinstance(node, Prob):
        return f"P({format_formula(node.formula)})"
    if isinstance(node, Leq):
        return f"({format_formula(node.left)} <= {format_formula(node.right)})"
    if isinstance(node, Lifted):
        return f"[{format_formula(node.formula)}]"
    if isinstance(node, Unentangled):
        return f"unentangled({', '.join(str(q) for q in node.qubits)})"
    if isinstance(node, State):
        return format_formula(node.formula)
    if isinstance(node, EX):
        return f"EX {format_formula(node.formula)}"
    if isinstance(node, AF):
        return f"AF {format_formula(node.formula)}"
    if isinstance(node, EU):
        return f"E[{format_formula(node.left)} U {format_formula(node.right)}]"
    raise TypeError(f"not a formula node: {node!r}")
