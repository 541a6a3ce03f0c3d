"""
Static checks and name resolution.

Process bodies see their own locals first, then the shared scope. Names in
property formulae resolve against the shared scope first and then against the
processes in declaration order; `Proc.name` selects a process explicitly.
"""
import copy
import logging
from typing import Callable, List, Optional, Set, Tuple

from stabmc import formula as F
from stabmc.diagnostics import Diagnostic, error, has_errors, warning
from stabmc.syntax import (
    BOOL, INTEGER, QUBIT, REAL, Assign, BoolLit, CNot, DataType, Gate, GuardedDo, GuardedIf,
    IntLit, Location, Measure, NewQubit, ProcessDecl, Program, PropertyDecl, RealLit, Receive, Send,
    Skip, TypeKind, UnaryOp, VarDecl, VarRef,
)

logger = logging.getLogger(__name__)

# Same shape as the parsed program, with every reference annotated
TypedProgram = Program

Resolver = Callable[[VarRef], Optional[VarDecl]]


def _assignable(target: DataType, value: DataType) -> bool:
    return target == value or (target == REAL and value == INTEGER)


class TypeChecker:

    def __init__(self, program: Program):
        self.program = program
        self.diagnostics: List[Diagnostic] = []

    def error(self, loc: Optional[Location], message: str) -> None:
        loc = loc or Location(0, 0)
        self.diagnostics.append(error(loc.line, loc.column, message))

    def warning(self, loc: Optional[Location], message: str) -> None:
        loc = loc or Location(0, 0)
        self.diagnostics.append(warning(loc.line, loc.column, message))

    def run(self) -> None:
        for proc in self.program.processes:
            for decl in proc.decls:
                if self.program.lookup_shared(decl.name):
                    self.warning(decl.loc, f"local '{decl.name}' of {proc.name} shadows a shared variable")
            self.check_body(proc, proc.body)
        for prop in self.program.properties:
            if prop.formula is not None:
                self.check_property(prop)

    # ==================== NAMES ====================

    def lookup(self, proc: ProcessDecl, name: str) -> Tuple[Optional[VarDecl], str]:
        decl = proc.lookup(name)
        if decl is not None:
            return decl, proc.name
        return self.program.lookup_shared(name), ""

    def process_resolver(self, proc: ProcessDecl) -> Resolver:
        def resolve(ref: VarRef) -> Optional[VarDecl]:
            if ref.process is not None and ref.process != proc.name:
                self.error(ref.loc, f"process {proc.name} cannot read variables of {ref.process}")
                return None
            if ref.process is not None:
                decl, scope = proc.lookup(ref.name), proc.name
            else:
                decl, scope = self.lookup(proc, ref.name)
            if decl is None:
                self.error(ref.loc, f"unknown identifier '{ref}'")
                return None
            ref.scope = scope
            ref.type = decl.type
            return decl
        return resolve

    def property_resolver(self, warned: Set[str]) -> Resolver:
        def resolve(ref: VarRef) -> Optional[VarDecl]:
            if ref.process is not None:
                proc = self.program.process(ref.process)
                if proc is None:
                    self.error(ref.loc, f"unknown process '{ref.process}'")
                    return None
                decl, scope = proc.lookup(ref.name), proc.name
            else:
                decl, scope = self.program.lookup_shared(ref.name), ""
                if decl is None:
                    owners = [p for p in self.program.processes if p.lookup(ref.name) is not None]
                    if owners:
                        decl, scope = owners[0].lookup(ref.name), owners[0].name
                        if len(owners) > 1 and ref.name not in warned:
                            warned.add(ref.name)
                            names = ", ".join(p.name for p in owners)
                            self.warning(ref.loc, f"'{ref.name}' is declared by {names}; "
                                                  f"using {scope}.{ref.name}")
            if decl is None:
                self.error(ref.loc, f"unknown identifier '{ref}'")
                return None
            ref.scope = scope
            ref.type = decl.type
            return decl
        return resolve

    # ==================== EXPRESSIONS ====================

    def type_expr(self, expr, resolve: Resolver) -> Optional[DataType]:
        result = self._type_expr(expr, resolve)
        expr.type = result
        return result

    def _type_expr(self, expr, resolve: Resolver) -> Optional[DataType]:
        if isinstance(expr, IntLit):
            return INTEGER
        if isinstance(expr, RealLit):
            return REAL
        if isinstance(expr, BoolLit):
            return BOOL
        if isinstance(expr, VarRef):
            decl = resolve(expr)
            if decl is None:
                return None
            if decl.type.kind in (TypeKind.QUBIT, TypeKind.CHANNEL):
                self.error(expr.loc, f"{decl.type} variable '{expr}' cannot be used in an expression")
                return None
            return decl.type
        if isinstance(expr, UnaryOp):
            operand = self.type_expr(expr.operand, resolve)
            if operand is None:
                return None
            if expr.op == "not":
                if operand != BOOL:
                    self.error(expr.loc, f"not expects bool, got {operand}")
                    return None
                return BOOL
            if not operand.is_numeric:
                self.error(expr.loc, f"unary minus expects a number, got {operand}")
                return None
            return operand
        left = self.type_expr(expr.left, resolve)
        right = self.type_expr(expr.right, resolve)
        if left is None or right is None:
            return None
        op = expr.op
        if op in ("and", "or", "imp"):
            if left != BOOL or right != BOOL:
                self.error(expr.loc, f"{op} expects bool operands, got {left} and {right}")
                return None
            return BOOL
        if op in ("==", "!="):
            if (left.is_numeric and right.is_numeric) or left == right == BOOL:
                return BOOL
            self.error(expr.loc, f"cannot compare {left} with {right}")
            return None
        if not (left.is_numeric and right.is_numeric):
            self.error(expr.loc, f"'{op}' expects numbers, got {left} and {right}")
            return None
        if op in ("<", "<=", ">", ">="):
            return BOOL
        return REAL if REAL in (left, right) else INTEGER

    # ==================== STATEMENTS ====================

    def variable(self, proc: ProcessDecl, name: str, loc) -> Optional[DataType]:
        decl, _ = self.lookup(proc, name)
        if decl is None:
            self.error(loc, f"unknown identifier '{name}'")
            return None
        return decl.type

    def expect_qubit(self, proc: ProcessDecl, name: str, what: str, loc) -> None:
        dtype = self.variable(proc, name, loc)
        if dtype is not None and dtype != QUBIT:
            self.error(loc, f"{what} expects qubit, got {dtype}")

    def check_body(self, proc: ProcessDecl, body: list) -> None:
        resolve = self.process_resolver(proc)
        for stmt in body:
            self.check_statement(proc, stmt, resolve)

    def check_statement(self, proc: ProcessDecl, stmt, resolve: Resolver) -> None:
        loc = stmt.loc
        if isinstance(stmt, Assign):
            target = self.variable(proc, stmt.target, loc)
            value = self.type_expr(stmt.expr, resolve)
            if target is None:
                return
            if target.kind is TypeKind.QUBIT:
                self.error(loc, f"qubit '{stmt.target}' can only be set by newqubit, meas or a receive")
            elif target.kind is TypeKind.CHANNEL:
                self.error(loc, f"channel '{stmt.target}' cannot be assigned")
            elif value is not None and not _assignable(target, value):
                self.error(loc, f"cannot assign {value} to {target} variable '{stmt.target}'")
        elif isinstance(stmt, NewQubit):
            target = self.variable(proc, stmt.target, loc)
            if target is not None and target != QUBIT:
                self.error(loc, f"newqubit expects a qubit variable, got {target}")
        elif isinstance(stmt, Gate):
            self.expect_qubit(proc, stmt.qubit, stmt.kind.value, loc)
        elif isinstance(stmt, CNot):
            self.expect_qubit(proc, stmt.control, "cnot", loc)
            self.expect_qubit(proc, stmt.target, "cnot", loc)
        elif isinstance(stmt, Measure):
            target = self.variable(proc, stmt.target, loc)
            if target is not None and target != BOOL:
                self.error(loc, f"meas result must be stored in a bool variable, got {target}")
            self.expect_qubit(proc, stmt.qubit, "meas", loc)
        elif isinstance(stmt, Send):
            channel = self.channel(proc, stmt.channel, loc)
            if channel is None:
                self.type_expr(stmt.expr, resolve)
                return
            if channel.base == QUBIT:
                expr = stmt.expr
                if not isinstance(expr, VarRef) or expr.process is not None:
                    self.error(loc, "a qubit channel sends a plain qubit variable")
                    return
                decl = resolve(expr)
                if decl is not None and decl.type != QUBIT:
                    self.error(loc, f"channel '{stmt.channel}' carries qubit, got {decl.type}")
                return
            value = self.type_expr(stmt.expr, resolve)
            if value is not None and not _assignable(channel.base, value):
                self.error(loc, f"channel '{stmt.channel}' carries {channel.base}, got {value}")
        elif isinstance(stmt, Receive):
            channel = self.channel(proc, stmt.channel, loc)
            target = self.variable(proc, stmt.target, loc)
            if channel is not None and target is not None and not _assignable(target, channel.base):
                self.error(loc, f"channel '{stmt.channel}' carries {channel.base}, "
                                f"cannot receive into {target} variable '{stmt.target}'")
        elif isinstance(stmt, (GuardedIf, GuardedDo)):
            for branch in stmt.branches:
                guard = self.type_expr(branch.guard, resolve)
                if guard is not None and guard != BOOL:
                    self.error(branch.loc, f"guard must be bool, got {guard}")
                for inner in branch.body:
                    self.check_statement(proc, inner, resolve)
        elif not isinstance(stmt, Skip):
            raise TypeError(f"unknown statement {stmt!r}")

    def channel(self, proc: ProcessDecl, name: str, loc) -> Optional[DataType]:
        dtype = self.variable(proc, name, loc)
        if dtype is None:
            return None
        if dtype.kind is not TypeKind.CHANNEL:
            self.error(loc, f"'{name}' is not a channel (it is {dtype})")
            return None
        return dtype

    # ==================== PROPERTIES ====================

    def check_property(self, prop: PropertyDecl) -> None:
        resolve = self.property_resolver(set())
        self.check_formula(prop.formula, resolve, prop.loc)

    def qubit_ref(self, ref: VarRef, resolve: Resolver, loc) -> Optional[Tuple[str, str]]:
        decl = resolve(ref)
        if decl is None:
            return None
        if decl.type != QUBIT:
            self.error(ref.loc or loc, f"'{ref}' is {decl.type}, expected a qubit")
            return None
        return ref.scope, ref.name

    def check_formula(self, node, resolve: Resolver, loc, allowed: Optional[Set] = None) -> None:
        """Walk one formula; `allowed` limits qb(...) atoms inside an amplitude selector."""
        if isinstance(node, F.Bottom):
            return
        if isinstance(node, F.QubitAtom):
            key = self.qubit_ref(node.ref, resolve, loc)
            if key is not None and allowed is not None and key not in allowed:
                self.error(node.ref.loc or loc, f"qb({node.ref}) is not among the amplitude's qubits")
        elif isinstance(node, F.ClassicalAtom):
            dtype = self.type_expr(node.expr, resolve)
            if dtype is not None and dtype != BOOL:
                self.error(getattr(node.expr, "loc", None) or loc, f"expected a bool condition, got {dtype}")
        elif isinstance(node, (F.Implies, F.QImplies, F.TImplies, F.EU, F.Leq, F.TSum, F.TProd)):
            self.check_formula(node.left, resolve, loc, allowed)
            self.check_formula(node.right, resolve, loc, allowed)
        elif isinstance(node, (F.State, F.EX, F.AF, F.Lifted, F.Prob)):
            self.check_formula(node.formula, resolve, loc, allowed)
        elif isinstance(node, F.TVar):
            decl = resolve(node.ref)
            if decl is not None and not decl.type.is_numeric:
                self.error(node.ref.loc or loc, f"term variable '{node.ref}' must be integer or real, "
                                               f"got {decl.type}")
        elif isinstance(node, F.TLit):
            return
        elif isinstance(node, (F.ReAmp, F.ImAmp, F.Unentangled)):
            keys = [self.qubit_ref(ref, resolve, loc) for ref in node.qubits]
            resolved = [k for k in keys if k is not None]
            if len(set(resolved)) != len(resolved):
                self.error(loc, "a qubit is listed twice")
            if not isinstance(node, F.Unentangled):
                self.check_formula(node.selector, resolve, loc, set(resolved))
        else:
            raise TypeError(f"unknown formula node {node!r}")


def typecheck(program: Program) -> Tuple[Optional[TypedProgram], List[Diagnostic]]:
    """Check a parsed program; returns an annotated copy, or None on errors."""
    typed = copy.deepcopy(program)
    checker = TypeChecker(typed)
    checker.run()
    if has_errors(checker.diagnostics):
        return None, checker.diagnostics
    return typed, checker.diagnostics
