"""Pretty printer producing source text in the model grammar (fully parenthesized)."""
from typing import List

from stabmc.syntax import (
    Assign, BinaryOp, BoolLit, CNot, Gate, GuardedDo, GuardedIf, IntLit, Measure, NewQubit, Program,
    RealLit, Receive, Send, Skip, UnaryOp, VarDecl, VarRef,
)

INDENT = "    "


def format_expr(expr) -> str:
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, RealLit):
        return expr.text or repr(expr.value)
    if isinstance(expr, BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, VarRef):
        return str(expr)
    if isinstance(expr, UnaryOp):
        sep = " " if expr.op == "not" else ""
        return f"({expr.op}{sep}{format_expr(expr.operand)})"
    if isinstance(expr, BinaryOp):
        return f"({format_expr(expr.left)} {expr.op} {format_expr(expr.right)})"
    raise TypeError(f"not an expression: {expr!r}")


def _format_decls(decls: List[VarDecl]) -> str:
    return " ".join(f"{d.name}: {d.type};" for d in decls)


def format_statement(stmt, depth: int = 1) -> List[str]:
    pad = INDENT * depth
    if isinstance(stmt, Assign):
        return [f"{pad}{stmt.target} := {format_expr(stmt.expr)};"]
    if isinstance(stmt, NewQubit):
        return [f"{pad}{stmt.target} := newqubit;"]
    if isinstance(stmt, Gate):
        return [f"{pad}{stmt.kind.value} {stmt.qubit};"]
    if isinstance(stmt, CNot):
        return [f"{pad}cnot {stmt.control} {stmt.target};"]
    if isinstance(stmt, Measure):
        return [f"{pad}{stmt.target} := meas {stmt.qubit};"]
    if isinstance(stmt, Send):
        return [f"{pad}{stmt.channel}!{format_expr(stmt.expr)};"]
    if isinstance(stmt, Receive):
        return [f"{pad}{stmt.channel}?{stmt.target};"]
    if isinstance(stmt, Skip):
        return [f"{pad}skip;"]
    if isinstance(stmt, (GuardedIf, GuardedDo)):
        opener, closer = ("if", "fi") if isinstance(stmt, GuardedIf) else ("do", "od")
        lines = [f"{pad}{opener}"]
        for branch in stmt.branches:
            lines.append(f"{pad}:: {format_expr(branch.guard)} ->")
            for inner in branch.body:
                lines.extend(format_statement(inner, depth + 2))
        lines.append(f"{pad}{closer}")
        return lines
    raise TypeError(f"not a statement: {stmt!r}")


def format_program(program: Program) -> str:
    lines = [f"program {program.name};"]
    if program.shared:
        lines.append(f"var {_format_decls(program.shared)}")
    for proc in program.processes:
        lines.append("")
        lines.append(f"process {proc.name};")
        if proc.decls:
            lines.append(f"var {_format_decls(proc.decls)}")
        lines.append("begin")
        for stmt in proc.body:
            lines.extend(format_statement(stmt))
        lines.append("end;")
    lines.append("endprogram.")
    for prop in program.properties:
        lines.append("")
        lines.append(f"{prop.kind.value} ({prop.text});")
    return "\n".join(lines) + "\n"
