"""
Abstract syntax of protocol models.

Locations, statement ids and type annotations are excluded from equality so that a
pretty-printed and re-parsed program compares equal to the original.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Union


@dataclass(frozen=True)
class Location:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


# ==================== TYPES ====================

class TypeKind(str, Enum):
    INTEGER = "integer"
    BOOL = "bool"
    REAL = "real"
    QUBIT = "qubit"
    CHANNEL = "channel"


@dataclass(frozen=True)
class DataType:
    kind: TypeKind
    base: Optional["DataType"] = None

    def __post_init__(self):
        if self.kind is TypeKind.CHANNEL:
            if self.base is None or self.base.kind is TypeKind.CHANNEL:
                raise ValueError("channel base must be a non-channel type")
        elif self.base is not None:
            raise ValueError(f"{self.kind.value} has no base type")

    @property
    def is_numeric(self) -> bool:
        return self.kind in (TypeKind.INTEGER, TypeKind.REAL)

    def __str__(self) -> str:
        if self.kind is TypeKind.CHANNEL:
            return f"channel of {self.base}"
        return self.kind.value


INTEGER = DataType(TypeKind.INTEGER)
BOOL = DataType(TypeKind.BOOL)
REAL = DataType(TypeKind.REAL)
QUBIT = DataType(TypeKind.QUBIT)


def channel_of(base: DataType) -> DataType:
    return DataType(TypeKind.CHANNEL, base)


class GateKind(str, Enum):
    HAD = "had"
    PH = "ph"
    X = "X"


# ==================== EXPRESSIONS ====================

@dataclass
class IntLit:
    value: int
    loc: Optional[Location] = field(default=None, compare=False)
    type: Optional[DataType] = field(default=None, compare=False)


@dataclass
class RealLit:
    value: float
    text: str = field(default="", compare=False)
    loc: Optional[Location] = field(default=None, compare=False)
    type: Optional[DataType] = field(default=None, compare=False)


@dataclass
class BoolLit:
    value: bool
    loc: Optional[Location] = field(default=None, compare=False)
    type: Optional[DataType] = field(default=None, compare=False)


@dataclass
class VarRef:
    """A variable, optionally qualified as `Proc.name`.

    `scope` is filled in by name resolution: "" for the shared scope, otherwise the
    name of the declaring process.
    """
    name: str
    process: Optional[str] = None
    loc: Optional[Location] = field(default=None, compare=False)
    scope: Optional[str] = field(default=None, compare=False)
    type: Optional[DataType] = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"{self.process}.{self.name}" if self.process else self.name


@dataclass
class UnaryOp:
    op: str  # "not" | "-"
    operand: "Expr"
    loc: Optional[Location] = field(default=None, compare=False)
    type: Optional[DataType] = field(default=None, compare=False)


@dataclass
class BinaryOp:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Optional[Location] = field(default=None, compare=False)
    type: Optional[DataType] = field(default=None, compare=False)


Expr = Union[IntLit, RealLit, BoolLit, VarRef, UnaryOp, BinaryOp]

LOGICAL_OPS = ("and", "or", "imp")
COMPARISON_OPS = ("==", "!=", "<", "<=", ">", ">=")
ARITHMETIC_OPS = ("+", "-", "*")


# ==================== STATEMENTS ====================

@dataclass
class Assign:
    target: str
    expr: Expr
    loc: Optional[Location] = field(default=None, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass
class NewQubit:
    target: str
    loc: Optional[Location] = field(default=None, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass
class Gate:
    kind: GateKind
    qubit: str
    loc: Optional[Location] = field(default=None, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass
class CNot:
    control: str
    target: str
    loc: Optional[Location] = field(default=None, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass
class Measure:
    target: str
    qubit: str
    loc: Optional[Location] = field(default=None, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass
class Send:
    channel: str
    expr: Expr
    loc: Optional[Location] = field(default=None, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass
class Receive:
    channel: str
    target: str
    loc: Optional[Location] = field(default=None, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass
class Branch:
    guard: Expr
    body: List["Stmt"]
    loc: Optional[Location] = field(default=None, compare=False)


@dataclass
class GuardedIf:
    branches: List[Branch]
    loc: Optional[Location] = field(default=None, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass
class GuardedDo:
    branches: List[Branch]
    loc: Optional[Location] = field(default=None, compare=False)
    sid: int = field(default=0, compare=False)


@dataclass
class Skip:
    loc: Optional[Location] = field(default=None, compare=False)
    sid: int = field(default=0, compare=False)


Stmt = Union[Assign, NewQubit, Gate, CNot, Measure, Send, Receive, GuardedIf, GuardedDo, Skip]


def walk_statements(body: List[Stmt]):
    """Preorder walk over a statement list, descending into guarded blocks."""
    stack = list(reversed(body))
    while stack:
        stmt = stack.pop()
        yield stmt
        if isinstance(stmt, (GuardedIf, GuardedDo)):
            for branch in reversed(stmt.branches):
                stack.extend(reversed(branch.body))


# ==================== DECLARATIONS ====================

@dataclass
class VarDecl:
    name: str
    type: DataType
    loc: Optional[Location] = field(default=None, compare=False)


@dataclass
class ProcessDecl:
    name: str
    decls: List[VarDecl]
    body: List[Stmt]
    loc: Optional[Location] = field(default=None, compare=False)

    def lookup(self, name: str) -> Optional[VarDecl]:
        for decl in self.decls:
            if decl.name == name:
                return decl
        return None


class PropertyKind(str, Enum):
    FINAL_STATE = "finalstateproperty"
    TEMPORAL = "property"


@dataclass
class PropertyDecl:
    kind: PropertyKind
    text: str
    formula: object = None
    loc: Optional[Location] = field(default=None, compare=False)


@dataclass
class Program:
    name: str
    shared: List[VarDecl]
    processes: List[ProcessDecl]
    properties: List[PropertyDecl] = field(default_factory=list)
    loc: Optional[Location] = field(default=None, compare=False)

    def lookup_shared(self, name: str) -> Optional[VarDecl]:
        for decl in self.shared:
            if decl.name == name:
                return decl
        return None

    def process(self, name: str) -> Optional[ProcessDecl]:
        for proc in self.processes:
            if proc.name == name:
                return proc
        return None

    def statements(self):
        for proc in self.processes:
            yield from walk_statements(proc.body)
