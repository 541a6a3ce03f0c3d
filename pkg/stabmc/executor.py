"""
Interleaving interpreter for typed programs.

A Configuration is an immutable snapshot: the quantum state, the shared store and
one ProcessState per process. Control is a stack of frames, one per open block;
entering an `if` branch advances past the `if` and pushes the branch body,
entering a `do` branch leaves the `do` in place so it is re-evaluated when the
body finishes. Every action consumes exactly one interleaving step.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from stabmc import tableau as tb
from stabmc.errors import ReplayError
from stabmc.syntax import (
    Assign, BinaryOp, BoolLit, CNot, DataType, Gate, GuardedDo, GuardedIf, IntLit, Measure, NewQubit,
    Program, RealLit, Receive, Send, Skip, TypeKind, UnaryOp, VarRef,
)

logger = logging.getLogger(__name__)

INT64_MIN, INT64_MAX = -2 ** 63, 2 ** 63 - 1


# ==================== VALUES ====================

@dataclass(frozen=True)
class QubitRef:
    id: int

    def __str__(self) -> str:
        return f"qubit#{self.id}"


class Unbound:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "unbound"

    def __deepcopy__(self, memo):
        return self


UNBOUND = Unbound()

Value = Union[int, bool, float, QubitRef, Unbound]


def default_value(dtype: DataType) -> Value:
    if dtype.kind is TypeKind.INTEGER:
        return 0
    if dtype.kind is TypeKind.BOOL:
        return False
    if dtype.kind is TypeKind.REAL:
        return 0.0
    return UNBOUND


def format_value(value: Value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


class RuntimeFault(Exception):
    """A fault of the modelled program; the acting process becomes Faulted."""


# ==================== CONFIGURATIONS ====================

class ProcStatus(str, Enum):
    RUNNING = "running"
    TERMINATED = "terminated"
    BLOCKED = "blocked"
    FAULTED = "faulted"


@dataclass(frozen=True)
class Frame:
    body: Sequence = field(compare=False)
    pc: int
    # identity of the block, for equality without comparing statement trees
    block: int = 0


@dataclass(frozen=True)
class ProcessState:
    name: str
    frames: Tuple[Frame, ...]
    store: Mapping[str, Value]
    status: ProcStatus = ProcStatus.RUNNING
    fault: Optional[str] = None

    def current(self):
        if self.status is not ProcStatus.RUNNING or not self.frames:
            return None
        top = self.frames[-1]
        return top.body[top.pc]


@dataclass(frozen=True)
class Configuration:
    quantum: tb.Tableau = field(compare=False)
    shared: Mapping[str, Value]
    processes: Tuple[ProcessState, ...]
    step_count: int = 0

    def process(self, name: str) -> ProcessState:
        for proc in self.processes:
            if proc.name == name:
                return proc
        raise KeyError(name)

    def lookup(self, scope: str, name: str) -> Value:
        """Value of a resolved variable; scope "" is the shared store."""
        if scope:
            return self.process(scope).store[name]
        return self.shared[name]

    def value_of(self, ref: VarRef, proc: Optional[ProcessState] = None) -> Value:
        if ref.scope is not None:
            return self.lookup(ref.scope, ref.name)
        owner = self.process(ref.process) if ref.process else proc
        if owner is not None and ref.name in owner.store:
            return owner.store[ref.name]
        return self.shared[ref.name]

    def classical_view(self) -> Dict[str, str]:
        """Flat `scope.name -> text` view of every store, shared first."""
        view = {name: format_value(v) for name, v in self.shared.items()}
        for proc in self.processes:
            for name, v in proc.store.items():
                view[f"{proc.name}.{name}"] = format_value(v)
        return view

    @property
    def all_terminated(self) -> bool:
        return all(p.status is ProcStatus.TERMINATED for p in self.processes)


def _settle(proc: ProcessState) -> ProcessState:
    """Pop finished blocks; a process with no open block has terminated."""
    if proc.status is not ProcStatus.RUNNING:
        return proc
    frames = list(proc.frames)
    while frames and frames[-1].pc >= len(frames[-1].body):
        frames.pop()
    if not frames:
        return replace(proc, frames=(), status=ProcStatus.TERMINATED)
    return replace(proc, frames=tuple(frames))


def initial_configuration(program: Program) -> Configuration:
    shared = {d.name: default_value(d.type) for d in program.shared if d.type.kind is not TypeKind.CHANNEL}
    processes = []
    for proc in program.processes:
        store = {d.name: default_value(d.type) for d in proc.decls if d.type.kind is not TypeKind.CHANNEL}
        state = ProcessState(proc.name, (Frame(proc.body, 0, id(proc.body)),), store)
        processes.append(_settle(state))
    return Configuration(tb.new_tableau(0), shared, tuple(processes), 0)


# ==================== ACTIONS ====================

class ActionKind(str, Enum):
    ASSIGN = "assign"
    NEWQUBIT = "newqubit"
    GATE = "gate"
    CNOT = "cnot"
    MEASURE = "measure"
    COMM = "comm"
    SELECT = "select"
    EXIT = "exit"
    SKIP = "skip"
    FAULT = "fault"


@dataclass(frozen=True)
class Action:
    """One interleaving step of `process` at statement `sid`.

    COMM actions belong to the sending process and name the receiver as partner.
    A measurement edge carries its outcome; `random` marks a two-way branch.
    """
    process: str
    sid: int
    kind: ActionKind
    partner: Optional[str] = None
    partner_sid: Optional[int] = None
    branch: Optional[int] = None
    outcome: Optional[int] = None
    random: bool = False
    reason: Optional[str] = field(default=None, compare=False)

    def __str__(self) -> str:
        head = f"{self.process}[{self.sid}] {self.kind.value}"
        if self.kind is ActionKind.COMM:
            return f"{head} -> {self.partner}[{self.partner_sid}]"
        if self.kind is ActionKind.SELECT:
            return f"{head} {self.branch + 1}"
        if self.kind is ActionKind.MEASURE and self.outcome is not None:
            return f"{head} = {self.outcome}{' (random)' if self.random else ''}"
        if self.kind is ActionKind.FAULT and self.reason:
            return f"{head}: {self.reason}"
        return head


# ==================== EXPRESSIONS ====================

def _check_int(value: int) -> int:
    if not INT64_MIN <= value <= INT64_MAX:
        raise RuntimeFault("integer overflow")
    return value


def evaluate_expr(expr, config: Configuration, proc: Optional[ProcessState] = None) -> Value:
    """Evaluate an expression; RuntimeFault on overflow or an unbound operand."""
    if isinstance(expr, (IntLit, RealLit, BoolLit)):
        return expr.value
    if isinstance(expr, VarRef):
        value = config.value_of(expr, proc)
        if isinstance(value, (QubitRef, Unbound)):
            raise RuntimeFault(f"qubit '{expr}' used as a value")
        return value
    if isinstance(expr, UnaryOp):
        operand = evaluate_expr(expr.operand, config, proc)
        if expr.op == "not":
            return not operand
        if isinstance(operand, int):
            return _check_int(-operand)
        return -operand
    if isinstance(expr, BinaryOp):
        left = evaluate_expr(expr.left, config, proc)
        right = evaluate_expr(expr.right, config, proc)
        op = expr.op
        if op == "and":
            return left and right
        if op == "or":
            return left or right
        if op == "imp":
            return (not left) or right
        if op == "==":
            return left == right
        if op == "!=":
            return left != right
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        if op == ">=":
            return left >= right
        if op == "+":
            result = left + right
        elif op == "-":
            result = left - right
        elif op == "*":
            result = left * right
        else:
            raise ValueError(f"unknown operator {op!r}")
        if isinstance(result, int):
            return _check_int(result)
        return result
    raise TypeError(f"not an expression: {expr!r}")


def _coerce(old: Value, new: Value) -> Value:
    if isinstance(old, float) and isinstance(new, int) and not isinstance(new, bool):
        return float(new)
    return new


# ==================== TRANSITIONS ====================

class _Builder:
    """Mutable scratch copy of a configuration for one transition."""

    def __init__(self, config: Configuration):
        self.quantum = config.quantum
        self.shared = dict(config.shared)
        self.processes = list(config.processes)
        self.step_count = config.step_count + 1
        self.stores: Dict[int, Dict[str, Value]] = {}

    def store_of(self, i: int) -> Dict[str, Value]:
        if i not in self.stores:
            self.stores[i] = dict(self.processes[i].store)
        return self.stores[i]

    def read(self, i: int, name: str) -> Value:
        store = self.store_of(i)
        return store[name] if name in store else self.shared[name]

    def write(self, i: int, name: str, value: Value) -> None:
        store = self.store_of(i)
        target = store if name in store else self.shared
        target[name] = _coerce(target[name], value)

    def qubit(self, i: int, name: str, what: str) -> int:
        value = self.read(i, name)
        if not isinstance(value, QubitRef):
            raise RuntimeFault(f"{what} on unbound qubit '{name}'")
        return value.id

    def advance(self, i: int) -> None:
        proc = self.processes[i]
        frames = list(proc.frames)
        top = frames[-1]
        frames[-1] = replace(top, pc=top.pc + 1)
        self.processes[i] = replace(proc, frames=tuple(frames))

    def enter(self, i: int, stmt, branch: int) -> None:
        proc = self.processes[i]
        if isinstance(stmt, GuardedIf):
            self.advance(i)
            proc = self.processes[i]
        body = stmt.branches[branch].body
        self.processes[i] = replace(proc, frames=proc.frames + (Frame(body, 0, id(body)),))

    def fault(self, i: int, reason: str) -> None:
        self.processes[i] = replace(self.processes[i], status=ProcStatus.FAULTED, fault=reason)

    def finish(self) -> Configuration:
        for i, store in self.stores.items():
            self.processes[i] = replace(self.processes[i], store=store)
        processes = tuple(_settle(p) for p in self.processes)
        return Configuration(self.quantum, self.shared, processes, self.step_count)


def _guards(config: Configuration, proc: ProcessState, stmt) -> List[bool]:
    return [bool(evaluate_expr(b.guard, config, proc)) for b in stmt.branches]


def enabled_actions(config: Configuration, local_channels: Optional[Mapping[str, frozenset]] = None) -> List[Action]:
    """Enabled actions in process declaration order, then branch order.

    Measurement actions are returned without an outcome; see `successors`.
    """
    local_channels = local_channels or {}
    actions: List[Action] = []
    for i, proc in enumerate(config.processes):
        stmt = proc.current()
        if stmt is None:
            continue
        name = proc.name
        if isinstance(stmt, Assign):
            actions.append(Action(name, stmt.sid, ActionKind.ASSIGN))
        elif isinstance(stmt, NewQubit):
            actions.append(Action(name, stmt.sid, ActionKind.NEWQUBIT))
        elif isinstance(stmt, Gate):
            actions.append(Action(name, stmt.sid, ActionKind.GATE))
        elif isinstance(stmt, CNot):
            actions.append(Action(name, stmt.sid, ActionKind.CNOT))
        elif isinstance(stmt, Measure):
            actions.append(Action(name, stmt.sid, ActionKind.MEASURE))
        elif isinstance(stmt, Skip):
            actions.append(Action(name, stmt.sid, ActionKind.SKIP))
        elif isinstance(stmt, Send):
            key = _channel(proc, stmt.channel, local_channels)
            for other in config.processes:
                target = other.current()
                if other is proc or not isinstance(target, Receive):
                    continue
                if _channel(other, target.channel, local_channels) == key:
                    actions.append(Action(name, stmt.sid, ActionKind.COMM, other.name, target.sid))
        elif isinstance(stmt, (GuardedIf, GuardedDo)):
            try:
                guards = _guards(config, proc, stmt)
            except RuntimeFault as e:
                actions.append(Action(name, stmt.sid, ActionKind.FAULT, reason=str(e)))
                continue
            chosen = [k for k, g in enumerate(guards) if g]
            if chosen:
                actions.extend(Action(name, stmt.sid, ActionKind.SELECT, branch=k) for k in chosen)
            else:
                actions.append(Action(name, stmt.sid, ActionKind.EXIT))
    return actions


def _channel(proc: ProcessState, name: str, local_channels: Mapping[str, frozenset]) -> Tuple[str, str]:
    """Channels declared locally are private to their process."""
    if name in local_channels.get(proc.name, ()):
        return proc.name, name
    return "", name


def _index(config: Configuration, name: str) -> int:
    for i, proc in enumerate(config.processes):
        if proc.name == name:
            return i
    raise KeyError(name)


def _execute(config: Configuration, action: Action) -> List[Tuple[Action, Configuration]]:
    i = _index(config, action.process)
    proc = config.processes[i]
    stmt = proc.current()
    b = _Builder(config)
    labelled = action
    try:
        if action.kind is ActionKind.ASSIGN:
            b.write(i, stmt.target, evaluate_expr(stmt.expr, config, proc))
            b.advance(i)
        elif action.kind is ActionKind.NEWQUBIT:
            b.quantum, qid = tb.extend(config.quantum)
            b.write(i, stmt.target, QubitRef(qid))
            b.advance(i)
        elif action.kind is ActionKind.GATE:
            q = b.qubit(i, stmt.qubit, stmt.kind.value)
            b.quantum = tb.apply_gate(config.quantum, stmt.kind, q)
            b.advance(i)
        elif action.kind is ActionKind.CNOT:
            control = b.qubit(i, stmt.control, "cnot")
            target = b.qubit(i, stmt.target, "cnot")
            if control == target:
                raise RuntimeFault(f"cnot control and target are the same qubit ({stmt.control}, {stmt.target})")
            b.quantum = tb.apply_cnot(config.quantum, control, target)
            b.advance(i)
        elif action.kind is ActionKind.MEASURE:
            return _measure(config, action, i, stmt)
        elif action.kind is ActionKind.COMM:
            j = _index(config, action.partner)
            receive = config.processes[j].current()
            expr = stmt.expr
            raw = config.value_of(expr, proc) if isinstance(expr, VarRef) else None
            if isinstance(raw, (QubitRef, Unbound)):
                b.write(i, expr.name, UNBOUND)
                value = raw
            else:
                value = evaluate_expr(expr, config, proc)
            b.write(j, receive.target, value)
            b.advance(i)
            b.advance(j)
        elif action.kind is ActionKind.SELECT:
            b.enter(i, stmt, action.branch)
        elif action.kind in (ActionKind.EXIT, ActionKind.SKIP):
            b.advance(i)
        elif action.kind is ActionKind.FAULT:
            raise RuntimeFault(action.reason or "guard evaluation failed")
        else:
            raise ValueError(f"unknown action kind {action.kind!r}")
    except RuntimeFault as e:
        b = _Builder(config)
        b.fault(i, str(e))
        logger.debug(f"[TREE] {action.process} faulted at statement {action.sid}: {e}")
    return [(labelled, b.finish())]


def _measure(config: Configuration, action: Action, i: int, stmt: Measure) -> List[Tuple[Action, Configuration]]:
    b = _Builder(config)
    try:
        q = b.qubit(i, stmt.qubit, "meas")
    except RuntimeFault as e:
        b.fault(i, str(e))
        return [(action, b.finish())]
    result = tb.measure(config.quantum, q)
    if isinstance(result, tb.Deterministic):
        outcomes, random = [result.bit], False
    else:
        outcomes, random = [0, 1], True
    if action.outcome is not None:
        if action.outcome not in outcomes:
            return []
        outcomes = [action.outcome]
    out = []
    for bit in outcomes:
        b = _Builder(config)
        if random:
            b.quantum = tb.collapse(config.quantum, q, bit)
        b.write(i, stmt.target, bool(bit))
        b.advance(i)
        out.append((replace(action, outcome=bit, random=random), b.finish()))
    return out


def successors(config: Configuration, local_channels: Optional[Mapping[str, frozenset]] = None
               ) -> List[Tuple[Action, Configuration]]:
    """Labelled successors in the deterministic child order."""
    out: List[Tuple[Action, Configuration]] = []
    for action in enabled_actions(config, local_channels):
        out.extend(_execute(config, action))
    return out


def step(config: Configuration, action: Action) -> List[Configuration]:
    """Successors of one enabled action: two for a random measurement, else one."""
    return [c for _, c in _execute(config, action)]


def mark_blocked(config: Configuration) -> Configuration:
    """Running processes of a configuration without enabled actions are Blocked."""
    if not any(p.status is ProcStatus.RUNNING for p in config.processes):
        return config
    processes = tuple(replace(p, status=ProcStatus.BLOCKED) if p.status is ProcStatus.RUNNING else p
                      for p in config.processes)
    return replace(config, processes=processes)


def local_channels_of(program: Program) -> Dict[str, frozenset]:
    return {p.name: frozenset(d.name for d in p.decls if d.type.kind is TypeKind.CHANNEL)
            for p in program.processes}


def replay(program: Program, actions: Sequence[Action]) -> Configuration:
    """Re-execute a trace from the initial configuration; ReplayError if it diverges."""
    channels = local_channels_of(program)
    config = initial_configuration(program)
    for position, action in enumerate(actions, start=1):
        matches = [c for a, c in successors(config, channels) if a == action]
        if not matches:
            raise ReplayError(position, f"action '{action}' is not enabled")
        config = matches[0]
        logger.debug(f"[REPLAY] {position}: {action}")
    if not successors(config, channels):
        config = mark_blocked(config)
    return config


def iter_statuses(config: Configuration) -> Iterator[Tuple[str, str]]:
    for proc in config.processes:
        status = proc.status.value
        if proc.fault:
            status = f"{status} ({proc.fault})"
        yield proc.name, status
