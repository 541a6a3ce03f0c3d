"""Run report models and their text / JSON renderings."""
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from stabmc.diagnostics import Diagnostic
from stabmc.executor import Action, ActionKind
from stabmc.tree import TreeStats

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


class ActionModel(BaseModel):
    process: str
    sid: int
    kind: str
    partner: Optional[str] = None
    partner_sid: Optional[int] = None
    branch: Optional[int] = None
    outcome: Optional[int] = None
    random: bool = False
    text: Optional[str] = None

    @classmethod
    def from_action(cls, action: Action) -> "ActionModel":
        return cls(process=action.process, sid=action.sid, kind=action.kind.value, partner=action.partner,
                   partner_sid=action.partner_sid, branch=action.branch, outcome=action.outcome,
                   random=action.random, text=str(action))

    def to_action(self) -> Action:
        return Action(self.process, self.sid, ActionKind(self.kind), self.partner, self.partner_sid,
                      self.branch, self.outcome, self.random)


class DiagnosticModel(BaseModel):
    severity: str
    line: int
    column: int
    message: str

    @classmethod
    def from_diagnostic(cls, d: Diagnostic) -> "DiagnosticModel":
        return cls(severity=d.severity.value, line=d.line, column=d.column, message=d.message)

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class PropertyResult(BaseModel):
    index: int
    kind: str
    text: str
    verdict: str
    reason: Optional[str] = None
    node: Optional[int] = None
    trace: List[ActionModel] = Field(default_factory=list)
    values: Dict[str, str] = Field(default_factory=dict)


class TraceFile(BaseModel):
    """What `--replay` reads: one element of a JSON report's `properties`."""
    index: int
    trace: List[ActionModel] = Field(default_factory=list)


class RunReport(BaseModel):
    model: str
    diagnostics: List[DiagnosticModel] = Field(default_factory=list)
    stats: Optional[TreeStats] = None
    properties: List[PropertyResult] = Field(default_factory=list)
    error: Optional[str] = None
    limit_exceeded: bool = False
    timings: Optional[Dict[str, float]] = None

    @property
    def has_frontend_errors(self) -> bool:
        return any(d.severity == "error" for d in self.diagnostics)

    def exit_code(self) -> int:
        if self.has_frontend_errors:
            return EXIT_USAGE
        if any(p.verdict == "false" for p in self.properties):
            return EXIT_VIOLATED
        if self.limit_exceeded or self.error or any(p.verdict == "undefined" for p in self.properties):
            return EXIT_INCONCLUSIVE
        return EXIT_OK

    def to_json(self) -> str:
        return self.model_dump_json(exclude_none=True)

    def render_text(self, show_timings: bool = False) -> str:
        lines = [f"model: {self.model}"]
        lines.extend(str(d) for d in self.diagnostics)
        if self.stats is not None:
            lines.append(format_stats(self.stats))
        if self.error:
            lines.append(f"error: {self.error}")
        for prop in self.properties:
            lines.append(f"[{prop.index}] {prop.kind} ({prop.text}): {prop.verdict.upper()}")
            if prop.reason:
                lines.append(f"    reason: {prop.reason}")
            if prop.verdict == "true":
                continue
            for name, value in prop.values.items():
                lines.append(f"    {name} = {value}")
            label = "counterexample" if prop.verdict == "false" else "path"
            where = f" ending at node #{prop.node}" if prop.node is not None else ""
            lines.append(f"    {label}{where}, {len(prop.trace)} step(s):")
            for i, action in enumerate(prop.trace, start=1):
                lines.append(f"      {i:3d}. {action.text or action.to_action()}")
        if show_timings and self.timings:
            lines.append("timings: " + ", ".join(f"{k} {v:.3f}s" for k, v in self.timings.items()))
        return "\n".join(lines) + "\n"


def format_stats(stats: TreeStats) -> str:
    return (f"tree: {stats.nodes} nodes, {stats.leaves} leaves ({stats.terminated} terminated, "
            f"{stats.deadlocked} deadlocked, {stats.faulted} faulted), max depth {stats.max_depth}, "
            f"{stats.measurement_branches} measurement branch point(s)")
