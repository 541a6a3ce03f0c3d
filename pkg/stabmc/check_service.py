import logging
import time
from typing import List, Optional, Tuple, Union

from stabmc import formula as F
from stabmc.diagnostics import has_errors
from stabmc.errors import LimitExceeded, ReplayError
from stabmc.evaluator import Verdict, VerdictStatus, eval_state, state_values
from stabmc.executor import Action, replay
from stabmc.frontend import compile_source
from stabmc.report import (
    EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, EXIT_VIOLATED, ActionModel, DiagnosticModel, PropertyResult,
    RunReport,
)
from stabmc.settings import Limits
from stabmc.syntax import Program, PropertyDecl, PropertyKind
from stabmc.temporal import TemporalChecker, check_final_state, check_temporal, state_formula_of
from stabmc.tree import ExecTree, build_tree

logger = logging.getLogger(__name__)


class CheckService:
    """Runs the model-checking pipeline and packages the outcome as a RunReport."""

    def __init__(self, limits: Optional[Limits] = None):
        self.limits = limits or Limits.from_env()

    # ==================== PIPELINE ====================

    def compile(self, source: Union[str, bytes], name: str = "<model>") -> Tuple[Optional[Program], RunReport]:
        started = time.perf_counter()
        program, diagnostics = compile_source(source)
        report = RunReport(model=program.name if program else name,
                           diagnostics=[DiagnosticModel.from_diagnostic(d) for d in diagnostics],
                           timings={"parse": time.perf_counter() - started})
        if has_errors(diagnostics):
            logger.info(f"[PARSE] {name}: {sum(1 for d in diagnostics if d.is_error)} error(s)")
        return program, report

    def build(self, program: Program, report: RunReport, limits: Optional[Limits] = None) -> Optional[ExecTree]:
        limits = limits or self.limits
        started = time.perf_counter()
        try:
            tree = build_tree(program, limits)
        except LimitExceeded as e:
            trace = ", ".join(str(a) for a in e.path[-5:])
            report.error = f"{e} (last actions: {trace})" if trace else str(e)
            report.limit_exceeded = True
            return None
        finally:
            report.timings["tree"] = time.perf_counter() - started
        report.stats = tree.stats()
        return tree

    def check(self, source: Union[str, bytes], name: str = "<model>", limits: Optional[Limits] = None,
              property_index: Optional[int] = None) -> Tuple[RunReport, Optional[ExecTree]]:
        """Compile, build the tree and check the selected properties (1-based index)."""
        limits = limits or self.limits
        program, report = self.compile(source, name)
        if program is None:
            return report, None
        selected = self.select_properties(program, property_index, report)
        if selected is None:
            return report, None
        tree = self.build(program, report, limits)
        if tree is None:
            return report, None
        started = time.perf_counter()
        checker = TemporalChecker(tree, limits.support_cap)
        for index, prop in selected:
            report.properties.append(self.check_property(index, prop, tree, checker, limits.support_cap))
        report.timings["check"] = time.perf_counter() - started
        return report, tree

    @staticmethod
    def select_properties(program: Program, property_index: Optional[int],
                          report: RunReport) -> Optional[List[Tuple[int, PropertyDecl]]]:
        numbered = list(enumerate(program.properties, start=1))
        if property_index is None:
            return numbered
        if not 1 <= property_index <= len(numbered):
            report.diagnostics.append(DiagnosticModel(
                severity="error", line=0, column=0,
                message=f"--property {property_index} out of range (model has {len(numbered)} properties)"))
            return None
        return [numbered[property_index - 1]]

    def check_property(self, index: int, prop: PropertyDecl, tree: ExecTree, checker: TemporalChecker,
                       support_cap: int) -> PropertyResult:
        if prop.kind is PropertyKind.FINAL_STATE:
            verdict = check_final_state(prop.formula, tree, support_cap)
            focus = prop.formula
        else:
            verdict = check_temporal(prop.formula, tree, support_cap, checker)
            focus = None
            if verdict.node is not None and verdict.status is not VerdictStatus.UNDEFINED:
                _, focus, _ = checker.explain(prop.formula, 0)
        logger.info(f"[CHECK] property {index}: {verdict.status.value}")
        result = PropertyResult(index=index, kind=prop.kind.value, text=prop.text,
                                verdict=verdict.status.value, reason=verdict.reason, node=verdict.node)
        if verdict.node is not None:
            result.trace = [ActionModel.from_action(a) for a in tree.path_to(verdict.node)]
            if focus is not None and verdict.status is not VerdictStatus.TRUE:
                result.values = state_values(focus, tree.nodes[verdict.node].config, support_cap)
        return result

    # ==================== REPLAY ====================

    def replay(self, program: Program, property_index: int, actions: List[Action],
               support_cap: Optional[int] = None) -> Tuple[int, str]:
        """Re-execute a trace and re-evaluate the property's state formula at its end.

        Returns (exit code, message): 1 when the violation is reproduced, 0 when
        the formula holds there, 3 when it is undefined, 2 when the trace cannot
        be replayed.
        """
        cap = self.limits.support_cap if support_cap is None else support_cap
        if not 1 <= property_index <= len(program.properties):
            return EXIT_USAGE, f"property {property_index} does not exist"
        prop = program.properties[property_index - 1]
        try:
            config = replay(program, actions)
        except ReplayError as e:
            logger.info(f"[REPLAY] {e}")
            return EXIT_USAGE, f"trace not replayable: {e}"
        if prop.kind is PropertyKind.FINAL_STATE:
            gamma, violated = prop.formula, VerdictStatus.FALSE
        else:
            gamma, violated = state_formula_of(prop.formula)
        verdict: Verdict = eval_state(gamma, config, cap)
        described = F.format_formula(gamma)
        if verdict.status is VerdictStatus.UNDEFINED:
            return EXIT_INCONCLUSIVE, f"{described} is undefined after {len(actions)} step(s): {verdict.reason}"
        if verdict.status is violated:
            return EXIT_VIOLATED, f"violation reproduced after {len(actions)} step(s): {described} is {violated.value}"
        return EXIT_OK, f"not reproduced: {described} is {verdict.status.value} after {len(actions)} step(s)"
