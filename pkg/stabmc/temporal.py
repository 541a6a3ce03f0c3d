"""
Temporal checking over an execution tree.

Finite paths are completed by letting every leaf loop on itself, which gives the
usual CTL readings at leaves: EX θ and AF θ reduce to θ, E[θ1 U θ2] to θ2.
Each subformula is labelled over all nodes bottom-up (children have larger
indices than their parent, so one reverse sweep suffices). When children are
combined, the first child in order whose verdict decides the result, or is
Undefined, wins.
"""
import logging
from typing import Dict, List, Optional, Tuple

from stabmc import formula as F
from stabmc.evaluator import FALSE, TRUE, Verdict, VerdictStatus, eval_state
from stabmc.settings import SUPPORT_CAP
from stabmc.tree import ExecTree

logger = logging.getLogger(__name__)

T, Fa, U = VerdictStatus.TRUE, VerdictStatus.FALSE, VerdictStatus.UNDEFINED


class TemporalChecker:

    def __init__(self, tree: ExecTree, support_cap: int = SUPPORT_CAP):
        self.tree = tree
        self.support_cap = support_cap
        self._labels: Dict[int, Tuple[object, List[Verdict]]] = {}

    # ==================== LABELLING ====================

    def verdicts(self, theta: F.Temporal) -> List[Verdict]:
        """Verdict of θ at every tree node, indexed like `tree.nodes`."""
        cached = self._labels.get(id(theta))
        if cached is not None:
            return cached[1]
        labels = self._label(theta)
        # keep θ alive so its id stays unique
        self._labels[id(theta)] = (theta, labels)
        return labels

    def _label(self, theta) -> List[Verdict]:
        nodes = self.tree.nodes
        count = len(nodes)
        if isinstance(theta, F.State):
            out = []
            for i, node in enumerate(nodes):
                v = eval_state(theta.formula, node.config, self.support_cap)
                out.append(v.at(i) if v.status is U else v)
            return out
        if isinstance(theta, F.TImplies):
            left, right = self.verdicts(theta.left), self.verdicts(theta.right)
            out = []
            for i in range(count):
                if left[i].status is U:
                    out.append(left[i])
                elif left[i].status is Fa:
                    out.append(TRUE)
                else:
                    out.append(right[i])
            return out

        out: List[Optional[Verdict]] = [None] * count
        if isinstance(theta, F.EX):
            inner = self.verdicts(theta.formula)
            for i, node in enumerate(nodes):
                if not node.children:
                    out[i] = inner[i]
                else:
                    out[i] = self._any([inner[c] for c in node.children])
            return out
        if isinstance(theta, F.EU):
            left, right = self.verdicts(theta.left), self.verdicts(theta.right)
            for i in range(count - 1, -1, -1):
                node = nodes[i]
                if right[i].status is not Fa:
                    out[i] = right[i]
                elif left[i].status is not T:
                    out[i] = left[i]
                elif not node.children:
                    out[i] = FALSE
                else:
                    out[i] = self._any([out[c] for c in node.children])
            return out
        if isinstance(theta, F.AF):
            inner = self.verdicts(theta.formula)
            for i in range(count - 1, -1, -1):
                node = nodes[i]
                if inner[i].status is not Fa:
                    out[i] = inner[i]
                elif not node.children:
                    out[i] = FALSE
                else:
                    out[i] = self._all([out[c] for c in node.children])
            return out
        raise TypeError(f"not a temporal formula: {theta!r}")

    @staticmethod
    def _any(children: List[Verdict]) -> Verdict:
        for v in children:
            if v.status is not Fa:
                return v
        return FALSE

    @staticmethod
    def _all(children: List[Verdict]) -> Verdict:
        for v in children:
            if v.status is not T:
                return v
        return TRUE

    # ==================== EXPLANATION ====================

    def explain(self, theta, node: int) -> Tuple[int, F.StateFormula, VerdictStatus]:
        """Follow θ's verdict at `node` down the tree.

        Returns the end node of the witness or counterexample path together with
        the state formula and status that settle the verdict there.
        """
        tree_nodes = self.tree.nodes
        while True:
            status = self.verdicts(theta)[node].status
            if isinstance(theta, F.State):
                return node, theta.formula, status
            if isinstance(theta, F.TImplies):
                left = self.verdicts(theta.left)[node].status
                if status is U:
                    theta = theta.left if left is U else theta.right
                elif status is T:
                    theta = theta.left if left is Fa else theta.right
                elif F.is_false(theta.right):
                    theta = theta.left
                else:
                    theta = theta.right
                continue
            children = tree_nodes[node].children
            if isinstance(theta, F.EX):
                if children:
                    node = self._pick(theta.formula, children, status)
                theta = theta.formula
                continue
            if isinstance(theta, (F.EU, F.AF)):
                goal = theta.right if isinstance(theta, F.EU) else theta.formula
                goal_status = self.verdicts(goal)[node].status
                if goal_status is not Fa:
                    theta = goal
                    continue
                if isinstance(theta, F.EU) and self.verdicts(theta.left)[node].status is not T:
                    theta = theta.left
                    continue
                if not children:
                    theta = goal
                    continue
                node = self._pick(theta, children, status)
                continue
            raise TypeError(f"not a temporal formula: {theta!r}")

    def _pick(self, theta, children: List[int], status: VerdictStatus) -> int:
        labels = self.verdicts(theta)
        for c in children:
            if labels[c].status is status:
                return c
        return children[0]


def check_temporal(theta: F.Temporal, tree: ExecTree, support_cap: int = SUPPORT_CAP,
                   checker: Optional[TemporalChecker] = None) -> Verdict:
    """Verdict of θ at the root, explained by the end node of its path."""
    checker = checker or TemporalChecker(tree, support_cap)
    verdict = checker.verdicts(theta)[0]
    end, _, _ = checker.explain(theta, 0)
    if verdict.status is VerdictStatus.UNDEFINED:
        logger.info(f"[CHECK] undefined at node {verdict.node}: {verdict.reason}")
        return verdict
    return Verdict(verdict.status, verdict.reason, end)


def check_final_state(gamma: F.StateFormula, tree: ExecTree, support_cap: int = SUPPORT_CAP) -> Verdict:
    """True iff γ holds at every leaf; otherwise the first failing leaf in index order."""
    for node in tree.nodes:
        if node.children:
            continue
        verdict = eval_state(gamma, node.config, support_cap)
        if not verdict.holds:
            return verdict.at(node.index)
    return TRUE


def state_formula_of(theta: F.Temporal,
                     wanted: VerdictStatus = VerdictStatus.FALSE) -> Tuple[F.StateFormula, VerdictStatus]:
    """The state formula a violation of θ ends in, and the status it has there.

    Used when replaying a trace without the tree: negations flip the expected
    status and each path operator descends into its goal formula.
    """
    while not isinstance(theta, F.State):
        if isinstance(theta, F.TImplies):
            if F.is_false(theta.right):
                wanted = Fa if wanted is T else T
                theta = theta.left
            else:
                theta = theta.right
        elif isinstance(theta, F.EU):
            # the end node of either kind of E[f U g] path settles g
            theta = theta.right
        elif isinstance(theta, (F.EX, F.AF)):
            theta = theta.formula
        else:
            raise TypeError(f"not a temporal formula: {theta!r}")
    return theta.formula, wanted
