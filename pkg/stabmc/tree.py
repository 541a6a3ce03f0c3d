"""
Execution tree construction.

Nodes are kept in a flat list in creation order, so a parent always precedes its
children and the children of a node have consecutive indices. Expansion is
depth-first with an explicit stack.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel

from stabmc import tableau as tb
from stabmc.errors import DepthExceeded, NodesExceeded, SupportTooLarge
from stabmc.executor import (
    Action, ActionKind, Configuration, ProcStatus, initial_configuration, iter_statuses,
    local_channels_of, mark_blocked, successors,
)
from stabmc.settings import Limits
from stabmc.syntax import Program

logger = logging.getLogger(__name__)


class LeafKind(str, Enum):
    TERMINATED = "terminated"
    DEADLOCKED = "deadlocked"
    FAULTED = "faulted"


@dataclass
class TreeNode:
    index: int
    config: Configuration
    parent: Optional[int] = None
    action: Optional[Action] = None
    depth: int = 0
    children: List[int] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def leaf_kind(self) -> Optional[LeafKind]:
        if self.children:
            return None
        statuses = [p.status for p in self.config.processes]
        if any(s is ProcStatus.FAULTED for s in statuses):
            return LeafKind.FAULTED
        if all(s is ProcStatus.TERMINATED for s in statuses):
            return LeafKind.TERMINATED
        return LeafKind.DEADLOCKED


class TreeStats(BaseModel):
    nodes: int
    leaves: int
    terminated: int
    deadlocked: int
    faulted: int
    max_depth: int
    measurement_branches: int


class ExecTree:

    def __init__(self):
        self.nodes: List[TreeNode] = []

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    def __len__(self) -> int:
        return len(self.nodes)

    def add_node(self, config: Configuration, parent: Optional[int] = None,
                 action: Optional[Action] = None) -> int:
        index = len(self.nodes)
        depth = 0
        if parent is not None:
            depth = self.nodes[parent].depth + 1
            self.nodes[parent].children.append(index)
        self.nodes.append(TreeNode(index, config, parent, action, depth))
        return index

    def leaves(self) -> List[TreeNode]:
        return [n for n in self.nodes if n.is_leaf]

    def path_to(self, index: int) -> List[Action]:
        actions: List[Action] = []
        node = self.nodes[index]
        while node.parent is not None:
            actions.append(node.action)
            node = self.nodes[node.parent]
        actions.reverse()
        return actions

    def stats(self) -> TreeStats:
        counts: Dict[LeafKind, int] = {kind: 0 for kind in LeafKind}
        branches = 0
        for node in self.nodes:
            kind = node.leaf_kind
            if kind is not None:
                counts[kind] += 1
            action = node.action
            if action is not None and action.kind is ActionKind.MEASURE and action.random and action.outcome == 1:
                branches += 1
        return TreeStats(
            nodes=len(self.nodes),
            leaves=sum(counts.values()),
            terminated=counts[LeafKind.TERMINATED],
            deadlocked=counts[LeafKind.DEADLOCKED],
            faulted=counts[LeafKind.FAULTED],
            max_depth=max((n.depth for n in self.nodes), default=0),
            measurement_branches=branches,
        )

    def to_dot(self, support_cap: int = 0) -> str:
        """DOT digraph; leaves are drawn as double circles.

        With a nonzero `support_cap` node labels also list the support valuations.
        """
        lines = ["digraph exectree {", "  node [shape=box, fontname=monospace];"]
        for node in self.nodes:
            label = _escape("\\n".join(node_label(node, support_cap)))
            shape = ", shape=doublecircle" if node.is_leaf else ""
            lines.append(f'  n{node.index} [label="{label}"{shape}];')
        for node in self.nodes:
            if node.parent is not None:
                lines.append(f'  n{node.parent} -> n{node.index} [label="{_escape(str(node.action))}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _escape(text: str) -> str:
    return text.replace('"', '\\"')


def node_label(node: TreeNode, support_cap: int = 0) -> List[str]:
    lines = [f"#{node.index}" + (f" {node.leaf_kind.value}" if node.is_leaf else "")]
    lines.extend(f"{name}: {status}" for name, status in iter_statuses(node.config))
    lines.extend(f"{name}={value}" for name, value in node.config.classical_view().items()
                 if not value.startswith("qubit#") and value != "unbound")
    if support_cap:
        lines.append(support_text(node.config, support_cap))
    return lines


def support_text(config: Configuration, cap: int) -> str:
    if config.quantum.n == 0:
        return "state: (no qubits)"
    try:
        terms = tb.support_valuations(config.quantum, cap)
    except SupportTooLarge as e:
        return f"state: {e}"
    return "state: " + " ".join(f"{v.amplitude}|{v.label()}>" for v in terms)


def build_tree(program: Program, limits: Optional[Limits] = None) -> ExecTree:
    """Expand every interleaving and measurement outcome of `program`.

    Raises DepthExceeded / NodesExceeded with the action path that crossed the limit.
    """
    limits = limits or Limits()
    channels = local_channels_of(program)
    tree = ExecTree()
    tree.add_node(initial_configuration(program))
    stack = [0]
    while stack:
        index = stack.pop()
        node = tree.nodes[index]
        children = successors(node.config, channels)
        if not children:
            node.config = mark_blocked(node.config)
            continue
        if node.depth + 1 > limits.max_depth:
            path = tree.path_to(index) + [children[0][0]]
            logger.warning(f"[TREE] depth limit {limits.max_depth} reached")
            raise DepthExceeded(limits.max_depth, path)
        if len(tree.nodes) + len(children) > limits.max_nodes:
            logger.warning(f"[TREE] node limit {limits.max_nodes} reached")
            raise NodesExceeded(limits.max_nodes, tree.path_to(index))
        first = len(tree.nodes)
        for action, config in children:
            tree.add_node(config, index, action)
        stack.extend(range(len(tree.nodes) - 1, first - 1, -1))
    stats = tree.stats()
    logger.info(f"[TREE] {stats.nodes} nodes, {stats.leaves} leaves, max depth {stats.max_depth}")
    return tree


def describe_leaf(node: TreeNode, cap: int) -> str:
    """One-line summary used by `tree --show-leaves`."""
    store = " ".join(f"{k}={v}" for k, v in node.config.classical_view().items())
    return f"#{node.index} {node.leaf_kind.value} depth={node.depth} {store} {support_text(node.config, cap)}"

