"""
Depth-first path enumeration straight over the interpreter.

Counts what the execution tree should contain without going through
`build_tree`: every call to `successors` is one node, every configuration
without successors one leaf.
"""
from dataclasses import dataclass

from stabmc.executor import ActionKind, Configuration, initial_configuration, local_channels_of, successors


@dataclass
class PathCounts:
    nodes: int = 0
    leaves: int = 0
    terminated: int = 0
    max_depth: int = 0
    measurement_branches: int = 0


def count_paths(program, max_depth: int = 200) -> PathCounts:
    channels = local_channels_of(program)
    counts = PathCounts()

    def visit(config: Configuration, depth: int) -> None:
        counts.nodes += 1
        counts.max_depth = max(counts.max_depth, depth)
        if depth > max_depth:
            raise RuntimeError(f"path longer than {max_depth} steps")
        children = successors(config, channels)
        if not children:
            counts.leaves += 1
            counts.terminated += int(config.all_terminated)
            return
        random = [a for a, _ in children if a.kind is ActionKind.MEASURE and a.random]
        # a random measurement contributes its two outcomes as siblings
        counts.measurement_branches += len(random) // 2
        for _, child in children:
            visit(child, depth + 1)

    visit(initial_configuration(program), 0)
    return counts
