"""
Unit tests for the interleaving interpreter
Run with: python -m pytest stabmc/tests/test_executor.py -v
"""
import pytest
import sys
import os
import copy

# Add project root to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from stabmc import tableau as tb
from stabmc.errors import ReplayError
from stabmc.executor import (
    UNBOUND, Action, ActionKind, ProcStatus, QubitRef, enabled_actions, initial_configuration, local_channels_of,
    replay, step, successors,
)
from stabmc.frontend import load_program
from stabmc.tree import build_tree

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')
COINFLIP = os.path.join(os.path.dirname(__file__), '..', '..', 'models', 'coinflip.qmc')


def program_of(source):
    return load_program(source + "\n")


def single(body, decls):
    return program_of(f"program T; process Alpha; var {decls} begin {body} end; endprogram.")


def run(config, *kinds):
    """Take the first enabled action of each given kind in turn."""
    for kind in kinds:
        action = next(a for a in enabled_actions(config) if a.kind is kind)
        (config,) = step(config, action)
    return config


def run_action(config, action):
    (successor,) = step(config, action)
    return successor


class TestInitialConfiguration:
    """Defaults before any step"""

    def test_default_values(self):
        """Integers start at 0, bools at false, reals at 0.0 and qubits unbound"""
        program = program_of("program D; var s: real; process Alpha; var n: integer; b: bool; q: qubit; "
                             "begin skip; end; endprogram.")
        config = initial_configuration(program)
        assert dict(config.shared) == {"s": 0.0}
        proc = config.process("Alpha")
        assert dict(proc.store) == {"n": 0, "b": False, "q": UNBOUND}
        assert proc.status is ProcStatus.RUNNING
        assert config.quantum.n == 0
        assert config.step_count == 0

    def test_channels_have_no_value(self):
        """Channels are not part of any store"""
        config = initial_configuration(load_program(os.path.join(FIXTURES, 'deadlock.qmc')))
        assert "c" not in config.shared


class TestActions:
    """Enabled actions and their effects"""

    def test_process_order(self):
        """Actions follow process declaration order"""
        config = initial_configuration(load_program(os.path.join(FIXTURES, 'deadlock.qmc')))
        actions = enabled_actions(config)
        assert [(a.process, a.sid, a.kind) for a in actions] == [
            ("Sender", 1, ActionKind.ASSIGN), ("Idle", 3, ActionKind.SKIP),
        ]

    def test_if_without_true_guard_exits(self):
        """An if with no true guard is skipped in one step"""
        program = single("if :: n > 0 -> n := 1; fi n := 2;", "n: integer;")
        config = initial_configuration(program)
        assert enabled_actions(config) == [Action("Alpha", 1, ActionKind.EXIT)]
        config = run(config, ActionKind.EXIT, ActionKind.ASSIGN)
        assert config.process("Alpha").store["n"] == 2
        assert config.all_terminated

    def test_if_branches_in_order(self):
        """Every true guard gives its own selection, in branch order"""
        program = single("if :: true -> n := 1; :: n == 0 -> n := 2; fi", "n: integer;")
        actions = enabled_actions(initial_configuration(program))
        assert [(a.kind, a.branch) for a in actions] == [(ActionKind.SELECT, 0), (ActionKind.SELECT, 1)]
        entered = [run_action(initial_configuration(program), a).process("Alpha").current().sid for a in actions]
        assert entered == [2, 3]

    def test_do_is_re_evaluated(self):
        """After a do body finishes the do is the current statement again"""
        config = initial_configuration(load_program(os.path.join(FIXTURES, 'loop.qmc')))
        config = run(config, ActionKind.SELECT, ActionKind.ASSIGN)
        proc = config.process("Looper")
        assert proc.store["n"] == 1
        assert proc.current().sid == 1
        assert config.step_count == 2

    def test_qubit_send_moves_ownership(self):
        """Sending a qubit binds the receiver and unbinds the sender"""
        program = program_of("program Hand; var c: channel of qubit;\n"
                             "process Alpha; var q: qubit; begin q := newqubit; c!q; end;\n"
                             "process Beta; var r: qubit; begin c?r; end;\nendprogram.")
        config = run(initial_configuration(program), ActionKind.NEWQUBIT)
        actions = enabled_actions(config)
        assert actions == [Action("Alpha", 2, ActionKind.COMM, "Beta", 3)]
        assert str(actions[0]) == "Alpha[2] comm -> Beta[3]"
        (config,) = step(config, actions[0])
        assert config.process("Alpha").store["q"] is UNBOUND
        assert config.process("Beta").store["r"] == QubitRef(0)
        assert config.all_terminated

    def test_classical_send_copies(self):
        """A classical send leaves the sender's value in place"""
        program = program_of("program Copy; var c: channel of integer;\n"
                             "process Alpha; var n: integer; begin n := 5; c!n; end;\n"
                             "process Beta; var m: integer; begin c?m; end;\nendprogram.")
        config = run(initial_configuration(program), ActionKind.ASSIGN, ActionKind.COMM)
        assert config.process("Alpha").store["n"] == 5
        assert config.process("Beta").store["m"] == 5

    def test_integer_widens_to_real(self):
        """Integer values stored in a real variable become floats"""
        config = run(initial_configuration(single("r := 2;", "r: real;")), ActionKind.ASSIGN)
        value = config.process("Alpha").store["r"]
        assert isinstance(value, float) and value == 2.0

    def test_new_qubits_are_numbered(self):
        """newqubit allocates ids 0, 1, ... in |0>"""
        program = single("p := newqubit; q := newqubit;", "p, q: qubit;")
        config = run(initial_configuration(program), ActionKind.NEWQUBIT, ActionKind.NEWQUBIT)
        store = config.process("Alpha").store
        assert (store["p"], store["q"]) == (QubitRef(0), QubitRef(1))
        assert config.quantum.n == 2
        assert tb.measure(config.quantum, 1) == tb.Deterministic(0)


class TestFaults:
    """Runtime faults stop the acting process"""

    def test_integer_overflow(self):
        """Arithmetic past 64 bits faults and leaves the store unchanged"""
        program = single("n := 9223372036854775807; n := n + 1; n := 0;", "n: integer;")
        config = run(initial_configuration(program), ActionKind.ASSIGN, ActionKind.ASSIGN)
        proc = config.process("Alpha")
        assert proc.status is ProcStatus.FAULTED
        assert proc.fault == "integer overflow"
        assert proc.store["n"] == 9223372036854775807
        assert enabled_actions(config) == []

    def test_cnot_on_one_qubit(self):
        """cnot with the same qubit twice is a fault"""
        program = single("q := newqubit; cnot q, q;", "q: qubit;")
        config = run(initial_configuration(program), ActionKind.NEWQUBIT, ActionKind.CNOT)
        proc = config.process("Alpha")
        assert proc.status is ProcStatus.FAULTED
        assert "same qubit" in proc.fault

    def test_gate_on_unbound_qubit(self):
        """Gates need a bound qubit"""
        config = run(initial_configuration(single("had q;", "q: qubit;")), ActionKind.GATE)
        assert config.process("Alpha").fault == "had on unbound qubit 'q'"

    def test_fault_is_a_faulted_leaf(self):
        """The tree ends in a faulted leaf"""
        tree = build_tree(single("had q;", "q: qubit;"))
        assert tree.stats().faulted == 1
        assert len(tree) == 2


class TestMeasurement:
    """Measurement branching"""

    def test_random_outcome_branches(self):
        """A random measurement has two children, outcome 0 first"""
        program = single("q := newqubit; had q; r := meas q;", "q: qubit; r: bool;")
        config = run(initial_configuration(program), ActionKind.NEWQUBIT, ActionKind.GATE)
        children = successors(config)
        assert [(a.outcome, a.random) for a, _ in children] == [(0, True), (1, True)]
        for action, child in children:
            assert child.process("Alpha").store["r"] == bool(action.outcome)
            assert tb.measure(child.quantum, 0) == tb.Deterministic(action.outcome)

    def test_deterministic_outcome(self):
        """Measuring |0> gives one child with outcome 0"""
        program = single("q := newqubit; r := meas q;", "q: qubit; r: bool;")
        config = run(initial_configuration(program), ActionKind.NEWQUBIT)
        children = successors(config)
        assert [(a.outcome, a.random) for a, _ in children] == [(0, False)]
        assert children[0][1].process("Alpha").store["r"] is False

    def test_step_returns_both_outcomes(self):
        """step() on a random measurement gives two configurations"""
        program = single("q := newqubit; had q; r := meas q;", "q: qubit; r: bool;")
        config = run(initial_configuration(program), ActionKind.NEWQUBIT, ActionKind.GATE)
        (action,) = enabled_actions(config)
        assert len(step(config, action)) == 2


class TestImmutability:
    """Expansion never changes the configuration it starts from"""

    def test_successors_leave_input_unchanged(self):
        """successors and step keep stores, statuses and tableau of their input"""
        program = load_program(COINFLIP)
        channels = local_channels_of(program)
        frontier = [initial_configuration(program)]
        for _ in range(12):
            reached = []
            for config in frontier:
                before, tableau = copy.deepcopy(config), config.quantum.dump()
                children = successors(config, channels)
                for action in enabled_actions(config, channels):
                    step(config, action)
                assert config == before
                assert config.quantum.dump() == tableau
                reached.extend(child for _, child in children)
            frontier = reached
        assert frontier


class TestReplay:
    """Re-executing recorded traces"""

    def test_every_leaf_replays(self):
        """Replaying the path to a leaf reproduces its configuration"""
        program = load_program(os.path.join(FIXTURES, 'measure.qmc'))
        tree = build_tree(program)
        for leaf in tree.leaves():
            assert replay(program, tree.path_to(leaf.index)) == leaf.config

    def test_unknown_action(self):
        """An action that is not enabled is reported with its position"""
        program = load_program(os.path.join(FIXTURES, 'minimal.qmc'))
        with pytest.raises(ReplayError) as info:
            replay(program, [Action("Counter", 99, ActionKind.SKIP)])
        assert info.value.position == 1

    def test_impossible_outcome(self):
        """A deterministic measurement cannot replay the other outcome"""
        program = single("q := newqubit; r := meas q;", "q: qubit; r: bool;")
        trace = [Action("Alpha", 1, ActionKind.NEWQUBIT), Action("Alpha", 2, ActionKind.MEASURE, outcome=1)]
        with pytest.raises(ReplayError) as info:
            replay(program, trace)
        assert info.value.position == 2

    def test_deadlock_is_marked(self):
        """A replay ending without enabled actions marks running processes blocked"""
        program = load_program(os.path.join(FIXTURES, 'deadlock.qmc'))
        config = replay(program, [Action("Sender", 1, ActionKind.ASSIGN), Action("Idle", 3, ActionKind.SKIP)])
        assert config.process("Sender").status is ProcStatus.BLOCKED
        assert config.process("Idle").status is ProcStatus.TERMINATED


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
