"""
Unit tests for the stabilizer engine
Run with: python -m pytest stabmc/tests/test_tableau.py -v
"""
import pytest
import sys
import os
from fractions import Fraction

import numpy as np

# Add project root to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from stabmc import gf2
from stabmc import tableau as tb
from stabmc.errors import CnotSameQubit, EntangledSubsystem, InvalidQubit, NotRandom, SupportTooLarge
from stabmc.tests.statevector import StateVector


def bell():
    t = tb.new_tableau(2)
    t = tb.apply_gate(t, "had", 0)
    return tb.apply_cnot(t, 0, 1)


def random_circuit(rng, t, sv, gates):
    """Apply the same random Clifford circuit (with measurements) to both representations."""
    for _ in range(gates):
        n = t.n
        choice = rng.integers(0, 7)
        if choice == 6 and n < 6:
            t, qid = tb.extend(t)
            assert qid == sv.add_qubit()
            continue
        q = int(rng.integers(0, n))
        if choice == 0:
            t = tb.apply_gate(t, "had", q)
            sv.hadamard(q)
        elif choice == 1:
            t = tb.apply_gate(t, "ph", q)
            sv.phase(q)
        elif choice == 2:
            t = tb.apply_gate(t, "X", q)
            sv.pauli_x(q)
        elif choice in (3, 4) and n > 1:
            target = int(rng.integers(0, n - 1))
            target += target >= q
            t = tb.apply_cnot(t, q, target)
            sv.cnot(q, target)
        else:
            result = tb.measure(t, q)
            if isinstance(result, tb.Random):
                bit = int(rng.integers(0, 2))
                t = tb.collapse(t, q, bit)
                sv.collapse(q, bit)
    return t, sv


def assert_same_state(t, sv, rng):
    assert t.check_invariants() == []
    valuations = tb.support_valuations(t, cap=t.n)
    bits = [v.bits for v in valuations]
    assert bits == sv.support()
    first = bits[0]
    for v in valuations:
        assert Fraction(1, 2 ** v.amplitude.halflog) == sv.weight(v.bits)
        assert v.amplitude.phase % 4 == sv.relative_phase(v.bits, first)
    for q in range(t.n):
        result = tb.measure(t, q)
        expected = sv.measure(q)
        if expected is None:
            assert isinstance(result, tb.Random)
        else:
            assert result == tb.Deterministic(expected)
    for _ in range(3):
        size = int(rng.integers(1, t.n + 1))
        subset = sorted(int(q) for q in rng.choice(t.n, size=size, replace=False))
        assert tb.is_unentangled(t, subset) == sv.is_unentangled(subset)


class TestGates:
    """Single gates on small states"""

    def test_zero_state_support(self):
        """|000> has a single valuation with amplitude +1"""
        t = tb.new_tableau(3)
        (only,) = tb.support_valuations(t)
        assert only.bits == (0, 0, 0)
        assert only.amplitude == tb.ExactAmplitude(0, 0)
        assert only.label() == "000"

    def test_hadamard_gives_plus(self):
        """had on |0> spreads over both valuations with equal phase"""
        t = tb.apply_gate(tb.new_tableau(1), "had", 0)
        valuations = tb.support_valuations(t)
        assert [v.bits for v in valuations] == [(0,), (1,)]
        assert all(v.amplitude == tb.ExactAmplitude(0, 1) for v in valuations)

    def test_phase_on_plus(self):
        """ph turns |+> into |0> + i|1>"""
        t = tb.apply_gate(tb.apply_gate(tb.new_tableau(1), "had", 0), "ph", 0)
        zero, one = tb.support_valuations(t)
        assert zero.amplitude.phase == 0
        assert one.amplitude.phase == 1

    def test_x_then_hadamard_gives_minus(self):
        """X then had gives |0> - |1>"""
        t = tb.apply_gate(tb.apply_gate(tb.new_tableau(1), "X", 0), "had", 0)
        zero, one = tb.support_valuations(t)
        assert one.amplitude.phase == 2

    def test_bell_support(self):
        """had + cnot gives the Bell pair 00 + 11"""
        assert [v.bits for v in tb.support_valuations(bell())] == [(0, 0), (1, 1)]

    def test_operations_do_not_modify_input(self):
        """Module-level operations return new tableaux"""
        t = tb.new_tableau(2)
        before = t.dump()
        tb.apply_gate(t, "had", 0)
        tb.apply_cnot(t, 0, 1)
        tb.extend(t)
        assert t.dump() == before

    def test_extend_appends_zero_qubit(self):
        """extend returns the id of a fresh |0> qubit"""
        t, qid = tb.extend(bell())
        assert qid == 2
        assert [v.bits for v in tb.support_valuations(t)] == [(0, 0, 0), (1, 1, 0)]
        assert t.check_invariants() == []

    def test_dump_format(self):
        """dump lists destabilizers, a separator and stabilizers"""
        assert tb.new_tableau(2).dump() == "+XI\n+IX\n---\n+ZI\n+IZ"


class TestMeasurement:
    """Measurement and collapse"""

    def test_zero_is_deterministic(self):
        """Measuring |0> gives 0 for certain"""
        assert tb.measure(tb.new_tableau(1), 0) == tb.Deterministic(0)

    def test_one_is_deterministic(self):
        """Measuring X|0> gives 1 for certain"""
        assert tb.measure(tb.apply_gate(tb.new_tableau(1), "X", 0), 0) == tb.Deterministic(1)

    def test_plus_is_random(self):
        """Measuring |+> is random"""
        assert tb.measure(tb.apply_gate(tb.new_tableau(1), "had", 0), 0) is tb.RANDOM

    def test_bell_collapse_correlates(self):
        """Collapsing one half of a Bell pair fixes the other half"""
        for bit in (0, 1):
            t = tb.collapse(bell(), 0, bit)
            assert tb.measure(t, 1) == tb.Deterministic(bit)
            assert [v.bits for v in tb.support_valuations(t)] == [(bit, bit)]

    def test_collapse_deterministic_raises(self):
        """collapse on a determined qubit is a contract violation"""
        with pytest.raises(NotRandom):
            tb.collapse(tb.new_tableau(1), 0, 0)

    def test_collapse_bad_outcome(self):
        """Outcomes are bits"""
        with pytest.raises(ValueError):
            tb.collapse(tb.apply_gate(tb.new_tableau(1), "had", 0), 0, 2)


class TestErrors:
    """Precondition checks"""

    def test_invalid_qubit(self):
        """Gate on a qubit id outside the state"""
        with pytest.raises(InvalidQubit):
            tb.apply_gate(tb.new_tableau(2), "had", 2)

    def test_cnot_same_qubit(self):
        """cnot needs two distinct qubits"""
        with pytest.raises(CnotSameQubit):
            tb.apply_cnot(tb.new_tableau(2), 1, 1)

    def test_support_cap(self):
        """A support of 2^3 valuations exceeds cap 2"""
        t = tb.new_tableau(3)
        for q in range(3):
            t = tb.apply_gate(t, "had", q)
        with pytest.raises(SupportTooLarge):
            tb.support_valuations(t, cap=2)
        assert len(tb.support_valuations(t, cap=3)) == 8


class TestQueries:
    """Probability, projection, entanglement and amplitude queries"""

    def test_probability_plus(self):
        """P(qubit 0 = 0) on |+> is exactly 1/2"""
        t = tb.apply_gate(tb.new_tableau(1), "had", 0)
        assert tb.probability(t, lambda bits: bits[0] == 0) == Fraction(1, 2)

    def test_probability_ghz(self):
        """P(q0 == q1) on GHZ(3) is exactly 1"""
        t = tb.apply_cnot(tb.apply_cnot(tb.apply_gate(tb.new_tableau(3), "had", 0), 0, 1), 1, 2)
        assert tb.probability(t, lambda bits: bits[0] == bits[1]) == 1
        assert tb.probability(t, lambda bits: bits[2] == 1, qubits=[2]) == Fraction(1, 2)

    def test_projected_support(self):
        """Projection of |+> ⊗ Bell onto the Bell half"""
        t, _ = tb.extend(bell())
        t = tb.apply_gate(t, "had", 2)
        assert tb.projected_support(t, [0, 1]) == [(0, 0), (1, 1)]
        assert tb.projected_support(t, [1, 2]) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert tb.projected_support(t, []) == [()]

    def test_projected_support_cap_is_projected_dimension(self):
        """The cap applies to the projected dimension only"""
        t = tb.new_tableau(4)
        for q in range(4):
            t = tb.apply_gate(t, "had", q)
        assert len(tb.projected_support(t, [0], cap=1)) == 2
        with pytest.raises(SupportTooLarge):
            tb.projected_support(t, [0, 1], cap=1)

    def test_bell_entanglement(self):
        """Bell pair: the pair is a factor, a single half is not"""
        t = bell()
        assert tb.is_unentangled(t, [0, 1])
        assert not tb.is_unentangled(t, [0])
        assert not tb.is_unentangled(t, [1])

    def test_amplitude_of_factor(self):
        """Amplitude of |1> in the |+> factor of |+> ⊗ Bell is 2^(-1/2)"""
        t, q = tb.extend(bell())
        t = tb.apply_gate(t, "had", q)
        amp = tb.amplitude_term(t, [q], (1,))
        assert amp == tb.ExactAmplitude(0, 1)
        assert amp.real == pytest.approx(2 ** -0.5)
        assert amp.imag == 0

    def test_amplitude_rational_on_bell_pair(self):
        """Amplitudes with an even 1/sqrt(2) power are exact Fractions"""
        t = tb.apply_gate(tb.apply_gate(tb.new_tableau(2), "had", 0), "had", 1)
        amp = tb.amplitude_term(t, [0, 1], (1, 1))
        assert amp.real == Fraction(1, 2)

    def test_amplitude_outside_support(self):
        """A valuation outside the support has amplitude zero"""
        amp = tb.amplitude_term(bell(), [0, 1], (0, 1))
        assert amp.zero
        assert amp.real == 0

    def test_amplitude_entangled(self):
        """Half a Bell pair has no amplitude of its own"""
        with pytest.raises(EntangledSubsystem):
            tb.amplitude_term(bell(), [0], (0,))


class TestGF2:
    """Binary linear algebra helpers"""

    def test_rank(self):
        """Rank over GF(2), not over the reals"""
        m = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]], dtype=np.uint8)
        assert gf2.rank(m) == 2

    def test_row_echelon_pivots(self):
        """Pivot columns of a reduced matrix"""
        reduced, pivots = gf2.row_echelon([[0, 1, 1], [0, 1, 0]])
        assert pivots == [1, 2]
        assert reduced.tolist() == [[0, 1, 0], [0, 0, 1]]

    def test_span(self):
        """The span of k independent vectors has 2^k elements"""
        vectors = gf2.span(np.array([[1, 0, 1], [0, 1, 1]], dtype=np.uint8))
        assert sorted(tuple(v) for v in vectors.tolist()) == [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]


class TestOracleEquivalence:
    """Random Clifford circuits against the dense statevector"""

    def test_random_circuits(self):
        """1000 circuits of up to 6 qubits and 40 gates agree exactly"""
        rng = np.random.default_rng(20240601)
        for _ in range(1000):
            n = int(rng.integers(1, 7))
            gates = int(rng.integers(0, 41))
            t, sv = random_circuit(rng, tb.new_tableau(n), StateVector(n), gates)
            assert_same_state(t, sv, rng)

    def test_random_probabilities_and_projections(self):
        """Outcome probabilities and projected supports agree with the statevector"""
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(2, 6))
            t, sv = random_circuit(rng, tb.new_tableau(n), StateVector(n), 30)
            q = int(rng.integers(0, t.n))
            assert tb.probability(t, lambda bits: bits[q] == 1, qubits=[q]) == sv.weight_of_outcome(q, 1)
            subset = sorted(int(x) for x in rng.choice(t.n, size=2, replace=False))
            expected = sorted({tuple(bits[i] for i in subset) for bits in sv.support()})
            assert tb.projected_support(t, subset) == expected

    def test_random_factor_amplitudes(self):
        """Amplitudes of unentangled subsets match the statevector up to global phase"""
        rng = np.random.default_rng(11)
        checked = 0
        for _ in range(400):
            n = int(rng.integers(2, 6))
            t, sv = random_circuit(rng, tb.new_tableau(n), StateVector(n), 15)
            subset = sorted(int(x) for x in rng.choice(t.n, size=int(rng.integers(1, t.n)), replace=False))
            if not tb.is_unentangled(t, subset):
                continue
            checked += 1
            rest_bits = sv.support()[0]
            factor = sorted({tuple(bits[i] for i in subset) for bits in sv.support()})

            def full(values):
                bits = list(rest_bits)
                for i, b in zip(subset, values):
                    bits[i] = b
                return bits

            marginal = sum((sv.weight(full(v)) for v in factor), Fraction(0))
            for values in factor:
                amp = tb.amplitude_term(t, subset, values)
                assert Fraction(1, 2 ** amp.halflog) == sv.weight(full(values)) / marginal
                assert amp.phase % 4 == sv.relative_phase(full(values), full(factor[0]))
        assert checked > 0


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
