"""
Unit tests for formula lowering and state-level evaluation
Run with: python -m pytest stabmc/tests/test_formula.py -v
"""
import pytest
import sys
import os
from fractions import Fraction

# Add project root to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from stabmc import formula as F
from stabmc.evaluator import VerdictStatus, eval_state, eval_term, state_values
from stabmc.formula_parser import parse_formula
from stabmc.frontend import load_program
from stabmc.syntax import PropertyKind, VarRef
from stabmc.tree import build_tree

FIXTURES = os.path.join(os.path.dirname(__file__), 'fixtures')

T, Fa, U = VerdictStatus.TRUE, VerdictStatus.FALSE, VerdictStatus.UNDEFINED

PREP_PLUS = "program Plus; process Prep; var q: qubit; r: real; begin q := newqubit; had q; r := 0.5; end; endprogram.\n"
Q = F.QubitAtom(VarRef("q"))


def final_state(program):
    """The configuration at the single leaf of a straight-line program."""
    (leaf,) = build_tree(program).leaves()
    return leaf.config


def statuses(program, cap=20):
    config = final_state(program)
    return [eval_state(p.formula, config, cap).status for p in program.properties]


def with_properties(source, *props):
    return load_program(source + "".join(f"finalstateproperty ({p});\n" for p in props))


def state(text):
    formula, diags = parse_formula(text, PropertyKind.FINAL_STATE)
    assert diags == []
    return formula


def temporal(text):
    formula, diags = parse_formula(text)
    assert diags == []
    return formula


class TestLowering:
    """Derived forms expand into the primitive connectives"""

    def test_equality(self):
        """t1 == t2 is two inequalities joined by a conjunction"""
        prob = F.Prob(Q)
        one = F.TLit(Fraction(1))
        both = F.s_not(F.QImplies(F.Leq(prob, one), F.s_not(F.Leq(one, prob))))
        assert state("P(qb(q)) == 1") == both
        assert state("P(qb(q)) != 1") == F.s_not(both)

    def test_strict_comparison(self):
        """t1 < t2 is the negation of t2 <= t1"""
        assert state("P(qb(q)) < 1") == F.s_not(F.Leq(F.TLit(Fraction(1)), F.Prob(Q)))
        assert state("P(qb(q)) >= 1") == F.Leq(F.TLit(Fraction(1)), F.Prob(Q))

    def test_subtraction(self):
        """t1 - t2 adds -1 * t2"""
        expected = F.Leq(F.TSum(F.Prob(Q), F.TProd(F.TLit(Fraction(-1)), F.TLit(Fraction(1)))),
                         F.TLit(Fraction(0)))
        assert state("P(qb(q)) - 1 <= 0") == expected

    def test_decimal_literals_are_exact(self):
        """Decimal literals become exact fractions"""
        assert state("P(qb(q)) <= 0.4999").right == F.TLit(Fraction(4999, 10000))

    def test_constants(self):
        """true and false are lifted top and bottom"""
        assert state("true") == F.Lifted(F.TOP_CLASSICAL)
        assert state("false") == F.Lifted(F.BOT)

    def test_classical_negation(self):
        """not inside P(...) is implication into bottom"""
        assert state("P(not qb(q)) <= 1").left == F.Prob(F.Implies(Q, F.BOT))

    def test_temporal_duals(self):
        """EF, AG, AX and EG reduce to EX, EU and AF"""
        p = F.State(F.Lifted(F.ClassicalAtom(VarRef("p"))))
        assert temporal("EF p") == F.EU(F.TRUE, p)
        assert temporal("AG p") == F.t_not(F.EU(F.TRUE, F.t_not(p)))
        assert temporal("AX p") == F.t_not(F.EX(F.t_not(p)))
        assert temporal("EG p") == F.t_not(F.AF(F.t_not(p)))

    def test_format(self):
        """Lowered formulae print in primitive notation"""
        assert F.format_formula(state("P(not qb(q)) <= 0.5")) == "(P(not qb(q)) <= 1/2)"

    def test_p_without_parenthesis_is_a_name(self):
        """P is a probability only when followed by '('"""
        as_name = F.format_formula(state("P == 1"))
        assert as_name == F.format_formula(state("x == 1")).replace("x", "P")
        assert "P(qb(q))" in F.format_formula(state("P(qb(q)) == 1"))


class TestProbabilities:
    """Exact probabilities from the stabilizer state"""

    def test_plus_state_exact(self):
        """P(|0>) of |+> is exactly one half"""
        program = load_program(os.path.join(FIXTURES, 'plus.qmc'))
        assert statuses(program) == [T, Fa]

    def test_ghz_correlations(self):
        """GHZ qubits always agree and each is fair"""
        program = load_program(os.path.join(FIXTURES, 'ghz.qmc'))
        assert statuses(program) == [T, T]

    def test_term_variables(self):
        """A real variable compares with a probability"""
        program = with_properties(PREP_PLUS, "P(qb(q)) == r", "P(qb(q)) + r == 1", "P(qb(q)) < r")
        assert statuses(program) == [T, T, Fa]

    def test_support_cap(self):
        """A projection larger than the cap is undefined"""
        program = with_properties(PREP_PLUS, "P(qb(q)) <= 1")
        config = final_state(program)
        verdict = eval_state(program.properties[0].formula, config, 0)
        assert verdict.status is U
        assert "exceeds cap" in verdict.reason

    def test_probability_value(self):
        """eval_term gives the Fraction itself"""
        program = with_properties(PREP_PLUS, "P(qb(q)) <= 1")
        config = final_state(program)
        assert eval_term(program.properties[0].formula.left, config) == Fraction(1, 2)


class TestAmplitudes:
    """Amplitude terms on factor states"""

    def test_plus_amplitude(self):
        """re of |+> is 1/sqrt(2), compared with a tolerance"""
        program = with_properties(PREP_PLUS,
                                  "re[q](not qb(q)) * re[q](not qb(q)) == 0.5",
                                  "re[q](qb(q)) == 0.5",
                                  "im[q](qb(q)) == 0")
        assert statuses(program) == [T, Fa, T]

    def test_entangled_is_undefined(self):
        """An amplitude over half of a Bell pair has no value"""
        program = load_program(os.path.join(FIXTURES, 'undefined.qmc'))
        config = final_state(program)
        verdict = eval_state(program.properties[0].formula, config)
        assert verdict.status is U
        assert "entangled" in verdict.reason

    def test_selector_must_pick_one_valuation(self):
        """A selector matching both valuations is undefined"""
        program = with_properties(PREP_PLUS, "re[q](qb(q) or not qb(q)) <= 1")
        assert statuses(program) == [U]

    def test_undefined_antecedent(self):
        """Implication with an undefined left side is undefined"""
        program = with_properties(PREP_PLUS, "(re[q](qb(q) or not qb(q)) <= 1) imp (P(qb(q)) <= 1)")
        assert statuses(program) == [U]


class TestEntanglement:
    """unentangled(...) at one configuration"""

    def test_bell_pair(self):
        """A Bell pair factors from the (empty) rest but not qubit by qubit"""
        program = load_program(os.path.join(FIXTURES, 'bell.qmc'))
        assert statuses(program, cap=0) == [T, T]

    def test_plus_is_unentangled(self):
        """A single prepared qubit is its own factor"""
        program = with_properties(PREP_PLUS, "unentangled(q)")
        assert statuses(program) == [T]


class TestStateValues:
    """Term values reported with a verdict"""

    def test_probability_value_reported(self):
        """Literals are skipped, computed terms shown"""
        program = load_program(os.path.join(FIXTURES, 'plus.qmc'))
        config = final_state(program)
        assert state_values(program.properties[1].formula, config) == {"P(not qb(q))": "1/2"}

    def test_undefined_value_reported(self):
        """Undefined terms are shown with their reason"""
        program = load_program(os.path.join(FIXTURES, 'undefined.qmc'))
        config = final_state(program)
        values = state_values(program.properties[0].formula, config)
        (text,) = values.values()
        assert text.startswith("undefined (")


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
