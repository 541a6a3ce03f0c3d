"""
Unit tests for static checking
Run with: python -m pytest stabmc/tests/test_typecheck.py -v
"""
import pytest
import sys
import os

# Add project root to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..'))

from stabmc import formula as F
from stabmc.errors import FrontendError
from stabmc.frontend import compile_source, load_program
from stabmc.lexer import tokenize
from stabmc.parser import parse_program
from stabmc.syntax import BOOL, QUBIT
from stabmc.typecheck import typecheck

MODELS = os.path.join(os.path.dirname(__file__), '..', '..', 'models')


def read(path):
    with open(path, encoding='utf-8') as f:
        return f.read()


def errors_of(source):
    program, diags = compile_source(source)
    return program, [d.message for d in diags if d.is_error]


def model(body, decls="", shared="", props=""):
    shared_part = f"var {shared}" if shared else ""
    local_part = f"var {decls}" if decls else ""
    return f"program T; {shared_part}\nprocess Alpha; {local_part} begin\n{body}\nend;\nendprogram.\n{props}"


class TestStatements:
    """Typing rules for statements"""

    def test_well_typed(self):
        """A small well-typed program has no diagnostics"""
        program, errors = errors_of(model("q := newqubit; had q; r := meas q; n := n + 1;",
                                          "q: qubit; r: bool; n: integer;"))
        assert errors == []
        assert program is not None

    def test_gate_on_bool(self):
        """Gates need qubits"""
        _, errors = errors_of(model("had b;", "b: bool;"))
        assert errors == ["had expects qubit, got bool"]

    def test_cnot_on_integer(self):
        """cnot needs two qubits"""
        _, errors = errors_of(model("cnot q, n;", "q: qubit; n: integer;"))
        assert errors == ["cnot expects qubit, got integer"]

    def test_meas_target(self):
        """Measurement results are stored in bools"""
        _, errors = errors_of(model("q := newqubit; n := meas q;", "q: qubit; n: integer;"))
        assert errors == ["meas result must be stored in a bool variable, got integer"]

    def test_guard_must_be_bool(self):
        """Guards are boolean"""
        _, errors = errors_of(model("if :: n -> skip; fi", "n: integer;"))
        assert errors == ["guard must be bool, got integer"]

    def test_assign_mismatch(self):
        """Assignments respect types; integers widen to real"""
        _, errors = errors_of(model("b := 1; r := 2;", "b: bool; r: real;"))
        assert errors == ["cannot assign integer to bool variable 'b'"]

    def test_qubit_assignment(self):
        """Qubit variables are only set by newqubit, meas or receive"""
        _, errors = errors_of(model("q := p;", "q, p: qubit;"))
        assert "qubit 'q' can only be set by newqubit, meas or a receive" in errors

    def test_unknown_identifier(self):
        """Undeclared names are errors"""
        _, errors = errors_of(model("x := true;", ""))
        assert errors == ["unknown identifier 'x'"]

    def test_other_process_variable(self):
        """A process cannot read another process's store"""
        source = ("program T; process Alpha; var x: bool; begin x := true; end;\n"
                  "process Beta; var y: bool; begin y := Alpha.x; end;\nendprogram.")
        _, errors = errors_of(source)
        assert errors == ["process Beta cannot read variables of Alpha"]

    def test_channel_payload(self):
        """A bool channel carries bools"""
        _, errors = errors_of(model("c!n;", "n: integer;", shared="c: channel of bool;"))
        assert errors == ["channel 'c' carries bool, got integer"]

    def test_qubit_channel_needs_variable(self):
        """Qubit channels send plain qubit variables"""
        _, errors = errors_of(model("c!true;", "", shared="c: channel of qubit;"))
        assert errors == ["a qubit channel sends a plain qubit variable"]

    def test_send_on_non_channel(self):
        """Only channels can be used with ! and ?"""
        _, errors = errors_of(model("b!b;", "b: bool;"))
        assert errors == ["'b' is not a channel (it is bool)"]

    def test_shadowing_warning(self):
        """A local that shadows a shared variable is a warning"""
        program, diags = compile_source(model("skip;", "x: bool;", shared="x: bool;"))
        assert program is not None
        assert [d.message for d in diags] == ["local 'x' of Alpha shadows a shared variable"]

    def test_input_not_mutated(self):
        """typecheck annotates a copy and leaves the parsed program alone"""
        source = read(os.path.join(MODELS, 'coinflip.qmc'))
        tokens, _ = tokenize(source)
        parsed, _ = parse_program(tokens, source)
        typed, _ = typecheck(parsed)
        original = parsed.properties[0].formula.formula.expr.left
        annotated = typed.properties[0].formula.formula.expr.left
        assert original.scope is None
        assert (annotated.scope, annotated.type) == ("Alice", BOOL)


class TestNesting:
    """Deeply nested input is rejected, not crashed on"""

    def test_deep_parentheses(self):
        """Thousands of nested parentheses give an error diagnostic"""
        expr = "(" * 3000 + "1" + ")" * 3000
        program, errors = errors_of(model(f"n := {expr};", "n: integer;"))
        assert program is None
        assert errors == ["expression nested too deeply"]

    def test_long_conjunction(self):
        """A property chaining thousands of conjunctions is reported on the property"""
        chain = " and ".join(["x == true"] * 3000)
        program, errors = errors_of(model("skip;", "x: bool;", props=f"property ({chain});\n"))
        assert program is None
        assert errors == ["formula nested too deeply"]

    def test_moderate_nesting_accepted(self):
        """Ordinary nesting depths still compile"""
        expr = "(" * 20 + "1" + ")" * 20
        program, errors = errors_of(model(f"n := {expr};", "n: integer;"))
        assert errors == []
        assert program is not None


class TestProperties:
    """Name resolution and typing inside properties"""

    def test_ambiguous_name_warning(self):
        """A name declared by several processes resolves to the first, with a warning"""
        program, diags = compile_source(read(os.path.join(MODELS, 'coinflip.qmc')))
        assert program is not None
        warnings = [d.message for d in diags if not d.is_error]
        assert "'b' is declared by Alice, Bob; using Alice.b" in warnings
        assert "'x' is declared by Alice, Bob; using Alice.x" in warnings

    def test_qb_needs_qubit(self):
        """qb(...) takes a qubit variable"""
        _, errors = errors_of(model("skip;", "b: bool;", props="finalstateproperty (P(qb(b)) <= 1);"))
        assert errors == ["'b' is bool, expected a qubit"]

    def test_amplitude_selector_scope(self):
        """The selector of an amplitude may only mention the listed qubits"""
        _, errors = errors_of(model("q := newqubit; p := newqubit;", "q, p: qubit;",
                                    props="finalstateproperty (re[q](qb(p)) <= 1);"))
        assert errors == ["qb(p) is not among the amplitude's qubits"]

    def test_duplicate_qubit_in_amplitude(self):
        """A qubit may appear once in an amplitude list"""
        _, errors = errors_of(model("q := newqubit;", "q: qubit;",
                                    props="finalstateproperty (re[q, q](qb(q)) <= 1);"))
        assert errors == ["a qubit is listed twice"]

    def test_term_variable_numeric(self):
        """Term variables are integer or real"""
        _, errors = errors_of(model("q := newqubit;", "q: qubit; b: bool;",
                                    props="finalstateproperty (P(qb(q)) <= b);"))
        assert errors == ["term variable 'b' must be integer or real, got bool"]

    def test_unknown_process(self):
        """Qualified names need an existing process"""
        _, errors = errors_of(model("skip;", "b: bool;", props="finalstateproperty (Z.b);"))
        assert errors == ["unknown process 'Z'"]

    def test_qubit_resolution(self):
        """Qubit references in properties get their scope"""
        program, errors = errors_of(model("q := newqubit;", "q: qubit;",
                                          props="finalstateproperty (unentangled(q));"))
        assert errors == []
        (ref,) = program.properties[0].formula.qubits
        assert (ref.scope, ref.type) == ("Alpha", QUBIT)
        assert isinstance(program.properties[0].formula, F.Unentangled)


class TestLoadProgram:
    """Service-boundary loader"""

    def test_raises_on_errors(self):
        """Error diagnostics become a FrontendError"""
        with pytest.raises(FrontendError) as info:
            load_program(model("had b;", "b: bool;"))
        assert "had expects qubit" in str(info.value)

    def test_accepts_path(self):
        """A path to a model file is read from disk"""
        program = load_program(os.path.join(MODELS, 'coinflip.qmc'))
        assert program.name == "QuantumCoinFlipping"


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
