"""
State-level evaluation: classical formulae, terms and state formulae at one
configuration.

Term values are exact Fractions whenever they can be; an odd power of 1/sqrt(2)
from an amplitude term or a real-typed variable makes a value a float. A
comparison is exact when both sides are Fractions and uses FLOAT_TOLERANCE
otherwise.
"""
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Union

from stabmc import formula as F
from stabmc import tableau as tb
from stabmc.errors import EntangledSubsystem, SupportTooLarge
from stabmc.executor import Configuration, QubitRef, RuntimeFault, evaluate_expr
from stabmc.settings import FLOAT_TOLERANCE, SUPPORT_CAP
from stabmc.syntax import VarRef

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]


class VerdictStatus(str, Enum):
    TRUE = "true"
    FALSE = "false"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class Verdict:
    status: VerdictStatus
    reason: Optional[str] = None
    # tree node the verdict is explained by (end of witness / counterexample path)
    node: Optional[int] = None

    @property
    def holds(self) -> bool:
        return self.status is VerdictStatus.TRUE

    def at(self, node: int) -> "Verdict":
        return Verdict(self.status, self.reason, node)


TRUE = Verdict(VerdictStatus.TRUE)
FALSE = Verdict(VerdictStatus.FALSE)


def verdict_of(value: bool) -> Verdict:
    return TRUE if value else FALSE


class Undefined(Exception):
    """A term or atom has no value at this configuration."""


# ==================== CLASSICAL ====================

def qubit_id(ref: VarRef, config: Configuration) -> int:
    value = config.value_of(ref)
    if not isinstance(value, QubitRef):
        raise Undefined(f"qubit '{ref}' is unbound")
    return value.id


def eval_classical(alpha: F.Classical, valuation: Dict[int, int], config: Configuration) -> bool:
    """Truth of α for one qubit valuation (qubit id -> bit) and the stores of `config`."""
    if isinstance(alpha, F.Bottom):
        return False
    if isinstance(alpha, F.QubitAtom):
        return valuation[qubit_id(alpha.ref, config)] == 1
    if isinstance(alpha, F.ClassicalAtom):
        try:
            return bool(evaluate_expr(alpha.expr, config))
        except RuntimeFault as e:
            raise Undefined(str(e)) from None
    if isinstance(alpha, F.Implies):
        return (not eval_classical(alpha.left, valuation, config)) or eval_classical(alpha.right, valuation, config)
    raise TypeError(f"not a classical formula: {alpha!r}")


def _qubits_of(alpha: F.Classical, config: Configuration) -> List[int]:
    ids: List[int] = []
    for ref in F.qubit_refs(alpha):
        qid = qubit_id(ref, config)
        if qid not in ids:
            ids.append(qid)
    return sorted(ids)


def _projected(alpha: F.Classical, config: Configuration, cap: int):
    """Distinct valuations of the qubits α mentions, as id -> bit maps."""
    ids = _qubits_of(alpha, config)
    try:
        values = tb.projected_support(config.quantum, ids, cap)
    except SupportTooLarge as e:
        raise Undefined(str(e)) from None
    return [dict(zip(ids, bits)) for bits in values]


def probability_of(alpha: F.Classical, config: Configuration, cap: int = SUPPORT_CAP) -> Fraction:
    valuations = _projected(alpha, config, cap)
    hits = sum(1 for v in valuations if eval_classical(alpha, v, config))
    return Fraction(hits, len(valuations))


# ==================== TERMS ====================

def _combine(left: Number, right: Number, op) -> Number:
    if isinstance(left, Fraction) and isinstance(right, Fraction):
        return op(left, right)
    return op(float(left), float(right))


def eval_term(term: F.Term, config: Configuration, cap: int = SUPPORT_CAP) -> Number:
    if isinstance(term, F.TLit):
        return term.value
    if isinstance(term, F.TVar):
        value = config.value_of(term.ref)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise Undefined(f"'{term.ref}' has no numeric value")
        return Fraction(value) if isinstance(value, int) else float(value)
    if isinstance(term, F.TSum):
        return _combine(eval_term(term.left, config, cap), eval_term(term.right, config, cap), lambda a, b: a + b)
    if isinstance(term, F.TProd):
        return _combine(eval_term(term.left, config, cap), eval_term(term.right, config, cap), lambda a, b: a * b)
    if isinstance(term, F.Prob):
        return probability_of(term.formula, config, cap)
    if isinstance(term, (F.ReAmp, F.ImAmp)):
        amplitude = _amplitude(term, config, cap)
        return amplitude.real if isinstance(term, F.ReAmp) else amplitude.imag
    raise TypeError(f"not a term: {term!r}")


def _amplitude(term, config: Configuration, cap: int) -> tb.ExactAmplitude:
    ids = [qubit_id(ref, config) for ref in term.qubits]
    if len(ids) > cap:
        raise Undefined(f"amplitude over {len(ids)} qubits exceeds support cap {cap}")
    selected = []
    for bits in itertools.product((0, 1), repeat=len(ids)):
        if eval_classical(term.selector, dict(zip(ids, bits)), config):
            selected.append(bits)
    if len(selected) != 1:
        raise Undefined(f"amplitude selector matches {len(selected)} valuations, expected exactly one")
    try:
        return tb.amplitude_term(config.quantum, ids, selected[0], cap)
    except (EntangledSubsystem, SupportTooLarge) as e:
        raise Undefined(str(e)) from None


def leq(left: Number, right: Number) -> bool:
    if isinstance(left, Fraction) and isinstance(right, Fraction):
        return left <= right
    return float(left) <= float(right) + FLOAT_TOLERANCE


# ==================== STATE ====================

def eval_state(gamma: F.StateFormula, config: Configuration, cap: int = SUPPORT_CAP) -> Verdict:
    """Three-valued truth of a state formula at one configuration."""
    try:
        return _eval_state(gamma, config, cap)
    except Undefined as e:
        return Verdict(VerdictStatus.UNDEFINED, str(e))


def _eval_state(gamma, config: Configuration, cap: int) -> Verdict:
    if isinstance(gamma, F.Bottom):
        return FALSE
    if isinstance(gamma, F.Lifted):
        valuations = _projected(gamma.formula, config, cap) if F.qubit_refs(gamma.formula) else [{}]
        return verdict_of(all(eval_classical(gamma.formula, v, config) for v in valuations))
    if isinstance(gamma, F.Leq):
        return verdict_of(leq(eval_term(gamma.left, config, cap), eval_term(gamma.right, config, cap)))
    if isinstance(gamma, F.Unentangled):
        ids = [qubit_id(ref, config) for ref in gamma.qubits]
        return verdict_of(tb.is_unentangled(config.quantum, ids))
    if isinstance(gamma, F.QImplies):
        left = eval_state(gamma.left, config, cap)
        if left.status is VerdictStatus.UNDEFINED:
            return left
        if left.status is VerdictStatus.FALSE:
            return TRUE
        return eval_state(gamma.right, config, cap)
    raise TypeError(f"not a state formula: {gamma!r}")


def state_values(gamma: F.StateFormula, config: Configuration, cap: int = SUPPORT_CAP) -> Dict[str, str]:
    """Values of the terms of γ at `config`, for reports."""
    out: Dict[str, str] = {}
    stack: List = [gamma]
    while stack:
        node = stack.pop()
        if isinstance(node, F.QImplies):
            stack.extend((node.right, node.left))
        elif isinstance(node, F.Leq):
            for term in (node.left, node.right):
                if isinstance(term, F.TLit):
                    continue
                try:
                    out[F.format_formula(term)] = str(eval_term(term, config, cap))
                except Undefined as e:
                    out[F.format_formula(term)] = f"undefined ({e})"
    return out

