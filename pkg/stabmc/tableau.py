"""
Stabilizer-state engine.

An n-qubit stabilizer state is held as a 2n-row binary tableau: rows 0..n-1 are
destabilizers, rows n..2n-1 stabilizers, each row an x-part, a z-part and a sign
bit. A row with x=z=1 on a qubit denotes Y there. Gates update every row in
O(n); measurement is O(n^2). Valuation extraction is the only exponential step
and is bounded by a support cap.

Value semantics: the module-level operations never modify their input tableau.
The Tableau methods ending in `_inplace` (and the gate methods) do, and are used
by the module-level operations on a fresh copy.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from stabmc import gf2
from stabmc.errors import CnotSameQubit, EntangledSubsystem, InvalidQubit, NotRandom, SupportTooLarge
from stabmc.settings import SUPPORT_CAP

logger = logging.getLogger(__name__)

Bits = Tuple[int, ...]


# ==================== RESULT TYPES ====================

@dataclass(frozen=True)
class Deterministic:
    bit: int


@dataclass(frozen=True)
class Random:
    """Both outcomes occur, each with probability 1/2."""


RANDOM = Random()
MeasurementResult = Union[Deterministic, Random]

_RE_SIGN = (1, 0, -1, 0)
_IM_SIGN = (0, 1, 0, -1)


@dataclass(frozen=True)
class ExactAmplitude:
    """i**phase * 2**(-halflog/2), or exactly zero."""
    phase: int = 0
    halflog: int = 0
    zero: bool = False

    @classmethod
    def zero_amplitude(cls) -> "ExactAmplitude":
        return cls(0, 0, True)

    def _component(self, sign: int) -> Union[Fraction, float]:
        if self.zero or sign == 0:
            return Fraction(0)
        if self.halflog % 2 == 0:
            return Fraction(sign, 2 ** (self.halflog // 2))
        return sign * 2.0 ** (-self.halflog / 2)

    @property
    def real(self) -> Union[Fraction, float]:
        return self._component(_RE_SIGN[self.phase % 4])

    @property
    def imag(self) -> Union[Fraction, float]:
        return self._component(_IM_SIGN[self.phase % 4])

    def __complex__(self) -> complex:
        return complex(float(self.real), float(self.imag))

    def __str__(self) -> str:
        if self.zero:
            return "0"
        unit = ("+1", "+i", "-1", "-i")[self.phase % 4]
        return f"{unit}*2^(-{self.halflog}/2)" if self.halflog else unit


@dataclass(frozen=True)
class SupportValuation:
    bits: Bits
    amplitude: ExactAmplitude

    def label(self) -> str:
        return "".join(str(b) for b in self.bits)


# ==================== ROW ARITHMETIC ====================

def _product(x1, z1, r1, x2, z2, r2):
    """Pauli product P1 * P2 with exact sign; P2 may be a stack of rows.

    Both operands are Hermitian Paulis; for commuting operands the result sign is
    exact. Anticommuting products only occur on destabilizer rows, whose signs
    are never read.
    """
    a = x1.astype(np.int64)
    b = z1.astype(np.int64)
    c = x2.astype(np.int64)
    d = z2.astype(np.int64)
    g = (a & b) * (d - c) + (a & (1 - b)) * (d * (2 * c - 1)) + ((1 - a) & b) * (c * (1 - 2 * d))
    total = (2 * np.asarray(r1, dtype=np.int64) + 2 * np.asarray(r2, dtype=np.int64) + g.sum(axis=-1)) % 4
    return x1 ^ x2, z1 ^ z2, ((total // 2) & 1).astype(np.uint8)


def _eliminate(x, z, r, columns: Sequence[Tuple[bool, int]]) -> List[int]:
    """Phase-tracking Gauss-Jordan elimination, in place, over the given columns.

    `columns` lists (is_z, qubit) pairs in pivot order. Pivot rows are moved to the
    top in order. Returns the row index of each pivot found (0..rank-1).
    """
    m = x.shape[0]
    pivot_row = 0
    pivots = []
    for is_z, q in columns:
        if pivot_row == m:
            break
        column = z[:, q] if is_z else x[:, q]
        candidates = np.flatnonzero(column[pivot_row:])
        if candidates.size == 0:
            continue
        found = pivot_row + int(candidates[0])
        if found != pivot_row:
            for arr in (x, z, r):
                arr[[pivot_row, found]] = arr[[found, pivot_row]]
        column = z[:, q] if is_z else x[:, q]
        hits = np.flatnonzero(column)
        hits = hits[hits != pivot_row]
        if hits.size:
            x[hits], z[hits], r[hits] = _product(x[pivot_row], z[pivot_row], r[pivot_row], x[hits], z[hits], r[hits])
        pivots.append(pivot_row)
        pivot_row += 1
    return pivots


def _support_structure(x, z, r):
    """Affine description of the support of the state stabilized by rows (x, z, r).

    Returns (seed, gx, gz, gr): a seed valuation and the k X-type generators whose
    x-parts span the support offsets.
    """
    x, z, r = x.copy(), z.copy(), r.copy()
    n = x.shape[1]
    k = len(_eliminate(x, z, r, [(False, q) for q in range(n)]))
    # Remaining rows are pure Z strings; the seed satisfies z . s = r on each of them
    zx, zz, zr = x[k:].copy(), z[k:].copy(), r[k:].copy()
    seed = np.zeros(n, dtype=np.uint8)
    pivot_cols = []
    row = 0
    for q in range(n):
        if row == zz.shape[0]:
            break
        if np.any(zz[row:, q]):
            _eliminate(zx[row:], zz[row:], zr[row:], [(True, q)])
            hits = np.flatnonzero(zz[:row, q])
            if hits.size:
                zx[hits], zz[hits], zr[hits] = _product(zx[row], zz[row], zr[row], zx[hits], zz[hits], zr[hits])
            pivot_cols.append(q)
            row += 1
    for j, q in enumerate(pivot_cols):
        seed[q] = zr[j]
    return seed, x[:k], z[:k], r[:k]


def _support_from_rows(x, z, r, cap: int) -> List[SupportValuation]:
    n = x.shape[1]
    if n == 0:
        return [SupportValuation((), ExactAmplitude(0, 0))]
    seed, gx, gz, gr = _support_structure(x, z, r)
    k = gx.shape[0]
    if k > cap:
        raise SupportTooLarge(k, cap)

    px = np.zeros((1, n), dtype=np.uint8)
    pz = np.zeros((1, n), dtype=np.uint8)
    pr = np.zeros(1, dtype=np.uint8)
    for i in range(k):
        nx, nz, nr = _product(gx[i], gz[i], gr[i], px, pz, pr)
        px = np.concatenate([px, nx])
        pz = np.concatenate([pz, nz])
        pr = np.concatenate([pr, nr])

    bits = seed ^ px
    # P|s> = (-1)^r * i^{#Y} * (-1)^{z.s} |s xor x|
    z_dot_s = (pz.astype(np.int64) @ seed.astype(np.int64)) % 2
    phases = (2 * pr.astype(np.int64) + (px & pz).sum(axis=1) + 2 * z_dot_s) % 4

    order = np.lexsort(bits.T[::-1])
    bits = bits[order]
    phases = (phases[order] - phases[order][0]) % 4
    return [SupportValuation(tuple(int(b) for b in row), ExactAmplitude(int(p), k)) for row, p in zip(bits, phases)]


# ==================== TABLEAU ====================

class Tableau:
    __slots__ = ("xs", "zs", "rs")

    def __init__(self, xs: np.ndarray, zs: np.ndarray, rs: np.ndarray):
        self.xs = xs
        self.zs = zs
        self.rs = rs

    @classmethod
    def zero_state(cls, n: int) -> "Tableau":
        if n < 0:
            raise ValueError("qubit count must be non-negative")
        xs = np.zeros((2 * n, n), dtype=np.uint8)
        zs = np.zeros((2 * n, n), dtype=np.uint8)
        xs[:n] = np.eye(n, dtype=np.uint8)
        zs[n:] = np.eye(n, dtype=np.uint8)
        return cls(xs, zs, np.zeros(2 * n, dtype=np.uint8))

    @property
    def n(self) -> int:
        return self.xs.shape[1]

    def copy(self) -> "Tableau":
        return Tableau(self.xs.copy(), self.zs.copy(), self.rs.copy())

    def _check(self, *qubits: int) -> None:
        for q in qubits:
            if not 0 <= q < self.n:
                raise InvalidQubit(q, self.n)

    def stabilizer_rows(self):
        n = self.n
        return self.xs[n:].copy(), self.zs[n:].copy(), self.rs[n:].copy()

    # ---- gates (in place) ----

    def hadamard(self, q: int) -> None:
        self._check(q)
        xq, zq = self.xs[:, q].copy(), self.zs[:, q].copy()
        self.rs ^= xq & zq
        self.xs[:, q], self.zs[:, q] = zq, xq

    def phase(self, q: int) -> None:
        self._check(q)
        self.rs ^= self.xs[:, q] & self.zs[:, q]
        self.zs[:, q] ^= self.xs[:, q]

    def pauli_x(self, q: int) -> None:
        self._check(q)
        self.rs ^= self.zs[:, q]

    def cnot(self, control: int, target: int) -> None:
        self._check(control, target)
        if control == target:
            raise CnotSameQubit(control)
        xc, zt = self.xs[:, control], self.zs[:, target]
        self.rs ^= xc & zt & (self.xs[:, target] ^ self.zs[:, control] ^ 1)
        self.xs[:, target] ^= xc
        self.zs[:, control] ^= zt

    # ---- measurement ----

    def measure(self, q: int) -> MeasurementResult:
        self._check(q)
        n = self.n
        if np.any(self.xs[n:, q]):
            return RANDOM
        sx = np.zeros(n, dtype=np.uint8)
        sz = np.zeros(n, dtype=np.uint8)
        sr = np.uint8(0)
        for i in np.flatnonzero(self.xs[:n, q]):
            sx, sz, sr = _product(self.xs[n + i], self.zs[n + i], self.rs[n + i], sx, sz, sr)
        return Deterministic(int(sr))

    def collapse_inplace(self, q: int, outcome: int) -> None:
        self._check(q)
        if outcome not in (0, 1):
            raise ValueError(f"measurement outcome must be 0 or 1, got {outcome!r}")
        n = self.n
        anticommuting = np.flatnonzero(self.xs[n:, q])
        if anticommuting.size == 0:
            raise NotRandom(q)
        p = n + int(anticommuting[0])
        rows = np.flatnonzero(self.xs[:, q])
        rows = rows[(rows != p) & (rows != p - n)]
        if rows.size:
            self.xs[rows], self.zs[rows], self.rs[rows] = _product(
                self.xs[p], self.zs[p], self.rs[p], self.xs[rows], self.zs[rows], self.rs[rows])
        self.xs[p - n], self.zs[p - n], self.rs[p - n] = self.xs[p], self.zs[p], self.rs[p]
        self.xs[p] = 0
        self.zs[p] = 0
        self.zs[p, q] = 1
        self.rs[p] = outcome

    def extended(self) -> "Tableau":
        """A new tableau for this state tensored with |0> on a new last qubit."""
        n = self.n
        xs = np.zeros((2 * n + 2, n + 1), dtype=np.uint8)
        zs = np.zeros((2 * n + 2, n + 1), dtype=np.uint8)
        rs = np.zeros(2 * n + 2, dtype=np.uint8)
        xs[:n, :n], zs[:n, :n], rs[:n] = self.xs[:n], self.zs[:n], self.rs[:n]
        xs[n, n] = 1
        xs[n + 1:2 * n + 1, :n], zs[n + 1:2 * n + 1, :n], rs[n + 1:2 * n + 1] = self.xs[n:], self.zs[n:], self.rs[n:]
        zs[2 * n + 1, n] = 1
        return Tableau(xs, zs, rs)

    # ---- diagnostics ----

    def check_invariants(self) -> List[str]:
        """Names of violated structural invariants (empty when the tableau is sound)."""
        n = self.n
        problems = []
        if self.xs.shape != (2 * n, n) or self.zs.shape != (2 * n, n) or self.rs.shape != (2 * n,):
            return ["shape"]
        if n == 0:
            return problems
        if gf2.rank(np.concatenate([self.xs, self.zs], axis=1)) != 2 * n:
            problems.append("full-rank")
        xs, zs = self.xs.astype(np.int64), self.zs.astype(np.int64)
        sym = (xs @ zs.T + zs @ xs.T) % 2
        if np.any(sym[n:, n:]):
            problems.append("stabilizers-commute")
        if not np.array_equal(sym[:n, n:], np.eye(n, dtype=np.int64)):
            problems.append("destabilizer-pairing")
        return problems

    def dump(self) -> str:
        letters = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
        n = self.n

        def row(i: int) -> str:
            sign = "-" if self.rs[i] else "+"
            return sign + "".join(letters[(int(self.xs[i, q]), int(self.zs[i, q]))] for q in range(n))

        lines = [row(i) for i in range(n)] + ["-" * (n + 1)] + [row(i) for i in range(n, 2 * n)]
        return "\n".join(lines)

    def __repr__(self) -> str:
        return f"Tableau(n={self.n})"


# ==================== VALUE-RETURNING OPERATIONS ====================

_GATE_METHODS = {"had": Tableau.hadamard, "ph": Tableau.phase, "X": Tableau.pauli_x}


def new_tableau(n: int = 0) -> Tableau:
    return Tableau.zero_state(n)


def extend(t: Tableau) -> Tuple[Tableau, int]:
    """Append a fresh |0> qubit; returns the new tableau and the new qubit id."""
    return t.extended(), t.n


def apply_gate(t: Tableau, gate, q: int) -> Tableau:
    """Apply had / ph / X (string or GateKind) to qubit q."""
    name = getattr(gate, "value", gate)
    try:
        method = _GATE_METHODS[name]
    except KeyError:
        raise ValueError(f"unknown single-qubit gate {gate!r}") from None
    out = t.copy()
    method(out, q)
    return out


def apply_cnot(t: Tableau, control: int, target: int) -> Tableau:
    out = t.copy()
    out.cnot(control, target)
    return out


def measure(t: Tableau, q: int) -> MeasurementResult:
    return t.measure(q)


def collapse(t: Tableau, q: int, outcome: int) -> Tableau:
    out = t.copy()
    out.collapse_inplace(q, outcome)
    return out


def support_valuations(t: Tableau, cap: int = SUPPORT_CAP) -> List[SupportValuation]:
    """Basis states with nonzero amplitude, sorted, phase-normalized on the first."""
    x, z, r = t.stabilizer_rows()
    return _support_from_rows(x, z, r, cap)


def projected_support(t: Tableau, qubits: Sequence[int], cap: int = SUPPORT_CAP) -> List[Bits]:
    """Distinct restrictions of the support to `qubits`, each of equal weight."""
    t._check(*qubits)
    if not qubits:
        return [()]
    x, z, r = t.stabilizer_rows()
    seed, gx, _, _ = _support_structure(x, z, r)
    cols = list(qubits)
    reduced, pivots = gf2.row_echelon(gx[:, cols]) if gx.shape[0] else (gx[:, cols], [])
    if len(pivots) > cap:
        raise SupportTooLarge(len(pivots), cap)
    vectors = gf2.span(reduced[:len(pivots)]) ^ seed[cols]
    return sorted({tuple(int(b) for b in v) for v in vectors})


def probability(t: Tableau, pred: Callable[[Bits], bool], cap: int = SUPPORT_CAP,
                qubits: Optional[Sequence[int]] = None) -> Fraction:
    """Exact probability that a computational-basis measurement satisfies `pred`.

    `pred` receives a length-n bit tuple. When `qubits` is given, the predicate must
    depend on those qubits only; the other positions are passed as 0 and the
    support is projected first, so the cap applies to the projected dimension.
    """
    if qubits is None:
        qubits = range(t.n)
    qubits = list(qubits)
    values = projected_support(t, qubits, cap)
    hits = 0
    for projected in values:
        full = [0] * t.n
        for q, b in zip(qubits, projected):
            full[q] = b
        if pred(tuple(full)):
            hits += 1
    return Fraction(hits, len(values))


def is_unentangled(t: Tableau, qubits: Iterable[int]) -> bool:
    """True iff the state factors across `qubits` and the rest (rank method)."""
    cols = sorted(set(qubits))
    t._check(*cols)
    n = t.n
    if not cols or len(cols) == n:
        return True
    restricted = np.concatenate([t.xs[n:, cols], t.zs[n:, cols]], axis=1)
    return gf2.rank(restricted) == len(cols)


def amplitude_term(t: Tableau, qubits: Sequence[int], valuation: Sequence[int],
                   cap: int = SUPPORT_CAP) -> ExactAmplitude:
    """Amplitude of `valuation` (ordered like `qubits`) in the factor state on `qubits`."""
    qubits = list(qubits)
    t._check(*qubits)
    if len(valuation) != len(qubits):
        raise ValueError("valuation length must match the qubit list")
    if len(set(qubits)) != len(qubits):
        raise ValueError("qubit list has duplicates")
    if not is_unentangled(t, qubits):
        raise EntangledSubsystem(qubits)
    x, z, r = t.stabilizer_rows()
    rest = [q for q in range(t.n) if q not in set(qubits)]
    m = len(_eliminate(x, z, r, [(False, q) for q in rest] + [(True, q) for q in rest]))
    factor = _support_from_rows(x[m:][:, qubits], z[m:][:, qubits], r[m:], cap)
    wanted = tuple(int(b) for b in valuation)
    for entry in factor:
        if entry.bits == wanted:
            return entry.amplitude
    return ExactAmplitude.zero_amplitude()
