"""Exception hierarchy shared by every stage of the checker."""
from typing import List, Optional, Sequence


class StabmcError(Exception):
    """Base class for all errors raised by stabmc."""


class FrontendError(StabmcError):
    """Raised at the service boundary when a model has error diagnostics."""

    def __init__(self, diagnostics: Sequence):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.is_error]
        first = str(errors[0]) if errors else "unknown front-end error"
        super().__init__(f"{len(errors)} error(s); first: {first}")


# ==================== QUANTUM STATE ====================

class SupportTooLarge(StabmcError):
    def __init__(self, k: int, cap: int):
        self.k = k
        self.cap = cap
        super().__init__(f"support of 2^{k} valuations exceeds cap 2^{cap}")


class EntangledSubsystem(StabmcError):
    def __init__(self, qubits: Sequence[int]):
        self.qubits = tuple(qubits)
        super().__init__(f"qubits {list(self.qubits)} are entangled with the rest of the state")


class InvalidQubit(StabmcError):
    def __init__(self, qubit: int, n: int):
        self.qubit = qubit
        super().__init__(f"qubit id {qubit} out of range for a {n}-qubit state")


class NotRandom(StabmcError):
    """collapse() was called on a qubit whose outcome is already determined."""

    def __init__(self, qubit: int):
        self.qubit = qubit
        super().__init__(f"measurement of qubit {qubit} is deterministic; nothing to collapse")


class CnotSameQubit(StabmcError):
    def __init__(self, qubit: int):
        self.qubit = qubit
        super().__init__(f"cnot control and target are the same qubit ({qubit})")


# ==================== EXECUTION ====================

class LimitExceeded(StabmcError):
    """A run limit was hit; `path` is the offending action prefix."""

    limit_name = "limit"

    def __init__(self, limit: int, path: Optional[List] = None):
        self.limit = limit
        self.path = list(path or [])
        super().__init__(f"{self.limit_name} {limit} exceeded after {len(self.path)} steps")


class DepthExceeded(LimitExceeded):
    limit_name = "max_depth"


class NodesExceeded(LimitExceeded):
    limit_name = "max_nodes"


class ReplayError(StabmcError):
    def __init__(self, position: int, message: str):
        self.position = position
        super().__init__(f"trace step {position}: {message}")
