"""
Dense GF(2) linear algebra on numpy uint8 matrices.

Row-echelon form and rank with XOR row operations. The tableau module has its own
phase-tracking elimination; these helpers are for phase-free questions (rank,
span of support vectors).
"""
from typing import List, Tuple

import numpy as np


def row_echelon(matrix) -> Tuple[np.ndarray, List[int]]:
    """Reduced row-echelon form over GF(2).

    Args:
        matrix: binary matrix (m x n).

    Returns:
        (R, pivot_cols) with len(pivot_cols) equal to the rank.
    """
    R = (np.asarray(matrix, dtype=np.uint8) & 1).copy()
    if R.ndim != 2:
        raise ValueError("row_echelon expects a 2-D matrix")
    m, n = R.shape
    pivot_cols: List[int] = []
    pivot_row = 0
    for col in range(n):
        if pivot_row == m:
            break
        candidates = np.flatnonzero(R[pivot_row:, col])
        if candidates.size == 0:
            continue
        found = pivot_row + int(candidates[0])
        if found != pivot_row:
            R[[pivot_row, found]] = R[[found, pivot_row]]
        hits = np.flatnonzero(R[:, col])
        hits = hits[hits != pivot_row]
        if hits.size:
            R[hits] ^= R[pivot_row]
        pivot_cols.append(col)
        pivot_row += 1
    return R, pivot_cols


def rank(matrix) -> int:
    """GF(2) rank of a binary matrix."""
    M = np.asarray(matrix, dtype=np.uint8)
    if M.size == 0:
        return 0
    _, pivots = row_echelon(M)
    return len(pivots)


def span(basis) -> np.ndarray:
    """All 2^r vectors in the GF(2) span of independent rows of `basis`."""
    B = np.asarray(basis, dtype=np.uint8)
    if B.ndim != 2:
        raise ValueError("span expects a 2-D matrix")
    vectors = np.zeros((1, B.shape[1]), dtype=np.uint8)
    for row in B:
        vectors = np.concatenate([vectors, vectors ^ row], axis=0)
    return vectors
