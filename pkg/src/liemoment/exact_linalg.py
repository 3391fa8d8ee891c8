"""Exact and floating rank / kernel computations for small dense matrices."""

from __future__ import annotations

from math import lcm
from typing import List, Sequence, Tuple

import numpy as np

from ._numbers import Q, rational


def _as_rational_rows(rows) -> List[List[Q]]:
    return [[rational(v) for v in row] for row in rows]


def bareiss_rank(rows: Sequence[Sequence[object]]) -> int:
    """Rank by fraction-free (Bareiss) elimination.

    Each row is first scaled to integers by the lcm of its denominators,
    which leaves the rank unchanged; all subsequent divisions are exact.
    """
    mat = []
    for row in _as_rational_rows(rows):
        den = 1
        for v in row:
            den = lcm(den, int(v.denominator))
        mat.append([int(v * den) for v in row])
    if not mat:
        return 0
    n_rows, n_cols = len(mat), len(mat[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if mat[r][col]), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        p = mat[rank][col]
        for r in range(rank + 1, n_rows):
            a = mat[r][col]
            row_r, row_p = mat[r], mat[rank]
            for c in range(col + 1, n_cols):
                row_r[c] = (p * row_r[c] - a * row_p[c]) // prev
            row_r[col] = 0
        prev = p
        rank += 1
        if rank == n_rows:
            break
    return rank


def rref(rows: Sequence[Sequence[object]]) -> Tuple[List[List[Q]], List[int]]:
    """Reduced row echelon form over the rationals; returns (matrix, pivot columns)."""
    m = _as_rational_rows(rows)
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        pr = next((i for i in range(r, n_rows) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots


def _normalise(vec: List[Q]) -> List[Q]:
    lead = next(v for v in vec if v)
    return [v / lead for v in vec]


def nullspace(rows: Sequence[Sequence[object]]) -> List[List[Q]]:
    """Basis of {v : A v = 0}, each vector scaled so its first nonzero entry is 1."""
    m, pivots = rref(rows)
    n_cols = len(rows[0]) if rows else 0
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = [rational(0)] * n_cols
        v[f] = rational(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][f]
        basis.append(_normalise(v))
    return basis


def left_nullspace(rows: Sequence[Sequence[object]]) -> List[List[Q]]:
    """Basis of {g : g^T A = 0}."""
    if not rows:
        return []
    cols = list(zip(*rows))
    return nullspace([list(c) for c in cols])


def inverse(rows: Sequence[Sequence[object]]) -> List[List[Q]]:
    n = len(rows)
    aug = [list(r) + [rational(1 if i == j else 0) for j in range(n)]
           for i, r in enumerate(_as_rational_rows(rows))]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in m]


def svd_rank(matrix, tol: float = 1e-10) -> Tuple[int, np.ndarray, np.ndarray]:
    """Numerical rank with threshold ``tol * largest singular value``.

    Returns (rank, singular values, left-kernel basis as rows).
    """
    a = np.asarray(matrix, dtype=complex)
    if a.size == 0:
        return 0, np.zeros(0), np.zeros((a.shape[0], a.shape[0]))
    u, s, _ = np.linalg.svd(a)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax)) if smax > 0 else 0
    kernel = u[:, rank:].conj().T
    return rank, s, kernel
