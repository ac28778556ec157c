"""Dense row reduction over F_p and small F_q (integer-encoded elements).

Matrices are numpy int64 arrays.  Prime fields use modular arithmetic; for
F_q the elements are encoded by their base-p digit index and arithmetic goes
through precomputed addition/multiplication tables.
"""

from __future__ import annotations

import numpy as np


class FieldOps:
    """Elementwise arithmetic on encoded field elements."""

    order: int

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a: int) -> int:
        raise NotImplementedError


class PrimeFieldOps(FieldOps):
    def __init__(self, p: int):
        self.order = p
        self.p = p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a: int) -> int:
        return pow(int(a), -1, self.p)


class TableFieldOps(FieldOps):
    def __init__(self, q: int, add: np.ndarray, mul: np.ndarray, neg: np.ndarray, inv: np.ndarray):
        self.order = q
        self._add, self._mul, self._neg, self._inv = add, mul, neg, inv

    def add(self, a, b):
        return self._add[a, b]

    def sub(self, a, b):
        return self._add[a, self._neg[b]]

    def mul(self, a, b):
        return self._mul[a, b]

    def neg(self, a):
        return self._neg[a]

    def inv(self, a: int) -> int:
        return int(self._inv[a])


def rref(M: np.ndarray, ops: FieldOps) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    R = np.array(M, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise ValueError("expected a matrix")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        inv = ops.inv(R[r, c])
        if inv != 1:
            R[r] = ops.mul(R[r], inv)
        col = R[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            R[hit] = ops.sub(R[hit], ops.mul(col[hit][:, None], R[r][None, :]))
        pivots.append(c)
        r += 1
    return R, pivots


def rank(M: np.ndarray, ops: FieldOps) -> int:
    """Rank via forward elimination only."""
    R = np.array(M, dtype=np.int64, copy=True)
    if R.size == 0:
        return 0
    rows, cols = R.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        inv = ops.inv(R[r, c])
        if inv != 1:
            R[r] = ops.mul(R[r], inv)
        below = R[r + 1:, c]
        hit = np.nonzero(below)[0]
        if hit.size:
            idx = hit + r + 1
            R[idx] = ops.sub(R[idx], ops.mul(below[hit][:, None], R[r][None, :]))
        r += 1
    return r


def nullspace(M: np.ndarray, ops: FieldOps) -> np.ndarray:
    """Basis of {v : M v = 0} as rows."""
    M = np.asarray(M, dtype=np.int64)
    rows, cols = M.shape
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    R, pivots = rref(M, ops)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for r, pc in enumerate(pivots):
            if R[r, fc]:
                basis[k, pc] = ops.sub(0, R[r, fc])
    return basis


def solve(M: np.ndarray, b: np.ndarray, ops: FieldOps) -> np.ndarray | None:
    """One solution of M x = b, or None when inconsistent."""
    M = np.asarray(M, dtype=np.int64)
    rows, cols = M.shape
    aug = np.concatenate([M, np.asarray(b, dtype=np.int64).reshape(rows, 1)], axis=1)
    R, pivots = rref(aug, ops)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for r, pc in enumerate(pivots):
        x[pc] = R[r, cols]
    return x


def matmul(A: np.ndarray, B: np.ndarray, ops: FieldOps) -> np.ndarray:
    """Matrix product over the field."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if isinstance(ops, PrimeFieldOps):
        return (A @ B) % ops.p
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for k in range(A.shape[1]):
        out = ops.add(out, ops.mul(A[:, k][:, None], B[k][None, :]))
    return out
