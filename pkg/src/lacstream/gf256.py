"""GF(2^8) arithmetic and an incremental Gaussian-elimination engine.

Field elements are plain ints in [0, 255], reduced by the polynomial
x^8 + x^4 + x^3 + x + 1 (0x11B).  Addition is XOR.  Scalar multiply and
inverse go through exp/log tables; matrix helpers are vectorized with
numpy uint8 arrays.

LinearSystem keeps a set of equations over packet-variable ids in reduced
row-echelon form, one insertion at a time, and reports variables the
moment their row collapses to a singleton pivot.  Coefficient vectors and
the optional payload accumulators are sparse dicts, which keeps per-slot
decoding cheap when only a handful of packets are outstanding.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

POLY = 0x11B
_GEN = 0x03  # multiplicative generator for 0x11B (0x02 is not primitive here)


def _mul_noluts(a: int, b: int) -> int:
    # carry-less peasant multiplication, used only to seed the tables
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & 0x100:
            a ^= POLY
    return r


def _build_tables():
    exp = np.zeros(512, dtype=np.int32)
    log = np.full(256, -512, dtype=np.int32)  # sentinel keeps exp index negative
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x = _mul_noluts(x, _GEN)
    exp[255:510] = exp[:255]
    return exp, log


EXP, LOG = _build_tables()

# flat 256x256 product table; scalar hot path avoids numpy indexing overhead
_MUL = [[0] * 256 for _ in range(256)]
for _a in range(1, 256):
    for _b in range(1, 256):
        _MUL[_a][_b] = int(EXP[LOG[_a] + LOG[_b]])
_INV = [0] * 256
for _a in range(1, 256):
    _INV[_a] = int(EXP[255 - LOG[_a]])


def ff_add(a: int, b: int) -> int:
    return a ^ b


def ff_mul(a: int, b: int) -> int:
    return _MUL[a][b]


def ff_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("0 has no multiplicative inverse in GF(256)")
    return _INV[a]


# ---- vectorized helpers over uint8 arrays ----

def gf_mul_arr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    out = EXP[LOG[a.astype(np.intp)] + LOG[b.astype(np.intp)]]
    return np.where(out < 0, 0, out).astype(np.uint8)


def gf_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """(m x p) @ (p x n) over GF(256), accumulated row by row."""
    A = np.asarray(A, dtype=np.uint8)
    B = np.asarray(B, dtype=np.uint8)
    m, p = A.shape
    p2, n = B.shape
    if p != p2:
        raise ValueError(f"shape mismatch {A.shape} @ {B.shape}")
    C = np.zeros((m, n), dtype=np.uint8)
    for t in range(p):
        C ^= gf_mul_arr(A[:, t : t + 1], B[t : t + 1, :])
    return C


def _row_reduce(A: np.ndarray):
    """Gauss-Jordan over GF(256); returns (reduced matrix, pivot columns)."""
    A = np.asarray(A, dtype=np.uint8).copy()
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        hit = next((i for i in range(r, rows) if A[i, c]), None)
        if hit is None:
            continue
        if hit != r:
            A[[r, hit]] = A[[hit, r]]
        A[r] = gf_mul_arr(A[r], np.uint8(ff_inv(int(A[r, c]))))
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] ^= gf_mul_arr(np.uint8(A[i, c]), A[r])
        pivots.append(c)
        r += 1
    return A, pivots


def gf_rank(A: np.ndarray) -> int:
    A = np.asarray(A, dtype=np.uint8)
    if A.size == 0:
        return 0
    _, pivots = _row_reduce(A)
    return len(pivots)


def gf_mat_inv(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.uint8)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    if n == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    aug = np.concatenate([A, np.eye(n, dtype=np.uint8)], axis=1)
    red, pivots = _row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("singular matrix over GF(256)")
    return red[:, n:]


# ---- incremental elimination over sparse equations ----

@dataclass
class InsertOutcome:
    innovative: bool
    determined: list = field(default_factory=list)  # [(var_id, payload_dict|None)]


class _Row:
    __slots__ = ("coeffs", "payload")

    def __init__(self, coeffs: dict, payload: dict | None):
        self.coeffs = coeffs
        self.payload = payload


def _scaled_xor(dst: dict, src: dict, factor: int) -> None:
    mul = _MUL[factor]
    for k, v in src.items():
        x = dst.get(k, 0) ^ mul[v]
        if x:
            dst[k] = x
        else:
            dst.pop(k, None)


class LinearSystem:
    """Equations over packet-variable ids, kept in reduced row-echelon form.

    Dependent rows are discarded on insertion, so the pivot count (rank)
    never exceeds the variable count.
    """

    def __init__(self, variables: Sequence[int] = (), track_payloads: bool = True):
        self._vars: list[int] = []
        self._var_set: set[int] = set()
        self._rows: dict[int, _Row] = {}  # pivot var -> row
        self._col_index: dict[int, set[int]] = {}  # var -> pivots of rows touching it
        self.track_payloads = track_payloads
        for v in variables:
            self.add_variable(v)

    @property
    def variables(self) -> tuple:
        return tuple(self._vars)

    @property
    def rank(self) -> int:
        return len(self._rows)

    def add_variable(self, var_id: int) -> None:
        if var_id in self._var_set:
            raise ValueError(f"variable {var_id} already present")
        self._vars.append(var_id)
        self._var_set.add(var_id)

    def _as_coeff_dict(self, coeffs) -> dict:
        if isinstance(coeffs, Mapping):
            bad = [v for v in coeffs if v not in self._var_set]
            if bad:
                raise ValueError(f"unknown variable ids {bad}")
            return {v: c & 0xFF for v, c in coeffs.items() if c & 0xFF}
        coeffs = list(coeffs)
        if len(coeffs) != len(self._vars):
            raise ValueError(
                f"coefficient vector length {len(coeffs)} != variable count {len(self._vars)}"
            )
        return {v: c & 0xFF for v, c in zip(self._vars, coeffs) if c & 0xFF}

    def _as_payload_dict(self, payload) -> dict | None:
        if not self.track_payloads or payload is None:
            return None
        if isinstance(payload, Mapping):
            return {k: v & 0xFF for k, v in payload.items() if v & 0xFF}
        return {i: v & 0xFF for i, v in enumerate(payload) if v & 0xFF}

    def _index_row(self, pivot: int) -> None:
        for v in self._rows[pivot].coeffs:
            self._col_index.setdefault(v, set()).add(pivot)

    def _unindex_row(self, pivot: int, row: _Row) -> None:
        for v in row.coeffs:
            refs = self._col_index.get(v)
            if refs is not None:
                refs.discard(pivot)
                if not refs:
                    del self._col_index[v]

    def insert(self, coeffs, payload=None) -> InsertOutcome:
        eq = self._as_coeff_dict(coeffs)
        pay = self._as_payload_dict(payload)

        # forward-reduce against existing pivot rows
        while True:
            hit = next((v for v in eq if v in self._rows), None)
            if hit is None:
                break
            row = self._rows[hit]
            factor = eq[hit]
            _scaled_xor(eq, row.coeffs, factor)
            if pay is not None and row.payload is not None:
                _scaled_xor(pay, row.payload, factor)

        if not eq:
            if pay:
                raise ValueError("inconsistent equation: zero combination, nonzero payload")
            return InsertOutcome(innovative=False)

        pivot = min(eq)
        inv = _INV[eq[pivot]]
        if inv != 1:
            mul = _MUL[inv]
            eq = {v: mul[c] for v, c in eq.items()}
            if pay is not None:
                pay = {k: mul[c] for k, c in pay.items()}

        new_row = _Row(eq, pay)
        determined: list = []

        # back-eliminate the new pivot from rows that reference it
        for other in list(self._col_index.get(pivot, ())):
            row = self._rows[other]
            was_single = len(row.coeffs) == 1
            self._unindex_row(other, row)
            factor = row.coeffs[pivot]
            _scaled_xor(row.coeffs, eq, factor)
            if row.payload is not None and pay is not None:
                _scaled_xor(row.payload, pay, factor)
            self._index_row(other)
            if not was_single and len(row.coeffs) == 1:
                determined.append((other, row.payload))

        self._rows[pivot] = new_row
        self._index_row(pivot)
        if len(eq) == 1:
            determined.append((pivot, pay))
        return InsertOutcome(innovative=True, determined=determined)

    def is_determined(self, var_id: int) -> bool:
        row = self._rows.get(var_id)
        return row is not None and len(row.coeffs) == 1

    def solution(self, var_id: int) -> dict | None:
        if not self.is_determined(var_id):
            return None
        return dict(self._rows[var_id].payload or {})

    def remove_variable(self, var_id: int) -> None:
        """Drop a determined variable; its pivot column is zero elsewhere."""
        if not self.is_determined(var_id):
            raise ValueError(f"variable {var_id} is not determined")
        row = self._rows.pop(var_id)
        self._unindex_row(var_id, row)
        self._vars.remove(var_id)
        self._var_set.remove(var_id)


def rank(sys: LinearSystem) -> int:
    return sys.rank
