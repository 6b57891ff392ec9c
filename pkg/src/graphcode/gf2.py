"""Linear algebra over GF(2).

Vectors and matrices are numpy ``uint8`` arrays holding 0/1.  Received words
may additionally hold :data:`ERASED`.  Elimination packs each equation into a
Python int so that row operations are single XORs.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

ERASED = 2


class DimensionError(ValueError):
    pass


class Outcome(enum.Enum):
    UNIQUE = "unique"
    AMBIGUOUS = "ambiguous"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class Solution:
    outcome: Outcome
    x: np.ndarray | None = None

    @property
    def unique(self) -> bool:
        return self.outcome is Outcome.UNIQUE


def as_bits(a, ndim: int | None = None) -> np.ndarray:
    arr = np.asarray(a, dtype=np.uint8)
    if ndim is not None and arr.ndim != ndim:
        raise DimensionError(f"expected {ndim}-d bit array, got shape {arr.shape}")
    return arr


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.uint8)


def mat_vec_mul(m, x) -> np.ndarray:
    """Row-vector product ``x @ m`` reduced mod 2."""
    m = as_bits(m, 2)
    x = as_bits(x, 1)
    if x.shape[0] != m.shape[0]:
        raise DimensionError(f"vector length {x.shape[0]} != matrix rows {m.shape[0]}")
    rows = m[x.astype(bool)]
    if rows.shape[0] == 0:
        return np.zeros(m.shape[1], dtype=np.uint8)
    return np.bitwise_xor.reduce(rows, axis=0)


encode = mat_vec_mul


def _pack_rows(m: np.ndarray) -> list[int]:
    if m.shape[1] == 0:
        return [0] * m.shape[0]
    packed = np.packbits(m, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def rank(m) -> int:
    m = as_bits(m, 2)
    basis: dict[int, int] = {}
    for v in _pack_rows(m):
        while v:
            top = v.bit_length() - 1
            pivot = basis.get(top)
            if pivot is None:
                basis[top] = v
                break
            v ^= pivot
    return len(basis)


def _eliminate(equations: list[int], nvars: int):
    """Insert ``coeffs << 1 | rhs`` equations into a triangular basis.

    Returns the basis keyed by pivot bit, or None on a contradiction.
    """
    basis: dict[int, int] = {}
    for v in equations:
        while v > 1:
            top = v.bit_length() - 1
            pivot = basis.get(top)
            if pivot is None:
                basis[top] = v
                break
            v ^= pivot
        if v == 1:
            return None
        if len(basis) == nvars:
            break
    return basis


def solve_with_erasures(g, observed) -> Solution:
    """Solve ``x @ g == observed`` on the non-erased positions.

    Columns of weight one are peeled first (they pin a variable directly),
    the remaining columns are reduced by the pinned values and then handed to
    Gaussian elimination over the still unknown variables.
    """
    g = as_bits(g, 2)
    observed = np.asarray(observed)
    if observed.ndim != 1 or observed.shape[0] != g.shape[1]:
        raise DimensionError(f"observed length {observed.shape} does not match {g.shape[1]} columns")
    k = g.shape[0]
    keep = observed != ERASED
    cols = g[:, keep]
    rhs = observed[keep].astype(np.uint8)

    weight = cols.sum(axis=0)
    x = np.zeros(k, dtype=np.uint8)
    known = np.zeros(k, dtype=bool)
    single = np.flatnonzero(weight == 1)
    if single.size:
        var = cols[:, single].argmax(axis=0)
        vals = rhs[single]
        x[var] = vals
        known[var] = True
        if np.any(x[var] != vals):
            return Solution(Outcome.INCONSISTENT)

    rest = np.flatnonzero(weight != 1)
    rest_cols = cols[:, rest]
    rest_rhs = rhs[rest]
    if known.any():
        shift = mat_vec_mul(rest_cols[known], x[known])
        rest_rhs = rest_rhs ^ shift
    unknown = np.flatnonzero(~known)
    sub = rest_cols[unknown]  # (len(unknown), m)

    if unknown.size == 0:
        return _verified(cols, rhs, x)

    # one packed equation per surviving column: unknown coefficients above bit 0
    eq_cols = _pack_rows(np.ascontiguousarray(sub.T))
    equations = [(c << 1) | int(b) for c, b in zip(eq_cols, rest_rhs)]
    basis = _eliminate(equations, unknown.size)
    if basis is None:
        return Solution(Outcome.INCONSISTENT)
    if len(basis) < unknown.size:
        return Solution(Outcome.AMBIGUOUS)

    x[unknown] = _back_substitute(basis, unknown.size)
    return _verified(cols, rhs, x)


def _back_substitute(basis: dict[int, int], nvars: int) -> np.ndarray:
    # lowest pivot first; bit 0 of each row is its right-hand side
    sol = 0
    for top in sorted(basis):
        row = basis[top]
        below = row & ((1 << top) - 1) & ~1
        if (row & 1) ^ ((below & sol).bit_count() & 1):
            sol |= 1 << top
    return np.array([(sol >> (i + 1)) & 1 for i in range(nvars)], dtype=np.uint8)


def sparse_parity(k: int, src: np.ndarray, dst: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Parity part ``x @ A`` of a code whose ``A`` is given as (row, column) index pairs."""
    hits = dst[x[src].astype(bool)]
    return (np.bincount(hits, minlength=k) & 1).astype(np.uint8)


def solve_systematic_sparse(k: int, src, dst, observed) -> Solution:
    """Erasure solve for a generator ``[I | A]`` with ``A`` given sparsely.

    ``A[src[e], dst[e]] = 1`` for each listed pair (pairs must be distinct).
    Surviving systematic positions pin their variables outright, so only the
    erased message bits enter elimination, each equation being a surviving
    parity column restricted to them.  Outcomes agree with
    :func:`solve_with_erasures` on the dense generator.
    """
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    observed = np.asarray(observed)
    if observed.ndim != 1 or observed.shape[0] != 2 * k:
        raise DimensionError(f"observed length {observed.shape} does not match {2 * k} columns")
    own, par = observed[:k], observed[k:]
    known = own != ERASED
    x = np.where(known, own, 0).astype(np.uint8)
    alive = par != ERASED
    unknown = np.flatnonzero(~known)
    if unknown.size:
        local = np.full(k, -1, dtype=np.int64)
        local[unknown] = np.arange(unknown.size)
        rhs = par.astype(np.uint8) ^ sparse_parity(k, src, dst, x)
        sel = (local[src] >= 0) & alive[dst]
        cols = np.unique(dst[sel])
        touched = np.zeros(k, dtype=bool)
        touched[cols] = True
        if np.any(rhs[alive & ~touched]):
            return Solution(Outcome.INCONSISTENT)
        if cols.size == 0:
            return Solution(Outcome.AMBIGUOUS)
        col_index = np.searchsorted(cols, dst[sel])
        coeff = np.zeros((cols.size, unknown.size), dtype=np.uint8)
        coeff[col_index, local[src[sel]]] = 1
        equations = [(c << 1) | int(b) for c, b in zip(_pack_rows(coeff), rhs[cols])]
        basis = _eliminate(equations, unknown.size)
        if basis is None:
            return Solution(Outcome.INCONSISTENT)
        if len(basis) < unknown.size:
            return Solution(Outcome.AMBIGUOUS)
        x[unknown] = _back_substitute(basis, unknown.size)
    if np.any(sparse_parity(k, src, dst, x)[alive] != par[alive]):
        return Solution(Outcome.INCONSISTENT)
    return Solution(Outcome.UNIQUE, x)


def _verified(cols: np.ndarray, rhs: np.ndarray, x: np.ndarray) -> Solution:
    # elimination stops at full rank, so leftover equations are checked here
    if np.any(mat_vec_mul(cols, x) != rhs):
        return Solution(Outcome.INCONSISTENT)
    return Solution(Outcome.UNIQUE, x)


def enumerate_solutions(g, observed) -> list[np.ndarray]:
    """All messages consistent with ``observed`` (exhaustive, small K only)."""
    g = as_bits(g, 2)
    observed = np.asarray(observed)
    k = g.shape[0]
    keep = observed != ERASED
    msgs = ((np.arange(2 ** k)[:, None] >> np.arange(k)[None, :]) & 1).astype(np.uint8)
    words = (msgs.astype(np.int64) @ g[:, keep].astype(np.int64)) & 1
    match = np.all(words == observed[keep], axis=1)
    return [msgs[i] for i in np.flatnonzero(match)]
