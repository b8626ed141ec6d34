"""Exact linear algebra over Z/p (dense numpy and sparse echelon) and Z/p² helpers"""
import heapq
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from sympy import isprime

from app.exceptions import DimensionMismatchError, DivisibilityError, ModulusError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModularMatrix:
    """Matrix of canonical residues mod `modulus`"""
    entries: NDArray[np.int64]
    modulus: int

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], modulus: int, cols: Optional[int] = None) -> "ModularMatrix":
        if len(rows) == 0:
            return cls(np.zeros((0, cols or 0), dtype=np.int64), modulus)
        data = np.array(rows, dtype=np.int64) % modulus
        if cols is not None and data.shape[1] != cols:
            raise DimensionMismatchError(f"expected {cols} columns, got {data.shape[1]}")
        return cls(data, modulus)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int) -> "ModularMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), modulus)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __matmul__(self, vector: Sequence[int]) -> NDArray[np.int64]:
        return (self.entries @ np.asarray(vector, dtype=np.int64)) % self.modulus


@dataclass(frozen=True)
class RrefResult:
    """Reduced row-echelon form with its pivot columns"""
    matrix: ModularMatrix
    pivots: Tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _require_prime(modulus: int) -> None:
    if not isprime(int(modulus)):
        raise ModulusError(f"Modulus {modulus} is not prime; row reduction needs a field")


def rref(m: ModularMatrix) -> RrefResult:
    """
    Gauss-Jordan elimination over F_p.

    Pivots are chosen as the first nonzero entry in column order, so the
    result (and every basis derived from it) is deterministic.

    Args:
        m: Matrix over a prime modulus (not mutated)

    Returns:
        RrefResult with the unique reduced matrix and its pivot columns
    """
    _require_prime(m.modulus)
    p = m.modulus
    mat = m.entries.copy() % p
    num_rows, num_cols = mat.shape
    pivots: List[int] = []
    row = 0
    for col in range(num_cols):
        if row >= num_rows:
            break
        pivot_rows = np.nonzero(mat[row:, col])[0]
        if len(pivot_rows) == 0:
            continue
        pivot_row = pivot_rows[0] + row
        if pivot_row != row:
            mat[[row, pivot_row]] = mat[[pivot_row, row]]
        inv_pivot = pow(int(mat[row, col]), -1, p)
        mat[row] = (mat[row] * inv_pivot) % p
        others = np.nonzero(mat[:, col])[0]
        for r in others:
            if r != row:
                mat[r] = (mat[r] - mat[r, col] * mat[row]) % p
        pivots.append(col)
        row += 1
    return RrefResult(ModularMatrix(mat, p), tuple(pivots))


def rank(m: ModularMatrix) -> int:
    """Rank over F_p"""
    if m.rows == 0 or m.cols == 0:
        return 0
    return rref(m).rank


def kernel_basis(m: ModularMatrix) -> List[NDArray[np.int64]]:
    """
    Basis of {x : m x = 0} over F_p.

    One vector per free column, with a 1 in that column; count = cols − rank.
    """
    p = m.modulus
    _require_prime(p)
    if m.rows == 0:
        return [np.eye(m.cols, dtype=np.int64)[c] for c in range(m.cols)]
    reduced = rref(m)
    mat = reduced.matrix.entries
    pivot_set = set(reduced.pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        vec = np.zeros(m.cols, dtype=np.int64)
        vec[free] = 1
        for r, pc in enumerate(reduced.pivots):
            vec[pc] = (-mat[r, free]) % p
        basis.append(vec)
    return basis


def reduce_against(reduced: RrefResult, vector: Sequence[int]) -> NDArray[np.int64]:
    """Clear every pivot coordinate of `vector` using the rows of an rref"""
    p = reduced.matrix.modulus
    vec = np.asarray(vector, dtype=np.int64) % p
    mat = reduced.matrix.entries
    for r, pc in enumerate(reduced.pivots):
        if vec[pc]:
            vec = (vec - vec[pc] * mat[r]) % p
    return vec


def quotient_coordinates(subspace: Sequence[Sequence[int]], vector: Sequence[int], modulus: int) -> NDArray[np.int64]:
    """
    Coordinates of vector + span(subspace) in the complement spanned by the
    standard vectors of the non-pivot columns of rref(subspace).

    Args:
        subspace: Spanning vectors (any number, possibly dependent)
        vector: Ambient vector
        modulus: Prime p

    Returns:
        Coordinate vector indexed by the non-pivot columns, in increasing order;
        all zero iff vector lies in the span
    """
    _require_prime(modulus)
    vec = np.asarray(vector, dtype=np.int64) % modulus
    if len(subspace) == 0:
        return vec
    sub = ModularMatrix.from_rows(subspace, modulus)
    if sub.cols != vec.shape[0]:
        raise DimensionMismatchError(f"subspace has dimension {sub.cols}, vector has {vec.shape[0]}")
    reduced = rref(sub)
    residual = reduce_against(reduced, vec)
    pivot_set = set(reduced.pivots)
    free = [c for c in range(sub.cols) if c not in pivot_set]
    return residual[free]


def solve(m: ModularMatrix, target: Sequence[int]) -> Optional[NDArray[np.int64]]:
    """Some x with m x = target over F_p, or None when inconsistent"""
    p = m.modulus
    target_vec = np.asarray(target, dtype=np.int64).reshape(-1, 1) % p
    if target_vec.shape[0] != m.rows:
        raise DimensionMismatchError(f"target has {target_vec.shape[0]} rows, matrix has {m.rows}")
    augmented = ModularMatrix(np.hstack([m.entries % p, target_vec]), p)
    reduced = rref(augmented)
    if m.cols in reduced.pivots:
        return None
    x = np.zeros(m.cols, dtype=np.int64)
    for r, pc in enumerate(reduced.pivots):
        x[pc] = reduced.matrix.entries[r, m.cols]
    return x


# Sparse echelon ----------------------------------------------------------

SparseVector = Dict[Hashable, int]


def sparse_add(target: SparseVector, other: SparseVector, scale: int, modulus: int) -> None:
    """target += scale * other, in place, pruning zeros"""
    for key, value in other.items():
        new = (target.get(key, 0) + scale * value) % modulus
        if new:
            target[key] = new
        else:
            target.pop(key, None)


class SparseEchelon:
    """
    Incrementally built echelon basis of sparse vectors over F_p.

    Each stored row has its minimal key (under `order`) as pivot with
    coefficient 1. Rows optionally remember which inserted vectors they
    combine, so a successful reduction doubles as a solution certificate.
    """

    def __init__(self, modulus: int, order: Callable[[Hashable], object] = None):
        _require_prime(modulus)
        self.modulus = modulus
        self.order = order or (lambda key: key)
        self.rows: Dict[Hashable, Tuple[SparseVector, SparseVector]] = {}

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vector: SparseVector) -> Tuple[SparseVector, SparseVector]:
        """
        Reduce a vector against the stored rows.

        Returns:
            (residual, combo) with vector = residual + Σ combo[label]·inserted[label]
        """
        p = self.modulus
        residual = {k: v % p for k, v in vector.items() if v % p}
        combo: SparseVector = {}
        heap = [(self.order(k), i, k) for i, k in enumerate(residual) if k in self.rows]
        heapq.heapify(heap)
        counter = len(heap)
        while heap:
            _, _, key = heapq.heappop(heap)
            coeff = residual.get(key)
            if not coeff:
                continue
            row, row_combo = self.rows[key]
            for k in row:
                if k != key and k in self.rows and k not in residual:
                    counter += 1
                    heapq.heappush(heap, (self.order(k), counter, k))
            sparse_add(residual, row, -coeff, p)
            sparse_add(combo, row_combo, coeff, p)
        return residual, combo

    def add(self, vector: SparseVector, label: Hashable = None) -> bool:
        """Insert a vector; returns False when it was already in the span"""
        residual, combo = self.reduce(vector)
        if not residual:
            return False
        p = self.modulus
        row_combo: SparseVector = {k: (-v) % p for k, v in combo.items()}
        if label is not None:
            row_combo[label] = (row_combo.get(label, 0) + 1) % p
            if not row_combo[label]:
                del row_combo[label]
        pivot = min(residual, key=self.order)
        inv = pow(residual[pivot], -1, p)
        row = {k: (v * inv) % p for k, v in residual.items()}
        self.rows[pivot] = (row, {k: (v * inv) % p for k, v in row_combo.items()})
        return True

    def contains(self, vector: SparseVector) -> bool:
        residual, _ = self.reduce(vector)
        return not residual


def sparse_rank(vectors: Iterable[SparseVector], modulus: int, order: Callable = None) -> int:
    """Rank of a family of sparse vectors"""
    echelon = SparseEchelon(modulus, order)
    for vec in vectors:
        echelon.add(vec)
    return echelon.rank


# Z/p² and F_p helpers ----------------------------------------------------

def divide_by_p(coefficients: Dict[Hashable, int], p: int, what: str = "expression") -> Dict[Hashable, int]:
    """
    Exact division of Z/p² coefficients by p, reduced mod p.

    Raises:
        DivisibilityError: some coefficient is not a multiple of p
    """
    remainder = {k: c % (p * p) for k, c in coefficients.items() if c % p}
    if remainder:
        raise DivisibilityError(f"{what} not divisible by p ({len(remainder)} offending terms)", remainder)
    result = {}
    for key, c in coefficients.items():
        value = (c % (p * p)) // p
        if value:
            result[key] = value
    return result


def modular_fraction(numerator: int, denominator: int, p: int) -> int:
    """numerator/denominator as an element of F_p"""
    if denominator % p == 0:
        raise ModulusError(f"{denominator} is not invertible mod {p}")
    return (numerator * pow(denominator, -1, p)) % p


def signed(value: int, p: int) -> int:
    """Symmetric representative in (−p/2, p/2] for display"""
    value %= p
    return value - p if value > p // 2 else value
