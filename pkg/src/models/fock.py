"""
Truncated multi-mode Fock basis and sparse operators on it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import sparse

from src.models.domain import N_MODES
from src.models.errors import BasisError

DEFAULT_MAX_BASIS = 1_000_000


@dataclass(frozen=True)
class FockBasis:
    """Occupation vectors (n_0..n_6) within per-mode and optional total cutoffs, lexicographic order."""

    cutoffs: Tuple[int, ...]
    total_cutoff: Optional[int] = None
    max_size: int = DEFAULT_MAX_BASIS
    states: np.ndarray = field(init=False, repr=False, compare=False)
    index: Dict[Tuple[int, ...], int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cutoffs = tuple(int(c) for c in self.cutoffs)
        if len(cutoffs) != N_MODES:
            raise BasisError(f"need {N_MODES} cutoffs, got {len(cutoffs)}")
        if any(c < 0 for c in cutoffs):
            raise BasisError(f"cutoffs must be nonnegative, got {cutoffs}")
        if self.total_cutoff is not None and self.total_cutoff < 0:
            raise BasisError("total cutoff must be nonnegative")
        object.__setattr__(self, "cutoffs", cutoffs)

        full_size = math.prod(c + 1 for c in cutoffs)
        if self.total_cutoff is None and full_size > self.max_size:
            raise BasisError(f"basis size {full_size} exceeds cap {self.max_size}")

        occupations = [
            s for s in itertools.product(*(range(c + 1) for c in cutoffs))
            if self.total_cutoff is None or sum(s) <= self.total_cutoff
        ]
        if len(occupations) > self.max_size:
            raise BasisError(f"basis size {len(occupations)} exceeds cap {self.max_size}")

        states = np.array(occupations, dtype=np.int64).reshape(-1, N_MODES)
        states.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "index", {s: i for i, s in enumerate(occupations)})

    @property
    def size(self) -> int:
        return self.states.shape[0]

    def below_cutoff(self, mode: int) -> np.ndarray:
        """Mask of states whose mode occupation can be raised without leaving the basis."""
        mask = self.states[:, mode] < self.cutoffs[mode]
        if self.total_cutoff is not None:
            mask &= self.states.sum(axis=1) < self.total_cutoff
        return mask


@dataclass(frozen=True)
class SparseOperator:
    """Sparse complex matrix on a FockBasis, stored in canonical CSR form."""

    basis: FockBasis
    matrix: sparse.csr_matrix

    def __post_init__(self):
        mat = sparse.csr_matrix(self.matrix, dtype=np.complex128)
        n = self.basis.size
        if mat.shape != (n, n):
            raise BasisError(f"operator shape {mat.shape} does not match basis size {n}")
        mat.sum_duplicates()
        mat.sort_indices()
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_triplets(cls, basis: FockBasis, rows, cols, values) -> "SparseOperator":
        n = basis.size
        coo = sparse.coo_matrix((np.asarray(values, dtype=complex), (rows, cols)), shape=(n, n))
        return cls(basis, coo.tocsr())

    @classmethod
    def diagonal(cls, basis: FockBasis, values) -> "SparseOperator":
        return cls(basis, sparse.diags(np.asarray(values, dtype=complex), format="csr"))

    @classmethod
    def identity(cls, basis: FockBasis) -> "SparseOperator":
        return cls(basis, sparse.identity(basis.size, dtype=complex, format="csr"))

    def _same_basis(self, other: "SparseOperator") -> None:
        if self.basis != other.basis:
            raise BasisError("operators live on different bases")

    def dagger(self) -> "SparseOperator":
        return SparseOperator(self.basis, self.matrix.conj().T.tocsr())

    def is_hermitian(self, tol: float = 1e-14) -> bool:
        diff = self.matrix - self.matrix.conj().T
        return diff.nnz == 0 or float(np.max(np.abs(diff.data))) <= tol

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.matrix.data))) if self.matrix.nnz else 0.0

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._same_basis(other)
        return SparseOperator(self.basis, self.matrix + other.matrix)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        self._same_basis(other)
        return SparseOperator(self.basis, self.matrix - other.matrix)

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        self._same_basis(other)
        return SparseOperator(self.basis, self.matrix @ other.matrix)

    def __mul__(self, scalar: complex) -> "SparseOperator":
        return SparseOperator(self.basis, self.matrix * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SparseOperator":
        return self * -1.0
