"""Separability ground truth from reduced-state purity and Schmidt coefficients.

Nothing here touches Pauli correlations; it exists to check the classifier.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .qstate import PureState, StateError

DM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n_qubits: int
    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        d = 2 ** self.n_qubits
        if rho.shape != (d, d):
            raise StateError(f"density matrix for {self.n_qubits} qubits must be {d}x{d}, got {rho.shape}")
        if np.abs(rho - rho.conj().T).max() > DM_TOL:
            raise StateError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > DM_TOL:
            raise StateError(f"density matrix trace is {np.trace(rho).real!r}, not 1")
        if np.linalg.eigvalsh(rho).min() < -DM_TOL:
            raise StateError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @classmethod
    def projector(cls, state: PureState) -> "DensityMatrix":
        return cls(state.n_qubits, np.outer(state.amplitudes, state.amplitudes.conj()))


@dataclass(frozen=True)
class SchmidtSplit:
    subset: tuple[int, ...]
    coefficients: tuple[float, ...]
    rank: int


def _proper_subset(state: PureState, subset: Sequence[int]) -> tuple[int, ...]:
    subset = tuple(sorted(set(subset)))
    if not subset:
        raise StateError("subset must be nonempty")
    if subset[0] < 1 or subset[-1] > state.n_qubits:
        raise StateError(f"subset {list(subset)} out of range 1..{state.n_qubits}")
    if len(subset) == state.n_qubits:
        raise StateError("subset must be a proper subset of the qubits")
    return subset


def _bipartite_matrix(state: PureState, subset: tuple[int, ...]) -> np.ndarray:
    keep = [q - 1 for q in subset]
    rest = [ax for ax in range(state.n_qubits) if ax not in keep]
    return np.transpose(state.tensor(), keep + rest).reshape(2 ** len(keep), -1)


def reduced_density(state: PureState, subset: Sequence[int]) -> DensityMatrix:
    """Partial trace over the complement of ``subset`` (qubits kept in label order)."""
    subset = _proper_subset(state, subset)
    psi = state.tensor()
    traced = [ax for ax in range(state.n_qubits) if ax + 1 not in subset]
    rho = np.tensordot(psi, psi.conj(), axes=(traced, traced))
    d = 2 ** len(subset)
    return DensityMatrix(len(subset), rho.reshape(d, d))


def purity(dm: DensityMatrix) -> float:
    rho = dm.entries
    # tr(rho^2) for Hermitian rho
    return float(np.sum(np.abs(rho) ** 2))


def schmidt_split(state: PureState, subset: Sequence[int], threshold: float = 1e-10) -> SchmidtSplit:
    subset = _proper_subset(state, subset)
    s = np.linalg.svd(_bipartite_matrix(state, subset), compute_uv=False)
    s = np.sort(s)[::-1]
    return SchmidtSplit(subset, tuple(float(x) for x in s), int(np.sum(s > threshold)))


def is_product_across(state: PureState, subset: Sequence[int], eps: float = 1e-9) -> bool:
    return purity(reduced_density(state, subset)) >= 1 - eps


def oracle_partition(state: PureState, eps: float = 1e-9):
    """Finest split of the qubits into blocks the state factorizes over.

    Each block is searched for a product split, smallest side first; the
    first one found is accepted and both sides are split further.
    """
    from .classify import EntanglementPartition

    if eps <= 0:
        raise StateError("eps must be positive")
    n = state.n_qubits

    def split(block: tuple[int, ...]) -> list[tuple[int, ...]]:
        for size in range(1, len(block) // 2 + 1):
            for side in combinations(block, size):
                if is_product_across(state, side, eps):
                    other = tuple(q for q in block if q not in side)
                    return split(side) + split(other)
        return [block]

    if n == 1:
        return EntanglementPartition(1, ((1,),), eps)
    blocks = split(tuple(range(1, n + 1)))
    return EntanglementPartition(n, tuple(sorted(blocks)), eps)
