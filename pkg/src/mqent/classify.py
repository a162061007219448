"""Entanglement structure of a pure state from vanishing and non-vanishing M'.

A subset is *correlated* when some M' entry on it exceeds the zero threshold.
Qubits that co-occur in a correlated subset belong to the same entangled
block; blocks are assembled with union-find, scanning subset sizes from the
full register downwards.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from scipy.cluster.hierarchy import DisjointSet

from .correlation import CorrelationEngine, CorrelationTensor, _check_subset, argmax_abs, max_abs
from .qstate import PureState, StateError

DEFAULT_EPS = 1e-9
MAX_CLASSIFY_QUBITS = 10


@dataclass(frozen=True)
class EntanglementPartition:
    n_qubits: int
    blocks: tuple[tuple[int, ...], ...]
    epsilon: float = DEFAULT_EPS

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        labels = [q for b in blocks for q in b]
        if sorted(labels) != list(range(1, self.n_qubits + 1)):
            raise StateError(f"blocks {blocks} do not partition 1..{self.n_qubits}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(sorted((len(b) for b in self.blocks), reverse=True))

    def entangled_blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(b for b in self.blocks if len(b) > 1)


@dataclass(frozen=True)
class ClassLabel:
    kind: str
    sizes: tuple[int, ...] = ()

    def __str__(self):
        if self.kind == "PartiallySeparable":
            return f"PartiallySeparable({','.join(map(str, self.sizes))})"
        return self.kind


def label(partition: EntanglementPartition) -> ClassLabel:
    sizes = partition.sizes
    if all(s == 1 for s in sizes):
        return ClassLabel("CompletelySeparable", sizes)
    if len(sizes) == 1:
        return ClassLabel("TotallyEntangled", sizes)
    return ClassLabel("PartiallySeparable", sizes)


def is_correlated(state: PureState, subset: Sequence[int], eps: float = DEFAULT_EPS,
                  engine: CorrelationEngine | None = None) -> bool:
    if eps <= 0:
        raise StateError("eps must be positive")
    subset = _check_subset(state, subset)
    if engine is None:
        engine = CorrelationEngine.from_state(state, subset)
    return max_abs(engine.mprime_tensor(subset)) > eps


@dataclass(frozen=True)
class Witness:
    subset: tuple[int, ...]
    axes: str
    value: float

    def to_json(self) -> dict:
        return {"subset": list(self.subset), "axes": self.axes, "value": self.value}


def _scan(state: PureState, eps: float, workers: int | None, max_qubits: int):
    n = state.n_qubits
    if eps <= 0:
        raise StateError("eps must be positive")
    if n > max_qubits:
        raise StateError(f"classifying {n} qubits exceeds the configured limit of {max_qubits}")
    uf = DisjointSet(range(1, n + 1))
    witnesses: list[Witness] = []
    if n == 1:
        return uf, witnesses
    engine = CorrelationEngine.from_state(state, max_qubits=max_qubits)
    if workers and workers > 1:
        engine.precompute(workers=workers)

    def check(subset):
        tensor = CorrelationTensor(subset, "MPrime", engine.mprime_tensor(subset), eps)
        return tensor if max_abs(tensor) > eps else None

    pool = ThreadPoolExecutor(max_workers=workers) if workers and workers > 1 else None
    try:
        for size in range(n, 1, -1):
            # subsets inside an already merged block cannot change the partition
            todo = [s for s in combinations(range(1, n + 1), size)
                    if len({uf[q] for q in s}) > 1]
            results = pool.map(check, todo) if pool else map(check, todo)
            for subset, tensor in zip(todo, results):
                if tensor is None:
                    continue
                axes, value = argmax_abs(tensor)
                witnesses.append(Witness(subset, axes, value))
                for q in subset[1:]:
                    uf.merge(subset[0], q)
    finally:
        if pool:
            pool.shutdown()
    return uf, witnesses


def finest_partition(state: PureState, eps: float = DEFAULT_EPS, workers: int | None = None,
                     max_qubits: int = MAX_CLASSIFY_QUBITS) -> EntanglementPartition:
    """Blocks of qubits joined by correlated subsets; singletons are uncorrelated qubits.

    ``workers > 1`` evaluates each size tier on a thread pool. Merging is
    applied in subset order after the tier completes, so the result does
    not depend on ``workers``.
    """
    uf, _ = _scan(state, eps, workers, max_qubits)
    return EntanglementPartition(state.n_qubits, tuple(tuple(sorted(s)) for s in uf.subsets()), eps)


def classification_report(state: PureState, eps: float = DEFAULT_EPS, workers: int | None = None,
                          max_qubits: int = MAX_CLASSIFY_QUBITS) -> dict:
    uf, witnesses = _scan(state, eps, workers, max_qubits)
    partition = EntanglementPartition(state.n_qubits, tuple(tuple(sorted(s)) for s in uf.subsets()), eps)
    best = []
    for block in partition.entangled_blocks():
        inside = [w for w in witnesses if set(w.subset) <= set(block)]
        # first maximum in scan order
        top = max(inside, key=lambda w: abs(w.value))
        best.append(top.to_json())
    return {
        "blocks": [list(b) for b in partition.blocks],
        "label": str(label(partition)),
        "epsilon": eps,
        "witness": best,
    }
