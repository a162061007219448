"""Pauli correlation tensors M and M' over qubit subsets.

``M`` is the expectation of the product of mean-shifted Pauli operators
``(sigma - lambda)`` on the listed qubits. ``M'`` removes from ``M`` every
contribution that factorizes over a split of the positions into blocks of
size two or more; the block factors are themselves ``M'`` values, so for
subsets of up to five qubits the blocks are plain ``M`` values.

Two evaluation routes are provided:

* per entry (:func:`m_value`, :func:`m_prime_value`), by inclusion-exclusion
  over raw Pauli expectations and an explicit sum over block partitions;
* whole tensors (:class:`CorrelationEngine`, :func:`tensor_scan`), from a
  Walsh-Hadamard table of all Pauli expectations and the moment-cumulant
  recursion.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Mapping, Sequence

import numpy as np
from scipy.linalg import hadamard

from .qstate import AXES, PureState, StateError, pauli_expectation

MAX_SCAN_QUBITS = 10
KINDS = ("M", "MPrime")

BlockPartition = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class PauliAssignment:
    """Ordered ``(qubit, axis)`` pairs with strictly increasing qubit labels."""

    entries: tuple[tuple[int, str], ...]

    def __post_init__(self):
        entries = tuple((int(q), str(a)) for q, a in self.entries)
        qubits = [q for q, _ in entries]
        if any(b <= a for a, b in zip(qubits, qubits[1:])):
            raise StateError(f"qubit labels must be strictly increasing: {qubits}")
        if any(q < 1 for q in qubits):
            raise StateError(f"qubit labels are 1-based: {qubits}")
        bad = [a for _, a in entries if a not in AXES]
        if bad:
            raise StateError(f"axes must be x, y or z; got {bad}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, value) -> "PauliAssignment":
        """Accept a PauliAssignment, a ``{qubit: axis}`` mapping or ``(qubit, axis)`` pairs."""
        if isinstance(value, cls):
            return value
        pairs = value.items() if isinstance(value, Mapping) else value
        return cls(tuple(sorted(pairs)))

    @classmethod
    def on(cls, subset: Sequence[int], axes: str) -> "PauliAssignment":
        if len(subset) != len(axes):
            raise StateError(f"{len(subset)} qubits but {len(axes)} axes")
        return cls(tuple(zip(subset, axes)))

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.entries)

    @property
    def axes(self) -> str:
        return "".join(a for _, a in self.entries)

    def restrict(self, positions: Sequence[int]) -> "PauliAssignment":
        return PauliAssignment(tuple(self.entries[p] for p in positions))

    def __len__(self):
        return len(self.entries)


def _checked(state: PureState, assignment) -> PauliAssignment:
    a = PauliAssignment.of(assignment)
    if a.entries and a.qubits[-1] > state.n_qubits:
        raise StateError(f"qubit {a.qubits[-1]} out of range 1..{state.n_qubits}")
    return a


def lambda_value(state: PureState, qubit: int, axis: str) -> float:
    """Single-qubit Pauli expectation (a Bloch-vector component)."""
    return pauli_expectation(state, {qubit: axis})


def _m_from_raw(a: PauliAssignment, raw) -> float:
    """Inclusion-exclusion: sum over kept positions of raw(kept) * prod(-lambda) over dropped ones."""
    k = len(a)
    lam = [raw((i,)) for i in range(k)]
    total = 0.0
    for r in range(k + 1):
        for kept in combinations(range(k), r):
            term = raw(kept) if kept else 1.0
            for i in range(k):
                if i not in kept:
                    term *= -lam[i]
            total += term
    return total


def _raw_cache(state: PureState, a: PauliAssignment):
    cache = {}

    def raw(positions):
        if positions not in cache:
            cache[positions] = pauli_expectation(state, a.restrict(positions).entries)
        return cache[positions]

    return raw


def m_value(state: PureState, assignment) -> float:
    a = _checked(state, assignment)
    if len(a) == 0:
        raise StateError("assignment must have at least one entry")
    if len(a) == 1:
        return 0.0
    return _m_from_raw(a, _raw_cache(state, a))


def set_partitions(items: Sequence) -> Iterator[list[list]]:
    """All set partitions of ``items``, blocks kept in first-element order."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def partitions_min2(positions: Sequence[int]) -> list[BlockPartition]:
    """Partitions of ``positions`` into two or more blocks, every block of size >= 2.

    Sorted lexicographically, so the subtraction in :func:`m_prime_value` runs
    in a fixed order.
    """
    positions = list(positions)
    if len(positions) < 2:
        raise StateError("need at least two positions")
    out = []
    for part in set_partitions(sorted(positions)):
        if len(part) >= 2 and all(len(b) >= 2 for b in part):
            out.append(tuple(sorted(tuple(sorted(b)) for b in part)))
    return sorted(out)


def m_prime_value(state: PureState, assignment, *, recursive: bool = True) -> float:
    """Partition-corrected correlation ``M'`` for one assignment.

    With ``recursive=False`` the products in the subtraction use plain ``M``
    for every block. The two agree for up to five positions; beyond that only
    the recursive form vanishes on every assignment that spans two
    uncorrelated factors of a product state.
    """
    a = _checked(state, assignment)
    if len(a) < 2:
        raise StateError("M' needs at least two entries")
    raw = _raw_cache(state, a)
    moments: dict[tuple[int, ...], float] = {}
    connected: dict[tuple[int, ...], float] = {}

    def m(block):
        if block not in moments:
            sub = a.restrict(block)
            moments[block] = _m_from_raw(sub, lambda pos: raw(tuple(block[i] for i in pos)))
        return moments[block]

    def mp(block):
        if len(block) <= 3 or not recursive:
            return m(block)
        if block not in connected:
            value = m(block)
            for part in partitions_min2(block):
                value -= float(np.prod([mp(b) for b in part]))
            connected[block] = value
        return connected[block]

    full = tuple(range(len(a)))
    if recursive:
        return mp(full)
    value = m(full)
    for part in partitions_min2(full):
        value -= float(np.prod([m(b) for b in part]))
    return value


def _popcount(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    while x.any():
        out += x & 1
        x = x >> 1
    return out


_PHASE = np.array([1, 1j, -1, -1j])
# combined per-qubit code 2*flip + phase -> I, z, x, y; reorder to I, x, y, z
_CODE_ORDER = [0, 2, 3, 1]


def pauli_table(rho: np.ndarray) -> np.ndarray:
    """All Pauli-string expectations of a ``2^k x 2^k`` density matrix.

    Returns a real array of shape ``(4,) * k``; index 0 on an axis is the
    identity, 1..3 are x, y, z.
    """
    d = rho.shape[0]
    k = d.bit_length() - 1
    if rho.shape != (d, d) or 2 ** k != d:
        raise StateError(f"density matrix shape {rho.shape} is not 2^k square")
    idx = np.arange(d)
    flips = idx[:, None]
    w = rho[idx[None, :], idx[None, :] ^ flips]
    t = w @ hadamard(d)
    table = (_PHASE[_popcount(flips & idx[None, :]) % 4] * t).real
    table = table.reshape((2,) * (2 * k))
    interleave = [ax for q in range(k) for ax in (q, k + q)]
    table = table.transpose(interleave).reshape((4,) * k)
    for ax in range(k):
        table = np.take(table, _CODE_ORDER, axis=ax)
    return table


def _marginal(state: PureState, subset: Sequence[int]) -> np.ndarray:
    axes = [q - 1 for q in subset]
    rest = [ax for ax in range(state.n_qubits) if ax not in axes]
    psi = np.transpose(state.tensor(), axes + rest).reshape(2 ** len(axes), -1)
    return psi @ psi.conj().T


class CorrelationEngine:
    """Whole-tensor evaluation of M and M' for every sub-subset of a qubit set.

    Built once per state (or density matrix); M' tensors are memoized, so a
    scan over many subsets shares the work of the smaller ones.
    """

    def __init__(self, raw: np.ndarray, labels: Sequence[int]):
        self.labels = tuple(labels)
        k = len(self.labels)
        if raw.shape != (4,) * k:
            raise StateError(f"raw table shape {raw.shape} does not match {k} qubits")
        self.raw = raw
        self._index = {q: i for i, q in enumerate(self.labels)}
        central = raw
        self.lambdas = np.zeros((k, 3))
        for ax in range(k):
            sel = [0] * k
            sel[ax] = slice(1, 4)
            self.lambdas[ax] = raw[tuple(sel)]
            shift = np.eye(4)
            shift[1:, 0] = -self.lambdas[ax]
            central = np.moveaxis(np.tensordot(shift, central, axes=([1], [ax])), 0, ax)
        self.central = central
        self._connected: dict[tuple[int, ...], np.ndarray] = {}

    @classmethod
    def from_state(cls, state: PureState, subset: Sequence[int] | None = None,
                   max_qubits: int = MAX_SCAN_QUBITS) -> "CorrelationEngine":
        subset = _check_subset(state, subset, min_size=1)
        if len(subset) > max_qubits:
            raise StateError(f"scan over {len(subset)} qubits exceeds the configured limit of {max_qubits}")
        return cls(pauli_table(_marginal(state, subset)), subset)

    @classmethod
    def from_density(cls, rho: np.ndarray, labels: Sequence[int] | None = None) -> "CorrelationEngine":
        rho = np.asarray(rho, dtype=complex)
        k = rho.shape[0].bit_length() - 1
        return cls(pauli_table(rho), labels or range(1, k + 1))

    def _positions(self, subset: Sequence[int]) -> tuple[int, ...]:
        try:
            pos = tuple(sorted(self._index[q] for q in subset))
        except KeyError as exc:
            raise StateError(f"qubit {exc.args[0]} not covered by this engine") from None
        if len(set(pos)) != len(pos):
            raise StateError(f"duplicate qubits in {list(subset)}")
        return pos

    def _m(self, pos: tuple[int, ...]) -> np.ndarray:
        sel = [0] * len(self.labels)
        for p in pos:
            sel[p] = slice(1, 4)
        return self.central[tuple(sel)]

    def _mprime(self, pos: tuple[int, ...]) -> np.ndarray:
        if len(pos) <= 3:
            return self._m(pos)
        hit = self._connected.get(pos)
        if hit is not None:
            return hit
        head, rest = pos[0], pos[1:]
        acc = self._m(pos).copy()
        # moment-cumulant recursion on the block holding the first position
        for r in range(1, len(rest) - 1):
            for extra in combinations(rest, r):
                block = (head,) + extra
                others = tuple(p for p in rest if p not in extra)
                term = np.multiply.outer(self._mprime(block), self._m(others))
                order = block + others
                acc -= np.transpose(term, [order.index(p) for p in pos])
        acc.setflags(write=False)
        self._connected[pos] = acc
        return acc

    def m_tensor(self, subset: Sequence[int]) -> np.ndarray:
        return np.array(self._m(self._positions(subset)))

    def mprime_tensor(self, subset: Sequence[int]) -> np.ndarray:
        return np.array(self._mprime(self._positions(subset)))

    def tensor(self, subset: Sequence[int], kind: str = "MPrime") -> np.ndarray:
        kind = _kind(kind)
        return self.m_tensor(subset) if kind == "M" else self.mprime_tensor(subset)

    def precompute(self, max_size: int | None = None, workers: int | None = None):
        """Fill the M' memo tier by tier (subset size 4, 5, ...).

        Entries within a tier depend only on smaller tiers, so a tier may be
        evaluated by a thread pool; each entry is summed in a fixed order and
        the results are bit-identical to serial evaluation.
        """
        k = len(self.labels)
        max_size = k if max_size is None else min(max_size, k)
        for size in range(4, max_size + 1):
            todo = [t for t in combinations(range(k), size) if t not in self._connected]
            if workers and workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    list(pool.map(self._mprime, todo))
            else:
                for t in todo:
                    self._mprime(t)


@dataclass(frozen=True, eq=False)
class CorrelationTensor:
    subset: tuple[int, ...]
    kind: str
    values: np.ndarray
    epsilon: float = 1e-9

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        k = len(self.subset)
        if values.size != 3 ** k:
            raise StateError(f"tensor over {k} qubits needs {3 ** k} values, got {values.size}")
        values = values.reshape((3,) * k)
        values.setflags(write=False)
        object.__setattr__(self, "subset", tuple(self.subset))
        object.__setattr__(self, "kind", _kind(self.kind))
        object.__setattr__(self, "values", values)

    def __getitem__(self, axes: str) -> float:
        return float(self.values[tuple(AXES.index(a) for a in axes)])

    def items(self) -> Iterator[tuple[str, float]]:
        """``(axes, value)`` pairs in lexicographic axis order x < y < z."""
        for axes, value in zip(product(AXES, repeat=len(self.subset)), self.values.ravel()):
            yield "".join(axes), float(value)

    def to_json(self) -> dict:
        return {"subset": list(self.subset), "kind": self.kind, "values": self.values.ravel().tolist()}

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _kind(kind: str) -> str:
    aliases = {"M": "M", "MPrime": "MPrime", "M'": "MPrime", "mprime": "MPrime", "m": "M"}
    if kind not in aliases:
        raise StateError(f"tensor kind must be M or MPrime, got {kind!r}")
    return aliases[kind]


def _check_subset(state: PureState, subset: Sequence[int] | None, min_size: int = 2) -> tuple[int, ...]:
    if subset is None:
        subset = range(1, state.n_qubits + 1)
    subset = tuple(sorted(subset))
    if len(set(subset)) != len(subset):
        raise StateError(f"duplicate qubits in {list(subset)}")
    if len(subset) < min_size:
        raise StateError(f"subset needs at least {min_size} qubits, got {list(subset)}")
    if subset[0] < 1 or subset[-1] > state.n_qubits:
        raise StateError(f"subset {list(subset)} out of range 1..{state.n_qubits}")
    return subset


def tensor_scan(state: PureState, subset: Sequence[int] | None = None, kind: str = "MPrime",
                eps: float = 1e-9, engine: CorrelationEngine | None = None) -> CorrelationTensor:
    """Dense tensor of all ``3^|subset|`` M or M' entries, lexicographic axis order."""
    subset = _check_subset(state, subset)
    if engine is None:
        engine = CorrelationEngine.from_state(state, subset)
    return CorrelationTensor(subset, kind, engine.tensor(subset, kind), eps)


def max_abs(tensor: CorrelationTensor | np.ndarray) -> float:
    values = tensor.values if isinstance(tensor, CorrelationTensor) else np.asarray(tensor)
    return float(np.abs(values).max()) if values.size else 0.0


def argmax_abs(tensor: CorrelationTensor) -> tuple[str, float]:
    """Axes string and value of the first entry of largest magnitude."""
    flat = tensor.values.ravel()
    i = int(np.argmax(np.abs(flat)))
    axes = "".join(AXES[j] for j in np.unravel_index(i, tensor.values.shape))
    return axes, float(flat[i])
