"""Pure N-qubit states: construction, named states, local unitaries, Pauli expectations.

Basis indices are big-endian: qubit 1 is the most significant bit of the
index, qubit N the least significant. Qubit labels are 1-based everywhere in
the public API.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import unitary_group

MAX_QUBITS = 12
INPUT_NORM_TOL = 1e-6
NORM_TOL = 1e-9
UNITARY_TOL = 1e-12

AXES = ("x", "y", "z")

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class StateError(ValueError):
    """Invalid state data or parameters."""


@dataclass(frozen=True, eq=False)
class PureState:
    n_qubits: int
    amplitudes: np.ndarray
    label: str | None = None

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if self.n_qubits < 1:
            raise StateError(f"n_qubits must be positive, got {self.n_qubits}")
        if amps.size != 2 ** self.n_qubits:
            raise StateError(
                f"expected {2 ** self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.size}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state is not normalized (norm={norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def tensor(self) -> np.ndarray:
        """Amplitudes as an array of shape ``(2,) * n``, axis q-1 for qubit q."""
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def __repr__(self):
        tag = f", label={self.label!r}" if self.label else ""
        return f"PureState(n_qubits={self.n_qubits}{tag})"


@dataclass(frozen=True, eq=False)
class LocalUnitary:
    qubit: int
    matrix: np.ndarray

    def __post_init__(self):
        u = np.array(self.matrix, dtype=complex)
        if u.shape != (2, 2):
            raise StateError(f"local unitary must be 2x2, got shape {u.shape}")
        defect = np.abs(u.conj().T @ u - np.eye(2)).max()
        if defect > UNITARY_TOL:
            raise StateError(f"matrix is not unitary (defect {defect:.3g})")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)


@dataclass(frozen=True)
class StateName:
    """A named state family plus its parameters, e.g. ``StateName("dicke", (4, 2))``.

    Kinds: ``basis`` (bitstring), ``bell`` (variant 1..4 = Phi+, Phi-, Psi+, Psi-),
    ``ghz`` (n), ``w`` (n), ``dicke`` (n, k) and ``phi4cluster``.
    """

    kind: str
    params: tuple = field(default=())

    KINDS = ("basis", "bell", "ghz", "w", "dicke", "phi4cluster")

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in self.KINDS:
            raise StateError(f"unknown state name {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(self.params))

    @classmethod
    def parse(cls, text: str) -> "StateName":
        """Parse generator syntax: ``ghz:4``, ``w:4``, ``dicke:4:2``, ``bell:2``, ``phi4cluster``, ``basis:0101``."""
        kind, *rest = text.strip().split(":")
        kind = kind.lower()
        if kind == "basis":
            if len(rest) != 1:
                raise StateError("basis state needs a bitstring, e.g. basis:0101")
            return cls(kind, (rest[0],))
        try:
            params = tuple(int(p) for p in rest)
        except ValueError as exc:
            raise StateError(f"bad parameters in state name {text!r}") from exc
        return cls(kind, params)

    def __str__(self):
        return ":".join([self.kind, *map(str, self.params)])


def make_state(n: int, amplitudes: Sequence[complex], renormalize: bool = False,
               max_qubits: int = MAX_QUBITS, label: str | None = None) -> PureState:
    """Validate an amplitude vector and wrap it as a :class:`PureState`.

    Without ``renormalize`` the input norm must be within ``1e-6`` of one; the
    small residual is then divided out so the stored state meets the internal
    ``1e-9`` invariant.
    """
    if n < 1:
        raise StateError(f"n must be positive, got {n}")
    if n > max_qubits:
        raise StateError(f"{n} qubits exceeds the configured limit of {max_qubits}")
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if amps.size != 2 ** n:
        raise StateError(f"expected {2 ** n} amplitudes for {n} qubits, got {amps.size}")
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise StateError("zero vector is not a state")
    if not renormalize and abs(norm - 1.0) > INPUT_NORM_TOL:
        raise StateError(f"norm {norm!r} outside tolerance {INPUT_NORM_TOL}; pass renormalize to rescale")
    if abs(norm - 1.0) > 1e-13:
        amps = amps / norm
    return PureState(n, amps, label)


def basis_state(bits: str) -> PureState:
    if not bits or set(bits) - {"0", "1"}:
        raise StateError(f"invalid bitstring {bits!r}")
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[int(bits, 2)] = 1.0
    return PureState(len(bits), amps, f"basis:{bits}")


def _weight_superposition(n: int, k: int) -> np.ndarray:
    amps = np.zeros(2 ** n, dtype=complex)
    for ones in combinations(range(n), k):
        amps[sum(1 << (n - 1 - q) for q in ones)] = 1.0
    return amps / np.sqrt(comb(n, k))


def named_state(name: StateName | str, max_qubits: int = MAX_QUBITS) -> PureState:
    if isinstance(name, str):
        name = StateName.parse(name)
    kind, params = name.kind, name.params

    def need(count):
        if len(params) != count:
            raise StateError(f"{kind} takes {count} parameter(s), got {len(params)}")

    if kind == "basis":
        need(1)
        state = basis_state(str(params[0]))
        if state.n_qubits > max_qubits:
            raise StateError(f"{state.n_qubits} qubits exceeds the configured limit of {max_qubits}")
        return state
    if kind == "phi4cluster":
        need(0)
        amps = np.zeros(16, dtype=complex)
        amps[[0b0000, 0b0011, 0b1100, 0b1111]] = [0.5, 0.5, 0.5, -0.5]
        return PureState(4, amps, str(name))
    if kind == "bell":
        need(1)
        variant = params[0]
        s = 1 / np.sqrt(2)
        table = {1: [s, 0, 0, s], 2: [s, 0, 0, -s], 3: [0, s, s, 0], 4: [0, s, -s, 0]}
        if variant not in table:
            raise StateError(f"Bell variant must be 1..4, got {variant}")
        return PureState(2, table[variant], str(name))

    n = params[0] if params else 0
    if n < 1:
        raise StateError(f"{kind} needs n >= 1, got {n}")
    if n > max_qubits:
        raise StateError(f"{n} qubits exceeds the configured limit of {max_qubits}")
    if kind == "ghz":
        need(1)
        amps = np.zeros(2 ** n, dtype=complex)
        amps[0] = amps[-1] = 1 / np.sqrt(2)
    elif kind == "w":
        need(1)
        amps = _weight_superposition(n, 1)
    else:
        need(2)
        k = params[1]
        if not 0 <= k <= n:
            raise StateError(f"Dicke weight must satisfy 0 <= k <= n, got k={k}, n={n}")
        amps = _weight_superposition(n, k)
    return PureState(n, amps, str(name))


def tensor_product(a: PureState, b: PureState, max_qubits: int = MAX_QUBITS) -> PureState:
    """``a ⊗ b``; the qubits of ``b`` are relabelled ``n_a + 1 .. n_a + n_b``."""
    n = a.n_qubits + b.n_qubits
    if n > max_qubits:
        raise StateError(f"{n} qubits exceeds the configured limit of {max_qubits}")
    return PureState(n, np.kron(a.amplitudes, b.amplitudes))


def product(*states: PureState, max_qubits: int = MAX_QUBITS) -> PureState:
    out = states[0]
    for s in states[1:]:
        out = tensor_product(out, s, max_qubits)
    return out


def _check_qubit(state: PureState, qubit: int):
    if not 1 <= qubit <= state.n_qubits:
        raise StateError(f"qubit {qubit} out of range 1..{state.n_qubits}")


def apply_local_unitary(state: PureState, u: LocalUnitary) -> PureState:
    _check_qubit(state, u.qubit)
    axis = u.qubit - 1
    psi = np.tensordot(u.matrix, state.tensor(), axes=([1], [axis]))
    psi = np.moveaxis(psi, 0, axis)
    return PureState(state.n_qubits, psi.reshape(-1))


def random_local_unitary(qubit: int, seed: int) -> LocalUnitary:
    """Haar-random single-qubit unitary, deterministic per seed."""
    return LocalUnitary(qubit, unitary_group.rvs(2, random_state=seed))


def random_state(n: int, rng: np.random.Generator | int | None = None) -> PureState:
    """Haar-random pure state on ``n`` qubits."""
    rng = np.random.default_rng(rng)
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return PureState(n, v / np.linalg.norm(v))


def permute_qubits(state: PureState, perm: Sequence[int]) -> PureState:
    """Relabel qubits: old qubit ``q`` becomes new qubit ``perm[q - 1]``."""
    n = state.n_qubits
    if sorted(perm) != list(range(1, n + 1)):
        raise StateError(f"{list(perm)} is not a permutation of 1..{n}")
    # new axis perm[q-1]-1 holds old axis q-1
    source = [0] * n
    for old, new in enumerate(perm):
        source[new - 1] = old
    return PureState(n, np.transpose(state.tensor(), source).reshape(-1))


def planted_state(rng: np.random.Generator, n: int, max_block: int = 4):
    """Product of independent Haar-random blocks on shuffled qubit labels.

    Returns ``(state, blocks)`` where ``blocks`` is the sorted list of planted
    label blocks. Blocks of size one are random single-qubit states.
    """
    sizes = []
    remaining = n
    while remaining:
        s = int(rng.integers(1, min(max_block, remaining) + 1))
        sizes.append(s)
        remaining -= s
    state = product(*(random_state(s, rng) for s in sizes), max_qubits=max(n, MAX_QUBITS))
    perm = [int(p) + 1 for p in rng.permutation(n)]
    blocks, start = [], 0
    for s in sizes:
        blocks.append(sorted(perm[q] for q in range(start, start + s)))
        start += s
    return permute_qubits(state, perm), sorted(blocks)


def _masks(state: PureState, assignment: Mapping[int, str]):
    n = state.n_qubits
    flip = phase = n_y = 0
    for qubit, axis in assignment.items():
        _check_qubit(state, qubit)
        if axis not in PAULI:
            raise StateError(f"axis must be one of x, y, z; got {axis!r}")
        bit = 1 << (n - qubit)
        if axis in ("x", "y"):
            flip |= bit
        if axis in ("y", "z"):
            phase |= bit
        n_y += axis == "y"
    return flip, phase, n_y


def _parity(values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values)
    v = values.copy()
    while v.any():
        out ^= v & 1
        v >>= 1
    return out


def pauli_expectation(state: PureState, assignment: Mapping[int, str] | Sequence[tuple[int, str]]) -> float:
    """Expectation of the Pauli string given by ``{qubit: axis}`` (identity elsewhere).

    Computed by index arithmetic: x/y flip the qubit's bit, y/z contribute a
    sign from the bit value, and each y adds a factor ``i``.
    """
    pairs = list(assignment.items()) if isinstance(assignment, Mapping) else list(assignment)
    qubits = [q for q, _ in pairs]
    if len(set(qubits)) != len(qubits):
        raise StateError(f"duplicate qubit labels in {pairs}")
    flip, phase, n_y = _masks(state, dict(pairs))
    psi = state.amplitudes
    idx = np.arange(state.dim)
    signs = 1 - 2 * _parity(idx & phase)
    value = (1j ** n_y) * np.vdot(psi[idx ^ flip], signs * psi)
    if abs(value.imag) > 1e-12:
        raise ArithmeticError(f"non-real Pauli expectation {value}")
    return float(value.real)


def state_to_json(state: PureState, label: str | None = None) -> dict:
    doc = {
        "n_qubits": state.n_qubits,
        "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
    }
    label = label if label is not None else state.label
    if label:
        doc["label"] = label
    return doc


def state_from_json(doc: Mapping, renormalize: bool = False, max_qubits: int = MAX_QUBITS) -> PureState:
    try:
        n = int(doc["n_qubits"])
        amps = [complex(float(re), float(im)) for re, im in doc["amplitudes"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise StateError(f"malformed state document: {exc}") from exc
    return make_state(n, amps, renormalize=renormalize, max_qubits=max_qubits, label=doc.get("label"))


def save_state(state: PureState, path: str | Path, label: str | None = None):
    Path(path).write_text(json.dumps(state_to_json(state, label), indent=1) + "\n")


def load_state(path: str | Path, renormalize: bool = False, max_qubits: int = MAX_QUBITS) -> PureState:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StateError(f"{path}: not valid JSON ({exc})") from exc
    return state_from_json(doc, renormalize=renormalize, max_qubits=max_qubits)
