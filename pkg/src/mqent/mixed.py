"""Correlation tensor of a density operator and the two-qubit Werner family.

Applied naively to a mixed state, nonzero correlations do not imply
entanglement: the Werner state is separable for F <= 1/2, yet its two-qubit
correlations vanish only at F = 1/4. :func:`werner_scan` reproduces this
known caveat; it is not a separability test.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .correlation import PauliAssignment
from .oracle import DensityMatrix
from .qstate import AXES, PAULI, StateError

WERNER_CAVEAT = (
    "known limitation: the Werner state is separable for F <= 1/2, but its "
    "correlation tensor vanishes only at F = 1/4; nonzero values here do not "
    "indicate entanglement"
)

_SINGLET = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class WernerParam:
    fidelity: float

    def __post_init__(self):
        if not 0.0 <= self.fidelity <= 1.0:
            raise StateError(f"fidelity must lie in [0, 1], got {self.fidelity}")


def _rho(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def _embed(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for q in range(1, n + 1):
        out = np.kron(out, op if q == qubit else np.eye(2))
    return out


def m_value_rho(rho, assignment) -> float:
    """``tr[rho * prod_q (sigma_q - lambda_q)]`` with identity on the other qubits, as dense matrices."""
    mat = _rho(rho)
    n = mat.shape[0].bit_length() - 1
    if mat.shape != (2 ** n, 2 ** n):
        raise StateError(f"density matrix shape {mat.shape} is not 2^n square")
    a = PauliAssignment.of(assignment)
    if a.entries and a.qubits[-1] > n:
        raise StateError(f"qubit {a.qubits[-1]} out of range 1..{n}")
    op = np.eye(2 ** n, dtype=complex)
    for qubit, axis in a.entries:
        sigma = _embed(PAULI[axis], qubit, n)
        lam = np.trace(mat @ sigma).real
        op = op @ (sigma - lam * np.eye(2 ** n))
    value = np.trace(mat @ op)
    if abs(value.imag) > 1e-10:
        raise ArithmeticError(f"non-real correlation {value}")
    return float(value.real)


def werner(fidelity: float | WernerParam) -> DensityMatrix:
    """``F |singlet><singlet| + (1 - F)/3 (I - |singlet><singlet|)``."""
    f = fidelity if isinstance(fidelity, WernerParam) else WernerParam(float(fidelity))
    proj = np.outer(_SINGLET, _SINGLET.conj())
    rho = f.fidelity * proj + (1 - f.fidelity) / 3 * (np.eye(4) - proj)
    return DensityMatrix(2, rho)


def werner_scan(grid: Iterable[float]) -> list[tuple[float, float]]:
    """``(F, max |M|)`` over the nine two-qubit assignments, for each F in ``grid``."""
    rows = []
    for f in grid:
        rho = werner(f)
        worst = max(abs(m_value_rho(rho, {1: a, 2: b})) for a in AXES for b in AXES)
        rows.append((float(f), worst))
    return rows


def scan_csv(rows: Iterable[tuple[float, float]]) -> str:
    buf = io.StringIO()
    buf.write("F,max_abs_m\n")
    for f, v in rows:
        buf.write(f"{f:.15g},{v:.15g}\n")
    return buf.getvalue()
