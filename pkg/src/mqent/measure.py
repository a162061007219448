"""Entanglement magnitude: sum of squared M' entries over a qubit subset."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .correlation import CorrelationEngine, _check_subset
from .qstate import PureState, StateError, named_state


@dataclass(frozen=True)
class MeasureReport:
    subset: tuple[int, ...]
    raw: float
    normalized: float
    reference: float

    def to_json(self) -> dict:
        return {"subset": list(self.subset), "raw": self.raw,
                "normalized": self.normalized, "reference": self.reference}


def b_measure(state: PureState, subset: Sequence[int] | None = None,
              engine: CorrelationEngine | None = None) -> float:
    subset = _check_subset(state, subset)
    if engine is None:
        engine = CorrelationEngine.from_state(state, subset)
    values = engine.mprime_tensor(subset)
    return float(np.sum(values * values))


@lru_cache(maxsize=None)
def ghz_reference(m: int) -> float:
    """B of the m-qubit GHZ state over all its qubits, used as the unit of the normalized scale."""
    if m < 2:
        raise StateError(f"reference needs m >= 2, got {m}")
    return b_measure(named_state(f"ghz:{m}"))


def b_normalized(state: PureState, subset: Sequence[int] | None = None) -> float:
    subset = _check_subset(state, subset)
    return b_measure(state, subset) / ghz_reference(len(subset))


def measure_report(state: PureState, subset: Sequence[int] | None = None) -> MeasureReport:
    subset = _check_subset(state, subset)
    raw = b_measure(state, subset)
    ref = ghz_reference(len(subset))
    return MeasureReport(subset, raw, raw / ref, ref)
