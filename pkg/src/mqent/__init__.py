"""Entanglement structure of pure multiqubit states from Pauli correlation tensors."""
from .classify import ClassLabel, EntanglementPartition, classification_report, finest_partition, is_correlated, label
from .correlation import (CorrelationEngine, CorrelationTensor, PauliAssignment, lambda_value, m_prime_value,
                          m_value, max_abs, partitions_min2, tensor_scan)
from .measure import MeasureReport, b_measure, b_normalized, ghz_reference, measure_report
from .mixed import WernerParam, m_value_rho, werner, werner_scan
from .oracle import DensityMatrix, SchmidtSplit, is_product_across, oracle_partition, purity, reduced_density, schmidt_split
from .qstate import (LocalUnitary, PureState, StateError, StateName, apply_local_unitary, make_state, named_state,
                     pauli_expectation, random_local_unitary, tensor_product)

__version__ = "0.1.0"
