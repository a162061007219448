import itertools

import numpy as np
import pytest

from mqent.classify import (ClassLabel, EntanglementPartition, classification_report, finest_partition,
                            is_correlated, label)
from mqent.correlation import CorrelationEngine
from mqent.qstate import (StateError, apply_local_unitary, named_state, permute_qubits, planted_state,
                          random_local_unitary)
from mqent.oracle import oracle_partition

NAMED_FOUR = ["ghz:4", "w:4", "dicke:4:2", "phi4cluster"]


def test_is_correlated_examples(ghz3_zero):
    assert is_correlated(named_state("ghz:4"), [1, 2, 3, 4], 1e-9)
    assert not is_correlated(ghz3_zero, [1, 2, 3, 4], 1e-9)
    assert is_correlated(ghz3_zero, [1, 2, 3], 1e-9)


def test_is_correlated_errors():
    with pytest.raises(StateError):
        is_correlated(named_state("ghz:3"), [1, 5])
    with pytest.raises(StateError):
        is_correlated(named_state("ghz:3"), [1, 2], eps=0)


def test_finest_partition_examples(bell_bell, ghz3_zero):
    assert finest_partition(bell_bell).blocks == ((1, 2), (3, 4))
    assert finest_partition(ghz3_zero).blocks == ((1, 2, 3), (4,))
    assert finest_partition(named_state("basis:0000")).blocks == ((1,), (2,), (3,), (4,))


def test_single_qubit_convention():
    p = finest_partition(named_state("basis:1"))
    assert p.blocks == ((1,),)
    assert str(label(p)) == "CompletelySeparable"


@pytest.mark.parametrize("blocks, expected", [
    (((1, 2, 3, 4),), "TotallyEntangled"),
    (((1, 2, 3), (4,)), "PartiallySeparable(3,1)"),
    (((1,), (2,), (3,), (4,)), "CompletelySeparable"),
    (((1, 4), (2,), (3, 5)), "PartiallySeparable(2,2,1)"),
])
def test_label(blocks, expected):
    n = sum(map(len, blocks))
    assert str(label(EntanglementPartition(n, blocks))) == expected


def test_label_kinds():
    assert label(EntanglementPartition(2, ((1, 2),))) == ClassLabel("TotallyEntangled", (2,))


def test_partition_validation():
    with pytest.raises(StateError):
        EntanglementPartition(3, ((1, 2), (2, 3)))
    with pytest.raises(StateError):
        EntanglementPartition(3, ((1, 2),))


@pytest.mark.parametrize("name", NAMED_FOUR + ["ghz:3*basis:0", "bell:1*bell:1", "basis:0000"])
def test_partition_stable_across_eps(name):
    from mqent.cli import _state_from_name

    psi = _state_from_name(name)
    results = {finest_partition(psi, eps).blocks for eps in (1e-9, 1e-8, 1e-7, 1e-6, 1e-5)}
    assert len(results) == 1


@pytest.mark.parametrize("name", NAMED_FOUR)
def test_local_unitary_covariance(name):
    psi = named_state(name)
    for seed in range(10):
        moved = apply_local_unitary(psi, random_local_unitary(seed % 4 + 1, seed))
        assert finest_partition(moved).blocks == ((1, 2, 3, 4),)


def test_local_unitary_covariance_partial(ghz3_zero, bell_bell):
    for psi in (ghz3_zero, bell_bell):
        expected = finest_partition(psi).blocks
        for seed in range(8):
            assert finest_partition(apply_local_unitary(psi, random_local_unitary(seed % 4 + 1, seed))).blocks == expected


def test_permutation_covariance(ghz3_zero):
    perm = [3, 1, 4, 2]
    moved = permute_qubits(ghz3_zero, perm)
    expected = tuple(sorted(tuple(sorted(perm[q - 1] for q in b)) for b in finest_partition(ghz3_zero).blocks))
    assert finest_partition(moved).blocks == expected


def test_workers_do_not_change_result(rng):
    for _ in range(5):
        psi, _ = planted_state(rng, 7)
        assert finest_partition(psi, 1e-7, workers=4) == finest_partition(psi, 1e-7)


def test_report_schema(ghz3_zero):
    doc = classification_report(ghz3_zero)
    assert doc["blocks"] == [[1, 2, 3], [4]]
    assert doc["label"] == "PartiallySeparable(3,1)"
    assert doc["epsilon"] == 1e-9
    (witness,) = doc["witness"]
    assert witness["subset"] == [1, 2, 3]
    assert abs(witness["value"]) == pytest.approx(1)
    assert len(witness["axes"]) == 3


def test_qubit_limit():
    with pytest.raises(StateError):
        finest_partition(named_state("ghz:11"))


def test_random_agreement_and_pair_only_records(rng):
    # also records k-subsets that are correlated while all their pairs are not
    pair_blind = []
    for trial in range(300):
        n = int(rng.integers(2, 7))
        psi, planted = planted_state(rng, n)
        found = finest_partition(psi, 1e-7)
        assert found.blocks == oracle_partition(psi, 1e-7).blocks
        assert [list(b) for b in found.blocks] == planted
        engine = CorrelationEngine.from_state(psi)
        for block in found.entangled_blocks():
            if len(block) >= 3 and not any(
                np.abs(engine.mprime_tensor(p)).max() > 1e-7 for p in itertools.combinations(block, 2)
            ):
                pair_blind.append((trial, block))
    print(f"correlated blocks with no correlated pair: {len(pair_blind)}")
