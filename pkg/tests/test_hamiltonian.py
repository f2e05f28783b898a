import numpy as np
import pytest
from conftest import golden_01, golden_20, random_drive

from su3blockade import DriveParams, ValidationError
from su3blockade.hamiltonian import build_block, build_observable, hermiticity_defect, sector
from su3blockade.irrep import Partition, enumerate_partitions


def test_golden_two_atom_blocks(rng):
    for _ in range(20):
        w1, w2, d1, d2 = rng.uniform(-3, 3, size=4)
        drive = DriveParams(w1, w2, d1, d2)
        H20 = build_block(Partition(2, 0, 0), drive).matrix
        H01 = build_block(Partition(1, 1, 0), drive).matrix
        assert np.max(np.abs(H20 - golden_20(w1, w2, d1, d2))) < 1e-12
        assert np.max(np.abs(H01 - golden_01(w1, w2, d1, d2))) < 1e-12


def test_pq_form_is_independent_of_n():
    # (0,1) block for n = 2 equals the (0,1) block with lambda3 = 0 regardless of n
    drive = DriveParams(0.7, 1.1, 0.0, 0.0)
    a = build_block(Partition.from_pq(3, 1), drive).matrix
    b = build_block(Partition.from_pq(3, 1, 0), drive).matrix
    assert np.array_equal(a, b)


def test_zero_drive_is_zero():
    for lam in enumerate_partitions(5, blockade_only=True):
        assert not build_block(lam, DriveParams()).matrix.any()


def test_detuning_only_is_diagonal(rng):
    d1, d2 = rng.uniform(-2, 2, size=2)
    drive = DriveParams(0, 0, d1, d2)
    for lam in enumerate_partitions(6, blockade_only=True):
        H = build_block(lam, drive).matrix
        n1 = build_observable(lam, "n1").matrix.diagonal()
        nr = build_observable(lam, "nr").matrix.diagonal()
        assert np.allclose(H, np.diag(-d1 * n1 - (d1 + d2) * nr), atol=1e-12)


def test_hermiticity(rng):
    for _ in range(10):
        drive = random_drive(rng, complex_rabi=True)
        for lam in enumerate_partitions(7, blockade_only=True):
            assert hermiticity_defect(build_block(lam, drive).matrix) < 1e-12


def test_observables():
    assert np.array_equal(build_observable(Partition(2, 0, 0), "nr").matrix.diagonal(), [0, 0, 0, 1, 1])
    assert np.array_equal(build_observable(Partition(1, 1, 0), "n0").matrix.diagonal(), [1, 1, 0])
    for lam in enumerate_partitions(6, blockade_only=True):
        total = sum(build_observable(lam, o).matrix for o in ("n0", "n1", "nr"))
        assert np.array_equal(total, lam.n * np.eye(total.shape[0]))
        nr = build_observable(lam, "nr").matrix.diagonal()
        rows = np.array([s.r for s in sector(lam).basis.states])
        assert np.array_equal(nr, rows + lam.lambda3)


def test_unknown_observable():
    with pytest.raises(ValidationError):
        build_observable(Partition(2, 0, 0), "n2")


def test_fully_blockaded_sector_rejected():
    with pytest.raises(ValidationError):
        build_block(Partition(2, 2, 2), DriveParams(1, 1))


def test_non_finite_drive_rejected():
    with pytest.raises(ValidationError):
        DriveParams(float("nan"), 1.0)


def test_blocks_read_only():
    H = build_block(Partition(3, 0, 0), DriveParams(1, 1)).matrix
    with pytest.raises(ValueError):
        H[0, 0] = 1
