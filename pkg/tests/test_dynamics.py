import csv
import math

import numpy as np
import pytest
from conftest import random_drive

from su3blockade import DriveParams, NoRevivalError, TimeSeries, ValidationError
from su3blockade.dynamics import (
    InitialSpec,
    block_spectra,
    default_time_step,
    detect_revival,
    evolve_expectation,
    evolve_observables,
    find_revivals,
    fit_sqrt_law,
    full_spectrum,
    initial_block_states,
    initial_weights,
    max_rabi_enhancement,
    revival_scaling,
)
from su3blockade.hamiltonian import sector
from su3blockade.irrep import Partition, enumerate_partitions
from su3blockade.oracle import oracle_evolve, oracle_spectrum, product_state


def log_weight(p, q, n0, n1):
    return (math.log(p + 1) + math.lgamma(n0 + 1) + math.lgamma(n1 + 1)
            - math.lgamma(q + 1) - math.lgamma(p + q + 2))


def test_initial_spec_validation():
    with pytest.raises(ValidationError):
        InitialSpec(-1, 2)
    with pytest.raises(ValidationError):
        InitialSpec(0, 0)
    with pytest.raises(ValidationError):
        InitialSpec.family("all2", 4)
    assert InitialSpec.family("half", 5) == InitialSpec(2, 3)
    assert InitialSpec.family("all0", 3) == InitialSpec(3, 0)


def test_weights_examples():
    assert initial_weights(InitialSpec(5, 0)) == [(Partition(5, 0, 0), 1.0)]
    w = dict(initial_weights(InitialSpec(1, 1)))
    assert w == {Partition(2, 0, 0): 0.5, Partition(1, 1, 0): 0.5}
    with pytest.raises(ValidationError):
        initial_weights(InitialSpec(1, 1), n=3)


@pytest.mark.parametrize("n", range(1, 13))
def test_weights_sum_to_one(n):
    for n0 in range(n + 1):
        ws = initial_weights(InitialSpec(n0, n - n0))
        assert sum(w for _, w in ws) == pytest.approx(1.0, abs=1e-12)
        assert [lam.p for lam, _ in ws] == sorted(lam.p for lam, _ in ws)
        assert all(lam.lambda3 == 0 and lam.p >= abs(2 * n0 - n) for lam, _ in ws)


@pytest.mark.parametrize("n0, n1", [(150, 150), (0, 300), (120, 180)])
def test_weights_large_n_match_log_factorials(n0, n1):
    ws = initial_weights(InitialSpec(n0, n1))
    assert sum(w for _, w in ws) == pytest.approx(1.0, abs=1e-12)
    for lam, w in ws:
        ref = math.exp(log_weight(lam.p, lam.q, n0, n1))
        assert w == pytest.approx(ref, rel=1e-10)


def test_block_states_unit_norm():
    for st in initial_block_states(InitialSpec(3, 4)):
        assert np.linalg.norm(st.amplitudes) == 1.0
        occ = sector(st.partition).basis.occupations()[np.argmax(np.abs(st.amplitudes))]
        assert tuple(occ) == (3, 4, 0)


def test_time_zero_has_no_rydberg(rng):
    for _ in range(5):
        s = evolve_expectation(InitialSpec(*rng.integers(0, 6, size=2) + [1, 0]), random_drive(rng), "nr", [0.0])
        assert abs(s.values[0]) < 1e-14


def test_single_atom_rabi():
    t = np.linspace(0, 20, 101)
    s = evolve_expectation(InitialSpec(0, 1), DriveParams(0, 1.0), "nr", t)
    assert np.allclose(s.values, np.sin(t / 2) ** 2, atol=1e-13)


@pytest.mark.parametrize("n", range(2, 7))
def test_matches_oracle(n, rng):
    t = np.linspace(0, 15, 60)
    for _ in range(2):
        n0 = int(rng.integers(0, n + 1))
        drive = random_drive(rng, complex_rabi=bool(rng.integers(2)))
        blocks = evolve_observables(InitialSpec(n0, n - n0), drive, ["n0", "n1", "nr"], t)
        psi = product_state(n, n0, n - n0)
        for o in ("n0", "n1", "nr"):
            ref = oracle_evolve(psi, n, drive, o, t)
            assert np.max(np.abs(blocks[o].values - ref.values)) < 1e-8


def test_observables_sum_and_bounds(rng):
    n = 40
    t = np.linspace(0, 50, 400)
    out = evolve_observables(InitialSpec(15, 25), random_drive(rng), ["n0", "n1", "nr"], t)
    total = out["n0"].values + out["n1"].values + out["nr"].values
    assert np.max(np.abs(total - n)) < 1e-10
    assert np.all(out["nr"].values > -1e-12) and np.all(out["nr"].values < 1 + 1e-12)


def test_enhanced_rabi_frequency():
    n = 100
    t = np.arange(0, 2, default_time_step(n))
    s = evolve_expectation(InitialSpec(0, n), DriveParams(1, 1, 1, 0), "nr", t)
    # first maximum near pi / sqrt(n), far earlier than the single-atom pi
    first_peak = t[np.argmax(s.values[t < 1.0])]
    assert first_peak < 3 * math.pi / math.sqrt(n)
    assert s.values.max() > 0.9


def test_grid_validation():
    with pytest.raises(ValidationError):
        evolve_expectation(InitialSpec(1, 1), DriveParams(1, 1), "nr", [0.0, 1.0, 1.0])
    with pytest.raises(ValidationError):
        evolve_expectation(InitialSpec(1, 1), DriveParams(1, 1), "nr", [])
    with pytest.raises(ValidationError):
        evolve_expectation(InitialSpec(1, 1), DriveParams(1, 1), "nr", [0.0, float("inf")])
    with pytest.raises(ValidationError):
        evolve_expectation(InitialSpec(1, 1), DriveParams(1, 1), "nx", [0.0])


def test_min_weight_bounds_error():
    t = np.linspace(0, 30, 100)
    drive = DriveParams(1, 1, 1, 0)
    spec = InitialSpec(20, 20)
    full = evolve_expectation(spec, drive, "nr", t).values
    dropped = sum(w for _, w in initial_weights(spec) if w < 1e-3)
    approx = evolve_expectation(spec, drive, "nr", t, min_weight=1e-3).values
    assert dropped > 0
    assert np.max(np.abs(full - approx)) <= dropped + 1e-12


def test_thread_count_does_not_change_result(rng):
    t = np.linspace(0, 40, 300)
    drive = random_drive(rng)
    a = evolve_expectation(InitialSpec(13, 17), drive, "nr", t, n_jobs=1).values
    b = evolve_expectation(InitialSpec(13, 17), drive, "nr", t, n_jobs=4).values
    assert np.array_equal(a, b)


def test_full_spectrum_examples(rng):
    spec = full_spectrum(1, DriveParams(1.0, 0, 0, 0))
    assert sorted(e for e, _ in spec) == pytest.approx([-0.5, 0.0, 0.5], abs=1e-15)
    assert all(e == 0 for e, _ in full_spectrum(4, DriveParams()))
    drive = random_drive(rng)
    spec = full_spectrum(2, drive)
    assert len(spec) == 8 and all(mu == 1 for _, mu in spec)
    assert np.allclose(sorted(e for e, _ in spec), oracle_spectrum(2, drive), atol=1e-12)


@pytest.mark.parametrize("n", range(1, 9))
def test_spectrum_count(n):
    spec = full_spectrum(n, DriveParams(0.3, 1.0, 0.2, -0.1))
    assert sum(mu for _, mu in spec) == 2 ** n + n * 2 ** (n - 1)


def test_block_spectra_threads(rng):
    drive = random_drive(rng)
    a = block_spectra(20, drive)
    b = block_spectra(20, drive, n_jobs=3)
    assert list(a) == list(b)
    assert all(np.array_equal(a[k], b[k]) for k in a)


def test_max_rabi_enhancement():
    for n in (1, 4, 100):
        assert max_rabi_enhancement(Partition(n, 0, 0)) == pytest.approx(math.sqrt(n))
    assert max_rabi_enhancement(Partition(1, 1, 0)) == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        max_rabi_enhancement(Partition(1, 1, 1))


@pytest.mark.parametrize("n", range(1, 12))
def test_max_rabi_is_largest_column_norm(n):
    for lam in enumerate_partitions(n, blockade_only=True):
        if lam.lambda3:
            continue
        norms = np.linalg.norm(sector(lam).U_minus, axis=0)
        assert max_rabi_enhancement(lam) == pytest.approx(norms.max(), abs=1e-12)


def synthetic_echo():
    t = np.linspace(0, 40, 4001)
    v = np.exp(-t / 5) * np.abs(np.sin(5 * t)) + 0.8 * np.exp(-((t - 25) / 0.3) ** 2)
    return TimeSeries(t, v)


def test_detect_revival_synthetic():
    res = detect_revival(synthetic_echo())
    assert res.detected
    assert res.time == pytest.approx(25, abs=0.05)
    assert res.strength == pytest.approx(0.8, abs=0.01)


def test_detect_revival_monotone():
    t = np.linspace(0, 40, 2000)
    assert not detect_revival(TimeSeries(t, np.exp(-t))).detected
    assert not detect_revival(TimeSeries(t, np.zeros_like(t))).detected
    assert not detect_revival(TimeSeries(t[t < 3], np.ones((t < 3).sum()))).detected


def test_fit_sqrt_law():
    n = np.array([50, 100, 150, 200])
    a, b, r2, resid = fit_sqrt_law(n, 2 * np.sqrt(n))
    assert a == pytest.approx(2, abs=1e-9) and b == pytest.approx(0, abs=1e-9)
    assert r2 == pytest.approx(1.0) and np.max(np.abs(resid)) < 1e-9
    a, b, r2, _ = fit_sqrt_law(n, np.full(4, 7.0))
    assert a == pytest.approx(0, abs=1e-9) and b == pytest.approx(7.0)


def test_revival_scaling_errors():
    with pytest.raises(ValidationError):
        revival_scaling([10, 20, 30], "all1", DriveParams(1, 1, 1, 0))
    with pytest.raises(NoRevivalError):
        revival_scaling([4, 5, 6, 7], "all1", DriveParams(), t_max=30.0)


def test_find_revivals_reports_each_size():
    res = find_revivals([4, 5], "all1", DriveParams(), t_max=30.0)
    assert [r.detected for r in res] == [False, False]


def test_revival_for_n100():
    s = evolve_expectation(InitialSpec(0, 100), DriveParams(1, 1, 1, 0), "nr",
                           np.arange(0, 220, default_time_step(100)))
    res = detect_revival(s)
    assert res.detected and res.time > 100 and res.strength > 0.9


def test_timeseries_csv(tmp_path):
    s = TimeSeries(np.array([0.0, 0.1]), np.array([1 / 3, 2.0]))
    s.to_csv(tmp_path / "s.csv")
    rows = list(csv.reader(open(tmp_path / "s.csv")))
    assert rows[0] == ["t", "value"]
    assert float(rows[1][1]) == 1 / 3 and float(rows[2][0]) == 0.1
    with pytest.raises(ValidationError):
        TimeSeries(np.zeros(2), np.zeros(3))
