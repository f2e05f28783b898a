"""Quench dynamics, spectra and revival statistics from the sector blocks.

A product state with ``n0`` atoms in ``|0>`` and ``n1`` in ``|1>`` occupies
each sector ``(p, q)`` with ``lambda3 = 0`` and ``p >= |n0 - n1|`` with a
closed-form probability; inside a sector it is a single top-row basis state.
Each sector is diagonalized once and propagated exactly, so arbitrarily long
times cost the same as short ones.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NoRevivalError, ValidationError
from .hamiltonian import OBSERVABLES, DriveParams, build_block, build_observable, sector
from .irrep import Partition, enumerate_partitions, multiplicity
from .series import TimeSeries, check_grid

__all__ = [
    "InitialSpec",
    "BlockState",
    "RevivalResult",
    "ScalingFit",
    "initial_weights",
    "initial_block_states",
    "evolve_observables",
    "evolve_expectation",
    "default_time_step",
    "block_spectra",
    "full_spectrum",
    "max_rabi_enhancement",
    "detect_revival",
    "fit_sqrt_law",
    "find_revivals",
    "revival_scaling",
]

_CHUNK = 2048


@dataclass(frozen=True)
class InitialSpec:
    """``|0>^{n0} |1>^{n1}`` with no Rydberg excitation."""

    n0: int
    n1: int

    def __post_init__(self):
        if int(self.n0) != self.n0 or int(self.n1) != self.n1 or self.n0 < 0 or self.n1 < 0:
            raise ValidationError(f"occupations must be nonnegative integers, got ({self.n0}, {self.n1})")
        if self.n0 + self.n1 < 1:
            raise ValidationError("need at least one atom")

    @property
    def n(self) -> int:
        return self.n0 + self.n1

    @classmethod
    def family(cls, name: str, n: int) -> "InitialSpec":
        """Named initial states: ``all0``, ``all1`` and ``half`` (n0 = n // 2)."""
        if name == "all0":
            return cls(n, 0)
        if name == "all1":
            return cls(0, n)
        if name == "half":
            return cls(n // 2, n - n // 2)
        raise ValidationError(f"unknown initial-state family {name!r}")


@dataclass(frozen=True)
class BlockState:
    partition: Partition
    weight: float
    amplitudes: np.ndarray


@dataclass(frozen=True)
class RevivalResult:
    detected: bool
    time: float = math.nan
    strength: float = math.nan


@dataclass(frozen=True)
class ScalingFit:
    a: float
    b: float
    r2: float
    n: np.ndarray
    t_rev: np.ndarray
    strength: np.ndarray
    residuals: np.ndarray


def _weight_fraction(p: int, q: int, n0: int, n1: int) -> Fraction:
    return Fraction((p + 1) * math.factorial(n0) * math.factorial(n1),
                    math.factorial(q) * math.factorial(p + q + 1))


def initial_weights(spec: InitialSpec, n: int | None = None) -> list[tuple[Partition, float]]:
    """Sector probabilities of the product state, ascending ``p``.

    Evaluated exactly with integer factorials before rounding to float, so no
    overflow occurs at any ``n``.  Entries that round to zero are omitted.
    """
    if n is not None and n != spec.n:
        raise ValidationError(f"n0 + n1 = {spec.n} does not match n = {n}")
    n = spec.n
    out = []
    for p in range(abs(spec.n0 - spec.n1), n + 1, 2):
        q = (n - p) // 2
        w = float(_weight_fraction(p, q, spec.n0, spec.n1))
        if w > 0.0:
            out.append((Partition.from_pq(p, q), w))
    return out


def initial_block_states(spec: InitialSpec, min_weight: float = 0.0) -> list[BlockState]:
    out = []
    for lam, w in initial_weights(spec):
        if w < min_weight:
            continue
        basis = sector(lam).basis
        amp = np.zeros(basis.dim, dtype=complex)
        amp[basis.find_row0(spec.n0, spec.n1)] = 1.0
        amp.setflags(write=False)
        out.append(BlockState(lam, w, amp))
    return out


def default_time_step(n: int, omega: float = 1.0) -> float:
    """Resolves the sqrt(n)-enhanced Rabi oscillation with ~60 samples per period."""
    return 0.1 / (abs(omega) * math.sqrt(n))


def _block_expectations(state: BlockState, drive: DriveParams, diags: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``<A_k(t)>`` inside one sector for each row of ``diags`` (unweighted)."""
    H = build_block(state.partition, drive).matrix
    if drive.is_real:
        E, V = np.linalg.eigh(H.real)
    else:
        E, V = np.linalg.eigh(H)
    c = V.conj().T @ state.amplitudes
    rows = np.flatnonzero(np.any(diags != 0, axis=0))
    out = np.zeros((diags.shape[0], t.size))
    if rows.size == 0:
        return out
    B = V[rows] * c[None, :]
    A = diags[:, rows]
    real = not np.iscomplexobj(B) or not np.any(B.imag)
    if real:
        B = np.ascontiguousarray(B.real)
    for start in range(0, t.size, _CHUNK):
        phase = np.outer(E, t[start:start + _CHUNK])
        if real:
            # two real products are cheaper than one complex product
            prob = (B @ np.cos(phase)) ** 2 + (B @ np.sin(phase)) ** 2
        else:
            psi = B @ np.exp(-1j * phase)
            prob = psi.real ** 2 + psi.imag ** 2
        out[:, start:start + _CHUNK] = A @ prob
    return out


def evolve_observables(spec: InitialSpec, drive: DriveParams, observables: Sequence[str], times,
                       *, n_jobs: int = 1, min_weight: float = 0.0) -> dict[str, TimeSeries]:
    """Expectation values of several number operators after a quench.

    Sectors may be propagated on ``n_jobs`` threads; contributions are always
    summed in ascending ``p`` so the result does not depend on ``n_jobs``.
    Sectors with weight below ``min_weight`` are skipped (their total weight
    bounds the error).
    """
    t = check_grid(times)
    for name in observables:
        if name not in OBSERVABLES:
            raise ValidationError(f"unknown observable {name!r}; expected one of {OBSERVABLES}")
    states = initial_block_states(spec, min_weight)

    def work(state: BlockState) -> np.ndarray:
        diags = np.array([build_observable(state.partition, o).matrix.diagonal() for o in observables])
        return _block_expectations(state, drive, diags, t)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(work, states))
    else:
        parts = [work(s) for s in states]
    total = np.zeros((len(observables), t.size))
    for state, part in zip(states, parts):
        total += state.weight * part
    return {o: TimeSeries(t, total[i]) for i, o in enumerate(observables)}


def evolve_expectation(spec: InitialSpec, drive: DriveParams, observable: str, times,
                       *, n_jobs: int = 1, min_weight: float = 0.0) -> TimeSeries:
    return evolve_observables(spec, drive, [observable], times, n_jobs=n_jobs, min_weight=min_weight)[observable]


def block_spectra(n: int, drive: DriveParams, *, n_jobs: int = 1) -> dict[Partition, np.ndarray]:
    """Eigenvalues of every blockade-relevant sector block."""
    sectors = enumerate_partitions(n, blockade_only=True)

    def eig(lam: Partition) -> np.ndarray:
        H = build_block(lam, drive).matrix
        return np.linalg.eigvalsh(H.real if drive.is_real else H)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            vals = list(pool.map(eig, sectors))
    else:
        vals = [eig(lam) for lam in sectors]
    return dict(zip(sectors, vals))


def full_spectrum(n: int, drive: DriveParams, *, n_jobs: int = 1) -> list[tuple[float, int]]:
    """``(eigenvalue, multiplicity)`` for every sector eigenvalue.

    Counting multiplicities the list covers all ``2**n + n * 2**(n-1)``
    blockaded states.
    """
    out = []
    for lam, vals in block_spectra(n, drive, n_jobs=n_jobs).items():
        mu = multiplicity(lam)
        out.extend((float(e), mu) for e in vals)
    return out


def max_rabi_enhancement(lam: Partition) -> float:
    """Largest collective enhancement of the ``1 <-> r`` Rabi frequency in a sector.

    Equals the norm of ``U-`` applied to the top-row state with the most
    atoms in ``|1>``.  Only sectors with ``lambda3 = 0`` couple to the
    Rydberg drive.
    """
    if lam.lambda3 != 0:
        raise ValidationError(f"sector {lam} has no Rydberg coupling under blockade")
    return math.sqrt((lam.n + lam.p) / 2)


def detect_revival(series: TimeSeries, *, jump_factor: float = 2.0, t_exclude: float = 5.0) -> RevivalResult:
    """Locate the first revival by sorting samples by value.

    Samples with ``t < t_exclude`` are ignored.  Walking down the samples in
    order of decreasing value, the first one whose time exceeds
    ``jump_factor`` times the latest time seen so far (initially
    ``t_exclude``) marks the revival peak.
    """
    t = np.asarray(series.times, dtype=float)
    v = np.asarray(series.values, dtype=float)
    keep = t >= t_exclude
    t, v = t[keep], v[keep]
    if t.size == 0:
        return RevivalResult(False)
    order = np.argsort(-v, kind="stable")
    latest = t_exclude if t_exclude > 0 else t[order[0]]
    for i in order:
        if t[i] > jump_factor * latest:
            return RevivalResult(True, float(t[i]), float(v[i]))
        latest = max(latest, t[i])
    return RevivalResult(False)


def fit_sqrt_law(n, t_rev) -> tuple[float, float, float, np.ndarray]:
    """Least-squares ``t_rev = a sqrt(n) + b``; returns ``(a, b, R^2, residuals)``."""
    x = np.sqrt(np.asarray(n, dtype=float))
    y = np.asarray(t_rev, dtype=float)
    A = np.column_stack([x, np.ones_like(x)])
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (a * x + b)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(a), float(b), r2, resid


def _scan_grid(n: int, t_max, dt) -> np.ndarray:
    tm = t_max(n) if callable(t_max) else (t_max or 20.0 * math.sqrt(n) + 20.0)
    step = dt(n) if callable(dt) else (dt or default_time_step(n))
    return step * np.arange(int(math.floor(tm / step + 1e-9)) + 1)


def find_revivals(n_list: Iterable[int], spec_family: str | Callable[[int], InitialSpec],
                  drive: DriveParams, *, t_max: Callable[[int], float] | float | None = None,
                  dt: Callable[[int], float] | float | None = None, jump_factor: float = 2.0,
                  t_exclude: float = 5.0, min_weight: float = 1e-14, n_jobs: int = 1) -> list[RevivalResult]:
    """First revival of ``<nr>`` for each ``n``.

    ``t_max`` and ``dt`` may be numbers or functions of ``n``; by default the
    window is ``20 sqrt(n) + 20`` and the step :func:`default_time_step`.
    """
    make = (lambda n: InitialSpec.family(spec_family, n)) if isinstance(spec_family, str) else spec_family
    out = []
    for n in n_list:
        grid = _scan_grid(int(n), t_max, dt)
        series = evolve_expectation(make(int(n)), drive, "nr", grid, n_jobs=n_jobs, min_weight=min_weight)
        out.append(detect_revival(series, jump_factor=jump_factor, t_exclude=t_exclude))
    return out


def revival_scaling(n_list: Iterable[int], spec_family: str | Callable[[int], InitialSpec],
                    drive: DriveParams, **kwargs) -> ScalingFit:
    """:func:`find_revivals` followed by a fit of ``t_rev = a sqrt(n) + b``.

    Raises :class:`NoRevivalError` when any size shows no revival.
    """
    ns = [int(n) for n in n_list]
    if len(ns) < 4:
        raise ValidationError("revival scaling needs at least 4 system sizes")
    results = find_revivals(ns, spec_family, drive, **kwargs)
    for n, res in zip(ns, results):
        if not res.detected:
            raise NoRevivalError(f"no revival detected for n = {n}")
    times = [r.time for r in results]
    a, b, r2, resid = fit_sqrt_law(ns, times)
    return ScalingFit(a, b, r2, np.array(ns), np.array(times), np.array([r.strength for r in results]), resid)
