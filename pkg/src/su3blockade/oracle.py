"""Brute-force reference in the full blockaded tensor-product space.

Only meant for small ``n``: the blockaded space has ``2**n + n * 2**(n-1)``
states.  Every block-level result in the package is checked against this.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, ValidationError
from .hamiltonian import OBSERVABLES, DriveParams
from .irrep import Partition
from .series import TimeSeries, check_grid

__all__ = [
    "MAX_ATOMS",
    "MAX_DENSE_DIM",
    "TensorBasis",
    "tensor_basis",
    "build_full_hamiltonian",
    "number_operator",
    "product_state",
    "dicke_state",
    "oracle_spectrum",
    "oracle_evolve",
    "evolve_state",
    "project_irrep_weight",
    "permutation_matrix",
]

MAX_ATOMS = 12
MAX_DENSE_DIM = 6200
MAX_PROJECT_ATOMS = 10
_LEVELS = "01r"


@dataclass(frozen=True)
class TensorBasis:
    """Product states with at most one ``r``, lexicographic with ``0 < 1 < r``."""

    n: int
    levels: np.ndarray  # (dim, n) entries 0, 1, 2
    _lookup: dict = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.levels.shape[0]

    @property
    def states(self) -> list[str]:
        return ["".join(_LEVELS[v] for v in row) for row in self.levels]

    def index(self, state: str | tuple) -> int:
        key = tuple(_LEVELS.index(c) for c in state) if isinstance(state, str) else tuple(state)
        try:
            return self._lookup[key]
        except KeyError:
            raise ValidationError(f"state {state!r} not in blockaded basis") from None


def _check_capacity(n: int, cap: int = MAX_ATOMS) -> None:
    if int(n) != n or n < 1:
        raise ValidationError(f"atom count must be a positive integer, got {n!r}")
    if n > cap:
        raise CapacityError(f"oracle limited to n <= {cap}, got n = {n}")


@lru_cache(maxsize=16)
def tensor_basis(n: int) -> TensorBasis:
    _check_capacity(n)
    rows = [s for s in itertools.product(range(3), repeat=n) if s.count(2) <= 1]
    levels = np.array(rows, dtype=np.int8).reshape(len(rows), n)
    return TensorBasis(n, levels, {s: i for i, s in enumerate(rows)})


def build_full_hamiltonian(n: int, drive: DriveParams, *, omega_eff: complex = 0.0,
                           sparse: bool = False, basis: TensorBasis | None = None):
    """Lab-frame Hamiltonian on the blockaded tensor basis.

    ``omega_eff`` adds a direct ``0 <-> r`` drive, used only to cross-check
    effective pulses.  Transitions that would create a second ``r`` are
    simply absent from the basis.
    """
    basis = basis or tensor_basis(n)
    lv = basis.levels
    dim = basis.dim
    n1 = (lv == 1).sum(axis=1)
    nr = (lv == 2).sum(axis=1)
    diag = -drive.delta1 * n1 - (drive.delta1 + drive.delta2) * nr

    rows, cols, vals = [], [], []
    couplings = ((0, 1, drive.omega1), (1, 2, drive.omega2), (0, 2, complex(omega_eff)))
    for i, state in enumerate(lv):
        has_r = bool(nr[i])
        for a in range(n):
            for lo, hi, w in couplings:
                if w == 0 or state[a] != lo or (hi == 2 and has_r):
                    continue
                new = state.copy()
                new[a] = hi
                j = basis._lookup[tuple(int(x) for x in new)]
                # (w |hi><lo| + h.c.)/2
                rows += [j, i]
                cols += [i, j]
                vals += [w / 2, np.conj(w) / 2]
    H = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex).tocsr()
    H = H + sp.diags(diag.astype(complex))
    if sparse:
        return H.tocsr()
    return H.toarray()


def number_operator(n: int, which: str, basis: TensorBasis | None = None) -> np.ndarray:
    """Diagonal of ``n0``, ``n1`` or ``nr`` on the tensor basis."""
    if which not in OBSERVABLES:
        raise ValidationError(f"unknown observable {which!r}")
    basis = basis or tensor_basis(n)
    return (basis.levels == OBSERVABLES.index(which)).sum(axis=1).astype(float)


def product_state(n: int, n0: int, n1: int, basis: TensorBasis | None = None) -> np.ndarray:
    """``|0>^{n0} |1>^{n1}`` (atoms in |0> first)."""
    if n0 + n1 != n or min(n0, n1) < 0:
        raise ValidationError(f"need n0 + n1 = n with n0, n1 >= 0, got ({n0}, {n1}) for n = {n}")
    basis = basis or tensor_basis(n)
    psi = np.zeros(basis.dim, dtype=complex)
    psi[basis.index("0" * n0 + "1" * n1)] = 1.0
    return psi


def dicke_state(n: int, n1: int, basis: TensorBasis | None = None) -> np.ndarray:
    """Normalized symmetric superposition with ``n1`` atoms in ``|1>``, rest in ``|0>``."""
    basis = basis or tensor_basis(n)
    mask = ((basis.levels == 2).sum(axis=1) == 0) & ((basis.levels == 1).sum(axis=1) == n1)
    psi = mask.astype(complex)
    return psi / np.linalg.norm(psi)


def _dense(H) -> np.ndarray:
    if H.shape[0] > MAX_DENSE_DIM:
        raise CapacityError(f"dense diagonalization limited to dim <= {MAX_DENSE_DIM}, got {H.shape[0]}")
    return H.toarray() if sp.issparse(H) else np.asarray(H)


def oracle_spectrum(n: int, drive: DriveParams) -> np.ndarray:
    """Sorted eigenvalues of the full blockaded Hamiltonian."""
    _check_capacity(n)
    H = build_full_hamiltonian(n, drive, sparse=True)
    return np.linalg.eigvalsh(_dense(H))


def evolve_state(H, psi0: np.ndarray, times) -> np.ndarray:
    """States ``exp(-i H t) psi0`` as rows, via one eigendecomposition."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    E, V = np.linalg.eigh(_dense(H))
    c = V.conj().T @ psi0
    return (V @ (np.exp(-1j * np.outer(E, t)) * c[:, None])).T


def oracle_evolve(psi0: np.ndarray, n: int, drive: DriveParams, observable: str, times) -> TimeSeries:
    """Exact expectation of a number operator along the trajectory of ``psi0``."""
    _check_capacity(n)
    t = check_grid(times)
    basis = tensor_basis(n)
    if psi0.shape != (basis.dim,):
        raise ValidationError(f"initial state must have length {basis.dim}")
    H = build_full_hamiltonian(n, drive, sparse=True, basis=basis)
    a = number_operator(n, observable, basis)
    states = evolve_state(H, psi0, t)
    return TimeSeries(t, (np.abs(states) ** 2) @ a)


@lru_cache(maxsize=16)
def _spin_eigensystem(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(_total_spin_squared(n))


def _total_spin_squared(n: int) -> np.ndarray:
    """``T^2`` on the ``{0,1}^n`` subspace, bit ``a`` set meaning atom ``a`` in |1>."""
    dim = 2 ** n
    idx = np.arange(dim)
    ones = np.array([bin(i).count("1") for i in idx])
    tz = (n - 2 * ones) / 2
    T2 = np.diag(tz ** 2 - tz)  # T+T- = T^2 - Tz^2 + Tz
    # T+ T-: T- flips a 0 -> 1, T+ flips a 1 -> 0
    for i in idx:
        for a in range(n):
            if i >> a & 1:
                continue
            mid = i | (1 << a)
            for b in range(n):
                if mid >> b & 1:
                    T2[mid & ~(1 << b), i] += 1.0
    return T2


def project_irrep_weight(psi: np.ndarray, n: int, lam: Partition, *, tol: float = 1e-12) -> float:
    """Squared norm of ``psi`` projected on the ``t = p/2`` eigenspace of ``T^2``.

    ``psi`` lives on the tensor basis and must have no Rydberg amplitude.
    """
    _check_capacity(n, MAX_PROJECT_ATOMS)
    if lam.n != n:
        raise ValidationError(f"partition {lam} does not partition n = {n}")
    basis = tensor_basis(n)
    lv = basis.levels
    has_r = (lv == 2).any(axis=1)
    if np.max(np.abs(psi[has_r]), initial=0.0) > tol:
        raise ValidationError("state has nonzero Rydberg amplitude")
    # bit a of the reduced index <=> atom a in |1>
    reduced = np.zeros(2 ** n, dtype=complex)
    bits = (lv[~has_r] == 1).astype(np.int64) @ (1 << np.arange(n, dtype=np.int64))
    reduced[bits] = psi[~has_r]
    if lam.lambda3 != 0:
        return 0.0
    t = lam.p / 2
    w, V = _spin_eigensystem(n)
    sel = np.abs(w - t * (t + 1)) < 1e-8
    amp = V[:, sel].T @ reduced
    return float(np.vdot(amp, amp).real)


def permutation_matrix(basis: TensorBasis, perm) -> sp.csr_matrix:
    """Operator relabelling atom ``a`` as ``perm[a]``."""
    perm = list(perm)
    dim = basis.dim
    cols = np.arange(dim)
    rows = np.empty(dim, dtype=int)
    for i, state in enumerate(basis.levels):
        new = np.empty_like(state)
        new[perm] = state
        rows[i] = basis._lookup[tuple(int(x) for x in new)]
    return sp.csr_matrix((np.ones(dim), (rows, cols)), shape=(dim, dim))
