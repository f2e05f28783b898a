"""Irreducible SU(3) sectors of n three-level atoms under full Rydberg blockade.

A sector is labelled by a partition ``lambda = (l1, l2, l3)`` of ``n`` with
``p = l1 - l2`` and ``q = l2 - l3``.  Only sectors with ``l3 <= 1`` contain
states with at most one Rydberg excitation; of those we keep the top one or
two rows of the weight diagram.

Basis states are labelled ``|r; t, m_t>`` where ``r`` is the row index
(``nr = r + l3``), ``t`` is the total T-spin and ``m_t`` its z-projection.
Half-integers are stored doubled (``two_t``, ``two_mt``) so labels stay exact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import ValidationError

__all__ = [
    "Partition",
    "BasisLabel",
    "IrrepBasis",
    "CollectiveOps",
    "enumerate_partitions",
    "multiplicity",
    "su3_dimension",
    "blockaded_dimension",
    "build_basis",
    "collective_operators",
    "dump_block",
]


@dataclass(frozen=True, order=True)
class Partition:
    """Three-row Young diagram ``(lambda1, lambda2, lambda3)``."""

    lambda1: int
    lambda2: int
    lambda3: int

    def __post_init__(self):
        parts = (self.lambda1, self.lambda2, self.lambda3)
        if any(int(x) != x for x in parts):
            raise ValidationError(f"partition entries must be integers, got {parts}")
        if not self.lambda1 >= self.lambda2 >= self.lambda3 >= 0:
            raise ValidationError(f"partition must satisfy l1 >= l2 >= l3 >= 0, got {parts}")

    @classmethod
    def from_pq(cls, p: int, q: int, lambda3: int = 0) -> "Partition":
        return cls(p + q + lambda3, q + lambda3, lambda3)

    @property
    def n(self) -> int:
        return self.lambda1 + self.lambda2 + self.lambda3

    @property
    def p(self) -> int:
        return self.lambda1 - self.lambda2

    @property
    def q(self) -> int:
        return self.lambda2 - self.lambda3

    @property
    def pq(self) -> tuple[int, int]:
        return self.p, self.q

    def as_tuple(self) -> tuple[int, int, int]:
        return self.lambda1, self.lambda2, self.lambda3

    def __str__(self):
        return f"({self.lambda1},{self.lambda2},{self.lambda3})"


def enumerate_partitions(n: int, blockade_only: bool = False) -> list[Partition]:
    """All partitions of ``n`` into three ordered parts, descending-lexicographic.

    With ``blockade_only`` the sectors with ``lambda3 >= 2`` are dropped, since
    every state in them carries at least two Rydberg excitations.
    """
    if int(n) != n or n < 1:
        raise ValidationError(f"atom count must be a positive integer, got {n!r}")
    n = int(n)
    out = []
    for l1 in range(n, -1, -1):
        for l2 in range(min(l1, n - l1), -1, -1):
            l3 = n - l1 - l2
            if l3 > l2:
                continue
            if blockade_only and l3 > 1:
                continue
            out.append(Partition(l1, l2, l3))
    return out


def multiplicity(lam: Partition) -> int:
    """Number of copies of the sector (hook-length formula), exact integer."""
    p, q = lam.p, lam.q
    num = math.factorial(lam.n) * (p + q + 2) * (p + 1) * (q + 1)
    den = math.factorial(lam.lambda1 + 2) * math.factorial(lam.lambda2 + 1) * math.factorial(lam.lambda3)
    mu, rem = divmod(num, den)
    if rem:
        raise ArithmeticError(f"hook formula not integral for {lam}")
    return mu


def su3_dimension(lam: Partition) -> int:
    """Full (unblockaded) dimension ``(p+1)(q+1)(p+q+2)/2``."""
    p, q = lam.p, lam.q
    return (p + 1) * (q + 1) * (p + q + 2) // 2


def blockaded_dimension(lam: Partition) -> int:
    """Number of sector states with at most one Rydberg excitation."""
    p, q = lam.p, lam.q
    if lam.lambda3 == 0:
        return 3 * (p + 1) - (p + 2) * (q == 0)
    if lam.lambda3 == 1:
        return p + 1
    return 0


@dataclass(frozen=True)
class BasisLabel:
    r: int
    two_t: int
    two_mt: int
    n0: int
    n1: int
    nr: int

    @property
    def t(self) -> float:
        return self.two_t / 2

    @property
    def m_t(self) -> float:
        return self.two_mt / 2

    @property
    def key(self) -> tuple[int, int, int]:
        return self.r, self.two_t, self.two_mt

    def to_dict(self) -> dict:
        return {"r": self.r, "t": self.t, "m_t": self.m_t, "n0": self.n0, "n1": self.n1, "nr": self.nr}


@dataclass(frozen=True)
class IrrepBasis:
    partition: Partition
    states: tuple[BasisLabel, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {s.key: i for i, s in enumerate(self.states)}
        if len(index) != len(self.states):
            raise ValidationError("duplicate basis labels")
        object.__setattr__(self, "_index", index)

    @property
    def dim(self) -> int:
        return len(self.states)

    def __len__(self):
        return len(self.states)

    def __iter__(self) -> Iterator[BasisLabel]:
        return iter(self.states)

    def index(self, r: int, two_t: int, two_mt: int) -> int | None:
        return self._index.get((r, two_t, two_mt))

    def row_indices(self, r: int) -> np.ndarray:
        return np.array([i for i, s in enumerate(self.states) if s.r == r], dtype=int)

    def occupations(self) -> np.ndarray:
        """``(dim, 3)`` integer array of ``(n0, n1, nr)`` per state."""
        return np.array([(s.n0, s.n1, s.nr) for s in self.states], dtype=int)

    def find_row0(self, n0: int, n1: int) -> int:
        """Index of the top-row state with the given occupations."""
        for i, s in enumerate(self.states):
            if s.r == 0 and s.n0 == n0 and s.n1 == n1:
                return i
        raise ValidationError(f"no top-row state with (n0, n1) = ({n0}, {n1}) in sector {self.partition}")


def _label(lam: Partition, r: int, two_t: int, two_mt: int) -> BasisLabel:
    # number operators from the T^z, U^z, V^z eigenvalues:
    #   4 U^z = p + 2q - 3r - 2 m_t,  4 V^z = p + 2q - 3r + 2 m_t
    #   3 n0 = n + 2 T^z + 2 V^z,  3 n1 = n - 2 T^z + 2 U^z,  3 nr = n - 2 U^z - 2 V^z
    n, p, q = lam.n, lam.p, lam.q
    base = p + 2 * q - 3 * r
    six_n0 = 2 * n + 2 * two_mt + base + two_mt
    six_n1 = 2 * n - 2 * two_mt + base - two_mt
    three_nr = n - base
    if six_n0 % 6 or six_n1 % 6 or three_nr % 3:
        raise ArithmeticError(f"non-integral occupations for {lam} label {(r, two_t, two_mt)}")
    n0, n1, nr = six_n0 // 6, six_n1 // 6, three_nr // 3
    if min(n0, n1) < 0 or n0 + n1 + nr != n:
        raise ArithmeticError(f"inconsistent occupations {(n0, n1, nr)} for {lam}")
    return BasisLabel(r, two_t, two_mt, n0, n1, nr)


def _row_spins(lam: Partition, r: int) -> list[int]:
    """Doubled T-spins present in row ``r`` (0 or 1), canonical order."""
    p, q = lam.p, lam.q
    if r == 0:
        return [p]
    spins = []
    if q > 0:
        spins.append(p + 1)
    if p > 0:
        spins.append(p - 1)
    return spins


def build_basis(lam: Partition) -> IrrepBasis:
    """Canonically ordered blockade-restricted basis of one sector.

    Order: top row with ``m_t`` descending, then the second row's
    ``t = (p+1)/2`` multiplet and its ``t = (p-1)/2`` multiplet, each with
    ``m_t`` descending.  Sectors with ``lambda3 = 1`` keep the top row only.
    """
    if lam.lambda3 >= 2:
        raise ValidationError(f"sector {lam} has no states with at most one Rydberg excitation")
    rows = [0] if lam.lambda3 == 1 else [0, 1]
    states = []
    for r in rows:
        for two_t in _row_spins(lam, r):
            for two_mt in range(two_t, -two_t - 1, -2):
                states.append(_label(lam, r, two_t, two_mt))
    basis = IrrepBasis(lam, tuple(states))
    if basis.dim != blockaded_dimension(lam):
        raise ArithmeticError(f"basis size {basis.dim} != d_lambda {blockaded_dimension(lam)} for {lam}")
    return basis


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CollectiveOps:
    """Collective operators restricted to one sector's blockaded basis (real, dense)."""

    basis: IrrepBasis
    T_plus: np.ndarray
    T_minus: np.ndarray
    T_z: np.ndarray
    U_plus: np.ndarray
    U_minus: np.ndarray
    U_z: np.ndarray
    V_plus: np.ndarray
    V_minus: np.ndarray
    V_z: np.ndarray

    def as_dict(self) -> dict[str, np.ndarray]:
        names = ("T_plus", "T_minus", "T_z", "U_plus", "U_minus", "U_z", "V_plus", "V_minus", "V_z")
        return {k: getattr(self, k) for k in names}


def collective_operators(basis: IrrepBasis) -> CollectiveOps:
    """Matrix elements of T, U, V on a blockaded sector basis.

    T-ladders follow standard spin rules inside each multiplet.  The U- and V-
    lowering elements from the top row (index ``k = p/2 - m_t``) use the
    closed forms below; raising operators are the transposes (all elements are
    real).  The minus sign in V- is kept as is.
    """
    lam = basis.partition
    p, q = lam.p, lam.q
    d = basis.dim
    Tp = np.zeros((d, d))
    Um = np.zeros((d, d))
    Vm = np.zeros((d, d))

    for i, s in enumerate(basis.states):
        j = basis.index(s.r, s.two_t, s.two_mt + 2)
        if j is not None:
            tt, mm = s.two_t, s.two_mt
            Tp[j, i] = math.sqrt((tt * (tt + 2) - mm * (mm + 2)) / 4)

    if lam.lambda3 == 0:
        for i, s in enumerate(basis.states):
            if s.r != 0:
                continue
            k = (p - s.two_mt) // 2
            terms_u = (
                (p + 1, p + 1 - 2 * k, math.sqrt(q * (p - k + 1) / (p + 1))),
                (p - 1, p + 1 - 2 * k, math.sqrt(k * (p + q + 1) / (p + 1))),
            )
            terms_v = (
                (p + 1, p - 1 - 2 * k, -math.sqrt(q * (k + 1) / (p + 1))),
                (p - 1, p - 1 - 2 * k, math.sqrt((p - k) * (p + q + 1) / (p + 1))),
            )
            for mat, terms in ((Um, terms_u), (Vm, terms_v)):
                for two_t, two_mt, c in terms:
                    if c == 0.0:
                        continue
                    j = basis.index(1, two_t, two_mt)
                    if j is None:
                        raise ArithmeticError(f"missing target {(1, two_t, two_mt)} in {lam}")
                    mat[j, i] = c

    two_mt = np.array([s.two_mt for s in basis.states], dtype=float)
    rows = np.array([s.r for s in basis.states], dtype=float)
    Tz = np.diag(two_mt / 2)
    Uz = np.diag((p + 2 * q - 3 * rows - two_mt) / 4)
    Vz = np.diag((p + 2 * q - 3 * rows + two_mt) / 4)
    return CollectiveOps(
        basis=basis,
        T_plus=_frozen(Tp), T_minus=_frozen(Tp.T.copy()), T_z=_frozen(Tz),
        U_plus=_frozen(Um.T.copy()), U_minus=_frozen(Um), U_z=_frozen(Uz),
        V_plus=_frozen(Vm.T.copy()), V_minus=_frozen(Vm), V_z=_frozen(Vz),
    )


def dump_block(basis: IrrepBasis, matrix: np.ndarray) -> str:
    """JSON debug dump: partition, basis labels and row-major ``[re, im]`` pairs."""
    m = np.asarray(matrix, dtype=complex)
    payload = {
        "partition": list(basis.partition.as_tuple()),
        "basis": [s.to_dict() for s in basis.states],
        "operator": [[[float(z.real), float(z.imag)] for z in row] for row in m],
    }
    return json.dumps(payload)
