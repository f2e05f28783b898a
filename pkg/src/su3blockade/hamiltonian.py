"""Per-sector Hamiltonian and observable blocks.

Energies are in units of a reference Rabi frequency (hbar = 1).  Blocks follow
the lab-frame convention in which ``|0...0>`` has zero energy:

    H = -D1 * n1 - (D1 + D2) * nr + (W1 * T- + h.c.)/2 + P (W2 * U- + h.c.) P / 2
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .irrep import CollectiveOps, IrrepBasis, Partition, blockaded_dimension, build_basis, collective_operators

__all__ = ["DriveParams", "BlockOperator", "sector", "build_block", "build_observable", "OBSERVABLES"]

OBSERVABLES = ("n0", "n1", "nr")


@dataclass(frozen=True)
class DriveParams:
    """Constant drive: complex Rabi frequencies and real detunings."""

    omega1: complex = 0.0
    omega2: complex = 0.0
    delta1: float = 0.0
    delta2: float = 0.0

    def __post_init__(self):
        vals = (complex(self.omega1), complex(self.omega2), float(self.delta1), float(self.delta2))
        if not all(np.isfinite(v) for v in vals):
            raise ValidationError(f"drive parameters must be finite, got {vals}")
        object.__setattr__(self, "omega1", vals[0])
        object.__setattr__(self, "omega2", vals[1])
        object.__setattr__(self, "delta1", vals[2])
        object.__setattr__(self, "delta2", vals[3])

    @property
    def is_real(self) -> bool:
        return self.omega1.imag == 0 and self.omega2.imag == 0

    def to_dict(self) -> dict:
        def enc(z: complex):
            return z.real if z.imag == 0 else [z.real, z.imag]

        return {"omega1": enc(self.omega1), "omega2": enc(self.omega2),
                "delta1": self.delta1, "delta2": self.delta2}


@dataclass(frozen=True)
class BlockOperator:
    partition: Partition
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@lru_cache(maxsize=4096)
def sector(lam: Partition) -> CollectiveOps:
    """Cached basis + collective operators for a sector."""
    if blockaded_dimension(lam) == 0:
        raise ValidationError(f"sector {lam} is fully blockaded")
    return collective_operators(build_basis(lam))


def build_block(lam: Partition, drive: DriveParams) -> BlockOperator:
    """Hamiltonian block ``H_lambda`` for a constant drive."""
    ops = sector(lam)
    n = lam.n
    d1, d2 = drive.delta1, drive.delta2
    w1, w2 = drive.omega1, drive.omega2
    diag = (2 / 3) * (d1 * ops.T_z.diagonal() + d2 * ops.U_z.diagonal() + (d1 + d2) * ops.V_z.diagonal())
    diag = diag - (n / 3) * (2 * d1 + d2)
    H = np.diag(diag).astype(complex)
    H += 0.5 * (w1 * ops.T_minus + np.conj(w1) * ops.T_plus)
    H += 0.5 * (w2 * ops.U_minus + np.conj(w2) * ops.U_plus)
    H.setflags(write=False)
    return BlockOperator(lam, H)


def build_observable(lam: Partition, which: str) -> BlockOperator:
    """Diagonal block of ``n0``, ``n1`` or ``nr``."""
    if which not in OBSERVABLES:
        raise ValidationError(f"unknown observable {which!r}; expected one of {OBSERVABLES}")
    basis: IrrepBasis = sector(lam).basis
    col = OBSERVABLES.index(which)
    m = np.diag(basis.occupations()[:, col].astype(float))
    m.setflags(write=False)
    return BlockOperator(lam, m)


def hermiticity_defect(H: np.ndarray) -> float:
    """``max|H - H^dag| / max|H|`` (0 for the zero matrix)."""
    scale = np.max(np.abs(H)) if H.size else 0.0
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(H - H.conj().T)) / scale)

