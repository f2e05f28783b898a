"""Large-spin approximations of the symmetric ``(n, 0)`` sector.

Padding one row of the weight diagram with an unphysical state turns the two
blockaded rows into a spin ``s = n/2`` times a two-level system.

* ``|1>^n`` start, ``D2 = 0``: the two-level system splits into ``|+-> =
  (|0> +- |1>)/sqrt(2)``, each evolving under its own spin Hamiltonian; the
  overlap of the two spin states sets the envelope of ``<nr(t)>``.
* ``|0>^n`` start: the Rydberg drive flips the two-level system while
  raising the spin, so no such split exists and the full ``2(2s+1)``
  problem is evolved.

All matrices use the ``S^z`` eigenbasis with ``m`` descending from ``s``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .hamiltonian import DriveParams
from .series import TimeSeries, check_grid

__all__ = [
    "SpinModelConfig",
    "Envelope",
    "spin_operators",
    "build_sm_pm",
    "envelope",
    "coupling_weights",
    "build_sm0",
    "evolve_sm0",
]


@dataclass(frozen=True)
class SpinModelConfig:
    n: int
    drive: DriveParams
    times: np.ndarray

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"atom count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "times", check_grid(self.times))

    @property
    def s(self) -> float:
        return self.n / 2


@dataclass(frozen=True)
class Envelope:
    times: np.ndarray
    nr: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    overlap_abs: np.ndarray

    def to_csv(self, path) -> None:
        from .series import write_csv

        write_csv(path, ["t", "lower", "upper", "overlap_abs"],
                  [self.times, self.lower, self.upper, self.overlap_abs])


def spin_operators(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(S^+, S^x, S^z)`` for spin ``n/2``, basis ``m = s, s-1, ..., -s``."""
    s = n / 2
    m = s - np.arange(n + 1)
    Sp = np.zeros((n + 1, n + 1))
    # S^+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>, and |m+1> sits one index earlier
    Sp[np.arange(n), np.arange(1, n + 1)] = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))
    Sx = (Sp + Sp.T) / 2
    return Sp, Sx, np.diag(m)


def build_sm_pm(n: int, drive: DriveParams) -> tuple[np.ndarray, np.ndarray]:
    """``H^(+-) = W1 S^x + D1 S^z +- (W2 / 2) sqrt(s - S^z)`` (real drives, ``D2 = 0``)."""
    if drive.delta2 != 0:
        raise ValidationError("the +- spin model requires delta2 = 0")
    if not drive.is_real:
        raise ValidationError("the +- spin model assumes real Rabi frequencies")
    w1, w2 = drive.omega1.real, drive.omega2.real
    _, Sx, Sz = spin_operators(n)
    root = np.diag(np.sqrt(n / 2 - Sz.diagonal()))  # operand is diagonal, entries 0..2s
    base = w1 * Sx + drive.delta1 * Sz
    return base + 0.5 * w2 * root, base - 0.5 * w2 * root


def _propagate(H: np.ndarray, psi0: np.ndarray, t: np.ndarray) -> np.ndarray:
    E, V = np.linalg.eigh(H)
    c = V.conj().T @ psi0
    return V @ (np.exp(-1j * np.outer(E, t)) * c[:, None])  # (dim, len(t))


def envelope(config: SpinModelConfig) -> Envelope:
    """Spin-model ``<nr(t)>`` and its envelope for the ``|1>^n`` quench.

    With unit-norm spin states ``phi+-`` started in ``m = -s``, ``<nr> =
    (1 - Re<phi+|phi->)/2`` and the envelope is ``(1 -+ |<phi+|phi->|)/2``.
    """
    Hp, Hm = build_sm_pm(config.n, config.drive)
    psi0 = np.zeros(config.n + 1, dtype=complex)
    psi0[-1] = 1.0
    phi_p = _propagate(Hp, psi0, config.times)
    phi_m = _propagate(Hm, psi0, config.times)
    ov = np.einsum("it,it->t", phi_p.conj(), phi_m)
    mag = np.abs(ov)
    return Envelope(config.times, 0.5 * (1 - ov.real), 0.5 * (1 - mag), 0.5 * (1 + mag), mag)


def coupling_weights(n: int) -> np.ndarray:
    """Diagonal of ``M``: zero at ``m = s``, else ``sqrt((s-m) / (s(s+1) - m(m+1)))``."""
    s = n / 2
    m = s - np.arange(n + 1)
    out = np.zeros(n + 1)
    inner = m < s
    out[inner] = np.sqrt((s - m[inner]) / (s * (s + 1) - m[inner] * (m[inner] + 1)))
    return out


def build_sm0(n: int, drive: DriveParams) -> np.ndarray:
    """Spin model for the ``|0>^n`` start, basis ``|m> (x) |sigma>`` with sigma = (up, down).

    ``H = (W1 S^x + D1 S^z) (x) 1 + (D1 + D2)/2 1 (x) sz + (W2/2) S^+ M (x) s- + h.c.``
    where ``up`` carries no Rydberg excitation.
    """
    Sp, Sx, Sz = spin_operators(n)
    sz = np.diag([1.0, -1.0])
    s_minus = np.array([[0.0, 0.0], [1.0, 0.0]])  # |down><up|
    w1, w2 = drive.omega1, drive.omega2
    # complex W1 generalizes W1 S^x to (W1 S^- + W1* S^+)/2, matching the sector blocks
    spin_part = 0.5 * (w1 * Sp.T + np.conj(w1) * Sp) + drive.delta1 * Sz
    H = np.kron(spin_part, np.eye(2)).astype(complex)
    H += 0.5 * (drive.delta1 + drive.delta2) * np.kron(np.eye(n + 1), sz)
    flip = 0.5 * w2 * np.kron(Sp @ np.diag(coupling_weights(n)), s_minus)
    H += flip + flip.conj().T
    return H


def evolve_sm0(config: SpinModelConfig) -> TimeSeries:
    """``<nr(t)>`` under the ``|0>^n`` spin model, started in ``|m = s> (x) |up>``."""
    H = build_sm0(config.n, config.drive)
    psi0 = np.zeros(H.shape[0], dtype=complex)
    psi0[0] = 1.0
    psi = _propagate(H, psi0, config.times)
    nr = np.kron(np.ones(config.n + 1), [0.0, 1.0])
    return TimeSeries(config.times, nr @ (np.abs(psi) ** 2))
