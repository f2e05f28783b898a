"""Pulse schedules preparing permutation-invariant states from ``|0>^n``.

Inside the symmetric ``(n, 0)`` sector the blockaded states form a zigzag
chain, left to right::

    top k=n -U- bottom n-1 -V- top k=n-1 -U- ... -U- bottom 0 -V- top k=0

where top-row node ``k`` is the Dicke state with ``k`` atoms in ``|1>`` and
bottom-row node ``j`` holds one Rydberg excitation and ``j`` atoms in ``|1>``.
A ``1 <-> r`` pulse (U) couples top ``k`` to bottom ``k - 1`` with
strength ``sqrt(k)``; an effective ``0 <-> r`` pulse (V) couples top ``k`` to
bottom ``k`` with ``sqrt(n - k)``.  Every pulse therefore acts on disjoint
two-level pairs.  Starting from the target, alternating U and V pulses each
empty the leftmost occupied node into its right neighbour; after ``2n``
pulses everything sits on ``|0>^n``, and the inverted, reversed sequence
prepares the target.

Pulse Hamiltonian on one pair, bottom node ``b``, top node ``a``::

    H = (|W| k / 2) (e^{i phase} |b><a| + e^{-i phase} |a><b|)
"""
from __future__ import annotations

import cmath
import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import NumericalError, ValidationError
from .hamiltonian import sector
from .irrep import Partition

__all__ = [
    "HYPERFINE",
    "RYDBERG",
    "EFFECTIVE",
    "Pulse",
    "PulseSchedule",
    "PreparedState",
    "LeakageWarning",
    "symmetric_target",
    "ghz_target",
    "w_target",
    "two_level_pulse",
    "synthesize_sequence",
    "physical_schedule",
    "apply_schedule",
    "fidelity",
    "pulse_generator",
    "schedule_table",
]

HYPERFINE = "hyperfine"   # 0 <-> 1
RYDBERG = "rydberg"       # 1 <-> r
EFFECTIVE = "effective"   # 0 <-> r, realized as pi(0-1) . pulse(1-r) . pi(0-1)^-1
TRANSITIONS = (HYPERFINE, RYDBERG, EFFECTIVE)

_ZERO_AMP = 1e-13
_TWO_PI = 2 * math.pi


class LeakageWarning(UserWarning):
    """Population left outside the top row after applying a schedule."""


@dataclass(frozen=True)
class Pulse:
    transition: str
    rabi_magnitude: float
    phase: float
    detuning: float
    duration: float

    def __post_init__(self):
        if self.transition not in TRANSITIONS:
            raise ValidationError(f"unknown transition {self.transition!r}")
        if self.duration < 0 or self.rabi_magnitude < 0:
            raise ValidationError("pulse duration and Rabi magnitude must be nonnegative")

    @property
    def area(self) -> float:
        """``|W| t / pi``."""
        return self.rabi_magnitude * self.duration / math.pi

    def inverse(self) -> "Pulse":
        """Same duration, phase shifted by pi (exact inverse for resonant pulses)."""
        return Pulse(self.transition, self.rabi_magnitude, (self.phase + math.pi) % _TWO_PI,
                     self.detuning, self.duration)


@dataclass(frozen=True)
class PulseSchedule:
    pulses: tuple[Pulse, ...]
    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in ("effective", "physical"):
            raise ValidationError(f"schedule kind must be 'effective' or 'physical', got {self.kind!r}")
        if self.kind == "physical" and any(p.transition == EFFECTIVE for p in self.pulses):
            raise ValidationError("physical schedules cannot contain effective pulses")

    def __len__(self):
        return len(self.pulses)

    def pruned(self) -> "PulseSchedule":
        return PulseSchedule(tuple(p for p in self.pulses if p.duration > 0), self.kind, self.n)

    def to_dict(self) -> dict:
        return {"n": self.n, "kind": self.kind, "pulses": [asdict(p) for p in self.pulses]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "PulseSchedule":
        return cls(tuple(Pulse(**p) for p in data["pulses"]), data["kind"], int(data["n"]))


@dataclass(frozen=True)
class PreparedState:
    amplitudes: np.ndarray   # top row, index = number of atoms in |1>
    leakage: float           # population left in the bottom row
    block_state: np.ndarray = field(repr=False)


def symmetric_target(amplitudes, *, tol: float = 1e-12) -> np.ndarray:
    """Validate Dicke-basis amplitudes, index ``k`` = atoms in ``|1>``."""
    a = np.asarray(amplitudes, dtype=complex)
    if a.ndim != 1 or a.size < 2:
        raise ValidationError("target needs n + 1 >= 2 Dicke amplitudes")
    if abs(np.linalg.norm(a) - 1) > tol:
        raise ValidationError(f"target must have unit norm, got {np.linalg.norm(a):.15g}")
    return a


def ghz_target(n: int) -> np.ndarray:
    a = np.zeros(n + 1, dtype=complex)
    a[0] = a[n] = 1 / math.sqrt(2)
    return a


def w_target(n: int) -> np.ndarray:
    a = np.zeros(n + 1, dtype=complex)
    a[1] = 1.0
    return a


def _pair_rotation(theta: float, phase: float) -> np.ndarray:
    """``exp(-i H t)`` on ``(a, b) = (top, bottom)`` for rotation angle ``theta = |W| k t``."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s * cmath.exp(-1j * phase)],
                     [-1j * s * cmath.exp(1j * phase), c]])


def two_level_pulse(amp_a: complex, amp_b: complex, k: float, *, transition: str = RYDBERG,
                    target: str = "a", rabi: float = 1.0, shorten: bool = False) -> Pulse:
    """Resonant pulse moving all population of the pair ``(a, b)`` onto ``target``.

    ``a`` is the top-row (no extra Rydberg excitation) node and ``b`` the
    bottom-row node; ``k > 0`` is their coupling.  The drive phase puts the
    rotation axis perpendicular to the Bloch vector and the target pole, taken
    from ``[0, pi)`` so that real amplitudes always rotate about ``+y``; the
    rotation angle is then solved in ``[0, 2 pi)``.  ``shorten`` flips the
    phase by pi whenever that brings the angle below pi.
    """
    if not k > 0:
        raise ValidationError(f"coupling must be positive, got {k}")
    if target not in ("a", "b"):
        raise ValidationError("target must be 'a' or 'b'")
    amp_a, amp_b = complex(amp_a), complex(amp_b)
    # emptied node e, kept node f; after the pulse: amp_e' = c amp_e - i s g amp_f
    # with g = e^{+i phase} (target a) or e^{-i phase} (target b)
    keep, empty = (amp_a, amp_b) if target == "a" else (amp_b, amp_a)
    if abs(empty) < _ZERO_AMP or abs(keep) + abs(empty) == 0:
        return Pulse(transition, rabi, math.pi / 2, 0.0, 0.0)
    # choose phase so that i g keep is parallel to empty
    rel = cmath.phase(empty) - cmath.phase(keep) - math.pi / 2   # = arg(g)
    phase = (rel if target == "a" else -rel) % math.pi
    g = cmath.exp(1j * phase) if target == "a" else cmath.exp(-1j * phase)
    r = 1j * g * keep
    unit = empty / abs(empty)
    half = math.atan2((empty / unit).real, (r / unit).real) % math.pi
    if shorten and half > math.pi / 2:
        half = math.pi - half
        phase = phase + math.pi
    theta = 2 * half
    return Pulse(transition, rabi, phase % _TWO_PI, 0.0, theta / (rabi * k))


def _chain(n: int):
    """Index maps of the (n, 0) block: top[k], bottom[j]."""
    basis = sector(Partition(n, 0, 0)).basis
    top = np.empty(n + 1, dtype=int)
    bottom = np.empty(n, dtype=int)
    for i, s in enumerate(basis.states):
        if s.r == 0:
            top[s.n1] = i
        else:
            bottom[s.n1] = i
    return basis, top, bottom


def _pairs(n: int, transition: str) -> list[tuple[int, int, float]]:
    """``(top k, bottom j, coupling)`` for every pair a pulse acts on."""
    if transition == RYDBERG:
        return [(k, k - 1, math.sqrt(k)) for k in range(1, n + 1)]
    return [(k, k, math.sqrt(n - k)) for k in range(n)]


def _apply_pair_pulse(top_amp: np.ndarray, bot_amp: np.ndarray, pulse: Pulse, n: int) -> None:
    for k, j, c in _pairs(n, pulse.transition):
        R = _pair_rotation(pulse.rabi_magnitude * c * pulse.duration, pulse.phase)
        top_amp[k], bot_amp[j] = R @ np.array([top_amp[k], bot_amp[j]])


def synthesize_sequence(target, *, rabi: float = 1.0, shorten: bool = False) -> PulseSchedule:
    """Effective schedule (alternating ``rydberg`` / ``effective``) preparing ``target``.

    Zero-amplitude steps are kept as zero-duration pulses so pulse ``i`` of
    the returned schedule always corresponds to the same chain link.
    """
    a = symmetric_target(target)
    n = a.size - 1
    top = a.copy()
    bot = np.zeros(n, dtype=complex)
    reverse = []
    for step in range(2 * n):
        if step % 2 == 0:
            # empty top k into bottom k-1
            k = n - step // 2
            pulse = two_level_pulse(top[k], bot[k - 1], math.sqrt(k), transition=RYDBERG,
                                    target="b", rabi=rabi, shorten=shorten)
        else:
            # empty bottom j into top j
            j = n - 1 - step // 2
            pulse = two_level_pulse(top[j], bot[j], math.sqrt(n - j), transition=EFFECTIVE,
                                    target="a", rabi=rabi, shorten=shorten)
        _apply_pair_pulse(top, bot, pulse, n)
        reverse.append(pulse)
    residual = 1.0 - abs(top[0]) ** 2
    if residual > 1e-9:
        raise NumericalError(f"synthesis left population {residual:.3e} off |0>^n")
    forward = tuple(p.inverse() for p in reversed(reverse))
    return PulseSchedule(forward, "effective", n)


def physical_schedule(effective: PulseSchedule) -> PulseSchedule:
    """Replace every effective ``0 <-> r`` pulse by three physical pulses.

    ``exp(-i pi T^x)`` maps the ``1 <-> r`` coupling onto the ``0 <-> r`` one
    with an extra factor ``-i``, so the sandwiched Rydberg pulse carries phase
    ``phase + pi/2`` and the closing ``0 <-> 1`` pi pulse has phase pi (the
    inverse of the opening one).  Zero-duration pulses are dropped.
    """
    out = []
    for p in effective.pulses:
        if p.duration == 0:
            continue
        if p.transition != EFFECTIVE:
            out.append(p)
            continue
        pi_time = math.pi / p.rabi_magnitude
        out.append(Pulse(HYPERFINE, p.rabi_magnitude, 0.0, 0.0, pi_time))
        out.append(Pulse(RYDBERG, p.rabi_magnitude, (p.phase + math.pi / 2) % _TWO_PI, p.detuning, p.duration))
        out.append(Pulse(HYPERFINE, p.rabi_magnitude, math.pi, 0.0, pi_time))
    return PulseSchedule(tuple(out), "physical", effective.n)


def pulse_generator(pulse: Pulse, n: int) -> np.ndarray:
    """Hamiltonian of one pulse on the ``(n, 0)`` block."""
    ops = sector(Partition(n, 0, 0))
    w = pulse.rabi_magnitude * cmath.exp(1j * pulse.phase)
    lower, upper = {
        HYPERFINE: (ops.T_minus, ops.T_plus),
        RYDBERG: (ops.U_minus, ops.U_plus),
        EFFECTIVE: (ops.V_minus, ops.V_plus),
    }[pulse.transition]
    H = 0.5 * (w * lower + np.conj(w) * upper)
    if pulse.detuning:
        occ = ops.basis.occupations()
        if pulse.transition == HYPERFINE:
            H = H - pulse.detuning * np.diag(occ[:, 1])
        else:
            # detuning of the r level relative to the driven lower level
            H = H - pulse.detuning * np.diag(occ[:, 2])
    return H


def apply_schedule(schedule: PulseSchedule, n: int | None = None, initial=None,
                   *, leak_tol: float = 1e-6) -> PreparedState:
    """Evolve ``initial`` (default ``|0>^n``) through the schedule in the (n, 0) block.

    One eigendecomposition per pulse.  Bottom-row population above
    ``leak_tol`` at the end triggers a :class:`LeakageWarning`.
    """
    n = schedule.n if n is None else n
    if n != schedule.n:
        raise ValidationError(f"schedule built for n = {schedule.n}, not {n}")
    basis, top, bottom = _chain(n)
    psi = np.zeros(basis.dim, dtype=complex)
    if initial is None:
        psi[top[0]] = 1.0
    else:
        psi[top] = symmetric_target(initial)
    for p in schedule.pulses:
        if p.duration == 0:
            continue
        E, V = np.linalg.eigh(pulse_generator(p, n))
        psi = V @ (np.exp(-1j * E * p.duration) * (V.conj().T @ psi))
    leak = float(np.sum(np.abs(psi[bottom]) ** 2))
    if leak > leak_tol:
        warnings.warn(f"leaked population {leak:.3e} outside the top row", LeakageWarning, stacklevel=2)
    return PreparedState(psi[top].copy(), leak, psi)


def fidelity(state, target) -> float:
    """``|<target|state>|^2`` (global phase ignored)."""
    return float(abs(np.vdot(np.asarray(target), np.asarray(state))) ** 2)


def schedule_table(schedule: PulseSchedule) -> str:
    """Plain-text table of pulses with their ``|W| t / pi`` column."""
    lines = [f"{'#':>3}  {'transition':<10} {'|W|t/pi':>10} {'phase/pi':>9}"]
    for i, p in enumerate(schedule.pulses, 1):
        lines.append(f"{i:>3}  {p.transition:<10} {p.area:>10.5f} {p.phase / math.pi:>9.4f}")
    return "\n".join(lines)
