"""Level schemes, Hamiltonians and decay generators for two dressed atoms.

Units: hbar = 1 and every energy is an angular frequency.  Callers pick a
reference frequency (usually the peak effective Rabi frequency) and express
all rates relative to it.

Single-atom levels are ordered ``(|0>, |1>, |r>)`` and two-atom states use
the lexicographic product order, so ``|a, b>`` sits at index ``3 * a + b``::

    0:|0,0>  1:|0,1>  2:|0,r>  3:|1,0>  4:|1,1>  5:|1,r>  6:|r,0>  7:|r,1>  8:|r,r>
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

LEVELS = ("0", "1", "r")
BASIS_LABELS = tuple(a + b for a in LEVELS for b in LEVELS)
COMPUTATIONAL_INDICES = (0, 1, 3, 4)

_SQRT2 = math.sqrt(2.0)


def basis_index(label: str) -> int:
    """Index of a two-atom basis state such as ``"1r"``."""
    return BASIS_LABELS.index(label)


def basis_vector(label: str) -> np.ndarray:
    vec = np.zeros(9, dtype=complex)
    vec[basis_index(label)] = 1.0
    return vec


def bright_state() -> np.ndarray:
    """(|1,r> + |r,1>)/sqrt(2)."""
    return (basis_vector("1r") + basis_vector("r1")) / _SQRT2


def dark_state() -> np.ndarray:
    """(|1,r> - |r,1>)/sqrt(2)."""
    return (basis_vector("1r") - basis_vector("r1")) / _SQRT2


def swap_operator() -> np.ndarray:
    """Permutation exchanging the two atoms."""
    swap = np.zeros((9, 9))
    for a in range(3):
        for b in range(3):
            swap[3 * b + a, 3 * a + b] = 1.0
    return swap


class EliminationWarning(UserWarning):
    """Two-photon adiabatic elimination used outside its validity range."""


@dataclass(frozen=True)
class EffectiveParams:
    """Parameters of the effective one-atom |1> <-> |r> coupling.

    ``delta_1`` and ``delta_r`` are the intermediate-state light shifts of the
    two-photon scheme (zero for direct excitation).  ``gamma_1``, ``gamma_r``
    and ``gamma_1r`` are the coefficients of the per-atom sum of jump
    operators ``gamma_1|1><1| + gamma_r|r><r| + gamma_1r(|r><1| + |1><r|)``.
    """

    omega: float
    delta: float
    delta_1: float = 0.0
    delta_r: float = 0.0
    gamma_1: float = 0.0
    gamma_r: float = 0.0
    gamma_1r: float = 0.0
    valid: bool = True

    def __post_init__(self):
        values = (self.omega, self.delta, self.delta_1, self.delta_r,
                  self.gamma_1, self.gamma_r, self.gamma_1r)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"non-finite effective parameters: {self}")
        if self.gamma_1 < 0 or self.gamma_r < 0:
            raise ValueError("decay rates must be non-negative")

    @property
    def mixing_angle(self) -> float:
        """theta in [0, pi] with tan(theta) = omega / (-delta)."""
        return math.atan2(self.omega, -self.delta)

    @property
    def has_decay(self) -> bool:
        return bool(self.gamma_1 or self.gamma_r or self.gamma_1r)


@dataclass(frozen=True)
class ExcitationScheme:
    """One- or two-photon excitation of |1> to the Rydberg level |r>.

    Rabi frequencies, detunings and decay rates are angular frequencies.
    For time-dependent passages the ramp schedule overrides the driven
    quantity (``omega_1r``/``delta_1r`` or ``omega_1a``); the remaining fields
    stay fixed.

    ``shift_convention`` selects how the Rydberg light shift enters the
    effective detuning in the two-photon case: ``"physical"`` uses
    ``delta_eff = delta_1a + delta_ar + delta_1 - delta_r``, which reproduces
    the exact three-level ladder, ``"as-printed"`` uses ``+ delta_r``.
    """

    variant: str = "one-photon"
    omega_1r: float = 0.0
    delta_1r: float = 0.0
    omega_1a: float = 0.0
    omega_ar: float = 0.0
    delta_1a: float = 0.0
    delta_ar: float = 0.0
    gamma_a: float = 0.0
    gamma_r: float = 0.0
    validity_threshold: float = 0.2
    shift_convention: str = "physical"

    def __post_init__(self):
        if self.variant not in ("one-photon", "two-photon"):
            raise ValueError(f"unknown excitation variant {self.variant!r}")
        if self.shift_convention not in ("physical", "as-printed"):
            raise ValueError(f"unknown shift convention {self.shift_convention!r}")
        for name in ("omega_1r", "delta_1r", "omega_1a", "omega_ar", "delta_1a",
                     "delta_ar", "gamma_a", "gamma_r", "validity_threshold"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.gamma_a < 0 or self.gamma_r < 0:
            raise ValueError("decay rates must be non-negative")

    @classmethod
    def one_photon(cls, omega=0.0, delta=0.0, gamma_r=0.0) -> "ExcitationScheme":
        return cls("one-photon", omega_1r=omega, delta_1r=delta, gamma_r=gamma_r)

    @classmethod
    def two_photon(cls, omega_1a, omega_ar, delta_1a, delta_ar=None,
                   gamma_a=0.0, gamma_r=0.0, **kw) -> "ExcitationScheme":
        """Two-photon ladder; ``delta_ar`` defaults to ``-delta_1a``."""
        if delta_ar is None:
            delta_ar = -delta_1a
        return cls("two-photon", omega_1a=omega_1a, omega_ar=omega_ar,
                   delta_1a=delta_1a, delta_ar=delta_ar, gamma_a=gamma_a,
                   gamma_r=gamma_r, **kw)

    @property
    def is_two_photon(self) -> bool:
        return self.variant == "two-photon"

    def with_drive(self, omega: float, delta: float | None = None) -> "ExcitationScheme":
        """Copy with the time-dependent drive quantities replaced."""
        if self.is_two_photon:
            return replace(self, omega_1a=omega)
        return replace(self, omega_1r=omega,
                       delta_1r=self.delta_1r if delta is None else delta)

    def effective(self) -> EffectiveParams:
        if self.is_two_photon:
            return adiabatic_elimination(self)
        return EffectiveParams(self.omega_1r, self.delta_1r, gamma_r=self.gamma_r)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_dict(cls, data: dict) -> "ExcitationScheme":
        return cls(**data)


@dataclass(frozen=True)
class InteractionSpec:
    """Pair energy V of |r,r>; either given directly or as C6 / R**6."""

    V: float
    c6: float | None = field(default=None, compare=False)
    R: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.V):
            raise ValueError("interaction energy must be finite")

    @classmethod
    def from_c6(cls, c6: float, R: float) -> "InteractionSpec":
        if R <= 0:
            raise ValueError("separation must be positive")
        return cls(c6 * R ** -6, c6=c6, R=R)


@dataclass
class TwoAtomState:
    amplitudes: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (9,):
            raise ValueError("two-atom state needs 9 amplitudes")

    @classmethod
    def basis(cls, label: str, time: float = 0.0) -> "TwoAtomState":
        return cls(basis_vector(label), time)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def rydberg_populations(self) -> tuple[float, float]:
        return rydberg_populations(self.amplitudes)

    def bright_dark(self) -> tuple[complex, complex]:
        """Projections onto the bright and dark one-excitation states."""
        return (np.vdot(bright_state(), self.amplitudes),
                np.vdot(dark_state(), self.amplitudes))


def rydberg_populations(psi: np.ndarray) -> tuple[float, float]:
    """Per-atom Rydberg populations (P_r of atom 1, P_r of atom 2)."""
    p = np.abs(np.asarray(psi).reshape(3, 3)) ** 2
    return float(p[2].sum()), float(p[:, 2].sum())


# --- single-atom building blocks --------------------------------------------

_P1 = np.diag([0.0, 1.0, 0.0]).astype(complex)
_PR = np.diag([0.0, 0.0, 1.0]).astype(complex)
_X1R = np.zeros((3, 3), dtype=complex)
_X1R[1, 2] = _X1R[2, 1] = 1.0
_I3 = np.eye(3, dtype=complex)


def _kron_sum(op: np.ndarray) -> np.ndarray:
    return np.kron(op, _I3) + np.kron(_I3, op)


# Two-atom operator pieces; H(t) is linear in omega, delta and V.
PAIR_OMEGA = 0.5 * _kron_sum(_X1R)
PAIR_DELTA = -_kron_sum(_PR)
PAIR_V = np.zeros((9, 9), dtype=complex)
PAIR_V[8, 8] = 1.0
PAIR_GAMMA_1 = _kron_sum(_P1)
PAIR_GAMMA_R = _kron_sum(_PR)
PAIR_GAMMA_1R = _kron_sum(_X1R)


def single_atom_hamiltonian(p: EffectiveParams) -> np.ndarray:
    """3x3 Hamiltonian -delta|r><r| + omega/2 (|r><1| + |1><r|); |0> is inert."""
    h = np.zeros((3, 3), dtype=complex)
    h[2, 2] = -p.delta
    h[1, 2] = h[2, 1] = 0.5 * p.omega
    return h


def two_atom_hamiltonian(p: EffectiveParams, v: InteractionSpec) -> np.ndarray:
    """9x9 Hamiltonian of two symmetrically driven atoms with pair energy V."""
    h1 = single_atom_hamiltonian(p)
    h = np.kron(h1, _I3) + np.kron(_I3, h1)
    h[8, 8] += v.V
    return h


def perfect_blockade_hamiltonian(p: EffectiveParams) -> np.ndarray:
    """2x2 Hamiltonian on (|1,1>, |b>) with |r,r> removed."""
    c = _SQRT2 * p.omega / 2
    return np.array([[0.0, c], [c, -p.delta]], dtype=complex)


def single_atom_decay(p: EffectiveParams) -> np.ndarray:
    """Per-atom sum of L^dag L over the jump operators."""
    return p.gamma_1 * _P1 + p.gamma_r * _PR + p.gamma_1r * _X1R


def decay_generator(s) -> np.ndarray:
    """Anti-Hermitian part -(i/2) sum L^dag L of the two-atom H_eff.

    Accepts an :class:`ExcitationScheme` or already-eliminated
    :class:`EffectiveParams`.
    """
    p = s.effective() if isinstance(s, ExcitationScheme) else s
    return -0.5j * _kron_sum(single_atom_decay(p))


def effective_hamiltonian(p: EffectiveParams, v: InteractionSpec) -> np.ndarray:
    return two_atom_hamiltonian(p, v) + decay_generator(p)


def elimination_coefficients(o1, o2, d1, d2, gamma_a=0.0, gamma_r=0.0,
                             convention="physical"):
    """Effective two-level coefficients of a far-detuned ladder.

    Works elementwise on arrays.  Returns
    ``(omega, delta, shift_1, shift_r, gamma_1, gamma_r, gamma_1r)``.
    """
    omega = o1 * o2 / (2 * d1)
    shift_1 = o1 ** 2 / (4 * d1)
    shift_r = -o2 ** 2 / (4 * d2)
    if convention == "physical":
        delta = d1 + d2 + shift_1 - shift_r
    else:
        delta = d1 + d2 + shift_1 + shift_r
    g1 = o1 ** 2 / (4 * d1 ** 2) * gamma_a
    gr = o2 ** 2 / (4 * d2 ** 2) * gamma_a + gamma_r
    # Coherence between the two scattering channels.  Equal to
    # o2*o1/(4 d1^2) gamma_a on the delta_ar = -delta_1a line and keeps the
    # per-atom sum of L^dag L positive semidefinite everywhere.
    g1r = o1 * o2 / (4 * d1 * -d2) * gamma_a
    return omega, delta, shift_1, shift_r, g1, gr, g1r


def adiabatic_elimination(s: ExcitationScheme) -> EffectiveParams:
    """Eliminate the intermediate level of a two-photon ladder.

    Warns (does not raise) when omega_1a/|delta_1a| exceeds the scheme's
    validity threshold; the returned parameters carry ``valid=False``.
    """
    if not s.is_two_photon:
        raise ValueError("adiabatic elimination needs a two-photon scheme")
    if s.delta_1a == 0 or s.delta_ar == 0:
        raise ZeroDivisionError("intermediate-state detunings must be non-zero")
    o1, o2, d1, d2 = s.omega_1a, s.omega_ar, s.delta_1a, s.delta_ar

    valid = abs(o1) / abs(d1) <= s.validity_threshold
    if not valid:
        warnings.warn(
            f"omega_1a/|delta_1a| = {abs(o1) / abs(d1):.3g} exceeds "
            f"{s.validity_threshold}", EliminationWarning, stacklevel=2)

    omega, delta, shift_1, shift_r, gamma_1, gamma_r, gamma_1r = elimination_coefficients(
        o1, o2, d1, d2, s.gamma_a, s.gamma_r, s.shift_convention)
    return EffectiveParams(omega, delta, shift_1, shift_r,
                           gamma_1, gamma_r, gamma_1r, valid)
