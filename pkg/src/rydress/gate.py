"""Spin-echo entangling gate built from two adiabatic dressing ramps.

Sequence (time order): pi/2 about x, ramp A, pi about x, ramp B, pi/2 about
x.  The pulses are ideal and instantaneous.  Each ramp realizes a diagonal
phase map U_kappa(phi_1, phi_2) on the qubits; with phi_2 = pi/2 per ramp
the echo yields exp(-i pi/4 sigma_y sigma_y).

Qubit ordering of 4x4 maps is |00>, |01>, |10>, |11> with sigma_z|0> = +|0>.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import __version__
from .dynamics import DEFAULT_TOL, Drive, Generator, Trajectory, _rydberg_split, \
    integrated_rydberg_population, propagate_many
from .model import COMPUTATIONAL_INDICES, ExcitationScheme, InteractionSpec
from .spectrum import entangling_energy

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)

U_MS = expm(-1j * math.pi / 4 * np.kron(SY, SY))

LEAKAGE_THRESHOLD = 1e-3


class LeakageError(ValueError):
    """Computational-subspace map too far from unitary to read phases from."""


def rx(theta: float) -> np.ndarray:
    return expm(-0.5j * theta * SX)


def both(u: np.ndarray) -> np.ndarray:
    return np.kron(u, u)


def u_kappa(phi_1: float, phi_2: float) -> np.ndarray:
    """exp(-i phi_2 sz sz / 4) exp(-i phi_1 (sz x 1 + 1 x sz) / 2)."""
    zz = np.kron(SZ, SZ)
    z1 = np.kron(SZ, I2) + np.kron(I2, SZ)
    return expm(-0.25j * phi_2 * zz) @ expm(-0.5j * phi_1 * z1)


def wrap(phi: float) -> float:
    """Reduce to (-pi, pi]."""
    r = math.remainder(phi, 2 * math.pi)
    return math.pi if r == -math.pi else r


def leakage(m: np.ndarray) -> float:
    return float(1 - (np.abs(m) ** 2).sum(axis=0).min())


def extract_phases(m: np.ndarray, threshold: float = LEAKAGE_THRESHOLD) -> tuple[float, float]:
    """(phi_1, phi_2) of a diagonal-dominant map, reduced to (-pi, pi]."""
    m = np.asarray(m)
    loss = leakage(m)
    if loss > threshold:
        raise LeakageError(f"leakage {loss:.3g} exceeds {threshold:g}")
    d = np.diag(m)
    if np.any(d == 0):
        raise LeakageError("vanishing diagonal element")
    phi_2 = -np.angle(d[0] * d[3] / (d[1] * d[2]))
    phi_1 = np.angle(d[1] / d[0]) - 0.5 * phi_2
    return wrap(phi_1), wrap(phi_2)


def ms_fidelity(m: np.ndarray) -> float:
    """|Tr(U_MS^dag M)|^2 / 16; also used for sub-unitary maps."""
    return float(abs(np.trace(U_MS.conj().T @ m)) ** 2 / 16)


def echo_composite(m_a: np.ndarray, m_b: np.ndarray | None = None) -> np.ndarray:
    m_b = m_a if m_b is None else m_b
    half, flip = both(rx(math.pi / 2)), both(rx(math.pi))
    return half @ m_b @ flip @ m_a @ half


def concurrence(state: np.ndarray) -> float:
    a, b, c, d = np.asarray(state) / np.linalg.norm(state)
    return float(2 * abs(a * d - b * c))


@dataclass
class RampResult:
    matrix: np.ndarray
    t_r: float
    leakage: float
    rr_max: float = 0.0
    trajectory: Trajectory | None = None


def ramp_unitary(ramp, s: ExcitationScheme | None, v: InteractionSpec,
                 tol: float = DEFAULT_TOL, n_samples: int = 801,
                 keep_trajectory: bool = False) -> RampResult:
    """Computational-subspace map of one ramp and t_r of the |1,1> input.

    The four computational basis states are propagated together; t_r is the
    time-integrated Rydberg population of both atoms during this single
    passage starting from |1,1>, and ``rr_max`` the peak |r,r> population
    of the same trajectory.
    """
    drive = Drive.from_ramp(ramp, s)
    gen = Generator(drive, v)
    idx = list(COMPUTATIONAL_INDICES)
    cols = np.zeros((9, 4), dtype=complex)
    cols[idx, range(4)] = 1.0
    ta, tb = drive.window
    samples = np.linspace(ta, tb, n_samples)
    times, amps = propagate_many(gen, cols, (ta, tb), tol, samples)
    m = amps[-1][idx, :]
    pair = amps[:, :, 3]
    pr1, pr2 = _rydberg_split(pair)
    traj = Trajectory(times, pair, np.linalg.norm(pair, axis=1), pr1, pr2, tol)
    t_r = integrated_rydberg_population(traj)
    rr_max = float((np.abs(pair[:, 8]) ** 2).max())
    return RampResult(m, t_r, leakage(m), rr_max, traj if keep_trajectory else None)


def kappa_integral(ramp, s: ExcitationScheme | None, v: InteractionSpec,
                   branch: str = "-", n: int = 2001) -> float:
    """Adiabatic estimate of phi_2: integral of the entangling energy."""
    from scipy.integrate import simpson

    drive = Drive.from_ramp(ramp, s)
    ta, tb = drive.window
    t = np.linspace(ta, tb, n)
    kappa = [entangling_energy(drive.params(float(x)), v, branch).kappa for x in t]
    return float(simpson(kappa, x=t))


@dataclass
class GateSequence:
    ramp_a: object
    scheme: ExcitationScheme | None = None
    ramp_b: object | None = None

    @property
    def symmetric(self) -> bool:
        return self.ramp_b is None or self.ramp_b == self.ramp_a


@dataclass
class GateReport:
    """Outcome of one spin-echo gate.

    ``t_r`` is the single-passage value from |1,1> (ramp A);
    ``t_r_sequence`` adds ramp B.  ``phi_1``/``phi_2`` are per ramp A.
    """

    matrix: np.ndarray
    fidelity: float
    phi_1: float
    phi_2: float
    t_r: float
    leakage: float
    t_r_sequence: float = 0.0
    rr_max: float = 0.0
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "fidelity": self.fidelity,
            "phi_1": self.phi_1,
            "phi_2": self.phi_2,
            "t_r": self.t_r,
            "leakage": self.leakage,
            "t_r_sequence": self.t_r_sequence,
            "rr_max": self.rr_max,
            "matrix_re": self.matrix.real.tolist(),
            "matrix_im": self.matrix.imag.tolist(),
            "parameters": self.parameters,
            "version": __version__,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def spin_echo_gate(seq: GateSequence, v: InteractionSpec, tol: float = DEFAULT_TOL,
                   n_samples: int = 801) -> GateReport:
    a = ramp_unitary(seq.ramp_a, seq.scheme, v, tol, n_samples)
    b = a if seq.symmetric else ramp_unitary(seq.ramp_b, seq.scheme, v, tol, n_samples)
    m = echo_composite(a.matrix, b.matrix)
    try:
        phi_1, phi_2 = extract_phases(a.matrix, threshold=1.0)
    except LeakageError:
        phi_1 = phi_2 = float("nan")
    params = {"ramp_a": seq.ramp_a.to_dict(), "V": v.V, "tol": tol}
    if not seq.symmetric:
        params["ramp_b"] = seq.ramp_b.to_dict()
    if seq.scheme is not None:
        params["scheme"] = seq.scheme.to_dict()
    return GateReport(m, ms_fidelity(m), phi_1, phi_2, a.t_r,
                      max(a.leakage, b.leakage, leakage(m)), a.t_r + b.t_r,
                      max(a.rr_max, b.rr_max), params)
