"""Schrodinger propagation of the two-atom system and trajectory observables.

The generator H(t) is linear in the effective drive parameters, so it is
assembled from the fixed operator pieces of :mod:`rydress.model`.  Decay
enters as the anti-Hermitian part of H_eff; the norm then measures the
population that has not been lost.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import (PAIR_DELTA, PAIR_GAMMA_1, PAIR_GAMMA_1R, PAIR_GAMMA_R, PAIR_OMEGA,
                    PAIR_V, BASIS_LABELS, EffectiveParams, ExcitationScheme,
                    InteractionSpec, TwoAtomState, elimination_coefficients)

DEFAULT_TOL = 1e-9

# Dormand-Prince 5(4) tableau with the 4th-order continuous extension.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# Embedded 4th-order minus 5th-order weights (7 stages, last is FSAL).
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


class PropagationError(RuntimeError):
    """Step size underflow; ``t`` is where the integrator gave up."""

    def __init__(self, message: str, t: float):
        super().__init__(f"{message} at t = {t:.6g}")
        self.t = t


def _error_norm(x: np.ndarray) -> float:
    # Largest column 2-norm, so a batch of states is held to the same
    # standard as a single one.
    if x.ndim == 1:
        return float(np.linalg.norm(x))
    return float(np.sqrt((np.abs(x) ** 2).sum(axis=0).max()))


def dormand_prince(f: Callable, window, y0, tol: float = DEFAULT_TOL, t_eval=None,
                   h0: float | None = None, max_steps: int = 10_000_000):
    """Integrate y' = f(t, y) with local error per unit time <= tol.

    Returns ``(t_eval, ys, stats)`` where ``ys[k]`` is the dense-output
    value at ``t_eval[k]``; ``t_eval`` defaults to the window end points.
    """
    ta, tb = map(float, window)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if tb < ta:
        raise ValueError("window must be increasing")
    y = np.array(y0, dtype=complex)
    if t_eval is None:
        t_eval = [ta, tb] if tb > ta else [ta]
    t_eval = np.array(t_eval, dtype=float)
    if np.any(np.diff(t_eval) <= 0):
        raise ValueError("sample times must be strictly increasing")
    if t_eval.size and (t_eval[0] < ta - 1e-12 or t_eval[-1] > tb + 1e-12):
        raise ValueError("sample times must lie inside the window")
    out = np.empty((t_eval.size,) + y.shape, dtype=complex)
    stats = {"accepted": 0, "rejected": 0}
    k_out = 0
    while k_out < t_eval.size and t_eval[k_out] <= ta:
        out[k_out] = y
        k_out += 1
    if tb == ta:
        return t_eval, out, stats

    t = ta
    k1 = f(t, y)
    if h0 is None:
        scale = _error_norm(k1)
        h = min(tb - ta, 0.01 / scale if scale > 0 else tb - ta)
        h = max(h, 1e-6 * (tb - ta))
    else:
        h = h0
    h_floor = 1e-13 * max(1.0, abs(ta), abs(tb))
    K = [k1] + [None] * 6

    while t < tb:
        if stats["accepted"] + stats["rejected"] >= max_steps:
            raise PropagationError("step budget exhausted", t)
        h = min(h, tb - t)
        if h < h_floor:
            raise PropagationError("step size underflow", t)
        for i in range(1, 6):
            dy = sum(a * K[j] for j, a in enumerate(_A[i]))
            K[i] = f(t + _C[i] * h, y + h * dy)
        y_new = y + h * sum(b * K[j] for j, b in enumerate(_B) if b)
        K[6] = f(t + h, y_new)
        err = h * _error_norm(sum(e * K[j] for j, e in enumerate(_E) if e))
        allowed = tol * h
        if err <= allowed:
            t_new = t + h if t + h < tb else tb
            while k_out < t_eval.size and t_eval[k_out] <= t_new:
                sigma = (t_eval[k_out] - t) / h
                powers = np.array([sigma, sigma ** 2, sigma ** 3, sigma ** 4])
                w = _P @ powers
                out[k_out] = y + h * sum(w[j] * K[j] for j in range(7) if w[j])
                k_out += 1
            t, y = t_new, y_new
            K[0] = K[6]
            stats["accepted"] += 1
            factor = _MAX_FACTOR if err == 0 else min(
                _MAX_FACTOR, _SAFETY * (allowed / err) ** 0.25)
        else:
            stats["rejected"] += 1
            factor = max(_MIN_FACTOR, _SAFETY * (allowed / err) ** 0.25)
        h *= factor
    # Samples that sit on tb within rounding.
    while k_out < t_eval.size:
        out[k_out] = y
        k_out += 1
    return t_eval, out, stats


# --- drives and generators ---------------------------------------------------

@dataclass(frozen=True)
class Drive:
    """Time-dependent effective parameters of a symmetric two-atom drive.

    ``coefficients(t)`` returns ``(omega, delta, gamma_1, gamma_r, gamma_1r)``.
    """

    coefficients: Callable
    window: tuple
    label: str = "drive"

    @classmethod
    def constant(cls, p: EffectiveParams, window) -> "Drive":
        c = (p.omega, p.delta, p.gamma_1, p.gamma_r, p.gamma_1r)
        return cls(lambda t: c, tuple(window), "constant")

    @classmethod
    def one_photon(cls, ramp, gamma_r: float = 0.0) -> "Drive":
        def coefficients(t):
            return ramp.omega(t), ramp.delta(t), 0.0, gamma_r, 0.0
        return cls(coefficients, ramp.window, "one-photon")

    @classmethod
    def two_photon(cls, ramp, s: ExcitationScheme) -> "Drive":
        """Effective drive of a two-photon ramp; only omega_1a follows the ramp."""
        if s.delta_1a == 0 or s.delta_ar == 0:
            raise ZeroDivisionError("intermediate-state detunings must be non-zero")

        def coefficients(t):
            o, d, _, _, g1, gr, g1r = elimination_coefficients(
                ramp.omega(t), s.omega_ar, s.delta_1a, s.delta_ar, s.gamma_a, s.gamma_r,
                s.shift_convention)
            return o, d, g1, gr, g1r
        return cls(coefficients, ramp.window, "two-photon")

    @classmethod
    def from_ramp(cls, ramp, s: ExcitationScheme | None = None) -> "Drive":
        if ramp.kind == "two-photon":
            if s is None or not s.is_two_photon:
                raise ValueError("a two-photon ramp needs a two-photon scheme")
            return cls.two_photon(ramp, s)
        return cls.one_photon(ramp, s.gamma_r if s is not None else 0.0)

    def params(self, t: float) -> EffectiveParams:
        o, d, g1, gr, g1r = self.coefficients(t)
        return EffectiveParams(float(o), float(d), gamma_1=float(g1), gamma_r=float(gr),
                               gamma_1r=float(g1r))

    @property
    def has_decay(self) -> bool:
        ta, tb = self.window
        return any(self.params(t).has_decay for t in (ta, 0.5 * (ta + tb), tb))


class Generator:
    """H_eff(t) of two atoms under a symmetric drive with pair energy V."""

    def __init__(self, drive: Drive, v: InteractionSpec):
        self.drive = drive
        self.v = v
        self._static = v.V * PAIR_V

    def __call__(self, t: float) -> np.ndarray:
        o, d, g1, gr, g1r = self.drive.coefficients(t)
        h = self._static + o * PAIR_OMEGA + d * PAIR_DELTA
        if g1 or gr or g1r:
            h = h - 0.5j * (g1 * PAIR_GAMMA_1 + gr * PAIR_GAMMA_R + g1r * PAIR_GAMMA_1R)
        return h

    def hermitian(self, t: float) -> np.ndarray:
        h = self(t)
        return 0.5 * (h + h.conj().T)

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        return -1j * (self(t) @ y)


# --- trajectories -------------------------------------------------------------

@dataclass
class Trajectory:
    times: np.ndarray
    amplitudes: np.ndarray  # (n, 9)
    norms: np.ndarray
    pr1: np.ndarray
    pr2: np.ndarray
    tol: float = DEFAULT_TOL
    stats: dict | None = None

    def state(self, k: int) -> TwoAtomState:
        return TwoAtomState(self.amplitudes[k], float(self.times[k]))

    @property
    def final(self) -> TwoAtomState:
        return self.state(-1)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            head = ["t"]
            for lab in BASIS_LABELS:
                head += [f"re_{lab}", f"im_{lab}"]
            head += [f"pop_{lab}" for lab in BASIS_LABELS]
            head += ["pr1", "pr2", "norm"]
            w.writerow(head)
            for k, t in enumerate(self.times):
                a = self.amplitudes[k]
                row = [repr(float(t))]
                for z in a:
                    row += [repr(float(z.real)), repr(float(z.imag))]
                row += [repr(float(x)) for x in np.abs(a) ** 2]
                row += [repr(float(self.pr1[k])), repr(float(self.pr2[k])),
                        repr(float(self.norms[k]))]
                w.writerow(row)


def _rydberg_split(amps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = (np.abs(amps) ** 2).reshape(-1, 3, 3)
    return p[:, 2, :].sum(axis=1), p[:, :, 2].sum(axis=1)


def propagate(H, psi0, window, tol: float = DEFAULT_TOL, samples=None,
              n_samples: int = 401) -> Trajectory:
    """Solve i dpsi/dt = H(t) psi on ``window``.

    ``H`` is a :class:`Generator` or any callable returning a 9x9 matrix.
    ``samples`` are the dense-output times; by default ``n_samples``
    equally spaced points spanning the window.
    """
    psi = psi0.amplitudes if isinstance(psi0, TwoAtomState) else np.asarray(psi0, complex)
    if psi.shape != (9,):
        raise ValueError("propagate expects a single 9-component state")
    ta, tb = map(float, window)
    if samples is None:
        samples = np.linspace(ta, tb, max(int(n_samples), 2))
    rhs = H.rhs if isinstance(H, Generator) else (lambda t, y: -1j * (H(t) @ y))
    times, amps, stats = dormand_prince(rhs, (ta, tb), psi, tol, samples)
    pr1, pr2 = _rydberg_split(amps)
    norms = np.linalg.norm(amps, axis=1)
    return Trajectory(times, amps, norms, pr1, pr2, tol, stats)


def propagate_many(H, columns: np.ndarray, window, tol: float = DEFAULT_TOL, samples=None):
    """Propagate several initial states at once; returns (times, (n, 9, k) amplitudes).

    All columns share one adaptive step sequence, so results match
    :func:`propagate` to within tol rather than bit for bit.
    """
    rhs = H.rhs if isinstance(H, Generator) else (lambda t, y: -1j * (H(t) @ y))
    columns = np.asarray(columns, dtype=complex)
    times, amps, _ = dormand_prince(rhs, window, columns, tol, samples)
    return times, amps


def _simpson(y: np.ndarray, x: np.ndarray) -> float:
    from scipy.integrate import simpson
    return float(simpson(y, x=x))


def integrated_rydberg_population(traj: Trajectory, rtol: float = 1e-2) -> float:
    """t_r = integral of P_r(atom 1) + P_r(atom 2) over the trajectory.

    Composite Simpson on the dense samples, checked against the same rule
    on every second sample; raises if the two disagree by more than rtol.
    """
    y = traj.pr1 + traj.pr2
    x = traj.times
    if x.size < 5:
        raise ValueError("need at least 5 samples for the halving check")
    full = _simpson(y, x)
    coarse = np.arange(0, x.size, 2)
    if coarse[-1] != x.size - 1:
        coarse = np.append(coarse, x.size - 1)
    half = _simpson(y[coarse], x[coarse])
    scale = max(abs(full), 1e-12 * (x[-1] - x[0]))
    if abs(full - half) > rtol * scale and abs(full - half) > 1e-10 * (x[-1] - x[0]):
        raise ValueError(f"sampling too coarse for t_r: {full:.6g} vs {half:.6g}")
    return full


@dataclass
class AdiabaticityReport:
    times: np.ndarray
    overlaps: np.ndarray

    @property
    def score(self) -> float:
        return float(self.overlaps.min())


def adiabaticity_monitor(traj: Trajectory, H, degeneracy: float = 1e-9) -> AdiabaticityReport:
    """Population kept in the instantaneous eigenspace the state started in.

    The eigenspace is followed by continuity: at each sample the cluster of
    (near-)degenerate eigenvectors with the largest projection of the
    previously followed vector is chosen.  Working with clusters rather than
    single eigenvectors keeps the tracking well defined at level crossings
    of uncoupled blocks.  Uses the Hermitian part of ``H``.
    """
    herm = H.hermitian if isinstance(H, Generator) else (lambda t: 0.5 * (H(t) + H(t).conj().T))
    ref = None
    overlaps = np.empty(traj.times.size)
    for k, t in enumerate(traj.times):
        w, u = np.linalg.eigh(herm(float(t)))
        psi = traj.amplitudes[k] / traj.norms[k]
        clusters = _clusters(w, degeneracy * max(1.0, float(np.abs(w).max())))
        target = psi if ref is None else ref
        best = max(clusters, key=lambda idx: np.linalg.norm(u[:, idx].conj().T @ target))
        proj = u[:, best] @ (u[:, best].conj().T @ target)
        ref = proj / np.linalg.norm(proj)
        overlaps[k] = float(np.linalg.norm(u[:, best].conj().T @ psi) ** 2)
    return AdiabaticityReport(traj.times.copy(), overlaps)


def _clusters(w: np.ndarray, gap: float) -> list[list[int]]:
    groups = [[0]]
    for i in range(1, w.size):
        if w[i] - w[i - 1] <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups
