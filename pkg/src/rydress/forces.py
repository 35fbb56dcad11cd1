"""Dressed pair potential and interatomic force for a van der Waals pair.

Only the R-dependent part of the dressed |1,1> energy matters here; that
is the entangling energy kappa(R) evaluated with V = C6 / R**6.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .model import EffectiveParams, InteractionSpec
from .spectrum import entangling_energy

FD_STEP = 1e-4


class ForceMismatch(RuntimeError):
    """Finite-difference and eigenstate forces disagree; usually a branch jump."""


@dataclass(frozen=True)
class PairPotentialModel:
    c6: float

    def V(self, R):
        R = np.asarray(R, dtype=float)
        if np.any(R <= 0):
            raise ValueError("separations must be positive")
        out = self.c6 * R ** -6
        return out if out.ndim else float(out)

    def dV_dR(self, R):
        return -6 * self.V(R) / R


def blockade_radius(c6: float, omega_eff: float) -> float:
    """R where C6 / R**6 equals the effective Rabi frequency."""
    if c6 <= 0 or omega_eff <= 0:
        raise ValueError("C6 and omega_eff must be positive")
    return (c6 / omega_eff) ** (1 / 6)


def _kappa(R: float, p: EffectiveParams, model: PairPotentialModel, branch: str):
    return entangling_energy(p, InteractionSpec(model.V(R)), branch)


@dataclass
class PotentialCurve:
    R: np.ndarray
    V: np.ndarray
    kappa: np.ndarray
    rr_weight: np.ndarray
    flagged: np.ndarray


def adiabatic_pair_potential(R, omega_eff: float, delta_eff: float, c6: float,
                             branch: str = "-", margin: float = 0.05) -> PotentialCurve:
    """kappa(R) on a sorted grid of separations.

    Rows within ``margin * max(|V|, omega)`` of the anti-blockade condition
    V = 2 delta, or where the branch is degenerate, are flagged.
    """
    R = np.asarray(R, dtype=float)
    if R.size and (np.any(R <= 0) or np.any(np.diff(R) <= 0)):
        raise ValueError("R grid must be positive and strictly increasing")
    model = PairPotentialModel(c6)
    p = EffectiveParams(omega_eff, delta_eff)
    kappa, rr, flagged = [], [], []
    V = model.V(R) if R.size else np.empty(0)
    for r, v in zip(R, np.atleast_1d(V)):
        res = _kappa(float(r), p, model, branch)
        kappa.append(res.kappa)
        rr.append(res.populations[2])
        near = abs(v - 2 * delta_eff) < margin * max(abs(v), abs(omega_eff))
        flagged.append(bool(res.degenerate or near))
    return PotentialCurve(R, np.atleast_1d(V), np.array(kappa), np.array(rr),
                          np.array(flagged, dtype=bool))


@dataclass
class ForceResult:
    R: float
    finite_difference: float
    hellmann_feynman: float
    rr_weight: float

    @property
    def relative_difference(self) -> float:
        scale = max(abs(self.finite_difference), abs(self.hellmann_feynman))
        return 0.0 if scale == 0 else abs(self.finite_difference - self.hellmann_feynman) / scale


def dressed_force(R: float, omega_eff: float, delta_eff: float, c6: float,
                  branch: str = "-", rtol: float = 1e-3, atol: float = 1e-14,
                  step: float = FD_STEP) -> ForceResult:
    """F = -d kappa / dR by two routes.

    (i) central differences at h = step * R and h/2, Richardson-combined;
    (ii) -|c_rr|^2 dV/dR in the dressed eigenstate.  Raises
    :class:`ForceMismatch` when they differ by more than ``rtol`` (relative)
    and ``atol`` (absolute).
    """
    if R <= 0:
        raise ValueError("R must be positive")
    model = PairPotentialModel(c6)
    p = EffectiveParams(omega_eff, delta_eff)

    def k(r):
        return _kappa(r, p, model, branch).kappa

    def central(h):
        return (k(R + h) - k(R - h)) / (2 * h)

    h = step * R
    d1, d2 = central(h), central(h / 2)
    fd = -(4 * d2 - d1) / 3
    res = _kappa(R, p, model, branch)
    rr = res.populations[2]
    hf = -rr * model.dV_dR(R)
    out = ForceResult(R, fd, hf, rr)
    if abs(fd - hf) > max(atol, rtol * max(abs(fd), abs(hf))):
        raise ForceMismatch(f"force routes disagree at R = {R:g}: {fd:.6g} vs {hf:.6g}")
    return out


def quarter_vdw_force(R: float, c6: float) -> float:
    """-d/dR of C6 R^-6 / 4."""
    return 1.5 * c6 * R ** -7


def force_table(r_over_rb, omega_eff: float = 1.0, delta_eff: float = 0.0,
                branch: str = "-") -> list[dict]:
    """Rows (R/R_block, kappa/Omega, dkappa/dR in Omega/R_block) with C6 chosen
    so that R_block = 1."""
    c6 = omega_eff
    rows = []
    curve = adiabatic_pair_potential(r_over_rb, omega_eff, delta_eff, c6, branch)
    for r, kap, flag in zip(curve.R, curve.kappa, curve.flagged):
        f = dressed_force(float(r), omega_eff, delta_eff, c6, branch, rtol=math.inf)
        rows.append({"R_over_R_block": float(r), "kappa_over_omega": kap / omega_eff,
                     "dkappa_dR": -f.hellmann_feynman / omega_eff,
                     "dkappa_dR_fd": -f.finite_difference / omega_eff,
                     "rr_weight": f.rr_weight, "flagged": bool(flag)})
    return rows


FORCE_COLUMNS = ["R_over_R_block", "kappa_over_omega", "dkappa_dR", "dkappa_dR_fd",
                 "rr_weight", "flagged"]


def write_force_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=FORCE_COLUMNS)
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
