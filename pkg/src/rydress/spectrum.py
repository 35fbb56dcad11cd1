"""Dressed-state spectra, entangling energy and perturbative limits.

Branch convention
-----------------
Write the drive in polar form, omega = r sin(theta) and delta = -r cos(theta),
with theta in [0, pi].  The ``"-"`` branch is the dressed |1,1> reached by
continuing from theta -> 0 (far red detuned, delta < 0) at fixed r; the
``"+"`` branch continues from theta -> pi (delta > 0).  These are the two
signs of the perfect-blockade closed form and of the weak-blockade
asymptote.

For omega > 0 the symmetric block (|1,1>, |b>, |r,r>) is an irreducible
tridiagonal matrix, so its eigenvalues are simple and never cross.  The
continuation therefore keeps a fixed eigenvalue rank, read off from the bare
energies at the starting end of the arc.  A tie there is the anti-blockade
resonance V = 2 delta and is reported as degenerate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .model import (EffectiveParams, InteractionSpec, basis_index,
                    perfect_blockade_hamiltonian, two_atom_hamiltonian)

_SQRT2 = math.sqrt(2.0)
BRANCHES = ("-", "+")

# Orthonormal basis adapted to the exchange symmetry of the 9x9 problem.
_BLOCK_NAMES = ("00", "single_a", "single_b", "pair", "dark")


def _block_basis() -> tuple[np.ndarray, dict[str, slice]]:
    def e(label):
        v = np.zeros(9)
        v[basis_index(label)] = 1.0
        return v

    cols = [
        e("00"),
        e("01"), e("0r"),
        e("10"), e("r0"),
        e("11"), (e("1r") + e("r1")) / _SQRT2, e("rr"),
        (e("1r") - e("r1")) / _SQRT2,
    ]
    slices = {"00": slice(0, 1), "single_a": slice(1, 3), "single_b": slice(3, 5),
              "pair": slice(5, 8), "dark": slice(8, 9)}
    return np.array(cols).T.astype(complex), slices


BLOCK_BASIS, BLOCK_SLICES = _block_basis()


def _check_branch(branch: str):
    if branch not in BRANCHES:
        raise ValueError(f"branch must be '-' or '+', got {branch!r}")


@dataclass
class DressedSpectrum:
    """Block-resolved eigensystem of the two-atom Hamiltonian.

    ``eigenvalues[k]`` and ``eigenvectors[:, k]`` (9-component, bare basis)
    are grouped by symmetry block and ascend within each block; ``labels[k]``
    is ``(block, rank)``.  Within a block the rank is the adiabatic label as
    long as omega > 0.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    labels: list[tuple[str, int]]

    def block(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        idx = [k for k, (b, _) in enumerate(self.labels) if b == name]
        return self.eigenvalues[idx], self.eigenvectors[:, idx]


@dataclass
class EntanglingEnergyResult:
    kappa: float
    branch: str
    populations: tuple[float, float, float]   # (P_11, P_b, P_rr)
    degenerate: bool = False
    gap: float = math.inf
    pair_energy: float = 0.0
    single_energy: float = 0.0
    eigenvector: np.ndarray = field(default=None, repr=False)


def dressed_spectrum(p: EffectiveParams, v: InteractionSpec) -> DressedSpectrum:
    h = two_atom_hamiltonian(p, v)
    hb = BLOCK_BASIS.conj().T @ h @ BLOCK_BASIS
    vals, vecs, labels = [], [], []
    for name in _BLOCK_NAMES:
        sl = BLOCK_SLICES[name]
        w, u = np.linalg.eigh(hb[sl, sl])
        vals.extend(w)
        vecs.append(BLOCK_BASIS[:, sl] @ u)
        labels.extend((name, k) for k in range(len(w)))
    return DressedSpectrum(np.array(vals), np.hstack(vecs), labels)


def pair_block(p: EffectiveParams, v: InteractionSpec) -> np.ndarray:
    """Symmetric-block Hamiltonian in the basis (|1,1>, |b>, |r,r>)."""
    c = p.omega / _SQRT2
    return np.array([[0.0, c, 0.0],
                     [c, -p.delta, c],
                     [0.0, c, -2 * p.delta + v.V]])


def _branch_rank(p: EffectiveParams, V: float, branch: str) -> tuple[int, int, bool]:
    """(pair-block rank, single-atom rank, tie) for the chosen branch."""
    r = math.hypot(p.omega, p.delta)
    if branch == "-":
        others = (r, 2 * r + V)
        single = 0
    else:
        others = (-r, V - 2 * r)
        single = 1
    scale = max(r, abs(V), 1e-300)
    tie = any(abs(e) <= 1e-12 * scale for e in others)
    rank = sum(1 for e in others if e < 0)
    return rank, single, tie


def entangling_energy(p: EffectiveParams, v: InteractionSpec, branch: str = "-",
                      gap_threshold: float = 1e-6) -> EntanglingEnergyResult:
    """kappa = E_LS^(2) - 2 E_LS^(1) from the exact dressed spectrum."""
    _check_branch(branch)
    spec = dressed_spectrum(p, v)
    pair_vals, pair_vecs = spec.block("pair")
    single_vals, _ = spec.block("single_a")

    rank, single_rank, tie = _branch_rank(p, v.V, branch)
    if p.omega == 0:
        # Bare states: the dressed |1,1> is |1,1> itself.
        e2, e1 = 0.0, 0.0
        vec = np.zeros(9, dtype=complex)
        vec[basis_index("11")] = 1.0
        gap = min(abs(-p.delta), abs(-2 * p.delta + v.V))
    else:
        e2 = float(pair_vals[rank])
        e1 = float(single_vals[single_rank])
        vec = pair_vecs[:, rank]
        neighbours = [abs(e2 - pair_vals[k]) for k in range(3) if k != rank]
        gap = min(neighbours)

    kappa = 0.0 if v.V == 0 else e2 - 2 * e1
    amps = BLOCK_BASIS[:, BLOCK_SLICES["pair"]].conj().T @ vec
    pops = tuple(float(x) for x in np.abs(amps) ** 2)
    return EntanglingEnergyResult(kappa, branch, pops, tie or gap < gap_threshold,
                                  gap, e2, e1, vec)


def kappa_perfect_blockade(p: EffectiveParams, branch: str = "-") -> float:
    """Closed-form kappa in the limit |V| -> infinity."""
    _check_branch(branch)
    s = 1.0 if branch == "+" else -1.0
    o2, d = p.omega ** 2, p.delta
    return d / 2 + s * 0.5 * (math.sqrt(2 * o2 + d * d) - 2 * math.sqrt(o2 + d * d))


def kappa_weak_asymptote(theta: float, v: InteractionSpec, branch: str = "-") -> float:
    """Leading-order kappa for |V| << omega: ((1 +- cos theta)/2)^2 V."""
    _check_branch(branch)
    s = 1.0 if branch == "+" else -1.0
    return ((1 + s * math.cos(theta)) / 2) ** 2 * v.V


def pair_state_energy_perfect_blockade(p: EffectiveParams, branch: str = "-") -> float:
    """Two-atom light shift of |1,1> under perfect blockade."""
    w = np.linalg.eigvalsh(perfect_blockade_hamiltonian(p))
    return float(w[1] if branch == "+" else w[0])


# --- regime classification ---------------------------------------------------

def classify_regime(p: EffectiveParams, v: InteractionSpec, rho: float = 0.2) -> str:
    """'strong', 'intermediate' or 'weak' blockade from omega/|V|.

    V = 0 is classified as weak and flagged with a RuntimeWarning.
    """
    if v.V == 0:
        warnings.warn("V = 0: classified as weak blockade by convention", RuntimeWarning,
                      stacklevel=2)
        return "weak"
    ratio = abs(p.omega) / abs(v.V)
    if ratio <= rho:
        return "strong"
    if ratio >= 1 / rho:
        return "weak"
    return "intermediate"


# --- branch tracking along sweeps ------------------------------------------------

def track_branch(vectors: list[np.ndarray], seed: np.ndarray) -> list[int]:
    """Follow one eigenvector through a sweep by maximal overlap.

    ``vectors[k]`` holds the eigenvectors (columns) at sweep point k.  Returns
    the column index of the followed state at every point.
    """
    out = []
    prev = seed
    for vecs in vectors:
        overlaps = np.abs(vecs.conj().T @ prev)
        k = int(np.argmax(overlaps))
        out.append(k)
        prev = vecs[:, k]
    return out


def sweep_pair_branch(params: list[EffectiveParams], v: InteractionSpec,
                      seed: np.ndarray | None = None) -> list[int]:
    """Overlap continuation of the dressed |1,1> through a parameter sweep.

    Seeded from the pair-block eigenvector with the largest |1,1> weight at
    the first point unless ``seed`` (pair-block coordinates) is given.
    """
    blocks = [np.linalg.eigh(pair_block(p, v))[1] for p in params]
    if seed is None:
        seed = blocks[0][:, int(np.argmax(np.abs(blocks[0][0])))]
    return track_branch(blocks, seed)


def anti_blockade_detuning(v: InteractionSpec) -> float:
    """Detuning where |r,r> is two-photon resonant with |1,1>."""
    return v.V / 2


# --- analytic eigensystems of the pseudo-spin decomposition ------------------------

_PS = (basis_index("11"), basis_index("1r"), basis_index("r1"), basis_index("rr"))


@dataclass
class TableReport:
    drive: float          # max deviation, atom-light eigensystem
    interaction: float    # max deviation, atom-atom eigensystem
    projected: float      # max deviation, S_theta in the zero-energy subspace
    decomposition: float  # H_drive = -delta 1 + r S_theta

    @property
    def max_deviation(self) -> float:
        return max(self.drive, self.interaction, self.projected, self.decomposition)


def _pseudo_spin_ops():
    # pseudo-spin: |up> = |r>, |down> = |1>; two-spin basis order (11, 1r, r1, rr)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.array([[-1, 0], [0, 1]], dtype=complex)
    i2 = np.eye(2)
    Sx = (np.kron(sx, i2) + np.kron(i2, sx)) / 2
    Sz = (np.kron(sz, i2) + np.kron(i2, sz)) / 2
    return Sx, Sz


def _eig_deviation(h: np.ndarray, pairs: list[tuple[float, np.ndarray]],
                   expected_spectrum: list[float] | None = None) -> float:
    dev = 0.0
    for e, vec in pairs:
        vec = vec / np.linalg.norm(vec)
        dev = max(dev, float(np.linalg.norm(h @ vec - e * vec)))
    if expected_spectrum is not None:
        got = np.sort(np.linalg.eigvalsh(h))
        dev = max(dev, float(np.max(np.abs(got - np.sort(expected_spectrum)))))
    return dev


def table_oracles(p: EffectiveParams, v: InteractionSpec) -> TableReport:
    """Check the numerical eigensystems against the closed pseudo-spin forms.

    Each field is the largest residual ``|H x - E x|`` or eigenvalue mismatch
    found for that family of analytic eigenpairs.
    """
    om, de = p.omega, p.delta
    r = math.hypot(om, de)
    theta = math.atan2(om, -de)
    Sx, Sz = _pseudo_spin_ops()

    full = two_atom_hamiltonian(p, InteractionSpec(0.0))
    h_drive = full[np.ix_(_PS, _PS)]
    ident = np.eye(4)

    up = np.array([math.sin(theta / 2), math.cos(theta / 2)])     # (|1>, |r>) comps
    down = np.array([math.cos(theta / 2), -math.sin(theta / 2)])
    sym = (np.kron(up, down) + np.kron(down, up)) / _SQRT2
    drive_dev = _eig_deviation(
        h_drive,
        [(-de + r, np.kron(up, up)), (-de - r, np.kron(down, down)), (-de, sym)])
    # eigenvalues of the triplet: restrict to the symmetric subspace
    trip = np.array([[1, 0, 0, 0], [0, 1 / _SQRT2, 1 / _SQRT2, 0], [0, 0, 0, 1]]).T
    drive_dev = max(drive_dev, _eig_deviation(trip.T @ h_drive @ trip, [],
                                              [-de + r, -de - r, -de]))

    s_theta = math.cos(theta) * Sz + math.sin(theta) * Sx
    decomp_dev = float(np.max(np.abs(h_drive - (-de * ident + r * s_theta))))
    decomp_dev = max(decomp_dev, float(np.max(np.abs(
        h_drive - (-de * ident - de * Sz + om * Sx)))))

    h_int = np.diag([0, 0, 0, 1.0]) * v.V
    int_from_spin = v.V / 2 * (Sz @ Sz + Sz)
    h_int_sym = trip.T @ h_int @ trip
    e11, eb, err = np.eye(3)
    int_dev = max(
        float(np.max(np.abs(h_int - int_from_spin))),
        _eig_deviation(h_int_sym, [(v.V, err), (0.0, eb), (0.0, e11)], [v.V, 0.0, 0.0]),
        float(np.max(np.abs(h_int_sym - pair_block(EffectiveParams(0, 0), v)))),
    )

    # S_theta projected on span(|1,1>, |b>), basis order (|1,1>, |b>)
    proj = trip[:, :2]
    m = proj.T @ s_theta @ proj
    c, s = math.cos(theta), math.sin(theta)
    root = math.sqrt(c * c + 2 * s * s)
    big_theta = math.atan2(_SQRT2 * om, -de)
    upper = np.array([math.sin(big_theta / 2), math.cos(big_theta / 2)])
    lower = np.array([math.cos(big_theta / 2), -math.sin(big_theta / 2)])
    m_expected = np.array([[-c, s / _SQRT2], [s / _SQRT2, 0.0]])
    proj_dev = max(
        float(np.max(np.abs(m - m_expected))),
        _eig_deviation(m, [(-c / 2 + root / 2, upper), (-c / 2 - root / 2, lower)],
                       [-c / 2 + root / 2, -c / 2 - root / 2]),
    )
    return TableReport(drive_dev, int_dev, proj_dev, decomp_dev)
