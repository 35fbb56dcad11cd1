"""Acceptance checks, one pass/fail line per criterion.

Runtime is dominated by criteria 5-8 (optimizations and scans, tens of
minutes on one core).  Set RYDRESS_WORKERS to spread the scans.
"""

import math

import numpy as np
import pytest

from rydress.dynamics import Drive, Generator, propagate
from rydress.forces import dressed_force, force_table, quarter_vdw_force
from rydress.gate import echo_composite, ms_fidelity, u_kappa
from rydress.model import EffectiveParams, InteractionSpec, basis_index, basis_vector
from rydress.optimize import (OptimizationProblem, one_photon_ramp, optimize_ramp,
                              scan_fidelity_landscape, scan_tr_vs_blockade,
                              STRONG_ONE_PHOTON)
from rydress.runner import default_workers
from rydress.spectrum import (entangling_energy, kappa_perfect_blockade,
                              kappa_weak_asymptote, table_oracles)

TWO_PI = 2 * math.pi


def _kappa(omega, delta, V):
    return entangling_energy(EffectiveParams(omega, delta), InteractionSpec(V)).kappa


# --- 1-4, 9-11: seconds ----------------------------------------------------------------

def test_perfect_blockade_limit(criterion):
    errors = []
    for ratio in (1e-1, 1e-2, 1e-3):
        p = EffectiveParams(1.0, 0.0)
        exact = _kappa(1.0, 0.0, 1 / ratio)
        closed = kappa_perfect_blockade(p)
        errors.append((ratio, abs(exact - closed) / abs(closed)))
    within = all(err <= 2 * ratio for ratio, err in errors)
    decreasing = all(a[1] > b[1] for a, b in zip(errors, errors[1:]))
    ok = criterion(1, within and decreasing,
                   "rel. errors " + ", ".join(f"{r:g}: {e:.3g}" for r, e in errors))
    assert ok


def test_weak_blockade_limit(criterion):
    res = abs(_kappa(1e3, 0.0, 1.0) / 0.25 - 1)
    worst = 0.0
    v = InteractionSpec(1.0)
    for theta in np.linspace(0.2, math.pi - 0.2, 41):
        omega = 1e2
        k = _kappa(omega * math.sin(theta), -omega * math.cos(theta), 1.0)
        ref = kappa_weak_asymptote(theta, v)
        worst = max(worst, abs(k - ref) / abs(ref))
    ok = criterion(2, res <= 5e-3 and worst <= 2e-2,
                   f"resonance {res:.2e} (<= 5e-3), asymptote {worst:.2e} (<= 2e-2)")
    assert ok


def test_table_oracles(criterion):
    rng = np.random.default_rng(20)
    omegas = rng.uniform(0.05, 5.0, 20)
    deltas = rng.uniform(-5.0, 5.0, 20)
    Vs = rng.choice([-1, 1], 20) * rng.uniform(0.1, 50.0, 20)
    dev = max(table_oracles(EffectiveParams(o, d), InteractionSpec(V)).max_deviation
              for o, d, V in zip(omegas, deltas, Vs))
    ok = criterion(3, dev <= 1e-10, f"max deviation {dev:.2e} (<= 1e-10)")
    assert ok


def test_echo_gate_construction(criterion):
    phis = np.linspace(-math.pi, math.pi, 20)
    worst = max(abs(1 - ms_fidelity(echo_composite(u_kappa(phi, math.pi / 2))))
                for phi in phis)
    ok = criterion(4, worst <= 1e-10, f"max |1 - F| {worst:.2e} over 20 phi_1")
    assert ok


def test_forces(criterion):
    c6, omega = 1.0, 1.0  # R_block = 1
    core = force_table(np.linspace(0.05, 0.3, 26), omega, 0.0)
    plateau = max(abs(r["dkappa_dR"]) for r in core)
    far = dressed_force(4.0, omega, 0.0, c6)
    quarter = abs(far.hellmann_feynman / quarter_vdw_force(4.0, c6) - 1)
    worst_route = max(dressed_force(R, omega, delta, c6, rtol=np.inf).relative_difference
                      for R in np.linspace(0.3, 4.0, 38) for delta in (0.0, -0.5))
    ok = criterion(9, plateau <= 1e-3 and quarter <= 0.05 and worst_route <= 1e-3,
                   f"core |dk/dR| {plateau:.2e} (<= 1e-3), quarter-vdW {quarter:.2e} "
                   f"(<= 5e-2), FD vs eigenstate {worst_route:.1e} (<= 1e-3)")
    assert ok


def test_propagator_oracles(criterion):
    v = InteractionSpec(10.0)
    tol = 1e-8
    rabi = Generator(Drive.constant(EffectiveParams(1.0, 0.0), (0, math.pi)), v)
    tr = propagate(rabi, basis_vector("01"), (0, math.pi), tol)
    transfer = abs(1 - abs(tr.amplitudes[-1][basis_index("0r")]) ** 2)

    gamma = 0.7
    decay = Generator(Drive.constant(EffectiveParams(0.0, 0.0, gamma_r=gamma), (0, 5)), v)
    tr = propagate(decay, basis_vector("0r"), (0, 5), tol)
    norm_err = float(np.max(np.abs(tr.norms ** 2 - np.exp(-gamma * tr.times))))

    ramp = one_photon_ramp(STRONG_ONE_PHOTON)
    gen = Generator(Drive.one_photon(ramp), v)
    ref = propagate(gen, basis_vector("11"), ramp.window, 1e-12).amplitudes[-1]
    errs = [np.linalg.norm(propagate(gen, basis_vector("11"), ramp.window, t).amplitudes[-1]
                           - ref) for t in (1e-6, 5e-7)]
    halving = errs[1] < errs[0] <= 1e-6 * ramp.duration
    ok = criterion(10, transfer <= tol and norm_err <= 10 * tol and halving,
                   f"pi-pulse {transfer:.1e}, norm {norm_err:.1e}, "
                   f"halving {errs[0]:.1e} -> {errs[1]:.1e}")
    assert ok


def test_kappa_versus_omega_shape(criterion):
    omegas = np.logspace(-3, -2, 21)  # V = 1
    r2 = []
    for slope in (0.0, -0.5):  # delta / omega
        k = np.array([_kappa(o, slope * o, 1.0) for o in omegas])
        fit = np.polyfit(omegas, k, 1)
        resid = k - np.polyval(fit, omegas)
        r2.append(1 - np.sum(resid ** 2) / np.sum((k - k.mean()) ** 2))
    flat = max(abs(_kappa(o, 0.0, 1.0) / 0.25 - 1) for o in np.logspace(2, 3, 11))
    large = max(abs(_kappa(o, s * o, 1.0)) for o in np.logspace(-3, 3, 121)
                for s in (-5.0, -10.0, -20.0))
    ok = criterion(11, min(r2) >= 0.999 and flat <= 0.02 and large <= 0.02,
                   f"R^2 {min(r2):.6f}, weak flatness {flat:.2e}, "
                   f"large-detuning max |k|/|V| {large:.2e}")
    assert ok


# --- 5-8: optimizations ------------------------------------------------------------------

@pytest.fixture(scope="module")
def one_photon_gate():
    return optimize_ramp(OptimizationProblem("one-photon", blockade_ratio=0.1, budget=100))


@pytest.fixture(scope="module")
def two_photon_gate():
    return optimize_ramp(OptimizationProblem("two-photon", blockade_ratio=0.1, budget=100))


def test_closed_system_passage(criterion, one_photon_gate):
    rep = one_photon_gate.report
    ok = criterion(5, rep.fidelity >= 0.999 and rep.rr_max <= 1e-2,
                   f"F {rep.fidelity:.6f} (>= 0.999), max |r,r> {rep.rr_max:.2e} (<= 1e-2)")
    assert ok


def test_integrated_rydberg_population(criterion, one_photon_gate, two_photon_gate):
    one = one_photon_gate.report.t_r / TWO_PI
    two = two_photon_gate.report.t_r / TWO_PI
    ok_one = abs(one / 0.89 - 1) <= 0.10
    ok_two = abs(two / 0.95 - 1) <= 0.10
    ok = criterion(6, ok_one and ok_two,
                   f"one-photon {one:.3f} (0.89 +- 10%: {'ok' if ok_one else 'out'}), "
                   f"two-photon {two:.3f} (0.95 +- 10%: {'ok' if ok_two else 'out'}) "
                   f"x 2pi/Omega")
    assert ok


def test_open_system_fidelity(criterion):
    ga = [0.1, 10.0, 1000.0]
    powers = [1e3, 1e4, 1e5]
    res = scan_fidelity_landscape(ga, powers, budget=25, workers=default_workers())
    assert not any(r["error"] for r in res.rows)
    F = np.array([r["fidelity"] for r in res.rows]).reshape(len(ga), len(powers))
    favourable = F[0, powers.index(1e4)]
    slack = 1e-6  # inner scalar search resolution
    better_small_ga = bool(np.all(np.diff(F, axis=0) <= slack))
    better_power = bool(np.all(np.diff(F, axis=1) >= -slack))
    ok = criterion(7, favourable > 0.99 and better_small_ga and better_power,
                   f"F at Gamma_a/Gamma_r = 0.1, power 1e4: {favourable:.5f} (> 0.99); "
                   f"monotone in Gamma_a {better_small_ga}, in power {better_power}")
    assert ok


def test_saturation(criterion):
    ratios = [0.1, 1.0, 10.0, 100.0]
    ok, parts = True, []
    for family in ("one-photon", "two-photon"):
        rows = scan_tr_vs_blockade(ratios, family, rr_cap=0.05,
                                   workers=default_workers()).rows
        errors = [r["error"] for r in rows if r["error"]]
        tv = [r["t_r_times_V"] for r in rows if not r["error"]]
        feasible = all(r["feasible"] for r in rows if not r["error"])
        decreasing = len(tv) == len(ratios) and all(a > b for a, b in zip(tv, tv[1:]))
        sat = [t / math.pi for r, t in zip(ratios, tv) if r >= 100]
        saturated = bool(sat) and all(4 <= x <= 6 for x in sat)
        ok = ok and not errors and feasible and decreasing and saturated
        parts.append(f"{family} t_r|V|/pi = " + ", ".join(f"{t / math.pi:.3g}" for t in tv)
                     + ("" if feasible else " (constraints violated)")
                     + (f" errors {errors}" if errors else ""))
    ok = criterion(8, ok, f"ratios {ratios}: " + "; ".join(parts))
    assert ok
