import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydress import dynamics
from rydress.dynamics import (Drive, Generator, PropagationError, adiabaticity_monitor,
                              dormand_prince, integrated_rydberg_population, propagate,
                              propagate_many)
from rydress.model import EffectiveParams, InteractionSpec, basis_vector
from rydress.optimize import STRONG_ONE_PHOTON, one_photon_ramp


def test_tableau_matches_reference_tables():
    from scipy.integrate._ivp.rk import RK45
    a = np.zeros(RK45.A.shape)
    for i, row in enumerate(dynamics._A):
        a[i, :len(row)] = [float(x) for x in row]
    assert np.allclose(a, RK45.A, atol=1e-15)
    for ours, ref in ((dynamics._C, RK45.C), (dynamics._B, RK45.B), (dynamics._E, RK45.E),
                      (dynamics._P, RK45.P)):
        assert np.allclose(np.array(ours, float), ref, atol=1e-15)


def test_scalar_exponential():
    t, ys, stats = dormand_prince(lambda t, y: -1j * y, (0, 10), np.array([1.0]), 1e-10,
                                  np.linspace(0, 10, 11))
    assert np.max(np.abs(ys[:, 0] - np.exp(-1j * t))) < 1e-9
    assert stats["accepted"] > 0


def test_empty_window():
    t, ys, _ = dormand_prince(lambda t, y: y, (1.0, 1.0), np.array([2.0]))
    assert np.all(ys == 2.0)


def test_nonfinite_rhs_raises():
    with pytest.raises(PropagationError) as info:
        dormand_prince(lambda t, y: y * (np.nan if t > 0.5 else 1.0), (0, 1), np.array([1.0]))
    assert info.value.t >= 0


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3), st.floats(-2, 2), st.floats(-20, 20))
def test_hermitian_evolution_preserves_norm(o, d, v):
    g = Generator(Drive.constant(EffectiveParams(o, d), (0, 5)), InteractionSpec(v))
    tr = propagate(g, basis_vector("11"), (0, 5), 1e-9, n_samples=11)
    assert np.max(np.abs(tr.norms - 1)) < 1e-7


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3), st.floats(-2, 2))
def test_constant_drive_matches_matrix_exponential(o, d):
    from scipy.linalg import expm
    v = InteractionSpec(7.0)
    g = Generator(Drive.constant(EffectiveParams(o, d), (0, 4)), v)
    tr = propagate(g, basis_vector("11"), (0, 4), 1e-10, n_samples=2)
    ref = expm(-1j * 4 * g(0.0)) @ basis_vector("11")
    assert np.linalg.norm(tr.amplitudes[-1] - ref) < 1e-8


def test_batched_columns_match_single():
    ramp = one_photon_ramp(STRONG_ONE_PHOTON)
    g = Generator(Drive.one_photon(ramp), InteractionSpec(10.0))
    cols = np.stack([basis_vector("11"), basis_vector("01")], axis=1)
    _, amps = propagate_many(g, cols, ramp.window, 1e-9)
    single = propagate(g, basis_vector("01"), ramp.window, 1e-9, n_samples=2)
    assert np.linalg.norm(amps[-1][:, 1] - single.amplitudes[-1]) < 1e-7


def test_trajectory_csv(tmp_path):
    g = Generator(Drive.constant(EffectiveParams(1.0, 0.0), (0, 1)), InteractionSpec(5.0))
    tr = propagate(g, basis_vector("11"), (0, 1), n_samples=5)
    tr.to_csv(tmp_path / "t.csv")
    rows = list(csv.DictReader(open(tmp_path / "t.csv")))
    assert len(rows) == 5 and math.isclose(float(rows[0]["pop_11"]), 1.0)


def test_integrated_population_oracle():
    # single-atom Rabi at resonance: P_r = sin^2(t/2) per atom, blocked pair ignored
    g = Generator(Drive.constant(EffectiveParams(1.0, 0.0), (0, 2 * math.pi)),
                  InteractionSpec(0.0))
    tr = propagate(g, basis_vector("01"), (0, 2 * math.pi), 1e-10, n_samples=401)
    assert math.isclose(integrated_rydberg_population(tr), math.pi, rel_tol=1e-6)
    coarse = propagate(g, basis_vector("01"), (0, 2 * math.pi), 1e-10, n_samples=5)
    with pytest.raises(ValueError):
        integrated_rydberg_population(coarse, rtol=1e-6)


def test_adiabatic_ramp_stays_dressed():
    ramp = one_photon_ramp(STRONG_ONE_PHOTON)
    g = Generator(Drive.one_photon(ramp), InteractionSpec(10.0))
    tr = propagate(g, basis_vector("11"), ramp.window, 1e-9, n_samples=201)
    rep = adiabaticity_monitor(tr, g)
    assert rep.score > 0.95 and rep.overlaps[-1] > 0.999
    sudden = Generator(Drive.constant(EffectiveParams(1.0, 0.0), (0, 3)), InteractionSpec(10.0))
    tr = propagate(sudden, basis_vector("11"), (0, 3), 1e-9, n_samples=51)
    assert adiabaticity_monitor(tr, sudden).score < 0.9


def test_decay_window_norm():
    g = Generator(Drive.constant(EffectiveParams(0.0, 0.0, gamma_r=0.3), (0, 4)),
                  InteractionSpec(1.0))
    tr = propagate(g, basis_vector("rr"), (0, 4), 1e-9)
    # both atoms decay: |r,r> loses population at 2 gamma
    assert math.isclose(tr.norms[-1] ** 2, math.exp(-0.6 * 4), rel_tol=1e-7)
