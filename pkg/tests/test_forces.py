import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydress.forces import (ForceMismatch, PairPotentialModel, adiabatic_pair_potential,
                            blockade_radius, dressed_force, force_table, quarter_vdw_force,
                            write_force_csv)


def test_blockade_radius():
    assert math.isclose(blockade_radius(64.0, 1.0), 2.0)
    with pytest.raises(ValueError):
        blockade_radius(-1.0, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 5.0), st.floats(-1.0, -0.01))
def test_force_routes_agree(R, delta):
    f = dressed_force(R, 1.0, delta, 1.0)
    assert f.relative_difference < 1e-6


def test_mismatch_raised():
    with pytest.raises(ForceMismatch):
        dressed_force(1.0, 1.0, 0.0, 1.0, rtol=0.0, atol=0.0, step=0.3)


def test_weak_dressing_tail_is_quarter_vdw():
    for R in (3.0, 4.0, 6.0):
        f = dressed_force(R, 1.0, 0.0, 1.0)
        assert abs(f.hellmann_feynman / quarter_vdw_force(R, 1.0) - 1) < 0.01


def test_kappa_monotone_and_transition_window():
    R = np.linspace(0.1, 5.0, 400)
    curve = adiabatic_pair_potential(R, 1.0, 0.0, 1.0)
    assert np.all(np.diff(curve.kappa) < 0)
    rows = force_table(R)
    slope = np.abs([r["dkappa_dR"] for r in rows])
    assert 0.5 <= R[int(np.argmax(slope))] <= 2.0


def test_anti_blockade_rows_flagged():
    delta = 0.5  # V = 2 delta at R = 1
    curve = adiabatic_pair_potential(np.array([0.8, 1.0, 1.5]), 1e-3, delta, 1.0, branch="+")
    assert curve.flagged[1]


def test_grid_validation():
    with pytest.raises(ValueError):
        adiabatic_pair_potential(np.array([1.0, 0.5]), 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        PairPotentialModel(1.0).V(-1.0)


def test_csv(tmp_path):
    write_force_csv(tmp_path / "f.csv", force_table(np.array([0.5, 1.0])))
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0].startswith("R_over_R_block") and len(lines) == 3
