import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rydress.model import (EffectiveParams, EliminationWarning, ExcitationScheme,
                           InteractionSpec, adiabatic_elimination, basis_index,
                           bright_state, dark_state, elimination_coefficients,
                           effective_hamiltonian, swap_operator, two_atom_hamiltonian)
from rydress.spectrum import pair_block

finite = st.floats(-20, 20, allow_nan=False)
positive = st.floats(0.01, 20)


def test_basis_order():
    assert [basis_index(s) for s in ("00", "01", "10", "11", "rr")] == [0, 1, 3, 4, 8]


@given(positive, finite, finite)
def test_hamiltonian_hermitian_and_swap_symmetric(o, d, v):
    h = two_atom_hamiltonian(EffectiveParams(o, d), InteractionSpec(v))
    assert np.allclose(h, h.conj().T)
    s = swap_operator()
    assert np.allclose(s @ h @ s, h)


@given(positive, finite, finite)
def test_dark_state_decouples(o, d, v):
    h = two_atom_hamiltonian(EffectiveParams(o, d), InteractionSpec(v))
    dark = dark_state()
    assert abs(bright_state().conj() @ h @ dark) < 1e-12
    assert abs(dark.conj() @ h @ dark + d) < 1e-12  # dark state keeps energy -delta


@given(positive, finite, finite)
def test_pair_block_matches_full_hamiltonian(o, d, v):
    p, spec = EffectiveParams(o, d), InteractionSpec(v)
    h = two_atom_hamiltonian(p, spec)
    basis = np.zeros((9, 3), complex)
    basis[basis_index("11"), 0] = 1
    basis[:, 1] = bright_state()
    basis[basis_index("rr"), 2] = 1
    assert np.allclose(basis.conj().T @ h @ basis, pair_block(p, spec))


@given(positive, positive, st.floats(0, 2), st.floats(0, 2))
def test_decay_generator_is_dissipative(o1, x, ga, gr):
    """-Im part of H_eff must be positive semidefinite."""
    s = ExcitationScheme.two_photon(o1, 1.3 * o1, (5 + x) * o1, -(5.5 + x) * o1,
                                    gamma_a=ga, gamma_r=gr)
    h = effective_hamiltonian(s.effective(), InteractionSpec(3.0))
    g = 1j * (h - h.conj().T)  # = Gamma >= 0
    assert np.linalg.eigvalsh(g).min() > -1e-12


def _ladder(o1, o2, d1, d2):
    return np.array([[0, o1 / 2, 0], [o1 / 2, -d1, o2 / 2], [0, o2 / 2, -(d1 + d2)]])


@pytest.mark.parametrize("o1, o2, d1, d2", [(1.0, 1.4, 40.0, -40.0),
                                             (1.0, 2.0, 50.0, -49.0),
                                             (0.5, 1.0, -30.0, 31.0)])
def test_elimination_against_ladder_diagonalization(o1, o2, d1, d2):
    """Two-level effective model vs the exact 3-level ladder spectrum."""
    omega, delta, shift_1, *_ = elimination_coefficients(o1, o2, d1, d2)
    h2 = np.array([[shift_1, omega / 2], [omega / 2, shift_1 - delta]])
    w3 = np.linalg.eigvalsh(_ladder(o1, o2, d1, d2))
    near = np.sort(w3[np.argsort(np.abs(w3 - shift_1))[:2]])
    scale = max(o1, o2) ** 3 / abs(d1) ** 2
    assert np.allclose(near, np.linalg.eigvalsh(h2), atol=5 * scale)

    # the opposite shift sign misses by the full shift of |r>
    _, delta_p, *_ = elimination_coefficients(o1, o2, d1, d2, convention="as-printed")
    h2p = np.array([[shift_1, omega / 2], [omega / 2, shift_1 - delta_p]])
    assert not np.allclose(near, np.linalg.eigvalsh(h2p), atol=5 * scale)


def test_elimination_warns_outside_validity():
    s = ExcitationScheme.two_photon(1.0, 1.0, 2.0)
    with pytest.warns(EliminationWarning):
        p = adiabatic_elimination(s)
    assert not p.valid
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert adiabatic_elimination(ExcitationScheme.two_photon(1.0, 1.0, 50.0)).valid


def test_two_photon_defaults():
    s = ExcitationScheme.two_photon(1.0, 1.4, 10.0)
    p = s.effective()
    assert s.delta_ar == -10.0
    assert math.isclose(p.omega, 1.4 / 20)
    assert ExcitationScheme.from_dict(s.to_dict()) == s


def test_zero_intermediate_detuning():
    with pytest.raises(ZeroDivisionError):
        adiabatic_elimination(ExcitationScheme.two_photon(1.0, 1.0, 0.0, 1.0))


@settings(max_examples=50)
@given(st.floats(0.1, 10), st.floats(5, 200))
def test_from_c6(c6, R):
    v = InteractionSpec.from_c6(c6, R)
    assert math.isclose(v.V, c6 / R ** 6)
