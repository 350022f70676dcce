import numpy as np
import pytest

from qedentropy.basis import REFERENCE_BASIS, BasisState, StateSpace
from qedentropy.model import (
    ModelParams, build_hamiltonian, edge_list, paper_rules, validate_rwa,
)

from oracles import register_hamiltonian

G = 1e7

# Interaction graph in reference numbering, worked out by hand from the four rules.
INTERACTION_EDGES = {
    ("R4", 0, 1), ("R4", 2, 3), ("R4", 4, 5), ("R4", 6, 7),
    ("R3", 0, 8), ("R3", 2, 12), ("R3", 4, 14), ("R3", 6, 16),
    ("R1", 10, 14), ("R1", 13, 16), ("R1", 11, 15),
    ("R2", 9, 12), ("R2", 15, 16), ("R2", 11, 13),
}


def tidx(space, n):
    return space.index(REFERENCE_BASIS[n])


def test_edges_match_interaction_graph():
    assert edge_list(StateSpace(REFERENCE_BASIS)) == INTERACTION_EDGES


def test_offdiagonal_pattern_is_graph(space, hamiltonian):
    pattern = {(i, j) for i, j in zip(*np.nonzero(hamiltonian)) if i < j}
    expected = {(min(tidx(space, a), tidx(space, b)), max(tidx(space, a), tidx(space, b)))
                for _, a, b in INTERACTION_EDGES}
    assert pattern == expected


def test_hermitian_exactly(hamiltonian):
    assert np.array_equal(hamiltonian, hamiltonian.T.conj())


def test_tunnelling_element(space, hamiltonian, params):
    i, j = tidx(space, 0), tidx(space, 1)
    assert hamiltonian[i, j] == params.zeta
    assert hamiltonian[j, i] == params.zeta


def test_bond_element(space, hamiltonian, params):
    assert hamiltonian[tidx(space, 0), tidx(space, 8)] == params.g_bond


def test_photon_element(space, hamiltonian, params):
    assert hamiltonian[tidx(space, 14), tidx(space, 10)] == params.g_up


def test_diagonal_three_quanta(space, hamiltonian, params):
    assert hamiltonian[tidx(space, 11), tidx(space, 11)] == pytest.approx(
        params.hbar * (params.omega_up + params.omega_down + params.omega_ph), rel=1e-15)


def test_zero_params_give_zero_matrix(space):
    zero = ModelParams(hbar=0, omega_up=0, omega_down=0, omega_ph=0,
                       g_up=0, g_down=0, g_bond=0, zeta=0)
    assert not build_hamiltonian(zero, space).any()


@pytest.mark.parametrize("p", [
    ModelParams(),
    ModelParams(g_up=2.3 * G, g_down=0.7 * G, g_bond=0.31 * G, zeta=1.9 * G, hbar=1.3),
    ModelParams(omega_up=2e9, omega_down=5e8, omega_ph=3e7),
])
def test_matches_register_operator_form(space, p):
    full = register_hamiltonian(p)
    idx = list(space.full_index_of)
    np.testing.assert_allclose(build_hamiltonian(p, space), full[np.ix_(idx, idx)],
                               rtol=0, atol=1e-6)
    outside = [i for i in range(128) if i not in idx]
    assert not full[np.ix_(outside, idx)].any()


def test_rule_involution(space):
    for s in space.states:
        for rule in paper_rules():
            t = rule.forward(s)
            if t is not None:
                assert rule.backward(t) == s
            t = rule.backward(s)
            if t is not None:
                assert rule.forward(t) == s


def test_rule_outside_space_is_error():
    partial = StateSpace(REFERENCE_BASIS[:8])
    with pytest.raises(ValueError, match="outside"):
        build_hamiltonian(ModelParams(), partial)


def test_rwa_defaults():
    check = validate_rwa(ModelParams())
    assert check.ratio_photon == pytest.approx(0.01)
    assert check.ratio_phonon == pytest.approx(0.01)
    assert check.ok


def test_rwa_strong_coupling():
    p = ModelParams(g_up=1e9)
    check = validate_rwa(p)
    assert check.ratio_photon == pytest.approx(1.0)
    assert not check.ok


def test_rwa_no_coupling():
    check = validate_rwa(ModelParams(g_up=0, g_down=0, g_bond=0, zeta=0))
    assert check == (0.0, 0.0, True)


def test_rwa_zero_frequency():
    with pytest.raises(ValueError):
        validate_rwa(ModelParams(omega_ph=0))


def test_params_reject_negative():
    with pytest.raises(ValueError):
        ModelParams(zeta=-1)


def test_params_validate_positive_frequency():
    with pytest.raises(ValueError):
        ModelParams(omega_up=0).validate()


def test_g_omega_alias():
    p = ModelParams().with_(g_Omega=3e7)
    assert p.g_up == p.g_down == 3e7
    with pytest.raises(KeyError):
        ModelParams().with_(bogus=1.0)
