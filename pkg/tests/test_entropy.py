import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qedentropy.basis import FULL_DIM, StateSpace, REFERENCE_BASIS, unpack
from qedentropy.entropy import (
    Bipartition, embed, entropies, preset_partitions, reduced_density, von_neumann_entropy,
)
from qedentropy.evolve import initial_state, run

from oracles import entropy_numpy, partial_trace_bruteforce

FULL_SPACE = StateSpace(tuple(unpack(i) for i in range(FULL_DIM)))


def random_register(rng):
    psi = rng.normal(size=FULL_DIM) + 1j * rng.normal(size=FULL_DIM)
    return psi / np.linalg.norm(psi)


def test_three_qubit_example():
    # (|000> + |011>)/sqrt2 on qubits (0, 1, 2): tracing qubits 1 and 2 leaves I/2
    psi = np.zeros(FULL_DIM, dtype=complex)
    psi[0b0000000] = psi[0b0110000] = 1 / np.sqrt(2)
    rho = reduced_density(psi, FULL_SPACE, (0,))
    np.testing.assert_allclose(rho, np.diag([1.0, 0.0]))
    rho = reduced_density(psi, FULL_SPACE, (1,))
    np.testing.assert_allclose(rho, np.eye(2) / 2)
    assert von_neumann_entropy(rho) == pytest.approx(1.0)
    rho12 = reduced_density(psi, FULL_SPACE, (1, 2))
    np.testing.assert_allclose(rho12, [[.5, 0, 0, .5], [0, 0, 0, 0], [0, 0, 0, 0], [.5, 0, 0, .5]])
    assert von_neumann_entropy(rho12) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("keep", [(0,), (2,), (0, 1), (1, 0), (0, 1, 2), (3, 6), (6, 2, 4)])
def test_matches_bruteforce(rng, keep):
    psi = random_register(rng)
    got = reduced_density(psi, FULL_SPACE, keep)
    np.testing.assert_allclose(got, partial_trace_bruteforce(psi, keep), atol=1e-14)


def test_restricted_matches_bruteforce(space, params):
    psi = run(params, space, n_steps=300).states[-1]
    full = embed(psi, space)
    for part in preset_partitions().values():
        rho = reduced_density(psi, space, part)
        np.testing.assert_allclose(rho, partial_trace_bruteforce(full, part.keep), atol=1e-14)
        assert von_neumann_entropy(rho) == pytest.approx(entropy_numpy(rho), abs=1e-10)


def test_reduced_is_density_matrix(rng):
    rho = reduced_density(random_register(rng), FULL_SPACE, (1, 3, 5))
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-15)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.linalg.eigvalsh(rho).min() > -1e-14


def test_product_state_has_zero_entropy():
    a = np.array([0.6, 0.8j])
    psi = a
    for _ in range(6):
        psi = np.kron(psi, a)
    for keep in [(0,), (2, 5), (0, 1, 2, 3)]:
        assert von_neumann_entropy(reduced_density(psi, FULL_SPACE, keep)) == pytest.approx(0, abs=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 8, 16])
def test_maximally_mixed(n):
    assert von_neumann_entropy(np.eye(n) / n) == pytest.approx(np.log2(n))


def test_pure_state_projector():
    v = np.array([1, 1j, -1]) / np.sqrt(3)
    assert von_neumann_entropy(np.outer(v, v.conj())) == 0.0


def test_negative_eigenvalue_rejected():
    with pytest.raises(ValueError):
        von_neumann_entropy(np.diag([1.1, -0.1]))


def test_tiny_negative_clamped():
    assert von_neumann_entropy(np.diag([1.0, -1e-13])) == 0.0


def test_initial_state_separable(space):
    psi = initial_state(space)
    for name, part in preset_partitions().items():
        assert von_neumann_entropy(reduced_density(psi, space, part)) == 0.0, name


def test_presets():
    p = preset_partitions()
    assert {k: v.keep for k, v in p.items()} == {
        "S_Omega": (0, 1), "S_Omega_up": (0,), "S_Omega_down": (1,),
        "S_omega": (2,), "S_Omega_omega": (0, 1, 2),
    }


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1),
       st.sets(st.integers(0, 6), min_size=1, max_size=6))
def test_complement_symmetry(seed, keep):
    part = Bipartition(tuple(sorted(keep)))
    psi = random_register(np.random.default_rng(seed))
    s = von_neumann_entropy(reduced_density(psi, FULL_SPACE, part))
    sc = von_neumann_entropy(reduced_density(psi, FULL_SPACE, part.complement()))
    assert s == pytest.approx(sc, abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.permutations(range(17)))
def test_basis_order_does_not_matter(params, order):
    base = StateSpace(REFERENCE_BASIS)
    perm = base.permuted(order)
    psi = run(params, base, n_steps=200).states[-1]
    psi_perm = np.array([psi[base.index(s)] for s in perm.states])
    for part in preset_partitions().values():
        a = von_neumann_entropy(reduced_density(psi, base, part))
        b = von_neumann_entropy(reduced_density(psi_perm, perm, part))
        assert a == pytest.approx(b, abs=1e-12)


def test_keep_order_permutes_rows(rng):
    psi = random_register(rng)
    a = reduced_density(psi, FULL_SPACE, (0, 2))
    b = reduced_density(psi, FULL_SPACE, (2, 0))
    swap = [0, 2, 1, 3]
    np.testing.assert_allclose(b, a[np.ix_(swap, swap)], atol=1e-15)


@pytest.mark.parametrize("keep", [(), (0, 0), (7,), tuple(range(7))])
def test_bad_bipartitions(keep):
    with pytest.raises(ValueError):
        Bipartition(keep)


def test_labels():
    assert Bipartition((0, 2)).label == "S_keep_0_2"
    assert Bipartition((0, 1), "S_Omega").describe() == "{p1,p2}"


def test_batched_entropies_match_single(params, space):
    states = run(params, space, n_steps=50).states
    parts = preset_partitions()
    series = entropies(states, space, parts, chunk=7)
    for name, part in parts.items():
        single = [von_neumann_entropy(reduced_density(s, space, part)) for s in states]
        np.testing.assert_allclose(series[name], single, atol=1e-13)
