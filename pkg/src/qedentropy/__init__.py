"""Entropic dynamics of a seven-qubit cavity-QED bond-formation model."""

from .basis import (
    REFERENCE_BASIS, BasisState, StateSpace, enumerate_states, full_index,
    paper_initial_support, unpack,
)
from .entropy import Bipartition, preset_partitions, reduced_density, von_neumann_entropy
from .evolve import initial_state, observables, paper_space, propagator, run
from .harness import (
    EntropyTrace, ParamAxis, SweepGrid, check_inequalities, envelope,
    envelope_period, peak_entropy, simulate, sweep2d,
)
from .model import ModelParams, build_hamiltonian, paper_rules, validate_rwa
from .numerics import eigvals_hermitian, expm_oracle, expm_ptsim

__version__ = "0.1.0"
