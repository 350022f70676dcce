"""Initial state, step propagator and time stepping on the restricted basis.

The system is closed and starts pure, so the state vector is propagated
instead of the density matrix; ``rho = |psi><psi|`` is only formed when a
reduction needs it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .basis import BasisState, StateSpace, enumerate_states, paper_initial_support
from .model import ModelParams, RuleSet, build_hamiltonian, paper_rules
from .numerics import expm_ptsim

DEFAULT_DT = 1e-9
DEFAULT_STEPS = 10_000
NORM_ABORT = 1e-6

# (l1, l2) -> amplitude of |0 0 0 l1 l2 1 1>
INITIAL_AMPLITUDES = {(0, 0): 0.5, (1, 0): 0.5, (0, 1): -0.5, (1, 1): -0.5}


class NormDriftError(RuntimeError):
    pass


def paper_space(rules: RuleSet | None = None) -> StateSpace:
    return enumerate_states(paper_initial_support(), paper_rules() if rules is None else rules)


def initial_state(space: StateSpace) -> np.ndarray:
    """Both electrons on the first nucleus, written in the molecular-orbital
    basis: an equal-weight superposition over the four orbital settings with
    signs (+, +, -, -) for (l1, l2) = (0,0), (1,0), (0,1), (1,1)."""
    psi = np.zeros(len(space), dtype=complex)
    for (l1, l2), amp in INITIAL_AMPLITUDES.items():
        state = BasisState(0, 0, 0, l1, l2, 1, 1)
        if state not in space:
            raise ValueError(f"initial component {state.label()} missing from the space")
        psi[space.index_of[state]] = amp
    return psi


def propagator(h, dt: float, hbar: float = 1.0, M: int = 20, taylor_order: int = 4) -> np.ndarray:
    if dt <= 0:
        raise ValueError("dt must be positive")
    return expm_ptsim(-1j * np.asarray(h) * (dt / hbar), M=M, taylor_order=taylor_order)


class Observables(NamedTuple):
    norm: np.ndarray | float
    energy: np.ndarray | float


def observables(psi, h) -> Observables:
    """Norm and mean energy; ``psi`` may be one vector or a stack of rows."""
    psi = np.asarray(psi)
    h = np.asarray(h)
    if psi.shape[-1] != h.shape[0]:
        raise ValueError(f"state of length {psi.shape[-1]} vs Hamiltonian {h.shape}")
    norm = np.linalg.norm(psi, axis=-1)
    energy = np.einsum("...i,ij,...j->...", psi.conj(), h, psi).real
    if psi.ndim == 1:
        return Observables(float(norm), float(energy))
    return Observables(norm, energy)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_samples, dim)
    space: StateSpace
    hamiltonian: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def observables(self) -> Observables:
        return observables(self.states, self.hamiltonian)


def run(
    params: ModelParams,
    space: Optional[StateSpace] = None,
    dt: float = DEFAULT_DT,
    n_steps: int = DEFAULT_STEPS,
    sample_every: int = 1,
    psi0: Optional[np.ndarray] = None,
    M: int = 20,
    taylor_order: int = 4,
) -> Trajectory:
    """Step ``psi <- U psi`` with a single precomputed propagator.

    Samples are taken at ``t = 0`` and after every ``sample_every`` steps.

    Raises
    ------
    NormDriftError
        When a sample's norm departs from 1 by more than 1e-6; this means the
        step or the scaling depth is badly chosen.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    if sample_every < 1:
        raise ValueError("sample_every must be at least 1")
    space = paper_space() if space is None else space
    h = build_hamiltonian(params, space)
    u = propagator(h, dt, params.hbar, M=M, taylor_order=taylor_order)
    psi = initial_state(space) if psi0 is None else np.array(psi0, dtype=complex)

    n_samples = n_steps // sample_every + 1
    states = np.empty((n_samples, len(space)), dtype=complex)
    states[0] = psi
    for s in range(1, n_samples):
        for _ in range(sample_every):
            psi = u @ psi
        drift = abs(np.linalg.norm(psi) - 1.0)
        if drift > NORM_ABORT:
            raise NormDriftError(
                f"norm drift {drift:.3e} after {s * sample_every} steps "
                f"(dt={dt:g}, M={M}); reduce dt or raise M"
            )
        states[s] = psi
    times = np.arange(n_samples) * (sample_every * dt)
    return Trajectory(times, states, space, h)
