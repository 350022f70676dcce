"""Reduced density matrices over qubit subsets and von Neumann entropies."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .basis import FIELDS, FULL_DIM, NUM_QUBITS, StateSpace
from .numerics import eigvals_hermitian

EIG_CLAMP = 1e-12
EIG_NEGATIVE_LIMIT = -1e-8


@dataclass(frozen=True)
class Bipartition:
    """Kept qubits (0=p1, 1=p2, 2=m, 3=l1, 4=l2, 5=L, 6=k); the rest are traced."""

    keep: tuple[int, ...]
    name: Optional[str] = None

    def __post_init__(self) -> None:
        keep = tuple(int(q) for q in self.keep)
        if not keep:
            raise ValueError("keep set is empty")
        if len(set(keep)) != len(keep):
            raise ValueError(f"keep set {keep} has repeated qubits")
        if any(not 0 <= q < NUM_QUBITS for q in keep):
            raise ValueError(f"keep set {keep} has qubits outside 0..{NUM_QUBITS - 1}")
        if len(keep) == NUM_QUBITS:
            raise ValueError("keep set covers the whole register")
        object.__setattr__(self, "keep", keep)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return "S_keep_" + "_".join(str(q) for q in self.keep)

    def complement(self) -> "Bipartition":
        return Bipartition(tuple(q for q in range(NUM_QUBITS) if q not in self.keep))

    def describe(self) -> str:
        return "{" + ",".join(FIELDS[q] for q in self.keep) + "}"


def preset_partitions() -> dict[str, Bipartition]:
    """Photons, each photon mode, phonon, photons+phonon (CSV column names)."""
    presets = {
        "S_Omega": (0, 1),
        "S_Omega_up": (0,),
        "S_Omega_down": (1,),
        "S_omega": (2,),
        "S_Omega_omega": (0, 1, 2),
    }
    return {name: Bipartition(keep, name) for name, keep in presets.items()}


def embed(psi, space: StateSpace) -> np.ndarray:
    """Scatter restricted amplitudes into the 128-entry register (rows allowed)."""
    psi = np.asarray(psi)
    if psi.shape[-1] != len(space):
        raise ValueError(f"state of length {psi.shape[-1]} vs space of {len(space)}")
    full = np.zeros(psi.shape[:-1] + (FULL_DIM,), dtype=complex)
    full[..., list(space.full_index_of)] = psi
    return full


def reduced_density(psi, space: StateSpace, part: Bipartition | Sequence[int]) -> np.ndarray:
    """``rho_K[i, j] = sum_env psi(i, env) conj(psi(j, env))``.

    Kept qubits stay in the order given by ``part.keep`` and index rows
    big-endian. ``psi`` may carry leading batch axes, giving ``(..., d, d)``.
    """
    if not isinstance(part, Bipartition):
        part = Bipartition(tuple(part))
    full = embed(psi, space)
    batch = full.shape[:-1]
    keep = list(part.keep)
    rest = [q for q in range(NUM_QUBITS) if q not in keep]
    nb = len(batch)
    tensor = full.reshape(batch + (2,) * NUM_QUBITS)
    axes = list(range(nb)) + [nb + q for q in keep] + [nb + q for q in rest]
    mat = tensor.transpose(axes).reshape(batch + (1 << len(keep), 1 << len(rest)))
    return mat @ np.conj(np.swapaxes(mat, -1, -2))


def von_neumann_entropy(rho) -> np.ndarray | float:
    """``-sum(lam * log2(lam))`` in bits; eigenvalues under 1e-12 count as 0.

    The result is clipped to ``[0, log2(d)]``: a trace a few ulps away from 1
    would otherwise push a maximally mixed qubit just past 1 bit.

    Raises
    ------
    ValueError
        If an eigenvalue is below -1e-8 (not a density matrix).
    """
    rho = np.asarray(rho)
    lam = eigvals_hermitian(rho)
    worst = float(lam.min(initial=0.0))
    if worst < EIG_NEGATIVE_LIMIT:
        raise ValueError(f"density matrix has eigenvalue {worst:.3e}")
    lam = np.where(lam < EIG_CLAMP, 0.0, lam)
    # 0 log 0 := 0
    terms = lam * np.log2(np.where(lam > 0, lam, 1.0))
    s = np.clip(-terms.sum(axis=-1), 0.0, np.log2(rho.shape[-1])) + 0.0  # no -0.0
    return float(s) if s.ndim == 0 else s


def entropies(
    states,
    space: StateSpace,
    parts: dict[str, Bipartition],
    chunk: int = 8192,
) -> dict[str, np.ndarray]:
    """Entropy series for every partition over a ``(n, dim)`` stack of states."""
    states = np.atleast_2d(states)
    out = {name: np.empty(len(states)) for name in parts}
    for start in range(0, len(states), chunk):
        block = states[start:start + chunk]
        for name, part in parts.items():
            out[name][start:start + len(block)] = von_neumann_entropy(
                reduced_density(block, space, part)
            )
    return out
