"""Physical parameters, interaction rules and the restricted Hamiltonian."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .basis import BasisState, StateSpace

G_DEFAULT = 1e7

PARAM_KEYS = (
    "hbar", "omega_up", "omega_down", "omega_ph",
    "g_up", "g_down", "g_bond", "zeta",
)
FREQUENCY_KEYS = ("hbar", "omega_up", "omega_down", "omega_ph")
RWA_THRESHOLD = 0.1


@dataclass(frozen=True)
class ModelParams:
    """Frequencies in rad/s, couplings in energy units (``hbar`` = 1 by default).

    Defaults: both photon modes at 1e9, phonon at 1e8, photon couplings at
    g = 1e7, bond coupling 0.1 g and tunnelling g.
    """

    hbar: float = 1.0
    omega_up: float = 1e9
    omega_down: float = 1e9
    omega_ph: float = 1e8
    g_up: float = G_DEFAULT
    g_down: float = G_DEFAULT
    g_bond: float = 0.1 * G_DEFAULT
    zeta: float = G_DEFAULT

    def __post_init__(self) -> None:
        for f in fields(self):
            value = float(getattr(self, f.name))
            if not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value}")
            if value < 0:
                raise ValueError(f"{f.name} must be non-negative, got {value}")
            object.__setattr__(self, f.name, value)

    def validate(self) -> "ModelParams":
        """Require strictly positive frequencies and hbar."""
        for key in FREQUENCY_KEYS:
            if getattr(self, key) <= 0:
                raise ValueError(f"{key} must be strictly positive")
        return self

    def with_(self, **changes: float) -> "ModelParams":
        """``dataclasses.replace`` plus the alias ``g_Omega`` for both photon
        couplings."""
        if "g_Omega" in changes:
            g = changes.pop("g_Omega")
            changes.setdefault("g_up", g)
            changes.setdefault("g_down", g)
        unknown = set(changes) - set(PARAM_KEYS)
        if unknown:
            raise KeyError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return {key: getattr(self, key) for key in PARAM_KEYS}


@dataclass(frozen=True)
class Rule:
    """One interaction channel.

    The forward direction lowers the binary field ``lower`` from 1 to 0 and,
    when ``create`` is set, adds one quantum to that bosonic field. The matrix
    element is ``coupling * sqrt(n)`` with ``n`` the boson count after
    creation. ``guard`` may only read fields the rule does not change, so it
    evaluates identically on both ends of an edge.
    """

    name: str
    coupling: str
    lower: str
    create: Optional[str]
    guard: Callable[[BasisState], bool]

    def forward(self, state: BasisState) -> Optional[BasisState]:
        if getattr(state, self.lower) != 1 or not self.guard(state):
            return None
        changes = {self.lower: 0}
        if self.create is not None:
            changes[self.create] = getattr(state, self.create) + 1
        return state._replace(**changes)

    def backward(self, state: BasisState) -> Optional[BasisState]:
        if getattr(state, self.lower) != 0 or not self.guard(state):
            return None
        changes = {self.lower: 1}
        if self.create is not None:
            n = getattr(state, self.create)
            if n == 0:
                return None
            changes[self.create] = n - 1
        return state._replace(**changes)

    def factor(self, lowered: BasisState) -> float:
        """Bosonic enhancement for the edge whose lowered end is ``lowered``."""
        if self.create is None:
            return 1.0
        return math.sqrt(getattr(lowered, self.create))

    def amplitude(self, params: ModelParams, lowered: BasisState) -> float:
        return getattr(params, self.coupling) * self.factor(lowered)

    def neighbors(self, state: BasisState) -> list[tuple[BasisState, float]]:
        out = []
        target = self.forward(state)
        if target is not None:
            out.append((target, self.factor(target)))
        target = self.backward(state)
        if target is not None:
            out.append((target, self.factor(state)))
        return out


RuleSet = Sequence[Rule]


def paper_rules() -> tuple[Rule, ...]:
    """The four channels: photon emission for each spin orbital (bond formed
    only), bond formation with phonon emission (nuclei together, photon
    modes empty), and nuclear tunnelling (bond broken only)."""
    return (
        Rule("R1", "g_up", "l1", "p1", lambda s: s.L == 0),
        Rule("R2", "g_down", "l2", "p2", lambda s: s.L == 0),
        Rule("R3", "g_bond", "L", "m", lambda s: s.k == 0 and s.p1 == 0 and s.p2 == 0),
        Rule("R4", "zeta", "k", None, lambda s: s.L == 1),
    )


def diagonal_energy(params: ModelParams, state: BasisState) -> float:
    return params.hbar * (
        params.omega_up * (state.p1 + state.l1)
        + params.omega_down * (state.p2 + state.l2)
        + params.omega_ph * (state.m + state.L)
    )


def build_hamiltonian(
    params: ModelParams,
    space: StateSpace,
    rules: RuleSet | None = None,
) -> np.ndarray:
    """Real symmetric Hamiltonian on the restricted basis.

    Raises
    ------
    ValueError
        If a rule maps a state of ``space`` outside of it.
    """
    rules = paper_rules() if rules is None else rules
    n = len(space)
    h = np.zeros((n, n))
    for i, state in enumerate(space.states):
        h[i, i] = diagonal_energy(params, state)
        for rule in rules:
            target = rule.forward(state)
            if target is None:
                continue
            if target not in space:
                raise ValueError(
                    f"rule {rule.name} maps {state.label()} to {target.label()}, "
                    "which is outside the state space"
                )
            j = space.index_of[target]
            h[i, j] = h[j, i] = rule.amplitude(params, target)
    return h


def edge_list(space: StateSpace, rules: RuleSet | None = None) -> set[tuple[str, int, int]]:
    """``(rule, i, j)`` with ``i < j`` for every nonzero coupling in ``space``."""
    rules = paper_rules() if rules is None else rules
    edges = set()
    for i, state in enumerate(space.states):
        for rule in rules:
            target = rule.forward(state)
            if target is not None and target in space:
                j = space.index_of[target]
                edges.add((rule.name, min(i, j), max(i, j)))
    return edges


class RWACheck(NamedTuple):
    ratio_photon: float
    ratio_phonon: float
    ok: bool


def validate_rwa(params: ModelParams, threshold: float = RWA_THRESHOLD) -> RWACheck:
    """Coupling-to-frequency ratios; the rotating-wave picture needs both
    well below one."""
    omega = min(params.omega_up, params.omega_down)
    if omega <= 0 or params.omega_ph <= 0 or params.hbar <= 0:
        raise ValueError("RWA check needs strictly positive frequencies and hbar")
    ratio_photon = max(params.g_up, params.g_down) / (params.hbar * omega)
    ratio_phonon = params.g_bond / (params.hbar * params.omega_ph)
    return RWACheck(ratio_photon, ratio_phonon, ratio_photon < threshold and ratio_phonon < threshold)
