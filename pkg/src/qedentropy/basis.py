"""Reachable basis of the seven-qubit register.

A configuration is written ``|p1 p2 m l1 l2 L k>``: photon counts of the two
cavity modes, the phonon count, the two orbital flags, the bond flag (0 means
bond formed) and the nuclei flag (0 means both nuclei in one cavity).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Protocol, Sequence

NUM_QUBITS = 7
FULL_DIM = 1 << NUM_QUBITS
FIELDS = ("p1", "p2", "m", "l1", "l2", "L", "k")
FLAG_FIELDS = ("l1", "l2", "L", "k")
DEFAULT_OCCUPATION_CAP = 4


class BasisState(NamedTuple):
    p1: int
    p2: int
    m: int
    l1: int
    l2: int
    L: int
    k: int

    def label(self) -> str:
        return "|" + "".join(str(v) for v in self) + ">"


class BasisError(ValueError):
    pass


class _Rule(Protocol):
    def neighbors(self, state: BasisState) -> list[tuple[BasisState, float]]: ...


def check_state(state: BasisState, cap: int = DEFAULT_OCCUPATION_CAP) -> None:
    for name, value in zip(FIELDS, state):
        if value < 0:
            raise BasisError(f"{name}={value} is negative in {state.label()}")
        if name in FLAG_FIELDS and value > 1:
            raise BasisError(f"flag {name}={value} is not binary in {state.label()}")
        if value > cap:
            raise BasisError(
                f"{name}={value} exceeds occupation cap {cap} in {state.label()}"
            )


def full_index(state: BasisState) -> int:
    """Big-endian packing of a qubit-encodable state into ``[0, 128)``.

    The leftmost factor (``p1``) is the most significant bit, so ``|0000010>``
    maps to 2 and ``|1110000>`` to 112.
    """
    index = 0
    for name, value in zip(FIELDS, state):
        if value not in (0, 1):
            raise BasisError(
                f"{name}={value} cannot be stored in a qubit register ({state.label()})"
            )
        index = (index << 1) | value
    return index


def unpack(index: int) -> BasisState:
    if not 0 <= index < FULL_DIM:
        raise BasisError(f"full index {index} outside [0, {FULL_DIM})")
    bits = [(index >> (NUM_QUBITS - 1 - q)) & 1 for q in range(NUM_QUBITS)]
    return BasisState(*bits)


@dataclass(frozen=True)
class StateSpace:
    """Ordered restricted basis with maps to the full 128-state register."""

    states: tuple[BasisState, ...]
    index_of: dict[BasisState, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        states = tuple(BasisState(*s) for s in self.states)
        if len(set(states)) != len(states):
            raise BasisError("duplicate states in StateSpace")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "index_of", {s: i for i, s in enumerate(states)})

    @cached_property
    def full_index_of(self) -> tuple[int, ...]:
        # raises BasisError when some state is not qubit-encodable
        return tuple(full_index(s) for s in self.states)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, state: object) -> bool:
        return state in self.index_of

    def index(self, state: BasisState) -> int:
        try:
            return self.index_of[BasisState(*state)]
        except KeyError:
            raise BasisError(f"{BasisState(*state).label()} is not in the space") from None

    def permuted(self, order: Sequence[int]) -> "StateSpace":
        """Same states relabelled: new index ``i`` holds old state ``order[i]``."""
        return StateSpace(tuple(self.states[i] for i in order))


def enumerate_states(
    initial: Iterable[BasisState],
    rules: Sequence[_Rule],
    cap: int = DEFAULT_OCCUPATION_CAP,
) -> StateSpace:
    """Close ``initial`` under every rule, in both directions.

    Breadth-first: each layer holds the states first reached at that distance
    from the initial support, sorted lexicographically on the occupation tuple.

    Raises
    ------
    BasisError
        If ``initial`` is empty or any visited state violates the flag/cap
        constraints.
    """
    layer = sorted({BasisState(*s) for s in initial})
    if not layer:
        raise BasisError("initial support is empty")
    for s in layer:
        check_state(s, cap)

    seen = set(layer)
    ordered: list[BasisState] = []
    while layer:
        ordered.extend(layer)
        found = set()
        for state in layer:
            for rule in rules:
                for target, _ in rule.neighbors(state):
                    if target not in seen:
                        check_state(target, cap)
                        found.add(target)
        seen |= found
        layer = sorted(found)
    return StateSpace(tuple(ordered))


def paper_initial_support() -> tuple[BasisState, ...]:
    """The four components of the initial state: no photons or phonons,
    bond broken, nuclei in different cavities, all four orbital settings."""
    return tuple(BasisState(0, 0, 0, l1, l2, 1, 1) for l1 in (0, 1) for l2 in (0, 1))


# The 17 reachable states in reference numbering.
REFERENCE_BASIS: tuple[BasisState, ...] = tuple(
    BasisState(*map(int, s))
    for s in (
        "0000010", "0000011", "0000110", "0000111",
        "0001010", "0001011", "0001110", "0001111",
        "0010000", "0110000", "1010000", "1110000",
        "0010100", "1010100", "0011000", "0111000",
        "0011100",
    )
)

# REFERENCE_ORDER[i] is the reference index of restricted state i when the space
# is enumerated from paper_initial_support() with paper_rules().
REFERENCE_ORDER: tuple[int, ...] = (
    1, 3, 5, 7, 0, 2, 4, 6, 8, 12, 14, 16, 9, 15, 10, 13, 11,
)


def reference_space() -> StateSpace:
    """The reference states in reference order (useful for display)."""
    return StateSpace(REFERENCE_BASIS)
