"""Piecewise-homogeneous cakes, allocations and utility evaluation.

A cake is an ordered list of slices. On every slice each agent has a constant
value density, so a slice is worth ``density * length`` to an agent and an
allocation only needs to record which *fraction* of each slice goes to whom.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

AgentRef = Union[int, str]


class CakeError(ValueError):
    """The cake violates one of the model assumptions."""


class AllocationError(ValueError):
    """The fraction matrix is not a division of the cake."""


def as_fraction(value) -> Fraction:
    """Parse ``3``, ``"7/3"``, ``"0.2"`` or a Fraction into an exact rational.

    Floats are accepted through their shortest decimal repr, so ``0.2`` means 1/5.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {value!r}") from exc
    # numpy scalars and friends
    return Fraction(repr(float(value)))


@dataclass(frozen=True)
class Slice:
    length: Fraction
    densities: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "length", as_fraction(self.length))
        object.__setattr__(self, "densities", tuple(as_fraction(d) for d in self.densities))
        if self.length <= 0:
            raise CakeError(f"slice length must be positive, got {self.length}")
        for d in self.densities:
            if d < 0:
                raise CakeError(f"value densities must be non-negative, got {d}")

    def value(self, agent: int) -> Fraction:
        return self.densities[agent] * self.length


@dataclass(frozen=True)
class Cake:
    agents: tuple[str, ...]
    slices: tuple[Slice, ...]

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(str(a) for a in self.agents))
        object.__setattr__(self, "slices", tuple(self.slices))
        if not self.agents:
            raise CakeError("a cake needs at least one agent")
        if len(set(self.agents)) != len(self.agents):
            raise CakeError(f"duplicate agent names: {self.agents}")
        if not self.slices:
            raise CakeError("a cake needs at least one slice")
        n = len(self.agents)
        for j, s in enumerate(self.slices):
            if len(s.densities) != n:
                raise CakeError(
                    f"slice {j} has {len(s.densities)} densities but there are {n} agents"
                )
            if not any(d > 0 for d in s.densities):
                raise CakeError(f"slice {j} is worthless to every agent")
        for i, name in enumerate(self.agents):
            if self.total(i) <= 0:
                raise CakeError(f"agent {name!r} assigns zero value to the whole cake")

    @classmethod
    def from_table(cls, rows: dict | Sequence, lengths: Sequence | None = None,
                   agents: Sequence[str] | None = None) -> "Cake":
        """Build a cake from per-agent density rows, the way the tables are written.

        >>> Cake.from_table({"Alice": [1, 1], "Bob": [0, 3]}).total(1)
        Fraction(3, 1)
        """
        if isinstance(rows, dict):
            agents = list(rows)
            rows = [rows[a] for a in agents]
        rows = [list(r) for r in rows]
        if agents is None:
            agents = [f"agent{i}" for i in range(len(rows))]
        m = len(rows[0]) if rows else 0
        if any(len(r) != m for r in rows):
            raise CakeError("density rows have different lengths")
        if lengths is None:
            lengths = [1] * m
        if len(lengths) != m:
            raise CakeError(f"{len(lengths)} lengths given for {m} slices")
        slices = [Slice(lengths[j], tuple(r[j] for r in rows)) for j in range(m)]
        return cls(tuple(agents), tuple(slices))

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def n_slices(self) -> int:
        return len(self.slices)

    @property
    def lengths(self) -> tuple[Fraction, ...]:
        return tuple(s.length for s in self.slices)

    def agent_index(self, agent: AgentRef) -> int:
        if isinstance(agent, int) and not isinstance(agent, bool):
            if not 0 <= agent < self.n_agents:
                raise KeyError(f"agent index {agent} out of range")
            return agent
        try:
            return self.agents.index(agent)
        except ValueError:
            raise KeyError(f"unknown agent {agent!r}") from None

    def density(self, agent: int, j: int) -> Fraction:
        return self.slices[j].densities[agent]

    def value(self, agent: int, j: int) -> Fraction:
        """Absolute value of the whole slice ``j`` to ``agent``."""
        return self.slices[j].value(agent)

    def total(self, agent: AgentRef) -> Fraction:
        i = self.agent_index(agent)
        return sum((s.value(i) for s in self.slices), Fraction(0))

    def value_matrix(self) -> list[list[Fraction]]:
        return [[s.value(i) for s in self.slices] for i in range(self.n_agents)]

    def relative_value_matrix(self) -> list[list[Fraction]]:
        return [[v / self.total(i) for v in row] for i, row in enumerate(self.value_matrix())]

    def density_rows(self) -> list[list[Fraction]]:
        return [[s.densities[i] for s in self.slices] for i in range(self.n_agents)]

    def take_slices(self, indices: Iterable[int]) -> "Cake":
        """Sub-cake made of the given slice indices, in the given order."""
        return Cake(self.agents, tuple(self.slices[j] for j in indices))

    def permuted(self, agent_order: Sequence[int] | None = None,
                 slice_order: Sequence[int] | None = None) -> "Cake":
        agent_order = list(range(self.n_agents)) if agent_order is None else list(agent_order)
        slice_order = list(range(self.n_slices)) if slice_order is None else list(slice_order)
        slices = tuple(
            Slice(self.slices[j].length, tuple(self.slices[j].densities[i] for i in agent_order))
            for j in slice_order
        )
        return Cake(tuple(self.agents[i] for i in agent_order), slices)

    def __str__(self) -> str:
        width = max(len(a) for a in self.agents)
        lines = [" " * width + " | " + " ".join(f"{str(s.length):>6}" for s in self.slices)]
        for i, a in enumerate(self.agents):
            row = " ".join(f"{str(s.densities[i]):>6}" for s in self.slices)
            lines.append(f"{a:>{width}} | {row}")
        return "\n".join(lines)


@dataclass(frozen=True)
class Allocation:
    """Fraction matrix ``fractions[agent][slice]``; every column sums to exactly 1."""

    fractions: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(as_fraction(x) for x in row) for row in self.fractions)
        object.__setattr__(self, "fractions", rows)
        if not rows or not rows[0]:
            raise AllocationError("empty fraction matrix")
        m = len(rows[0])
        if any(len(r) != m for r in rows):
            raise AllocationError("ragged fraction matrix")
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                if not 0 <= x <= 1:
                    raise AllocationError(f"fraction of slice {j} for agent {i} is {x}, outside [0, 1]")
        for j in range(m):
            col = sum((r[j] for r in rows), Fraction(0))
            if col != 1:
                raise AllocationError(f"slice {j} is allocated {col} times instead of exactly once")

    @classmethod
    def whole_to(cls, cake: Cake, agent: AgentRef) -> "Allocation":
        i = cake.agent_index(agent)
        return cls(tuple(
            tuple(Fraction(int(k == i)) for _ in range(cake.n_slices))
            for k in range(cake.n_agents)
        ))

    @classmethod
    def from_owners(cls, cake: Cake, owners: Sequence[AgentRef]) -> "Allocation":
        """Each slice wholly to one agent."""
        owner_idx = [cake.agent_index(o) for o in owners]
        return cls(tuple(
            tuple(Fraction(int(owner_idx[j] == i)) for j in range(cake.n_slices))
            for i in range(cake.n_agents)
        ))

    @property
    def n_agents(self) -> int:
        return len(self.fractions)

    @property
    def n_slices(self) -> int:
        return len(self.fractions[0])

    def check_shape(self, cake: Cake) -> None:
        if self.n_agents != cake.n_agents or self.n_slices != cake.n_slices:
            raise AllocationError(
                f"allocation is {self.n_agents}x{self.n_slices} but the cake has "
                f"{cake.n_agents} agents and {cake.n_slices} slices"
            )

    def __getitem__(self, idx):
        i, j = idx
        return self.fractions[i][j]

    def permuted(self, agent_order: Sequence[int], slice_order: Sequence[int]) -> "Allocation":
        return Allocation(tuple(
            tuple(self.fractions[i][j] for j in slice_order) for i in agent_order
        ))


@dataclass(frozen=True)
class UtilityVector:
    absolute: tuple[Fraction, ...]
    relative: tuple[Fraction, ...]

    def sorted_absolute(self) -> tuple[Fraction, ...]:
        return tuple(sorted(self.absolute))

    def sorted_relative(self) -> tuple[Fraction, ...]:
        return tuple(sorted(self.relative))


def absolute_utility(cake: Cake, alloc: Allocation, agent: AgentRef) -> Fraction:
    alloc.check_shape(cake)
    i = cake.agent_index(agent)
    row = alloc.fractions[i]
    return sum((row[j] * s.value(i) for j, s in enumerate(cake.slices) if row[j]), Fraction(0))


def relative_utility(cake: Cake, alloc: Allocation, agent: AgentRef) -> Fraction:
    i = cake.agent_index(agent)
    return absolute_utility(cake, alloc, i) / cake.total(i)


def piece_value(cake: Cake, alloc: Allocation, viewer: AgentRef, owner: AgentRef) -> Fraction:
    """Absolute value, to ``viewer``, of the piece held by ``owner``."""
    alloc.check_shape(cake)
    v, o = cake.agent_index(viewer), cake.agent_index(owner)
    row = alloc.fractions[o]
    return sum((row[j] * s.value(v) for j, s in enumerate(cake.slices) if row[j]), Fraction(0))


def utilities(cake: Cake, alloc: Allocation) -> UtilityVector:
    absolute = tuple(absolute_utility(cake, alloc, i) for i in range(cake.n_agents))
    relative = tuple(a / cake.total(i) for i, a in enumerate(absolute))
    return UtilityVector(absolute, relative)


def enlarge(cake: Cake, extra: Sequence[Slice]) -> Cake:
    """Append ``extra`` slices on the right; original slice indices are kept."""
    for j, s in enumerate(extra):
        if len(s.densities) != cake.n_agents:
            raise CakeError(
                f"extra slice {j} has {len(s.densities)} densities for {cake.n_agents} agents"
            )
    return Cake(cake.agents, cake.slices + tuple(extra))


def remove_agent(cake: Cake, agent: AgentRef) -> tuple[Cake, list[int]]:
    """Drop one agent; slices nobody else values are pruned.

    Returns the reduced cake and the indices (in the original cake) of the
    pruned slices.
    """
    if cake.n_agents < 2:
        raise CakeError("cannot remove the last agent")
    i = cake.agent_index(agent)
    keep_agents = [k for k in range(cake.n_agents) if k != i]
    slices, pruned = [], []
    for j, s in enumerate(cake.slices):
        dens = tuple(s.densities[k] for k in keep_agents)
        if any(d > 0 for d in dens):
            slices.append(Slice(s.length, dens))
        else:
            pruned.append(j)
    if not slices:
        raise CakeError("no slice is valued by the remaining agents")
    return Cake(tuple(cake.agents[k] for k in keep_agents), tuple(slices)), pruned
