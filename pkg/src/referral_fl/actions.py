"""Joint per-round decisions and the per-round evaluation context."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .config import SimConfig
from .cost import PairCost, pair_cost
from .net import NeighborSets, NetworkState


@dataclass(frozen=True)
class ActionPolicy:
    """One decision per RC.

    ``assign[m]`` is ``m`` for direct participation, an UnRC id for a
    referral, or ``None``. ``phi[m]`` is True exactly for direct participation
    and ``xi[m]`` is True for a Partial referral (the referred UnRC is active).
    """

    phi: tuple
    assign: tuple
    xi: tuple

    @classmethod
    def from_assign(cls, assign, state: NetworkState) -> "ActionPolicy":
        assign = tuple(None if a is None else int(a) for a in assign)
        phi = tuple(a == m for m, a in enumerate(assign))
        xi = tuple(a is not None and a != m and bool(state.active[a - state.M])
                   for m, a in enumerate(assign))
        return cls(phi, assign, xi)

    @property
    def participants(self) -> list[tuple[int, int]]:
        return [(m, a) for m, a in enumerate(self.assign) if a is not None]

    @property
    def referrals(self) -> list[tuple[int, int]]:
        return [(m, a) for m, a in enumerate(self.assign) if a is not None and a != m]

    @property
    def is_noop(self) -> bool:
        return all(a is None for a in self.assign)

    def validate(self, M: int) -> None:
        taken = [a for m, a in enumerate(self.assign) if a is not None and a != m]
        if len(taken) != len(set(taken)):
            raise ValueError("an UnRC is assigned to more than one RC")
        for m, a in enumerate(self.assign):
            if a is not None and a != m and a < M:
                raise ValueError("an RC may only refer an UnRC or itself")
            if self.phi[m] != (a == m):
                raise ValueError("phi must mark exactly the self-assigned RCs")


@dataclass
class RoundContext:
    """Everything a selector needs for one round, with pair costs cached."""

    state: NetworkState
    sets: NeighborSets
    cfg: SimConfig
    _costs: Optional[dict] = None

    def cost(self, m: int, i: int) -> PairCost:
        if self._costs is None:
            self._costs = {}
        key = (m, i)
        if key not in self._costs:
            self._costs[key] = pair_cost(self.state, m, i, self.cfg)
        return self._costs[key]

    @property
    def M(self) -> int:
        return self.state.M

    @property
    def idle(self) -> list[int]:
        return [m for m in range(self.state.M) if self.state.idle[m]]
